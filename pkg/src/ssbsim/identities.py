"""Catalogue of operator identities checked by ``ssbsim verify``.

Equality rows report the largest entry deviation seen over all sampled
amplitude pairs and pass when it is within ``tol``.  Separation rows
(the non-projector checks) report the smallest magnitude seen and pass
when it exceeds a fixed threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .measurement import (
    QubitAmplitudes,
    bell_measurement_operator,
    bell_state,
    flipper,
    nonselective_channel,
    projector,
    ssb_inverse,
    ssb_unitary,
)
from .qcore import I2, SIGMA_Y, DensityMatrix, purity

SEPARATION_MIN = 1e-6
EQUALITY = "equality"
SEPARATION = "separation"


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    statement: str
    kind: str
    value: float
    threshold: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statement": self.statement,
            "kind": self.kind,
            "value": self.value,
            "threshold": self.threshold,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    rows: tuple
    tol: float
    samples: int
    seed: int

    @property
    def overall(self) -> bool:
        return all(r.passed for r in self.rows)

    def row(self, name: str) -> IdentityCheck:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "samples": self.samples,
            "seed": self.seed,
            "overall": "pass" if self.overall else "fail",
            "rows": [r.to_dict() for r in self.rows],
        }


def _dev(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _mag(a) -> float:
    return float(np.max(np.abs(np.asarray(a))))


@dataclass(frozen=True)
class _Sample:
    amps: QubitAmplitudes
    m0: np.ndarray
    m1: np.ndarray
    inv0: np.ndarray
    inv1: np.ndarray
    u: np.ndarray

    @classmethod
    def build(cls, amps):
        return cls(
            amps,
            ssb_unitary(amps, 0).entries,
            ssb_unitary(amps, 1).entries,
            ssb_inverse(amps, 0).entries,
            ssb_inverse(amps, 1).entries,
            flipper(amps).entries,
        )


def _pure_kept(s: _Sample) -> float:
    rho = np.outer(s.amps.ket.amps, s.amps.ket.amps.conj())
    return max(abs(purity(DensityMatrix(m @ rho @ m.conj().T)) - 1.0) for m in (s.m0, s.m1))


def _channel_gap(s: _Sample) -> float:
    rho = DensityMatrix.from_ket(s.amps.ket)
    p = nonselective_channel(rho, s.amps, "projective").entries
    q = nonselective_channel(rho, s.amps, "unitary-ssb").entries
    return _dev(p, q)


def _sample_checks(amps_list) -> List[tuple]:
    """(name, statement, kind, value) for the amplitude-dependent identities."""
    samples = [_Sample.build(a) for a in amps_list]
    e0, e1 = np.array([1, 0]), np.array([0, 1])
    eye = np.eye(2)

    def worst(fn: Callable[[_Sample], float]) -> float:
        return max(fn(s) for s in samples)

    def least(fn: Callable[[_Sample], float]) -> float:
        return min(fn(s) for s in samples)

    return [
        ("M0_unitary", "M0^dag M0 = I", EQUALITY, worst(lambda s: _dev(s.m0.conj().T @ s.m0, eye))),
        ("M1_unitary", "M1^dag M1 = I", EQUALITY, worst(lambda s: _dev(s.m1.conj().T @ s.m1, eye))),
        ("M0_maps_to_ket0", "M0 |psi> = |0>", EQUALITY, worst(lambda s: _dev(s.m0 @ s.amps.ket.amps, e0))),
        ("M1_maps_to_ket1", "M1 |psi> = |1>", EQUALITY, worst(lambda s: _dev(s.m1 @ s.amps.ket.amps, e1))),
        ("M0_inverse_is_adjoint", "M0^-1 = M0^dag", EQUALITY,
         worst(lambda s: _dev(np.linalg.inv(s.m0), s.m0.conj().T))),
        ("M1_inverse_is_adjoint", "M1^-1 = M1^dag", EQUALITY,
         worst(lambda s: _dev(np.linalg.inv(s.m1), s.m1.conj().T))),
        ("M0_inverse_matrix", "ssb_inverse(0) M0 = I", EQUALITY, worst(lambda s: _dev(s.inv0 @ s.m0, eye))),
        ("M1_inverse_matrix", "ssb_inverse(1) M1 = I", EQUALITY, worst(lambda s: _dev(s.inv1 @ s.m1, eye))),
        ("M0_M1_not_projectors", "M0 M1 != 0", SEPARATION, least(lambda s: _mag(s.m0 @ s.m1))),
        ("M1_M0_not_projectors", "M1 M0 != 0", SEPARATION, least(lambda s: _mag(s.m1 @ s.m0))),
        ("M0_plus_M1_not_identity", "M0 + M1 != I", SEPARATION, least(lambda s: _mag(s.m0 + s.m1 - eye))),
        ("flipper_M0", "U M0 U^dag = M0^-1, theta = -2 phi", EQUALITY,
         worst(lambda s: _dev(s.u @ s.m0 @ s.u.conj().T, s.inv0))),
        ("flipper_M1", "U M1 U^dag = M1^-1, theta = -2 phi", EQUALITY,
         worst(lambda s: _dev(s.u @ s.m1 @ s.u.conj().T, s.inv1))),
        ("pure_state_preserved", "Tr[(M rho M^dag)^2] = 1 for pure rho", EQUALITY, worst(_pure_kept)),
        ("nonselective_models_agree", "sum Pi rho Pi = sum p_m M rho M^dag", EQUALITY, worst(_channel_gap)),
    ]


def _fixed_checks() -> List[tuple]:
    p0, p1 = projector(0).entries, projector(1).entries
    bal = QubitAmplitudes.balanced()
    s = 1.0 / math.sqrt(2.0)
    psi = bell_state("psi+").amps
    b0, b1 = bell_measurement_operator(0).entries, bell_measurement_operator(1).entries
    u_ab = np.eye(4, dtype=complex)
    u_ab[1:3, 1:3] = [[0, 1], [1, 0]]
    e01, e10 = np.eye(4)[1], np.eye(4)[2]
    return [
        ("Pi0_Pi1_zero", "Pi0 Pi1 = Pi1 Pi0 = 0", EQUALITY, max(_mag(p0 @ p1), _mag(p1 @ p0))),
        ("Pi_sum_identity", "Pi0 + Pi1 = I", EQUALITY, _dev(p0 + p1, I2)),
        ("balanced_M0", "M0 = (I + i sigma_y)/sqrt2 at alpha = beta = 1/sqrt2", EQUALITY,
         _dev(ssb_unitary(bal, 0).entries, s * (I2 + 1j * SIGMA_Y))),
        ("balanced_M1", "M1 = (I - i sigma_y)/sqrt2 at alpha = beta = 1/sqrt2", EQUALITY,
         _dev(ssb_unitary(bal, 1).entries, s * (I2 - 1j * SIGMA_Y))),
        ("balanced_M0_is_M1_inverse", "M0 = M1^-1 at alpha = beta = 1/sqrt2", EQUALITY,
         _dev(ssb_unitary(bal, 0).entries, ssb_inverse(bal, 1).entries)),
        ("bell_M0_unitary", "M_AB_0 unitary on H_AB", EQUALITY, _dev(b0.conj().T @ b0, np.eye(4))),
        ("bell_M1_unitary", "M_AB_1 unitary on H_AB", EQUALITY, _dev(b1.conj().T @ b1, np.eye(4))),
        ("bell_M0_to_01", "M_AB_0 |Psi+> = |01>", EQUALITY, _dev(b0 @ psi, e01)),
        ("bell_M1_to_10", "M_AB_1 |Psi+> = |10>", EQUALITY, _dev(b1 @ psi, e10)),
        ("bell_M1_M0_restores", "M_AB_1 M_AB_0 |Psi+> = |Psi+>", EQUALITY, _dev(b1 @ b0 @ psi, psi)),
        ("bell_M0_M1_restores", "M_AB_0 M_AB_1 |Psi+> = |Psi+>", EQUALITY, _dev(b0 @ b1 @ psi, psi)),
        ("bell_flipper", "U M_AB_0 U^dag = (M_AB_0)^-1", EQUALITY,
         _dev(u_ab @ b0 @ u_ab.conj().T, b1)),
    ]


def verify_identities(tol: float = 1e-12, samples: int = 1000, seed: int = 7) -> VerificationReport:
    """Evaluate every catalogued identity over ``samples`` random amplitude pairs.

    Amplitudes are Haar-random rays in the symmetric phase gauge
    (``arg alpha = -arg beta``), under which both flipper identities hold.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    amps_list = [QubitAmplitudes.random(rng) for _ in range(samples)]
    rows = []
    for name, statement, kind, value in _fixed_checks() + _sample_checks(amps_list):
        if kind == EQUALITY:
            rows.append(IdentityCheck(name, statement, kind, value, tol, value <= tol))
        else:
            rows.append(IdentityCheck(name, statement, kind, value, SEPARATION_MIN, value > SEPARATION_MIN))
    return VerificationReport(tuple(rows), tol, samples, seed)
