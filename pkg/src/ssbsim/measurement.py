"""Projective and unitary (symmetry-breaking) measurement models.

The projective model applies ``Pi_m`` and renormalizes.  The unitary model
applies a state-dependent unitary ``M_m`` built from the prepared
amplitudes ``(alpha, beta)`` that rotates the state onto ``|m>`` without
any renormalization:

    M_0 = [[conj(a), conj(b)], [-b, a]]
    M_1 = [[b, -a], [conj(a), conj(b)]]

Both models draw the outcome with Born probabilities.  On two qubits the
same construction acts on span{|01>, |10>} and as the identity on
span{|00>, |11>}.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ContractViolation, DegenerateConditioningError
from .qcore import (
    HERM_TOL,
    NORM_TOL,
    DensityMatrix,
    Ket,
    Operator,
    apply_operator,
    ray_fidelity,
)

SQRT1_2 = 1.0 / math.sqrt(2.0)
# ray fidelity below 1 - AMPS_MATCH_TOL means the M operators were built for another state
AMPS_MATCH_TOL = 1e-9
# basis indices of |01> and |10> in the order |00>, |01>, |10>, |11>
BELL_SUBSPACE = (1, 2)


class MeasurementModel(str, enum.Enum):
    PROJECTIVE = "projective"
    UNITARY_SSB = "unitary-ssb"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class QubitAmplitudes:
    """Normalized amplitudes of ``alpha|0> + beta|1>``."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if not all(map(math.isfinite, (a.real, a.imag, b.real, b.imag))):
            raise ContractViolation("amplitudes must be finite")
        norm2 = abs(a) ** 2 + abs(b) ** 2
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ContractViolation(f"|alpha|^2 + |beta|^2 = {norm2:.15g}, expected 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def balanced(cls) -> "QubitAmplitudes":
        return cls(SQRT1_2, SQRT1_2)

    @classmethod
    def from_ket(cls, ket: Ket) -> "QubitAmplitudes":
        if ket.dim != 2:
            raise ContractViolation("QubitAmplitudes needs a single-qubit ket")
        return cls(complex(ket.amps[0]), complex(ket.amps[1]))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "QubitAmplitudes":
        """Haar-random ray, returned in the symmetric phase gauge."""
        cos_theta = rng.uniform(-1.0, 1.0)
        phi = rng.uniform(-math.pi / 2, math.pi / 2)
        a = math.sqrt((1.0 + cos_theta) / 2.0)
        r = math.sqrt((1.0 - cos_theta) / 2.0)
        return cls(a * cmath.exp(-1j * phi), r * cmath.exp(1j * phi))

    def symmetric_gauge(self) -> "QubitAmplitudes":
        """Same ray with the global phase chosen so that arg(alpha) = -arg(beta).

        Both flipper identities hold in this gauge.
        """
        if self.alpha == 0 or self.beta == 0:
            a = abs(self.alpha)
            b = abs(self.beta)
            return QubitAmplitudes(a, b)
        gamma = -(cmath.phase(self.alpha) + cmath.phase(self.beta)) / 2.0
        g = cmath.exp(1j * gamma)
        return QubitAmplitudes(self.alpha * g, self.beta * g)

    @property
    def ket(self) -> Ket:
        return Ket([self.alpha, self.beta])

    @property
    def phi(self) -> float:
        """arg(beta), taken as 0 when beta == 0."""
        if self.beta == 0:
            return 0.0
        return cmath.phase(self.beta)

    @property
    def probabilities(self) -> tuple:
        return (abs(self.alpha) ** 2, abs(self.beta) ** 2)


@dataclass(frozen=True)
class OutcomeRecord:
    outcome: int
    posterior: Ket
    applied_op: str


def _check_outcome(m) -> int:
    if m not in (0, 1) or isinstance(m, bool):
        raise ContractViolation(f"outcome label must be 0 or 1, got {m!r}")
    return int(m)


def projector(m: int) -> Operator:
    m = _check_outcome(m)
    entries = np.zeros((2, 2), dtype=complex)
    entries[m, m] = 1.0
    return Operator(entries, tag=f"PI_{m}")


def ssb_unitary(amps: QubitAmplitudes, m: int) -> Operator:
    """Unitary ``M_m`` with ``M_m (alpha, beta) = |m>``."""
    m = _check_outcome(m)
    a, b = amps.alpha, amps.beta
    if m == 0:
        entries = [[a.conjugate(), b.conjugate()], [-b, a]]
    else:
        entries = [[b, -a], [a.conjugate(), b.conjugate()]]
    return Operator(entries, tag=f"M_{m}")


def ssb_inverse(amps: QubitAmplitudes, m: int) -> Operator:
    """Adjoint of :func:`ssb_unitary`, which is also its inverse."""
    m = _check_outcome(m)
    a, b = amps.alpha, amps.beta
    if m == 0:
        entries = [[a, -b.conjugate()], [b, a.conjugate()]]
    else:
        entries = [[b.conjugate(), a], [-a.conjugate(), b]]
    return Operator(entries, tag=f"M_{m}_INV")


def flipper(amps: QubitAmplitudes) -> Operator:
    """``U = [[0, e^{i theta}], [1, 0]]`` with ``theta = -2 arg(beta)``.

    ``U M_0 U^dagger = M_0^{-1}`` for any amplitudes.  The companion
    identity for ``M_1`` additionally needs ``arg(alpha) = -arg(beta)``
    (mod pi); see :meth:`QubitAmplitudes.symmetric_gauge`.  With a real
    alpha it therefore only holds for real beta.
    """
    theta = -2.0 * amps.phi
    return Operator([[0, cmath.exp(1j * theta)], [1, 0]], tag="U")


def born_probabilities(ket: Ket, basis_dim: Optional[int] = None) -> list:
    if basis_dim is not None and basis_dim != ket.dim:
        raise ContractViolation(f"basis_dim {basis_dim} does not match ket dimension {ket.dim}")
    if not ket.is_normalized():
        raise ContractViolation("Born probabilities need a normalized ket")
    return [float(abs(c) ** 2) for c in ket.amps]


def sample_outcome(probs: Sequence[float], u: float) -> int:
    """Inverse-CDF draw; zero-probability branches are never returned."""
    acc = 0.0
    last = None
    for k, p in enumerate(probs):
        if p <= 0.0:
            continue
        acc += p
        last = k
        if u < acc:
            return k
    if last is None:
        raise ContractViolation("all outcome probabilities are zero")
    return last


def measure(ket: Ket, amps: Optional[QubitAmplitudes], model, rng) -> OutcomeRecord:
    """Measure a qubit in the computational basis under ``model``.

    Parameters
    ----------
    ket : Ket
        Normalized single-qubit state.
    amps : QubitAmplitudes
        Amplitudes the unitary operators are built from.  They must
        describe ``ket`` (up to global phase); ignored by the projective
        model.
    model : MeasurementModel or str
    rng : object with a ``random()`` method
        One uniform draw is consumed.
    """
    model = MeasurementModel(model)
    if ket.dim != 2:
        raise ContractViolation("measure acts on single-qubit kets; use measure_bell for dim 4")
    probs = born_probabilities(ket)
    if model is MeasurementModel.UNITARY_SSB:
        if amps is None:
            raise ContractViolation("unitary-ssb measurement needs the prepared amplitudes")
        if ray_fidelity(ket, amps.ket) < 1.0 - AMPS_MATCH_TOL:
            raise ContractViolation("amplitudes do not describe the measured state")
    m = sample_outcome(probs, rng.random())
    if model is MeasurementModel.PROJECTIVE:
        op = projector(m)
        raw = apply_operator(op, ket)
        posterior = Ket(raw.amps / raw.norm())
    else:
        op = ssb_unitary(amps, m)
        posterior = apply_operator(op, ket)
    return OutcomeRecord(m, posterior, op.tag)


def nonselective_channel(rho: DensityMatrix, amps: QubitAmplitudes, model) -> DensityMatrix:
    """Ensemble state after measuring without reading the record.

    Projective: ``sum_m Pi_m rho Pi_m``.  Unitary: ``sum_m p_m M_m rho M_m^dagger``
    with ``p_m`` the Born probabilities of the prepared state.
    """
    model = MeasurementModel(model)
    if rho.dim != 2:
        raise ContractViolation("nonselective_channel acts on single-qubit density matrices")
    r = rho.entries
    out = np.zeros((2, 2), dtype=complex)
    if model is MeasurementModel.PROJECTIVE:
        for m in (0, 1):
            p = projector(m).entries
            out += p @ r @ p.conj().T
    else:
        for m, pm in enumerate(amps.probabilities):
            u = ssb_unitary(amps, m).entries
            out += pm * (u @ r @ u.conj().T)
    return DensityMatrix(out)


def subensemble(rho_mixed: DensityMatrix, m: int) -> DensityMatrix:
    """Keep only the ``m`` branch of a dephased qubit and renormalize."""
    m = _check_outcome(m)
    r = rho_mixed.entries
    if rho_mixed.dim != 2:
        raise ContractViolation("subensemble acts on single-qubit density matrices")
    if abs(r[0, 1]) > HERM_TOL:
        raise ContractViolation("subensemble needs a diagonal (dephased) density matrix")
    weight = r[m, m].real
    if weight <= 0.0:
        raise DegenerateConditioningError(f"branch {m} has zero weight")
    p = projector(m).entries
    return DensityMatrix(p @ r @ p / weight)


_BELL_ALIASES = {
    "psi+": "psi+", "Ψ⁺": "psi+", "psi_plus": "psi+",
    "psi-": "psi-", "Ψ⁻": "psi-", "psi_minus": "psi-",
    "phi+": "phi+", "Φ⁺": "phi+", "phi_plus": "phi+",
    "phi-": "phi-", "Φ⁻": "phi-", "phi_minus": "phi-",
}
BELL_KINDS = ("psi+", "psi-", "phi+", "phi-")


def bell_state(kind: str) -> Ket:
    key = _BELL_ALIASES.get(kind) or _BELL_ALIASES.get(str(kind).lower())
    if key is None:
        raise ContractViolation(f"unknown Bell state {kind!r}; expected one of {BELL_KINDS}")
    s = SQRT1_2
    amps = {
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
    }[key]
    return Ket(amps)


def _embed_subspace(block) -> np.ndarray:
    full = np.eye(4, dtype=complex)
    i, j = BELL_SUBSPACE
    full[np.ix_([i, j], [i, j])] = block
    return full


def bell_measurement_operator(m: int) -> Operator:
    """4x4 unitary rotating Psi+ onto |01> (m=0) or |10> (m=1)."""
    m = _check_outcome(m)
    s = SQRT1_2
    block = [[s, s], [-s, s]] if m == 0 else [[s, -s], [s, s]]
    return Operator(_embed_subspace(block), tag=f"M_AB_{m}")


def bell_projector(m: int) -> Operator:
    """Projector onto |01> (m=0) or |10> (m=1)."""
    m = _check_outcome(m)
    entries = np.zeros((4, 4), dtype=complex)
    k = BELL_SUBSPACE[m]
    entries[k, k] = 1.0
    return Operator(entries, tag=f"PI_AB_{m}")


def measure_bell(ket: Ket, model, rng) -> OutcomeRecord:
    """Measure a two-qubit state confined to span{|01>, |10>}.

    The unitary model is only defined for Psi+ (the state the operators
    rotate onto the basis); any other input is a contract violation.
    """
    model = MeasurementModel(model)
    if ket.dim != 4:
        raise ContractViolation("measure_bell acts on two-qubit kets")
    probs = born_probabilities(ket)
    outside = probs[0] + probs[3]
    if outside > NORM_TOL:
        raise ContractViolation("state has weight outside span{|01>, |10>}")
    if model is MeasurementModel.UNITARY_SSB and ray_fidelity(ket, bell_state("psi+")) < 1.0 - AMPS_MATCH_TOL:
        raise ContractViolation("unitary Bell measurement operators are built for Psi+")
    m = sample_outcome([probs[BELL_SUBSPACE[0]], probs[BELL_SUBSPACE[1]]], rng.random())
    if model is MeasurementModel.PROJECTIVE:
        op = bell_projector(m)
        raw = apply_operator(op, ket)
        posterior = Ket(raw.amps / raw.norm())
    else:
        op = bell_measurement_operator(m)
        posterior = apply_operator(op, ket)
    return OutcomeRecord(m, posterior, op.tag)


def bell_nonselective_channel(rho: DensityMatrix, model) -> DensityMatrix:
    """Two-qubit analogue of :func:`nonselective_channel` for Psi+ inputs."""
    model = MeasurementModel(model)
    if rho.dim != 4:
        raise ContractViolation("bell_nonselective_channel acts on two-qubit density matrices")
    r = rho.entries
    prepared = born_probabilities(bell_state("psi+"))
    out = np.zeros((4, 4), dtype=complex)
    for m in (0, 1):
        if model is MeasurementModel.PROJECTIVE:
            op = bell_projector(m).entries
            out += op @ r @ op.conj().T
        else:
            op = bell_measurement_operator(m).entries
            out += prepared[BELL_SUBSPACE[m]] * (op @ r @ op.conj().T)
    return DensityMatrix(out)
