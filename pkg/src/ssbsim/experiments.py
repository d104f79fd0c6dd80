"""Seeded Monte Carlo engines for the two discriminating experiments.

``single-qubit-null``
    A photon in ``|0>`` passes a 50-50 beamsplitter (``M_1``).  An ideal
    detector watches ``|1>``; clicks are counted and discarded.  On a null
    result the model's update to ``|0>`` is applied and a second
    beamsplitter (``M_0^{-1}``) tries to restore the prepared state.

``bell-reversal``
    ``Psi+`` is measured in span{|01>, |10>} either by projection or by the
    unitary ``M^AB_m``; a reversal policy then decides which inverse, if
    any, is applied.

Trial ``t`` draws from the counter-based stream ``(seed, t)``, so results do
not depend on the backend or on trial order, and aggregation uses exactly
rounded sums.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy.stats import chi2_contingency

from . import kernels
from .errors import ConfigError, ContractViolation, EmptyEnsembleError
from .measurement import (
    BELL_SUBSPACE,
    MeasurementModel,
    QubitAmplitudes,
    bell_measurement_operator,
    bell_nonselective_channel,
    bell_projector,
    bell_state,
    projector,
    ssb_inverse,
    ssb_unitary,
)
from .qcore import DensityMatrix, Ket, fidelity_pure, purity
from .rng import MASK64
from .tomography import TomographyResult, tomography_pipeline

P_VALUE_MIN = 0.01
DIFF_MAX = 0.01
# stream id for tomography sampling, disjoint from trial indices in practice
TOMOGRAPHY_STREAM = 0x746F6D6F


class Experiment(str, enum.Enum):
    SINGLE_QUBIT_NULL = "single-qubit-null"
    BELL_REVERSAL = "bell-reversal"

    def __str__(self):
        return self.value


class ReversalPolicy(str, enum.Enum):
    CONDITIONED = "conditioned"
    UNCONDITIONED = "unconditioned"
    NONE = "none"

    def __str__(self):
        return self.value


def _enum_field(cls, value, name):
    try:
        return cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in cls)
        raise ConfigError(name, f"unknown value {value!r}; expected one of {choices}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: Experiment
    model: MeasurementModel
    trials: int
    seed: int
    reversal_policy: ReversalPolicy = ReversalPolicy.CONDITIONED
    tomography_shots: int = 0
    tomography_exact: bool = False

    def __post_init__(self):
        object.__setattr__(self, "experiment", _enum_field(Experiment, self.experiment, "experiment"))
        object.__setattr__(self, "model", _enum_field(MeasurementModel, self.model, "model"))
        object.__setattr__(
            self, "reversal_policy", _enum_field(ReversalPolicy, self.reversal_policy, "reversal")
        )
        for name in ("trials", "seed", "tomography_shots"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(name, f"must be an integer, got {v!r}")
        if self.trials < 1:
            raise ConfigError("trials", "must be at least 1")
        if not 0 <= self.seed <= MASK64:
            raise ConfigError("seed", "must be a 64-bit unsigned integer")
        if self.tomography_shots < 0:
            raise ConfigError("tomography_shots", "must be non-negative")

    @property
    def runs_tomography(self) -> bool:
        return self.tomography_exact or self.tomography_shots > 0

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment.value,
            "model": self.model.value,
            "trials": self.trials,
            "seed": self.seed,
            "reversal_policy": self.reversal_policy.value,
            "tomography_shots": self.tomography_shots,
            "tomography_exact": self.tomography_exact,
        }


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    outcome: int
    posterior: Ket
    reversed: Optional[Ket]
    applied_op: str
    reversal_op: Optional[str]
    discarded: bool = False

    @property
    def detector_fired(self) -> bool:
        """Single-qubit experiment: the detector watching ``|1>`` clicked."""
        return self.outcome == 1


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    counts: Dict[str, int]
    discarded: int
    exact_ensemble: DensityMatrix
    purity_exact: float
    fidelity_to_target: float
    min_trial_fidelity: float
    target: Ket = field(repr=False)
    tomography: Optional[TomographyResult] = None
    trials: Optional[kernels.TrialArrays] = field(default=None, repr=False)
    op_tags: tuple = field(default=((), ()), repr=False)

    @property
    def kept(self) -> int:
        return self.config.trials - self.discarded

    def records(self) -> List[TrialRecord]:
        """Materialize per-trial records from the kernel arrays."""
        arr = self.trials
        meas_tags, rev_tags = self.op_tags
        discard = _discard_outcome(self.config)
        reversing = self.config.reversal_policy is not ReversalPolicy.NONE
        out = []
        for t in range(len(arr.outcomes)):
            m = int(arr.outcomes[t])
            dropped = m == discard
            rev = Ket(arr.reversed[t]) if reversing and not dropped else None
            out.append(TrialRecord(
                trial_index=t,
                outcome=m,
                posterior=Ket(arr.posterior[t]),
                reversed=rev,
                applied_op=meas_tags[m],
                reversal_op=rev_tags[m] if rev is not None else None,
                discarded=dropped,
            ))
        return out

    def to_dict(self) -> dict:
        m = self.exact_ensemble.entries
        return {
            "config": self.config.to_dict(),
            "counts": dict(self.counts),
            "discarded": self.discarded,
            "exact_ensemble": {"re": m.real.tolist(), "im": m.imag.tolist()},
            "purity_exact": self.purity_exact,
            "fidelity_to_target": self.fidelity_to_target,
            "min_trial_fidelity": self.min_trial_fidelity,
            "tomography": self.tomography.to_dict() if self.tomography is not None else None,
        }


def _discard_outcome(config: ExperimentConfig) -> int:
    return 1 if config.experiment is Experiment.SINGLE_QUBIT_NULL else -1


def _mean_projector(states: np.ndarray) -> DensityMatrix:
    """(1/N) sum |s><s| with exactly rounded (order-independent) sums."""
    n, dim = states.shape
    if n == 0:
        raise EmptyEnsembleError("no states to average")
    outer = states[:, :, None] * states[:, None, :].conj()
    acc = np.empty((dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            col = outer[:, i, j]
            acc[i, j] = complex(math.fsum(col.real.tolist()), math.fsum(col.imag.tolist()))
    return DensityMatrix(acc / n)


def ensemble_density(records: List[TrialRecord], use_reversed: bool = True) -> DensityMatrix:
    """Average projector over the non-discarded records' final (or posterior) states."""
    kept = [r for r in records if not r.discarded]
    if not kept:
        raise EmptyEnsembleError("no kept trials to average")
    dims = {r.posterior.dim for r in kept}
    if len(dims) != 1:
        raise ContractViolation("records have mixed dimensions")
    if use_reversed:
        if any(r.reversed is None for r in kept):
            raise ContractViolation("records carry no reversed state")
        states = np.array([r.reversed.amps for r in kept])
    else:
        states = np.array([r.posterior.amps for r in kept])
    return _mean_projector(states)


def _finish(config, counts, arrays, discard, ensemble, target, op_tags) -> ExperimentResult:
    kept = arrays.outcomes != discard
    tomo = None
    if config.runs_tomography:
        shots = 0 if config.tomography_exact else config.tomography_shots
        rng = np.random.default_rng([config.seed, TOMOGRAPHY_STREAM])
        tomo = tomography_pipeline(ensemble, target, shots, rng)
    return ExperimentResult(
        config=config,
        counts=counts,
        discarded=int(np.count_nonzero(~kept)),
        exact_ensemble=ensemble,
        purity_exact=purity(ensemble),
        fidelity_to_target=fidelity_pure(target, ensemble),
        min_trial_fidelity=float(np.min(arrays.fidelity[kept])),
        target=target,
        tomography=tomo,
        trials=arrays,
        op_tags=op_tags,
    )


def run_single_qubit_null(config: ExperimentConfig, backend: Optional[str] = None) -> ExperimentResult:
    if config.experiment is not Experiment.SINGLE_QUBIT_NULL:
        raise ContractViolation(f"run_single_qubit_null got experiment {config.experiment}")
    amps = QubitAmplitudes.balanced()
    start = Ket.basis(0)
    beamsplitter = ssb_unitary(amps, 1)
    target = amps.ket
    if config.model is MeasurementModel.PROJECTIVE:
        meas = [projector(0), projector(1)]
        renorm = True
    else:
        meas = [ssb_unitary(amps, 0), ssb_unitary(amps, 1)]
        renorm = False
    policy = config.reversal_policy
    if policy is ReversalPolicy.CONDITIONED:
        rev = [ssb_inverse(amps, 0), ssb_inverse(amps, 1)]
    else:
        # unconditioned: the second beamsplitter is always M_1 (= M_0^{-1} here)
        rev = [beamsplitter, beamsplitter]
    arrays = kernels.run_trials(
        config.seed, config.trials, start.amps, beamsplitter.entries, (0, 1),
        np.array([op.entries for op in meas]), renorm,
        np.array([op.entries for op in rev]), policy is not ReversalPolicy.NONE,
        1, target.amps, backend=backend,
    )
    fired = int(np.count_nonzero(arrays.outcomes == 1))
    counts = {"detector_fired": fired, "null": config.trials - fired}
    kept = arrays.outcomes == 0
    if not kept.any():
        raise EmptyEnsembleError(f"detector fired on all {config.trials} trials")
    states = arrays.reversed if policy is not ReversalPolicy.NONE else arrays.posterior
    ensemble = _mean_projector(states[kept])
    tags = (tuple(op.tag for op in meas), tuple(op.tag for op in rev))
    return _finish(config, counts, arrays, 1, ensemble, target, tags)


def run_bell_reversal(config: ExperimentConfig, backend: Optional[str] = None) -> ExperimentResult:
    if config.experiment is not Experiment.BELL_REVERSAL:
        raise ContractViolation(f"run_bell_reversal got experiment {config.experiment}")
    psi = bell_state("psi+")
    if config.model is MeasurementModel.PROJECTIVE:
        meas = [bell_projector(0), bell_projector(1)]
        renorm = True
    else:
        meas = [bell_measurement_operator(0), bell_measurement_operator(1)]
        renorm = False
    policy = config.reversal_policy
    if policy is ReversalPolicy.CONDITIONED:
        rev = [bell_measurement_operator(1), bell_measurement_operator(0)]
    elif policy is ReversalPolicy.UNCONDITIONED:
        rev = [bell_measurement_operator(1), bell_measurement_operator(1)]
    else:
        rev = []
    rev_entries = np.array([op.entries for op in rev]) if rev else np.array([np.eye(4)] * 2)
    arrays = kernels.run_trials(
        config.seed, config.trials, psi.amps, np.eye(4), BELL_SUBSPACE,
        np.array([op.entries for op in meas]), renorm,
        rev_entries, policy is not ReversalPolicy.NONE,
        -1, psi.amps, backend=backend,
    )
    n1 = int(np.count_nonzero(arrays.outcomes == 1))
    counts = {"0": config.trials - n1, "1": n1}
    if policy is ReversalPolicy.NONE:
        # unread record: the ensemble is the non-selective channel output
        ensemble = bell_nonselective_channel(DensityMatrix.from_ket(psi), config.model)
    else:
        ensemble = _mean_projector(arrays.reversed)
    tags = (tuple(op.tag for op in meas), tuple(op.tag for op in rev) if rev else (None, None))
    return _finish(config, counts, arrays, -1, ensemble, psi, tags)


def run_experiment(config: ExperimentConfig, backend: Optional[str] = None) -> ExperimentResult:
    if config.experiment is Experiment.SINGLE_QUBIT_NULL:
        return run_single_qubit_null(config, backend)
    return run_bell_reversal(config, backend)


@dataclass(frozen=True)
class ComparisonReport:
    """Two runs compared on outcome counts, purity and target fidelity.

    The verdict is ``"indistinguishable"`` iff the chi-square p-value is at
    least ``p_value_min`` and both absolute differences are below
    ``diff_max``.
    """

    experiment: str
    models: tuple
    chi_square: float
    dof: int
    p_value: float
    purity_diff: float
    fidelity_diff: float
    verdict: str
    p_value_min: float = P_VALUE_MIN
    diff_max: float = DIFF_MAX

    def to_dict(self) -> dict:
        d = asdict(self)
        d["models"] = list(self.models)
        return d


def compare_models(a: ExperimentResult, b: ExperimentResult) -> ComparisonReport:
    if a.config.experiment is not b.config.experiment:
        raise ContractViolation("cannot compare different experiments")
    if a.config.trials != b.config.trials:
        raise ContractViolation("cannot compare runs with different trial counts")
    keys = sorted(set(a.counts) | set(b.counts))
    table = np.array([[a.counts.get(k, 0) for k in keys], [b.counts.get(k, 0) for k in keys]])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        chi2, dof, p = 0.0, 0, 1.0
    else:
        chi2, p, dof, _ = chi2_contingency(table, correction=False)
        chi2, p, dof = float(chi2), float(p), int(dof)
    dp = abs(a.purity_exact - b.purity_exact)
    df = abs(a.fidelity_to_target - b.fidelity_to_target)
    same = p >= P_VALUE_MIN and dp < DIFF_MAX and df < DIFF_MAX
    return ComparisonReport(
        experiment=a.config.experiment.value,
        models=(a.config.model.value, b.config.model.value),
        chi_square=chi2,
        dof=dof,
        p_value=p,
        purity_diff=dp,
        fidelity_diff=df,
        verdict="indistinguishable" if same else "distinguishable",
    )
