"""Projective vs unitary (symmetry-breaking) measurement simulator.

Builds both collapse models for a qubit and for the Bell state Psi+, runs
the single-qubit null-result and Bell-reversal experiments as seeded Monte
Carlo trials, and decides pure vs mixed outcomes by Pauli tomography.
"""

from .errors import (
    ConfigError,
    ContractViolation,
    CountsFormatError,
    DegenerateConditioningError,
    EmptyEnsembleError,
    IncompleteDataError,
)
from .experiments import (
    ComparisonReport,
    Experiment,
    ExperimentConfig,
    ExperimentResult,
    ReversalPolicy,
    TrialRecord,
    compare_models,
    ensemble_density,
    run_bell_reversal,
    run_experiment,
    run_single_qubit_null,
)
from .identities import VerificationReport, verify_identities
from .kernels import BACKEND
from .measurement import (
    MeasurementModel,
    OutcomeRecord,
    QubitAmplitudes,
    bell_measurement_operator,
    bell_state,
    born_probabilities,
    flipper,
    measure,
    measure_bell,
    nonselective_channel,
    projector,
    ssb_inverse,
    ssb_unitary,
    subensemble,
)
from .qcore import (
    DensityMatrix,
    Ket,
    Operator,
    apply_operator,
    assert_unitary,
    fidelity_pure,
    purity,
    ray_fidelity,
    tensor_product,
    trace_distance,
)
from .rng import RandomStream
from .tomography import (
    CountsTable,
    PauliSetting,
    TomographyResult,
    expectations_from_counts,
    linear_inversion,
    project_psd,
    simulate_counts,
    tomography_pipeline,
)

__version__ = "0.1.0"
