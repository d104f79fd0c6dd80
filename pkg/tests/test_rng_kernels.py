import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from ssbsim import kernels
from ssbsim.experiments import ExperimentConfig, run_experiment
from ssbsim.measurement import (
    QubitAmplitudes,
    bell_measurement_operator,
    bell_state,
    measure,
    measure_bell,
    projector,
    sample_outcome,
    ssb_inverse,
    ssb_unitary,
)
from ssbsim.qcore import Ket, apply_operator
from ssbsim.rng import MASK64, RandomStream, check_seed, mix64, stream_key, uniform_at

AMPS = QubitAmplitudes.balanced()


def _single_qubit_args(model, reverse=True):
    prep = ssb_unitary(AMPS, 1).entries
    if model == "projective":
        meas = np.array([projector(0).entries, projector(1).entries])
    else:
        meas = np.array([ssb_unitary(AMPS, m).entries for m in (0, 1)])
    rev = np.array([ssb_inverse(AMPS, m).entries for m in (0, 1)])
    return dict(start=[1, 0], prep=prep, outcome_index=(0, 1), meas_ops=meas,
                renormalize=model == "projective", rev_ops=rev, reverse=reverse,
                discard=1, target=AMPS.ket.amps)


def _bell_args(model):
    if model == "projective":
        meas = np.zeros((2, 4, 4))
        meas[0, 1, 1] = meas[1, 2, 2] = 1
    else:
        meas = np.array([bell_measurement_operator(m).entries for m in (0, 1)])
    rev = np.array([bell_measurement_operator(1).entries, bell_measurement_operator(0).entries])
    psi = bell_state("psi+").amps
    return dict(start=psi, prep=np.eye(4), outcome_index=(1, 2), meas_ops=meas,
                renormalize=model == "projective", rev_ops=rev, reverse=True,
                discard=-1, target=psi)


class TestRandomStream:
    def test_mix64_reference_values(self):
        # SplitMix64 outputs for state 0 are the finalizer of k * golden
        assert mix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF
        assert mix64(0) == 0

    def test_draws_are_counter_addressed(self):
        s = RandomStream(42, 7)
        key = stream_key(42, 7)
        assert [s.random() for _ in range(5)] == [uniform_at(key, k) for k in range(5)]
        assert s.draws == 5

    def test_streams_differ(self):
        assert RandomStream(42, 0).random() != RandomStream(42, 1).random()
        assert RandomStream(42, 0).random() != RandomStream(43, 0).random()

    @given(st.integers(0, MASK64), st.integers(0, 10**9))
    def test_unit_interval(self, seed, stream):
        u = RandomStream(seed, stream).random()
        assert 0.0 <= u < 1.0

    def test_uniformity(self):
        u = np.array([RandomStream(2024, t).random() for t in range(20_000)])
        assert stats.kstest(u, "uniform").pvalue > 1e-3

    @pytest.mark.parametrize("bad", [-1, 2**64, 1.5, True, "3"])
    def test_seed_validation(self, bad):
        with pytest.raises((TypeError, ValueError)):
            check_seed(bad)


class TestBackendParity:
    @pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="extension not built")
    @pytest.mark.parametrize("make", [
        lambda: _single_qubit_args("projective"),
        lambda: _single_qubit_args("unitary-ssb"),
        lambda: _single_qubit_args("unitary-ssb", reverse=False),
        lambda: _bell_args("projective"),
        lambda: _bell_args("unitary-ssb"),
    ])
    def test_bit_identical(self, make):
        args = make()
        a = kernels.run_trials(99, 5000, backend="python", **args)
        b = kernels.run_trials(99, 5000, backend="cython", **args)
        assert a.outcomes.tobytes() == b.outcomes.tobytes()
        assert a.posterior.tobytes() == b.posterior.tobytes()
        assert a.reversed.tobytes() == b.reversed.tobytes()
        assert a.fidelity.tobytes() == b.fidelity.tobytes()

    def test_default_backend_is_registered(self):
        assert kernels.BACKEND in kernels.BACKENDS

    def test_dimension_guard(self):
        with pytest.raises(ValueError):
            kernels.run_trials(1, 1, np.ones(8) / np.sqrt(8), np.eye(8), (0, 1),
                               np.zeros((2, 8, 8)), False, np.zeros((2, 8, 8)), False, -1,
                               np.ones(8) / np.sqrt(8))


class TestKernelAgainstReferencePath:
    """Trial t of the kernel equals measure() driven by stream (seed, t)."""

    @pytest.mark.parametrize("model", ["projective", "unitary-ssb"])
    def test_single_qubit(self, model):
        arr = kernels.run_trials(5, 400, backend="python", **_single_qubit_args(model))
        prepared = apply_operator(ssb_unitary(AMPS, 1), Ket([1, 0]))
        for t in range(400):
            rec = measure(prepared, AMPS, model, RandomStream(5, t))
            assert rec.outcome == arr.outcomes[t]
            assert np.max(np.abs(rec.posterior.amps - arr.posterior[t])) <= 1e-15
            if rec.outcome == 1:
                assert np.isnan(arr.fidelity[t]) and not np.any(arr.reversed[t])
            else:
                back = apply_operator(ssb_inverse(AMPS, 0), rec.posterior).amps
                assert np.max(np.abs(back - arr.reversed[t])) <= 1e-15

    @pytest.mark.parametrize("model", ["projective", "unitary-ssb"])
    def test_bell(self, model):
        arr = kernels.run_trials(6, 400, backend="python", **_bell_args(model))
        psi = bell_state("psi+")
        for t in range(400):
            rec = measure_bell(psi, model, RandomStream(6, t))
            assert rec.outcome == arr.outcomes[t]
            assert np.max(np.abs(rec.posterior.amps - arr.posterior[t])) <= 1e-15
            back = apply_operator(bell_measurement_operator(1 - rec.outcome), rec.posterior)
            assert np.max(np.abs(back.amps - arr.reversed[t])) <= 1e-15

    def test_run_is_scheduling_independent(self):
        # trials 0..n-1 of a longer run equal a shorter run of n trials
        cfg = dict(experiment="bell-reversal", model="unitary-ssb", seed=3)
        short = run_experiment(ExperimentConfig(trials=100, **cfg))
        long = run_experiment(ExperimentConfig(trials=1000, **cfg))
        assert short.trials.outcomes.tobytes() == long.trials.outcomes[:100].tobytes()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, MASK64))
def test_kernel_outcome_matches_inverse_cdf(seed):
    arr = kernels.run_trials(seed, 20, backend="python", **_bell_args("unitary-ssb"))
    psi = bell_state("psi+").amps
    probs = [abs(psi[1]) ** 2, abs(psi[2]) ** 2]
    expect = [sample_outcome(probs, RandomStream(seed, t).random()) for t in range(20)]
    assert arr.outcomes.tolist() == expect


@pytest.mark.parametrize("experiment", ["single-qubit-null", "bell-reversal"])
def test_fallback_backend_reproduces_results(experiment):
    from ssbsim.cli import canonical_json
    from ssbsim.experiments import run_experiment as run

    cfg = ExperimentConfig(experiment=experiment, model="unitary-ssb", trials=3000, seed=12,
                           tomography_shots=200)
    docs = {canonical_json(run(cfg, backend=b).to_dict()) for b in kernels.BACKENDS}
    assert len(docs) == 1


def test_import_falls_back_without_extension():
    import subprocess
    import sys

    code = ("import sys; sys.modules['ssbsim._kernels'] = None\n"
            "from ssbsim import kernels; print(kernels.BACKEND, sorted(kernels.BACKENDS))")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "['python']"]
