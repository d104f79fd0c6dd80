import cmath
import math

import numpy as np
import pytest

from conftest import matmul_loops, random_density
from ssbsim.errors import ContractViolation, DegenerateConditioningError
from ssbsim.measurement import (
    MeasurementModel,
    QubitAmplitudes,
    bell_measurement_operator,
    bell_nonselective_channel,
    bell_projector,
    bell_state,
    born_probabilities,
    flipper,
    measure,
    measure_bell,
    nonselective_channel,
    projector,
    sample_outcome,
    ssb_inverse,
    ssb_unitary,
    subensemble,
)
from ssbsim.qcore import (
    I2,
    SIGMA_Y,
    DensityMatrix,
    Ket,
    apply_operator,
    assert_unitary,
    purity,
    ray_fidelity,
)
from ssbsim.rng import RandomStream

S = 1 / math.sqrt(2)
BAL = QubitAmplitudes(S, S)


class TestQubitAmplitudes:
    def test_normalization_enforced(self):
        with pytest.raises(ContractViolation):
            QubitAmplitudes(0.6, 0.6)

    def test_phi_of_zero_beta(self):
        assert QubitAmplitudes(1, 0).phi == 0.0

    def test_random_is_normalized_and_in_symmetric_gauge(self, rng):
        for _ in range(200):
            a = QubitAmplitudes.random(rng)
            assert abs(abs(a.alpha) ** 2 + abs(a.beta) ** 2 - 1) <= 1e-12
            assert abs(cmath.phase(a.alpha) + cmath.phase(a.beta)) <= 1e-12

    def test_symmetric_gauge_keeps_ray(self):
        a = QubitAmplitudes(0.6 * cmath.exp(0.4j), 0.8 * cmath.exp(2.1j))
        g = a.symmetric_gauge()
        assert ray_fidelity(a.ket, g.ket) == pytest.approx(1.0, abs=1e-15)
        assert cmath.phase(g.alpha) == pytest.approx(-cmath.phase(g.beta), abs=1e-15)


class TestProjector:
    def test_matrices(self):
        assert np.array_equal(projector(0).entries, [[1, 0], [0, 0]])
        assert np.array_equal(projector(1).entries, [[0, 0], [0, 1]])

    def test_algebra(self):
        p0, p1 = projector(0).entries, projector(1).entries
        assert np.array_equal(p0 + p1, np.eye(2))
        assert not np.any(p0 @ p1) and not np.any(p1 @ p0)

    @pytest.mark.parametrize("m", [-1, 2, True])
    def test_out_of_range(self, m):
        with pytest.raises(ContractViolation):
            projector(m)


class TestSsbUnitary:
    def test_balanced_m0_is_identity_plus_i_sigma_y(self):
        m0 = ssb_unitary(BAL, 0).entries
        assert np.max(np.abs(m0 - S * np.array([[1, 1], [-1, 1]]))) <= 1e-15
        assert np.max(np.abs(m0 - S * (I2 + 1j * SIGMA_Y))) <= 1e-15

    def test_balanced_m1_is_identity_minus_i_sigma_y(self):
        m1 = ssb_unitary(BAL, 1).entries
        assert np.max(np.abs(m1 - S * np.array([[1, -1], [1, 1]]))) <= 1e-15
        assert np.max(np.abs(m1 - S * (I2 - 1j * SIGMA_Y))) <= 1e-15

    def test_real_amplitudes_06_08(self):
        m0 = ssb_unitary(QubitAmplitudes(0.6, 0.8), 0).entries
        assert np.array_equal(m0, [[0.6, 0.8], [-0.8, 0.6]])
        # direct multiply: (0.6*0.6 + 0.8*0.8, -0.8*0.6 + 0.6*0.8)
        out = matmul_loops(m0, [[0.6], [0.8]])[:, 0]
        np.testing.assert_allclose(out, [1, 0], atol=1e-15)

    def test_rotates_onto_basis(self, rng):
        for _ in range(500):
            a = QubitAmplitudes.random(rng)
            for m in (0, 1):
                out = apply_operator(ssb_unitary(a, m), a.ket).amps
                assert np.max(np.abs(out - np.eye(2)[m])) <= 1e-12

    def test_not_projectors(self, rng):
        for _ in range(1000):
            a = QubitAmplitudes.random(rng)
            m0, m1 = ssb_unitary(a, 0).entries, ssb_unitary(a, 1).entries
            assert np.max(np.abs(m0 @ m1)) > 1e-6
            assert np.max(np.abs(m1 @ m0)) > 1e-6
            assert np.max(np.abs(m0 + m1 - np.eye(2))) > 1e-6


class TestSsbInverse:
    def test_displayed_m0_inverse(self):
        a, b = 0.6 * cmath.exp(-0.3j), 0.8 * cmath.exp(0.3j)
        inv = ssb_inverse(QubitAmplitudes(a, b), 0).entries
        assert np.array_equal(inv, [[a, -b.conjugate()], [b, a.conjugate()]])

    def test_balanced_inverse_swaps(self):
        assert np.array_equal(ssb_inverse(BAL, 0).entries, ssb_unitary(BAL, 1).entries)
        assert np.array_equal(ssb_inverse(BAL, 1).entries, ssb_unitary(BAL, 0).entries)

    def test_composition_is_identity(self, rng):
        for _ in range(500):
            a = QubitAmplitudes.random(rng)
            for m in (0, 1):
                u, inv = ssb_unitary(a, m).entries, ssb_inverse(a, m).entries
                assert np.max(np.abs(inv @ u - np.eye(2))) <= 1e-12
                assert np.array_equal(inv, u.conj().T)


class TestFlipper:
    def test_real_beta_is_plain_flip(self):
        assert np.array_equal(flipper(QubitAmplitudes(0.6, 0.8)).entries, [[0, 1], [1, 0]])

    def test_zero_beta_is_plain_flip(self):
        assert np.array_equal(flipper(QubitAmplitudes(1, 0)).entries, [[0, 1], [1, 0]])

    def test_theta_is_minus_two_phi(self):
        phi = 0.9
        u = flipper(QubitAmplitudes(0.6, 0.8 * cmath.exp(1j * phi))).entries
        assert u[0, 1] == pytest.approx(cmath.exp(-2j * phi), abs=1e-15)
        assert u[1, 0] == 1 and u[0, 0] == 0 and u[1, 1] == 0

    def test_06_08i_m0_by_loop_multiplication(self):
        a = QubitAmplitudes(0.6, 0.8j)
        u = flipper(a).entries
        conj = matmul_loops(matmul_loops(u, ssb_unitary(a, 0).entries), u.conj().T)
        assert np.max(np.abs(conj - ssb_inverse(a, 0).entries)) <= 1e-12

    def test_identity_over_random_amplitudes(self, rng):
        for _ in range(1000):
            a = QubitAmplitudes.random(rng)
            u = flipper(a).entries
            for m in (0, 1):
                lhs = u @ ssb_unitary(a, m).entries @ u.conj().T
                assert np.max(np.abs(lhs - ssb_inverse(a, m).entries)) <= 1e-12

    def test_m1_identity_needs_symmetric_gauge(self):
        # same ray, real alpha: M0 identity survives, M1 identity does not
        a = QubitAmplitudes(0.6, 0.8j)
        u = flipper(a).entries
        lhs = u @ ssb_unitary(a, 1).entries @ u.conj().T
        assert np.max(np.abs(lhs - ssb_inverse(a, 1).entries)) > 0.1
        g = a.symmetric_gauge()
        ug = flipper(g).entries
        lhs = ug @ ssb_unitary(g, 1).entries @ ug.conj().T
        assert np.max(np.abs(lhs - ssb_inverse(g, 1).entries)) <= 1e-12


class TestBornProbabilities:
    def test_balanced(self):
        assert born_probabilities(Ket([S, S]), 2) == pytest.approx([0.5, 0.5], abs=1e-15)

    def test_basis(self):
        assert born_probabilities(Ket([1, 0]), 2) == [1.0, 0.0]

    def test_06_08(self):
        assert born_probabilities(Ket([0.6, 0.8]), 2) == pytest.approx([0.36, 0.64], abs=1e-15)

    def test_sum_to_one(self, rng):
        for _ in range(200):
            p = born_probabilities(QubitAmplitudes.random(rng).ket)
            assert abs(sum(p) - 1) <= 1e-12

    def test_zero_branch_never_sampled(self):
        assert sample_outcome([1.0, 0.0], 0.999999999) == 0
        assert sample_outcome([0.0, 1.0], 0.0) == 1


class _Fixed:
    def __init__(self, u):
        self.u = u

    def random(self):
        return self.u


class TestMeasure:
    def test_projective_renormalizes(self):
        rec = measure(Ket([0.6, 0.8]), None, "projective", _Fixed(0.1))
        assert rec.outcome == 0 and rec.applied_op == "PI_0"
        assert np.array_equal(rec.posterior.amps, [1, 0])

    def test_ssb_needs_no_renormalization(self):
        a = QubitAmplitudes(0.6, 0.8)
        rec = measure(a.ket, a, MeasurementModel.UNITARY_SSB, _Fixed(0.1))
        assert rec.outcome == 0 and rec.applied_op == "M_0"
        # 0.6*0.6 + 0.8*0.8 and -0.8*0.6 + 0.6*0.8, no division
        np.testing.assert_allclose(rec.posterior.amps, [1, 0], atol=1e-15)
        assert rec.posterior.is_normalized()

    def test_outcome_one(self):
        a = QubitAmplitudes(0.6, 0.8)
        rec = measure(a.ket, a, "unitary-ssb", _Fixed(0.5))
        assert rec.outcome == 1 and rec.applied_op == "M_1"
        np.testing.assert_allclose(rec.posterior.amps, [0, 1], atol=1e-15)

    @pytest.mark.parametrize("model", ["projective", "unitary-ssb"])
    def test_eigenstate(self, model):
        a = QubitAmplitudes(1, 0)
        stream = RandomStream(3)
        for _ in range(100):
            rec = measure(a.ket, a, model, stream)
            assert rec.outcome == 0
            assert ray_fidelity(rec.posterior, Ket([1, 0])) == pytest.approx(1.0, abs=1e-15)

    def test_mismatched_amplitudes_rejected(self):
        with pytest.raises(ContractViolation):
            measure(Ket([0.6, 0.8]), QubitAmplitudes(0.8, 0.6), "unitary-ssb", _Fixed(0.1))

    def test_global_phase_is_accepted(self):
        a = QubitAmplitudes(0.6, 0.8)
        rec = measure(Ket(1j * a.ket.amps), a, "unitary-ssb", _Fixed(0.1))
        assert ray_fidelity(rec.posterior, Ket([1, 0])) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("model", ["projective", "unitary-ssb"])
    def test_frequencies_converge_to_born(self, model):
        a = QubitAmplitudes(0.6, 0.8 * cmath.exp(0.7j))
        n = 100_000
        ones = sum(measure(a.ket, a, model, RandomStream(11, t)).outcome for t in range(n))
        p = 0.64
        assert abs(ones / n - p) <= 4 * math.sqrt(p * (1 - p) / n)


class TestNonselectiveChannel:
    def test_projective_dephases(self):
        a = QubitAmplitudes(0.6, 0.8j)
        out = nonselective_channel(DensityMatrix.from_ket(a.ket), a, "projective").entries
        np.testing.assert_allclose(out, np.diag([0.36, 0.64]), atol=1e-15)

    def test_ssb_balanced(self):
        # (1/2) M0 rho M0^dag + (1/2) M1 rho M1^dag = (1/2)|0><0| + (1/2)|1><1|
        out = nonselective_channel(DensityMatrix.from_ket(BAL.ket), BAL, "unitary-ssb").entries
        np.testing.assert_allclose(out, np.diag([0.5, 0.5]), atol=1e-15)

    def test_eigenstate_unchanged(self):
        a = QubitAmplitudes(1, 0)
        rho = DensityMatrix(np.diag([1.0, 0.0]))
        for model in ("projective", "unitary-ssb"):
            assert np.array_equal(nonselective_channel(rho, a, model).entries, rho.entries)

    def test_models_agree_on_prepared_state(self, rng):
        for _ in range(1000):
            a = QubitAmplitudes.random(rng)
            rho = DensityMatrix.from_ket(a.ket)
            p = nonselective_channel(rho, a, "projective").entries
            s = nonselective_channel(rho, a, "unitary-ssb").entries
            assert np.max(np.abs(p - s)) <= 1e-12
            assert np.max(np.abs(p - np.diag(a.probabilities))) <= 1e-12

    def test_pure_state_preserved_by_each_branch(self, rng):
        for _ in range(300):
            a = QubitAmplitudes.random(rng)
            rho = DensityMatrix.from_ket(a.ket).entries
            for m in (0, 1):
                u = ssb_unitary(a, m).entries
                assert abs(purity(DensityMatrix(u @ rho @ u.conj().T)) - 1) <= 1e-12

    def test_projective_output_is_mixed(self):
        out = nonselective_channel(DensityMatrix.from_ket(BAL.ket), BAL, "projective").entries
        assert np.max(np.abs(out @ out - out)) > 0.1


class TestSubensemble:
    def test_keeps_each_branch(self):
        mixed = DensityMatrix(np.diag([0.36, 0.64]))
        np.testing.assert_allclose(subensemble(mixed, 0).entries, np.diag([1.0, 0.0]), atol=1e-15)
        np.testing.assert_allclose(subensemble(mixed, 1).entries, np.diag([0.0, 1.0]), atol=1e-15)

    def test_trace_one(self, rng):
        for _ in range(50):
            p = rng.uniform(0.01, 0.99)
            for m in (0, 1):
                out = subensemble(DensityMatrix(np.diag([p, 1 - p])), m)
                assert abs(np.trace(out.entries) - 1) <= 1e-12

    def test_zero_branch(self):
        with pytest.raises(DegenerateConditioningError):
            subensemble(DensityMatrix(np.diag([1.0, 0.0])), 1)

    def test_coherent_input_rejected(self):
        with pytest.raises(ContractViolation):
            subensemble(DensityMatrix(np.full((2, 2), 0.5)), 0)


class TestBellStates:
    def test_psi_plus(self):
        np.testing.assert_array_equal(bell_state("psi+").amps, [0, S, S, 0])
        np.testing.assert_array_equal(bell_state("Ψ⁺").amps, [0, S, S, 0])

    def test_psi_minus_and_phi_plus(self):
        np.testing.assert_array_equal(bell_state("psi-").amps, [0, S, -S, 0])
        np.testing.assert_array_equal(bell_state("phi+").amps, [S, 0, 0, S])

    def test_orthonormal_gram(self):
        vecs = np.array([bell_state(k).amps for k in ("psi+", "psi-", "phi+", "phi-")])
        gram = matmul_loops(vecs.conj(), vecs.T)
        assert np.max(np.abs(gram - np.eye(4))) <= 1e-15

    def test_unknown(self):
        with pytest.raises(ContractViolation):
            bell_state("chi+")


class TestBellOperators:
    psi = bell_state("psi+")

    def test_m0_maps_to_01(self):
        out = apply_operator(bell_measurement_operator(0), self.psi).amps
        np.testing.assert_allclose(out, [0, 1, 0, 0], atol=1e-15)

    def test_m1_maps_to_10(self):
        out = apply_operator(bell_measurement_operator(1), self.psi).amps
        np.testing.assert_allclose(out, [0, 0, 1, 0], atol=1e-15)

    @pytest.mark.parametrize("first,second", [(0, 1), (1, 0)])
    def test_reversal(self, first, second):
        out = apply_operator(bell_measurement_operator(second),
                             apply_operator(bell_measurement_operator(first), self.psi))
        assert ray_fidelity(out, self.psi) == pytest.approx(1.0, abs=1e-15)

    def test_block_and_embedding(self):
        b0 = bell_measurement_operator(0).entries
        np.testing.assert_allclose(b0[1:3, 1:3], S * np.array([[1, 1], [-1, 1]]), atol=0)
        assert b0[0, 0] == 1 and b0[3, 3] == 1

    def test_unitary_and_commutes_with_outer_projector(self):
        outer = np.diag([1.0, 0, 0, 1.0])
        for m in (0, 1):
            b = bell_measurement_operator(m)
            assert assert_unitary(b, 1e-12)
            assert np.max(np.abs(b.entries @ outer - outer @ b.entries)) == 0

    def test_inverses(self):
        b0, b1 = bell_measurement_operator(0).entries, bell_measurement_operator(1).entries
        assert np.max(np.abs(b1 @ b0 - np.eye(4))) <= 1e-15

    def test_projective_bell_measurement(self):
        rec = measure_bell(self.psi, "projective", _Fixed(0.7))
        assert rec.outcome == 1 and rec.applied_op == "PI_AB_1"
        np.testing.assert_allclose(rec.posterior.amps, [0, 0, 1, 0], atol=1e-15)

    def test_ssb_bell_needs_psi_plus(self):
        with pytest.raises(ContractViolation):
            measure_bell(bell_state("psi-"), "unitary-ssb", _Fixed(0.1))

    def test_nonselective_bell_channel(self):
        rho = DensityMatrix.from_ket(self.psi)
        for model in ("projective", "unitary-ssb"):
            out = bell_nonselective_channel(rho, model).entries
            np.testing.assert_allclose(out, np.diag([0, 0.5, 0.5, 0]), atol=1e-15)
        assert bell_projector(0).entries[1, 1] == 1
