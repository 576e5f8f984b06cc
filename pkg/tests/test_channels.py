import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import ket_bra
from qdsa.channels import (
    HEISENBERG,
    SCHRODINGER,
    DensityMatrix,
    LindbladGenerator,
    QuantumChannel,
    apply_heisenberg,
    apply_schrodinger,
    check_structure,
    compose_channels,
    evolve,
    generator_to_channel,
    lindblad_apply,
    propagator,
    stinespring_dilate,
    to_superoperator,
    unvec,
    vec,
)
from qdsa.errors import DimMismatch, NegativeTime, NotHermitian, NotPSD, NotUnital
from qdsa.linalg import hermitian_part, is_psd, opnorm
from qdsa.models import build_fixture, fixture_names
from qdsa.sampling import haar_random_channel, random_density_matrix, random_hermitian


class TestVectorization:
    def test_column_stacking_is_bit_exact(self):
        m = np.array([[1.0, 3.0], [2.0, 4.0]])
        assert list(vec(m)) == [1.0, 2.0, 3.0, 4.0]
        assert_allclose(unvec(vec(m)), m)

    def test_sandwich_identity(self, rng):
        # vec(A B C) = (C^T kron A) vec(B)
        a, b, c = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
                   for _ in range(3))
        assert opnorm((np.kron(c.T, a) @ vec(b) - vec(a @ b @ c)).reshape(3, 3)) <= 1e-13


class TestConstructors:
    def test_channel_rejects_non_unital(self):
        with pytest.raises(NotUnital):
            QuantumChannel([np.diag([1.0, 0.9])])

    def test_channel_rejects_mixed_dims(self):
        with pytest.raises(DimMismatch):
            QuantumChannel([np.eye(2), np.eye(3) / np.sqrt(3)])

    def test_generator_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            LindbladGenerator(np.array([[0.0, 1e-3], [0.0, 0.0]]))

    def test_generator_allows_empty_jumps_and_zero_h(self):
        LindbladGenerator(np.zeros((2, 2)), [])
        LindbladGenerator(np.diag([1.0, -1.0]), [])

    def test_density_matrix_validation(self):
        DensityMatrix(np.diag([0.5, 0.5]))
        with pytest.raises(NotPSD):
            DensityMatrix(np.diag([1.5, -0.5]))
        with pytest.raises(ValueError):
            DensityMatrix(np.diag([0.6, 0.6]))


class TestKrausAction:
    def test_heisenberg_excited_population(self, adk):
        # direct matrix-product oracle on the explicit Kraus pair
        out = apply_heisenberg(adk, ket_bra(2, 1, 1))
        assert_allclose(out, 0.7 * ket_bra(2, 1, 1), atol=1e-12)

    def test_heisenberg_unitality(self, adk, rng):
        assert_allclose(apply_heisenberg(adk, np.eye(2)), np.eye(2), atol=1e-12)
        ch = haar_random_channel(4, 3, rng)
        assert_allclose(apply_heisenberg(ch, np.eye(4)), np.eye(4), atol=1e-12)

    def test_heisenberg_ground_projector(self, adk):
        out = apply_heisenberg(adk, ket_bra(2, 0, 0))
        assert_allclose(out, np.diag([1.0, 0.3]), atol=1e-12)

    def test_schrodinger_decay(self, adk):
        rho = DensityMatrix(ket_bra(2, 1, 1))
        out = apply_schrodinger(adk, rho)
        assert_allclose(out.matrix, np.diag([0.3, 0.7]), atol=1e-12)

    def test_schrodinger_fixes_ground_state(self, adk):
        rho = DensityMatrix(ket_bra(2, 0, 0))
        out = apply_schrodinger(adk, rho)
        assert_allclose(out.matrix, rho.matrix, atol=1e-12)

    def test_identity_channel(self, rng):
        ch = QuantumChannel([np.eye(3)])
        rho = DensityMatrix(random_density_matrix(3, rng))
        assert_allclose(apply_schrodinger(ch, rho).matrix, rho.matrix, atol=1e-14)

    def test_positivity_preserved(self, rng):
        ch = haar_random_channel(3, 2, rng)
        for _ in range(10):
            x = random_density_matrix(3, rng)
            assert is_psd(apply_heisenberg(ch, x))

    def test_duality_pairing(self, rng):
        for model in (haar_random_channel(2, 2, rng), haar_random_channel(4, 3, rng)):
            for _ in range(100):
                rho = random_density_matrix(model.dim, rng)
                a = random_hermitian(model.dim, rng)
                nu = sum(v @ rho @ v.conj().T for v in model.kraus_ops)
                lhs = complex(np.trace(nu @ a))
                rhs = complex(np.trace(rho @ apply_heisenberg(model, a)))
                assert abs(lhs - rhs) <= 1e-10

    def test_evolved_duality_on_fixtures(self, rng):
        for name in fixture_names():
            model = build_fixture(name)
            t = 3 if isinstance(model, QuantumChannel) else 0.7
            forward = propagator(model, t, SCHRODINGER)
            backward = propagator(model, t, HEISENBERG)
            for _ in range(100):
                rho = random_density_matrix(model.dim, rng)
                a = random_hermitian(model.dim, rng)
                lhs = complex(np.trace(forward.apply(rho) @ a))
                rhs = complex(np.trace(rho @ backward.apply(a)))
                assert abs(lhs - rhs) <= 1e-10

    def test_kadison_schwarz(self, rng):
        ch = haar_random_channel(3, 3, rng)
        for _ in range(20):
            a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            gain = apply_heisenberg(ch, a.conj().T @ a) \
                - apply_heisenberg(ch, a).conj().T @ apply_heisenberg(ch, a)
            assert is_psd(hermitian_part(gain))


class TestLindbladAction:
    def test_heisenberg_excited_decay(self, ad):
        out = lindblad_apply(ad, ket_bra(2, 1, 1), HEISENBERG)
        assert_allclose(out, -ket_bra(2, 1, 1), atol=1e-13)

    def test_heisenberg_ground_gain(self, ad):
        out = lindblad_apply(ad, ket_bra(2, 0, 0), HEISENBERG)
        assert_allclose(out, ket_bra(2, 1, 1), atol=1e-13)

    def test_heisenberg_annihilates_identity(self, m3):
        out = lindblad_apply(m3, np.eye(3), HEISENBERG)
        assert opnorm(out) <= 1e-13

    def test_schrodinger_traceless(self, m3, rng):
        for _ in range(5):
            rho = random_density_matrix(3, rng)
            assert abs(np.trace(lindblad_apply(m3, rho, SCHRODINGER))) <= 1e-13


class TestSuperoperator:
    def test_identity_generator_is_zero(self, id2):
        s = to_superoperator(id2, SCHRODINGER)
        assert opnorm(s.matrix) <= 1e-15

    def test_identity_channel_is_identity(self):
        s = to_superoperator(QuantumChannel([np.eye(2)]), HEISENBERG)
        assert_allclose(s.matrix, np.eye(4), atol=1e-15)

    def test_ad_schrodinger_spectrum(self, ad):
        # eigensolve of the vectorized generator; rates 1 on the population
        # and 1/2 on each coherence
        s = to_superoperator(ad, SCHRODINGER)
        w = np.sort(np.linalg.eigvals(s.matrix).real)
        assert_allclose(w, [-1.0, -0.5, -0.5, 0.0], atol=1e-12)

    @pytest.mark.parametrize("picture", [HEISENBERG, SCHRODINGER])
    def test_matrix_matches_direct_action(self, m3, adk, picture, rng):
        for model in (m3, adk):
            s = to_superoperator(model, picture)
            for i in range(model.dim):
                for j in range(model.dim):
                    unit = ket_bra(model.dim, i, j)
                    if isinstance(model, LindbladGenerator):
                        direct = lindblad_apply(model, unit, picture)
                    elif picture == HEISENBERG:
                        direct = apply_heisenberg(model, unit)
                    else:
                        direct = sum(v @ unit @ v.conj().T for v in model.kraus_ops)
                    assert opnorm(s.apply(unit) - direct) <= 1e-12

    def test_pictures_are_adjoint(self, m3, adk):
        for model in (m3, adk):
            h = to_superoperator(model, HEISENBERG).matrix
            s = to_superoperator(model, SCHRODINGER).matrix
            assert opnorm(h - s.conj().T) <= 1e-13

    def test_composition_matches_kraus_products(self, rng):
        ch = haar_random_channel(3, 2, rng)
        squared = to_superoperator(ch, SCHRODINGER).matrix @ to_superoperator(ch, SCHRODINGER).matrix
        composed = to_superoperator(compose_channels(ch, ch), SCHRODINGER).matrix
        assert opnorm(squared - composed) <= 1e-10


class TestEvolve:
    def test_half_life(self, ad):
        s = evolve(ad, np.log(2.0), HEISENBERG)
        assert_allclose(s.apply(ket_bra(2, 1, 1)), 0.5 * ket_bra(2, 1, 1), atol=1e-12)

    def test_time_zero(self, m3):
        s = evolve(m3, 0.0, SCHRODINGER)
        assert_allclose(s.matrix, np.eye(9), atol=1e-15)

    def test_m3_transient_closed_form(self, m3):
        # alpha_t(|2><2|) = exp(-2t) |2><2|, cross-checked against the
        # generic matrix exponential of the vectorized generator
        from qdsa.linalg import matrix_exp

        t = 1.0
        s = evolve(m3, t, HEISENBERG)
        assert_allclose(s.apply(ket_bra(3, 2, 2)), np.exp(-2 * t) * ket_bra(3, 2, 2),
                        atol=1e-12)
        assert opnorm(s.matrix - matrix_exp(t * to_superoperator(m3, HEISENBERG).matrix)) <= 1e-12

    def test_negative_time_rejected(self, ad):
        with pytest.raises(NegativeTime):
            evolve(ad, -0.1)

    def test_semigroup_law(self, m3, rng):
        for _ in range(5):
            s, t = rng.uniform(0, 1, size=2)
            left = evolve(m3, s + t, HEISENBERG).matrix
            right = evolve(m3, s, HEISENBERG).matrix @ evolve(m3, t, HEISENBERG).matrix
            assert opnorm(left - right) <= 1e-9

    def test_heisenberg_evolution_preserves_identity(self, m3, th):
        for gen in (m3, th):
            for t in (0.3, 2.0, 15.0):
                out = evolve(gen, t, HEISENBERG).apply(np.eye(gen.dim))
                assert opnorm(out - np.eye(gen.dim)) <= 1e-10

    def test_first_order_consistency(self, m3):
        t = 1e-4
        s_t = evolve(m3, t, SCHRODINGER).matrix
        s_gen = to_superoperator(m3, SCHRODINGER).matrix
        assert opnorm((s_t - np.eye(9)) / t - s_gen) <= 1e-3

    def test_states_stay_states(self, rng):
        for name in fixture_names():
            model = build_fixture(name)
            discrete = isinstance(model, QuantumChannel)
            times = (1, 2, 10) if discrete else (0.1, 1.0, 10.0)
            rho = random_density_matrix(model.dim, rng)
            for t in times:
                out = propagator(model, t, SCHRODINGER).apply(rho)
                DensityMatrix(hermitian_part(out))  # validates psd + trace

    def test_channel_propagator_needs_integer_times(self, adk):
        propagator(adk, 3.0, HEISENBERG)
        with pytest.raises(ValueError):
            propagator(adk, 2.5, HEISENBERG)
        with pytest.raises(NegativeTime):
            propagator(adk, -1.0, HEISENBERG)


class TestStinespring:
    def test_identity_channel(self):
        dil = stinespring_dilate(QuantumChannel([np.eye(2)]))
        assert dil.multiplicity == 1
        assert_allclose(dil.isometry, np.eye(2), atol=1e-15)

    def test_adk_reconstruction(self, adk):
        dil = stinespring_dilate(adk)
        assert dil.multiplicity == 2
        assert dil.isometry.shape == (4, 2)
        for i in range(2):
            for j in range(2):
                unit = ket_bra(2, i, j)
                assert opnorm(dil.reconstruct(unit) - apply_heisenberg(adk, unit)) <= 1e-12

    def test_bit_flip_mixture(self):
        sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        ch = QuantumChannel([np.eye(2) / np.sqrt(2), sx / np.sqrt(2)])
        dil = stinespring_dilate(ch)
        assert dil.multiplicity == 2
        for i in range(2):
            for j in range(2):
                unit = ket_bra(2, i, j)
                assert opnorm(dil.reconstruct(unit) - apply_heisenberg(ch, unit)) <= 1e-12

    def test_isometry_property(self, rng):
        ch = haar_random_channel(3, 3, rng)
        dil = stinespring_dilate(ch)
        assert opnorm(dil.isometry.conj().T @ dil.isometry - np.eye(3)) <= 1e-12


class TestGeneratorToChannel:
    def test_matches_propagator(self, m3, rng):
        t = 0.7
        ch = generator_to_channel(m3, t)
        s = propagator(m3, t, HEISENBERG)
        for i in range(3):
            for j in range(3):
                unit = ket_bra(3, i, j)
                assert opnorm(apply_heisenberg(ch, unit) - s.apply(unit)) <= 1e-10

    def test_identity_at_time_zero(self, ad):
        ch = generator_to_channel(ad, 0.0)
        assert_allclose(apply_heisenberg(ch, ket_bra(2, 0, 1)), ket_bra(2, 0, 1),
                        atol=1e-12)


class TestCheckStructure:
    def test_adk_clean(self, adk):
        report = check_structure(adk)
        assert report.ok()
        assert max(report.unitality_residual, report.trace_residual,
                   report.duality_residual) <= 1e-12

    def test_trivial_kraus(self):
        report = check_structure(QuantumChannel([np.eye(2)]))
        assert report.unitality_residual == 0.0
        assert report.trace_residual == 0.0

    def test_flags_non_unital_family(self):
        # sum V^dag V = diag(1, 0.81), off by 0.19 in operator norm
        report = check_structure([np.diag([1.0, 0.9])])
        assert report.kind == "kraus"
        assert abs(report.unitality_residual - 0.19) <= 1e-12
        assert not report.ok()

    def test_generator_report(self, m3):
        report = check_structure(m3)
        assert report.kind == "generator"
        assert report.ok()
