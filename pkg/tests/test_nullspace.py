"""Tests for null-space synthesis."""

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from src.errors import NotSelfAdjoint, NotTraceZero
from src.linalg.tensor import hermitian_basis, matrix_unit
from src.models.schema import SubspaceSpec
from src.synthesis.nullspace import NullspaceSynthesizer
from tests.factories import PAULI_X, PAULI_Y, PAULI_Z, traceless_subspace


def _all_traceless(dim: int) -> SubspaceSpec:
    generators = list(hermitian_basis(dim)[dim:])
    for i in range(dim - 1):
        generators.append(matrix_unit(dim, i, i) - matrix_unit(dim, i + 1, i + 1))
    return SubspaceSpec(dim=dim, generators=generators)


class TestOrthocomplement:
    """Test suite for subspace checks and the complement basis."""

    @pytest.fixture
    def synthesizer(self):
        """Fixture to provide NullspaceSynthesizer instance."""
        return NullspaceSynthesizer()

    def test_sigma_z_span(self, synthesizer):
        """Complement of span{Z} is spanned by I, X, Y."""
        basis = synthesizer.orthocomplement(SubspaceSpec(dim=2, generators=[PAULI_Z]))

        assert len(basis) == 3
        np.testing.assert_allclose(basis[0], np.eye(2))
        for g in basis[1:]:
            assert abs(np.trace(g @ PAULI_Z)) <= 1e-12
            assert abs(np.trace(g)) <= 1e-12
            assert np.linalg.norm(g, 2) == pytest.approx(1.0)
        assert abs(np.trace(basis[1] @ basis[2])) <= 1e-12

    def test_trivial_subspace(self, synthesizer):
        """Complement of {0} is the whole space."""
        assert len(synthesizer.orthocomplement(SubspaceSpec(dim=2))) == 4

    def test_all_traceless(self, synthesizer):
        """Complement of the traceless hyperplane is span{I}."""
        basis = synthesizer.orthocomplement(_all_traceless(3))

        assert len(basis) == 1
        np.testing.assert_allclose(basis[0], np.eye(3))

    def test_rejects_trace(self, synthesizer):
        """Generators must be trace-zero."""
        with pytest.raises(NotTraceZero) as exc:
            synthesizer.orthocomplement(SubspaceSpec(dim=2, generators=[PAULI_Z, np.diag([1.0, 0])]))
        assert exc.value.details['index'] == 1

    def test_rejects_non_self_adjoint(self, synthesizer):
        """span{e1 e2*} does not contain e2 e1*."""
        with pytest.raises(NotSelfAdjoint):
            synthesizer.check_subspace(SubspaceSpec(dim=2, generators=[matrix_unit(2, 0, 1)]))

    def test_subspace_dimension(self, synthesizer):
        """Complex span of X + iY and X - iY is two-dimensional."""
        spec = SubspaceSpec(dim=2, generators=[PAULI_X + 1j * PAULI_Y, PAULI_X - 1j * PAULI_Y, PAULI_X])

        assert synthesizer.subspace_dimension(spec) == 2
        assert synthesizer.subspace_dimension(SubspaceSpec(dim=2)) == 0


class TestBuildEffects:
    """Test suite for NullspaceSynthesizer.build_effects."""

    @pytest.fixture
    def synthesizer(self):
        """Fixture to provide NullspaceSynthesizer instance."""
        return NullspaceSynthesizer()

    def test_pauli_basis(self, synthesizer):
        """Closed-form effects of {I, X, Y}."""
        effects = synthesizer.build_effects([np.eye(2), PAULI_X, PAULI_Y])

        np.testing.assert_allclose(effects[1], (np.eye(2) + PAULI_X / 2) / 4)
        np.testing.assert_allclose(effects[2], (np.eye(2) + PAULI_Y / 2) / 8)
        np.testing.assert_allclose(effects[0], 5 / 8 * np.eye(2) - PAULI_X / 8 - PAULI_Y / 16)
        lam = np.linalg.eigvalsh(effects[0])[0]
        assert lam == pytest.approx(5 / 8 - np.sqrt(5) / 16)

    def test_identity_only(self, synthesizer):
        """m = 1 gives the trace-channel effect."""
        effects = synthesizer.build_effects([np.eye(3)])

        assert len(effects) == 1
        np.testing.assert_allclose(effects[0], np.eye(3))

    def test_random_complement_is_povm(self, synthesizer):
        """d = 4 with m = 7: effects are PSD and sum to I."""
        basis = synthesizer.orthocomplement(traceless_subspace(6, 4, 9))
        effects = synthesizer.build_effects(basis)

        assert len(effects) == 7
        np.testing.assert_allclose(sum(effects), np.eye(4), atol=1e-13)
        for f in effects:
            assert np.linalg.eigvalsh(f)[0] >= 0


class TestSynthesizeChannel:
    """Test suite for synthesize_channel and verify_nullspace."""

    @pytest.fixture
    def synthesizer(self):
        """Fixture to provide NullspaceSynthesizer instance."""
        return NullspaceSynthesizer()

    @pytest.fixture
    def sigma_z(self):
        """Fixture to provide span{Z}."""
        return SubspaceSpec(dim=2, generators=[PAULI_Z])

    def test_sigma_z_channel(self, synthesizer, sigma_z):
        """2 -> 3 channel annihilating Z but not X or e1e1*."""
        out = synthesizer.synthesize_channel(sigma_z)
        evaluator = synthesizer.evaluator

        assert (out.channel.dim_in, out.channel.dim_out) == (2, 3)
        assert np.linalg.norm(evaluator.apply(out.channel, PAULI_Z)) <= 1e-12
        assert np.linalg.norm(evaluator.apply(out.channel, PAULI_X)) > 1e-3
        assert np.linalg.norm(evaluator.apply(out.channel, matrix_unit(2, 0, 0))) > 1e-3
        assert out.lambda_min_f1 >= 0.25
        assert evaluator.verify_cptp(out.channel).ok is True

    def test_verify_sigma_z(self, synthesizer, sigma_z):
        """Full rank on the complement."""
        report = synthesizer.verify_nullspace(synthesizer.synthesize_channel(sigma_z), sigma_z)

        assert report.ok is True
        assert report.rank_of_effect_map == 3
        assert report.expected_rank == 3

    def test_verify_wrong_subspace(self, synthesizer, sigma_z):
        """The channel built for span{Z} does not annihilate X."""
        out = synthesizer.synthesize_channel(sigma_z)
        report = synthesizer.verify_nullspace(out, SubspaceSpec(dim=2, generators=[PAULI_X]))

        assert report.ok is False
        assert report.generator_residuals[0] > 1e-3

    def test_trivial_null_space(self, synthesizer):
        """N = {0} gives an injective map."""
        spec = SubspaceSpec(dim=2)
        report = synthesizer.verify_nullspace(synthesizer.synthesize_channel(spec), spec)

        assert report.ok is True
        assert report.rank_of_effect_map == 4

    def test_trace_channel(self, synthesizer):
        """N = all traceless gives a one-outcome channel."""
        spec = _all_traceless(2)
        out = synthesizer.synthesize_channel(spec)

        assert out.channel.dim_out == 1
        assert synthesizer.verify_nullspace(out, spec).ok is True

    @seed(31)
    @settings(max_examples=15, deadline=None)
    @given(rng_seed=st.integers(min_value=0, max_value=10_000), size=st.integers(min_value=1, max_value=6))
    def test_random_subspaces(self, rng_seed, size):
        """Random self-adjoint traceless N in d = 3 is recovered exactly."""
        synthesizer = NullspaceSynthesizer()
        spec = traceless_subspace(rng_seed, 3, size)
        report = synthesizer.verify_nullspace(synthesizer.synthesize_channel(spec), spec)

        assert report.ok is True
        assert report.rank_of_effect_map == 9 - size
