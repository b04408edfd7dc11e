"""Tests for the commutative-range test and measure-and-prepare decomposition."""

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from src.channels.evaluator import ChannelEvaluator
from src.errors import (
    CertificationFailure,
    DiagonalizationFailure,
    DimensionMismatch,
    NotCommutativeRange,
    NotCommutingFamily,
)
from src.models.schema import Tolerances
from src.seb.analyzer import SebAnalyzer
from tests.factories import (
    dephasing,
    identity_channel,
    near_commutative_holevo,
    prepare_state,
    random_commutative_holevo,
    random_state,
)


class TestRangeCommutativity:
    """Test suite for SebAnalyzer.range_commutativity_test."""

    @pytest.fixture
    def analyzer(self):
        """Fixture to provide SebAnalyzer instance."""
        return SebAnalyzer()

    def test_dephasing_commutes(self, analyzer):
        """Diagonal range."""
        report = analyzer.range_commutativity_test(dephasing(3))

        assert report.commutes is True
        assert report.worst_residual <= 1e-14
        assert report.worst_pair is None

    def test_identity_witness(self, analyzer):
        """Identity channel: M_12 and M_21 do not commute."""
        report = analyzer.range_commutativity_test(identity_channel(2))

        assert report.commutes is False
        assert report.worst_pair == ((1, 2), (2, 1))
        assert report.worst_commutator_norm == pytest.approx(np.sqrt(2))
        assert report.worst_residual == pytest.approx(np.sqrt(2) / 2)

    def test_prepare_state_commutes(self, analyzer):
        """One-dimensional range."""
        rho = random_state(np.random.default_rng(0), 3)
        report = analyzer.range_commutativity_test(prepare_state(rho))

        assert report.commutes is True

    @pytest.mark.parametrize("dim", range(2, 9))
    def test_identity_rejected_at_every_dimension(self, analyzer, dim):
        """[e_1 e_2*, e_2 e_1*] = diag(1, -1, 0, ...) has norm sqrt(2) >= 1."""
        report = analyzer.range_commutativity_test(identity_channel(dim))

        assert report.commutes is False
        assert report.worst_pair is not None
        assert report.worst_commutator_norm >= 1.0
        assert report.worst_residual == pytest.approx(np.sqrt(2) / 2)

    def test_adjoint_closure(self, analyzer):
        """Images of a Hermiticity-preserving map satisfy M_ij* = M_ji."""
        report = analyzer.range_commutativity_test(random_commutative_holevo(2, 3, 4))

        assert report.adjoint_closure_residual <= 1e-12


class TestDecomposeSeb:
    """Test suite for SebAnalyzer.decompose_seb and its verifier."""

    @pytest.fixture
    def analyzer(self):
        """Fixture to provide SebAnalyzer instance."""
        return SebAnalyzer()

    @pytest.fixture
    def evaluator(self):
        """Fixture to provide ChannelEvaluator instance."""
        return ChannelEvaluator()

    def test_dephasing(self, analyzer):
        """Effects and preparations are the unit projectors, p_k = 1/2."""
        dec = analyzer.decompose_seb(dephasing(2), seed=7)

        np.testing.assert_allclose(np.abs(dec.unitary), np.eye(2), atol=1e-12)
        assert [t.probability for t in dec.terms] == pytest.approx([0.5, 0.5])
        for k in range(2):
            unit = np.zeros((2, 2))
            unit[k, k] = 1.0
            np.testing.assert_allclose(dec.effects[k], unit, atol=1e-12)
            np.testing.assert_allclose(dec.preparations[k], unit, atol=1e-12)
            np.testing.assert_allclose(dec.terms[k].state, unit, atol=1e-12)
        assert dec.dropped_mass == 0.0

    def test_prepare_state(self, analyzer, evaluator):
        """Preparing diag(q) gives effects q_k I."""
        q = [0.5, 0.3, 0.2]
        ch = prepare_state(np.diag(q))
        dec = analyzer.decompose_seb(ch)

        for k in range(3):
            np.testing.assert_allclose(dec.effects[k], q[k] * np.eye(3), atol=1e-12)
        np.testing.assert_allclose(evaluator.superoperator(dec.to_holevo()),
                                   evaluator.superoperator(ch), atol=1e-10)

    def test_term_marginals(self, analyzer):
        """sum_k p_k rho_k equals diag(lambda)."""
        weights = [0.1, 0.2, 0.7]
        dec = analyzer.decompose_seb(random_commutative_holevo(5, 3, 4), weights=weights)
        marginal = sum(t.probability * t.state for t in dec.terms)

        np.testing.assert_allclose(marginal, np.diag(weights), atol=1e-10)

    def test_rejects_noncommutative_range(self, analyzer):
        """The identity channel is not entanglement breaking."""
        with pytest.raises(NotCommutativeRange) as exc:
            analyzer.decompose_seb(identity_channel(2))
        assert exc.value.details['worst_pair'] == ((1, 2), (2, 1))

    def test_verify_dephasing(self, analyzer):
        """Self-consistency of a fresh decomposition."""
        ch = dephasing(2)
        check = analyzer.verify_separable_decomposition(analyzer.decompose_seb(ch), ch)

        assert check.ok is True
        assert check.sigma_residual <= 1e-10
        assert check.reconstruction_residual <= 1e-10
        assert check.povm_residual <= 1e-10

    def test_verify_perturbed_effect(self, analyzer):
        """Adding 0.01 e1e1* to one effect breaks the POVM."""
        ch = dephasing(2)
        dec = analyzer.decompose_seb(ch)
        effects = list(dec.effects)
        effects[0] = effects[0] + np.diag([0.01, 0.0])
        tampered = dec.model_copy(update={'effects': effects})

        check = analyzer.verify_separable_decomposition(tampered, ch)

        assert check.ok is False
        assert check.povm_residual == pytest.approx(0.01)

    def test_verify_reshuffled_terms(self, analyzer):
        """Order of terms does not matter."""
        ch = random_commutative_holevo(3, 3, 3)
        dec = analyzer.decompose_seb(ch)
        shuffled = dec.model_copy(update={
            'terms': dec.terms[::-1],
            'effects': dec.effects[::-1],
            'preparations': dec.preparations[::-1],
        })

        assert analyzer.verify_separable_decomposition(shuffled, ch).ok is True

    def test_verify_dimension_mismatch(self, analyzer):
        """Decomposition and channel must agree on dimensions."""
        dec = analyzer.decompose_seb(dephasing(2))
        with pytest.raises(DimensionMismatch):
            analyzer.verify_separable_decomposition(dec, dephasing(3))

    def test_seed_determinism(self, analyzer):
        """Same seed, identical unitary."""
        ch = random_commutative_holevo(11, 3, 3)
        first = analyzer.decompose_seb(ch, seed=4)
        second = analyzer.decompose_seb(ch, seed=4)

        np.testing.assert_array_equal(first.unitary, second.unitary)

    @seed(20240611)
    @settings(max_examples=25, deadline=None)
    @given(rng_seed=st.integers(min_value=0, max_value=10_000), dim=st.integers(min_value=2, max_value=8))
    def test_random_commutative_channels(self, rng_seed, dim):
        """Every commutative-range channel decomposes and reconstructs, d up to 8."""
        analyzer = SebAnalyzer()
        ch = random_commutative_holevo(rng_seed, dim, dim + 1)
        dec = analyzer.decompose_seb(ch, seed=rng_seed)
        check = analyzer.verify_separable_decomposition(dec, ch)

        assert check.ok is True
        assert check.sigma_residual <= 1e-8
        assert check.reconstruction_residual <= 1e-8
        assert check.povm_residual <= 1e-12
        assert check.psd_min >= -1e-9
        assert sum(t.probability for t in dec.terms) + dec.dropped_mass == pytest.approx(1.0)

    @pytest.mark.parametrize("ch", [dephasing(2), dephasing(3), prepare_state(np.diag([0.5, 0.3, 0.2]))])
    def test_povm_sum_exact(self, analyzer, ch):
        """sum_k F_k = I to rounding, every effect PSD."""
        dec = analyzer.decompose_seb(ch)

        assert np.linalg.norm(sum(dec.effects) - np.eye(ch.dim_in)) <= 1e-12
        assert min(np.linalg.eigvalsh(f)[0] for f in dec.effects) >= -1e-9

    def test_schur_form(self, analyzer):
        """F_k[j, i] sqrt(lambda_i lambda_j) = p_k (rho_k)_ij for kept terms."""
        weights = np.array([0.2, 0.3, 0.5])
        dec = analyzer.decompose_seb(random_commutative_holevo(12, 3, 4), weights=weights, seed=2)
        roots = np.sqrt(np.outer(weights, weights))

        for term in dec.terms:
            effect = dec.effects[term.index - 1]
            np.testing.assert_allclose(effect.T * roots, term.probability * term.state, atol=1e-10)

    @pytest.mark.parametrize("rng_seed", [3, 17, 40])
    def test_seed_invariance_of_action(self, analyzer, evaluator, rng_seed):
        """Different seeds may change U but not the reconstructed channel."""
        ch = random_commutative_holevo(rng_seed, 3, 2)
        target = evaluator.superoperator(ch)

        for diag_seed in (0, 1, 99):
            dec = analyzer.decompose_seb(ch, seed=diag_seed)
            np.testing.assert_allclose(evaluator.superoperator(dec.to_holevo()), target, atol=1e-8)

    def test_near_commuting_channel(self):
        """A range accepted at eps_comm = 1e-6 decomposes or fails certification, nothing else."""
        tolerances = Tolerances(eps_comm=1e-6, eps_recon=1e-5)
        analyzer = SebAnalyzer(tolerances)
        ch = near_commutative_holevo(seed=1, dim=3, count=4, eps=1e-7)

        assert analyzer.range_commutativity_test(ch).commutes is True
        try:
            dec = analyzer.decompose_seb(ch, seed=1)
        except CertificationFailure as e:
            assert 'invariant' in e.details
        else:
            assert analyzer.verify_separable_decomposition(dec, ch).ok is True

    @pytest.mark.parametrize("failure", [
        DiagonalizationFailure("Member 0 keeps off-diagonal residual 2.698e-06",
                               {'member': 0, 'residual': 2.698e-06}),
        NotCommutingFamily("Members 0 and 4 do not commute", {'pair': [0, 4], 'residual': 3e-6}),
    ])
    def test_solver_failure_becomes_certification_failure(self, analyzer, monkeypatch, failure):
        """Joint diagonalization errors surface as CertificationFailure."""
        def fail(family, seed):
            raise failure

        monkeypatch.setattr(analyzer.solver, "simultaneous_diagonalize", fail)
        with pytest.raises(CertificationFailure) as exc:
            analyzer.decompose_seb(dephasing(2))

        assert exc.value.details['invariant'] == "joint diagonalization"
        assert exc.value.details['residual'] == failure.details['residual']

    def test_rank_one_kraus_of_decomposition(self, analyzer, evaluator):
        """The certified Holevo form expands into rank-one Kraus operators."""
        ch = random_commutative_holevo(8, 3, 2)
        form = analyzer.rank_one_kraus(analyzer.decompose_seb(ch))

        np.testing.assert_allclose(evaluator.superoperator(form.to_kraus()),
                                   evaluator.superoperator(ch), atol=1e-9)

    def test_entangled_output_is_separable(self, analyzer, evaluator):
        """(I (x) Phi) of the maximally entangled state equals sum_k p_k rho_k (x) v_k v_k*."""
        ch = prepare_state(np.diag([0.5, 0.3, 0.2]))
        omega = np.eye(3).reshape(-1) / np.sqrt(3.0)
        output = evaluator.apply_extended(ch, np.outer(omega, omega), 3)
        dec = analyzer.decompose_seb(ch)
        separable = sum(
            t.probability * np.kron(t.state, np.outer(t.vector, t.vector.conj())) for t in dec.terms
        )

        np.testing.assert_allclose(output, separable, atol=1e-12)
