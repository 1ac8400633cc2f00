import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdist.io import StateFileError, load_state, state_from_json, state_to_json
from qdist.linalg import ValidationError, eig_hermitian, is_psd
from qdist.states import (
    ProbVector,
    as_density,
    measure_in_eigenbasis,
    random_density,
    random_distribution,
    trace_distance,
)

seeds = st.integers(min_value=0, max_value=2**63)
dims = st.integers(min_value=1, max_value=8)


class TestProbVector:
    def test_rejects_bad_sum(self):
        with pytest.raises(ValidationError):
            ProbVector([0.5, 0.4])

    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            ProbVector([1.5, -0.5])

    def test_log_domain_keeps_tiny_masses(self):
        P = ProbVector.from_log2([0.0, -5000.0])
        assert P.p[1] == 0.0
        assert P.log2p[1] == -5000.0

    def test_equality(self):
        assert ProbVector([0.25, 0.75]) == ProbVector([0.25, 0.75])
        assert ProbVector([0.25, 0.75]) != ProbVector([0.75, 0.25])


class TestTraceDistance:
    def test_disjoint(self):
        assert trace_distance(ProbVector([1, 0]), ProbVector([0, 1])) == 2.0

    def test_equal_states(self):
        rho = random_density(3, 1)
        assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-12)

    def test_classical_example(self):
        assert trace_distance(ProbVector([0.7, 0.3]), ProbVector([0.5, 0.5])) == pytest.approx(0.4, abs=1e-15)

    def test_matches_diagonal_embedding(self):
        P, Q = random_distribution(4, 1), random_distribution(4, 2)
        assert trace_distance(P.to_density(), Q.to_density()) == pytest.approx(trace_distance(P, Q), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            trace_distance(ProbVector([1.0]), ProbVector([0.5, 0.5]))

    def test_kind_mismatch(self):
        with pytest.raises(ValidationError):
            trace_distance(ProbVector([0.5, 0.5]), np.eye(2) / 2)

    def test_triangle_inequality(self):
        for s in range(60):
            n = 2 + s % 5
            a, b, c = (random_density(n, 3 * s + j) for j in range(3))
            assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-9

    @given(dims, seeds)
    def test_symmetric(self, n, s):
        a, b = random_distribution(n, s), random_distribution(n, s + 1)
        assert trace_distance(a, b) == trace_distance(b, a)


class TestRandomInstances:
    def test_density_dim_one(self):
        np.testing.assert_allclose(random_density(1, 123), [[1.0]])

    def test_density_deterministic(self):
        assert np.array_equal(random_density(4, 7), random_density(4, 7))

    def test_density_valid(self):
        rho = random_density(4, 7)
        assert abs(np.trace(rho).real - 1.0) < 1e-12
        assert eig_hermitian(rho).eigenvalues[0] >= 0.0

    def test_density_rejects_zero_dim(self):
        with pytest.raises(ValidationError):
            random_density(0, 1)

    def test_distribution_dim_one(self):
        assert random_distribution(1, 5).p.tolist() == [1.0]

    def test_distribution_deterministic(self):
        assert random_distribution(6, 9) == random_distribution(6, 9)

    def test_distribution_sums(self):
        assert abs(random_distribution(5, 3).p.sum() - 1.0) < 1e-12

    def test_seeds_differ(self):
        assert not np.array_equal(random_density(3, 1), random_density(3, 2))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=1, max_value=8), seeds)
    def test_random_density_is_psd(self, n, s):
        assert is_psd(random_density(n, s), 1e-9)


class TestMeasureInEigenbasis:
    def test_commuting_pair(self):
        sigma = np.diag([0.3, 0.7])
        P, Q = measure_in_eigenbasis(sigma, sigma)
        np.testing.assert_allclose(P.p, [0.3, 0.7])
        np.testing.assert_allclose(Q.p, [0.3, 0.7])

    def test_maximally_mixed_sigma(self, maxmix2):
        rho = random_density(2, 4)
        _, Q = measure_in_eigenbasis(rho, maxmix2)
        np.testing.assert_allclose(Q.p, [0.5, 0.5], atol=1e-15)

    def test_plus_state_in_standard_basis(self, plus_state, maxmix2):
        P, _ = measure_in_eigenbasis(plus_state, maxmix2)
        np.testing.assert_allclose(P.p, [0.5, 0.5], atol=1e-15)

    def test_sigma_outcomes_are_eigenvalues(self):
        rho, sigma = random_density(5, 1), random_density(5, 2)
        _, Q = measure_in_eigenbasis(rho, sigma)
        np.testing.assert_allclose(Q.p, eig_hermitian(sigma).eigenvalues, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            measure_in_eigenbasis(random_density(2, 1), random_density(3, 1))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=1, max_value=6), seeds)
    def test_outputs_are_distributions(self, n, s):
        P, Q = measure_in_eigenbasis(random_density(n, s), random_density(n, s ^ 0xFFFF))
        assert abs(P.p.sum() - 1) < 1e-10 and abs(Q.p.sum() - 1) < 1e-10


class TestStateFiles:
    def test_matrix_roundtrip(self, tmp_path):
        rho = random_density(3, 8)
        path = tmp_path / "rho.json"
        path.write_text(json.dumps(state_to_json(rho)))
        np.testing.assert_allclose(load_state(path), rho, atol=1e-15)

    def test_distribution_roundtrip(self, tmp_path):
        P = random_distribution(4, 8)
        path = tmp_path / "p.json"
        path.write_text(json.dumps(state_to_json(P)))
        assert load_state(path) == P

    def test_matrix_layout_is_row_major(self):
        obj = {"dim": 2, "entries": [[0.5, 0], [0, -0.25], [0, 0.25], [0.5, 0]]}
        rho = state_from_json(obj)
        assert rho[0, 1] == -0.25j and rho[1, 0] == 0.25j

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "p": [0.5, 0.5,]\n}')
        with pytest.raises(StateFileError, match="line 2"):
            load_state(path)

    def test_field_error_names_field(self):
        with pytest.raises(StateFileError, match=r"entries\[1\]"):
            state_from_json({"dim": 2, "entries": [[1, 0], "x", [0, 0], [0, 0]]})
        with pytest.raises(StateFileError, match="dim\\*dim"):
            state_from_json({"dim": 2, "entries": [[1, 0]]})
        with pytest.raises(StateFileError, match=r"p\[1\]"):
            state_from_json({"p": [1, "a"]})

    def test_invalid_density_rejected(self):
        with pytest.raises(StateFileError, match="trace"):
            state_from_json({"dim": 1, "entries": [[2, 0]]})

    def test_as_density_rejects_negative(self):
        with pytest.raises(ValidationError):
            as_density(np.diag([1.5, -0.5]))
