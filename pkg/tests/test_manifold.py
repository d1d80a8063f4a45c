import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from matrep.manifold import (
    DegenerateInputError,
    FlatEmbedding,
    MatrixEmbedding,
    ShapeMismatchError,
    flatten,
    frobenius_norm,
    normalize,
    retract,
    tangent_project,
    unflatten,
)


def random_unit(rng, p, r=None):
    shape = (p,) if r is None else (p, r)
    x = rng.standard_normal(shape)
    return x / np.linalg.norm(x)


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


class TestFrobeniusNorm:
    @pytest.mark.parametrize(
        "M, expected",
        [([[1, 0], [0, 0]], 1.0), ([[0.6, 0], [0.8, 0]], 1.0), ([[1, 1], [1, 1]], 2.0)],
    )
    def test_examples(self, M, expected):
        assert frobenius_norm(M) == pytest.approx(expected, abs=1e-15)

    def test_matches_flattened_euclidean_norm(self):
        rng = np.random.default_rng(0)
        M = rng.standard_normal((7, 3))
        assert frobenius_norm(M) == pytest.approx(np.linalg.norm(M.ravel()), rel=1e-14)


class TestNormalize:
    def test_scales_column(self):
        np.testing.assert_allclose(normalize([[3], [4]]).data, [[0.6], [0.8]], atol=1e-15)

    def test_constant_matrix(self):
        np.testing.assert_allclose(normalize([[2, 2], [2, 2]]).data, np.full((2, 2), 0.5), atol=1e-15)

    def test_unit_input_unchanged(self):
        M = random_unit(np.random.default_rng(1), 5, 2)
        np.testing.assert_allclose(normalize(M).data, M, atol=1e-15)

    def test_zero_rejected(self):
        with pytest.raises(DegenerateInputError):
            normalize(np.zeros((3, 2)))

    def test_nonfinite_rejected(self):
        with pytest.raises(DegenerateInputError):
            normalize([[np.inf], [1.0]])

    @settings(max_examples=200, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 4)), elements=finite))
    def test_idempotent(self, M):
        if M.shape[1] > M.shape[0] or frobenius_norm(M) == 0:
            return
        once = normalize(M).data
        np.testing.assert_allclose(normalize(once).data, once, atol=1e-14)


class TestMatrixEmbedding:
    def test_rejects_non_unit(self):
        with pytest.raises(DegenerateInputError):
            MatrixEmbedding(np.ones((2, 2)))

    def test_rejects_more_columns_than_rows(self):
        with pytest.raises(ShapeMismatchError):
            MatrixEmbedding(np.full((1, 2), np.sqrt(0.5)))

    def test_is_read_only(self):
        M = normalize(np.ones((3, 1)))
        with pytest.raises(ValueError):
            M.data[0, 0] = 0.0

    def test_shape_properties(self):
        M = normalize(np.ones((4, 2)))
        assert (M.p, M.r) == (4, 2)


class TestFlatten:
    def test_row_major(self):
        a, b, c, d = 0.1, 0.2, 0.3, np.sqrt(1 - 0.14)
        flat = flatten(MatrixEmbedding([[a, b], [c, d]]))
        np.testing.assert_array_equal(flat.data, [a, b, c, d])

    def test_column_vector_is_identity(self):
        x = random_unit(np.random.default_rng(2), 3)[:, None]
        np.testing.assert_array_equal(flatten(MatrixEmbedding(x)).data, x[:, 0])

    @pytest.mark.parametrize("p, r", [(p, r) for p in (1, 10, 100) for r in range(1, 7) if r <= p])
    def test_roundtrip_exact(self, p, r):
        rng = np.random.default_rng(p * 10 + r)
        for _ in range(1000):
            M = MatrixEmbedding(random_unit(rng, p, r))
            back = unflatten(flatten(M))
            assert np.array_equal(back.data, M.data)

    def test_length_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            FlatEmbedding(np.array([1.0, 0.0, 0.0]), 2, 2)


class TestTangentProject:
    def test_radial_component_removed(self):
        e1 = np.eye(4)[0]
        np.testing.assert_array_equal(tangent_project(e1, e1), np.zeros(4))

    def test_tangent_vector_kept(self):
        e1, e2 = np.eye(4)[:2]
        np.testing.assert_array_equal(tangent_project(e1, e2), e2)

    def test_diagonal_point(self):
        x = (np.eye(4)[0] + np.eye(4)[1]) / np.sqrt(2)
        np.testing.assert_allclose(tangent_project(x, np.eye(4)[0]), [0.5, -0.5, 0, 0], atol=1e-15)

    def test_non_unit_point_rejected(self):
        with pytest.raises(DegenerateInputError):
            tangent_project(np.array([1.0, 1.0]), np.array([1.0, 0.0]))

    def test_orthogonal_and_idempotent(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            n = rng.integers(1, 60)
            x = random_unit(rng, n)
            g = rng.standard_normal(n) * rng.uniform(0.01, 100)
            t = tangent_project(x, g)
            assert abs(x @ t) < 1e-12 * max(1.0, np.linalg.norm(g))
            np.testing.assert_allclose(tangent_project(x, t), t, atol=1e-12 * max(1.0, np.linalg.norm(g)))


class TestRetract:
    def test_zero_step_direction(self):
        x = random_unit(np.random.default_rng(4), 5)
        np.testing.assert_array_equal(retract(x, np.zeros(5), 0.3), x)

    def test_known_value(self):
        e1, e2 = np.eye(3)[:2]
        np.testing.assert_allclose(retract(e1, e2, 1.0), [1 / np.sqrt(2), -1 / np.sqrt(2), 0], atol=1e-15)

    def test_rejects_non_tangent(self):
        with pytest.raises(ValueError):
            retract(np.eye(3)[0], np.eye(3)[0], 0.1)

    def test_unit_norm_output(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            n = rng.integers(2, 60)
            x = random_unit(rng, n)
            v = tangent_project(x, rng.standard_normal(n) * 10)
            y = retract(x, v, rng.uniform(1e-4, 5))
            assert abs(np.linalg.norm(y) - 1) < 1e-12
