import numpy as np
import pytest

from artifact.tridiag import TridiagonalLU, apply_tridiagonal, solve_tridiagonal, thomas


def dense(lower, diag, upper):
    return np.diag(diag) + np.diag(upper, 1) + np.diag(lower, -1)


@pytest.fixture
def system():
    rng = np.random.default_rng(0)
    n = 50
    lower, upper = rng.uniform(-1, 1, n - 1), rng.uniform(-1, 1, n - 1)
    diag = 3.0 + rng.uniform(0, 1, n)
    return lower, diag, upper, rng.normal(size=n)


def test_thomas_matches_dense(system):
    lower, diag, upper, b = system
    expected = np.linalg.solve(dense(lower, diag, upper), b)
    np.testing.assert_allclose(thomas(lower, diag, upper, b), expected, rtol=1e-12, atol=1e-12)


def test_lapack_paths_match_thomas(system):
    lower, diag, upper, b = system
    ref = thomas(lower, diag, upper, b)
    np.testing.assert_allclose(TridiagonalLU(lower, diag, upper).solve(b), ref, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(solve_tridiagonal(lower, diag, upper, b), ref, rtol=1e-12, atol=1e-12)


def test_apply(system):
    lower, diag, upper, b = system
    np.testing.assert_allclose(apply_tridiagonal(lower, diag, upper, b), dense(lower, diag, upper) @ b)


def test_singular_rejected():
    with pytest.raises(np.linalg.LinAlgError):
        TridiagonalLU([0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0])
