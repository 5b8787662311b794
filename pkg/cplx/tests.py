import numpy as np
from django.test import SimpleTestCase

from cplx import (
    DimensionError,
    NotPositiveDefiniteError,
    as_matrix,
    as_vector,
    gram,
    hermitian,
    matvec,
    solve_hpd,
    spectral_bound,
)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def naive_matvec(a, v):
    result = []
    for i in range(a.shape[0]):
        acc = 0j
        for j in range(a.shape[1]):
            acc += a[i, j] * v[j]
        result.append(acc)
    return np.array(result)


class HermitianTest(SimpleTestCase):
    def test_real_scalar_is_fixed(self):
        self.assertEqual(hermitian(np.array([[1 + 0j]]))[0, 0], 1)

    def test_pure_imaginary_is_conjugated(self):
        self.assertEqual(hermitian(np.array([[1j]]))[0, 0], -1j)

    def test_involution(self):
        a = random_complex(np.random.default_rng(1), 3, 2)
        self.assertEqual(hermitian(a).shape, (2, 3))
        np.testing.assert_array_equal(hermitian(hermitian(a)), a)

    def test_adjoint_identity(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            a = random_complex(rng, 5, 3)
            v = random_complex(rng, 3)
            w = random_complex(rng, 5)
            left = np.vdot(w, matvec(a, v))
            right = np.vdot(matvec(hermitian(a), w), v)
            self.assertLess(abs(left - right), 1e-12)


class MatvecTest(SimpleTestCase):
    def test_identity(self):
        v = np.array([1 + 1j, 2])
        np.testing.assert_array_equal(matvec(np.eye(2, dtype=complex), v), v)

    def test_permutation(self):
        a = np.array([[0, 1], [1, 0]], dtype=complex)
        np.testing.assert_array_equal(matvec(a, np.array([3j, 5])), [5, 3j])

    def test_against_naive_product(self):
        rng = np.random.default_rng(3)
        a = random_complex(rng, 4, 3)
        v = random_complex(rng, 3)
        self.assertLess(np.max(np.abs(matvec(a, v) - naive_matvec(a, v))), 1e-12)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            matvec(np.ones((2, 3), dtype=complex), np.ones(2, dtype=complex))


class ValidationTest(SimpleTestCase):
    def test_rejects_nan(self):
        with self.assertRaises(ValueError):
            as_vector([1, np.nan])

    def test_rejects_wrong_rank(self):
        with self.assertRaises(DimensionError):
            as_matrix([1, 2])

    def test_rejects_empty(self):
        with self.assertRaises(DimensionError):
            as_vector([])


class SolveHpdTest(SimpleTestCase):
    def test_identity(self):
        b = np.array([1 + 2j, -3, 0.5j])
        np.testing.assert_allclose(solve_hpd(np.eye(3, dtype=complex), b), b)

    def test_scaled_identity(self):
        x = solve_hpd(2 * np.eye(2, dtype=complex), np.array([4, 2j]))
        np.testing.assert_allclose(x, [2, 1j])

    def test_against_gaussian_elimination(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            g = random_complex(rng, 6, 4)
            a = gram(g) + np.eye(4)
            b = random_complex(rng, 4)
            expected = np.linalg.solve(a, b)
            x = solve_hpd(a, b)
            self.assertLess(np.linalg.norm(x - expected) / np.linalg.norm(expected), 1e-9)
            self.assertLess(np.linalg.norm(a @ x - b) / np.linalg.norm(b), 1e-10)

    def test_matrix_right_hand_side(self):
        rng = np.random.default_rng(5)
        g = random_complex(rng, 5, 3)
        a = gram(g) + np.eye(3)
        inverse = solve_hpd(a, np.eye(3, dtype=complex))
        np.testing.assert_allclose(a @ inverse, np.eye(3), atol=1e-12)

    def test_reports_failing_pivot(self):
        a = np.diag([1.0, 2.0, -1.0]).astype(complex)
        with self.assertRaises(NotPositiveDefiniteError) as raised:
            solve_hpd(a, np.ones(3, dtype=complex))
        self.assertEqual(raised.exception.pivot, 2)
        self.assertIn("pivot 2", str(raised.exception))

    def test_singular_gram(self):
        h = np.array([[1, 1], [0, 0]], dtype=complex)
        with self.assertRaises(NotPositiveDefiniteError) as raised:
            solve_hpd(gram(h), np.ones(2, dtype=complex))
        self.assertEqual(raised.exception.pivot, 1)


class SpectralBoundTest(SimpleTestCase):
    def test_identity(self):
        self.assertAlmostEqual(spectral_bound(np.eye(4, dtype=complex), 50, 0), 1.0)

    def test_diagonal(self):
        a = np.diag([1.0, 4.0]).astype(complex)
        self.assertAlmostEqual(spectral_bound(a, 50, 0), 4.0, delta=1e-6)

    def test_zero_matrix(self):
        self.assertEqual(spectral_bound(np.zeros((3, 3), dtype=complex), 10, 0), 0.0)

    def test_against_dense_eigensolver(self):
        rng = np.random.default_rng(6)
        for seed in range(10):
            a = gram(random_complex(rng, 4, 4))
            expected = np.linalg.eigvalsh(a)[-1]
            estimate = spectral_bound(a, 500, seed)
            self.assertLess(abs(estimate - expected) / expected, 1e-3)
            self.assertLessEqual(estimate, expected * (1 + 1e-12))
            self.assertLessEqual(estimate, np.trace(a).real + 1e-9)

    def test_rejects_zero_iterations(self):
        with self.assertRaises(ValueError):
            spectral_bound(np.eye(2, dtype=complex), 0, 0)
