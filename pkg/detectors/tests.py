import numpy as np
from django.test import SimpleTestCase

from cplx import DimensionError
from detectors import (
    EnumerationLimitError,
    SicMode,
    detect_ml,
    detect_mmse,
    detect_sic,
    detect_zf,
)
from sysmodel import Rng, SystemConfig, make_constellation, realize

QPSK = make_constellation(4)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def objective(H, y, symbols):
    return float(np.linalg.norm(y - H @ symbols) ** 2)


def all_detectors(r, c):
    return {
        "zf": detect_zf(r.H, r.y, c),
        "mmse": detect_mmse(r.H, r.y, r.noise_var, c),
        "zf-sic": detect_sic(r.H, r.y, r.noise_var, SicMode.ZF, c),
        "mmse-sic": detect_sic(r.H, r.y, r.noise_var, SicMode.MMSE, c),
        "ml": detect_ml(r.H, r.y, c),
    }


class ZeroForcingTest(SimpleTestCase):
    def test_identity_channel(self):
        y = np.array([0.3 - 2j, 1.5 + 0.1j])
        result = detect_zf(np.eye(2, dtype=complex), y, QPSK)
        np.testing.assert_allclose(result.xhat_soft, y, atol=1e-15)

    def test_against_normal_equations(self):
        rng = np.random.default_rng(7)
        H = random_complex(rng, 8, 4)
        y = random_complex(rng, 8)
        expected = np.linalg.solve(H.conj().T @ H, H.conj().T @ y)
        xhat = detect_zf(H, y, QPSK).xhat_soft
        self.assertLess(np.linalg.norm(xhat - expected) / np.linalg.norm(expected), 1e-9)

    def test_bits_length(self):
        r = realize(SystemConfig(4, 8, 16, 10.0), make_constellation(16), Rng(1))
        result = detect_zf(r.H, r.y, make_constellation(16))
        self.assertEqual(result.bits.size, 16)
        self.assertTrue(np.all(np.isin(result.symbols, make_constellation(16).points)))


class MmseTest(SimpleTestCase):
    def test_scalar_formula(self):
        result = detect_mmse(np.array([[1 + 0j]]), np.array([2 + 0j]), 1.0, QPSK)
        self.assertAlmostEqual(result.xhat_soft[0], 1.0)

    def test_zero_noise_matches_zf(self):
        rng = np.random.default_rng(8)
        H = random_complex(rng, 8, 4)
        y = random_complex(rng, 8)
        np.testing.assert_allclose(
            detect_mmse(H, y, 0.0, QPSK).xhat_soft, detect_zf(H, y, QPSK).xhat_soft, atol=1e-9
        )
        np.testing.assert_allclose(
            detect_mmse(H, y, 1e-9, QPSK).xhat_soft, detect_zf(H, y, QPSK).xhat_soft, atol=1e-6
        )

    def test_against_regularized_normal_equations(self):
        rng = np.random.default_rng(9)
        H = random_complex(rng, 8, 4)
        y = random_complex(rng, 8)
        expected = np.linalg.solve(H.conj().T @ H + 0.3 * np.eye(4), H.conj().T @ y)
        xhat = detect_mmse(H, y, 0.3, QPSK).xhat_soft
        self.assertLess(np.linalg.norm(xhat - expected) / np.linalg.norm(expected), 1e-9)

    def test_negative_noise_variance(self):
        with self.assertRaises(ValueError):
            detect_mmse(np.eye(2, dtype=complex), np.ones(2, dtype=complex), -1.0, QPSK)


class SicTest(SimpleTestCase):
    def test_single_stream_matches_linear(self):
        rng = np.random.default_rng(10)
        H = random_complex(rng, 4, 1)
        y = random_complex(rng, 4)
        zf_sic = detect_sic(H, y, 0.5, SicMode.ZF, QPSK)
        mmse_sic = detect_sic(H, y, 0.5, SicMode.MMSE, QPSK)
        np.testing.assert_allclose(zf_sic.xhat_soft, detect_zf(H, y, QPSK).xhat_soft, atol=1e-12)
        np.testing.assert_allclose(
            mmse_sic.xhat_soft, detect_mmse(H, y, 0.5, QPSK).xhat_soft, atol=1e-12
        )
        np.testing.assert_array_equal(zf_sic.bits, detect_zf(H, y, QPSK).bits)

    def test_orthogonal_columns_match_matched_filter(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            q, _ = np.linalg.qr(random_complex(rng, 2, 2))
            H = q * np.array([1.7, 0.6])
            y = random_complex(rng, 2)
            matched = (H.conj().T @ y) / np.sum(np.abs(H) ** 2, axis=0)
            expected = QPSK.nearest(matched)
            for mode in SicMode:
                result = detect_sic(H, y, 0.2, mode, QPSK)
                np.testing.assert_array_equal(result.indices, expected)

    def test_mode_accepts_strings(self):
        H = np.eye(2, dtype=complex)
        result = detect_sic(H, np.array([1 + 1j, -1 - 1j]), 0.1, "zf", QPSK)
        np.testing.assert_array_equal(result.indices, [0, 3])

    def test_rank_collapse(self):
        H = np.array([[1, 1], [0, 0], [0, 0]], dtype=complex)
        with self.assertRaises(np.linalg.LinAlgError):
            detect_sic(H, np.ones(3, dtype=complex), 0.0, SicMode.ZF, QPSK)


class MaximumLikelihoodTest(SimpleTestCase):
    def test_scalar_bpsk(self):
        bpsk = make_constellation(2)
        result = detect_ml(np.array([[1 + 0j]]), np.array([0.3 + 0j]), bpsk)
        self.assertEqual(result.symbols[0], 1)

    def test_guard(self):
        with self.assertRaises(EnumerationLimitError):
            detect_ml(np.ones((8, 5), dtype=complex), np.ones(8, dtype=complex), make_constellation(64))

    def test_multiple_chunks(self):
        c = make_constellation(16)
        r = realize(SystemConfig(5, 6, 16, 30.0), c, Rng(3), noise_free=True)
        np.testing.assert_array_equal(detect_ml(r.H, r.y, c).indices, r.indices)

    def test_tie_keeps_first_candidate(self):
        H = np.zeros((2, 2), dtype=complex)
        H[0, 0] = 1
        result = detect_ml(H, np.zeros(2, dtype=complex), make_constellation(2))
        np.testing.assert_array_equal(result.indices, [0, 0])

    def test_overflowing_metrics_still_pick_a_candidate(self):
        # every squared residual overflows to inf
        result = detect_ml(np.eye(8, 4, dtype=complex), np.full(8, 1e160 + 0j), QPSK)
        np.testing.assert_array_equal(result.indices, [0, 0, 0, 0])
        self.assertEqual(result.bits.shape, (8,))

    def test_optimality_certificate(self):
        cfg = SystemConfig(4, 8, 4, 5.0)
        rng = Rng(4)
        for _ in range(100):
            r = realize(cfg, QPSK, rng)
            results = all_detectors(r, QPSK)
            best = objective(r.H, r.y, results["ml"].symbols)
            for name, result in results.items():
                self.assertLessEqual(best, objective(r.H, r.y, result.symbols) + 1e-12, name)


class NoiseFreeExactnessTest(SimpleTestCase):
    def test_every_detector_recovers_the_bits(self):
        cfg = SystemConfig(4, 8, 4, 0.0)
        rng = Rng(5)
        for _ in range(1000):
            r = realize(cfg, QPSK, rng, noise_free=True)
            for name, result in all_detectors(r, QPSK).items():
                np.testing.assert_array_equal(result.bits, r.bits, err_msg=name)

    def test_determinism(self):
        r = realize(SystemConfig(4, 8, 4, 5.0), QPSK, Rng(6))
        first = all_detectors(r, QPSK)
        second = all_detectors(r, QPSK)
        for name in first:
            np.testing.assert_array_equal(first[name].xhat_soft, second[name].xhat_soft)
            np.testing.assert_array_equal(first[name].bits, second[name].bits)


class InputValidationTest(SimpleTestCase):
    def setUp(self):
        self.r = realize(SystemConfig(4, 8, 4, 10.0), QPSK, Rng(7))

    def test_nan_receive_vector(self):
        y = self.r.y.copy()
        y[3] = np.nan
        for name, detect in (
            ("zf", lambda: detect_zf(self.r.H, y, QPSK)),
            ("mmse", lambda: detect_mmse(self.r.H, y, self.r.noise_var, QPSK)),
            ("mmse-sic", lambda: detect_sic(self.r.H, y, self.r.noise_var, SicMode.MMSE, QPSK)),
            ("ml", lambda: detect_ml(self.r.H, y, QPSK)),
        ):
            with self.assertRaises(ValueError, msg=name):
                detect()

    def test_infinite_channel_entry(self):
        H = self.r.H.copy()
        H[0, 0] = np.inf
        with self.assertRaises(ValueError):
            detect_zf(H, self.r.y, QPSK)

    def test_channel_must_be_a_matrix(self):
        with self.assertRaises(DimensionError):
            detect_mmse(self.r.H.reshape(-1), self.r.y, self.r.noise_var, QPSK)
