import itertools

import numpy as np
from django.test import SimpleTestCase

from sysmodel import (
    SUPPORTED_ORDERS,
    Rng,
    SystemConfig,
    UnsupportedModulationError,
    bit_error_rate,
    count_symbol_errors,
    demodulate_hard,
    make_constellation,
    modulate,
    noise_variance,
    realize,
    sample_channel,
    symbol_error_rate,
)


class ConstellationTest(SimpleTestCase):
    def test_bpsk(self):
        c = make_constellation(2)
        np.testing.assert_array_equal(c.points, [1, -1])
        self.assertEqual(c.bit_map, {(0,): 0, (1,): 1})
        self.assertEqual(c.bits_per_symbol, 1)

    def test_qpsk_mapping_is_bit_exact(self):
        c = make_constellation(4)
        root = np.sqrt(2)
        expected = {
            (0, 0): (1 + 1j) / root,
            (0, 1): (-1 + 1j) / root,
            (1, 1): (-1 - 1j) / root,
            (1, 0): (1 - 1j) / root,
        }
        for bits, point in expected.items():
            self.assertAlmostEqual(c.points[c.bit_map[bits]], point, places=15)
        np.testing.assert_allclose(np.abs(c.points) ** 2, 1.0, atol=1e-15)

    def test_unit_average_energy(self):
        for order in SUPPORTED_ORDERS:
            c = make_constellation(order)
            self.assertLess(abs(np.mean(np.abs(c.points) ** 2) - 1), 1e-12)

    def test_points_are_distinct_and_bit_map_is_bijection(self):
        for order in SUPPORTED_ORDERS:
            c = make_constellation(order)
            self.assertEqual(len(set(np.round(c.points, 12))), order)
            self.assertEqual(sorted(c.bit_map.values()), list(range(order)))

    def test_gray_adjacency(self):
        for order in (2, 4, 16):
            c = make_constellation(order)
            d_min = c.min_distance
            for i, j in itertools.combinations(range(order), 2):
                if abs(abs(c.points[i] - c.points[j]) - d_min) < 1e-9:
                    differing = np.count_nonzero(c.bit_table[i] != c.bit_table[j])
                    self.assertEqual(differing, 1, f"points {i} and {j} of {order}-QAM")

    def test_unsupported_order(self):
        for order in (1, 3, 8, 32, 256):
            with self.assertRaises(UnsupportedModulationError):
                make_constellation(order)


class ModulationTest(SimpleTestCase):
    def test_qpsk_lookup(self):
        symbols = modulate(np.array([0, 0]), make_constellation(4))
        self.assertAlmostEqual(symbols[0], (1 + 1j) / np.sqrt(2), places=15)

    def test_bpsk_lookup(self):
        self.assertEqual(modulate(np.array([0]), make_constellation(2))[0], 1)

    def test_length_mismatch(self):
        with self.assertRaises(ValueError):
            modulate(np.array([0, 1, 1]), make_constellation(4))

    def test_round_trip(self):
        rng = Rng(11)
        for order in (2, 4, 16):
            c = make_constellation(order)
            for _ in range(1000):
                bits = rng.bits(3 * c.bits_per_symbol)
                _, recovered = demodulate_hard(modulate(bits, c), c)
                np.testing.assert_array_equal(recovered, bits)

    def test_exact_point_is_kept(self):
        c = make_constellation(16)
        symbols, _ = demodulate_hard(c.points, c)
        np.testing.assert_array_equal(symbols, c.points)

    def test_bpsk_slicing(self):
        symbols, bits = demodulate_hard(np.array([0.3 + 0.1j]), make_constellation(2))
        self.assertEqual(symbols[0], 1)
        self.assertEqual(bits[0], 0)

    def test_tie_goes_to_lowest_index(self):
        symbols, bits = demodulate_hard(np.array([0j]), make_constellation(2))
        self.assertEqual(symbols[0], 1)
        np.testing.assert_array_equal(bits, [0])

    def test_small_perturbations_are_recovered(self):
        c = make_constellation(4)
        rng = Rng(12)
        radius = 0.499 * c.min_distance
        for index, point in enumerate(c.points):
            offsets = radius * np.sqrt(rng.uniform(200)) * np.exp(2j * np.pi * rng.uniform(200))
            recovered = c.nearest(point + offsets)
            self.assertTrue(np.all(recovered == index))


class ChannelTest(SimpleTestCase):
    def test_moments(self):
        entries = sample_channel(100000, 1, Rng(21)).ravel()
        self.assertLess(abs(np.mean(entries)), 0.02)
        power = np.mean(np.abs(entries) ** 2)
        self.assertTrue(0.98 <= power <= 1.02, power)
        self.assertAlmostEqual(np.var(entries.real), 0.5, delta=0.01)
        self.assertAlmostEqual(np.var(entries.imag), 0.5, delta=0.01)

    def test_distinct_positions_are_uncorrelated(self):
        h = sample_channel(100000, 2, Rng(22))
        correlation = np.mean(h[:, 0] * np.conj(h[:, 1]))
        self.assertLess(abs(correlation), 0.02)

    def test_same_seed_same_channel(self):
        np.testing.assert_array_equal(sample_channel(8, 4, Rng(5)), sample_channel(8, 4, Rng(5)))

    def test_spawned_streams_follow_seed_offsets(self):
        np.testing.assert_array_equal(Rng(40).spawn(2).uniform(4), Rng(42).uniform(4))


class NoiseVarianceTest(SimpleTestCase):
    def test_values(self):
        self.assertAlmostEqual(noise_variance(0, 4), 4.0)
        self.assertAlmostEqual(noise_variance(10, 1), 0.1)
        self.assertAlmostEqual(noise_variance(20, 4), 0.04)

    def test_strictly_decreasing(self):
        values = [noise_variance(snr, 4) for snr in np.arange(-10, 40, 0.5)]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])))


class RealizeTest(SimpleTestCase):
    cfg = SystemConfig(nt=4, nr=8, mod_order=4, snr_db=0.0)

    def test_noise_free(self):
        r = realize(self.cfg, make_constellation(4), Rng(1), noise_free=True)
        np.testing.assert_array_equal(r.y, r.H @ r.x)
        self.assertEqual(r.noise_var, 0.0)
        self.assertEqual(r.bits.size, 8)

    def test_power_accounting(self):
        c = make_constellation(4)
        rng = Rng(2)
        powers = [np.sum(np.abs(realize(self.cfg, c, rng).y) ** 2) for _ in range(10000)]
        expected = self.cfg.nr * (self.cfg.nt + noise_variance(0, self.cfg.nt))
        self.assertLess(abs(np.mean(powers) - expected) / expected, 0.05)

    def test_determinism(self):
        c = make_constellation(4)
        first = realize(self.cfg, c, Rng(3))
        second = realize(self.cfg, c, Rng(3))
        for name in ("H", "x", "bits", "y"):
            np.testing.assert_array_equal(getattr(first, name), getattr(second, name))

    def test_invalid_config(self):
        with self.assertRaises(ValueError):
            SystemConfig(nt=4, nr=2)
        with self.assertRaises(ValueError):
            SystemConfig(nt=0, nr=2)
        with self.assertRaises(ValueError):
            SystemConfig(nt=2, nr=2, mod_order=8)


class ErrorRateTest(SimpleTestCase):
    def test_identical(self):
        self.assertEqual(bit_error_rate([0, 1, 1], [0, 1, 1]), 0.0)

    def test_complemented(self):
        self.assertEqual(bit_error_rate([1, 0, 0, 1], [0, 1, 1, 0]), 1.0)

    def test_single_flip(self):
        bits = np.zeros(8, dtype=np.uint8)
        flipped = bits.copy()
        flipped[3] = 1
        self.assertEqual(bit_error_rate(flipped, bits), 0.125)

    def test_length_mismatch(self):
        with self.assertRaises(ValueError):
            bit_error_rate([0, 1], [0, 1, 1])

    def test_symbol_errors(self):
        self.assertEqual(count_symbol_errors([1, -1, 1], [1, 1, 1]), 1)
        self.assertAlmostEqual(symbol_error_rate([1, -1], [1, 1]), 0.5)
