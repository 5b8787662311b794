import json
import os
import tempfile
from io import StringIO

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag

from cplx import DimensionError, gram, spectral_bound
from dpst.network import (
    LossMode,
    active_layers,
    detect_dpst,
    dpst_backward,
    dpst_forward,
    objective,
    shrink,
    wirtinger_grad,
)
from dpst.params import DpstParams, ParamsFileError, init_params, load_params, save_params
from dpst.training import Adam, DpstTrainer, TrainConfig, TrainingDivergedError, train
from sysmodel import Rng, SystemConfig, make_constellation

QPSK = make_constellation(4)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_instance(rng, nr=8, nt=4):
    H = random_complex(rng, nr, nt) / np.sqrt(2)
    x_true = QPSK.points[rng.integers(0, 4, nt)]
    y = H @ x_true + 0.3 * random_complex(rng, nr)
    return H, y, x_true


def random_params(rng, T, p, nt=4, nr=8):
    signs = rng.choice([-1.0, 1.0], T)
    return DpstParams(
        T=T,
        p=p,
        gamma=rng.uniform(0.02, 0.06, T),
        theta=signs * rng.uniform(0.5, 1.5, T),
        nt=nt,
        nr=nr,
        mod_order=4,
    )


def loss_of(params, H, y, x_true, loss_mode=LossMode.SUPERVISED):
    traj = dpst_forward(H, y, params)
    loss, _ = dpst_backward(traj, H, y, x_true, params, loss_mode)
    return float(loss)


def finite_difference_grads(params, H, y, x_true, loss_mode=LossMode.SUPERVISED):
    grads = {}
    for name in ("gamma", "theta"):
        values = getattr(params, name)
        column = np.zeros(params.T)
        for t in range(params.T):
            h = 1e-5 * max(1.0, abs(values[t]))
            plus, minus = values.copy(), values.copy()
            plus[t] += h
            minus[t] -= h
            loss_plus = loss_of(_replace(params, name, plus), H, y, x_true, loss_mode)
            loss_minus = loss_of(_replace(params, name, minus), H, y, x_true, loss_mode)
            column[t] = (loss_plus - loss_minus) / (2 * h)
        grads[name] = column
    return grads["gamma"], grads["theta"]


def _replace(params, name, values):
    if name == "gamma":
        return params.with_values(values, params.theta)
    return params.with_values(params.gamma, values)


class GradientCheckMixin:
    def assertGradientsMatch(self, params, H, y, x_true, loss_mode=LossMode.SUPERVISED):
        traj = dpst_forward(H, y, params)
        _, grads = dpst_backward(traj, H, y, x_true, params, loss_mode)
        fd_gamma, fd_theta = finite_difference_grads(params, H, y, x_true, loss_mode)
        for analytic, numeric in ((grads.d_gamma, fd_gamma), (grads.d_theta, fd_theta)):
            tolerance = 1e-5 * np.abs(numeric) + 1e-9
            self.assertTrue(
                np.all(np.abs(analytic - numeric) <= tolerance),
                f"analytic {analytic} vs finite differences {numeric}",
            )


class ObjectiveTest(SimpleTestCase):
    def test_exact_fit(self):
        rng = np.random.default_rng(1)
        H = random_complex(rng, 8, 4)
        x = random_complex(rng, 4)
        self.assertEqual(objective(H, x, H @ x), 0.0)

    def test_identity(self):
        value = objective(np.eye(2, dtype=complex), np.zeros(2, dtype=complex), np.array([3, 4j]))
        self.assertEqual(value, 25.0)

    def test_against_entrywise_sum(self):
        rng = np.random.default_rng(2)
        H = random_complex(rng, 8, 4)
        x = random_complex(rng, 4)
        y = random_complex(rng, 8)
        expected = 0.0
        for i in range(8):
            entry = sum(H[i, j] * x[j] for j in range(4)) - y[i]
            expected += abs(entry) ** 2
        self.assertLess(abs(objective(H, x, y) - expected), 1e-12)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            objective(np.ones((3, 2), dtype=complex), np.ones(3, dtype=complex), np.ones(3, dtype=complex))


class WirtingerGradTest(SimpleTestCase):
    def test_vanishes_at_fit(self):
        rng = np.random.default_rng(3)
        H = random_complex(rng, 8, 4)
        x = random_complex(rng, 4)
        np.testing.assert_allclose(wirtinger_grad(H, x, H @ x), 0, atol=1e-12)

    def test_scalar(self):
        grad = wirtinger_grad(np.array([[1 + 0j]]), np.array([0j]), np.array([2 + 0j]))
        self.assertEqual(grad[0], -2)

    def test_directional_derivative(self):
        rng = np.random.default_rng(4)
        h = 1e-6
        for _ in range(100):
            H = random_complex(rng, 8, 4)
            x = random_complex(rng, 4)
            y = random_complex(rng, 8)
            d = random_complex(rng, 4)
            numeric = (objective(H, x + h * d, y) - objective(H, x - h * d, y)) / (2 * h)
            analytic = 2 * np.real(np.vdot(d, wirtinger_grad(H, x, y)))
            self.assertLess(abs(numeric - analytic) / abs(analytic), 1e-6)

    def test_half_of_real_gradient(self):
        rng = np.random.default_rng(5)
        h = 1e-6
        for _ in range(20):
            H = random_complex(rng, 8, 4)
            x = random_complex(rng, 4)
            y = random_complex(rng, 8)
            real_grad = np.zeros(4, dtype=complex)
            for i in range(4):
                for unit in (1.0, 1j):
                    step = np.zeros(4, dtype=complex)
                    step[i] = unit * h
                    slope = (objective(H, x + step, y) - objective(H, x - step, y)) / (2 * h)
                    real_grad[i] += unit * slope
            grad = wirtinger_grad(H, x, y)
            self.assertLess(np.linalg.norm(real_grad / 2 - grad) / np.linalg.norm(grad), 1e-7)

    def test_batched_matches_single(self):
        rng = np.random.default_rng(6)
        H = random_complex(rng, 3, 8, 4)
        x = random_complex(rng, 3, 4)
        y = random_complex(rng, 3, 8)
        batched = wirtinger_grad(H, x, y)
        for k in range(3):
            np.testing.assert_allclose(batched[k], wirtinger_grad(H[k], x[k], y[k]), atol=1e-12)


class ShrinkTest(SimpleTestCase):
    def test_zero_input(self):
        np.testing.assert_array_equal(shrink(np.zeros(3, dtype=complex), 2.5), 0)

    def test_zero_scale(self):
        np.testing.assert_array_equal(shrink(np.array([1 + 2j, -3j]), 0.0), 0)

    def test_saturation_uses_magnitude(self):
        result = shrink(np.array([100 + 100j]), -2.0)
        self.assertLess(abs(result[0] - (2 + 2j)), 1e-8)

    def test_output_bound(self):
        rng = np.random.default_rng(7)
        v = 10 * random_complex(rng, 500)
        for theta in (-3.0, -0.2, 0.7, 4.0):
            result = shrink(v, theta)
            self.assertTrue(np.all(np.abs(result.real) <= abs(theta)))
            self.assertTrue(np.all(np.abs(result.imag) <= abs(theta)))


class ActiveLayersTest(SimpleTestCase):
    def test_half(self):
        self.assertEqual(active_layers(0.5, 10), [5, 6, 7, 8, 9, 10])

    def test_last_layer_always_shrinks(self):
        self.assertEqual(active_layers(1.0, 50), [50])

    def test_schedule_grid(self):
        rng = np.random.default_rng(8)
        H, y, _ = random_instance(rng)
        for p in np.round(np.arange(0.1, 1.0, 0.1), 1):
            for T in range(1, 101):
                expected = {t for t in range(1, T + 1) if t >= p * T}
                self.assertEqual(set(active_layers(p, T)), expected)
                if T in (1, 7, 30, 100):
                    traj = dpst_forward(H, y, init_params(T, p, 4, 8, 4))
                    flagged = {t for t, active in enumerate(traj.active, start=1) if active}
                    self.assertEqual(flagged, expected)


class ForwardTest(SimpleTestCase):
    def test_zero_steps_freeze_the_state(self):
        rng = np.random.default_rng(9)
        H, y, _ = random_instance(rng)
        params = init_params(6, 0.5, 4, 8, 4).with_values(np.zeros(6), np.ones(6))
        traj = dpst_forward(H, y, params)
        for state in traj.states:
            np.testing.assert_array_equal(state, 0)

    def test_single_layer_closed_form(self):
        y = np.array([0.4 - 1.2j])
        params = DpstParams(T=1, p=1.0, gamma=[1.0], theta=[0.8], nt=1, nr=1, mod_order=4)
        traj = dpst_forward(np.array([[1 + 0j]]), y, params)
        np.testing.assert_allclose(traj.pre_shrink[0], y)
        np.testing.assert_allclose(traj.states[1], shrink(y, 0.8))

    def test_trajectory_lengths(self):
        rng = np.random.default_rng(10)
        H, y, _ = random_instance(rng)
        traj = dpst_forward(H, y, init_params(12, 0.5, 4, 8, 4))
        self.assertEqual(len(traj.states), 13)
        self.assertEqual(len(traj.pre_shrink), 12)
        np.testing.assert_array_equal(traj.states[0], 0)

    def test_shape_mismatch(self):
        rng = np.random.default_rng(11)
        H, y, _ = random_instance(rng)
        with self.assertRaises(DimensionError):
            dpst_forward(H, y, init_params(4, 0.5, 2, 8, 4))

    def test_monotone_descent_without_shrinkage(self):
        rng = np.random.default_rng(12)
        T = 50
        for _ in range(100):
            H, y, _ = random_instance(rng)
            step = 0.9 / spectral_bound(gram(H), 100, 0)
            params = init_params(T, 1.0, 4, 8, 4).with_values(np.full(T, step), np.ones(T))
            traj = dpst_forward(H, y, params, shrinkage=False)
            values = [objective(H, state, y) for state in traj.states]
            for before, after in zip(values, values[1:]):
                self.assertLessEqual(after, before + 1e-12)

    def test_noise_free_detection(self):
        rng = np.random.default_rng(13)
        H = random_complex(rng, 8, 4) / np.sqrt(2)
        x_true = QPSK.points[[0, 1, 2, 3]]
        step = 1.0 / spectral_bound(gram(H), 100, 0)
        params = init_params(200, 1.0, 4, 8, 4).with_values(np.full(200, step), np.ones(200))
        result = detect_dpst(H, H @ x_true, params, QPSK)
        np.testing.assert_array_equal(result.indices, [0, 1, 2, 3])

    def test_layers_follow_the_gradient_recurrence(self):
        rng = np.random.default_rng(14)
        H, y, _ = random_instance(rng)
        params = random_params(rng, 10, 0.4)
        traj = dpst_forward(H, y, params)
        x = np.zeros(4, dtype=complex)
        for layer in range(params.T):
            u = x - params.gamma[layer] * wirtinger_grad(H, x, y)
            x = shrink(u, params.theta[layer]) if traj.active[layer] else u
            np.testing.assert_allclose(traj.states[layer + 1], x, atol=1e-12)

    def test_batched_detection_matches_single(self):
        rng = np.random.default_rng(15)
        params = random_params(rng, 8, 0.5)
        instances = [random_instance(rng) for _ in range(5)]
        H = np.stack([h for h, _, _ in instances])
        y = np.stack([v for _, v, _ in instances])
        batched = detect_dpst(H, y, params, QPSK)
        self.assertEqual(batched.indices.shape, (5, 4))
        for k in range(5):
            single = detect_dpst(H[k], y[k], params, QPSK)
            np.testing.assert_array_equal(batched.indices[k], single.indices)

    def test_rejects_nan_input(self):
        rng = np.random.default_rng(16)
        H, y, _ = random_instance(rng)
        params = init_params(4, 0.5, 4, 8, 4)
        y[0] = np.nan
        with self.assertRaises(ValueError):
            detect_dpst(H, y, params, QPSK)
        with self.assertRaises(ValueError):
            dpst_forward(np.full((8, 4), np.inf + 0j), np.ones(8, dtype=complex), params)

    def test_receive_length_mismatch(self):
        H = np.eye(8, 4, dtype=complex)
        with self.assertRaises(DimensionError):
            dpst_forward(H, np.ones(6, dtype=complex), init_params(4, 0.5, 4, 8, 4))


class BackwardTest(GradientCheckMixin, SimpleTestCase):
    def test_single_layer_scalar_closed_form(self):
        gamma, theta = 0.7, -1.3
        y = np.array([0.9 - 0.4j])
        x_true = np.array([0.5 + 0.5j])
        params = DpstParams(T=1, p=1.0, gamma=[gamma], theta=[theta], nt=1, nr=1, mod_order=4)
        H = np.array([[1 + 0j]])
        traj = dpst_forward(H, y, params)
        loss, grads = dpst_backward(traj, H, y, x_true, params)

        a, b = gamma * y.real[0], gamma * y.imag[0]
        x_re, x_im = abs(theta) * np.tanh(a), abs(theta) * np.tanh(b)
        e_re, e_im = x_re - x_true.real[0], x_im - x_true.imag[0]
        expected_loss = e_re**2 + e_im**2
        expected_gamma = 2 * abs(theta) * (
            e_re * (1 - np.tanh(a) ** 2) * y.real[0] + e_im * (1 - np.tanh(b) ** 2) * y.imag[0]
        )
        expected_theta = 2 * np.sign(theta) * (e_re * np.tanh(a) + e_im * np.tanh(b))

        self.assertAlmostEqual(float(loss), expected_loss, delta=1e-12)
        self.assertAlmostEqual(grads.d_gamma[0], expected_gamma, delta=1e-10)
        self.assertAlmostEqual(grads.d_theta[0], expected_theta, delta=1e-10)

    def test_zero_steps_against_finite_differences(self):
        rng = np.random.default_rng(14)
        H, y, x_true = random_instance(rng)
        params = random_params(rng, 6, 0.5).with_values(np.zeros(6), rng.uniform(0.5, 1.5, 6))
        self.assertGradientsMatch(params, H, y, x_true)

    def test_depths_against_finite_differences(self):
        rng = np.random.default_rng(15)
        for T in (1, 5, 10):
            for _ in range(5):
                H, y, x_true = random_instance(rng)
                self.assertGradientsMatch(random_params(rng, T, 0.5), H, y, x_true)

    def test_reference_configuration(self):
        rng = np.random.default_rng(16)
        for _ in range(20):
            H, y, x_true = random_instance(rng)
            self.assertGradientsMatch(random_params(rng, 10, 0.5), H, y, x_true)

    def test_residual_loss(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            H, y, x_true = random_instance(rng)
            params = random_params(rng, 8, 0.3)
            self.assertGradientsMatch(params, H, y, x_true, LossMode.RESIDUAL)

    def test_inactive_layers_get_no_theta_gradient(self):
        rng = np.random.default_rng(18)
        H, y, x_true = random_instance(rng)
        params = random_params(rng, 10, 0.5)
        traj = dpst_forward(H, y, params)
        _, grads = dpst_backward(traj, H, y, x_true, params)
        np.testing.assert_array_equal(grads.d_theta[:4], 0)

    def test_batched_matches_single(self):
        rng = np.random.default_rng(19)
        instances = [random_instance(rng) for _ in range(3)]
        H, y, x_true = (np.stack(column) for column in zip(*instances))
        params = random_params(rng, 7, 0.5)
        loss, grads = dpst_backward(dpst_forward(H, y, params), H, y, x_true, params)
        for k in range(3):
            single_loss, single = dpst_backward(
                dpst_forward(H[k], y[k], params), H[k], y[k], x_true[k], params
            )
            self.assertAlmostEqual(loss[k], single_loss, delta=1e-12)
            np.testing.assert_allclose(grads.d_gamma[k], single.d_gamma, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(grads.d_theta[k], single.d_theta, rtol=1e-12, atol=1e-12)

    def test_mismatched_trajectory(self):
        rng = np.random.default_rng(20)
        H, y, x_true = random_instance(rng)
        traj = dpst_forward(H, y, init_params(5, 0.5, 4, 8, 4))
        with self.assertRaises(ValueError):
            dpst_backward(traj, H, y, x_true, init_params(6, 0.5, 4, 8, 4))


class AdamTest(SimpleTestCase):
    def test_first_step_moves_by_learning_rate(self):
        optimizer = Adam(3, lr=0.01)
        updated = optimizer.step(np.zeros(3), np.array([2.0, -0.5, 1e-3]))
        np.testing.assert_allclose(updated, [-0.01, 0.01, -0.01], rtol=1e-4)

    def test_negative_learning_rate(self):
        with self.assertRaises(ValueError):
            Adam(2, lr=-1.0)


class TrainingTest(SimpleTestCase):
    shape = SystemConfig(nt=4, nr=8, mod_order=4)

    def test_zero_learning_rate_keeps_initialization(self):
        cfg = TrainConfig(layers=5, batch_size=4, steps=10, learning_rate=0.0)
        params = train(cfg, self.shape, QPSK, Rng(1))
        self.assertEqual(params, init_params(5, 0.5, 4, 8, 4))

    def test_same_seed_same_params(self):
        cfg = TrainConfig(layers=5, batch_size=6, steps=20)
        first = train(cfg, self.shape, QPSK, Rng(2))
        second = train(cfg, self.shape, QPSK, Rng(2))
        self.assertEqual(first, second)

    def test_worker_count_does_not_change_results(self):
        base = dict(layers=5, batch_size=7, steps=15, seed=3)
        single = train(TrainConfig(workers=1, **base), self.shape, QPSK, Rng(3))
        pooled = train(TrainConfig(workers=3, **base), self.shape, QPSK, Rng(3))
        np.testing.assert_array_equal(single.gamma, pooled.gamma)
        np.testing.assert_array_equal(single.theta, pooled.theta)

    def test_history_is_recorded(self):
        trainer = DpstTrainer(TrainConfig(layers=3, batch_size=2, steps=4), self.shape, QPSK, Rng(4))
        trainer.run()
        self.assertEqual([step for step, _ in trainer.history], [1, 2, 3, 4])

    def test_divergence_names_the_step(self):
        cfg = TrainConfig(layers=6, p=1.0, batch_size=2, steps=3)
        huge = DpstParams(T=6, p=1.0, gamma=np.full(6, 1e200), theta=np.ones(6), nt=4, nr=8, mod_order=4)
        trainer = DpstTrainer(cfg, self.shape, QPSK, Rng(5), initial=huge)
        with self.assertRaises(TrainingDivergedError) as raised:
            trainer.run()
        self.assertEqual(raised.exception.step, 1)
        self.assertIn("step 1", str(raised.exception))

    def test_invalid_config(self):
        with self.assertRaises(ValueError):
            TrainConfig(layers=0)
        with self.assertRaises(ValueError):
            TrainConfig(layers=3, learning_rate=-1e-3)

    @tag("slow")
    def test_smoke_training_reduces_loss(self):
        cfg = TrainConfig(layers=10, batch_size=24, steps=200, learning_rate=1e-3, seed=0)
        trainer = DpstTrainer(cfg, self.shape, QPSK, Rng(cfg.seed))
        trainer.run()
        losses = [loss for _, loss in trainer.history]
        self.assertLess(losses[-1], losses[0])
        self.assertLess(np.mean(losses[-20:]), np.mean(losses[:20]))


class ParamsFileTest(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.directory.name, "params.json")

    def tearDown(self):
        self.directory.cleanup()

    def write(self, document):
        with open(self.path, "w") as handle:
            json.dump(document, handle)

    def valid_document(self):
        return init_params(3, 0.5, 4, 8, 4).to_document()

    def test_round_trip_is_bit_exact(self):
        rng = np.random.default_rng(21)
        params = random_params(rng, 9, 0.35)
        save_params(params, self.path)
        loaded = load_params(self.path)
        self.assertEqual(loaded, params)
        self.assertEqual(loaded.gamma.tobytes(), params.gamma.tobytes())
        self.assertEqual(loaded.theta.tobytes(), params.theta.tobytes())

    def test_document_fields(self):
        save_params(init_params(2, 0.5, 4, 8, 4), self.path)
        with open(self.path) as handle:
            document = json.load(handle)
        self.assertEqual(
            set(document), {"version", "T", "p", "nt", "nr", "mod_order", "gamma", "theta"}
        )
        self.assertEqual(document["version"], 1)

    def test_gamma_length_mismatch(self):
        document = self.valid_document()
        document["gamma"] = [0.1, 0.2]
        self.write(document)
        with self.assertRaises(ParamsFileError) as raised:
            load_params(self.path)
        self.assertIn("gamma", raised.exception.errors)

    def test_unknown_version(self):
        document = self.valid_document()
        document["version"] = 999
        self.write(document)
        with self.assertRaises(ParamsFileError) as raised:
            load_params(self.path)
        self.assertIn("version", raised.exception.errors)
        self.assertIn("999", str(raised.exception))

    def test_missing_field(self):
        document = self.valid_document()
        del document["theta"]
        self.write(document)
        with self.assertRaises(ParamsFileError) as raised:
            load_params(self.path)
        self.assertIn("theta", raised.exception.errors)

    def test_p_out_of_range(self):
        document = self.valid_document()
        document["p"] = 1.5
        self.write(document)
        with self.assertRaises(ParamsFileError) as raised:
            load_params(self.path)
        self.assertIn("p", raised.exception.errors)

    def test_malformed_json(self):
        with open(self.path, "w") as handle:
            handle.write("{not json")
        with self.assertRaises(ParamsFileError) as raised:
            load_params(self.path)
        self.assertIn("document", raised.exception.errors)

    def test_not_utf8(self):
        with open(self.path, "wb") as handle:
            handle.write(b'{"version": 1, "T": 3, "note": "\xe9t\xe9"}')
        with self.assertRaises(ParamsFileError) as raised:
            load_params(self.path)
        self.assertIn("document", raised.exception.errors)
        self.assertIn("UTF-8", str(raised.exception))

    def test_numbers_given_as_strings(self):
        for field, value in (("p", "0.5"), ("T", "3"), ("nt", "4"), ("mod_order", "4")):
            document = self.valid_document()
            document[field] = value
            self.write(document)
            with self.assertRaises(ParamsFileError, msg=field) as raised:
                load_params(self.path)
            self.assertIn(field, raised.exception.errors)

    def test_list_entries_given_as_strings(self):
        document = self.valid_document()
        document["gamma"] = ["0.1"] * 3
        self.write(document)
        with self.assertRaises(ParamsFileError) as raised:
            load_params(self.path)
        self.assertIn("gamma", raised.exception.errors)

    def test_booleans_are_not_numbers(self):
        document = self.valid_document()
        document["theta"] = [True, 1.0, 1.0]
        document["version"] = True
        self.write(document)
        with self.assertRaises(ParamsFileError) as raised:
            load_params(self.path)
        self.assertEqual(set(raised.exception.errors), {"theta", "version"})

    def test_integer_fields_reject_fractions(self):
        document = self.valid_document()
        document["T"] = 3.0
        self.write(document)
        with self.assertRaises(ParamsFileError) as raised:
            load_params(self.path)
        self.assertIn("T", raised.exception.errors)

    def test_unsupported_modulation_order(self):
        document = self.valid_document()
        document["mod_order"] = 8
        self.write(document)
        with self.assertRaises(ParamsFileError) as raised:
            load_params(self.path)
        self.assertIn("mod_order", raised.exception.errors)

    def test_integral_numbers_are_accepted_for_reals(self):
        document = self.valid_document()
        document["p"] = 1
        document["theta"] = [1, 1, 1]
        self.write(document)
        params = load_params(self.path)
        self.assertEqual(params.p, 1.0)
        np.testing.assert_array_equal(params.theta, 1.0)


class TrainCommandTest(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def run_train(self, out, **options):
        stdout = StringIO()
        call_command("train", out=out, verbosity=0, stdout=stdout, **options)
        return stdout.getvalue()

    def test_missing_layers(self):
        with self.assertRaises(CommandError):
            self.run_train(os.path.join(self.directory.name, "x.json"), steps=1)

    def test_single_step_writes_loadable_file(self):
        out = os.path.join(self.directory.name, "t4.json")
        output = self.run_train(out, layers=4, steps=1, batch=3, workers=1)
        self.assertIn("final mean loss", output)
        params = load_params(out)
        self.assertEqual((params.T, params.nt, params.nr, params.mod_order), (4, 4, 8, 4))

    def test_identical_flags_give_identical_files(self):
        first = os.path.join(self.directory.name, "a.json")
        second = os.path.join(self.directory.name, "b.json")
        options = dict(layers=3, steps=5, batch=4, seed=7, snr_set=[5.0, 15.0])
        self.run_train(first, workers=1, **options)
        self.run_train(second, workers=2, **options)
        with open(first, "rb") as a, open(second, "rb") as b:
            self.assertEqual(a.read(), b.read())

    def test_invalid_value_is_a_usage_error(self):
        with self.assertRaises(CommandError) as raised:
            self.run_train(os.path.join(self.directory.name, "x.json"), layers=3, p=1.5)
        self.assertEqual(raised.exception.returncode, 1)
        self.assertIn("--p", str(raised.exception))

    def test_non_finite_learning_rate_is_a_usage_error(self):
        for lr in (float("nan"), float("inf")):
            with self.assertRaises(CommandError, msg=str(lr)) as raised:
                self.run_train(os.path.join(self.directory.name, "x.json"), layers=3, steps=1, lr=lr)
            self.assertEqual(raised.exception.returncode, 1)
            self.assertIn("--lr", str(raised.exception))

    def test_help_lists_defaults(self):
        from dpst.management.commands.train import Command

        help_text = Command().create_parser("manage.py", "train").format_help()
        for flag in ("--nt", "--nr", "--mod-order", "--layers", "--p", "--batch", "--steps",
                     "--lr", "--snr-set", "--loss", "--seed", "--out"):
            self.assertIn(flag, help_text)
        for default in ("24", "10000", "0.001", "supervised"):
            self.assertIn(default, help_text)
