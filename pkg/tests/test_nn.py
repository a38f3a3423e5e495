"""Neural-core tests: a scalar reference LSTM and finite differences are
the oracles for everything trainable."""
import math

import numpy as np
import pytest

from credo import nn


def scalar_reference_lstm(xs, w_x, w_h, bias):
    """Step-by-step scalar evaluation of the gate equations, no vector ops."""

    def sig(v):
        return 1.0 / (1.0 + math.exp(-v))

    steps = len(xs)
    hsz = w_h.shape[1]
    dsz = w_x.shape[1]
    h = [0.0] * hsz
    c = [0.0] * hsz
    out = []
    for t in range(steps):
        z = [0.0] * (4 * hsz)
        for r in range(4 * hsz):
            acc = bias[r]
            for k in range(dsz):
                acc += w_x[r][k] * xs[t][k]
            for k in range(hsz):
                acc += w_h[r][k] * h[k]
            z[r] = acc
        i = [sig(z[r]) for r in range(hsz)]
        f = [sig(z[hsz + r]) for r in range(hsz)]
        o = [sig(z[2 * hsz + r]) for r in range(hsz)]
        g = [math.tanh(z[3 * hsz + r]) for r in range(hsz)]
        c = [f[r] * c[r] + i[r] * g[r] for r in range(hsz)]
        h = [o[r] * math.tanh(c[r]) for r in range(hsz)]
        out.append(list(h))
    return np.array(out)


def random_params(rng, d=3, h=4):
    return nn.LSTMParams(
        rng.normal(0, 0.5, size=(4 * h, d)),
        rng.normal(0, 0.5, size=(4 * h, h)),
        rng.normal(0, 0.5, size=4 * h),
    )


class TestLstmStep:
    def test_all_zero(self):
        params = nn.LSTMParams(np.zeros((8, 2)), np.zeros((8, 2)), np.zeros(8))
        h, c = nn.lstm_step(np.zeros(2), np.zeros(2), np.zeros(2), params)
        np.testing.assert_array_equal(h, 0)
        np.testing.assert_array_equal(c, 0)

    def test_zero_cell_ignores_forget_gate(self, rng):
        params = random_params(rng)
        x = rng.normal(size=3)
        h, c = nn.lstm_step(x, np.zeros(4), np.zeros(4), params)
        # with c_prev = 0 the cell is i*g regardless of the forget gate
        hacked = nn.LSTMParams(params.w_x.copy(), params.w_h.copy(), params.bias.copy())
        hacked.bias[4:8] += 3.0  # shove the forget gate
        h2, c2 = nn.lstm_step(x, np.zeros(4), np.zeros(4), hacked)
        np.testing.assert_allclose(c, c2, atol=1e-12)

    def test_matches_scalar_reference(self, rng):
        for _ in range(5):
            params = random_params(rng)
            xs = rng.normal(size=(6, 3))
            hs, _ = nn.lstm_forward(xs, params)
            ref = scalar_reference_lstm(xs.tolist(), params.w_x, params.w_h, params.bias)
            np.testing.assert_allclose(hs, ref, atol=1e-12)

    def test_shape_mismatch_names_operand(self, rng):
        params = random_params(rng)
        with pytest.raises(nn.ShapeMismatchError, match="x_t"):
            nn.lstm_step(np.zeros(5), np.zeros(4), np.zeros(4), params)
        with pytest.raises(nn.ShapeMismatchError, match="h_prev"):
            nn.lstm_step(np.zeros(3), np.zeros(2), np.zeros(4), params)

    def test_hidden_states_bounded(self, rng):
        params = random_params(rng)
        xs = rng.normal(0, 3, size=(40, 3))
        hs, _ = nn.lstm_forward(xs, params)
        assert np.all(np.abs(hs) <= 1.0)


class TestBilstm:
    def test_length_one_reduces_to_steps(self, rng):
        fwd = random_params(rng)
        bwd = random_params(rng)
        x = rng.normal(size=(1, 3))
        vec = nn.bilstm_encode(x, fwd, bwd)
        hf, _ = nn.lstm_step(x[0], np.zeros(4), np.zeros(4), fwd)
        hb, _ = nn.lstm_step(x[0], np.zeros(4), np.zeros(4), bwd)
        np.testing.assert_allclose(vec, np.concatenate([hf, hb]), atol=1e-15)

    def test_palindrome_with_shared_params(self, rng):
        params = random_params(rng)
        seq = rng.normal(size=(3, 3))
        pal = np.vstack([seq, seq[::-1][1:]])
        vec = nn.bilstm_encode(pal, params, params)
        h = params.hidden_size
        np.testing.assert_allclose(vec[:h], vec[h:], atol=1e-12)

    def test_empty_sequence_error(self, rng):
        with pytest.raises(nn.EmptySequenceError):
            nn.bilstm_encode(np.zeros((0, 3)), random_params(rng), random_params(rng))

    def test_matches_reference(self, rng):
        fwd = random_params(rng)
        bwd = random_params(rng)
        xs = rng.normal(size=(5, 3))
        vec = nn.bilstm_encode(xs, fwd, bwd)
        ref_f = scalar_reference_lstm(xs.tolist(), fwd.w_x, fwd.w_h, fwd.bias)[-1]
        ref_b = scalar_reference_lstm(xs[::-1].tolist(), bwd.w_x, bwd.w_h, bwd.bias)[-1]
        np.testing.assert_allclose(vec, np.concatenate([ref_f, ref_b]), atol=1e-12)


class TestMeanPool:
    def test_single_step_identity(self):
        v = np.array([[1.0, 2.0, 3.0]])
        np.testing.assert_array_equal(nn.mean_pool(v), v[0])

    def test_opposites_cancel(self):
        v = np.array([1.0, -2.0, 0.5])
        np.testing.assert_allclose(nn.mean_pool(np.vstack([v, -v])), 0.0, atol=1e-15)

    def test_unit_basis(self):
        np.testing.assert_allclose(nn.mean_pool(np.eye(3)), [1 / 3, 1 / 3, 1 / 3])

    def test_empty_error(self):
        with pytest.raises(nn.EmptySequenceError):
            nn.mean_pool(np.zeros((0, 3)))


class TestOptimizers:
    def test_zero_gradient_no_change(self):
        params = {"w": np.array([1.0, 2.0])}
        state = nn.AdamState.for_params(params, 0.1)
        nn.adam_step(params, {"w": np.zeros(2)}, state)
        np.testing.assert_array_equal(params["w"], [1.0, 2.0])
        nn.sgd_step(params, {"w": np.zeros(2)}, 0.1)
        np.testing.assert_array_equal(params["w"], [1.0, 2.0])

    def test_sgd_definition(self):
        params = {"w": np.array([0.0])}
        nn.sgd_step(params, {"w": np.array([1.0])}, 0.1)
        assert params["w"][0] == pytest.approx(-0.1)

    def test_adam_first_step_magnitude(self):
        # bias-corrected moments cancel on the first step: |delta| ~ lr
        for g in (0.3, -2.0, 100.0):
            params = {"w": np.array([0.0])}
            state = nn.AdamState.for_params(params, 0.01)
            nn.adam_step(params, {"w": np.array([g])}, state)
            assert abs(params["w"][0]) == pytest.approx(0.01, rel=1e-6)
            assert np.sign(params["w"][0]) == -np.sign(g)

    def test_clip_global_norm(self):
        grads = {"a": np.array([3.0]), "b": np.array([4.0])}
        clipped = nn.clip_global_norm(grads, 1.0)
        assert nn.global_norm(clipped) == pytest.approx(1.0)
        untouched = nn.clip_global_norm(grads, 10.0)
        assert untouched is grads


class TestGradCheck:
    def test_quadratic(self):
        def loss(p):
            x = p["x"][0]
            return x * x, {"x": np.array([2 * x])}

        err = nn.grad_check(loss, {"x": np.array([3.0])})
        assert err < 1e-8

    def test_detects_wrong_gradient(self):
        def loss(p):
            x = p["x"][0]
            return x * x, {"x": np.array([2 * x + 0.5])}

        assert nn.grad_check(loss, {"x": np.array([3.0])}) > 1e-2

    def test_lstm_pool_logistic_loss(self, rng):
        d, h, steps = 3, 4, 3
        xs = rng.normal(size=(steps, d))
        params = {
            "w_x": rng.normal(0, 0.4, size=(4 * h, d)),
            "w_h": rng.normal(0, 0.4, size=(4 * h, h)),
            "bias": rng.normal(0, 0.4, size=4 * h),
            "head": rng.normal(size=h),
        }

        def loss(p):
            lstm = nn.LSTMParams(p["w_x"], p["w_h"], p["bias"])
            hs, cache = nn.lstm_forward(xs, lstm)
            pooled = nn.mean_pool(hs)
            logit = float(p["head"] @ pooled)
            prob = float(nn.sigmoid(logit))
            target = 1.0
            value = -math.log(prob)
            dlogit = prob - target
            dpooled = dlogit * p["head"]
            dhs = np.tile(dpooled / steps, (steps, 1))
            lstm_grads, _ = nn.lstm_backward(dhs, cache, lstm)
            return value, {
                "w_x": lstm_grads["w_x"],
                "w_h": lstm_grads["w_h"],
                "bias": lstm_grads["bias"],
                "head": dlogit * pooled,
            }

        assert nn.grad_check(loss, params) < 1e-4

    def test_nonfinite_loss_raises(self):
        def loss(p):
            return float("nan"), {"x": np.zeros(1)}

        with pytest.raises(nn.NonFiniteLossError):
            nn.grad_check(loss, {"x": np.zeros(1)})


class TestDeterminismAndCheckpoints:
    def test_forward_bit_identical(self, rng):
        params = random_params(rng)
        xs = rng.normal(size=(7, 3))
        a, _ = nn.lstm_forward(xs, params)
        b, _ = nn.lstm_forward(xs.copy(), params)
        assert np.array_equal(a, b)

    def test_checkpoint_round_trip(self, tmp_path, rng):
        params = {
            "alpha": rng.normal(size=(3, 2)),
            "beta": rng.normal(size=5),
        }
        meta = {"kind": "test", "seed": 3, "note": "header"}
        path = tmp_path / "model.ckpt"
        nn.save_checkpoint(path, params, meta)
        loaded, loaded_meta = nn.load_checkpoint(path)
        assert loaded_meta == meta
        for name in params:
            np.testing.assert_array_equal(loaded[name], params[name])

    def test_checkpoint_is_byte_stable(self, tmp_path, rng):
        params = {"w": rng.normal(size=(4, 4))}
        p1 = tmp_path / "a.ckpt"
        p2 = tmp_path / "b.ckpt"
        nn.save_checkpoint(p1, params, {"seed": 1})
        nn.save_checkpoint(p2, params, {"seed": 1})
        assert p1.read_bytes() == p2.read_bytes()
