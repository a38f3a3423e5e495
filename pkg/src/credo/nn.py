"""Dense float64 numerics shared by the two recurrent models.

Single-layer LSTM forward and backward passes, a bidirectional wrapper,
mean pooling, optimizers, finite-difference gradient checking, and a small
binary checkpoint format (JSON header + raw little-endian float64 blocks).

Gate layout in the stacked parameter matrices is input, forget, output,
candidate.  Everything runs in double precision; these models are tiny and
numeric debuggability beats speed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np


class ShapeMismatchError(ValueError):
    pass


class EmptySequenceError(ValueError):
    pass


class NonFiniteLossError(FloatingPointError):
    pass


class TrainingDataError(ValueError):
    """Raised when a training set cannot support the requested fit."""


def sigmoid(x: np.ndarray | float) -> np.ndarray:
    z = np.clip(np.asarray(x, dtype=float), -500.0, 500.0)
    positive = z >= 0
    out = np.empty_like(z)
    out[positive] = 1.0 / (1.0 + np.exp(-z[positive]))
    exp_z = np.exp(z[~positive])
    out[~positive] = exp_z / (1.0 + exp_z)
    return out


def _expect_shape(name: str, arr: np.ndarray, shape: tuple[int, ...]) -> None:
    if arr.shape != shape:
        raise ShapeMismatchError(f"{name}: expected shape {shape}, got {arr.shape}")


@dataclass
class LSTMParams:
    w_x: np.ndarray  # (4H, D)
    w_h: np.ndarray  # (4H, H)
    bias: np.ndarray  # (4H,)

    @property
    def hidden_size(self) -> int:
        return int(self.w_h.shape[1])

    @property
    def input_size(self) -> int:
        return int(self.w_x.shape[1])


def init_lstm_params(input_size: int, hidden_size: int, rng: np.random.Generator) -> LSTMParams:
    """Uniform +-1/sqrt(H) init; forget-gate bias pinned at 1.0."""
    scale = 1.0 / np.sqrt(hidden_size)
    w_x = rng.uniform(-scale, scale, size=(4 * hidden_size, input_size))
    w_h = rng.uniform(-scale, scale, size=(4 * hidden_size, hidden_size))
    bias = np.zeros(4 * hidden_size)
    bias[hidden_size : 2 * hidden_size] = 1.0
    return LSTMParams(w_x, w_h, bias)


def lstm_step(
    x_t: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray, params: LSTMParams
) -> tuple[np.ndarray, np.ndarray]:
    h = params.hidden_size
    _expect_shape("x_t", np.asarray(x_t), (params.input_size,))
    _expect_shape("h_prev", np.asarray(h_prev), (h,))
    _expect_shape("c_prev", np.asarray(c_prev), (h,))
    z = params.w_x @ x_t + params.w_h @ h_prev + params.bias
    i = sigmoid(z[:h])
    f = sigmoid(z[h : 2 * h])
    o = sigmoid(z[2 * h : 3 * h])
    g = np.tanh(z[3 * h :])
    c_t = f * c_prev + i * g
    h_t = o * np.tanh(c_t)
    return h_t, c_t


@dataclass
class LstmCache:
    xs: np.ndarray  # (T, D)
    i: np.ndarray
    f: np.ndarray
    o: np.ndarray
    g: np.ndarray
    c: np.ndarray
    tanh_c: np.ndarray
    h: np.ndarray  # (T, H)


def lstm_forward(xs: np.ndarray, params: LSTMParams) -> tuple[np.ndarray, LstmCache]:
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[0] == 0:
        raise EmptySequenceError("lstm_forward needs a non-empty (T, D) input")
    if xs.shape[1] != params.input_size:
        raise ShapeMismatchError(
            f"xs: expected input width {params.input_size}, got {xs.shape[1]}"
        )
    steps, h = xs.shape[0], params.hidden_size
    cache = LstmCache(
        xs=xs,
        i=np.zeros((steps, h)),
        f=np.zeros((steps, h)),
        o=np.zeros((steps, h)),
        g=np.zeros((steps, h)),
        c=np.zeros((steps, h)),
        tanh_c=np.zeros((steps, h)),
        h=np.zeros((steps, h)),
    )
    h_prev = np.zeros(h)
    c_prev = np.zeros(h)
    for t in range(steps):
        z = params.w_x @ xs[t] + params.w_h @ h_prev + params.bias
        cache.i[t] = sigmoid(z[:h])
        cache.f[t] = sigmoid(z[h : 2 * h])
        cache.o[t] = sigmoid(z[2 * h : 3 * h])
        cache.g[t] = np.tanh(z[3 * h :])
        c_prev = cache.f[t] * c_prev + cache.i[t] * cache.g[t]
        cache.c[t] = c_prev
        cache.tanh_c[t] = np.tanh(c_prev)
        h_prev = cache.o[t] * cache.tanh_c[t]
        cache.h[t] = h_prev
    return cache.h, cache


def lstm_backward(
    dhs: np.ndarray, cache: LstmCache, params: LSTMParams
) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Backpropagation through time given per-step gradients on h."""
    steps, h = cache.h.shape
    grads = {
        "w_x": np.zeros_like(params.w_x),
        "w_h": np.zeros_like(params.w_h),
        "bias": np.zeros_like(params.bias),
    }
    dxs = np.zeros_like(cache.xs)
    dh_next = np.zeros(h)
    dc_next = np.zeros(h)
    for t in range(steps - 1, -1, -1):
        dh = dhs[t] + dh_next
        c_prev = cache.c[t - 1] if t > 0 else np.zeros(h)
        h_prev = cache.h[t - 1] if t > 0 else np.zeros(h)
        dc = dc_next + dh * cache.o[t] * (1.0 - cache.tanh_c[t] ** 2)
        do = dh * cache.tanh_c[t]
        di = dc * cache.g[t]
        df = dc * c_prev
        dg = dc * cache.i[t]
        dz = np.concatenate(
            [
                di * cache.i[t] * (1.0 - cache.i[t]),
                df * cache.f[t] * (1.0 - cache.f[t]),
                do * cache.o[t] * (1.0 - cache.o[t]),
                dg * (1.0 - cache.g[t] ** 2),
            ]
        )
        grads["w_x"] += np.outer(dz, cache.xs[t])
        grads["w_h"] += np.outer(dz, h_prev)
        grads["bias"] += dz
        dxs[t] = params.w_x.T @ dz
        dh_next = params.w_h.T @ dz
        dc_next = dc * cache.f[t]
    return grads, dxs


def bilstm_forward(
    xs: np.ndarray, fwd: LSTMParams, bwd: LSTMParams
) -> tuple[np.ndarray, tuple[LstmCache, LstmCache]]:
    hs_f, cache_f = lstm_forward(xs, fwd)
    hs_b, cache_b = lstm_forward(np.asarray(xs, dtype=float)[::-1], bwd)
    return np.concatenate([hs_f[-1], hs_b[-1]]), (cache_f, cache_b)


def bilstm_encode(xs: np.ndarray, fwd: LSTMParams, bwd: LSTMParams) -> np.ndarray:
    """Concatenation of the forward final state and the reversed-pass final state."""
    vec, _ = bilstm_forward(xs, fwd, bwd)
    return vec


def bilstm_backward(
    dvec: np.ndarray,
    caches: tuple[LstmCache, LstmCache],
    fwd: LSTMParams,
    bwd: LSTMParams,
) -> tuple[dict[str, np.ndarray], dict[str, np.ndarray], np.ndarray]:
    cache_f, cache_b = caches
    steps, h = cache_f.h.shape
    dhs_f = np.zeros((steps, h))
    dhs_f[-1] = dvec[:h]
    dhs_b = np.zeros((steps, h))
    dhs_b[-1] = dvec[h:]
    grads_f, dxs_f = lstm_backward(dhs_f, cache_f, fwd)
    grads_b, dxs_b = lstm_backward(dhs_b, cache_b, bwd)
    return grads_f, grads_b, dxs_f + dxs_b[::-1]


def mean_pool(hiddens: np.ndarray) -> np.ndarray:
    hiddens = np.asarray(hiddens, dtype=float)
    if hiddens.ndim != 2 or hiddens.shape[0] == 0:
        raise EmptySequenceError("mean_pool needs a non-empty (T, H) input")
    return hiddens.mean(axis=0)


# --- optimizers -----------------------------------------------------------

def global_norm(grads: dict[str, np.ndarray]) -> float:
    return float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))


def clip_global_norm(grads: dict[str, np.ndarray], max_norm: float) -> dict[str, np.ndarray]:
    norm = global_norm(grads)
    if norm <= max_norm or norm == 0.0:
        return grads
    scale = max_norm / norm
    return {name: g * scale for name, g in grads.items()}


def sgd_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray], lr: float) -> None:
    for name, g in grads.items():
        _expect_shape(name, g, params[name].shape)
        params[name] -= lr * g


@dataclass
class AdamState:
    lr: float
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: dict[str, np.ndarray], lr: float) -> "AdamState":
        return cls(
            lr=lr,
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
        )


def adam_step(
    params: dict[str, np.ndarray], grads: dict[str, np.ndarray], state: AdamState
) -> None:
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    for name, g in grads.items():
        _expect_shape(name, g, params[name].shape)
        state.m[name] = b1 * state.m[name] + (1 - b1) * g
        state.v[name] = b2 * state.v[name] + (1 - b2) * g * g
        m_hat = state.m[name] / (1 - b1**state.t)
        v_hat = state.v[name] / (1 - b2**state.t)
        params[name] -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)


# --- gradient checking ----------------------------------------------------

LossFn = Callable[[dict[str, np.ndarray]], tuple[float, dict[str, np.ndarray]]]


def grad_check(loss_fn: LossFn, params: dict[str, np.ndarray], epsilon: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    ``loss_fn`` returns (loss, gradients) at the given parameters; only the
    loss value is used for the perturbed evaluations.  Parameters are
    perturbed in place and restored.
    """
    base_loss, analytic = loss_fn(params)
    if not np.isfinite(base_loss):
        raise NonFiniteLossError(f"loss is not finite: {base_loss}")
    worst = 0.0
    for name, arr in params.items():
        flat = arr.ravel()
        ga = analytic[name].ravel()
        for idx in range(flat.size):
            original = flat[idx]
            flat[idx] = original + epsilon
            plus = loss_fn(params)[0]
            flat[idx] = original - epsilon
            minus = loss_fn(params)[0]
            flat[idx] = original
            if not (np.isfinite(plus) and np.isfinite(minus)):
                raise NonFiniteLossError("perturbed loss is not finite")
            numeric = (plus - minus) / (2.0 * epsilon)
            rel = abs(ga[idx] - numeric) / max(abs(ga[idx]), abs(numeric), 1e-8)
            worst = max(worst, rel)
    return worst


# --- checkpoints ----------------------------------------------------------

def save_checkpoint(path: str | Path, params: dict[str, np.ndarray], meta: dict) -> None:
    """JSON header line, then little-endian float64 blocks in header order."""
    header = {
        "meta": meta,
        "params": [{"name": k, "shape": list(params[k].shape)} for k in params],
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        for name in params:
            fh.write(np.ascontiguousarray(params[name], dtype="<f8").tobytes())


def load_checkpoint(path: str | Path) -> tuple[dict[str, np.ndarray], dict]:
    blob = Path(path).read_bytes()
    newline = blob.index(b"\n")
    header = json.loads(blob[:newline].decode("utf-8"))
    offset = newline + 1
    params: dict[str, np.ndarray] = {}
    for spec in header["params"]:
        shape = tuple(spec["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(blob, dtype="<f8", count=count, offset=offset).reshape(shape)
        params[spec["name"]] = arr.copy()
        offset += count * 8
    return params, header["meta"]
