"""From-scratch LSTM for univariate sequences.

A single recurrent layer with a linear head, implemented directly in
numpy: forward pass, full backpropagation through time, plain gradient
descent with gradient-norm clipping, and a finite-difference gradient
check. Input dimension is fixed at 1 (one scaled increment per step).
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import DivergenceError, StructuralMatrixError

GRAD_CLIP_NORM = 5.0
DEFAULT_LR = 1e-2
DEFAULT_BATCH_SIZE = 64

# Gate weight field names; each matrix is (hidden, hidden+1) acting on
# the concatenation [h_prev, x].
_GATE_WEIGHTS = ("wf", "wi", "wg", "wo")
_GATE_BIASES = ("bf", "bi", "bg", "bo")
PARAM_FIELDS = _GATE_WEIGHTS + _GATE_BIASES + ("wy", "by")


def sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass
class LstmParameters:
    """Gate matrices/biases plus the linear output head.

    Forget, input, candidate and output gates each map the concatenated
    [h_prev, x] vector (length hidden+1) to ``hidden`` units.
    """

    wf: np.ndarray
    wi: np.ndarray
    wg: np.ndarray
    wo: np.ndarray
    bf: np.ndarray
    bi: np.ndarray
    bg: np.ndarray
    bo: np.ndarray
    wy: np.ndarray  # (hidden,)
    by: np.ndarray  # (1,)

    def __post_init__(self):
        for f in fields(self):
            setattr(self, f.name, np.asarray(getattr(self, f.name), dtype=float))
        h = self.bf.shape[0] if self.bf.ndim == 1 else -1
        expect = {
            **{name: (h, h + 1) for name in _GATE_WEIGHTS},
            **{name: (h,) for name in _GATE_BIASES},
            "wy": (h,),
            "by": (1,),
        }
        for name, shape in expect.items():
            got = getattr(self, name).shape
            if h <= 0 or got != shape:
                raise StructuralMatrixError(
                    f"parameter {name} has shape {got}, expected {shape}"
                )
        for f in fields(self):
            if not np.all(np.isfinite(getattr(self, f.name))):
                raise StructuralMatrixError(f"parameter {f.name} is not finite")

    @property
    def hidden_size(self) -> int:
        return self.bf.shape[0]

    def copy(self) -> "LstmParameters":
        return LstmParameters(
            **{f.name: getattr(self, f.name).copy() for f in fields(self)}
        )

    def flatten(self) -> np.ndarray:
        return np.concatenate(
            [getattr(self, name).ravel() for name in PARAM_FIELDS]
        )

    def assign_flat(self, flat: np.ndarray):
        pos = 0
        for name in PARAM_FIELDS:
            arr = getattr(self, name)
            arr.flat[:] = flat[pos : pos + arr.size]
            pos += arr.size


def init_parameters(hidden_size: int, seed: int) -> LstmParameters:
    """Seeded uniform init; the forget-gate bias starts at +1 so the
    cell state is remembered by default."""
    if hidden_size < 1:
        raise ValueError("hidden_size must be >= 1")
    rng = np.random.default_rng(seed)
    k = 1.0 / np.sqrt(hidden_size + 1)
    mats = {
        name: rng.uniform(-k, k, size=(hidden_size, hidden_size + 1))
        for name in _GATE_WEIGHTS
    }
    biases = {name: np.zeros(hidden_size) for name in _GATE_BIASES}
    biases["bf"] = np.ones(hidden_size)
    ky = 1.0 / np.sqrt(hidden_size)
    return LstmParameters(
        **mats,
        **biases,
        wy=rng.uniform(-ky, ky, size=hidden_size),
        by=np.zeros(1),
    )


def zero_parameters(hidden_size: int) -> LstmParameters:
    p = init_parameters(hidden_size, seed=0)
    for name in PARAM_FIELDS:
        getattr(p, name)[:] = 0.0
    return p


def lstm_step(
    params: LstmParameters, x: float, h_prev: np.ndarray, c_prev: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """One cell update for a single scalar input.

    f = sigmoid(Wf.[h,x]+bf); i = sigmoid(Wi.[h,x]+bi);
    g = tanh(Wg.[h,x]+bg); c = f*c_prev + i*g;
    o = sigmoid(Wo.[h,x]+bo); h = o*tanh(c).
    Every component of the returned h lies in (-1, 1).
    """
    h_prev = np.asarray(h_prev, dtype=float)
    c_prev = np.asarray(c_prev, dtype=float)
    hs = params.hidden_size
    if h_prev.shape != (hs,) or c_prev.shape != (hs,):
        raise StructuralMatrixError(
            f"state shapes {h_prev.shape}/{c_prev.shape} do not match "
            f"hidden_size {hs}"
        )
    h_b, c_b = _step_batch(
        params, np.array([[float(x)]]), h_prev[None, :], c_prev[None, :]
    )[:2]
    return h_b[0], c_b[0]


def _step_batch(params, x_col, h_prev, c_prev):
    """Batched cell update; returns (h, c, cache-for-backprop)."""
    z = np.concatenate([h_prev, x_col], axis=1)
    f = sigmoid(z @ params.wf.T + params.bf)
    i = sigmoid(z @ params.wi.T + params.bi)
    g = np.tanh(z @ params.wg.T + params.bg)
    c = f * c_prev + i * g
    o = sigmoid(z @ params.wo.T + params.bo)
    tc = np.tanh(c)
    h = o * tc
    return h, c, (z, f, i, g, o, c_prev, tc)


def forward_batch(params: LstmParameters, windows: np.ndarray):
    """Run the cell over a (batch, lookback) array of scaled inputs.

    Returns (predictions, last hidden state, per-step caches).
    """
    windows = np.asarray(windows, dtype=float)
    if windows.ndim != 2:
        raise StructuralMatrixError(
            f"windows must be 2-d (batch, lookback), got {windows.shape}"
        )
    b, t = windows.shape
    hs = params.hidden_size
    h = np.zeros((b, hs))
    c = np.zeros((b, hs))
    caches = []
    for step in range(t):
        h, c, cache = _step_batch(params, windows[:, step : step + 1], h, c)
        caches.append(cache)
    preds = h @ params.wy + params.by[0]
    return preds, h, caches


def predict_batch(params: LstmParameters, windows: np.ndarray) -> np.ndarray:
    return forward_batch(params, windows)[0]


def loss_and_gradients(
    params: LstmParameters, windows: np.ndarray, targets: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean squared error and its gradient via BPTT over the batch."""
    targets = np.asarray(targets, dtype=float)
    preds, h_last, caches = forward_batch(params, windows)
    b = len(targets)
    resid = preds - targets
    loss = float(np.mean(resid**2))
    grads = {name: np.zeros_like(getattr(params, name)) for name in PARAM_FIELDS}

    dpred = 2.0 * resid / b
    grads["wy"] = h_last.T @ dpred
    grads["by"] = np.array([dpred.sum()])
    dh = np.outer(dpred, params.wy)
    dc = np.zeros_like(dh)
    hs = params.hidden_size
    for z, f, i, g, o, c_prev, tc in reversed(caches):
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc**2)
        da_f = (dc * c_prev) * f * (1.0 - f)
        da_i = (dc * g) * i * (1.0 - i)
        da_g = (dc * i) * (1.0 - g**2)
        da_o = do * o * (1.0 - o)
        grads["wf"] += da_f.T @ z
        grads["bf"] += da_f.sum(axis=0)
        grads["wi"] += da_i.T @ z
        grads["bi"] += da_i.sum(axis=0)
        grads["wg"] += da_g.T @ z
        grads["bg"] += da_g.sum(axis=0)
        grads["wo"] += da_o.T @ z
        grads["bo"] += da_o.sum(axis=0)
        dz = da_f @ params.wf + da_i @ params.wi + da_g @ params.wg + da_o @ params.wo
        dh = dz[:, :hs]
        dc = dc * f
    return loss, grads


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float = GRAD_CLIP_NORM):
    """Scale the whole gradient so its global L2 norm is <= max_norm."""
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm


def train(
    params: LstmParameters,
    windows: np.ndarray,
    targets: np.ndarray,
    epochs: int,
    lr: float = DEFAULT_LR,
    seed: int = 0,
    batch_size: int = DEFAULT_BATCH_SIZE,
    clip_norm: float = GRAD_CLIP_NORM,
) -> list[float]:
    """Gradient-descent training; mutates ``params`` in place.

    One epoch is a full pass over the window set in seeded-shuffled
    mini-batches; each batch takes one clipped gradient-descent step.
    The returned loss curve holds the epoch-mean training loss
    (evaluated before each batch's update). Deterministic given
    (params, data, hyperparameters, seed). ``epochs=0`` changes nothing
    and yields an empty curve.
    """
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    windows = np.asarray(windows, dtype=float)
    targets = np.asarray(targets, dtype=float)
    n = len(windows)
    if n == 0:
        raise ValueError("no training windows")
    if len(targets) != n:
        raise StructuralMatrixError(
            f"{n} windows but {len(targets)} targets"
        )
    batch_size = min(max(1, batch_size), n)
    rng = np.random.default_rng(seed)
    curve: list[float] = []
    for epoch in range(epochs):
        order = rng.permutation(n)
        weighted = 0.0
        for lo in range(0, n, batch_size):
            idx = order[lo : lo + batch_size]
            # divergence surfaces as the typed error below, so the
            # intermediate overflow warnings carry no extra signal
            with np.errstate(over="ignore", invalid="ignore"):
                loss, grads = loss_and_gradients(
                    params, windows[idx], targets[idx]
                )
            if not np.isfinite(loss):
                raise DivergenceError(
                    f"non-finite training loss at epoch {epoch + 1}",
                    epoch=epoch + 1,
                )
            weighted += loss * len(idx)
            clip_gradients(grads, clip_norm)
            for name in PARAM_FIELDS:
                getattr(params, name)[...] -= lr * grads[name]
        curve.append(weighted / n)
    return curve


def gradient_check(
    params: LstmParameters,
    window: np.ndarray,
    target: float,
    epsilon: float = 1e-5,
) -> float:
    """Max relative error of BPTT gradients vs central differences.

    Perturbs every parameter by +/-epsilon on the squared-error loss of
    a single window and compares against the analytic gradient with
    |ga - gn| / max(|ga|, |gn|, 1e-8).
    """
    window = np.asarray(window, dtype=float).reshape(1, -1)
    targets = np.array([float(target)])
    _, grads = loss_and_gradients(params, window, targets)
    analytic = np.concatenate([grads[name].ravel() for name in PARAM_FIELDS])

    probe = params.copy()
    flat = probe.flatten()
    numeric = np.empty_like(flat)
    for k in range(len(flat)):
        orig = flat[k]
        flat[k] = orig + epsilon
        probe.assign_flat(flat)
        up = float(np.mean((predict_batch(probe, window) - targets) ** 2))
        flat[k] = orig - epsilon
        probe.assign_flat(flat)
        down = float(np.mean((predict_batch(probe, window) - targets) ** 2))
        flat[k] = orig
        numeric[k] = (up - down) / (2.0 * epsilon)
    probe.assign_flat(flat)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / denom))
