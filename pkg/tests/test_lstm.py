"""LSTM cell semantics, BPTT gradients, and training behavior."""

import math

import numpy as np
import pytest

from allocwise import lstm
from allocwise.errors import DivergenceError, StructuralMatrixError


# --- parameters -------------------------------------------------------------

def test_init_deterministic_per_seed():
    a = lstm.init_parameters(8, seed=3)
    b = lstm.init_parameters(8, seed=3)
    c = lstm.init_parameters(8, seed=4)
    assert np.array_equal(a.flatten(), b.flatten())
    assert not np.array_equal(a.flatten(), c.flatten())


def test_init_forget_bias_positive():
    p = lstm.init_parameters(16, seed=0)
    assert np.all(p.bf == 1.0)


def test_parameters_shape_validation():
    p = lstm.init_parameters(4, seed=0)
    with pytest.raises(StructuralMatrixError):
        lstm.LstmParameters(
            wf=p.wf[:, :-1], wi=p.wi, wg=p.wg, wo=p.wo,
            bf=p.bf, bi=p.bi, bg=p.bg, bo=p.bo, wy=p.wy, by=p.by,
        )


def test_flatten_assign_round_trip():
    p = lstm.init_parameters(5, seed=9)
    flat = p.flatten()
    q = lstm.zero_parameters(5)
    q.assign_flat(flat)
    assert np.array_equal(q.flatten(), flat)


# --- lstm_step --------------------------------------------------------------

def test_step_zero_params_zero_state():
    p = lstm.zero_parameters(6)
    h, c = lstm.lstm_step(p, 3.7, np.zeros(6), np.zeros(6))
    assert np.array_equal(h, np.zeros(6))
    assert np.array_equal(c, np.zeros(6))


def test_step_saturated_forget_preserves_cell():
    p = lstm.zero_parameters(4)
    p.bf[:] = 20.0   # forget gate ~1
    p.bi[:] = -20.0  # input gate ~0
    c_prev = np.array([0.3, -0.2, 0.7, 0.1])
    _h, c = lstm.lstm_step(p, 1.0, np.zeros(4), c_prev)
    assert c == pytest.approx(c_prev, abs=1e-8)


def test_step_matches_scalar_transcription():
    # straight-line scalar evaluation of the five cell equations
    def sig(v):
        return 1.0 / (1.0 + math.exp(-v))

    p = lstm.init_parameters(3, seed=42)
    rng = np.random.default_rng(1)
    x = 0.37
    h_prev = rng.uniform(-1, 1, 3)
    c_prev = rng.uniform(-1, 1, 3)

    z = list(h_prev) + [x]
    expect_h, expect_c = [], []
    for u in range(3):
        af = sum(p.wf[u][k] * z[k] for k in range(4)) + p.bf[u]
        ai = sum(p.wi[u][k] * z[k] for k in range(4)) + p.bi[u]
        ag = sum(p.wg[u][k] * z[k] for k in range(4)) + p.bg[u]
        ao = sum(p.wo[u][k] * z[k] for k in range(4)) + p.bo[u]
        c = sig(af) * c_prev[u] + sig(ai) * math.tanh(ag)
        expect_c.append(c)
        expect_h.append(sig(ao) * math.tanh(c))

    h, c = lstm.lstm_step(p, x, h_prev, c_prev)
    assert h == pytest.approx(expect_h, abs=1e-12)
    assert c == pytest.approx(expect_c, abs=1e-12)


def test_step_hidden_state_bounded():
    rng = np.random.default_rng(8)
    p = lstm.init_parameters(8, seed=8)
    h = np.zeros(8)
    c = np.zeros(8)
    for _ in range(50):
        h, c = lstm.lstm_step(p, float(rng.uniform(-100, 100)), h, c)
        assert np.all(np.abs(h) < 1.0)


def test_step_state_shape_mismatch():
    p = lstm.init_parameters(4, seed=0)
    with pytest.raises(StructuralMatrixError):
        lstm.lstm_step(p, 1.0, np.zeros(3), np.zeros(4))


def test_forward_batch_matches_stepwise():
    p = lstm.init_parameters(5, seed=2)
    rng = np.random.default_rng(2)
    windows = rng.uniform(0, 1, size=(4, 7))
    preds, h_last, _ = lstm.forward_batch(p, windows)
    for b in range(4):
        h = np.zeros(5)
        c = np.zeros(5)
        for t in range(7):
            h, c = lstm.lstm_step(p, windows[b, t], h, c)
        assert h == pytest.approx(h_last[b], abs=1e-12)
        assert preds[b] == pytest.approx(float(h @ p.wy + p.by[0]), abs=1e-12)


# --- gradients --------------------------------------------------------------

def test_gradient_check_random_models():
    rng = np.random.default_rng(0)
    for seed in range(5):
        p = lstm.init_parameters(4, seed=seed)
        window = rng.uniform(0, 1, size=6)
        target = float(rng.uniform(0, 1))
        assert lstm.gradient_check(p, window, target) < 1e-4


def test_gradient_check_detects_sign_flip():
    p = lstm.init_parameters(3, seed=5)
    window = np.linspace(0.1, 0.9, 5)
    target = 0.4
    _, grads = lstm.loss_and_gradients(p, window.reshape(1, -1),
                                       np.array([target]))
    analytic = np.concatenate([grads[n].ravel() for n in lstm.PARAM_FIELDS])
    k = int(np.argmax(np.abs(analytic)))
    flipped = analytic.copy()
    flipped[k] = -flipped[k]
    # against a correct reference, a sign flip shows relative error ~2
    denom = max(abs(analytic[k]), abs(flipped[k]), 1e-8)
    assert abs(analytic[k] - flipped[k]) / denom == pytest.approx(2.0)
    # and the unflipped gradient is the correct one
    assert lstm.gradient_check(p, window, target) < 1e-4


def test_gradient_check_zero_parameters():
    p = lstm.zero_parameters(3)
    err = lstm.gradient_check(p, np.array([0.5, 0.5, 0.5]), 1.0)
    assert math.isfinite(err)


def test_clip_gradients_scales_to_threshold():
    grads = {"a": np.array([3.0, 4.0])}  # norm 5
    norm = lstm.clip_gradients(grads, max_norm=1.0)
    assert norm == pytest.approx(5.0)
    assert np.linalg.norm(grads["a"]) == pytest.approx(1.0, abs=1e-12)

    grads = {"a": np.array([0.3, 0.4])}
    lstm.clip_gradients(grads, max_norm=1.0)
    assert np.array_equal(grads["a"], [0.3, 0.4])


# --- training ---------------------------------------------------------------

def test_train_learns_constant_delta():
    p = lstm.init_parameters(8, seed=0)
    windows = np.full((20, 5), 0.5)
    targets = np.full(20, 0.5)
    curve = lstm.train(p, windows, targets, epochs=200, lr=1e-1, seed=0)
    assert curve[-1] < 1e-6


def test_train_zero_epochs_is_identity():
    p = lstm.init_parameters(4, seed=1)
    before = p.flatten().copy()
    curve = lstm.train(p, np.ones((3, 4)), np.ones(3), epochs=0)
    assert curve == []
    assert np.array_equal(p.flatten(), before)


def test_train_deterministic_per_seed():
    rng = np.random.default_rng(3)
    windows = rng.uniform(0, 1, size=(40, 6))
    targets = rng.uniform(0, 1, size=40)
    p1 = lstm.init_parameters(6, seed=2)
    p2 = lstm.init_parameters(6, seed=2)
    c1 = lstm.train(p1, windows, targets, epochs=5, seed=11, batch_size=8)
    c2 = lstm.train(p2, windows, targets, epochs=5, seed=11, batch_size=8)
    assert c1 == c2
    assert np.array_equal(p1.flatten(), p2.flatten())


def test_train_loss_curve_length():
    p = lstm.init_parameters(4, seed=0)
    curve = lstm.train(p, np.ones((10, 3)), np.ones(10), epochs=7)
    assert len(curve) == 7


def test_train_divergence_error_names_epoch():
    p = lstm.init_parameters(4, seed=0)
    rng = np.random.default_rng(0)
    windows = rng.uniform(0, 1, size=(10, 4))
    targets = rng.uniform(0, 1, size=10)
    with pytest.raises(DivergenceError) as exc:
        lstm.train(p, windows, targets, epochs=5, lr=1e300)
    assert exc.value.epoch >= 1


def test_train_rejects_bad_inputs():
    p = lstm.init_parameters(4, seed=0)
    with pytest.raises(ValueError):
        lstm.train(p, np.ones((3, 4)), np.ones(3), epochs=1, lr=0.0)
    with pytest.raises(StructuralMatrixError):
        lstm.train(p, np.ones((3, 4)), np.ones(2), epochs=1)
