"""Network-core tests: forward/backward correctness against naive oracles,
Adam against a direct transcription of its update equations, gradient
checking, and bit-exact serialization."""

import numpy as np
import pytest

from a3ctp.nn import (
    AdamState, GradCheckReport, LayerDef, ParamSet, ShapeError, adam_step,
    backward_mlp, clip_global_norm, forward_mlp, gradient_check, init_layers,
)


def three_layer_net(rng):
    layers = [
        LayerDef("l0", 5, 7, "tanh"),
        LayerDef("l1", 7, 6, "relu"),
        LayerDef("l2", 6, 3, "linear"),
    ]
    return layers, init_layers(layers, rng)


def naive_forward(params, x, layers):
    """Straight-line re-computation with explicit nested loops."""
    h = list(x)
    for layer in layers:
        W = params[f"{layer.name}.W"]
        b = params[f"{layer.name}.b"]
        out = []
        for j in range(layer.fan_out):
            acc = b[j]
            for i in range(layer.fan_in):
                acc += h[i] * W[i, j]
            out.append(acc)
        if layer.activation == "tanh":
            out = [np.tanh(v) for v in out]
        elif layer.activation == "relu":
            out = [max(0.0, v) for v in out]
        elif layer.activation == "sigmoid":
            out = [1.0 / (1.0 + np.exp(-v)) for v in out]
        h = out
    return np.array(h)


class TestForward:
    def test_all_zero_params_give_zero_preactivations(self):
        layers = [LayerDef("l0", 4, 3, "linear")]
        params = ParamSet({"l0.W": np.zeros((4, 3)), "l0.b": np.zeros(3)})
        out, _ = forward_mlp(params, np.array([1.0, -2.0, 3.0, 4.0]), layers)
        assert np.array_equal(out, np.zeros(3))

    def test_identity_layer_passes_input_through(self):
        layers = [LayerDef("l0", 4, 4, "linear")]
        params = ParamSet({"l0.W": np.eye(4), "l0.b": np.zeros(4)})
        x = np.array([0.5, -1.5, 2.0, 0.0])
        out, _ = forward_mlp(params, x, layers)
        assert np.array_equal(out, x)

    def test_matches_naive_nested_loop_recomputation(self):
        rng = np.random.default_rng(7)
        layers, params = three_layer_net(rng)
        x = rng.normal(size=5)
        out, _ = forward_mlp(params, x, layers)
        assert np.allclose(out, naive_forward(params, x, layers), atol=1e-12)

    def test_shape_mismatch_raises(self):
        rng = np.random.default_rng(0)
        layers, params = three_layer_net(rng)
        with pytest.raises(ShapeError):
            forward_mlp(params, np.zeros(4), layers)

    def test_repeated_calls_bit_identical(self):
        rng = np.random.default_rng(3)
        layers, params = three_layer_net(rng)
        x = rng.normal(size=5)
        a, _ = forward_mlp(params, x, layers)
        b, _ = forward_mlp(params, x, layers)
        assert np.array_equal(a, b)


class TestBackward:
    def test_zero_output_gradient_gives_zero_param_gradients(self):
        rng = np.random.default_rng(1)
        layers, params = three_layer_net(rng)
        _, cache = forward_mlp(params, rng.normal(size=5), layers)
        _, grads = backward_mlp(cache, np.zeros(3))
        for k in grads:
            assert np.array_equal(grads[k], np.zeros_like(grads[k]))

    def test_single_linear_layer_weight_gradient_is_input(self):
        layers = [LayerDef("l0", 3, 2, "linear")]
        params = ParamSet({"l0.W": np.zeros((3, 2)), "l0.b": np.zeros(2)})
        x = np.array([1.0, 2.0, 3.0])
        _, cache = forward_mlp(params, x, layers)
        # loss = output[0]
        _, grads = backward_mlp(cache, np.array([1.0, 0.0]))
        assert np.allclose(grads["l0.W"][:, 0], x)
        assert np.allclose(grads["l0.W"][:, 1], 0.0)

    def test_matches_central_finite_differences(self):
        rng = np.random.default_rng(11)
        layers, params = three_layer_net(rng)
        x = rng.normal(size=5)
        w = rng.normal(size=3)  # loss = w . output

        def loss_fn(p):
            out, _ = forward_mlp(p, x, layers)
            return float(w @ out)

        def grad_fn(p):
            _, cache = forward_mlp(p, x, layers)
            _, g = backward_mlp(cache, w)
            return g

        report = gradient_check(params, loss_fn, grad_fn, tolerance=1e-4)
        assert report.passed, report.max_rel_error


def naive_adam_step(theta, g, m, v, t, lr, b1, b2, eps):
    """Direct transcription of the Adam update equations."""
    m = b1 * m + (1 - b1) * g
    v = b2 * v + (1 - b2) * g * g
    m_hat = m / (1 - b1 ** t)
    v_hat = v / (1 - b2 ** t)
    theta = theta - lr * m_hat / (np.sqrt(v_hat) + eps)
    return theta, m, v


class TestAdam:
    def _scalar_setup(self, theta0=1.0, lr=1e-4):
        params = ParamSet({"p.W": np.array([[theta0]]), "p.b": np.zeros(1)})
        state = AdamState.for_params(params, lr=lr)
        return params, state

    def test_zero_gradient_is_noop_but_counts(self):
        params, state = self._scalar_setup()
        before = params.copy()
        adam_step(params, params.zeros_like(), state)
        assert params.equal_bits(before)
        assert state.step == 1
        assert params.version == 1

    def test_first_step_matches_direct_transcription(self):
        params, state = self._scalar_setup()
        grads = params.zeros_like()
        grads["p.W"] = np.array([[1.0]])
        adam_step(params, grads, state)
        expected, _, _ = naive_adam_step(1.0, 1.0, 0.0, 0.0, 1,
                                         1e-4, 0.9, 0.999, 1e-8)
        assert np.isclose(params["p.W"][0, 0], expected, rtol=0, atol=1e-15)
        # at step 1 the bias-corrected update is essentially lr
        assert np.isclose(1.0 - params["p.W"][0, 0], 1e-4, rtol=1e-6)

    def test_two_identical_gradients_match_transcription_oracle(self):
        # Note: with bias correction, two identical gradients produce equal
        # step sizes (m-hat and sqrt(v-hat) both equal |g|); the oracle is
        # the direct transcription of the update equations at t=1 and t=2.
        params, state = self._scalar_setup()
        grads = params.zeros_like()
        grads["p.W"] = np.array([[2.0]])
        theta, m, v = 1.0, 0.0, 0.0
        for t in (1, 2):
            adam_step(params, grads, state)
            theta, m, v = naive_adam_step(theta, 2.0, m, v, t, 1e-4, 0.9, 0.999, 1e-8)
            assert np.isclose(params["p.W"][0, 0], theta, atol=1e-15)
        assert state.step == 2

    def test_uncorrected_first_step_would_be_tiny(self):
        # The raw first-moment estimate after one step is (1-b1)*g; bias
        # correction is what makes the realized first step close to lr.
        params, state = self._scalar_setup()
        grads = params.zeros_like()
        grads["p.W"] = np.array([[1.0]])
        adam_step(params, grads, state)
        assert np.isclose(state.m["p.W"][0, 0], 0.1)
        assert np.isclose(1.0 - params["p.W"][0, 0], 1e-4, rtol=1e-6)

    def test_shape_mismatch_raises(self):
        params, state = self._scalar_setup()
        grads = ParamSet({"p.W": np.zeros((2, 2)), "p.b": np.zeros(1)})
        with pytest.raises(ShapeError):
            adam_step(params, grads, state)


class TestGradientCheck:
    def test_quadratic_is_exact_up_to_rounding(self):
        params = ParamSet({"q.W": np.array([[3.0]]), "q.b": np.zeros(1)})
        loss_fn = lambda p: float(p["q.W"][0, 0] ** 2)
        def grad_fn(p):
            g = p.zeros_like()
            g["q.W"] = np.array([[2.0 * p["q.W"][0, 0]]])
            return g
        report = gradient_check(params, loss_fn, grad_fn, tolerance=1e-8)
        assert report.passed
        assert report.max_rel_error < 1e-8

    def test_corrupted_backward_fails(self):
        rng = np.random.default_rng(5)
        layers, params = three_layer_net(rng)
        x = rng.normal(size=5)

        def loss_fn(p):
            out, _ = forward_mlp(p, x, layers)
            return float(out.sum())

        def bad_grad_fn(p):
            _, cache = forward_mlp(p, x, layers)
            _, g = backward_mlp(cache, np.ones(3))
            g.tensors["l2.b"] = -g["l2.b"]  # one sign flip
            return g

        report = gradient_check(params, loss_fn, bad_grad_fn, tolerance=1e-4)
        assert not report.passed
        assert isinstance(report, GradCheckReport)


class TestSerialization:
    def test_paramset_roundtrip_bit_exact(self):
        rng = np.random.default_rng(9)
        _, params = three_layer_net(rng)
        params.version = 42
        restored = ParamSet.from_bytes(params.to_bytes())
        assert restored.version == 42
        assert restored.equal_bits(params)

    def test_equal_paramsets_serialize_identically(self):
        rng = np.random.default_rng(9)
        _, a = three_layer_net(rng)
        b = a.copy()
        assert a.to_bytes() == b.to_bytes()

    def test_adamstate_roundtrip_bit_exact(self):
        rng = np.random.default_rng(4)
        _, params = three_layer_net(rng)
        state = AdamState.for_params(params, lr=3e-4)
        grads = params.zeros_like()
        for k in grads:
            grads[k] = rng.normal(size=grads[k].shape)
        adam_step(params, grads, state)
        restored = AdamState.from_bytes(state.to_bytes())
        assert restored.step == state.step
        assert restored.lr == state.lr
        assert restored.m.equal_bits(state.m)
        assert restored.v.equal_bits(state.v)

    def test_file_roundtrip(self, tmp_path):
        rng = np.random.default_rng(2)
        _, params = three_layer_net(rng)
        path = tmp_path / "ckpt.bin"
        params.save(path)
        assert ParamSet.load(path).equal_bits(params)


class TestClip:
    def test_small_gradients_untouched(self):
        g = ParamSet({"a.W": np.array([[3.0]]), "a.b": np.array([4.0])})
        norm = clip_global_norm(g, 40.0)
        assert norm == 5.0
        assert g["a.W"][0, 0] == 3.0

    def test_large_gradients_scaled_to_max_norm(self):
        g = ParamSet({"a.W": np.array([[30.0]]), "a.b": np.array([40.0])})
        clip_global_norm(g, 5.0)
        assert np.isclose(g.global_norm(), 5.0)
