import numpy as np
import numpy.testing as npt
import pytest

from lexsent.errors import ConfigError, NumericError, OracleError, ShapeError
from lexsent.gradcheck import check_gradients, finite_diff_grad, relative_error
from lexsent.optim import Adam, Sgd, make_optimizer
from lexsent.tensor import (Parameter, Tensor, activation, affine, concat,
                            cross_entropy, dot, element, row, sigmoid, softmax,
                            stack_scalars, tanh)


class TestActivations:
    def test_sigmoid_at_zero(self):
        assert activation("sigmoid", Tensor([0.0])).data[0] == 0.5

    def test_tanh_at_zero(self):
        assert activation("tanh", Tensor([0.0])).data[0] == 0.0

    def test_sigmoid_symmetry(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-30, 30, size=200)
        s = sigmoid(Tensor(x)).data + sigmoid(Tensor(-x)).data
        npt.assert_allclose(s, 1.0, atol=1e-12)

    def test_shape_preserved(self):
        x = Tensor(np.ones((3, 4)))
        assert sigmoid(x).shape == (3, 4)
        assert tanh(x).shape == (3, 4)

    def test_non_finite_input_rejected(self):
        with pytest.raises(NumericError):
            Tensor([np.nan])
        with pytest.raises(NumericError):
            Tensor([np.inf, 0.0])

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            activation("relu", Tensor([0.0]))


class TestSoftmax:
    def test_uniform(self):
        npt.assert_allclose(softmax(Tensor([0.0, 0.0, 0.0])).data, 1 / 3, atol=0)

    def test_large_logit_no_overflow(self):
        y = softmax(Tensor([1000.0, 0.0])).data
        assert y[0] > 1 - 1e-12 and y[1] < 1e-12

    def test_sums_to_one(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            y = softmax(Tensor(rng.normal(size=rng.integers(1, 9)))).data
            assert abs(y.sum() - 1.0) < 1e-12
            assert np.all(y > 0)

    def test_shift_invariance(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=5)
        for c in (-100.0, 3.5, 7e3):
            npt.assert_allclose(softmax(Tensor(x + c)).data,
                                softmax(Tensor(x)).data, atol=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(ShapeError):
            softmax(Tensor(np.zeros(0)))


class TestAffine:
    def test_identity(self):
        x = Tensor([1.0, -2.0])
        out = affine(Tensor(np.eye(2)), x, Tensor(np.zeros(2)))
        npt.assert_array_equal(out.data, x.data)

    def test_zero_weight_gives_bias(self):
        b = Tensor([3.0, -1.0])
        out = affine(Tensor(np.zeros((2, 3))), Tensor(np.ones(3)), b)
        npt.assert_array_equal(out.data, b.data)

    def test_random_against_loop_oracle(self):
        rng = np.random.default_rng(3)
        w = rng.normal(size=(2, 2))
        x = rng.normal(size=2)
        b = rng.normal(size=2)
        expected = [sum(w[i, j] * x[j] for j in range(2)) + b[i] for i in range(2)]
        out = affine(Tensor(w), Tensor(x), Tensor(b))
        npt.assert_allclose(out.data, expected, rtol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            affine(Tensor(np.zeros((2, 3))), Tensor(np.zeros(4)), Tensor(np.zeros(2)))


class TestFiniteDiff:
    def test_quadratic(self):
        theta = Parameter("theta", 3.0)
        (g,) = finite_diff_grad(lambda: float(theta.data) ** 2, [theta], eps=1e-5)
        assert abs(g - 6.0) < 1e-6

    def test_sine(self):
        theta = Parameter("theta", 0.0)
        (g,) = finite_diff_grad(lambda: float(np.sin(theta.data)), [theta], eps=1e-5)
        assert abs(g - 1.0) < 1e-8

    def test_eps_bounds(self):
        theta = Parameter("theta", 1.0)
        with pytest.raises(ConfigError):
            finite_diff_grad(lambda: 0.0, [theta], eps=1e-2)

    def test_nondeterministic_loss_detected(self):
        theta = Parameter("theta", 1.0)
        state = {"calls": 0}

        def loss():
            state["calls"] += 1
            return float(state["calls"])

        with pytest.raises(OracleError):
            finite_diff_grad(loss, [theta])


class TestAutodiff:
    def test_composite_matches_finite_diff(self):
        rng = np.random.default_rng(4)
        w = Parameter("w", rng.normal(size=(3, 4)))
        x = Parameter("x", rng.normal(size=4))
        b = Parameter("b", rng.normal(size=3))

        def loss():
            z = affine(w, x, b)
            return dot(sigmoid(z), tanh(z))

        assert check_gradients(loss, [w, x, b]) < 1e-6

    def test_cross_entropy_matches_finite_diff(self):
        rng = np.random.default_rng(5)
        logits = Parameter("logits", rng.normal(size=3))
        assert check_gradients(lambda: cross_entropy(logits, 1), [logits]) < 1e-6

    def test_stack_and_element(self):
        a, b = Parameter("a", 2.0), Parameter("b", -1.0)
        v = stack_scalars([a, b])
        loss = element(v, 0) * element(v, 1)
        loss.backward()
        assert a.grad == -1.0 and b.grad == 2.0

    def test_row_lookup_gradient(self):
        table = Parameter("emb", np.arange(6.0).reshape(3, 2))
        loss = row(table, 1).sum()
        loss.backward()
        npt.assert_array_equal(table.grad, [[0, 0], [1, 1], [0, 0]])

    def test_concat_gradient(self):
        a = Parameter("a", [1.0, 2.0])
        b = Parameter("b", [3.0])
        loss = dot(concat([a, b]), Tensor([1.0, 10.0, 100.0]))
        loss.backward()
        npt.assert_array_equal(a.grad, [1.0, 10.0])
        npt.assert_array_equal(b.grad, [100.0])

    def test_reused_tensor_accumulates(self):
        a = Parameter("a", 3.0)
        loss = a * a
        loss.backward()
        assert a.grad == 6.0

    def test_backward_requires_scalar(self):
        with pytest.raises(ShapeError):
            Parameter("v", [1.0, 2.0]).backward()


class TestOptimizers:
    def test_sgd_example(self):
        p = Parameter("p", 1.0)
        p.grad = np.array(1.0)
        Sgd(lr=0.1).step([p])
        assert float(p.data) == pytest.approx(0.9, abs=1e-15)
        assert p.grad is None

    def test_zero_gradient_is_identity(self):
        for algo in ("sgd", "adam"):
            p = Parameter("p", [1.5, -2.0])
            p.grad = np.zeros(2)
            make_optimizer(algo, 0.1).step([p])
            npt.assert_array_equal(p.data, [1.5, -2.0])

    def test_adam_single_step_hand_recurrence(self):
        p = Parameter("p", 1.0)
        p.grad = np.array(1.0)
        opt = Adam(lr=1e-3)
        opt.step([p])
        # hand-step: m=0.1, v=0.001, m_hat=1, v_hat=1
        m = 0.1 * 1.0
        v = 0.001 * 1.0
        delta = 1e-3 * (m / 0.1) / (np.sqrt(v / 0.001) + 1e-8)
        assert float(p.data) == pytest.approx(1.0 - delta, abs=1e-18)
        assert abs(float(p.data) - (1.0 - 1e-3)) < 1e-10

    def test_nonpositive_lr_rejected(self):
        with pytest.raises(ConfigError):
            make_optimizer("sgd", 0.0)
        with pytest.raises(ConfigError):
            make_optimizer("adam", -1.0)

    def test_unknown_algorithm(self):
        with pytest.raises(ConfigError):
            make_optimizer("rmsprop", 0.1)


def test_relative_error_handles_zero_grads():
    assert relative_error(np.zeros(3), np.zeros(3)) == 0.0
    assert relative_error(np.ones(3), np.ones(3)) == 0.0
