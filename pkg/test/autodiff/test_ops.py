import numpy as np
import pytest
from numpy import testing as np_testing

from sentifuse.core.autodiff import (
    Graph,
    Tensor,
    backward,
    concat,
    conv1d,
    cross_entropy,
    elementwise,
    exp,
    finite_difference_check,
    gaussian_kl,
    log,
    relu,
    sigmoid,
    softmax,
    stack_rows,
    tanh,
)
from sentifuse.errors import ContractError, DimensionError

TRIALS = 100
TOLERANCE = 1e-4


def _weights(shape, seed):
    return Tensor(np.random.default_rng(seed + 1000).normal(size=shape))


def _away_from_zero(rng, shape):
    return rng.uniform(0.1, 1.5, size=shape) * rng.choice([-1.0, 1.0], size=shape)


UNARY_CASES = {
    "sigmoid": (sigmoid, lambda rng, shape: rng.normal(size=shape)),
    "tanh": (tanh, lambda rng, shape: rng.normal(size=shape)),
    "relu": (relu, _away_from_zero),
    "exp": (exp, lambda rng, shape: rng.normal(size=shape)),
    "log": (log, lambda rng, shape: rng.uniform(0.5, 2.0, size=shape)),
    "softmax_rows": (lambda x: softmax(x, axis=1), lambda rng, shape: rng.normal(size=shape)),
    "softmax_cols": (lambda x: softmax(x, axis=0), lambda rng, shape: rng.normal(size=shape)),
    "transpose": (lambda x: x.T, lambda rng, shape: rng.normal(size=shape)),
    "reshape": (lambda x: x.reshape(-1, 1), lambda rng, shape: rng.normal(size=shape)),
    "getitem": (lambda x: x[1:, :2], lambda rng, shape: rng.normal(size=shape)),
    "sum_axis": (lambda x: x.sum(axis=0, keepdims=True), lambda rng, shape: rng.normal(size=shape)),
    "mean_axis": (lambda x: x.mean(axis=1), lambda rng, shape: rng.normal(size=shape)),
}


class TestGradients:
    @pytest.mark.parametrize("name", sorted(UNARY_CASES))
    @pytest.mark.parametrize("trial", range(TRIALS))
    def test_unary_ops(self, name, trial):
        op, draw = UNARY_CASES[name]
        rng = np.random.default_rng(trial)
        x = Tensor(draw(rng, (3, 4)))
        weights = _weights(op(x).shape, trial)

        assert finite_difference_check(lambda t: (op(t) * weights).sum(), x) <= TOLERANCE

    @pytest.mark.parametrize("kind", ["add", "sub", "mul"])
    @pytest.mark.parametrize("trial", range(TRIALS))
    def test_binary_ops_with_broadcast(self, kind, trial):
        rng = np.random.default_rng(trial)
        x = Tensor(rng.normal(size=(3, 4)))
        row = Tensor(rng.normal(size=(1, 4)))
        weights = _weights((3, 4), trial)

        assert finite_difference_check(lambda t: (elementwise(t, kind, row) * weights).sum(), x) <= TOLERANCE
        assert finite_difference_check(lambda t: (elementwise(x, kind, t) * weights).sum(), row) <= TOLERANCE

    @pytest.mark.parametrize("trial", range(TRIALS))
    def test_matmul(self, trial):
        rng = np.random.default_rng(trial)
        a = Tensor(rng.normal(size=(3, 5)))
        b = Tensor(rng.normal(size=(5, 2)))
        weights = _weights((3, 2), trial)

        assert finite_difference_check(lambda t: ((t @ b) * weights).sum(), a) <= TOLERANCE
        assert finite_difference_check(lambda t: ((a @ t) * weights).sum(), b) <= TOLERANCE

    @pytest.mark.parametrize(("stride", "padding"), [(1, 0), (1, 1), (2, 1), (3, 2)])
    @pytest.mark.parametrize("trial", range(TRIALS))
    def test_conv1d(self, stride, padding, trial):
        rng = np.random.default_rng(trial)
        x = Tensor(rng.normal(size=(2, 7)))
        kernel = Tensor(rng.normal(size=(3, 2, 3)))
        weights = _weights(conv1d(x, kernel, stride, padding).shape, trial)

        def through_input(t):
            return (conv1d(t, kernel, stride, padding) * weights).sum()

        def through_kernel(t):
            return (conv1d(x, t, stride, padding) * weights).sum()

        assert finite_difference_check(through_input, x) <= TOLERANCE
        assert finite_difference_check(through_kernel, kernel) <= TOLERANCE

    @pytest.mark.parametrize("axis", [0, 1])
    @pytest.mark.parametrize("trial", range(TRIALS))
    def test_concat(self, axis, trial):
        rng = np.random.default_rng(trial)
        a = Tensor(rng.normal(size=(2, 3)))
        b = Tensor(rng.normal(size=(2, 3)))
        weights = _weights(concat([a, b], axis=axis).shape, trial)

        assert finite_difference_check(lambda t: (concat([t, b], axis=axis) * weights).sum(), a) <= TOLERANCE
        assert finite_difference_check(lambda t: (concat([a, t], axis=axis) * weights).sum(), b) <= TOLERANCE

    @pytest.mark.parametrize("position", range(4))
    @pytest.mark.parametrize("trial", range(TRIALS))
    def test_gaussian_kl(self, position, trial):
        rng = np.random.default_rng(trial)
        params = [Tensor(rng.normal(scale=0.5, size=(2, 3))) for _ in range(4)]

        def kl(t):
            args = list(params)
            args[position] = t
            return gaussian_kl(*args)

        assert finite_difference_check(kl, params[position]) <= TOLERANCE

    @pytest.mark.parametrize("label", [0, 1, 2])
    @pytest.mark.parametrize("trial", range(TRIALS))
    def test_cross_entropy(self, label, trial):
        logits = Tensor(np.random.default_rng(trial).normal(size=(1, 3)))

        assert finite_difference_check(lambda t: cross_entropy(t, label), logits) <= TOLERANCE


class TestValues:
    def test_conv1d_is_cross_correlation(self):
        x = Tensor([[1.0, 2.0, 3.0]])
        kernel = Tensor([[[1.0, 0.0, -1.0]]])

        np_testing.assert_array_equal(conv1d(x, kernel, padding=1).data, [[-2.0, -2.0, 2.0]])

    def test_softmax_rows_sum_to_one(self):
        x = Tensor(np.random.default_rng(0).normal(size=(4, 3)) * 50)

        np_testing.assert_allclose(softmax(x, axis=1).data.sum(axis=1), np.ones(4))

    def test_cross_entropy_of_uniform_logits(self):
        assert cross_entropy(Tensor(np.zeros(3)), 1).item() == pytest.approx(np.log(3.0))

    def test_cross_entropy_of_confident_mistake_is_not_capped(self):
        logits = Tensor([40.0, 0.0, 0.0], requires_grad=True)
        loss = cross_entropy(logits, 2)
        backward(loss)

        assert loss.item() == pytest.approx(40.0, abs=1e-6)
        np_testing.assert_allclose(logits.grad, [1.0, 0.0, -1.0], atol=1e-12)

    def test_relu_propagates_nan(self):
        out = relu(Tensor([np.nan, -1.0, 2.0]))

        assert np.isnan(out.data[0])
        np_testing.assert_array_equal(out.data[1:], [0.0, 2.0])

    def test_gaussian_kl_is_zero_for_equal_distributions(self):
        mu = Tensor(np.random.default_rng(1).normal(size=(2, 3)))
        logvar = Tensor(np.random.default_rng(2).normal(size=(2, 3)))

        assert gaussian_kl(mu, logvar, mu, logvar).item() == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_gaussian_kl_is_non_negative(self, seed):
        rng = np.random.default_rng(seed)
        params = [Tensor(rng.normal(size=(3, 2))) for _ in range(4)]

        assert gaussian_kl(*params).item() >= 0.0

    def test_gaussian_kl_matches_closed_form(self):
        # KL(N(1, 1) || N(0, e)) = 0.5 * (1 - 0 + (1 + 1) / e - 1)
        kl = gaussian_kl(Tensor([1.0]), Tensor([0.0]), Tensor([0.0]), Tensor([1.0]))

        assert kl.item() == pytest.approx(0.5 * (1.0 + 2.0 / np.e - 1.0))

    def test_exp_is_clamped(self):
        assert np.isfinite(exp(Tensor([1e4])).item())

    def test_stack_rows(self):
        rows = [Tensor([1.0, 2.0]), Tensor([[3.0, 4.0]])]

        np_testing.assert_array_equal(stack_rows(rows).data, [[1.0, 2.0], [3.0, 4.0]])


class TestBackward:
    def test_gradients_accumulate_over_reuse(self):
        x = Tensor([2.0], requires_grad=True)
        backward((x * x + x).sum())

        np_testing.assert_allclose(x.grad, [5.0])

    def test_gradients_accumulate_across_calls(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        backward((x * 3.0).sum())
        backward((x * 3.0).sum())

        np_testing.assert_allclose(x.grad, [6.0, 6.0])

    def test_non_scalar_loss(self):
        x = Tensor([1.0, 2.0], requires_grad=True)

        with pytest.raises(ContractError):
            backward(x * 2.0)

    def test_loss_without_parameters(self):
        with pytest.raises(ContractError):
            backward(Tensor([1.0]) * 2.0)

    def test_first_non_finite_names_the_op(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        loss = (tanh(x) * np.inf).sum()

        culprit = Graph.trace(loss).first_non_finite()

        assert culprit is not None
        assert culprit.op == "mul"

    def test_nan_through_relu_is_traced_to_its_source(self):
        x = Tensor([1.0, -1.0, 0.5], requires_grad=True)
        loss = cross_entropy(relu(log(x) * np.nan), 0)

        culprit = Graph.trace(loss).first_non_finite()

        assert np.isnan(loss.item())
        assert culprit is not None
        assert culprit.op == "mul"

    def test_graph_order_is_topological(self):
        x = Tensor([1.0], requires_grad=True)
        loss = sigmoid(tanh(x) * x).sum()

        ids = [node.node_id for node in Graph.trace(loss).nodes]

        assert ids == sorted(ids)
        assert Graph.trace(loss).nodes[-1] is loss


class TestShapeErrors:
    def test_concat_mismatch(self):
        with pytest.raises(DimensionError):
            concat([Tensor(np.zeros((2, 3))), Tensor(np.zeros((3, 3)))], axis=1)

    def test_matmul_mismatch(self):
        with pytest.raises(DimensionError):
            Tensor(np.zeros((2, 3))) @ Tensor(np.zeros((2, 3)))

    def test_conv1d_kernel_wider_than_input(self):
        with pytest.raises(DimensionError):
            conv1d(Tensor(np.zeros((1, 2))), Tensor(np.zeros((1, 1, 5))))

    def test_softmax_bad_axis(self):
        with pytest.raises(DimensionError):
            softmax(Tensor(np.zeros((2, 2))), axis=2)

    def test_gradcheck_step_out_of_range(self):
        with pytest.raises(ContractError):
            finite_difference_check(lambda t: t.sum(), Tensor([1.0]), h=1e-2)
