from typing import Any, Literal, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from sentifuse.core.autodiff.tensor import Tensor, as_tensor
from sentifuse.errors import ContractError, DimensionError

EPS = 1e-12
# exp() saturates instead of overflowing to inf
EXP_CLAMP = 700.0

ElementwiseKind = Literal["sigmoid", "tanh", "relu", "exp", "log", "add", "mul", "sub"]


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sums a broadcast gradient back down to `shape`."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(f"{op}: cannot broadcast {a.shape} with {b.shape}") from None


def add(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("add", a, b)

    def backward_fn(g: np.ndarray):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return Tensor(a.data + b.data, op="add", inputs=(a, b), backward_fn=backward_fn)


def sub(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("sub", a, b)

    def backward_fn(g: np.ndarray):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return Tensor(a.data - b.data, op="sub", inputs=(a, b), backward_fn=backward_fn)


def mul(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape("mul", a, b)

    def backward_fn(g: np.ndarray):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return Tensor(a.data * b.data, op="mul", inputs=(a, b), backward_fn=backward_fn)


def sigmoid(x: Tensor) -> Tensor:
    # tanh form is stable for large |x|
    out = 0.5 * (1.0 + np.tanh(0.5 * x.data))

    def backward_fn(g: np.ndarray):
        return (g * out * (1.0 - out),)

    return Tensor(out, op="sigmoid", inputs=(x,), backward_fn=backward_fn)


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.data)

    def backward_fn(g: np.ndarray):
        return (g * (1.0 - out * out),)

    return Tensor(out, op="tanh", inputs=(x,), backward_fn=backward_fn)


def relu(x: Tensor) -> Tensor:
    active = x.data > 0

    def backward_fn(g: np.ndarray):
        return (g * active,)

    # np.maximum keeps NaN so the non-finite trace still finds it.
    return Tensor(np.maximum(x.data, 0.0), op="relu", inputs=(x,), backward_fn=backward_fn)


def exp(x: Tensor) -> Tensor:
    inside = x.data <= EXP_CLAMP
    out = np.exp(np.minimum(x.data, EXP_CLAMP))

    def backward_fn(g: np.ndarray):
        return (g * out * inside,)

    return Tensor(out, op="exp", inputs=(x,), backward_fn=backward_fn)


def log(x: Tensor) -> Tensor:
    inside = x.data >= EPS
    clamped = np.maximum(x.data, EPS)

    def backward_fn(g: np.ndarray):
        return (g * inside / clamped,)

    return Tensor(np.log(clamped), op="log", inputs=(x,), backward_fn=backward_fn)


_UNARY = {"sigmoid": sigmoid, "tanh": tanh, "relu": relu, "exp": exp, "log": log}
_BINARY = {"add": add, "mul": mul, "sub": sub}


def elementwise(x: Any, kind: ElementwiseKind, other: Any = None) -> Tensor:
    if kind in _UNARY:
        return _UNARY[kind](as_tensor(x))
    if kind in _BINARY:
        if other is None:
            raise ContractError(f"elementwise {kind} needs a second operand")
        return _BINARY[kind](x, other)
    raise ContractError(f"Unsupported elementwise kind {kind}")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul: cannot multiply {a.shape} by {b.shape}")

    def backward_fn(g: np.ndarray):
        return g @ b.data.T, a.data.T @ g

    return Tensor(a.data @ b.data, op="matmul", inputs=(a, b), backward_fn=backward_fn)


def conv1d(x: Tensor, kernel: Tensor, stride: int = 1, padding: int = 0) -> Tensor:
    """
    1-D cross-correlation of a [channels x time] input with an
    [out x in x width] kernel bank. No kernel flip.
    """
    if x.ndim != 2 or kernel.ndim != 3:
        raise DimensionError(
            f"conv1d: expected input [channels x time] and kernel [out x in x width], "
            f"got {x.shape} and {kernel.shape}"
        )
    if stride < 1 or padding < 0:
        raise ContractError(f"conv1d: stride must be >= 1 and padding >= 0, got {stride}, {padding}")

    channels, length = x.shape
    _, in_channels, width = kernel.shape
    if in_channels != channels:
        raise DimensionError(f"conv1d: kernel {kernel.shape} does not accept input {x.shape}")
    if width > length + 2 * padding:
        raise DimensionError(
            f"conv1d: kernel width {width} exceeds padded length {length + 2 * padding}"
        )

    padded = np.pad(x.data, ((0, 0), (padding, padding)))
    windows = sliding_window_view(padded, width, axis=1)[:, ::stride, :]
    out = np.einsum("ocw,ctw->ot", kernel.data, windows)

    def backward_fn(g: np.ndarray):
        d_kernel = np.einsum("ot,ctw->ocw", g, windows)
        d_windows = np.einsum("ot,ocw->ctw", g, kernel.data)
        d_padded = np.zeros_like(padded)
        steps = g.shape[1]
        for tap in range(width):
            d_padded[:, tap : tap + stride * (steps - 1) + 1 : stride] += d_windows[:, :, tap]
        return d_padded[:, padding : padding + length], d_kernel

    return Tensor(out, op="conv1d", inputs=(x, kernel), backward_fn=backward_fn)


def _check_axis(op: str, x: Tensor, axis: int) -> int:
    if not -x.ndim <= axis < x.ndim:
        raise DimensionError(f"{op}: axis {axis} is invalid for shape {x.shape}")
    return axis % x.ndim


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    axis = _check_axis("softmax", x, axis)
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward_fn(g: np.ndarray):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

    return Tensor(out, op="softmax", inputs=(x,), backward_fn=backward_fn)


def concat(xs: Sequence[Tensor], axis: int = 0) -> Tensor:
    if len(xs) == 0:
        raise DimensionError("concat: needs at least one tensor")
    if len(xs) == 1:
        return xs[0]

    axis = _check_axis("concat", xs[0], axis)
    reference = xs[0].shape
    for x in xs[1:]:
        if x.ndim != len(reference) or any(
            size != ref for dim, (size, ref) in enumerate(zip(x.shape, reference)) if dim != axis
        ):
            raise DimensionError(
                f"concat: shapes {[t.shape for t in xs]} differ outside axis {axis}"
            )

    bounds = np.cumsum([x.shape[axis] for x in xs])[:-1]

    def backward_fn(g: np.ndarray):
        return tuple(np.split(g, bounds, axis=axis))

    return Tensor(
        np.concatenate([x.data for x in xs], axis=axis),
        op="concat",
        inputs=tuple(xs),
        backward_fn=backward_fn,
    )


def stack_rows(rows: Sequence[Tensor]) -> Tensor:
    """Stacks [1 x n] (or [n]) rows into an [len(rows) x n] tensor."""
    return concat([row.reshape(1, -1) for row in rows], axis=0)


def sum(x: Tensor, axis: int | None = None, keepdims: bool = False) -> Tensor:
    if axis is not None:
        axis = _check_axis("sum", x, axis)
    out = x.data.sum(axis=axis, keepdims=keepdims)

    def backward_fn(g: np.ndarray):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape).copy(),)

    return Tensor(out, op="sum", inputs=(x,), backward_fn=backward_fn)


def mean(x: Tensor, axis: int | None = None, keepdims: bool = False) -> Tensor:
    count = x.size if axis is None else x.shape[_check_axis("mean", x, axis)]
    return mul(sum(x, axis=axis, keepdims=keepdims), 1.0 / count)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    try:
        out = x.data.reshape(tuple(shape))
    except ValueError:
        raise DimensionError(f"reshape: cannot reshape {x.shape} into {tuple(shape)}") from None

    def backward_fn(g: np.ndarray):
        return (g.reshape(x.shape),)

    return Tensor(out, op="reshape", inputs=(x,), backward_fn=backward_fn)


def transpose(x: Tensor) -> Tensor:
    if x.ndim != 2:
        raise DimensionError(f"transpose: expected a matrix, got shape {x.shape}")

    def backward_fn(g: np.ndarray):
        return (g.T,)

    return Tensor(x.data.T, op="transpose", inputs=(x,), backward_fn=backward_fn)


def getitem(x: Tensor, index: Any) -> Tensor:
    out = x.data[index]

    def backward_fn(g: np.ndarray):
        full = np.zeros_like(x.data)
        np.add.at(full, index, g)
        return (full,)

    return Tensor(out, op="getitem", inputs=(x,), backward_fn=backward_fn)


def gaussian_kl(mu_q: Tensor, logvar_q: Tensor, mu_p: Tensor, logvar_p: Tensor) -> Tensor:
    """
    KL(q || p) between diagonal Gaussians, summed over every element.
    """
    shapes = {t.shape for t in (mu_q, logvar_q, mu_p, logvar_p)}
    if len(shapes) != 1:
        raise DimensionError(f"gaussian_kl: parameter shapes differ: {sorted(shapes)}")

    var_q = np.exp(np.minimum(logvar_q.data, EXP_CLAMP))
    inv_var_p = np.exp(-np.minimum(logvar_p.data, EXP_CLAMP))
    diff = mu_q.data - mu_p.data
    ratio = (var_q + diff * diff) * inv_var_p
    kl = 0.5 * np.sum(logvar_p.data - logvar_q.data + ratio - 1.0)

    def backward_fn(g: np.ndarray):
        d_mu_q = g * diff * inv_var_p
        d_logvar_q = g * 0.5 * (var_q * inv_var_p - 1.0)
        d_logvar_p = g * 0.5 * (1.0 - ratio)
        return d_mu_q, d_logvar_q, -d_mu_q, d_logvar_p

    return Tensor(
        kl,
        op="gaussian_kl",
        inputs=(mu_q, logvar_q, mu_p, logvar_p),
        backward_fn=backward_fn,
    )


def cross_entropy(logits: Tensor, label: int) -> Tensor:
    """
    Negative log-likelihood of `label` under softmax(logits), for a 1-D or
    [1 x classes] logits tensor. Computed as logsumexp(logits) - logits[label]
    so a confidently wrong prediction is never clamped.
    """
    flat = reshape(logits, (-1,))
    if not 0 <= label < flat.size:
        raise ContractError(f"cross_entropy: label {label} outside {flat.size} classes")
    shifted = flat.data - flat.data.max()
    log_normalizer = np.log(np.exp(shifted).sum())
    loss = log_normalizer - shifted[label]
    probabilities = np.exp(shifted - log_normalizer)

    def backward_fn(g: np.ndarray):
        grad = probabilities.copy()
        grad[label] -= 1.0
        return (g * grad,)

    return Tensor(np.asarray(loss), op="cross_entropy", inputs=(flat,), backward_fn=backward_fn)
