from sentifuse.core.autodiff.gradcheck import (
    finite_difference_check,
    parameter_subset_check,
)
from sentifuse.core.autodiff.ops import (
    EPS,
    concat,
    conv1d,
    cross_entropy,
    elementwise,
    exp,
    gaussian_kl,
    log,
    matmul,
    relu,
    sigmoid,
    softmax,
    stack_rows,
    tanh,
)
from sentifuse.core.autodiff.tensor import Graph, Tensor, backward

__all__ = [
    "EPS",
    "Graph",
    "Tensor",
    "backward",
    "concat",
    "conv1d",
    "cross_entropy",
    "elementwise",
    "exp",
    "finite_difference_check",
    "gaussian_kl",
    "log",
    "matmul",
    "parameter_subset_check",
    "relu",
    "sigmoid",
    "softmax",
    "stack_rows",
    "tanh",
]
