import itertools
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from sentifuse.errors import ContractError

# Monotonic across threads; a node's id is always larger than its inputs' ids.
_node_ids = itertools.count()

BackwardFn = Callable[[np.ndarray], Sequence[np.ndarray | None]]


class Tensor:
    """
    A dense float64 array that records the operation that produced it.

    Leaf tensors are created directly; every other tensor is the output of an
    op in `sentifuse.core.autodiff.ops` and keeps references to its inputs and
    a closure mapping the output gradient to one gradient per input.
    """

    __array_priority__ = 100

    def __init__(
        self,
        data: Any,
        requires_grad: bool = False,
        *,
        op: str = "leaf",
        inputs: Sequence["Tensor"] = (),
        backward_fn: BackwardFn | None = None,
    ) -> None:
        self.data = np.array(data, dtype=np.float64)
        self.requires_grad = requires_grad or any(t.requires_grad for t in inputs)
        self.grad: np.ndarray | None = None
        self.op = op
        # Constant subgraphs don't need their lineage.
        self.inputs: tuple[Tensor, ...] = tuple(inputs) if self.requires_grad else ()
        self.backward_fn = backward_fn if self.requires_grad else None
        self.node_id = next(_node_ids)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def is_leaf(self) -> bool:
        return not self.inputs

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.size == 1 else float("nan")

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        backward(self)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, op={self.op}, requires_grad={self.requires_grad})"

    def __add__(self, other: Any) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.add(self, other)

    def __radd__(self, other: Any) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.add(other, self)

    def __sub__(self, other: Any) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.sub(self, other)

    def __rsub__(self, other: Any) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.sub(other, self)

    def __mul__(self, other: Any) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.mul(self, other)

    def __rmul__(self, other: Any) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.mul(other, self)

    def __neg__(self) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.mul(self, -1.0)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.matmul(self, other)

    def __getitem__(self, index: Any) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.getitem(self, index)

    @property
    def T(self) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.transpose(self)

    def sum(self, axis: int | None = None, keepdims: bool = False) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: int | None = None, keepdims: bool = False) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape: int) -> "Tensor":
        from sentifuse.core.autodiff import ops

        return ops.reshape(self, shape)


def as_tensor(value: Any) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


@dataclass
class Graph:
    """
    The recorded operations reachable from an output, in insertion order.

    Insertion order is a topological order: an op's output is always created
    after its inputs.
    """

    nodes: list[Tensor]

    @classmethod
    def trace(cls, output: Tensor) -> "Graph":
        seen: dict[int, Tensor] = {}
        stack = [output]
        while stack:
            node = stack.pop()
            if node.node_id in seen or not node.requires_grad:
                continue
            seen[node.node_id] = node
            stack.extend(node.inputs)

        return cls(nodes=[seen[key] for key in sorted(seen)])

    def first_non_finite(self) -> Tensor | None:
        for node in self.nodes:
            if not np.all(np.isfinite(node.data)):
                return node
        return None


def backward(loss: Tensor) -> None:
    """
    Populates `.grad` on every tensor that requires a gradient and is reachable
    from `loss`. Gradients accumulate into existing buffers.
    """
    if loss.size != 1:
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        raise ContractError("backward called on a loss that does not depend on any parameter")

    graph = Graph.trace(loss)
    pending: dict[int, np.ndarray] = {loss.node_id: np.ones_like(loss.data)}

    for node in reversed(graph.nodes):
        g = pending.pop(node.node_id, None)
        if g is None:
            continue

        node.grad = g.copy() if node.grad is None else node.grad + g

        if node.backward_fn is None:
            continue

        for parent, parent_grad in zip(node.inputs, node.backward_fn(g)):
            if parent_grad is None or not parent.requires_grad:
                continue
            if parent.node_id in pending:
                pending[parent.node_id] = pending[parent.node_id] + parent_grad
            else:
                pending[parent.node_id] = parent_grad
