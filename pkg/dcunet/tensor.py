"""tensor.py

Dense tensor container and the reverse-mode differentiation engine.
"""

from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import contextlib
import logging
import threading

import numpy as np

from dcunet import exceptions, get_settings

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, float, int, Sequence[Any]]
GradTuple = Tuple[Optional[np.ndarray], ...]

_FLOAT_TYPES = (np.dtype("float32"), np.dtype("float64"))

_state = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_state, "grad_enabled", True)


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Run operators without recording a graph (evaluation, finite differences)"""
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


def default_dtype() -> np.dtype:
    return np.dtype(get_settings().FLOAT_DTYPE)


class Tensor:
    """A dense floating point array with an optional gradient.

    Leaf tensors with ``requires_grad`` accumulate into ``grad`` on every
    backward pass until :meth:`zero_grad` is called, so a parameter that is
    used twice in one graph receives the sum of both contributions.
    """

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        name: Optional[str] = None,
        creator: Optional["Function"] = None,
        dtype: Union[str, np.dtype, None] = None,
    ):
        if dtype is None:
            if isinstance(data, np.ndarray) and data.dtype in _FLOAT_TYPES:
                dtype = data.dtype
            else:
                dtype = default_dtype()

        self.data: np.ndarray = np.asarray(data, dtype=dtype)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.name = name
        self.creator = creator

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def is_leaf(self) -> bool:
        return self.creator is None

    def zero_grad(self) -> None:
        self.grad = None

    def item(self) -> float:
        return float(self.data.item())

    def backward(self) -> None:
        backward(self)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return (
            f"Tensor{label}(shape={self.shape}, dtype={self.dtype.name}, "
            f"requires_grad={self.requires_grad})"
        )


class Function:
    """Base class for differentiable operators.

    Subclasses implement ``forward`` on raw arrays, keeping whatever they need
    on ``self``, and ``backward`` returning one gradient (or None) per input.
    """

    def __init__(self, *inputs: Optional[Tensor]):
        self.inputs: Tuple[Optional[Tensor], ...] = inputs
        self.released = False

    def forward(self, *arrays: Optional[np.ndarray], **kwargs: Any) -> np.ndarray:
        raise NotImplementedError("Forward pass not implemented for this function")

    def backward(self, grad: np.ndarray) -> GradTuple:
        raise NotImplementedError("Backward pass not implemented for this function")

    def release(self) -> None:
        """Drop saved state; the node cannot take part in another backward pass"""
        self.__dict__.clear()
        self.inputs = ()
        self.released = True

    @classmethod
    def apply(cls, *inputs: Optional[Tensor], **kwargs: Any) -> Tensor:
        func = cls(*inputs)
        out_data = func.forward(
            *(None if inp is None else inp.data for inp in inputs), **kwargs
        )

        if not np.all(np.isfinite(out_data)):
            raise exceptions.NumericalError(
                f"{cls.__name__} produced non-finite values "
                f"(input shapes {[None if i is None else i.shape for i in inputs]})"
            )

        requires_grad = is_grad_enabled() and any(
            inp is not None and inp.requires_grad for inp in inputs
        )
        return Tensor(
            out_data,
            requires_grad=requires_grad,
            creator=func if requires_grad else None,
        )


_VISITING, _DONE = 1, 2


def _topological_order(root: Tensor) -> List[Tensor]:
    """Post-order of all tensors reachable from root that require gradients"""
    order: List[Tensor] = []
    state: Dict[int, int] = {}
    stack: List[Tuple[Tensor, bool]] = [(root, False)]

    while stack:
        node, expanded = stack.pop()
        key = id(node)

        if expanded:
            state[key] = _DONE
            order.append(node)
            continue

        seen = state.get(key)
        if seen == _DONE:
            continue
        if seen == _VISITING:
            raise exceptions.GraphError(f"Cycle detected at {node!r}")

        state[key] = _VISITING
        stack.append((node, True))

        creator = node.creator
        if creator is None:
            continue

        if creator.released:
            raise exceptions.GraphError(
                "Graph has already been differentiated; run a new forward pass "
                "before calling backward again"
            )

        for parent in creator.inputs:
            if parent is None or not parent.requires_grad:
                continue
            if state.get(id(parent)) == _VISITING:
                raise exceptions.GraphError(f"Cycle detected at {parent!r}")
            stack.append((parent, False))

    return order


def backward(root: Tensor) -> None:
    """Populate ``grad`` of every leaf reachable from a scalar root"""
    if root.data.size != 1:
        raise exceptions.GraphError(
            f"backward requires a scalar root, got shape {root.shape}"
        )

    if root.creator is None:
        raise exceptions.GraphError(
            "backward requires a tensor produced by a recorded forward pass"
        )

    order = _topological_order(root)
    grads: Dict[int, np.ndarray] = {id(root): np.ones_like(root.data)}

    for node in reversed(order):
        grad = grads.pop(id(node), None)
        if grad is None:
            continue

        creator = node.creator
        if creator is None:
            if not np.all(np.isfinite(grad)):
                raise exceptions.NumericalError(
                    f"Non-finite gradient for {node.name or repr(node)}"
                )
            grad = grad.astype(node.dtype, copy=False)
            node.grad = grad.copy() if node.grad is None else node.grad + grad
            continue

        input_grads = creator.backward(grad)
        for parent, parent_grad in zip(creator.inputs, input_grads):
            if parent is None or parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + parent_grad
            else:
                grads[key] = parent_grad

        creator.release()
