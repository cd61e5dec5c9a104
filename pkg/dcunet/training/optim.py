"""training/optim.py

Bias-corrected Adam.
"""

from typing import Dict, Mapping, Optional, Tuple

import logging

import numpy as np

from dcunet import exceptions
from dcunet.tensor import Tensor
from dcunet.training.config import TrainConfig

logger = logging.getLogger(__name__)


class AdamState:
    """First and second moment estimates per parameter name plus the step counter"""

    def __init__(self) -> None:
        self.step = 0
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}

    def __repr__(self) -> str:
        return f"AdamState(step={self.step}, params={len(self.m)})"


def adam_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, Optional[np.ndarray]],
    state: AdamState,
    config: TrainConfig,
) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """Return updated parameters; entries without a gradient are passed through.

    Moments start at zero and are created on first use.
    """
    for name, grad in grads.items():
        if grad is not None and not np.all(np.isfinite(grad)):
            raise exceptions.NumericalError(f"Non-finite gradient for parameter {name}")

    state.step += 1
    t = state.step
    beta1, beta2 = config.beta1, config.beta2
    correction1 = 1.0 - beta1**t
    correction2 = 1.0 - beta2**t

    updated: Dict[str, np.ndarray] = {}
    for name, param in params.items():
        grad = grads.get(name)
        if grad is None:
            updated[name] = param
            continue

        if grad.shape != param.shape:
            raise exceptions.ShapeMismatchError(
                f"Gradient of {name} has shape {grad.shape}, parameter {param.shape}"
            )

        m = state.m.get(name)
        v = state.v.get(name)
        if m is None or v is None:
            m = np.zeros_like(param)
            v = np.zeros_like(param)

        m = beta1 * m + (1 - beta1) * grad
        v = beta2 * v + (1 - beta2) * grad * grad
        state.m[name] = m.astype(param.dtype, copy=False)
        state.v[name] = v.astype(param.dtype, copy=False)

        m_hat = m / correction1
        v_hat = v / correction2
        delta = config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
        updated[name] = (param - delta).astype(param.dtype, copy=False)

    return updated, state


class Adam:
    """Applies :func:`adam_step` to named tensors in place"""

    def __init__(self, params: Mapping[str, Tensor], config: TrainConfig):
        self.params = dict(params)
        self.config = config
        self.state = AdamState()

    def step(self) -> None:
        arrays = {name: p.data for name, p in self.params.items()}
        grads = {name: p.grad for name, p in self.params.items()}

        updated, self.state = adam_step(arrays, grads, self.state, self.config)

        for name, param in self.params.items():
            param.data = updated[name]

    def zero_grad(self) -> None:
        for param in self.params.values():
            param.zero_grad()
