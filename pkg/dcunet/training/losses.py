"""training/losses.py

Binary cross-entropy summed over pixels and averaged over images.
"""

from typing import Optional

import numpy as np

from dcunet import exceptions, ops
from dcunet.tensor import Function, GradTuple, Tensor

#: Lower clamp of log arguments
LOG_EPSILON = 1e-12


class BinaryCrossEntropy(Function):
    def forward(  # type: ignore[override]
        self, prediction: np.ndarray, target: np.ndarray, epsilon: float = LOG_EPSILON
    ) -> np.ndarray:
        if prediction.shape != target.shape:
            raise exceptions.ShapeMismatchError(
                f"prediction and target must have equal shapes: "
                f"{prediction.shape} vs {target.shape}"
            )
        if prediction.ndim < 1 or prediction.shape[0] == 0:
            raise exceptions.InvalidArgumentsError(
                f"Loss needs at least one image, got shape {prediction.shape}"
            )
        if not np.isin(target, (0, 1)).all():
            raise exceptions.InvalidArgumentsError("Targets must be 0 or 1")

        p = prediction.astype(np.float64)
        y = target.astype(np.float64)
        q = 1.0 - p

        self.positive = (y > 0) & (p > epsilon)
        self.negative = (y == 0) & (q > epsilon)
        self.p, self.q = p, q
        self.dtype = prediction.dtype

        per_pixel = -(
            y * np.log(np.maximum(p, epsilon)) + (1.0 - y) * np.log(np.maximum(q, epsilon))
        )
        axes = tuple(range(1, prediction.ndim))
        return per_pixel.sum(axis=axes).astype(prediction.dtype)

    def backward(self, grad: np.ndarray) -> GradTuple:
        # clamped log arguments have zero slope
        dp = np.zeros_like(self.p)
        dp[self.positive] = -1.0 / self.p[self.positive]
        dp[self.negative] = 1.0 / self.q[self.negative]

        expand = (slice(None),) + (None,) * (dp.ndim - 1)
        dx = (dp * grad[expand]).astype(self.dtype)
        return dx, None


def bce(prediction: Tensor, target: Tensor) -> Tensor:
    """Per-image binary cross-entropy, summed over all pixels of each image.

    Returns a tensor of shape (N,). Log arguments are clamped at 1e-12.
    """
    return BinaryCrossEntropy.apply(prediction, target)


def batch_loss(
    prediction: Tensor, target: Tensor, normalize: Optional[bool] = False
) -> Tensor:
    """Mean per-image cross-entropy over a batch of N images.

    With ``normalize`` the result is additionally divided by the pixel count
    per image.
    """
    loss = ops.mean(bce(prediction, target))
    if normalize:
        pixels = int(np.prod(prediction.shape[1:]))
        loss = ops.scale(loss, 1.0 / pixels)
    return loss
