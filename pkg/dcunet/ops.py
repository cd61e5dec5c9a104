"""ops.py

Differentiable operators on N, C, H, W tensors.

Convolutions use the cross-correlation convention (no kernel flip). Same
padding adds zeros, with the odd pixel of an uneven split going to the
bottom/right edge.
"""

from typing import Optional, Sequence, Tuple

import math

import numpy as np

from dcunet import exceptions, get_settings
from dcunet.tensor import Function, GradTuple, Tensor

PADDING_MODES = ("same", "valid")


def _check_4d(name: str, arr: np.ndarray) -> None:
    if arr.ndim != 4:
        raise exceptions.ShapeMismatchError(
            f"{name} must have shape (N, C, H, W), got {arr.shape}"
        )


def _same_padding(size: int, kernel: int, stride: int) -> Tuple[int, int, int]:
    out = math.ceil(size / stride)
    total = max((out - 1) * stride + kernel - size, 0)
    return out, total // 2, total - total // 2


def _valid_padding(size: int, kernel: int, stride: int) -> Tuple[int, int, int]:
    return (size - kernel) // stride + 1, 0, 0


class Conv2d(Function):
    def forward(  # type: ignore[override]
        self,
        x: np.ndarray,
        weight: np.ndarray,
        bias: Optional[np.ndarray],
        padding: str = "same",
        stride: int = 1,
    ) -> np.ndarray:
        _check_4d("input", x)
        _check_4d("weight", weight)

        n, c_in, height, width = x.shape
        c_out, w_in, kh, kw = weight.shape

        if c_in != w_in:
            raise exceptions.ShapeMismatchError(
                f"input channels do not match weight: input {x.shape}, weight {weight.shape}"
            )

        if bias is not None and bias.shape != (c_out,):
            raise exceptions.ShapeMismatchError(
                f"bias must have shape ({c_out},), got {bias.shape} for weight {weight.shape}"
            )

        if not isinstance(stride, (int, np.integer)) or stride < 1:
            raise exceptions.InvalidArgumentsError(f"stride must be >= 1, got {stride}")

        if padding == "same":
            if kh % 2 == 0 or kw % 2 == 0:
                raise exceptions.UnsupportedConfigurationError(
                    f"same padding requires an odd kernel, got {kh}x{kw}"
                )
            out_h, top, bottom = _same_padding(height, kh, stride)
            out_w, left, right = _same_padding(width, kw, stride)
        elif padding == "valid":
            if height < kh or width < kw:
                raise exceptions.ShapeMismatchError(
                    f"kernel larger than input: input {x.shape}, weight {weight.shape}"
                )
            out_h, top, bottom = _valid_padding(height, kh, stride)
            out_w, left, right = _valid_padding(width, kw, stride)
        else:
            raise exceptions.InvalidArgumentsError(
                f"padding must be one of {PADDING_MODES}, got {padding!r}"
            )

        xp = np.pad(x, ((0, 0), (0, 0), (top, bottom), (left, right)))

        out = np.zeros((n, out_h, out_w, c_out), dtype=np.result_type(x, weight))
        for i in range(kh):
            for j in range(kw):
                patch = xp[
                    :, :, i : i + stride * (out_h - 1) + 1 : stride,
                    j : j + stride * (out_w - 1) + 1 : stride,
                ]
                out += np.tensordot(patch, weight[:, :, i, j], axes=([1], [1]))

        out = np.ascontiguousarray(out.transpose(0, 3, 1, 2))
        if bias is not None:
            out += bias[None, :, None, None]

        self.xp = xp
        self.weight = weight
        self.has_bias = bias is not None
        self.stride = stride
        self.crop = (top, left, height, width)
        return out

    def backward(self, grad: np.ndarray) -> GradTuple:
        xp, weight, stride = self.xp, self.weight, self.stride
        top, left, height, width = self.crop
        _, _, out_h, out_w = grad.shape
        _, _, kh, kw = weight.shape

        dxp = np.zeros(xp.shape, dtype=np.result_type(xp, grad))
        dweight = np.zeros(weight.shape, dtype=weight.dtype)

        for i in range(kh):
            for j in range(kw):
                rows = slice(i, i + stride * (out_h - 1) + 1, stride)
                cols = slice(j, j + stride * (out_w - 1) + 1, stride)
                dweight[:, :, i, j] = np.tensordot(
                    grad, xp[:, :, rows, cols], axes=([0, 2, 3], [0, 2, 3])
                )
                dxp[:, :, rows, cols] += np.tensordot(
                    grad, weight[:, :, i, j], axes=([1], [0])
                ).transpose(0, 3, 1, 2)

        dx = dxp[:, :, top : top + height, left : left + width]
        dbias = grad.sum(axis=(0, 2, 3)) if self.has_bias else None
        return dx, dweight, dbias


class ConvTranspose2d(Function):
    def forward(  # type: ignore[override]
        self, x: np.ndarray, weight: np.ndarray, bias: Optional[np.ndarray]
    ) -> np.ndarray:
        _check_4d("input", x)
        _check_4d("weight", weight)

        n, c_in, height, width = x.shape
        c_out, w_in, kh, kw = weight.shape

        if (kh, kw) != (2, 2):
            raise exceptions.UnsupportedConfigurationError(
                f"transposed convolution supports only 2x2 kernels with stride 2, got {kh}x{kw}"
            )

        if c_in != w_in:
            raise exceptions.ShapeMismatchError(
                f"input channels do not match weight: input {x.shape}, weight {weight.shape}"
            )

        if bias is not None and bias.shape != (c_out,):
            raise exceptions.ShapeMismatchError(
                f"bias must have shape ({c_out},), got {bias.shape} for weight {weight.shape}"
            )

        # (N, H, W, F, 2, 2) -> (N, F, H, 2, W, 2)
        out = np.tensordot(x, weight, axes=([1], [1])).transpose(0, 3, 1, 4, 2, 5)
        out = out.reshape(n, c_out, 2 * height, 2 * width)
        if bias is not None:
            out = out + bias[None, :, None, None]

        self.x = x
        self.weight = weight
        self.has_bias = bias is not None
        return np.ascontiguousarray(out)

    def backward(self, grad: np.ndarray) -> GradTuple:
        x, weight = self.x, self.weight
        n, c_out, out_h, out_w = grad.shape
        blocks = grad.reshape(n, c_out, out_h // 2, 2, out_w // 2, 2)

        dx = np.tensordot(blocks, weight, axes=([1, 3, 5], [0, 2, 3])).transpose(
            0, 3, 1, 2
        )
        dweight = np.tensordot(x, blocks, axes=([0, 2, 3], [0, 2, 4])).transpose(
            1, 0, 2, 3
        )
        dbias = grad.sum(axis=(0, 2, 3)) if self.has_bias else None
        return dx, dweight, dbias


class MaxPool2x2(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:  # type: ignore[override]
        _check_4d("input", x)
        n, c, height, width = x.shape
        if height % 2 or width % 2:
            raise exceptions.UnsupportedConfigurationError(
                f"2x2 max pooling requires even height and width, got {x.shape}"
            )

        # window index 0..3 in row-major order
        windows = (
            x.reshape(n, c, height // 2, 2, width // 2, 2)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(n, c, height // 2, width // 2, 4)
        )
        self.argmax = np.argmax(windows, axis=-1)[..., None]
        self.in_shape = x.shape
        return np.take_along_axis(windows, self.argmax, axis=-1)[..., 0]

    def backward(self, grad: np.ndarray) -> GradTuple:
        n, c, height, width = self.in_shape
        routed = np.zeros((n, c, height // 2, width // 2, 4), dtype=grad.dtype)
        np.put_along_axis(routed, self.argmax, grad[..., None], axis=-1)
        dx = (
            routed.reshape(n, c, height // 2, width // 2, 2, 2)
            .transpose(0, 1, 2, 4, 3, 5)
            .reshape(self.in_shape)
        )
        return (dx,)


class ReLU(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:  # type: ignore[override]
        self.mask = x > 0
        return np.where(self.mask, x, 0).astype(x.dtype, copy=False)

    def backward(self, grad: np.ndarray) -> GradTuple:
        return (grad * self.mask,)


class Sigmoid(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:  # type: ignore[override]
        out = np.empty_like(x)
        positive = x >= 0
        out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
        exp_x = np.exp(x[~positive])
        out[~positive] = exp_x / (1.0 + exp_x)
        self.out = out
        return out

    def backward(self, grad: np.ndarray) -> GradTuple:
        out = self.out
        return (grad * out * (1.0 - out),)


class BatchNormState:
    """Moving statistics of one batch normalization layer (non-trainable)"""

    def __init__(self, channels: int, dtype: np.dtype):
        self.moving_mean = np.zeros(channels, dtype=dtype)
        self.moving_variance = np.ones(channels, dtype=dtype)
        self.populated = False

    @property
    def channels(self) -> int:
        return self.moving_mean.shape[0]


class BatchNorm(Function):
    def forward(  # type: ignore[override]
        self,
        x: np.ndarray,
        gamma: Optional[np.ndarray],
        beta: np.ndarray,
        state: BatchNormState,
        training: bool,
        momentum: float,
        epsilon: float,
    ) -> np.ndarray:
        _check_4d("input", x)
        channels = x.shape[1]

        for label, vec in (("gamma", gamma), ("beta", beta)):
            if vec is not None and vec.shape != (channels,):
                raise exceptions.ShapeMismatchError(
                    f"{label} must have shape ({channels},), got {vec.shape} for input {x.shape}"
                )

        if state.channels != channels:
            raise exceptions.ShapeMismatchError(
                f"moving statistics have {state.channels} channels, input {x.shape}"
            )

        if training:
            mean = x.mean(axis=(0, 2, 3))
            variance = x.var(axis=(0, 2, 3))
            state.moving_mean = (
                momentum * state.moving_mean + (1 - momentum) * mean
            ).astype(state.moving_mean.dtype)
            state.moving_variance = (
                momentum * state.moving_variance + (1 - momentum) * variance
            ).astype(state.moving_variance.dtype)
            state.populated = True
        else:
            if not state.populated:
                raise exceptions.GraphError(
                    "batch normalization in inference mode requires moving statistics; "
                    "run a training step or load a checkpoint first"
                )
            mean = state.moving_mean
            variance = state.moving_variance

        inv_std = 1.0 / np.sqrt(variance + epsilon)
        xhat = (x - mean[None, :, None, None]) * inv_std[None, :, None, None]

        out = xhat if gamma is None else xhat * gamma[None, :, None, None]
        out = out + beta[None, :, None, None]

        self.xhat = xhat
        self.inv_std = inv_std
        self.gamma = gamma
        self.training = training
        return out.astype(x.dtype, copy=False)

    def backward(self, grad: np.ndarray) -> GradTuple:
        xhat, inv_std, gamma = self.xhat, self.inv_std, self.gamma

        dbeta = grad.sum(axis=(0, 2, 3))
        dgamma = (grad * xhat).sum(axis=(0, 2, 3)) if gamma is not None else None

        dxhat = grad if gamma is None else grad * gamma[None, :, None, None]
        scale = inv_std[None, :, None, None]

        if self.training:
            count = grad.shape[0] * grad.shape[2] * grad.shape[3]
            dx = (
                scale
                / count
                * (
                    count * dxhat
                    - dxhat.sum(axis=(0, 2, 3), keepdims=True)
                    - xhat * (dxhat * xhat).sum(axis=(0, 2, 3), keepdims=True)
                )
            )
        else:
            dx = dxhat * scale

        return dx, dgamma, dbeta


class Concat(Function):
    def forward(self, *arrays: np.ndarray) -> np.ndarray:  # type: ignore[override]
        if not arrays:
            raise exceptions.InvalidArgumentsError("concat needs at least one input")

        for arr in arrays:
            _check_4d("input", arr)

        reference = arrays[0].shape
        for arr in arrays[1:]:
            if (arr.shape[0],) + arr.shape[2:] != (reference[0],) + reference[2:]:
                raise exceptions.ShapeMismatchError(
                    f"concat inputs must agree on N, H, W: {reference} vs {arr.shape}"
                )

        self.splits = np.cumsum([arr.shape[1] for arr in arrays])[:-1]
        return np.concatenate(arrays, axis=1)

    def backward(self, grad: np.ndarray) -> GradTuple:
        return tuple(np.split(grad, self.splits, axis=1))


class Add(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:  # type: ignore[override]
        if a.shape != b.shape:
            raise exceptions.ShapeMismatchError(
                f"add inputs must have equal shapes: {a.shape} vs {b.shape}"
            )
        return a + b

    def backward(self, grad: np.ndarray) -> GradTuple:
        return grad, grad


class Sum(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:  # type: ignore[override]
        self.in_shape = x.shape
        return np.asarray(x.sum(), dtype=x.dtype)

    def backward(self, grad: np.ndarray) -> GradTuple:
        return (np.broadcast_to(grad, self.in_shape).copy(),)


class Mean(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:  # type: ignore[override]
        if x.size == 0:
            raise exceptions.InvalidArgumentsError("cannot take the mean of an empty tensor")
        self.in_shape = x.shape
        return np.asarray(x.mean(), dtype=x.dtype)

    def backward(self, grad: np.ndarray) -> GradTuple:
        size = int(np.prod(self.in_shape))
        return (np.broadcast_to(grad / size, self.in_shape).copy(),)


class Scale(Function):
    def forward(self, x: np.ndarray, factor: float) -> np.ndarray:  # type: ignore[override]
        self.factor = factor
        return (x * factor).astype(x.dtype, copy=False)

    def backward(self, grad: np.ndarray) -> GradTuple:
        return (grad * self.factor,)


def conv2d(
    x: Tensor,
    weight: Tensor,
    bias: Optional[Tensor] = None,
    padding: str = "same",
    stride: int = 1,
) -> Tensor:
    return Conv2d.apply(x, weight, bias, padding=padding, stride=stride)


def conv_transpose2d(
    x: Tensor,
    weight: Tensor,
    bias: Optional[Tensor] = None,
    kernel_size: int = 2,
    stride: int = 2,
) -> Tensor:
    if kernel_size != 2 or stride != 2:
        raise exceptions.UnsupportedConfigurationError(
            f"transposed convolution supports only 2x2 kernels with stride 2, "
            f"got kernel {kernel_size} stride {stride}"
        )
    return ConvTranspose2d.apply(x, weight, bias)


def maxpool2x2(x: Tensor) -> Tensor:
    return MaxPool2x2.apply(x)


def relu(x: Tensor) -> Tensor:
    return ReLU.apply(x)


def sigmoid(x: Tensor) -> Tensor:
    return Sigmoid.apply(x)


def batchnorm(
    x: Tensor,
    gamma: Optional[Tensor],
    beta: Tensor,
    state: BatchNormState,
    training: bool,
    momentum: Optional[float] = None,
    epsilon: Optional[float] = None,
) -> Tensor:
    """Per-channel normalization over N, H, W.

    Training mode normalizes with the (biased) batch statistics and folds
    them into ``state``; inference mode uses the moving statistics. Passing
    ``gamma=None`` skips the learned scale.
    """
    settings = get_settings()
    if momentum is None:
        momentum = settings.BN_MOMENTUM
    if epsilon is None:
        epsilon = settings.BN_EPSILON
    return BatchNorm.apply(
        x,
        gamma,
        beta,
        state=state,
        training=training,
        momentum=momentum,
        epsilon=epsilon,
    )


def concat(tensors: Sequence[Tensor]) -> Tensor:
    """Concatenate along channels, keeping argument order"""
    return Concat.apply(*tensors)


def add(a: Tensor, b: Tensor) -> Tensor:
    return Add.apply(a, b)


def sum(x: Tensor) -> Tensor:
    return Sum.apply(x)


def mean(x: Tensor) -> Tensor:
    return Mean.apply(x)


def scale(x: Tensor, factor: float) -> Tensor:
    return Scale.apply(x, factor=factor)
