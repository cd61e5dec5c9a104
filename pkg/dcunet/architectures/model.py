"""architectures/model.py

Concrete parameters for a GraphSpec and its forward pass.
"""

from typing import Dict, Mapping, Optional, Union

import logging
from collections import OrderedDict

import numpy as np

from dcunet import checkpoint, exceptions, get_settings, ops
from dcunet.architectures.spec import INPUT, GraphSpec, check_input_shape, nominal_shapes
from dcunet.profile import trace
from dcunet.tensor import Tensor

logger = logging.getLogger(__name__)


def glorot_uniform(
    rng: np.random.Generator, shape: tuple, fan_in: int, fan_out: int, dtype: np.dtype
) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


class Model:
    """Parameters and moving statistics of one GraphSpec.

    Parameters are named ``<layer path>/weight``, ``/bias``, ``/gamma`` and
    ``/beta``; batch normalization buffers ``/moving_mean`` and
    ``/moving_variance``.
    """

    def __init__(
        self,
        spec: GraphSpec,
        seed: Optional[int] = None,
        dtype: Union[str, np.dtype, None] = None,
    ):
        self.spec = spec
        self.dtype = np.dtype(dtype or get_settings().FLOAT_DTYPE)
        self.params: Dict[str, Tensor] = OrderedDict()
        self.bn_states: Dict[str, ops.BatchNormState] = OrderedDict()

        rng = np.random.default_rng(seed)
        shapes = nominal_shapes(spec)

        for layer in spec.layers:
            in_channels = shapes[layer.inputs[0]][1]

            if layer.is_conv:
                assert layer.kernel is not None and layer.filters is not None
                kh, kw = layer.kernel
                shape = (layer.filters, in_channels, kh, kw)
                self._add_param(
                    f"{layer.path}/weight",
                    glorot_uniform(
                        rng,
                        shape,
                        in_channels * kh * kw,
                        layer.filters * kh * kw,
                        self.dtype,
                    ),
                )
                if layer.bias:
                    self._add_param(
                        f"{layer.path}/bias", np.zeros(layer.filters, dtype=self.dtype)
                    )

            elif layer.kind == "batchnorm":
                if layer.scale:
                    self._add_param(
                        f"{layer.path}/gamma", np.ones(in_channels, dtype=self.dtype)
                    )
                self._add_param(
                    f"{layer.path}/beta", np.zeros(in_channels, dtype=self.dtype)
                )
                self.bn_states[layer.path] = ops.BatchNormState(in_channels, self.dtype)

    def _add_param(self, name: str, data: np.ndarray) -> None:
        self.params[name] = Tensor(data, requires_grad=True, name=name, dtype=self.dtype)

    def buffers(self) -> Dict[str, np.ndarray]:
        out: Dict[str, np.ndarray] = OrderedDict()
        for path, state in self.bn_states.items():
            out[f"{path}/moving_mean"] = state.moving_mean
            out[f"{path}/moving_variance"] = state.moving_variance
        return out

    def num_elements(self) -> int:
        """Number of allocated parameter and buffer values"""
        return sum(p.data.size for p in self.params.values()) + sum(
            b.size for b in self.buffers().values()
        )

    def zero_grad(self) -> None:
        for param in self.params.values():
            param.zero_grad()

    def state_dict(self) -> Dict[str, np.ndarray]:
        out: Dict[str, np.ndarray] = OrderedDict(
            (name, param.data) for name, param in self.params.items()
        )
        out.update(self.buffers())
        return out

    def load_state_dict(self, arrays: Mapping[str, np.ndarray]) -> None:
        expected = self.state_dict()

        missing = [name for name in expected if name not in arrays]
        unexpected = [name for name in arrays if name not in expected]
        if missing or unexpected:
            raise exceptions.InvalidCheckpointError(
                f"Checkpoint does not match {self.spec.name}: "
                f"missing {missing[:5]}, unexpected {unexpected[:5]}"
            )

        for name, arr in arrays.items():
            if arr.shape != expected[name].shape:
                raise exceptions.InvalidCheckpointError(
                    f"Shape mismatch for {name}: checkpoint {arr.shape}, "
                    f"model {expected[name].shape}"
                )

        for name, param in self.params.items():
            param.data = np.array(arrays[name], dtype=self.dtype)
            param.zero_grad()

        for path, state in self.bn_states.items():
            state.moving_mean = np.array(arrays[f"{path}/moving_mean"], dtype=self.dtype)
            state.moving_variance = np.array(
                arrays[f"{path}/moving_variance"], dtype=self.dtype
            )
            state.populated = True

    def save(self, path: checkpoint.PathLike) -> None:
        checkpoint.save(path, self.state_dict())

    def load(self, path: checkpoint.PathLike) -> None:
        self.load_state_dict(checkpoint.load(path))

    def forward(self, x: Union[Tensor, np.ndarray], training: bool = False) -> Tensor:
        """Run the graph; the output has shape (N, 1, H, W) with values in (0, 1)"""
        if not isinstance(x, Tensor):
            x = Tensor(x, dtype=self.dtype)

        check_input_shape(self.spec, x.shape)

        settings = get_settings()
        outputs: Dict[str, Tensor] = {INPUT: x}

        with trace(f"{self.spec.name}_forward"):
            for layer in self.spec.layers:
                inputs = [outputs[src] for src in layer.inputs]
                path = layer.path

                if layer.kind == "conv2d":
                    out = ops.conv2d(
                        inputs[0],
                        self.params[f"{path}/weight"],
                        self.params.get(f"{path}/bias"),
                        padding=layer.padding,
                        stride=layer.stride,
                    )
                elif layer.kind == "conv_transpose2d":
                    out = ops.conv_transpose2d(
                        inputs[0],
                        self.params[f"{path}/weight"],
                        self.params.get(f"{path}/bias"),
                    )
                elif layer.kind == "batchnorm":
                    out = ops.batchnorm(
                        inputs[0],
                        self.params.get(f"{path}/gamma"),
                        self.params[f"{path}/beta"],
                        self.bn_states[path],
                        training=training,
                        momentum=settings.BN_MOMENTUM,
                        epsilon=settings.BN_EPSILON,
                    )
                elif layer.kind == "maxpool2x2":
                    out = ops.maxpool2x2(inputs[0])
                elif layer.kind == "relu":
                    out = ops.relu(inputs[0])
                elif layer.kind == "sigmoid":
                    out = ops.sigmoid(inputs[0])
                elif layer.kind == "concat":
                    out = ops.concat(inputs)
                elif layer.kind == "add":
                    out = ops.add(inputs[0], inputs[1])
                else:  # pragma: no cover
                    raise exceptions.GraphError(f"Unknown layer kind {layer.kind}")

                outputs[path] = out

        return outputs[self.spec.output]

    __call__ = forward
