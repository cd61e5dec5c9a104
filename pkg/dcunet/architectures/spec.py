"""architectures/spec.py

Declarative graph description shared by counting, summaries and models.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

import math
from dataclasses import dataclass, field, replace

from dcunet import exceptions

Shape = Tuple[int, int, int, int]

INPUT = "input"

LAYER_KINDS = (
    "conv2d",
    "conv_transpose2d",
    "maxpool2x2",
    "relu",
    "sigmoid",
    "batchnorm",
    "concat",
    "add",
)

BN_COUNTING = ("none", "trainable", "trainable+moving")
BN_PLACEMENT = ("per_conv", "per_block", "both")

#: Every spatial side must be divisible by this (four 2x2 poolings)
SPATIAL_DIVISOR = 16


@dataclass(frozen=True)
class CountConvention:
    """Layout and counting choices that decide a model's parameter total.

    ``conv_bias`` adds biases to regular convolutions (transposed
    convolutions always carry one). ``bn_counting`` either removes batch
    normalization (``none``) or decides whether the moving mean/variance
    are counted next to the trainable vectors. ``bn_placement`` puts batch
    normalization after every convolution, after every concatenation and
    block output, or both. ``bn_scale`` decides whether the per-convolution
    normalization learns a scale.
    """

    conv_bias: bool = False
    bn_counting: str = "trainable+moving"
    bn_placement: str = "both"
    bn_scale: bool = False

    def __post_init__(self) -> None:
        if self.bn_counting not in BN_COUNTING:
            raise exceptions.InvalidArgumentsError(
                f"bn_counting must be one of {BN_COUNTING}, got {self.bn_counting!r}"
            )
        if self.bn_placement not in BN_PLACEMENT:
            raise exceptions.InvalidArgumentsError(
                f"bn_placement must be one of {BN_PLACEMENT}, got {self.bn_placement!r}"
            )

    @property
    def uses_batchnorm(self) -> bool:
        return self.bn_counting != "none"

    @property
    def bn_per_conv(self) -> bool:
        return self.uses_batchnorm and self.bn_placement in ("per_conv", "both")

    @property
    def bn_per_block(self) -> bool:
        return self.uses_batchnorm and self.bn_placement in ("per_block", "both")

    @property
    def counts_moving_statistics(self) -> bool:
        return self.bn_counting == "trainable+moving"

    @property
    def label(self) -> str:
        bias = "bias" if self.conv_bias else "nobias"
        if not self.uses_batchnorm:
            return f"{bias}/bn=none"
        scale = "scale" if self.bn_scale else "noscale"
        return f"{bias}/bn={self.bn_counting}/{self.bn_placement}/{scale}"


#: conv -> BN without scale -> activation, BN after merges, moving statistics counted
REFERENCE_CONVENTION = CountConvention()


@dataclass(frozen=True)
class LayerSpec:
    path: str
    kind: str
    inputs: Tuple[str, ...]
    kernel: Optional[Tuple[int, int]] = None
    stride: int = 1
    padding: str = "same"
    filters: Optional[int] = None
    bias: bool = False
    scale: bool = True
    role: str = ""

    def __post_init__(self) -> None:
        if self.kind not in LAYER_KINDS:
            raise exceptions.InvalidArgumentsError(
                f"Unknown layer kind {self.kind!r} at {self.path}"
            )
        if self.kind in ("conv2d", "conv_transpose2d") and (
            self.kernel is None or self.filters is None
        ):
            raise exceptions.InvalidArgumentsError(
                f"Convolution {self.path} needs kernel and filters"
            )

    @property
    def is_conv(self) -> bool:
        return self.kind in ("conv2d", "conv_transpose2d")


@dataclass(frozen=True)
class BlockSpec:
    """A named group of layers (one row group of the architecture tables)"""

    name: str
    kind: str
    filters: Tuple[int, ...]
    units: int = 1
    stage: int = 0


@dataclass(frozen=True)
class GraphSpec:
    name: str
    in_channels: int
    layers: Tuple[LayerSpec, ...]
    blocks: Tuple[BlockSpec, ...] = ()
    output: str = INPUT
    convention: CountConvention = field(default_factory=CountConvention)
    options: Tuple[Tuple[str, Any], ...] = ()

    def __post_init__(self) -> None:
        seen = {INPUT}
        for layer in self.layers:
            if layer.path in seen:
                raise exceptions.InvalidArgumentsError(f"Duplicate layer path {layer.path}")
            for src in layer.inputs:
                if src not in seen:
                    raise exceptions.InvalidArgumentsError(
                        f"Layer {layer.path} reads {src} before it is defined"
                    )
            seen.add(layer.path)

        if self.output not in seen:
            raise exceptions.InvalidArgumentsError(f"Unknown output {self.output}")

    def __len__(self) -> int:
        return len(self.layers)

    def layer(self, path: str) -> LayerSpec:
        for layer in self.layers:
            if layer.path == path:
                return layer
        raise KeyError(path)

    def block(self, name: str) -> BlockSpec:
        for block in self.blocks:
            if block.name == name:
                return block
        raise KeyError(name)

    def layers_under(self, prefix: str) -> List[LayerSpec]:
        prefix = prefix.rstrip("/") + "/"
        return [layer for layer in self.layers if layer.path.startswith(prefix)]

    def rebuild(self, convention: CountConvention) -> "GraphSpec":
        """Build the same architecture under another convention"""
        if convention == self.convention:
            return self

        from dcunet.architectures import get_builder

        try:
            builder = get_builder(self.name)
        except exceptions.InvalidArgumentsError:
            # hand-made graph, layout stays; only the counting rule changes
            return replace(self, convention=convention)

        return builder(**dict(self.options), convention=convention)

    def export(self) -> str:
        """Deterministic text form, one layer per line"""
        lines = [
            f"# {self.name} in_channels={self.in_channels} "
            f"output={self.output} convention={self.convention.label}"
        ]
        for layer in self.layers:
            lines.append(_export_layer(layer))
        return "\n".join(lines) + "\n"


def _export_layer(layer: LayerSpec) -> str:
    attrs = [layer.path, layer.kind]
    if layer.kernel is not None:
        attrs.append(f"kernel={layer.kernel[0]}x{layer.kernel[1]}")
    if layer.kind == "conv2d":
        attrs.append(f"stride={layer.stride}")
        attrs.append(f"padding={layer.padding}")
    if layer.kind == "conv_transpose2d":
        attrs.append("stride=2")
    if layer.filters is not None:
        attrs.append(f"filters={layer.filters}")
    if layer.is_conv:
        attrs.append(f"bias={int(layer.bias)}")
    if layer.kind == "batchnorm":
        attrs.append(f"scale={int(layer.scale)}")
    if layer.role:
        attrs.append(f"role={layer.role}")
    attrs.append("inputs=" + ",".join(layer.inputs))
    return " ".join(attrs)


def check_input_shape(spec: GraphSpec, input_shape: Sequence[int]) -> Shape:
    if len(input_shape) != 4:
        raise exceptions.ShapeMismatchError(
            f"Input must have shape (N, C, H, W), got {tuple(input_shape)}"
        )

    n, c, height, width = (int(v) for v in input_shape)
    if c != spec.in_channels:
        raise exceptions.ShapeMismatchError(
            f"{spec.name} expects {spec.in_channels} input channels, got shape "
            f"{tuple(input_shape)}"
        )

    if n < 1 or height % SPATIAL_DIVISOR or width % SPATIAL_DIVISOR or not height or not width:
        raise exceptions.ShapeMismatchError(
            f"Input height and width must be positive multiples of {SPATIAL_DIVISOR}, "
            f"got {height}x{width}"
        )

    return n, c, height, width


def _infer_layer(layer: LayerSpec, shapes: Sequence[Shape]) -> Shape:
    n, c, height, width = shapes[0]

    if layer.kind == "conv2d":
        assert layer.kernel is not None and layer.filters is not None
        if layer.padding == "same":
            out_h, out_w = math.ceil(height / layer.stride), math.ceil(width / layer.stride)
        else:
            kh, kw = layer.kernel
            out_h = (height - kh) // layer.stride + 1
            out_w = (width - kw) // layer.stride + 1
        return n, layer.filters, out_h, out_w

    if layer.kind == "conv_transpose2d":
        assert layer.filters is not None
        return n, layer.filters, 2 * height, 2 * width

    if layer.kind == "maxpool2x2":
        if height % 2 or width % 2:
            raise exceptions.UnsupportedConfigurationError(
                f"{layer.path}: 2x2 max pooling requires even height and width, "
                f"got {shapes[0]}"
            )
        return n, c, height // 2, width // 2

    if layer.kind == "concat":
        for other in shapes[1:]:
            if (other[0],) + other[2:] != (n, height, width):
                raise exceptions.ShapeMismatchError(
                    f"{layer.path}: concat inputs must agree on N, H, W: "
                    f"{shapes[0]} vs {other}"
                )
        return n, sum(s[1] for s in shapes), height, width

    if layer.kind == "add":
        if shapes[1] != shapes[0]:
            raise exceptions.ShapeMismatchError(
                f"{layer.path}: add inputs must have equal shapes: {shapes[0]} vs {shapes[1]}"
            )
        return shapes[0]

    return shapes[0]


def infer_shapes(spec: GraphSpec, input_shape: Sequence[int]) -> Dict[str, Shape]:
    """Symbolic shape of every layer output (no arrays are allocated)"""
    shapes: Dict[str, Shape] = {INPUT: check_input_shape(spec, input_shape)}
    for layer in spec.layers:
        shapes[layer.path] = _infer_layer(layer, [shapes[src] for src in layer.inputs])
    return shapes


def nominal_shapes(spec: GraphSpec) -> Dict[str, Shape]:
    """Layer shapes for the smallest valid input, enough to read off channel counts"""
    return infer_shapes(spec, (1, spec.in_channels, SPATIAL_DIVISOR, SPATIAL_DIVISOR))

