"""architectures/blocks.py

Graph builder and the building blocks shared by the three architectures.
"""

from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from dcunet import exceptions
from dcunet.architectures.schedule import filter_schedule
from dcunet.architectures.spec import (
    INPUT,
    BlockSpec,
    CountConvention,
    GraphSpec,
    LayerSpec,
)


class GraphBuilder:
    """Accumulates layers in construction order"""

    def __init__(self, convention: CountConvention):
        self.convention = convention
        self.layers: List[LayerSpec] = []
        self.blocks: List[BlockSpec] = []

    def _add(self, layer: LayerSpec) -> str:
        self.layers.append(layer)
        return layer.path

    def conv(
        self,
        path: str,
        src: str,
        filters: int,
        kernel: int,
        bias: Optional[bool] = None,
        role: str = "",
    ) -> str:
        if bias is None:
            bias = self.convention.conv_bias
        return self._add(
            LayerSpec(
                path,
                "conv2d",
                (src,),
                kernel=(kernel, kernel),
                filters=filters,
                bias=bias,
                role=role,
            )
        )

    def conv_transpose(self, path: str, src: str, filters: int) -> str:
        return self._add(
            LayerSpec(
                path,
                "conv_transpose2d",
                (src,),
                kernel=(2, 2),
                stride=2,
                filters=filters,
                bias=True,
                role="upsample",
            )
        )

    def batchnorm(self, path: str, src: str, scale: bool = True, role: str = "") -> str:
        return self._add(LayerSpec(path, "batchnorm", (src,), scale=scale, role=role))

    def activation(self, path: str, src: str, kind: str) -> str:
        return self._add(LayerSpec(path, kind, (src,)))

    def maxpool(self, path: str, src: str) -> str:
        return self._add(LayerSpec(path, "maxpool2x2", (src,)))

    def concat(self, path: str, srcs: Sequence[str]) -> str:
        return self._add(LayerSpec(path, "concat", tuple(srcs)))

    def add(self, path: str, a: str, b: str) -> str:
        return self._add(LayerSpec(path, "add", (a, b)))

    def merge_bn(self, path: str, src: str) -> str:
        """Batch normalization after a merge or at a block output"""
        if not self.convention.bn_per_block:
            return src
        return self.batchnorm(path, src, scale=True, role="per_block")

    def block(self, spec: BlockSpec) -> None:
        self.blocks.append(spec)

    def finish(
        self, name: str, in_channels: int, output: str, options: Dict[str, Any]
    ) -> GraphSpec:
        return GraphSpec(
            name=name,
            in_channels=in_channels,
            layers=tuple(self.layers),
            blocks=tuple(self.blocks),
            output=output,
            convention=self.convention,
            options=tuple(sorted(options.items())),
        )


def conv_unit(
    b: GraphBuilder,
    path: str,
    src: str,
    filters: int,
    kernel: int,
    activation: Optional[str] = "relu",
    role: str = "",
) -> str:
    """Convolution, optional batch normalization, optional activation"""
    out = b.conv(f"{path}/conv", src, filters, kernel, role=role)
    if b.convention.bn_per_conv:
        out = b.batchnorm(f"{path}/bn", out, scale=b.convention.bn_scale, role="per_conv")
    if activation is not None:
        out = b.activation(f"{path}/{activation}", out, activation)
    return out


def conv_pair(b: GraphBuilder, path: str, src: str, filters: int, stage: int) -> str:
    b.block(BlockSpec(path, "conv_pair", (filters, filters), stage=stage))
    out = conv_unit(b, f"{path}/conv1", src, filters, 3)
    return conv_unit(b, f"{path}/conv2", out, filters, 3)


def _conv_chain(
    b: GraphBuilder, path: str, src: str, widths: Tuple[int, int, int]
) -> List[str]:
    outs = []
    out = src
    for i, width in enumerate(widths, 1):
        out = conv_unit(b, f"{path}/conv{i}", out, width, 3)
        outs.append(out)
    return outs


def multires_block(
    b: GraphBuilder, path: str, src: str, U: int, alpha: float, stage: int
) -> str:
    """Three chained 3x3 convolutions, concatenated, plus a 1x1 residual"""
    schedule = filter_schedule(U, alpha)
    b.block(BlockSpec(path, "multires", schedule.widths + (schedule.residual,), stage=stage))

    shortcut = conv_unit(
        b, f"{path}/shortcut", src, schedule.residual, 1, activation=None, role="residual"
    )
    chain = _conv_chain(b, path, src, schedule.widths)
    out = b.concat(f"{path}/concat", chain)
    out = b.merge_bn(f"{path}/concat_bn", out)
    out = b.add(f"{path}/add", shortcut, out)
    out = b.activation(f"{path}/relu", out, "relu")
    return b.merge_bn(f"{path}/bn", out)


def dual_channel_block(
    b: GraphBuilder, path: str, src: str, U: int, alpha: float, stage: int
) -> str:
    """Two parallel chains of three 3x3 convolutions whose concatenations are summed"""
    schedule = filter_schedule(U, alpha)
    b.block(BlockSpec(path, "dual_channel", schedule.widths, stage=stage))

    merged = []
    for side in ("left", "right"):
        chain = _conv_chain(b, f"{path}/{side}", src, schedule.widths)
        out = b.concat(f"{path}/{side}/concat", chain)
        merged.append(b.merge_bn(f"{path}/{side}/bn", out))

    out = b.add(f"{path}/add", merged[0], merged[1])
    out = b.activation(f"{path}/relu", out, "relu")
    return b.merge_bn(f"{path}/bn", out)


def res_path(
    b: GraphBuilder, path: str, src: str, filters: int, length: int, stage: int
) -> str:
    """Chain of (3x3 convolution + 1x1 residual) units on a skip connection"""
    b.block(BlockSpec(path, "res_path", (filters,), units=length, stage=stage))

    out = src
    for i in range(1, length + 1):
        unit = f"{path}/unit{i}"
        shortcut = conv_unit(
            b, f"{unit}/shortcut", out, filters, 1, activation=None, role="residual"
        )
        conv = conv_unit(b, f"{unit}/conv", out, filters, 3)
        out = b.add(f"{unit}/add", shortcut, conv)
        out = b.activation(f"{unit}/relu", out, "relu")
        out = b.merge_bn(f"{unit}/bn", out)
    return out


def down(b: GraphBuilder, path: str, src: str, stage: int) -> str:
    b.block(BlockSpec(path, "down", (), stage=stage))
    return b.maxpool(path, src)


def up(b: GraphBuilder, path: str, src: str, skip: str, filters: int, stage: int) -> str:
    """Transposed convolution followed by concatenation with the skip features"""
    b.block(BlockSpec(path, "up", (filters,), stage=stage))
    out = b.conv_transpose(f"{path}/conv_transpose", src, filters)
    return b.concat(f"{path}/concat", [out, skip])


def head(b: GraphBuilder, src: str) -> str:
    b.block(BlockSpec("head", "head", (1,)))
    return conv_unit(b, "head", src, 1, 1, activation="sigmoid", role="head")


NUM_STAGES = 5


def check_stages(values: Sequence[int], what: str, in_channels: int) -> Tuple[int, ...]:
    values = tuple(int(v) for v in values)
    if len(values) != NUM_STAGES:
        raise exceptions.InvalidArgumentsError(
            f"{what} must have {NUM_STAGES} entries (one per stage), got {len(values)}"
        )
    if min(values) < 1:
        raise exceptions.InvalidArgumentsError(f"{what} must be positive, got {values}")
    if in_channels < 1:
        raise exceptions.InvalidArgumentsError(
            f"in_channels must be positive, got {in_channels}"
        )
    return values


BlockFn = Callable[[GraphBuilder, str, str, int, int], str]

#: number of Res-Path units on the skip connection of encoder stages 1..4
RES_PATH_LENGTHS = (4, 3, 2, 1)


def encoder_decoder(
    b: GraphBuilder, block: BlockFn, stages: Sequence[int], res_paths: bool
) -> str:
    """Five-stage encoder, bridge and mirrored decoder; returns the last decoder output.

    Stage ``s`` of the decoder (blocks 6..9) reuses the width of encoder stage
    ``10 - s`` for its up-sampling and its block.
    """
    skips = []
    out = INPUT
    for stage in range(1, NUM_STAGES):
        out = block(b, f"block{stage}", out, stages[stage - 1], stage)
        skip = out
        if res_paths:
            skip = res_path(
                b,
                f"respath{stage}",
                out,
                stages[stage - 1],
                RES_PATH_LENGTHS[stage - 1],
                stage,
            )
        skips.append(skip)
        out = down(b, f"pool{stage}", out, stage)

    out = block(b, f"block{NUM_STAGES}", out, stages[-1], NUM_STAGES)

    for stage in range(NUM_STAGES + 1, 2 * NUM_STAGES):
        mirror = 2 * NUM_STAGES - stage
        out = up(b, f"up{stage}", out, skips[mirror - 1], stages[mirror - 1], stage)
        out = block(b, f"block{stage}", out, stages[mirror - 1], stage)

    return out
