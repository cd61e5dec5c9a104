"""architectures/dcunet.py

DC-UNet: Dual-Channel blocks with Res-Paths; the bridge has no Res-Path.
"""

from typing import Optional, Sequence

from dcunet.architectures.blocks import (
    GraphBuilder,
    check_stages,
    dual_channel_block,
    encoder_decoder,
    head,
)
from dcunet.architectures.schedule import DEFAULT_ALPHA
from dcunet.architectures.spec import REFERENCE_CONVENTION, CountConvention, GraphSpec

#: half the MultiResUNet widths, per channel
DEFAULT_BASE_U = (32, 64, 128, 256, 512)


def build_dcunet(
    alpha: float = DEFAULT_ALPHA,
    base_U: Sequence[int] = DEFAULT_BASE_U,
    in_channels: int = 1,
    convention: Optional[CountConvention] = None,
) -> GraphSpec:
    stages = check_stages(base_U, "base_U", in_channels)
    b = GraphBuilder(convention or REFERENCE_CONVENTION)

    def block(b: GraphBuilder, path: str, src: str, U: int, stage: int) -> str:
        return dual_channel_block(b, path, src, U, alpha, stage)

    out = encoder_decoder(b, block, stages, res_paths=True)
    out = head(b, out)

    return b.finish(
        "dcunet",
        in_channels,
        out,
        dict(alpha=alpha, base_U=stages, in_channels=in_channels),
    )
