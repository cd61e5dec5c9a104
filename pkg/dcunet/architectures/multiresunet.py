"""architectures/multiresunet.py

MultiResUNet: MultiRes blocks with Res-Paths on every skip connection.
"""

from typing import Optional, Sequence

from dcunet.architectures.blocks import (
    GraphBuilder,
    check_stages,
    encoder_decoder,
    head,
    multires_block,
)
from dcunet.architectures.schedule import DEFAULT_ALPHA
from dcunet.architectures.spec import REFERENCE_CONVENTION, CountConvention, GraphSpec

DEFAULT_BASE_U = (64, 128, 256, 512, 1024)


def build_multiresunet(
    alpha: float = DEFAULT_ALPHA,
    base_U: Sequence[int] = DEFAULT_BASE_U,
    in_channels: int = 1,
    convention: Optional[CountConvention] = None,
) -> GraphSpec:
    stages = check_stages(base_U, "base_U", in_channels)
    b = GraphBuilder(convention or REFERENCE_CONVENTION)

    def block(b: GraphBuilder, path: str, src: str, U: int, stage: int) -> str:
        return multires_block(b, path, src, U, alpha, stage)

    out = encoder_decoder(b, block, stages, res_paths=True)
    out = head(b, out)

    return b.finish(
        "multires",
        in_channels,
        out,
        dict(alpha=alpha, base_U=stages, in_channels=in_channels),
    )
