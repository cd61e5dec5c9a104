"""architectures/unet.py

Classical U-Net: two 3x3 convolutions per stage, concatenated skips.
"""

from typing import Optional, Sequence

from dcunet.architectures.blocks import (
    GraphBuilder,
    check_stages,
    conv_pair,
    conv_unit,
    encoder_decoder,
    head,
)
from dcunet.architectures.spec import REFERENCE_CONVENTION, CountConvention, GraphSpec

DEFAULT_BASE_FILTERS = (64, 128, 256, 512, 1024)

#: width of the 3x3 convolution in front of the 1x1 head (two-class output layer)
DEFAULT_PRE_HEAD_FILTERS = 2


def build_unet(
    base_filters: Sequence[int] = DEFAULT_BASE_FILTERS,
    in_channels: int = 1,
    convention: Optional[CountConvention] = None,
    pre_head_filters: int = DEFAULT_PRE_HEAD_FILTERS,
) -> GraphSpec:
    stages = check_stages(base_filters, "base_filters", in_channels)
    b = GraphBuilder(convention or REFERENCE_CONVENTION)

    out = encoder_decoder(b, conv_pair, stages, res_paths=False)
    if pre_head_filters:
        out = conv_unit(b, "prehead", out, pre_head_filters, 3)
    out = head(b, out)

    return b.finish(
        "unet",
        in_channels,
        out,
        dict(
            base_filters=stages,
            in_channels=in_channels,
            pre_head_filters=pre_head_filters,
        ),
    )
