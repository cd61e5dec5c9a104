"""architectures/counting.py

Symbolic parameter counting, the convention sweep and model summaries.
"""

from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import itertools
import logging

from dcunet.architectures.spec import (
    BN_COUNTING,
    BN_PLACEMENT,
    CountConvention,
    GraphSpec,
    LayerSpec,
    infer_shapes,
    nominal_shapes,
)
from dcunet.reports import format_text_table

logger = logging.getLogger(__name__)

#: Published totals of the three full-width models (one input channel)
PUBLISHED_TOTALS: Dict[str, int] = {
    "unet": 31_031_685,
    "multires": 29_061_741,
    "dcunet": 10_069_640,
}


class LedgerRow(NamedTuple):
    path: str
    kind: str
    trainable: int
    non_trainable: int

    @property
    def total(self) -> int:
        return self.trainable + self.non_trainable


class ParamLedger(NamedTuple):
    name: str
    convention: CountConvention
    rows: Tuple[LedgerRow, ...]

    @property
    def trainable(self) -> int:
        return sum(row.trainable for row in self.rows)

    @property
    def non_trainable(self) -> int:
        return sum(row.non_trainable for row in self.rows)

    @property
    def total(self) -> int:
        return sum(row.total for row in self.rows)


def layer_params(
    layer: LayerSpec, in_channels: int, convention: CountConvention
) -> Tuple[int, int]:
    """(trainable, counted non-trainable) parameters of one layer"""
    if layer.is_conv:
        assert layer.kernel is not None and layer.filters is not None
        kh, kw = layer.kernel
        weights = kh * kw * in_channels * layer.filters
        return weights + (layer.filters if layer.bias else 0), 0

    if layer.kind == "batchnorm":
        trainable = (2 if layer.scale else 1) * in_channels
        moving = 2 * in_channels if convention.counts_moving_statistics else 0
        return trainable, moving

    return 0, 0


def count_params(spec: GraphSpec, convention: Optional[CountConvention] = None) -> ParamLedger:
    """Per-layer and total parameter counts; no arrays are allocated.

    When ``convention`` differs from the one the graph was built with, the
    same architecture is rebuilt under it first.
    """
    if convention is not None:
        spec = spec.rebuild(convention)

    shapes = nominal_shapes(spec)
    rows = []
    for layer in spec.layers:
        in_channels = shapes[layer.inputs[0]][1]
        trainable, non_trainable = layer_params(layer, in_channels, spec.convention)
        rows.append(LedgerRow(layer.path, layer.kind, trainable, non_trainable))

    return ParamLedger(spec.name, spec.convention, tuple(rows))


def all_conventions() -> List[CountConvention]:
    """Every distinct convention; placement and scale are moot without batch normalization"""
    conventions = []
    for conv_bias in (True, False):
        conventions.append(CountConvention(conv_bias, "none", "both", False))
        for bn_counting, bn_placement, bn_scale in itertools.product(
            BN_COUNTING[1:], BN_PLACEMENT, (True, False)
        ):
            conventions.append(
                CountConvention(conv_bias, bn_counting, bn_placement, bn_scale)
            )
    return conventions


class SweepResult(NamedTuple):
    convention: CountConvention
    totals: Dict[str, int]
    errors: Dict[str, float]

    @property
    def max_error(self) -> float:
        return max(self.errors.values())

    @property
    def sum_error(self) -> float:
        return sum(self.errors.values())


def convention_sweep(
    specs: Sequence[GraphSpec], targets: Optional[Dict[str, int]] = None
) -> List[SweepResult]:
    """Count every spec under every convention, best match first.

    Results are ranked by the largest relative error against ``targets``,
    then by the summed relative error.
    """
    if targets is None:
        targets = PUBLISHED_TOTALS

    results = []
    for convention in all_conventions():
        totals = {spec.name: count_params(spec, convention).total for spec in specs}
        errors = {
            name: abs(total - targets[name]) / targets[name]
            for name, total in totals.items()
            if name in targets
        }
        logger.debug("%s: %s", convention.label, totals)
        results.append(SweepResult(convention, totals, errors))

    return sorted(results, key=lambda r: (r.max_error, r.sum_error))


SUMMARY_HEADER = ("path", "kind", "kernel", "filters", "params", "output shape")


def summarize(spec: GraphSpec, input_shape: Optional[Sequence[int]] = None) -> str:
    """Human-readable table in construction order, one row per layer"""
    if input_shape is None:
        from dcunet import get_settings

        height, width = get_settings().INPUT_SIZE
        input_shape = (1, spec.in_channels, height, width)

    shapes = infer_shapes(spec, input_shape)
    ledger = count_params(spec)

    rows = []
    for layer, row in zip(spec.layers, ledger.rows):
        rows.append(
            (
                layer.path,
                layer.kind,
                layer.kernel,
                layer.filters,
                row.total if layer.is_conv or layer.kind == "batchnorm" else None,
                shapes[layer.path],
            )
        )

    title = (
        f"# {spec.name}  convention={spec.convention.label}  "
        f"total_params={ledger.total}  trainable={ledger.trainable}"
    )
    return title + "\n" + format_text_table(SUMMARY_HEADER, rows)
