"""robustness.py

Sensitivity of the similarity measures to image size and object area ratio.

Size changes shrink both images by an integer factor (nearest neighbour for
the ground truth, bilinear for the prediction). Ratio changes add equal blank
margins on all sides, scaling both side lengths by the ratio while the object
stays the same.
"""

from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, TextIO, Tuple

import logging
from collections import OrderedDict

import numpy as np

from dcunet import exceptions, get_settings, metrics, reports
from dcunet.image import GrayImage, downsample, pad, ratio_margins

logger = logging.getLogger(__name__)

DEFAULT_SIZES = (1, 2, 4)
DEFAULT_RATIOS = (1.0, 1.5, 2.0, 3.0)


class RobustnessRow(NamedTuple):
    measure: str
    size: int
    ratio: float
    pair: str
    value: float


class RobustnessTable:
    """Measure values per (measure, size, ratio, pair), in input order"""

    HEADER = RobustnessRow._fields

    def __init__(
        self,
        rows: Sequence[RobustnessRow],
        measures: Sequence[str],
        sizes: Sequence[int],
        ratios: Sequence[float],
    ):
        self.rows = list(rows)
        self.measures = tuple(measures)
        self.sizes = tuple(sizes)
        self.ratios = tuple(ratios)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[RobustnessRow]:
        return iter(self.rows)

    def values(self, measure: str, size: int, ratio: float) -> List[float]:
        return [
            row.value
            for row in self.rows
            if row.measure == measure and row.size == size and row.ratio == ratio
        ]

    def means(self) -> Dict[Tuple[str, int, float], float]:
        out: Dict[Tuple[str, int, float], float] = OrderedDict()
        for measure in self.measures:
            for size in self.sizes:
                for ratio in self.ratios:
                    out[(measure, size, ratio)] = float(
                        np.mean(self.values(measure, size, ratio))
                    )
        return out

    def series(self, measure: str, axis: str) -> List[Tuple[float, float]]:
        """Plot-ready (x, mean value) points along ``size`` or ``ratio``.

        The other axis is held at its first value.
        """
        if axis == "size":
            return [
                (size, float(np.mean(self.values(measure, size, self.ratios[0]))))
                for size in self.sizes
            ]
        if axis == "ratio":
            return [
                (ratio, float(np.mean(self.values(measure, self.sizes[0], ratio))))
                for ratio in self.ratios
            ]
        raise exceptions.InvalidArgumentsError(
            f"Axis must be 'size' or 'ratio', got {axis!r}"
        )

    def write(self, stream: TextIO) -> None:
        footer = [
            (measure, size, ratio, "mean", value)
            for (measure, size, ratio), value in self.means().items()
        ]
        reports.write_table(stream, self.HEADER, self.rows, footer)


def transform_pair(
    prediction: GrayImage, truth: GrayImage, size: int, ratio: float
) -> Tuple[GrayImage, GrayImage]:
    """Down-sample both images by ``size``, then pad both to the area ``ratio``"""
    prediction = downsample(prediction, size, mode="bilinear")
    truth = downsample(truth, size, mode="nearest")

    margin_y, margin_x = ratio_margins(truth, ratio)
    return pad(prediction, margin_y, margin_x), pad(truth, margin_y, margin_x)


def _check_grid(
    pairs: Sequence[Tuple[GrayImage, GrayImage]],
    sizes: Sequence[int],
    ratios: Sequence[float],
    measures: Sequence[str],
) -> None:
    if not pairs:
        raise exceptions.InvalidArgumentsError("Robustness experiment needs at least one pair")
    if not sizes or not ratios:
        raise exceptions.InvalidArgumentsError("Sizes and ratios must not be empty")

    for size in sizes:
        if int(size) != size or size < 1:
            raise exceptions.InvalidArgumentsError(
                f"Sizes are integer down-sampling factors >= 1, got {size}"
            )
    for ratio in ratios:
        if not ratio >= 1:
            raise exceptions.InvalidArgumentsError(f"Ratios must be >= 1, got {ratio}")

    for name in measures:
        metrics.get_measure(name)

    if "ssim" in measures:
        window = get_settings().SSIM_WINDOW
        for prediction, _ in pairs:
            smallest = min(prediction.width, prediction.height) // max(sizes)
            if smallest < window:
                raise exceptions.InvalidArgumentsError(
                    f"Down-sampling {prediction!r} by {max(sizes)} leaves fewer pixels "
                    f"than the SSIM window ({window})"
                )


def robustness_experiment(
    pairs: Sequence[Tuple[GrayImage, GrayImage]],
    sizes: Sequence[int] = DEFAULT_SIZES,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    measures: Sequence[str] = metrics.AVAILABLE_MEASURES,
    names: Optional[Sequence[str]] = None,
) -> RobustnessTable:
    """Evaluate every measure on every (size, ratio) variant of every pair.

    Jaccard always goes through Otsu binarization of the transformed
    prediction. Raises :class:`~dcunet.exceptions.NumericalError` if the
    Tanimoto values of a pair change along the ratio axis.
    """
    _check_grid(pairs, sizes, ratios, measures)

    if names is None:
        names = [str(i) for i in range(len(pairs))]

    if len(names) != len(pairs):
        raise exceptions.InvalidArgumentsError(
            f"Got {len(names)} names for {len(pairs)} pairs"
        )

    sizes = [int(size) for size in sizes]
    ratios = [float(ratio) for ratio in ratios]

    results: Dict[Tuple[str, int, float, str], float] = {}
    for name, (prediction, truth) in zip(names, pairs):
        metrics.check_pair(prediction, truth)

        for size in sizes:
            for ratio in ratios:
                pred_t, truth_t = transform_pair(prediction, truth, size, ratio)
                values = metrics.compare(pred_t, truth_t, measures, otsu=True)
                for measure, value in values.items():
                    results[(measure, size, ratio, name)] = value

            if "tanimoto" in measures:
                series = {results[("tanimoto", size, ratio, name)] for ratio in ratios}
                if len(series) != 1:
                    raise exceptions.NumericalError(
                        f"Tanimoto similarity of pair {name!r} at size {size} "
                        f"changed with the area ratio: {sorted(series)}"
                    )

        logger.debug("Evaluated robustness grid for pair %s", name)

    rows = [
        RobustnessRow(measure, size, ratio, name, results[(measure, size, ratio, name)])
        for measure in measures
        for size in sizes
        for ratio in ratios
        for name in names
    ]
    return RobustnessTable(rows, measures, sizes, ratios)
