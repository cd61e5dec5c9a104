"""metrics.py

Similarity measures between a predicted and a ground truth image.

All measures return values in [0, 1], with 1 meaning identical. Foreground is
the maximum intensity (255 for 8-bit masks), background is 0.
"""

from typing import Callable, Dict, List, Mapping, Optional, Sequence, TextIO, Tuple

import logging
from collections import OrderedDict

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from dcunet import exceptions, get_settings, reports
from dcunet.image import GrayImage

logger = logging.getLogger(__name__)

AVAILABLE_MEASURES = ("jaccard", "mae", "ssim", "tanimoto")


def check_pair(a: GrayImage, b: GrayImage, check_depth: bool = False) -> None:
    if a.shape != b.shape:
        raise exceptions.InvalidImageError(
            f"Images must have equal dimensions, got {a.width}x{a.height} "
            f"and {b.width}x{b.height}"
        )
    if check_depth and a.depth != b.depth:
        raise exceptions.InvalidImageError(
            f"Images must have equal depth, got {a.depth} and {b.depth}"
        )


def otsu_threshold(img: GrayImage) -> float:
    """Threshold maximizing the between-class variance of the intensity histogram.

    Candidates lie halfway between consecutive intensity levels, so pixels
    strictly above the returned value form the upper class. The histogram is
    taken over the occupied range only; ties resolve to the smallest
    threshold.

    Example:

        >>> import numpy as np
        >>> from dcunet.image import GrayImage
        >>> img = GrayImage(np.array([[50, 50, 200, 200]], dtype="uint8"))
        >>> otsu_threshold(img)
        50.5

    """
    pixels = img.pixels.ravel()
    lower, upper = int(pixels.min()), int(pixels.max())
    if lower == upper:
        raise exceptions.InvalidImageError(
            f"Cannot threshold a constant image ({img!r}, all pixels {lower})"
        )

    hist = np.bincount(pixels.astype(np.int64) - lower).astype(np.float64)
    levels = np.arange(hist.size, dtype=np.float64)

    # class weights and means for every split after level k
    weight1 = np.cumsum(hist)
    weight2 = np.cumsum(hist[::-1])[::-1]
    mean1 = np.cumsum(hist * levels) / weight1
    mean2 = (np.cumsum((hist * levels)[::-1]) / weight2[::-1])[::-1]

    variance12 = weight1[:-1] * weight2[1:] * (mean1[:-1] - mean2[1:]) ** 2
    k = int(np.argmax(variance12))
    return lower + k + 0.5


def binarize(img: GrayImage, threshold: float) -> GrayImage:
    """8-bit mask with 255 where the intensity exceeds ``threshold``"""
    out = np.where(img.pixels > threshold, 255, 0).astype(np.uint8)
    return GrayImage(out, 8)


def otsu_binarize(img: GrayImage) -> GrayImage:
    """Binary masks pass through, anything else is thresholded with Otsu's method"""
    if img.is_binary():
        return img
    threshold = otsu_threshold(img)
    logger.debug("Otsu threshold of %r is %s", img, threshold)
    return binarize(img, threshold)


def jaccard(a: GrayImage, b: GrayImage) -> float:
    """Intersection over union of two binary masks; two empty masks are identical"""
    check_pair(a, b)
    for label, img in (("first", a), ("second", b)):
        if not img.is_binary():
            raise exceptions.InvalidImageError(
                f"Jaccard similarity needs binary masks, {label} image {img!r} has "
                f"{np.unique(img.pixels).size} distinct values; binarize it first"
            )

    fg_a = a.pixels > 0
    fg_b = b.pixels > 0
    intersection = int(np.count_nonzero(fg_a & fg_b))
    union = int(np.count_nonzero(fg_a | fg_b))
    if union == 0:
        return 1.0
    return intersection / union


def otsu_jaccard(prediction: GrayImage, truth: GrayImage) -> float:
    """Threshold, binarize, then compare"""
    return jaccard(otsu_binarize(prediction), otsu_binarize(truth))


def mae_similarity(a: GrayImage, b: GrayImage) -> float:
    """One minus the summed absolute difference over W * L * 2**depth"""
    check_pair(a, b, check_depth=True)
    error = int(np.abs(a.pixels.astype(np.int64) - b.pixels.astype(np.int64)).sum())
    max_error = a.width * a.height * 2**a.depth
    return 1.0 - error / max_error


def tanimoto(a: GrayImage, b: GrayImage) -> float:
    """Sum of products over sum of (a**2 + b**2 - ab), on raw intensities.

    Accumulates in 64-bit integers, so zero margins added to both images
    leave the value bitwise unchanged. On binary masks this equals the
    Jaccard similarity.
    """
    check_pair(a, b)
    ai = a.pixels.astype(np.int64)
    bi = b.pixels.astype(np.int64)

    product = int((ai * bi).sum())
    denominator = int((ai * ai).sum()) + int((bi * bi).sum()) - product
    if denominator == 0:
        return 1.0
    return product / denominator


def _window_means(arr: np.ndarray, window: int) -> np.ndarray:
    return sliding_window_view(arr, (window, window)).mean(axis=(-2, -1))


def ssim(
    a: GrayImage,
    b: GrayImage,
    window: Optional[int] = None,
    k1: Optional[float] = None,
    k2: Optional[float] = None,
) -> float:
    """Single-scale structural similarity with a uniform square window.

    Window statistics are population moments over every fully contained
    window position. The mean index is clipped at 0.
    """
    settings = get_settings()
    window = settings.SSIM_WINDOW if window is None else window
    k1 = settings.SSIM_K1 if k1 is None else k1
    k2 = settings.SSIM_K2 if k2 is None else k2

    check_pair(a, b, check_depth=True)

    if window < 1 or window > min(a.width, a.height):
        raise exceptions.InvalidArgumentsError(
            f"SSIM window must be between 1 and {min(a.width, a.height)} "
            f"for {a.width}x{a.height} images, got {window}"
        )

    data_range = a.max_value
    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2

    x = a.pixels.astype(np.float64)
    y = b.pixels.astype(np.float64)

    mu_x = _window_means(x, window)
    mu_y = _window_means(y, window)
    var_x = _window_means(x * x, window) - mu_x * mu_x
    var_y = _window_means(y * y, window) - mu_y * mu_y
    cov = _window_means(x * y, window) - mu_x * mu_y

    numerator = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    denominator = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    index = float(np.mean(numerator / denominator))
    return float(np.clip(index, 0.0, 1.0))


MeasureFn = Callable[[GrayImage, GrayImage], float]


def get_measure(name: str, otsu: bool = False) -> MeasureFn:
    """Look up a measure by name; ``otsu`` routes Jaccard through Otsu binarization"""
    if name == "jaccard":
        return otsu_jaccard if otsu else jaccard
    if name == "mae":
        return mae_similarity
    if name == "ssim":
        return ssim
    if name == "tanimoto":
        return tanimoto
    raise exceptions.InvalidArgumentsError(
        f"Unknown measure {name!r}, expected one of {AVAILABLE_MEASURES}"
    )


def compare(
    prediction: GrayImage,
    truth: GrayImage,
    measures: Sequence[str] = AVAILABLE_MEASURES,
    otsu: bool = False,
) -> Dict[str, float]:
    """Evaluate the selected measures on one image pair"""
    out: Dict[str, float] = OrderedDict()
    for name in measures:
        out[name] = get_measure(name, otsu=otsu)(prediction, truth)
    return out


class MetricReport:
    """Per-pair similarity values with aggregate mean and standard deviation"""

    HEADER = ("pair", "measure", "value")

    def __init__(self, measures: Sequence[str] = AVAILABLE_MEASURES):
        for name in measures:
            get_measure(name)
        self.measures: Tuple[str, ...] = tuple(measures)
        self.pairs: List[str] = []
        self.values: Dict[str, List[float]] = OrderedDict((m, []) for m in self.measures)

    def add(self, pair: str, values: Mapping[str, float]) -> None:
        for name in self.measures:
            value = values[name]
            if not 0.0 <= value <= 1.0:
                raise exceptions.NumericalError(
                    f"{name} similarity of pair {pair!r} is outside [0, 1]: {value}"
                )
        self.pairs.append(pair)
        for name in self.measures:
            self.values[name].append(float(values[name]))

    def __len__(self) -> int:
        return len(self.pairs)

    def mean(self, measure: str) -> float:
        return float(np.mean(self.values[measure]))

    def std(self, measure: str) -> float:
        return float(np.std(self.values[measure]))

    def rows(self) -> List[Tuple[str, str, float]]:
        return [
            (pair, name, self.values[name][i])
            for i, pair in enumerate(self.pairs)
            for name in self.measures
        ]

    def write(self, stream: TextIO) -> None:
        if not self.pairs:
            raise exceptions.InvalidArgumentsError("Cannot write an empty metric report")

        footer = [("mean", name, self.mean(name)) for name in self.measures]
        footer += [("std", name, self.std(name)) for name in self.measures]
        reports.write_table(stream, self.HEADER, self.rows(), footer)


def evaluate_pairs(
    pairs: Sequence[Tuple[GrayImage, GrayImage]],
    names: Optional[Sequence[str]] = None,
    measures: Sequence[str] = AVAILABLE_MEASURES,
    otsu: bool = False,
) -> MetricReport:
    """Compare every (prediction, truth) pair in order"""
    if names is None:
        names = [str(i) for i in range(len(pairs))]

    if len(names) != len(pairs):
        raise exceptions.InvalidArgumentsError(
            f"Got {len(names)} names for {len(pairs)} pairs"
        )

    report = MetricReport(measures)
    for name, (prediction, truth) in zip(names, pairs):
        report.add(name, compare(prediction, truth, measures, otsu=otsu))
    return report
