"""image.py

Gray-level images and the preprocessing applied before training and scoring.
"""

from typing import Sequence, Tuple, TypeVar, Union

from dataclasses import dataclass

import numpy as np
from PIL import Image

from dcunet import exceptions
from dcunet.profile import trace

Number = TypeVar("Number", int, float)

SUPPORTED_DEPTHS = (8, 16)

RESAMPLING_METHODS = {
    "nearest": Image.Resampling.NEAREST,
    "bilinear": Image.Resampling.BILINEAR,
}


def _dtype_for_depth(depth: int) -> np.dtype:
    return np.dtype(np.uint8 if depth == 8 else np.uint16)


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major unsigned intensities of an 8-bit or 16-bit gray image"""

    pixels: np.ndarray
    depth: int = 8

    def __post_init__(self) -> None:
        if self.depth not in SUPPORTED_DEPTHS:
            raise exceptions.InvalidImageError(
                f"Depth must be one of {SUPPORTED_DEPTHS}, got {self.depth}"
            )

        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2 or pixels.size == 0:
            raise exceptions.InvalidImageError(
                f"Pixels must be a non-empty 2D array, got shape {pixels.shape}"
            )

        if pixels.dtype.kind not in "ui" or (pixels.size and pixels.min() < 0):
            raise exceptions.InvalidImageError(
                f"Pixels must be unsigned integers, got {pixels.dtype}"
            )

        if pixels.max() > self.max_value:
            raise exceptions.InvalidImageError(
                f"Pixel value {pixels.max()} exceeds {self.max_value} for depth {self.depth}"
            )

        object.__setattr__(self, "pixels", pixels.astype(_dtype_for_depth(self.depth)))

    @classmethod
    def from_array(cls, data: np.ndarray, depth: Union[int, None] = None) -> "GrayImage":
        data = np.asarray(data)
        if depth is None:
            depth = 16 if data.dtype == np.uint16 else 8
        return cls(data, depth)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.pixels.shape  # type: ignore[return-value]

    @property
    def max_value(self) -> int:
        return 2**self.depth - 1

    def is_binary(self) -> bool:
        """True when every pixel is 0 or the maximum intensity"""
        return bool(np.all((self.pixels == 0) | (self.pixels == self.max_value)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.depth == other.depth and np.array_equal(self.pixels, other.pixels)

    def __repr__(self) -> str:
        return f"GrayImage({self.width}x{self.height}, depth={self.depth})"


@trace("contrast_stretch")
def contrast_stretch(
    data: np.ndarray,
    in_range: Sequence[Number],
    out_range: Sequence[Number],
    clip: bool = True,
) -> np.ndarray:
    """Normalize input array from in_range to out_range"""
    lower_bound_in, upper_bound_in = in_range
    lower_bound_out, upper_bound_out = out_range

    out_data = data.astype("float64", copy=True)
    out_data -= lower_bound_in
    norm = upper_bound_in - lower_bound_in
    if abs(norm) > 1e-8:  # prevent division by 0
        # multiply before dividing so that in_range maps exactly onto out_range
        out_data *= upper_bound_out - lower_bound_out
        out_data /= norm
    out_data += lower_bound_out

    if clip:
        np.clip(out_data, lower_bound_out, upper_bound_out, out=out_data)

    return out_data


def to_8bit(img: GrayImage) -> GrayImage:
    """Per-image linear min-max scaling to [0, 255], truncating fractions"""
    lower, upper = int(img.pixels.min()), int(img.pixels.max())
    if lower == upper:
        raise exceptions.InvalidImageError(
            f"Cannot rescale constant image ({img!r}, all pixels {lower})"
        )

    rescaled = np.floor(contrast_stretch(img.pixels, (lower, upper), (0, 255)))
    return GrayImage(rescaled.astype(np.uint8), 8)


@trace("resize")
def resize(img: GrayImage, width: int, height: int, mode: str = "bilinear") -> GrayImage:
    """Resample to width x height; nearest keeps the value set (masks stay binary)"""
    if width < 1 or height < 1:
        raise exceptions.InvalidArgumentsError(
            f"Target size must be at least 1x1, got {width}x{height}"
        )

    try:
        method = RESAMPLING_METHODS[mode]
    except KeyError as exc:
        raise exceptions.InvalidArgumentsError(
            f"Resampling mode must be one of {tuple(RESAMPLING_METHODS)}, got {mode!r}"
        ) from exc

    if (width, height) == (img.width, img.height):
        return img

    # 32-bit float images resample both depths without quantization
    pil_img = Image.fromarray(img.pixels.astype(np.float32))
    resized = np.asarray(pil_img.resize((width, height), resample=method))

    out = np.clip(np.rint(resized), 0, img.max_value)
    return GrayImage(out.astype(_dtype_for_depth(img.depth)), img.depth)


def downsample(img: GrayImage, factor: int, mode: str = "bilinear") -> GrayImage:
    """Shrink both sides by an integer factor"""
    if factor < 1:
        raise exceptions.InvalidArgumentsError(f"Factor must be >= 1, got {factor}")
    return resize(
        img, max(1, img.width // factor), max(1, img.height // factor), mode=mode
    )


def pad(img: GrayImage, margin_y: int, margin_x: int) -> GrayImage:
    """Add blank (zero) margins of equal size on opposite sides"""
    if margin_y < 0 or margin_x < 0:
        raise exceptions.InvalidArgumentsError(
            f"Margins must be non-negative, got {margin_y}, {margin_x}"
        )
    padded = np.pad(img.pixels, ((margin_y, margin_y), (margin_x, margin_x)))
    return GrayImage(padded, img.depth)


def ratio_margins(img: GrayImage, ratio: float) -> Tuple[int, int]:
    """Margins that scale both sides by ``ratio``, shrinking the object's area share"""
    if ratio < 1:
        raise exceptions.InvalidArgumentsError(f"Ratio must be >= 1, got {ratio}")
    return (
        int(round((ratio - 1) * img.height / 2)),
        int(round((ratio - 1) * img.width / 2)),
    )


def binary_mask(img: GrayImage) -> np.ndarray:
    """Foreground indicator of a mask image (upper half of the intensity range)"""
    threshold = (img.max_value + 1) // 2
    return (img.pixels >= threshold).astype(np.uint8)
