"""datasets.py

Dataset manifests, synthetic blob datasets and batch assembly.
"""

from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import json
import logging
import threading
from pathlib import Path

import numpy as np
from marshmallow import Schema, fields, validate, post_load, ValidationError

from dcunet import exceptions, get_settings
from dcunet.cache import CompressedLFUCache
from dcunet.image import GrayImage, binary_mask, resize, to_8bit
from dcunet.pgm import load_gray, save_gray
from dcunet.profile import trace
from dcunet.tensor import Tensor, default_dtype

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MANIFEST_NAME = "manifest.json"


class ManifestItem(NamedTuple):
    image: Path
    mask: Path
    group: Optional[str] = None


class DatasetManifest(NamedTuple):
    items: Tuple[ManifestItem, ...]
    width: int
    height: int
    depth: int = 8

    @property
    def groups(self) -> Optional[List[str]]:
        labels = [item.group for item in self.items]
        if all(label is None for label in labels):
            return None
        if any(label is None for label in labels):
            raise exceptions.ManifestError("Either all items or none must have a group")
        return labels  # type: ignore[return-value]


def _divisible_by_16(value: int) -> bool:
    return value > 0 and value % 16 == 0


class ItemSchema(Schema):
    image = fields.String(required=True)
    mask = fields.String(required=True)
    group = fields.String(load_default=None, allow_none=True)


class PairManifestSchema(Schema):
    """Image pairs of any size; width and height are informational"""

    items = fields.List(fields.Nested(ItemSchema), required=True)
    width = fields.Integer(load_default=0, validate=validate.Range(min=0))
    height = fields.Integer(load_default=0, validate=validate.Range(min=0))
    depth = fields.Integer(load_default=8, validate=validate.OneOf([8, 16]))


class ManifestSchema(PairManifestSchema):
    """Training data, resized to width x height on load"""

    width = fields.Integer(required=True)
    height = fields.Integer(required=True)

    @post_load
    def check_resolution(self, data: Dict[str, Any], **kwargs: Any) -> Dict[str, Any]:
        for key in ("width", "height"):
            if not _divisible_by_16(data[key]):
                raise ValidationError(
                    f"must be a positive multiple of 16, got {data[key]}", key
                )
        return data


def load_manifest(
    path: PathLike, check_files: bool = True, check_resolution: bool = True
) -> DatasetManifest:
    """Read a JSON manifest; item paths are relative to the manifest's folder.

    Without ``check_resolution`` the manifest only lists image pairs, and
    width and height may be omitted (read as 0) or take any non-negative value.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise exceptions.ManifestError(f"Could not read manifest {path}") from exc
    except json.JSONDecodeError as exc:
        raise exceptions.ManifestError(f"Manifest {path} is not valid JSON: {exc}") from exc

    try:
        schema = ManifestSchema() if check_resolution else PairManifestSchema()
        data = schema.load(raw)
    except ValidationError as exc:
        raise exceptions.ManifestError(f"Invalid manifest {path}: {exc.messages}") from exc

    root = path.parent
    items = tuple(
        ManifestItem(root / item["image"], root / item["mask"], item["group"])
        for item in data["items"]
    )

    if check_files:
        for item in items:
            for file in (item.image, item.mask):
                if not file.is_file():
                    raise exceptions.ManifestError(f"{path}: missing file {file}")

    labelled = [item.group is not None for item in items]
    if any(labelled) and not all(labelled):
        raise exceptions.ManifestError(f"{path}: either all items or none must have a group")

    return DatasetManifest(items, data["width"], data["height"], data["depth"])


def save_manifest(path: PathLike, manifest: DatasetManifest) -> None:
    path = Path(path)
    root = path.parent

    def relative(file: Path) -> str:
        try:
            return file.relative_to(root).as_posix()
        except ValueError:
            return str(file)

    payload = {
        "items": [
            {"image": relative(item.image), "mask": relative(item.mask), "group": item.group}
            for item in manifest.items
        ],
        "width": manifest.width,
        "height": manifest.height,
        "depth": manifest.depth,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# synthetic data

MIN_FOREGROUND, MAX_FOREGROUND = 0.02, 0.6
MAX_ATTEMPTS = 1000
EDGE_SOFTNESS = 0.1
BACKGROUND_LEVEL, BACKGROUND_NOISE, BLOB_CONTRAST = 0.25, 0.05, 0.5


def _blob_sample(
    rng: np.random.Generator, width: int, height: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Soft-edged ellipses over noise; the mask is the union of exact interiors"""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    mask = np.zeros((height, width), dtype=bool)
    softness = np.zeros((height, width), dtype=np.float64)

    for _ in range(int(rng.integers(1, 4))):
        cy = rng.uniform(0.2, 0.8) * height
        cx = rng.uniform(0.2, 0.8) * width
        ay = rng.uniform(0.08, 0.3) * height
        ax = rng.uniform(0.08, 0.3) * width
        theta = rng.uniform(0, np.pi)

        dy, dx = yy - cy, xx - cx
        u = (dy * np.cos(theta) + dx * np.sin(theta)) / ay
        v = (-dy * np.sin(theta) + dx * np.cos(theta)) / ax
        radius = np.sqrt(u**2 + v**2)

        mask |= radius <= 1
        softness = np.maximum(softness, 0.5 * (1 - np.tanh((radius - 1) / EDGE_SOFTNESS)))

    noise = rng.normal(BACKGROUND_LEVEL, BACKGROUND_NOISE, size=(height, width))
    intensity = np.clip(noise + BLOB_CONTRAST * softness, 0, 1)
    return intensity, mask


def synth_blobs(
    count: int,
    width: int,
    height: int,
    seed: int,
    out_dir: PathLike,
    groups: Optional[int] = None,
    depth: int = 8,
) -> DatasetManifest:
    """Write a synthetic blob dataset (PGM files plus manifest) to out_dir"""
    if count < 1:
        raise exceptions.InvalidArgumentsError(f"count must be positive, got {count}")
    if not (_divisible_by_16(width) and _divisible_by_16(height)):
        raise exceptions.InvalidArgumentsError(
            f"width and height must be positive multiples of 16, got {width}x{height}"
        )
    if groups is not None and not 1 <= groups <= count:
        raise exceptions.InvalidArgumentsError(
            f"groups must be between 1 and count ({count}), got {groups}"
        )
    if depth not in (8, 16):
        raise exceptions.InvalidArgumentsError(f"depth must be 8 or 16, got {depth}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(seed)
    max_value = 2**depth - 1
    items = []

    for i in range(count):
        for _ in range(MAX_ATTEMPTS):
            intensity, mask = _blob_sample(rng, width, height)
            if MIN_FOREGROUND < mask.mean() < MAX_FOREGROUND:
                break
        else:  # pragma: no cover
            raise exceptions.DataError(f"Could not place blobs for sample {i}")

        image = GrayImage.from_array(
            np.rint(intensity * max_value).astype(np.uint8 if depth == 8 else np.uint16),
            depth,
        )
        truth = GrayImage(np.where(mask, 255, 0).astype(np.uint8), 8)

        image_path = out_dir / f"image_{i:04d}.pgm"
        mask_path = out_dir / f"mask_{i:04d}.pgm"
        save_gray(image_path, image)
        save_gray(mask_path, truth)

        group = None if groups is None else f"g{i % groups:03d}"
        items.append(ManifestItem(image_path, mask_path, group))

    manifest = DatasetManifest(tuple(items), width, height, depth)
    save_manifest(out_dir / MANIFEST_NAME, manifest)
    logger.info("Wrote %d synthetic samples to %s", count, out_dir)
    return manifest


# batch assembly


class SampleBatch(NamedTuple):
    images: Tensor
    masks: Tensor
    indices: Tuple[int, ...]


_cache: Optional[CompressedLFUCache] = None
_cache_lock = threading.RLock()


def _get_cache() -> CompressedLFUCache:
    global _cache
    settings = get_settings()
    with _cache_lock:
        if _cache is None or _cache.maxsize != settings.SAMPLE_CACHE_SIZE:
            _cache = CompressedLFUCache(
                settings.SAMPLE_CACHE_SIZE, settings.SAMPLE_CACHE_COMPRESS_LEVEL
            )
        return _cache


def clear_cache() -> None:
    with _cache_lock:
        if _cache is not None:
            _cache.clear()


def _preprocess(path: Path, role: str, width: int, height: int) -> np.ndarray:
    img = load_gray(path)

    if role == "image":
        if img.depth != 8:
            img = to_8bit(img)
        img = resize(img, width, height, mode="bilinear")
        return img.pixels.astype(np.float64) / 255.0

    img = resize(img, width, height, mode="nearest")
    return binary_mask(img).astype(np.float64)


def load_sample(path: Path, role: str, width: int, height: int) -> np.ndarray:
    key = (str(path), role, width, height)
    cache = _get_cache()

    with _cache_lock:
        try:
            return cache[key]
        except KeyError:
            pass

    arr = _preprocess(path, role, width, height)

    try:
        with _cache_lock:
            cache[key] = arr
    except ValueError:  # value too large
        pass

    return arr


@trace("load_batch")
def load_batch(
    manifest: DatasetManifest,
    indices: Sequence[int],
    dtype: Union[str, np.dtype, None] = None,
) -> SampleBatch:
    """Preprocessed images in [0, 1] and {0, 1} masks, both shaped (N, 1, H, W)"""
    indices = tuple(int(i) for i in indices)
    if not indices:
        raise exceptions.InvalidArgumentsError("Cannot load an empty batch")

    for index in indices:
        if not 0 <= index < len(manifest.items):
            raise exceptions.InvalidArgumentsError(
                f"Index {index} out of range for manifest with {len(manifest.items)} items"
            )

    if not (_divisible_by_16(manifest.width) and _divisible_by_16(manifest.height)):
        raise exceptions.ManifestError(
            f"Manifest resolution {manifest.width}x{manifest.height} is not divisible by 16"
        )

    images, masks = [], []
    for index in indices:
        item = manifest.items[index]
        images.append(load_sample(item.image, "image", manifest.width, manifest.height))
        mask = load_sample(item.mask, "mask", manifest.width, manifest.height)

        if not np.isin(mask, (0.0, 1.0)).all():  # pragma: no cover
            raise exceptions.InvalidImageError(f"{item.mask}: mask is not binary")

        masks.append(mask)

    dtype = dtype or default_dtype()
    image_arr = np.stack(images)[:, None]
    mask_arr = np.stack(masks)[:, None]
    return SampleBatch(
        Tensor(image_arr, dtype=dtype),
        Tensor(mask_arr, dtype=dtype),
        indices,
    )
