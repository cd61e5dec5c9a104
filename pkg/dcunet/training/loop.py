"""training/loop.py

Mini-batch training of a Model with per-epoch validation.
"""

from typing import Dict, List, NamedTuple, NoReturn, Optional, Sequence, TextIO, Union

import logging
import math
from pathlib import Path

import numpy as np
import tqdm

from dcunet import checkpoint, exceptions, reports
from dcunet.architectures.model import Model
from dcunet.architectures.spec import GraphSpec
from dcunet.datasets import DatasetManifest, load_batch
from dcunet.image import GrayImage
from dcunet.metrics import tanimoto
from dcunet.profile import trace
from dcunet.tensor import no_grad
from dcunet.training.config import TrainConfig
from dcunet.training.folds import holdout_split
from dcunet.training.losses import batch_loss
from dcunet.training.optim import Adam

logger = logging.getLogger(__name__)

LOG_HEADER = ("epoch", "loss", "val_tanimoto")


class EpochRecord(NamedTuple):
    epoch: int
    loss: float
    val_tanimoto: Optional[float]


class TrainingLog:
    """One record per completed epoch"""

    def __init__(self) -> None:
        self.records: List[EpochRecord] = []

    def append(self, record: EpochRecord) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, index: int) -> EpochRecord:
        return self.records[index]

    @property
    def losses(self) -> List[float]:
        return [r.loss for r in self.records]

    def write(self, stream: TextIO) -> None:
        reports.write_table(stream, LOG_HEADER, self.records)


class TrainResult(NamedTuple):
    model: Model
    log: TrainingLog
    steps: int
    initial_loss: float
    train_indices: Sequence[int]
    val_indices: Sequence[int]


def to_gray(probabilities: np.ndarray) -> GrayImage:
    """8-bit image of a (H, W) probability map, scaled by 255 and rounded"""
    pixels = np.clip(np.rint(np.asarray(probabilities, dtype=np.float64) * 255), 0, 255)
    return GrayImage(pixels.astype(np.uint8), 8)


def predict(
    model: Model, manifest: DatasetManifest, indices: Sequence[int], batch_size: int = 4
) -> np.ndarray:
    """Inference-mode probabilities of shape (len(indices), H, W)"""
    indices = tuple(indices)
    outputs = []
    with no_grad():
        for start in range(0, len(indices), batch_size):
            batch = load_batch(manifest, indices[start : start + batch_size], model.dtype)
            outputs.append(model(batch.images, training=False).data[:, 0])
    return np.concatenate(outputs)


def evaluate(
    model: Model, manifest: DatasetManifest, indices: Sequence[int], batch_size: int = 4
) -> np.ndarray:
    """Per-image Tanimoto similarity of predictions against ground truth masks"""
    indices = tuple(indices)
    if not indices:
        raise exceptions.InvalidArgumentsError("Cannot evaluate an empty index list")

    scores = []
    with no_grad():
        for start in range(0, len(indices), batch_size):
            batch = load_batch(manifest, indices[start : start + batch_size], model.dtype)
            probabilities = model(batch.images, training=False).data[:, 0]
            for prob, mask in zip(probabilities, batch.masks.data[:, 0]):
                truth = GrayImage((mask * 255).astype(np.uint8), 8)
                scores.append(tanimoto(to_gray(prob), truth))

    return np.array(scores, dtype=np.float64)


def _fixed_batches(
    rng: np.random.Generator, indices: Sequence[int], batch_size: int
) -> List[Sequence[int]]:
    shuffled = rng.permutation(np.asarray(indices, dtype=np.int64))
    return [
        tuple(int(i) for i in shuffled[start : start + batch_size])
        for start in range(0, len(shuffled), batch_size)
    ]


def train(
    spec: GraphSpec,
    manifest: DatasetManifest,
    config: TrainConfig,
    train_indices: Optional[Sequence[int]] = None,
    val_indices: Optional[Sequence[int]] = None,
    checkpoint_path: Union[str, Path, None] = None,
    progress: bool = False,
) -> TrainResult:
    """Train a freshly initialized model for ``config.epochs`` epochs.

    When no explicit split is given, ``config.val_fraction`` of the items is
    held out for validation. Batch composition is drawn once per run and the
    batch order is reshuffled every epoch. If the loss or a gradient becomes
    non-finite, the last completed epoch's parameters are written to
    ``checkpoint_path`` and :class:`~dcunet.exceptions.DivergenceError` is
    raised.
    """
    init_seed, shuffle_seed = np.random.SeedSequence(config.seed).generate_state(2)
    rng = np.random.default_rng(shuffle_seed)

    if train_indices is None:
        all_indices = range(len(manifest.items))
        if val_indices is None:
            train_indices, val_indices = holdout_split(
                all_indices, config.val_fraction, config.seed, manifest.groups
            )
        else:
            held_out = set(val_indices)
            train_indices = tuple(i for i in all_indices if i not in held_out)

    train_indices = tuple(train_indices)
    val_indices = tuple(val_indices or ())

    if not train_indices:
        raise exceptions.InvalidArgumentsError("Training split is empty")

    model = Model(spec, seed=int(init_seed))
    optimizer = Adam(model.params, config)
    batches = _fixed_batches(rng, train_indices, config.batch_size)

    logger.info(
        "Training %s on %d items (%d batches per epoch), validating on %d",
        spec.name,
        len(train_indices),
        len(batches),
        len(val_indices),
    )

    log = TrainingLog()
    last_good = {name: arr.copy() for name, arr in model.state_dict().items()}
    initial_loss = math.nan
    steps = 0

    for epoch in tqdm.trange(1, config.epochs + 1, desc="Training", disable=not progress):
        batch_losses = []

        for b in rng.permutation(len(batches)):
            batch = load_batch(manifest, batches[b], model.dtype)

            try:
                with trace("train_step"):
                    optimizer.zero_grad()
                    prediction = model(batch.images, training=True)
                    loss = batch_loss(prediction, batch.masks, config.normalize_loss)
                    value = loss.item()
                    loss.backward()
                    optimizer.step()
            except exceptions.NumericalError as exc:
                _abort(last_good, checkpoint_path, epoch - 1, exc)

            steps += 1
            if steps == 1:
                initial_loss = value
            batch_losses.append(value)

        epoch_loss = math.fsum(batch_losses) / len(batch_losses)
        if not math.isfinite(epoch_loss):  # pragma: no cover
            _abort(last_good, checkpoint_path, epoch - 1, None)

        val_score = None
        if val_indices:
            val_score = float(np.mean(evaluate(model, manifest, val_indices, config.batch_size)))

        log.append(EpochRecord(epoch, epoch_loss, val_score))
        logger.info(
            "Epoch %d/%d: loss=%.6f val_tanimoto=%s",
            epoch,
            config.epochs,
            epoch_loss,
            "-" if val_score is None else f"{val_score:.4f}",
        )
        last_good = {name: arr.copy() for name, arr in model.state_dict().items()}

    if checkpoint_path is not None:
        model.save(checkpoint_path)
        logger.info("Wrote checkpoint to %s", checkpoint_path)

    return TrainResult(model, log, steps, initial_loss, train_indices, val_indices)


def _abort(
    last_good: Dict[str, np.ndarray],
    checkpoint_path: Union[str, Path, None],
    epoch: int,
    cause: Optional[BaseException],
) -> NoReturn:
    msg = f"Training diverged after epoch {epoch}"
    if checkpoint_path is not None:
        checkpoint.save(checkpoint_path, last_good)
        msg += f"; parameters of epoch {epoch} written to {checkpoint_path}"
    raise exceptions.DivergenceError(msg) from cause
