"""training/folds.py

Random k-fold and hold-out splits, optionally keeping groups together.
"""

from typing import Hashable, List, Optional, Sequence, Tuple

from dataclasses import dataclass

import numpy as np

from dcunet import exceptions

Indices = Tuple[int, ...]


@dataclass(frozen=True)
class FoldPlan:
    """k mutually disjoint index lists covering ``range(size)``"""

    folds: Tuple[Indices, ...]
    size: int

    @property
    def k(self) -> int:
        return len(self.folds)

    def test_indices(self, fold: int) -> Indices:
        return self.folds[fold]

    def train_indices(self, fold: int) -> Indices:
        held_out = set(self.folds[fold])
        return tuple(i for i in range(self.size) if i not in held_out)

    def check(self) -> None:
        """Raise if the folds overlap or miss an index"""
        flat = [i for fold in self.folds for i in fold]
        if len(flat) != len(set(flat)):
            raise exceptions.InvalidArgumentsError("Folds are not disjoint")
        if sorted(flat) != list(range(self.size)):
            raise exceptions.InvalidArgumentsError(
                f"Folds do not cover all {self.size} indices"
            )


def _group_ids(groups: Sequence[Hashable], size: int) -> np.ndarray:
    if len(groups) != size:
        raise exceptions.InvalidArgumentsError(
            f"Got {len(groups)} group labels for {size} items"
        )
    labels = [str(g) for g in groups]
    _, ids = np.unique(labels, return_inverse=True)
    return ids


def kfold_split(
    dataset_size: int,
    k: int,
    seed: int,
    groups: Optional[Sequence[Hashable]] = None,
) -> FoldPlan:
    """Shuffle items (or whole groups) and deal them into k near-equal folds.

    Without groups fold sizes differ by at most one item; with groups by at
    most one group, and every group lands in exactly one fold. Indices are
    sorted within each fold.

    Example:

        >>> plan = kfold_split(7, 3, seed=0)
        >>> sorted(len(fold) for fold in plan.folds)
        [2, 2, 3]

    """
    if dataset_size < 1:
        raise exceptions.InvalidArgumentsError(
            f"Dataset size must be positive, got {dataset_size}"
        )
    if k < 2:
        raise exceptions.InvalidArgumentsError(f"k must be at least 2, got {k}")

    if groups is None:
        ids = np.arange(dataset_size)
    else:
        ids = _group_ids(groups, dataset_size)

    unique_ids = np.unique(ids)
    if k > unique_ids.size:
        what = "items" if groups is None else "groups"
        raise exceptions.InvalidArgumentsError(
            f"Cannot split {unique_ids.size} {what} into {k} folds"
        )

    rng = np.random.default_rng(seed)
    shuffled = rng.permutation(unique_ids)

    folds = []
    for fold_ids in np.array_split(shuffled, k):
        members = np.flatnonzero(np.isin(ids, fold_ids))
        folds.append(tuple(int(i) for i in members))

    plan = FoldPlan(tuple(folds), dataset_size)
    plan.check()
    return plan


def holdout_split(
    indices: Sequence[int],
    fraction: float,
    seed: int,
    groups: Optional[Sequence[Hashable]] = None,
) -> Tuple[Indices, Indices]:
    """Split ``indices`` into (train, validation) with about ``fraction`` held out.

    ``groups`` holds a label for every index of the full dataset; when given
    and at least two groups are present, whole groups are held out.
    """
    indices = tuple(int(i) for i in indices)
    if not 0 <= fraction < 1:
        raise exceptions.InvalidArgumentsError(
            f"Validation fraction must be in [0, 1), got {fraction}"
        )

    if fraction == 0 or len(indices) < 2:
        return indices, ()

    rng = np.random.default_rng(seed)

    if groups is not None:
        labels = [str(groups[i]) for i in indices]
        unique = sorted(set(labels))
        if len(unique) >= 2:
            n_val = min(max(1, int(round(fraction * len(unique)))), len(unique) - 1)
            held_out = set(rng.permutation(unique)[:n_val].tolist())
            return (
                tuple(i for i, g in zip(indices, labels) if g not in held_out),
                tuple(i for i, g in zip(indices, labels) if g in held_out),
            )

    n_val = min(max(1, int(round(fraction * len(indices)))), len(indices) - 1)
    order = rng.permutation(len(indices))
    val_set = set(order[:n_val].tolist())
    train: List[int] = []
    val: List[int] = []
    for pos, index in enumerate(indices):
        (val if pos in val_set else train).append(index)
    return tuple(train), tuple(val)
