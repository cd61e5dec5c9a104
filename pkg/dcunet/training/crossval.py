"""training/crossval.py

k-fold cross-validation of an architecture on a dataset manifest.
"""

from typing import Any, Dict, List, Mapping, NamedTuple, Optional, TextIO, Tuple

import concurrent.futures
import contextlib
import logging
import warnings

import numpy as np

from dcunet import exceptions, get_settings, reports
from dcunet.architectures import build
from dcunet.datasets import DatasetManifest
from dcunet.training.config import TrainConfig
from dcunet.training.folds import FoldPlan, kfold_split
from dcunet.training.loop import evaluate, train

logger = logging.getLogger(__name__)

REPORT_HEADER = ("fold", "n_items", "tanimoto")


class FoldResult(NamedTuple):
    fold: int
    n_items: int
    tanimoto: float
    per_image: Tuple[float, ...]
    losses: Tuple[float, ...]


class CVReport:
    """Fold results ordered by fold index, with both aggregations"""

    def __init__(self, results: List[FoldResult], plan: FoldPlan):
        self.results = sorted(results, key=lambda r: r.fold)
        self.plan = plan

    def __len__(self) -> int:
        return len(self.results)

    @property
    def fold_scores(self) -> List[float]:
        return [r.tanimoto for r in self.results]

    @property
    def mean(self) -> float:
        """Mean of the per-fold means"""
        return float(np.mean(self.fold_scores))

    @property
    def std(self) -> float:
        return float(np.std(self.fold_scores))

    @property
    def per_image_mean(self) -> float:
        """Mean over all held-out images, regardless of fold"""
        return float(np.mean([s for r in self.results for s in r.per_image]))

    def write(self, stream: TextIO) -> None:
        rows = [(r.fold, r.n_items, r.tanimoto) for r in self.results]
        footer = [
            ("mean", "", self.mean),
            ("std", "", self.std),
            ("per_image_mean", sum(r.n_items for r in self.results), self.per_image_mean),
        ]
        reports.write_table(stream, REPORT_HEADER, rows, footer)


def _init_worker(settings: Mapping[str, Any]) -> None:
    import dcunet

    dcunet.update_settings(**settings)


def run_fold(
    fold: int,
    arch: str,
    arch_kwargs: Mapping[str, Any],
    manifest: DatasetManifest,
    plan: FoldPlan,
    config: TrainConfig,
) -> FoldResult:
    """Train on all other folds and score the held-out one"""
    spec = build(arch, **arch_kwargs)
    held_out = plan.test_indices(fold)

    result = train(
        spec,
        manifest,
        config,
        train_indices=plan.train_indices(fold),
        val_indices=(),
    )
    scores = evaluate(result.model, manifest, held_out, config.batch_size)

    logger.info("Fold %d: tanimoto=%.4f on %d items", fold, scores.mean(), len(held_out))
    return FoldResult(
        fold,
        len(held_out),
        float(scores.mean()),
        tuple(float(s) for s in scores),
        tuple(result.log.losses),
    )


def _fold_configs(config: TrainConfig, k: int) -> List[TrainConfig]:
    children = np.random.SeedSequence(config.seed).spawn(k)
    return [config._replace(seed=int(child.generate_state(1)[0])) for child in children]


def _max_workers(k: int, max_workers: Optional[int]) -> int:
    settings = get_settings()
    if settings.DETERMINISTIC or not settings.USE_MULTIPROCESSING:
        return 1
    if max_workers is None:
        max_workers = settings.MAX_WORKERS
    return max(1, min(max_workers, k))


def cross_validate(
    arch: str,
    manifest: DatasetManifest,
    config: TrainConfig,
    arch_kwargs: Optional[Mapping[str, Any]] = None,
    max_workers: Optional[int] = None,
) -> CVReport:
    """Run ``config.folds`` trainings, each scored on its held-out fold.

    Folds keep manifest groups together when the manifest has group labels.
    Every fold gets its own seed spawned from ``config.seed``; folds run in a
    process pool unless parallelism is disabled in the settings.
    """
    arch_kwargs = dict(arch_kwargs or {})
    build(arch, **arch_kwargs)  # fail early on bad architecture options

    plan = kfold_split(len(manifest.items), config.folds, config.seed, manifest.groups)
    configs = _fold_configs(config, plan.k)
    nproc = _max_workers(plan.k, max_workers)

    logger.info("Cross-validating %s with %d folds on %d processes", arch, plan.k, nproc)

    results: List[FoldResult] = []

    with contextlib.ExitStack() as stack:
        executor = None
        if nproc > 1:
            import dcunet

            overrides: Dict[str, Any] = {
                k: getattr(get_settings(), k) for k in dcunet._overwritten_settings
            }
            try:
                executor = stack.enter_context(
                    concurrent.futures.ProcessPoolExecutor(
                        max_workers=nproc, initializer=_init_worker, initargs=(overrides,)
                    )
                )
            except OSError:
                warnings.warn(
                    "Multiprocessing is not available on this system. "
                    "Falling back to serial execution.",
                    exceptions.PerformanceWarning,
                )

        if executor is not None:
            futures = {
                executor.submit(
                    run_fold, fold, arch, arch_kwargs, manifest, plan, configs[fold]
                ): fold
                for fold in range(plan.k)
            }
            for future in concurrent.futures.as_completed(futures):
                try:
                    results.append(future.result())
                except (exceptions.NumericalError, exceptions.DataError):
                    raise
                except Exception as exc:
                    raise RuntimeError(f"Error while running fold {futures[future]}") from exc
        else:
            for fold in range(plan.k):
                results.append(
                    run_fold(fold, arch, arch_kwargs, manifest, plan, configs[fold])
                )

    return CVReport(results, plan)
