"""training/__init__.py

Loss, optimizer, splits and the training and cross-validation loops.
"""

from dcunet.training.config import TrainConfig, make_train_config
from dcunet.training.crossval import CVReport, cross_validate
from dcunet.training.folds import FoldPlan, holdout_split, kfold_split
from dcunet.training.losses import batch_loss, bce
from dcunet.training.loop import TrainingLog, TrainResult, evaluate, train
from dcunet.training.optim import Adam, AdamState, adam_step

__all__ = (
    "Adam",
    "AdamState",
    "CVReport",
    "FoldPlan",
    "TrainConfig",
    "TrainResult",
    "TrainingLog",
    "adam_step",
    "batch_loss",
    "bce",
    "cross_validate",
    "evaluate",
    "holdout_split",
    "kfold_split",
    "make_train_config",
    "train",
)
