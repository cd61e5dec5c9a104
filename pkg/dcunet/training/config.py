"""training/config.py

Hyperparameters of one training run.
"""

from typing import Any, Dict, NamedTuple

from marshmallow import Schema, fields, validate, post_load, ValidationError

from dcunet import exceptions, get_settings


class TrainConfig(NamedTuple):
    """Optimizer, schedule and split parameters of a training run."""

    #: Adam step size
    learning_rate: float = 1e-3

    #: Adam first moment decay
    beta1: float = 0.9

    #: Adam second moment decay
    beta2: float = 0.999

    #: Adam denominator stabilizer
    epsilon: float = 1e-8

    #: Passes over the training split
    epochs: int = 50

    #: Images per batch
    batch_size: int = 4

    #: Number of cross-validation folds
    folds: int = 5

    #: Master seed for initialization, shuffling and splitting
    seed: int = 0

    #: Share of the training items held out for per-epoch validation
    val_fraction: float = 0.2

    #: Divide the per-image loss by the number of pixels
    normalize_loss: bool = False


class TrainConfigSchema(Schema):
    learning_rate = fields.Float(validate=validate.Range(min=0))
    beta1 = fields.Float(
        validate=validate.Range(min=0, max=1, min_inclusive=False, max_inclusive=False)
    )
    beta2 = fields.Float(
        validate=validate.Range(min=0, max=1, min_inclusive=False, max_inclusive=False)
    )
    epsilon = fields.Float(validate=validate.Range(min=0, min_inclusive=False))
    epochs = fields.Integer(validate=validate.Range(min=1))
    batch_size = fields.Integer(validate=validate.Range(min=1))
    folds = fields.Integer(validate=validate.Range(min=2))
    seed = fields.Integer(validate=validate.Range(min=0))
    val_fraction = fields.Float(validate=validate.Range(min=0, max=1, max_inclusive=False))
    normalize_loss = fields.Boolean()

    @post_load
    def make_config(self, data: Dict[str, Any], **kwargs: Any) -> TrainConfig:
        return TrainConfig(**data)


def make_train_config(**overrides: Any) -> TrainConfig:
    """Build a validated config; unset values come from the runtime settings.

    Example:

        >>> make_train_config(epochs=2).epochs
        2

    """
    settings = get_settings()
    values: Dict[str, Any] = {
        "learning_rate": settings.LEARNING_RATE,
        "beta1": settings.ADAM_BETA1,
        "beta2": settings.ADAM_BETA2,
        "epsilon": settings.ADAM_EPSILON,
        "epochs": settings.EPOCHS,
        "batch_size": settings.BATCH_SIZE,
        "seed": settings.DEFAULT_SEED,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return TrainConfigSchema().load(values)
    except ValidationError as exc:
        raise exceptions.InvalidArgumentsError(
            f"Invalid training configuration: {exc.messages}"
        ) from exc
