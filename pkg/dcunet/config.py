"""config.py

dcunet settings parsing.
"""

from typing import Mapping, Any, Tuple, NamedTuple, Dict, Optional
import os
import json

from marshmallow import Schema, fields, validate, pre_load, post_load, ValidationError


class DCUNetSettings(NamedTuple):
    """Contains all settings for the current dcunet session."""

    #: Default log level (debug, info, warning, error, critical)
    LOGLEVEL: str = "warning"

    #: Seed used when none is given on the command line
    DEFAULT_SEED: int = 0

    #: Floating point width of new tensors (float32 for training, float64 for gradient checks)
    FLOAT_DTYPE: str = "float32"

    #: Momentum of batch normalization moving statistics
    BN_MOMENTUM: float = 0.99

    #: Variance stabilizer of batch normalization
    BN_EPSILON: float = 1e-5

    #: Adam step size
    LEARNING_RATE: float = 1e-3

    #: Number of images per training batch
    BATCH_SIZE: int = 4

    #: Number of training epochs
    EPOCHS: int = 50

    #: Adam exponential decay of the first moment
    ADAM_BETA1: float = 0.9

    #: Adam exponential decay of the second moment
    ADAM_BETA2: float = 0.999

    #: Adam denominator stabilizer
    ADAM_EPSILON: float = 1e-8

    #: Default input contract (height, width) used by summaries
    INPUT_SIZE: Tuple[int, int] = (256, 128)

    #: Side length of the uniform SSIM window
    SSIM_WINDOW: int = 8

    #: SSIM luminance stabilizer coefficient
    SSIM_K1: float = 0.01

    #: SSIM contrast stabilizer coefficient
    SSIM_K2: float = 0.03

    #: Size of the preprocessed sample cache in bytes
    SAMPLE_CACHE_SIZE: int = 1024 * 1024 * 256  # 256 MB

    #: Compression level of the preprocessed sample cache, from 0-9
    SAMPLE_CACHE_COMPRESS_LEVEL: int = 1

    #: Use a process pool to run cross-validation folds in parallel
    USE_MULTIPROCESSING: bool = True

    #: Maximum number of worker processes
    MAX_WORKERS: int = 4

    #: Disable all internal parallelism for bitwise reproducible runs
    DETERMINISTIC: bool = False

    #: Log wall time of traced regions
    PROFILE: bool = False


AVAILABLE_SETTINGS: Tuple[str, ...] = DCUNetSettings._fields


class SettingSchema(Schema):
    """Schema used to create and validate DCUNetSettings objects"""

    LOGLEVEL = fields.String(
        validate=validate.OneOf(["debug", "info", "warning", "error", "critical"])
    )

    DEFAULT_SEED = fields.Integer(validate=validate.Range(min=0))

    FLOAT_DTYPE = fields.String(validate=validate.OneOf(["float32", "float64"]))

    BN_MOMENTUM = fields.Float(validate=validate.Range(min=0, max=1))
    BN_EPSILON = fields.Float(validate=validate.Range(min=0, min_inclusive=False))

    LEARNING_RATE = fields.Float(validate=validate.Range(min=0))
    BATCH_SIZE = fields.Integer(validate=validate.Range(min=1))
    EPOCHS = fields.Integer(validate=validate.Range(min=1))

    ADAM_BETA1 = fields.Float(
        validate=validate.Range(min=0, max=1, min_inclusive=False, max_inclusive=False)
    )
    ADAM_BETA2 = fields.Float(
        validate=validate.Range(min=0, max=1, min_inclusive=False, max_inclusive=False)
    )
    ADAM_EPSILON = fields.Float(validate=validate.Range(min=0, min_inclusive=False))

    INPUT_SIZE = fields.List(
        fields.Integer(validate=validate.Range(min=16)),
        validate=validate.Length(equal=2),
    )

    SSIM_WINDOW = fields.Integer(validate=validate.Range(min=1))
    SSIM_K1 = fields.Float(validate=validate.Range(min=0, min_inclusive=False))
    SSIM_K2 = fields.Float(validate=validate.Range(min=0, min_inclusive=False))

    SAMPLE_CACHE_SIZE = fields.Integer(validate=validate.Range(min=0))
    SAMPLE_CACHE_COMPRESS_LEVEL = fields.Integer(validate=validate.Range(min=0, max=9))

    USE_MULTIPROCESSING = fields.Boolean()
    MAX_WORKERS = fields.Integer(validate=validate.Range(min=1))
    DETERMINISTIC = fields.Boolean()
    PROFILE = fields.Boolean()

    @pre_load
    def decode_lists(self, data: Dict[str, Any], **kwargs: Any) -> Dict[str, Any]:
        for var in ("INPUT_SIZE",):
            val = data.get(var)
            if val and isinstance(val, str):
                try:
                    data[var] = json.loads(val)
                except json.decoder.JSONDecodeError as exc:
                    raise ValidationError(
                        f'Could not parse value for key {var} as JSON: "{val}"'
                    ) from exc
        return data

    @post_load
    def make_settings(self, data: Dict[str, Any], **kwargs: Any) -> DCUNetSettings:
        # encode tuples
        for var in ("INPUT_SIZE",):
            val = data.get(var)
            if val:
                data[var] = tuple(val)

        return DCUNetSettings(**data)


def parse_config(config: Optional[Mapping[str, Any]] = None) -> DCUNetSettings:
    """Parse given config dict and return new DCUNetSettings object"""
    config_dict = dict(config or {})

    for setting in AVAILABLE_SETTINGS:
        env_setting = f"DCU_{setting}"
        if setting not in config_dict and env_setting in os.environ:
            config_dict[setting] = os.environ[env_setting]

    schema = SettingSchema()
    try:
        new_settings = schema.load(config_dict)
    except ValidationError as exc:
        raise ValueError("Could not parse configuration") from exc

    return new_settings
