"""scripts/click_types.py

Custom click parameter types and utilities.
"""

from typing import Any, Dict, Tuple
import pathlib

import click


class PathlibPath(click.Path):
    """Converts a string to a pathlib.Path object"""

    def convert(self, *args: Any) -> pathlib.Path:
        return pathlib.Path(str(super().convert(*args)))


class TOMLFile(click.ParamType):
    """Parses a TOML file to a dict"""

    name = "toml-file"

    def convert(self, value: str, *args: Any) -> Dict[str, Any]:
        import toml

        try:
            return dict(toml.load(value))
        except (OSError, toml.TomlDecodeError) as exc:
            self.fail(f"Could not read config file {value}: {exc}")


class NumberList(click.ParamType):
    """Parses a comma-separated list of numbers"""

    name = "number-list"

    def __init__(self, number_type: type = int, min_value: Any = None) -> None:
        self.number_type = number_type
        self.min_value = min_value

    def convert(self, value: Any, *args: Any) -> Tuple[Any, ...]:
        if isinstance(value, tuple):
            return value

        try:
            numbers = tuple(
                self.number_type(part.strip()) for part in str(value).split(",") if part.strip()
            )
        except ValueError:
            self.fail(f"Expected comma-separated {self.number_type.__name__} values, got {value!r}")

        if not numbers:
            self.fail("Expected at least one value")

        if self.min_value is not None and any(n < self.min_value for n in numbers):
            self.fail(f"All values must be >= {self.min_value}, got {value!r}")

        return numbers


class Resolution(click.ParamType):
    """Parses HEIGHTxWIDTH to a tuple of ints"""

    name = "resolution"

    def convert(self, value: Any, *args: Any) -> Tuple[int, int]:
        if isinstance(value, tuple):
            return value

        parts = str(value).lower().split("x")
        try:
            height, width = (int(p) for p in parts)
        except ValueError:
            self.fail(f"Expected HEIGHTxWIDTH, got {value!r}")

        if height < 1 or width < 1:
            self.fail(f"Resolution must be positive, got {value!r}")

        return height, width
