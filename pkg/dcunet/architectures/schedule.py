"""architectures/schedule.py

Widths of the three chained 3x3 convolutions of MultiRes and Dual-Channel blocks.
"""

from typing import NamedTuple, Tuple

from dcunet import exceptions

DEFAULT_ALPHA = 1.67

# trunc(W * c) rather than W / 6, W / 3, W / 2; the latter gives 570 instead of 569 at U=1024
SPLIT_COEFFICIENTS = (0.167, 0.333, 0.5)


class FilterSchedule(NamedTuple):
    U: int
    alpha: float
    f1: int
    f2: int
    f3: int

    @property
    def W(self) -> float:
        return self.alpha * self.U

    @property
    def widths(self) -> Tuple[int, int, int]:
        return self.f1, self.f2, self.f3

    @property
    def residual(self) -> int:
        """Width of the 1x1 residual, equal to the concatenated width"""
        return self.f1 + self.f2 + self.f3


def filter_schedule(U: int, alpha: float = DEFAULT_ALPHA) -> FilterSchedule:
    """Split W = alpha * U into three truncated widths.

    Example:

        >>> filter_schedule(64, 1.67)
        FilterSchedule(U=64, alpha=1.67, f1=17, f2=35, f3=53)

    """
    if U < 6:
        raise exceptions.InvalidArgumentsError(f"U must be at least 6, got {U}")

    if not alpha > 0:
        raise exceptions.InvalidArgumentsError(f"alpha must be positive, got {alpha}")

    W = alpha * U
    f1, f2, f3 = (int(W * c) for c in SPLIT_COEFFICIENTS)

    if min(f1, f2, f3) == 0:
        raise exceptions.InvalidArgumentsError(
            f"Degenerate filter schedule for U={U}, alpha={alpha}: ({f1}, {f2}, {f3})"
        )

    return FilterSchedule(U, alpha, f1, f2, f3)
