"""scripts/params.py

Print parameter ledgers and reconcile totals with the published model sizes.
"""

from typing import Optional, Sequence

import click

from dcunet.architectures import AVAILABLE_ARCHITECTURES, build
from dcunet.architectures.counting import (
    PUBLISHED_TOTALS,
    ParamLedger,
    convention_sweep,
    count_params,
)
from dcunet.architectures.spec import REFERENCE_CONVENTION
from dcunet.reports import format_text_table
from dcunet.scripts.click_types import NumberList
from dcunet.scripts.options import arch_kwargs

LEDGER_HEADER = ("path", "kind", "trainable", "non_trainable")


def _format_ledger(ledger: ParamLedger, show_rows: bool) -> str:
    lines = [f"# {ledger.name}  convention={ledger.convention.label}"]
    if show_rows:
        rows = [
            (row.path, row.kind, row.trainable, row.non_trainable)
            for row in ledger.rows
            if row.total
        ]
        lines.append(format_text_table(LEDGER_HEADER, rows))
    lines.append(
        f"total_params={ledger.total}  trainable={ledger.trainable}  "
        f"non_trainable={ledger.non_trainable}"
    )
    return "\n".join(lines)


def _format_comparison(name: str, total: int) -> str:
    published = PUBLISHED_TOTALS[name]
    difference = total - published
    return (
        f"published={published}  difference={difference:+d}  "
        f"relative_error={abs(difference) / published:.6f}"
    )


@click.command("params", short_help="Count model parameters and compare to published totals.")
@click.option(
    "--arch",
    type=click.Choice(AVAILABLE_ARCHITECTURES + ("all",)),
    default="all",
    show_default=True,
    help="Architecture to count",
)
@click.option(
    "--convention",
    type=click.Choice(["fixed", "sweep"]),
    default="fixed",
    show_default=True,
    help="Count under the reference convention, or rank all counting conventions",
)
@click.option(
    "--base-filters",
    type=NumberList(int, min_value=1),
    default=None,
    help="Comma-separated base widths of the five encoder stages [default: published widths]",
)
@click.option(
    "--ledger/--no-ledger",
    default=True,
    show_default=True,
    help="Print one row per parameterized layer",
)
def params(
    arch: str = "all",
    convention: str = "fixed",
    base_filters: Optional[Sequence[int]] = None,
    ledger: bool = True,
) -> None:
    """Count the parameters of one or all architectures without allocating them.

    With published widths the totals are compared to the published model
    sizes. ``--convention sweep`` counts every architecture under every
    combination of bias, batch normalization placement and counting rules and
    flags the convention that matches best.

    Example:

        $ dcunet params --arch dcunet --no-ledger

    """
    names = AVAILABLE_ARCHITECTURES if arch == "all" else (arch,)

    if convention == "sweep" and base_filters is not None:
        raise click.UsageError("--base-filters cannot be combined with --convention sweep")

    specs = [build(name, **arch_kwargs(name, base_filters, None)) for name in names]

    if convention == "sweep":
        results = convention_sweep(specs)
        header = ("convention",) + tuple(names) + ("max_error", "best")
        rows = [
            (r.convention.label,)
            + tuple(r.totals[name] for name in names)
            + (f"{r.max_error:.6f}", "*" if i == 0 else "")
            for i, r in enumerate(results)
        ]
        click.echo(format_text_table(header, rows))
        click.echo(f"best convention: {results[0].convention.label}")
        return

    for i, spec in enumerate(specs):
        if i:
            click.echo("")
        counted = count_params(spec, REFERENCE_CONVENTION)
        click.echo(_format_ledger(counted, ledger))
        if base_filters is None:
            click.echo(_format_comparison(spec.name, counted.total))
