"""scripts/cli.py

Entry point for CLI.
"""

from typing import Any, Mapping, Optional, Sequence
import logging
import sys

import click

from dcunet import __version__, exceptions, get_settings, logs, update_settings
from dcunet.scripts.click_types import TOMLFile

logger = logging.getLogger(__name__)

#: Process exit codes
EXIT_SUCCESS = 0
EXIT_USAGE = 1
EXIT_DATA_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


@click.group("dcunet", invoke_without_command=True)
@click.option(
    "-c",
    "--config",
    type=TOMLFile(),
    default=None,
    help="Update global settings from this TOML file.",
)
@click.option(
    "--loglevel",
    help="Set level for log messages",
    default=None,
    type=click.Choice(["debug", "info", "warning", "error", "critical"]),
)
@click.option(
    "--deterministic",
    is_flag=True,
    default=False,
    help="Disable all internal parallelism for bitwise reproducible outputs.",
)
@click.version_option(version=__version__)
@click.pass_context
def cli(
    ctx: click.Context,
    config: Optional[Mapping[str, Any]] = None,
    loglevel: Optional[str] = None,
    deterministic: bool = False,
) -> None:
    """Build, train and evaluate U-Net style segmentation networks.

    All flags must be passed before specifying a subcommand.

    Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

    Example:

        $ dcunet -c config.toml params --arch dcunet

    """
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())

    # update settings from config file
    if config is not None:
        try:
            update_settings(**config)
        except ValueError as exc:
            raise click.UsageError(f"Invalid settings in config file: {exc.__cause__}")

    if deterministic:
        update_settings(DETERMINISTIC=True)

    # setup logging
    settings = get_settings()

    if loglevel is None:
        loglevel = settings.LOGLEVEL

    logs.set_logger(loglevel, catch_warnings=True)


def main(args: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and translate failures into exit codes"""
    try:
        rv = cli.main(args=args, prog_name="dcunet", standalone_mode=False, obj={})
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except exceptions.DataError as exc:
        logger.error("%s", exc)
        return EXIT_DATA_ERROR
    except exceptions.NumericalError as exc:
        logger.error("%s", exc)
        return EXIT_NUMERICAL_ERROR
    except (exceptions.InvalidArgumentsError, exceptions.UnsupportedConfigurationError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except Exception:
        logger.exception("Uncaught exception!", exc_info=True)
        return EXIT_USAGE

    if isinstance(rv, int):
        return rv
    return EXIT_SUCCESS


def entrypoint() -> None:
    sys.exit(main())


from dcunet.scripts.params import params  # noqa: E402

cli.add_command(params)

from dcunet.scripts.summarize import summarize  # noqa: E402

cli.add_command(summarize)

from dcunet.scripts.train import train  # noqa: E402

cli.add_command(train)

from dcunet.scripts.cv import cv  # noqa: E402

cli.add_command(cv)

from dcunet.scripts.eval import eval_  # noqa: E402

cli.add_command(eval_)

from dcunet.scripts.metrics import metrics  # noqa: E402

cli.add_command(metrics)

from dcunet.scripts.robustness import robustness  # noqa: E402

cli.add_command(robustness)

from dcunet.scripts.synth import synth  # noqa: E402

cli.add_command(synth)

if __name__ == "__main__":
    entrypoint()
