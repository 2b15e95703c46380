import logging
import sys

import click
from pydantic import ValidationError

from metastab import __version__
from metastab.cli.common import EXIT_ERROR, EXIT_OK
from metastab.core.config import get_settings
from metastab.core.errors import MetastabError
from metastab.domain.audit.commands import audit_command
from metastab.domain.complementing.commands import check_complementing_command
from metastab.domain.estimates.commands import estimates_command
from metastab.domain.mie.commands import mie_sweep_command

logger = logging.getLogger("metastab")


@click.group()
@click.version_option(__version__, prog_name="metastab")
def cli():
    """Stability criteria for Maxwell transmission problems with sign-changing coefficients."""
    logging.basicConfig(
        level=get_settings().log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


cli.add_command(check_complementing_command)
cli.add_command(audit_command)
cli.add_command(mie_sweep_command)
cli.add_command(estimates_command)


def run(argv: list[str] | None = None) -> int:
    """Invoke the CLI and map the outcome to 0 (ok), 1 (error) or 2 (violation under --strict)."""
    try:
        result = cli.main(args=argv, prog_name="metastab", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_ERROR
    except ValidationError as exc:
        click.echo(f"Error: invalid configuration\n{exc}", err=True)
        return EXIT_ERROR
    except (MetastabError, OSError, ValueError) as exc:
        click.echo(f"Error: {exc}", err=True)
        return EXIT_ERROR
    except Exception:
        logger.exception("unexpected failure")
        return EXIT_ERROR
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
