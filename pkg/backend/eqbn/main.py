import sys
from typing import Optional, Sequence

import click

from eqbn.cli import cli
from eqbn.reports import EXIT_USAGE, error_report, render


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Console entry point; click usage errors become JSON error objects."""
    try:
        code = cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.ClickException as exc:
        click.echo(render(error_report(exc)).decode(), nl=False)
        sys.exit(EXIT_USAGE)
    except click.Abort:
        sys.exit(EXIT_USAGE)
    sys.exit(code if isinstance(code, int) else 0)


if __name__ == "__main__":
    main()
