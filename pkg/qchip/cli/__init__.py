"""
Command line entry point.

    qchip COMMAND [--config PATH] [--format csv|json] [--out PATH] [--log-level LEVEL] ...

Data goes to standard output (or --out), logs go to standard error.
Exit codes: 0 success, 1 usage, 2 numerical or physicality failure.
"""
import argparse
import json
import sys
from typing import Any, Dict, List, Optional

from exceptiongroup import ExceptionGroup

from ..channels import ChannelName
from ..errors import CheckFailure, QchipError, UsageError, exit_code
from ..log import logger, set_level
from ..settings import load_settings
from . import commands, export
from .events import parse_request

GLOBAL_OPTIONS = ("config", "format", "out", "log_level")


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _global_options() -> argparse.ArgumentParser:
    parent = ArgumentParser(add_help=False)
    parent.add_argument("--config", help="key=value settings file (default: $QCHIP_CONFIG)")
    parent.add_argument(
        "--format", choices=("csv", "json"), help="output format (default: json for reconstruct, csv otherwise)"
    )
    parent.add_argument("--out", help="write to this path or URL instead of standard output")
    parent.add_argument("--log-level", dest="log_level", help="log level (default: INFO)")
    return parent


def build_parser() -> ArgumentParser:
    parent = _global_options()
    parser = ArgumentParser(prog="qchip", description="Qubit potato chip geometry")
    sub = parser.add_subparsers(dest="command", parser_class=ArgumentParser)

    surface = sub.add_parser("surface", parents=[parent], help="sample a chip surface in the tetrahedron")
    surface.add_argument("--chip", type=int, choices=(1, 2, 3))
    surface.add_argument("--basis", help="qbism or wootters")
    surface.add_argument("--grid", type=int)
    surface.add_argument("--physical", action="store_true", default=None)

    boundary = sub.add_parser("boundary", parents=[parent], help="sample the pure-state chip border")
    boundary.add_argument("--basis", help="qbism or wootters")
    boundary.add_argument("--branch", help="plus or minus")
    boundary.add_argument("--samples", type=int)

    phi = sub.add_parser("phi-field", parents=[parent], help="Matthews correlation over the Bloch ball")
    phi.add_argument("--grid", type=int)

    reconstruct = sub.add_parser("reconstruct", parents=[parent], help="rebuild a chip state from two Pauli measurements")
    reconstruct.add_argument("--pz", type=float)
    reconstruct.add_argument("--px", type=float)
    reconstruct.add_argument("--axes", help="measured axis pair, e.g. ZX")

    channel = sub.add_parser("channel", parents=[parent], help="push the chip through a noise channel")
    channel.add_argument("--name", dest="channel", choices=[c.value for c in ChannelName])
    channel.add_argument("--xi", type=float)
    channel.add_argument("--grid", type=int)

    evolve = sub.add_parser("evolve", parents=[parent], help="integrate the border master equation")
    evolve.add_argument("--p0", type=float)
    evolve.add_argument("--p1", type=float)
    evolve.add_argument("--branch", help="plus or minus")
    evolve.add_argument("--steps", type=int)

    check = sub.add_parser("check", parents=[parent], help="run invariant suites")
    check.add_argument("suites", nargs="*", help="suite names or 'all'")
    return parser


def execute(
    command: str,
    values: Dict[str, Any],
    config: Optional[str] = None,
    out: Optional[str] = None,
    **overrides,
) -> int:
    """Run one subcommand from parsed values. Shared with the run-file driver."""
    settings = load_settings(config, **overrides)
    set_level(settings.log_level)

    request = parse_request(command, values, settings)
    logger.info(
        "Running command",
        extra={"command": command, "parameters": json.loads(request.json()), "out": out or "stdout"},
    )
    result = commands.run(request, settings)
    export.write(result, request, settings.format or request.default_format, out)
    return 2 if result.failed else 0


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = vars(build_parser().parse_args(argv))
        command = args.pop("command", None)
        if command is None:
            raise UsageError("A command is required")
        options = {name: args.pop(name, None) for name in GLOBAL_OPTIONS}
        return execute(command, args, **options)
    except ExceptionGroup as group:
        failures = [e.to_dict() for e in group.exceptions if isinstance(e, CheckFailure)]
        print(json.dumps(failures, indent=2))
        logger.error("Checks failed", extra={"failures": len(failures)})
        return 2
    except QchipError as e:
        print(f"qchip: {e}", file=sys.stderr)
        return exit_code(e)
