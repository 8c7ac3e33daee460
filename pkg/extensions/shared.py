import argparse
import csv
import datetime
import logging
import sys
from io import StringIO
from pathlib import Path
from typing import TYPE_CHECKING, Any, Callable, Sequence

import numpy as np
import orjson

from const import process_numbers
from models.errors import InvalidModelError, SemigroupDomainError, ToolkitError, ToolkitIOError

if TYPE_CHECKING:
    from main import Toolkit

__all__ = ("ExtensionBase", "argtype", "time_grid")

log = logging.getLogger("Gamowkit")


def argtype(parser: Callable[[str], Any]) -> Callable[[str], Any]:
    """Adapt a `const` parser for argparse so bad values exit with a usage error."""

    def convert(text: str) -> Any:
        try:
            return parser(text)
        except ToolkitError as e:
            raise argparse.ArgumentTypeError(e.message) from e

    convert.__name__ = parser.__name__
    return convert


def time_grid(args: argparse.Namespace, semigroup: bool = True) -> list[float]:
    """Explicit `--t` list, or `steps + 1` evenly spaced times on [0, t_max]."""
    if args.t:
        times = list(args.t)
    else:
        if not args.t_max > 0 or args.steps < 1:
            raise InvalidModelError("--t-max must be positive and --steps at least 1", t_max=args.t_max)
        times = [args.t_max * i / args.steps for i in range(args.steps + 1)]
    if semigroup and min(times) < 0:
        raise SemigroupDomainError("This command evolves forward in time only; times must be >= 0", t=min(times))
    if any(b <= a for a, b in zip(times, times[1:])):
        raise InvalidModelError("Times must be strictly increasing")
    return times


def _plain(value: Any) -> Any:
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return value


def _cell(value: Any) -> str:
    value = _plain(value)
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


class ExtensionBase:
    def __init__(self, toolkit: "Toolkit") -> None:
        self.toolkit = toolkit

    @property
    def cache(self):
        return self.toolkit.cache

    def add_command(self, name: str, description: str, handler, columns: Sequence[str]) -> argparse.ArgumentParser:
        parser = self.toolkit.subparsers.add_parser(
            name, help=description, description=description, epilog=f"CSV columns: {','.join(columns)}"
        )
        parser.set_defaults(handler=handler)
        parser.add_argument("--out", default=None, help="Write to this file instead of stdout")
        parser.add_argument("--format", choices=("csv", "json"), default="csv")
        parser.add_argument("--stamp", action="store_true", help="Add a generation timestamp to the header")
        parser.add_argument("--quad-order", type=int, default=None, help="Quadrature order (default from env)")
        parser.add_argument("--tol", type=float, default=None, help="Self-convergence tolerance")
        return parser

    @staticmethod
    def add_model_option(parser: argparse.ArgumentParser, help: str, required: bool = True) -> None:
        parser.add_argument("--model", required=required, help=help)

    @staticmethod
    def add_time_options(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--t-max", type=float, default=10.0)
        parser.add_argument("--steps", type=int, default=100)
        parser.add_argument("--t", type=argtype(process_numbers), default=None, help="Explicit times, e.g. `0,0.5,1`")

    @staticmethod
    def tolerances(args: argparse.Namespace) -> dict:
        return {"tol": args.tol} if args.tol is not None else {}

    def provenance(self, args: argparse.Namespace, **extra: Any) -> dict:
        config = {k: v for k, v in sorted(vars(args).items()) if k != "handler"}
        header = {"command": args.command, "config": config, **extra}
        if args.stamp:
            header["generated"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        return header

    def emit(self, args: argparse.Namespace, columns: Sequence[str], rows: list[list], **extra: Any) -> None:
        header = self.provenance(args, **extra)
        log.debug(f"Writing {len(rows)} rows for {args.command} as {args.format}")
        if args.format == "json":
            payload = {
                "provenance": header,
                "columns": list(columns),
                "rows": [{c: _plain(v) for c, v in zip(columns, row)} for row in rows],
            }
            text = orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS, default=_plain).decode()
            text += "\n"
        else:
            f = StringIO()
            f.write("# " + orjson.dumps(header, option=orjson.OPT_SORT_KEYS, default=_plain).decode() + "\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            writer.writerows([_cell(v) for v in row] for row in rows)
            text = f.getvalue()

        if args.out:
            try:
                Path(args.out).write_text(text)
            except OSError as e:
                raise ToolkitIOError(f"Cannot write {args.out}", error=e.strerror) from e
        else:
            sys.stdout.write(text)
