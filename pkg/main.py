import argparse
import asyncio
import importlib
import logging
import os
import sys
from contextlib import contextmanager
from typing import Iterator, Sequence

from dotenv import load_dotenv

from const import get_settings
from model_cache import ModelCache
from models.errors import ToolkitError

__all__ = ("Toolkit", "main")

log = logging.getLogger("Gamowkit")

EXTENSIONS = (
    "extensions.poles",
    "extensions.survival",
    "extensions.decay",
    "extensions.lindblad",
    "extensions.expansion",
)
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Toolkit:
    """Command host: extensions register subcommands, `run` dispatches one per process."""

    def __init__(self) -> None:
        self.cache = ModelCache()
        self.parser = argparse.ArgumentParser(
            prog="gamowkit", description="Resonances, decay laws and open-system evolution."
        )
        self.parser.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, default=None)
        self.subparsers = self.parser.add_subparsers(dest="command", required=True, metavar="command")
        self.extensions: list[str] = []

    @classmethod
    def create(cls) -> "Toolkit":
        toolkit = cls()
        for name in EXTENSIONS:
            toolkit.load_extension(name)
        return toolkit

    def load_extension(self, name: str) -> None:
        importlib.import_module(name).setup(self)
        self.extensions.append(name)
        log.debug(f"Loaded extension {name}")

    @contextmanager
    def overrides(self, args: argparse.Namespace) -> Iterator[None]:
        """Apply per-run settings from flags, restoring the environment afterwards."""
        previous = os.environ.get("GAMOWKIT_QUAD_ORDER")
        order = getattr(args, "quad_order", None)
        if order is not None:
            os.environ["GAMOWKIT_QUAD_ORDER"] = str(order)
        try:
            yield
        finally:
            if previous is None:
                os.environ.pop("GAMOWKIT_QUAD_ORDER", None)
            else:
                os.environ["GAMOWKIT_QUAD_ORDER"] = previous

    async def run(self, args: argparse.Namespace) -> int:
        try:
            level = args.log_level or get_settings().log_level
            logging.basicConfig(
                level=level if level in LOG_LEVELS else "WARNING",
                stream=sys.stderr,
                format="%(levelname)s %(name)s: %(message)s",
                force=True,
            )
            log.debug(f"Running {args.command} with {len(self.extensions)} extensions loaded")
            with self.overrides(args):
                await args.handler(args)
            log.debug(f"{args.command} finished with {self.cache.total_models} models cached")
        except ToolkitError as e:
            log.debug(f"{args.command} failed", exc_info=e)
            print(str(e), file=sys.stderr)
            return 1
        return 0


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    toolkit = Toolkit.create()
    # usage errors exit with status 2 before any event loop starts
    args = toolkit.parser.parse_args(argv)
    return asyncio.run(toolkit.run(args))


if __name__ == "__main__":
    sys.exit(main())
