import asyncio
import logging
from typing import TYPE_CHECKING

import numpy as np

from extensions.shared import ExtensionBase, time_grid
from model_cache import echo_generator
from models.errors import InvalidModelError
from models.openquantum import (
    DensityMatrix,
    lindblad_evolve,
    purity,
    random_density,
    random_generator,
    semigroup_compose_check,
)

if TYPE_CHECKING:
    from main import Toolkit

__all__ = ("setup", "LindbladCommands")

log = logging.getLogger("Gamowkit")

BASE_COLUMNS = ("t", "trace", "purity", "min_eigenvalue")


class LindbladCommands(ExtensionBase):
    def __init__(self, toolkit: "Toolkit") -> None:
        super().__init__(toolkit)
        parser = self.add_command(
            "lindblad", "Kossakowski-Lindblad evolution of a density matrix", self.lindblad, BASE_COLUMNS + ("p0..",)
        )
        self.add_model_option(parser, "Generator file; omit to use the seeded random corpus", required=False)
        parser.add_argument("--seed", type=int, default=None, help="Seed for the random corpus")
        parser.add_argument("--dim", type=int, default=2, help="Dimension of the random corpus")
        self.add_time_options(parser)

    def _load(self, args):
        if args.model:
            generator, rho0 = self.cache.get_generator(args.model)
            if rho0 is None:
                excited = np.zeros(generator.dim)
                excited[-1] = 1.0
                rho0 = DensityMatrix.pure(excited)
            return generator, rho0
        if args.seed is None:
            raise InvalidModelError("lindblad needs --model or --seed")
        rng = np.random.default_rng(args.seed)
        generator = random_generator(args.dim, rng)
        return generator, random_density(args.dim, rng)

    async def lindblad(self, args) -> None:
        generator, rho0 = self._load(args)
        times = time_grid(args, semigroup=generator.dissipative)

        states = await asyncio.to_thread(lambda: [lindblad_evolve(generator, rho0, t) for t in times])
        rows = [
            [t, rho.trace.real, purity(rho), rho.min_eigenvalue, *rho.populations] for t, rho in zip(times, states)
        ]
        half = 0.5 * max(times[-1], 0.0)
        columns = BASE_COLUMNS + tuple(f"p{i}" for i in range(generator.dim))
        self.emit(
            args,
            columns,
            rows,
            generator=echo_generator(generator, rho0),
            semigroup_deviation=semigroup_compose_check(generator, rho0, half, half),
        )


def setup(toolkit: "Toolkit") -> None:
    LindbladCommands(toolkit)
