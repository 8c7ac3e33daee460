import asyncio
import logging
from typing import TYPE_CHECKING

import numpy as np

from const import process_grid
from extensions.shared import ExtensionBase, argtype
from models.spectral import Kernel, complex_basis_reconstruct, dirac_reconstruct

if TYPE_CHECKING:
    from main import Toolkit

__all__ = ("setup", "ExpansionCommands")

log = logging.getLogger("Gamowkit")

COLUMNS = ("E", "dirac_re", "dirac_im", "complex_re", "complex_im", "deviation")


class ExpansionCommands(ExtensionBase):
    def __init__(self, toolkit: "Toolkit") -> None:
        super().__init__(toolkit)
        parser = self.add_command(
            "expansion", "Dirac against complex-basis reconstruction of a state", self.expansion, COLUMNS
        )
        self.add_model_option(parser, "Rational scattering model file")
        parser.add_argument("--wavefunction", required=True, help="Wavefunction file (poles above the real axis)")
        parser.add_argument("--grid", type=argtype(process_grid), default=[0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
        parser.add_argument(
            "--kernel",
            choices=[k.value for k in Kernel],
            default=Kernel.PROBE.value,
            help="Basis kernel: smooth probe or nascent delta (reads off the in-state weight)",
        )

    async def expansion(self, args) -> None:
        model = self.cache.get_scattering(args.model)
        phi = self.cache.get_wavefunction(args.wavefunction)
        options = self.tolerances(args)
        options["kernel"] = args.kernel

        dirac, result = await asyncio.gather(
            asyncio.to_thread(dirac_reconstruct, phi, model, args.grid, **options),
            asyncio.to_thread(complex_basis_reconstruct, phi, model, args.grid, **options),
        )
        deviation = np.abs(result.reconstruction - dirac)
        rows = [
            [e, d.real, d.imag, c.real, c.imag, dev]
            for e, d, c, dev in zip(result.grid, dirac, result.reconstruction, deviation)
        ]
        self.emit(
            args,
            COLUMNS,
            rows,
            model=model.echo(),
            wavefunction=phi.echo(),
            pole_coefficients=[[c.real, c.imag] for c in result.pole_coefficients],
            max_deviation=float(np.max(deviation)) if len(deviation) else 0.0,
        )


def setup(toolkit: "Toolkit") -> None:
    ExpansionCommands(toolkit)
