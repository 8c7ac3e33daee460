import asyncio
import logging
from typing import TYPE_CHECKING

from const import process_region
from extensions.shared import ExtensionBase, argtype
from models.scattering import PoleSearchRegion, find_poles, winding_number

if TYPE_CHECKING:
    from main import Toolkit

__all__ = ("setup", "PoleCommands")

log = logging.getLogger("Gamowkit")

COLUMNS = ("re", "im", "e_r", "gamma", "lifetime", "residue_re", "residue_im")


class PoleCommands(ExtensionBase):
    def __init__(self, toolkit: "Toolkit") -> None:
        super().__init__(toolkit)
        parser = self.add_command("poles", "Locate second-sheet S-matrix poles in a rectangle", self.poles, COLUMNS)
        self.add_model_option(parser, "Scattering model file (rational or delta-shell)")
        parser.add_argument(
            "--region", required=True, type=argtype(process_region), help="e_min,e_max,im_min[,eps], e.g. `1,3,-0.5`"
        )
        parser.add_argument("--mirror", action="store_true", help="Also search the conjugate rectangle")

    async def poles(self, args) -> None:
        model = self.cache.get_scattering(args.model)
        region = PoleSearchRegion(*args.region)
        regions = [region, region.mirrored()] if args.mirror else [region]

        found, counts = [], []
        for r in regions:
            counts.append(await asyncio.to_thread(winding_number, model, r))
            found.extend(await asyncio.to_thread(find_poles, model, r))

        rows = []
        for pole in found:
            gamma = 2 * abs(pole.z.imag)
            rows.append([pole.z.real, pole.z.imag, pole.z.real, gamma, 1 / gamma, pole.residue.real, pole.residue.imag])
        self.emit(args, COLUMNS, rows, model=model.echo(), winding=counts)


def setup(toolkit: "Toolkit") -> None:
    PoleCommands(toolkit)
