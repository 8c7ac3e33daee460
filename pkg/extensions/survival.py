import asyncio
import logging
from typing import TYPE_CHECKING

from extensions.shared import ExtensionBase, time_grid
from model_cache import parse_resonance
from models.evolution import gamow_curve, khalfin_comparison, survival_curve
from models.resonance import ResonanceParameters
from models.spectral import Support

if TYPE_CHECKING:
    from main import Toolkit

__all__ = ("setup", "SurvivalCommands")

log = logging.getLogger("Gamowkit")

SURVIVAL_COLUMNS = ("t", "amplitude_re", "amplitude_im", "survival", "gamow")
KHALFIN_COLUMNS = ("t", "p_semibounded", "exponential", "ratio")
SUPPORTS = {"full": Support.FULL_LINE, "full-line": Support.FULL_LINE, "semibounded": Support.SEMIBOUNDED}


class SurvivalCommands(ExtensionBase):
    def __init__(self, toolkit: "Toolkit") -> None:
        super().__init__(toolkit)
        parser = self.add_command(
            "survival", "Survival amplitude of a prepared state next to the Gamow law", self.survival, SURVIVAL_COLUMNS
        )
        self.add_model_option(parser, "Resonance or wavefunction file")
        parser.add_argument("--support", choices=tuple(SUPPORTS), default="semibounded")
        self.add_time_options(parser)

        parser = self.add_command(
            "khalfin", "Truncated Breit-Wigner survival against e^{-Gamma t}", self.khalfin, KHALFIN_COLUMNS
        )
        self.add_model_option(parser, "Resonance file")
        self.add_time_options(parser)

    def _resonance_for(self, path: str, phi) -> ResonanceParameters | None:
        doc = self.cache.load_document(path)
        if "resonance" in doc:
            return parse_resonance(doc)
        for p in phi.poles:
            if p.imag < 0 and p.real > 0:
                return ResonanceParameters.from_pole(p)
        return None

    async def survival(self, args) -> None:
        times = time_grid(args)
        support = SUPPORTS[args.support]
        phi = self.cache.get_wavefunction(args.model)
        params = self._resonance_for(args.model, phi)

        curve = await asyncio.to_thread(survival_curve, phi, times, support, **self.tolerances(args))
        gamow = gamow_curve(params, times).values if params else [None] * len(times)

        rows = [
            [t, a.real, a.imag, p, g] for t, a, p, g in zip(curve.times, curve.amplitudes, curve.values, gamow)
        ]
        self.emit(args, SURVIVAL_COLUMNS, rows, wavefunction=phi.echo(), support=support.value)

    async def khalfin(self, args) -> None:
        times = time_grid(args)
        params = self.cache.get_resonance(args.model)
        table = await asyncio.to_thread(khalfin_comparison, params, times, **self.tolerances(args))
        rows = [[r.t, r.p_semibounded, r.exponential, r.ratio] for r in table]
        self.emit(args, KHALFIN_COLUMNS, rows, resonance={"er": params.e_r, "gamma": params.gamma})


def setup(toolkit: "Toolkit") -> None:
    SurvivalCommands(toolkit)
