import asyncio
import logging
from typing import TYPE_CHECKING

from const import process_numbers
from extensions.shared import ExtensionBase, argtype, time_grid
from models.goldenrule import (
    BornState,
    born_limit_row,
    decay_curve,
    fermi_golden_rule,
    lifetime,
    width_consistency,
)

if TYPE_CHECKING:
    from main import Toolkit

__all__ = ("setup", "DecayCommands")

log = logging.getLogger("Gamowkit")

DECAY_COLUMNS = ("t", "P", "rate", "survival")
BORN_COLUMNS = ("ratio", "gamma", "exact_rate", "fermi_rate", "relative_error")


class DecayCommands(ExtensionBase):
    def __init__(self, toolkit: "Toolkit") -> None:
        super().__init__(toolkit)
        parser = self.add_command("decay", "Decay probability and exact golden-rule rate", self.decay, DECAY_COLUMNS)
        self.add_model_option(parser, "Decay model file")
        self.add_time_options(parser)

        parser = self.add_command(
            "born-limit", "Exact initial rate against Fermi's rule as Gamma / E_R shrinks", self.born_limit, BORN_COLUMNS
        )
        self.add_model_option(parser, "Decay model file (E_R, channels and form factor are reused)")
        parser.add_argument("--ratios", type=argtype(process_numbers), default=[0.1, 0.01, 0.001])

    async def decay(self, args) -> None:
        times = time_grid(args)
        raw = self.cache.get_decay(args.model)
        model = await asyncio.to_thread(raw.normalized)
        curve = decay_curve(model, times)

        rows = [[t, p, r, s] for t, p, r, s in zip(curve.times, curve.p_values, curve.rate_values, curve.survival)]
        self.emit(
            args,
            DECAY_COLUMNS,
            rows,
            model=raw.echo(),
            normalized_coupling=model.form.coupling,
            lifetime=lifetime(model.resonance),
            width=width_consistency(model),
            fermi_rate=fermi_golden_rule(BornState.from_model(model), model.channels),
        )

    async def born_limit(self, args) -> None:
        raw = self.cache.get_decay(args.model)
        e_r = raw.resonance.e_r
        # each ratio is an independent model; results keep the input order
        table = await asyncio.gather(
            *[asyncio.to_thread(born_limit_row, e_r, ratio, raw.channels, raw.form) for ratio in args.ratios]
        )
        rows = [[r.ratio, r.gamma, r.exact_rate, r.fermi_rate, r.relative_error] for r in table]
        self.emit(args, BORN_COLUMNS, rows, model=raw.echo())


def setup(toolkit: "Toolkit") -> None:
    DecayCommands(toolkit)
