"""
Derive the Khalfin fixture used by the test suite.

The crossover is located with the long-time endpoint form of the survival
amplitude, then t_max is pushed out to a round time with margin and checked
against the full quadrature. Run from the repository root:

    python scripts/derive_khalfin_fixture.py [--out tests/fixtures/khalfin.json]
"""
import argparse
import logging
import math
import sys
from pathlib import Path

import orjson

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from models.evolution import khalfin_comparison, long_time_amplitude  # noqa: E402
from models.spectral import EnergyWavefunction, ResonanceParameters, Support  # noqa: E402

log = logging.getLogger("Gamowkit")

MIN_RATIO = 10.0


def crossover(params: ResonanceParameters, step: float = 0.25, limit: float = 200.0) -> float:
    phi = EnergyWavefunction.breit_wigner(params, Support.SEMIBOUNDED)
    t = step
    while t < limit:
        ratio = abs(long_time_amplitude(phi, t)) ** 2 / math.exp(-params.gamma * t)
        if ratio > MIN_RATIO:
            return t
        t += step
    raise RuntimeError("No crossover below the scan limit")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--er", type=float, default=40.0)
    parser.add_argument("--gamma", type=float, default=1.0)
    parser.add_argument("--out", default="tests/fixtures/khalfin.json")
    args = parser.parse_args()

    params = ResonanceParameters(e_r=args.er, gamma=args.gamma)
    t_cross = crossover(params)
    t_max = 5.0 * math.ceil(1.4 * t_cross / 5.0)
    (row,) = khalfin_comparison(params, [t_max])
    log.warning(f"crossover near t = {t_cross}, ratio at t_max = {t_max}: {row.ratio:.3e}")
    if row.ratio <= MIN_RATIO:
        raise RuntimeError("Quadrature disagrees with the long-time estimate at t_max")

    fixture = {"e_r": args.er, "gamma": args.gamma, "t_max": t_max, "min_ratio": MIN_RATIO}
    Path(args.out).write_bytes(orjson.dumps(fixture, option=orjson.OPT_INDENT_2) + b"\n")


if __name__ == "__main__":
    logging.basicConfig(level=logging.WARNING)
    main()
