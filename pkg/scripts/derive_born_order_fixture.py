"""
Derive the Born convergence-order fixture used by the test suite.

For each smooth form factor the relative gap between the exact initial rate
and the golden rule is scanned along the limit sequence; the largest
gap / (Gamma / E_R) is padded by a quarter and rounded up to one decimal.
Run from the repository root:

    python scripts/derive_born_order_fixture.py [--out tests/fixtures/born_order.json]
"""
import argparse
import logging
import math
import sys
from pathlib import Path

import orjson

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from models.goldenrule import DecayChannelSet, FormFactor, born_limit_sequence  # noqa: E402

log = logging.getLogger("Gamowkit")

RATIOS = [1e-1, 1e-2, 1e-3]
FORMS = [FormFactor("constant"), FormFactor("lorentz-cutoff", cutoff=3.0)]
MARGIN = 1.25


def order_constant(e_r: float, form: FormFactor) -> float:
    rows = born_limit_sequence(e_r, RATIOS, DecayChannelSet.single(), form)
    worst = max(row.relative_error / row.ratio for row in rows)
    log.warning(f"{form.shape.value}: largest error / ratio = {worst:.4f}")
    return math.ceil(10 * MARGIN * worst) / 10


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--er", type=float, default=1.0)
    parser.add_argument("--out", default="tests/fixtures/born_order.json")
    args = parser.parse_args()

    forms = [{**form.echo(), "order_constant": order_constant(args.er, form)} for form in FORMS]
    fixture = {"e_r": args.er, "ratios": RATIOS, "forms": forms}
    Path(args.out).write_bytes(orjson.dumps(fixture, option=orjson.OPT_INDENT_2) + b"\n")


if __name__ == "__main__":
    logging.basicConfig(level=logging.WARNING)
    main()
