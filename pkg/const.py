import os
import re

import attr

from models.errors import InvalidModelError

__all__ = (
    "DEFAULT_QUAD_ORDER",
    "DEFAULT_QUAD_SCALE",
    "QUAD_TOL",
    "ROOT_TOL",
    "NEWTON_MAX_ITER",
    "SUBDIVISION_DEPTH",
    "WINDING_TOL",
    "EIGENVALUE_FLOOR",
    "STATE_TOL",
    "EVOLUTION_TOL",
    "MAX_LINDBLAD_DIM",
    "PROBE_OFFSET",
    "DELTA_WIDTH",
    "Settings",
    "get_settings",
    "process_region",
    "process_grid",
    "process_numbers",
)

DEFAULT_QUAD_ORDER = 64
DEFAULT_QUAD_SCALE = 1.0
QUAD_TOL = 1e-8
ROOT_TOL = 1e-12
NEWTON_MAX_ITER = 60
SUBDIVISION_DEPTH = 12
WINDING_TOL = 1e-3
EIGENVALUE_FLOOR = -1e-10
STATE_TOL = 1e-12
EVOLUTION_TOL = 1e-10
MAX_LINDBLAD_DIM = 16
PROBE_OFFSET = 1.0
DELTA_WIDTH = 1e-7

NUMBER_PATTERN = re.compile(r"^\s*[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?\s*$")


@attr.s(auto_attribs=True, frozen=True)
class Settings:
    quad_order: int = DEFAULT_QUAD_ORDER
    quad_scale: float = DEFAULT_QUAD_SCALE
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> "Settings":
        order = os.getenv("GAMOWKIT_QUAD_ORDER")
        scale = os.getenv("GAMOWKIT_QUAD_SCALE")
        try:
            return cls(
                quad_order=int(order) if order else DEFAULT_QUAD_ORDER,
                quad_scale=float(scale) if scale else DEFAULT_QUAD_SCALE,
                log_level=os.getenv("GAMOWKIT_LOG_LEVEL", "WARNING").upper(),
            )
        except ValueError as e:
            raise InvalidModelError("Invalid GAMOWKIT_* environment setting", error=str(e)) from e


def get_settings() -> Settings:
    # read on every call so a late load_dotenv() or a patched environment is honoured
    return Settings.from_env()


def process_numbers(text: str) -> list[float]:
    """Parse a comma separated list of numbers, e.g. `1,3,-0.5`."""
    parts = [p for p in text.split(",") if p.strip()]
    if not parts or not all(NUMBER_PATTERN.match(p) for p in parts):
        raise InvalidModelError("Invalid number list, please follow example: `1,3,-0.5`", value=text)
    return [float(p) for p in parts]


def process_region(text: str) -> tuple[float, float, float, float]:
    """`e_min,e_max,im_min[,eps]` -> rectangle below the real axis."""
    values = process_numbers(text)
    if len(values) not in (3, 4):
        raise InvalidModelError("A region needs `e_min,e_max,im_min[,eps]`", value=text)
    e_min, e_max, im_min = values[:3]
    eps = values[3] if len(values) == 4 else 1e-4
    return e_min, e_max, im_min, -abs(eps)


def process_grid(text: str) -> list[float]:
    """`start,stop,count` -> evenly spaced grid."""
    values = process_numbers(text)
    if len(values) != 3 or values[2] < 2 or values[2] != int(values[2]):
        raise InvalidModelError("A grid needs `start,stop,count` with count >= 2", value=text)
    start, stop, count = values[0], values[1], int(values[2])
    step = (stop - start) / (count - 1)
    return [start + i * step for i in range(count)]
