"""
S-matrix models analytic in the complex energy plane.

Units are hbar = 1, m = 1/2, so E = k^2. The physical (first) sheet is
reached with Im k >= 0, the second sheet by k -> -k. Decaying resonance
poles sit in the lower half of the second sheet; their conjugates, the
exponentially growing partners, sit in the upper half.

For the constructed rational model with poles z_i,
R(z) = prod (z - conj z_i) / (z - z_i); the first sheet is R above the
real axis (and on it) and 1/R below, the second sheet is R below the
axis and 1/R above and on it.

The delta-shell model V(r) = g delta(r - a) has the s-wave Jost function
f(k) = 1 + (g / 2ik) (exp(2ika) - 1), S(k) = f(-k) / f(k). Matching
sin(kr) inside the shell to a e^{ikr} + b e^{-ikr} outside with the jump
u'(a+) - u'(a-) = g u(a) gives b = (i/2) f(k) and a = -(i/2) f(-k).
"""
import cmath
import logging
import math
from enum import Enum
from typing import Iterable

import attr
import numpy as np
from scipy.optimize import brentq, minimize_scalar

from const import NEWTON_MAX_ITER, ROOT_TOL, SUBDIVISION_DEPTH, WINDING_TOL
from models.errors import InvalidModelError, NonConvergenceError
from models.quadrature import Contour, as_energy, build_quadrature, integrate
from models.resonance import ResonanceParameters

__all__ = (
    "ModelKind",
    "Sheet",
    "SMatrixModel",
    "ResonancePole",
    "PoleSearchRegion",
    "s_matrix",
    "jost",
    "pole_function",
    "phase_shift",
    "winding_number",
    "find_poles",
    "scattering_state",
    "partial_cross_section",
    "resonance_fwhm",
)

log = logging.getLogger("Scattering")

BOUNDARY_FLOOR = 1e-9
RESIDUE_NODES = 128


class ModelKind(str, Enum):
    RATIONAL = "rational"
    DELTA_SHELL = "delta-shell"


class Sheet(str, Enum):
    FIRST = "first"
    SECOND = "second"


def _pole_tuple(values: Iterable) -> tuple[complex, ...]:
    return tuple(complex(v) for v in values)


@attr.s(auto_attribs=True, frozen=True)
class SMatrixModel:
    kind: ModelKind = attr.ib(converter=ModelKind)
    poles: tuple[complex, ...] = attr.ib(default=(), converter=_pole_tuple)
    g: float | None = None
    a: float | None = None

    def __attrs_post_init__(self) -> None:
        if self.kind is ModelKind.RATIONAL:
            for p in self.poles:
                if not cmath.isfinite(p) or p.imag >= 0:
                    raise InvalidModelError("Rational model poles must be finite and below the real axis", pole=p)
            if len(set(self.poles)) != len(self.poles):
                raise InvalidModelError("Rational model poles must be distinct")
        else:
            for name in ("g", "a"):
                value = getattr(self, name)
                if value is None or not (math.isfinite(value) and value > 0):
                    raise InvalidModelError(f"Delta-shell {name} must be positive and finite", value=value)

    @classmethod
    def rational(cls, poles: Iterable[complex]) -> "SMatrixModel":
        return cls(ModelKind.RATIONAL, poles=poles)

    @classmethod
    def delta_shell(cls, g: float, a: float) -> "SMatrixModel":
        return cls(ModelKind.DELTA_SHELL, g=float(g), a=float(a))

    @property
    def is_rational(self) -> bool:
        return self.kind is ModelKind.RATIONAL

    def echo(self) -> dict:
        if self.is_rational:
            return {"kind": self.kind.value, "poles": [{"re": p.real, "im": p.imag} for p in self.poles]}
        return {"kind": self.kind.value, "g": self.g, "a": self.a}

    def rational_function(self, z) -> np.ndarray:
        """R(z) = prod (z - conj z_i) / (z - z_i), vectorized."""
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for p in self.poles:
            out = out * (z - p.conjugate()) / (z - p)
        return out

    def rational_residue(self, index: int) -> complex:
        """Exact residue of R at its i-th pole."""
        p = self.poles[index]
        value = p - p.conjugate()
        for j, q in enumerate(self.poles):
            if j != index:
                value *= (p - q.conjugate()) / (p - q)
        return complex(value)


def _first_sheet_momentum(z):
    z = np.asarray(z, dtype=complex) + 0.0  # drop negative zeros before taking the branch
    s = np.sqrt(z)
    return np.where(z.imag >= 0, s, -s)


def jost(model: SMatrixModel, k):
    """s-wave Jost function of the delta-shell model."""
    if model.is_rational:
        raise InvalidModelError("Jost functions are defined for the delta-shell model only")
    k = np.asarray(k, dtype=complex)
    g, a = model.g, model.a
    with np.errstate(divide="ignore", invalid="ignore"):
        value = 1 + (g / (2j * k)) * np.expm1(2j * k * a)
    value = np.where(k == 0, 1 + g * a, value)
    return value if value.ndim else complex(value)


def s_matrix(model: SMatrixModel, z: complex, sheet: str | Sheet = Sheet.FIRST) -> complex:
    z = as_energy(z)
    sheet = Sheet(sheet)
    if model.is_rational:
        use_r = z.imag >= 0 if sheet is Sheet.FIRST else z.imag < 0
        value = complex(1.0)
        for p in model.poles:
            num, den = (z - p.conjugate(), z - p) if use_r else (z - p, z - p.conjugate())
            if den == 0:
                raise InvalidModelError("Energy is a pole of the S-matrix", z=z, sheet=sheet.value)
            value *= num / den
        return value

    k = complex(_first_sheet_momentum(z))
    if sheet is Sheet.SECOND:
        k = -k
    denominator = jost(model, k)
    if abs(denominator) == 0:
        raise InvalidModelError("Energy is a pole of the S-matrix", z=z, sheet=sheet.value)
    return complex(jost(model, -k) / denominator)


def pole_function(model: SMatrixModel, z):
    """An analytic function whose zeros are exactly the second-sheet poles."""
    z = np.asarray(z, dtype=complex)
    if model.is_rational:
        below = np.ones_like(z)
        above = np.ones_like(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            for p in model.poles:
                below = below * (z - p) / (z - p.conjugate())
                above = above * (z - p.conjugate()) / (z - p)
        value = np.where(z.imag < 0, below, above)
    else:
        value = jost(model, -_first_sheet_momentum(z))
    return value if np.ndim(value) else complex(value)


def phase_shift(model: SMatrixModel, energies):
    """
    Phase shift delta with S(E) = exp(2i delta) on the physical sheet.

    For an array the branch is continuous in E, starting from the principal
    value at the first energy.
    """
    values = np.atleast_1d(np.asarray(energies, dtype=float))
    if np.any(values <= 0):
        raise InvalidModelError("Phase shifts need positive energies")
    s = np.array([s_matrix(model, e, Sheet.FIRST) for e in values])
    delta = np.unwrap(np.angle(s)) / 2
    return float(delta[0]) if np.ndim(energies) == 0 else delta


def partial_cross_section(model: SMatrixModel, energy: float) -> float:
    """(4 pi / k^2) sin^2 delta, using sin^2 delta = |1 - S|^2 / 4."""
    if not energy > 0:
        raise InvalidModelError("Cross sections need a positive energy", energy=energy)
    s = s_matrix(model, energy, Sheet.FIRST)
    return math.pi * abs(1 - s) ** 2 / energy


def resonance_fwhm(model: SMatrixModel, e_lo: float, e_hi: float) -> tuple[float, float]:
    """Locate the cross-section peak inside (e_lo, e_hi) and return (peak energy, full width at half maximum)."""
    result = minimize_scalar(
        lambda e: -partial_cross_section(model, e), bounds=(e_lo, e_hi), method="bounded", options={"xatol": 1e-12}
    )
    peak = float(result.x)
    half = 0.5 * partial_cross_section(model, peak)

    def excess(e: float) -> float:
        return partial_cross_section(model, e) - half

    if excess(e_lo) >= 0 or excess(e_hi) >= 0:
        raise InvalidModelError("The resonance line is not resolved inside the scan window", e_lo=e_lo, e_hi=e_hi)
    left = brentq(excess, e_lo, peak, xtol=1e-15, rtol=4e-16)
    right = brentq(excess, peak, e_hi, xtol=1e-15, rtol=4e-16)
    return peak, right - left


def scattering_state(model: SMatrixModel, energy: float, r):
    """
    Regular s-wave scattering solution normalized as (i/2)(e^{-ikr} - S e^{ikr}) outside the shell.

    Inside the shell it is sin(kr) / f(k); the two pieces are continuous at r = a
    and their derivatives jump by g u(a).
    """
    if model.is_rational:
        raise InvalidModelError("Scattering states are available for the delta-shell model only")
    if not energy > 0:
        raise InvalidModelError("Scattering states need a positive energy", energy=energy)
    radii = np.asarray(r, dtype=float)
    if np.any(radii < 0):
        raise InvalidModelError("Radius must be non-negative")
    k = math.sqrt(energy)
    s = s_matrix(model, energy, Sheet.FIRST)
    inside = np.sin(k * radii) / jost(model, k)
    outside = 0.5j * (np.exp(-1j * k * radii) - s * np.exp(1j * k * radii))
    value = np.where(radii < model.a, inside, outside)
    return value if value.ndim else complex(value)


@attr.s(auto_attribs=True, frozen=True)
class PoleSearchRegion:
    """Rectangle [e_min, e_max] x [im_min, im_max] on the second sheet, kept off the real axis."""

    e_min: float = attr.ib(converter=float)
    e_max: float = attr.ib(converter=float)
    im_min: float = attr.ib(converter=float)
    im_max: float = attr.ib(converter=float)

    def __attrs_post_init__(self) -> None:
        values = (self.e_min, self.e_max, self.im_min, self.im_max)
        if not all(math.isfinite(v) for v in values):
            raise InvalidModelError("Search region bounds must be finite")
        if not (self.e_min < self.e_max and self.im_min < self.im_max):
            raise InvalidModelError("Search region is degenerate", region=values)
        if self.im_min <= 0 <= self.im_max:
            raise InvalidModelError("Search region must not touch the real axis", region=values)

    @classmethod
    def below(cls, e_min: float, e_max: float, gamma_max: float, eps: float = 1e-4) -> "PoleSearchRegion":
        return cls(e_min, e_max, -0.5 * gamma_max, -eps)

    def mirrored(self) -> "PoleSearchRegion":
        return PoleSearchRegion(self.e_min, self.e_max, -self.im_max, -self.im_min)

    def halves(self, fraction: float = 0.5) -> tuple["PoleSearchRegion", "PoleSearchRegion"]:
        """Split along the longer side."""
        if self.e_max - self.e_min >= self.im_max - self.im_min:
            cut = self.e_min + fraction * (self.e_max - self.e_min)
            return (
                PoleSearchRegion(self.e_min, cut, self.im_min, self.im_max),
                PoleSearchRegion(cut, self.e_max, self.im_min, self.im_max),
            )
        cut = self.im_min + fraction * (self.im_max - self.im_min)
        return (
            PoleSearchRegion(self.e_min, self.e_max, self.im_min, cut),
            PoleSearchRegion(self.e_min, self.e_max, cut, self.im_max),
        )

    def contains(self, z: complex) -> bool:
        return self.e_min <= z.real <= self.e_max and self.im_min <= z.imag <= self.im_max

    def boundary(self, per_side: int) -> np.ndarray:
        """Counter-clockwise closed polygon with `per_side` samples on each edge."""
        corners = [
            complex(self.e_min, self.im_min),
            complex(self.e_max, self.im_min),
            complex(self.e_max, self.im_max),
            complex(self.e_min, self.im_max),
        ]
        s = np.arange(per_side) / per_side
        edges = [c0 + (c1 - c0) * s for c0, c1 in zip(corners, corners[1:] + corners[:1])]
        return np.concatenate(edges + [np.array([corners[0]])])


@attr.s(auto_attribs=True, frozen=True)
class ResonancePole:
    z: complex = attr.ib(converter=complex)
    residue: complex = attr.ib(converter=complex)

    @property
    def growing(self) -> bool:
        """Upper-half-plane partner of a decaying pole."""
        return self.z.imag > 0

    @property
    def params(self) -> ResonanceParameters:
        return ResonanceParameters(e_r=self.z.real, gamma=2.0 * abs(self.z.imag))


def _winding(model: SMatrixModel, region: PoleSearchRegion, tol: float = WINDING_TOL) -> tuple[int, int]:
    per_side, previous, resolved = 64, None, False
    while per_side <= 2**15:
        values = pole_function(model, region.boundary(per_side))
        if np.min(np.abs(values)) < BOUNDARY_FLOOR or not np.all(np.isfinite(values)):
            raise InvalidModelError("A pole lies on the search-region boundary", region=attr.astuple(region))
        steps = np.angle(values[1:] / values[:-1])
        total = float(np.sum(steps)) / (2 * math.pi)
        # a zero on an edge keeps one step at a half turn however fine the sampling
        resolved = float(np.max(np.abs(steps))) < 0.5 * math.pi
        if resolved and previous is not None and abs(total - previous) < tol and abs(total - round(total)) < tol:
            return int(round(total)), per_side
        previous = total
        per_side *= 2
    if not resolved:
        raise InvalidModelError("A pole lies on the search-region boundary", region=attr.astuple(region))
    raise NonConvergenceError("Winding number did not stabilize", region=attr.astuple(region))


def winding_number(model: SMatrixModel, region: PoleSearchRegion) -> int:
    """Number of second-sheet poles inside the region (argument principle)."""
    return _winding(model, region)[0]


def _first_moment(model: SMatrixModel, region: PoleSearchRegion, per_side: int) -> complex:
    # (1 / 2 pi i) closed integral of z d(log D): the sum of zeros inside
    z = region.boundary(per_side)
    values = pole_function(model, z)
    steps = np.log(values[1:] / values[:-1])
    midpoints = 0.5 * (z[1:] + z[:-1])
    return complex(np.sum(midpoints * steps) / (2j * math.pi))


def _newton(model: SMatrixModel, z: complex, tol: float = ROOT_TOL, max_iter: int = NEWTON_MAX_ITER) -> complex | None:
    for i in range(max_iter):
        value = pole_function(model, z)
        if abs(value) < tol:
            log.debug(f"Newton converged after {i} iterations at {z}")
            return z
        h = 1e-7 * max(1.0, abs(z))
        slope = (pole_function(model, z + h) - pole_function(model, z - h)) / (2 * h)
        if slope == 0 or not cmath.isfinite(slope):
            return None
        step = value / slope
        z = z - step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            # stalled at round-off; accept if the residual is at the evaluation floor
            return z if abs(pole_function(model, z)) < 1e3 * tol else None
    return z if abs(pole_function(model, z)) < tol else None


def _split(model: SMatrixModel, region: PoleSearchRegion) -> tuple[PoleSearchRegion, PoleSearchRegion]:
    for fraction in (0.5, 0.4713, 0.5361, 0.4419, 0.5719):
        left, right = region.halves(fraction)
        try:
            _winding(model, left)
            _winding(model, right)
        except InvalidModelError:
            log.warning(f"Split at fraction {fraction} passes through a pole, shifting the cut")
            continue
        return left, right
    raise NonConvergenceError("Could not split the search region away from its poles")


def _search(model: SMatrixModel, region: PoleSearchRegion, depth: int, max_depth: int) -> list[complex]:
    count, per_side = _winding(model, region)
    if count < 0:
        raise InvalidModelError("Pole function has poles inside the search region", count=count)
    if count == 0:
        return []
    if count == 1:
        root = _newton(model, _first_moment(model, region, per_side))
        if root is not None and region.contains(root):
            return [root]
    if depth >= max_depth:
        raise NonConvergenceError("Newton refinement failed at the maximum subdivision depth", depth=depth)
    log.debug(f"Subdividing region {attr.astuple(region)} holding {count} poles (depth {depth})")
    left, right = _split(model, region)
    return _search(model, left, depth + 1, max_depth) + _search(model, right, depth + 1, max_depth)


def _residue(model: SMatrixModel, z: complex, others: list[complex]) -> complex:
    radius = abs(z.imag) / 5  # Gamma / 10
    for w in others:
        radius = min(radius, abs(w - z) / 4)
    radius = min(radius, abs(z) / 4)
    rule = build_quadrature("contour", Contour.circle(z, radius), RESIDUE_NODES)
    return integrate(rule, lambda x: s_matrix(model, x, Sheet.SECOND)) / (2j * math.pi)


def find_poles(
    model: SMatrixModel, region: PoleSearchRegion, max_depth: int = SUBDIVISION_DEPTH
) -> list[ResonancePole]:
    """
    Locate the second-sheet S-matrix poles inside `region`.

    Poles are counted by the argument principle, isolated by subdivision
    and polished by Newton iteration; residues come from a small circle.
    """
    roots = sorted(_search(model, region, 0, max_depth), key=lambda z: (z.real, z.imag))
    log.info(f"Found {len(roots)} poles in {attr.astuple(region)}")
    return [ResonancePole(z, _residue(model, z, [w for w in roots if w != z])) for z in roots]
