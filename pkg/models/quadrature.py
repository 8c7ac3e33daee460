import cmath
import logging
import math
from enum import Enum
from typing import Callable, Iterable, Sequence

import attr
import numpy as np
from numpy.polynomial.legendre import leggauss

from const import QUAD_TOL, get_settings
from models.errors import InvalidModelError, InvariantViolationError, NonConvergenceError

__all__ = (
    "ComplexEnergy",
    "as_energy",
    "QuadratureKind",
    "QuadratureRule",
    "Contour",
    "build_quadrature",
    "integrate",
    "self_convergent",
)

log = logging.getLogger("Quadrature")

ComplexEnergy = complex

# breakpoints beyond centre + TAIL_FACTOR * scale are handled by the mapped tail panel
TAIL_FACTOR = 8.0


def as_energy(value: complex | float, name: str = "z") -> complex:
    z = complex(value)
    if not cmath.isfinite(z):
        raise InvalidModelError(f"{name} must be a finite complex energy", value=z)
    return z


class QuadratureKind(str, Enum):
    FINITE = "finite-interval"
    SEMI_INFINITE = "semi-infinite-mapped"
    CONTOUR = "contour-parameterized"

    @classmethod
    def coerce(cls, kind: "str | QuadratureKind") -> "QuadratureKind":
        aliases = {"finite": cls.FINITE, "semi-infinite": cls.SEMI_INFINITE, "contour": cls.CONTOUR}
        if isinstance(kind, cls):
            return kind
        if kind in aliases:
            return aliases[kind]
        try:
            return cls(kind)
        except ValueError:
            raise InvalidModelError("Unknown quadrature kind", kind=kind) from None


def _check_rule(instance: "QuadratureRule", attribute, value) -> None:
    nodes, weights = instance.nodes, instance.weights
    if nodes.shape != weights.shape or nodes.ndim != 1 or len(nodes) < 2:
        raise InvalidModelError("Quadrature nodes and weights must be equal length >= 2")
    if instance.kind is QuadratureKind.CONTOUR:
        return
    if np.any(np.diff(nodes) <= 0):
        raise InvariantViolationError("Real-axis quadrature nodes must be strictly increasing")
    if np.any(weights <= 0):
        raise InvariantViolationError("Real-axis quadrature weights must be positive")


@attr.s(auto_attribs=True, frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray = attr.ib(converter=np.asarray)
    weights: np.ndarray = attr.ib(converter=np.asarray)
    kind: QuadratureKind = attr.ib(converter=QuadratureKind.coerce, validator=_check_rule)
    order: int = attr.ib(default=0)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def degree(self) -> int | None:
        """Polynomial exactness degree of a single-panel finite rule."""
        if self.kind is QuadratureKind.FINITE:
            return 2 * len(self.nodes) - 1
        return None


@attr.s(auto_attribs=True, frozen=True, eq=False)
class Contour:
    """A path z(s), s in [0, 1], with its derivative dz/ds."""

    point: Callable[[np.ndarray], np.ndarray]
    tangent: Callable[[np.ndarray], np.ndarray]
    periodic: bool = False

    @classmethod
    def circle(cls, center: complex, radius: float) -> "Contour":
        if not radius > 0:
            raise InvalidModelError("Circle radius must be positive", radius=radius)
        return cls(
            point=lambda s: center + radius * np.exp(2j * np.pi * s),
            tangent=lambda s: 2j * np.pi * radius * np.exp(2j * np.pi * s),
            periodic=True,
        )

    @classmethod
    def segment(cls, z0: complex, z1: complex) -> "Contour":
        if z0 == z1:
            raise InvalidModelError("Contour segment has zero length", z0=z0)
        return cls(
            point=lambda s: z0 + (z1 - z0) * s,
            tangent=lambda s: np.full(np.shape(s), z1 - z0, dtype=complex),
        )


def _gauss_panel(a: float, b: float, x: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    half = 0.5 * (b - a)
    return half * x + 0.5 * (b + a), half * w


def _feature_scales(a: float, features: Iterable[complex]) -> list[tuple[float, float]]:
    scales = []
    for q in features:
        q = complex(q)
        if q.real <= a:
            center, width = a, abs(q - a)
        else:
            center, width = q.real, abs(q.imag)
        width = max(width, 1e-12 * max(1.0, abs(center)))
        scales.append((center, width))
    return scales


def _half_line(
    a: float, scales: list[tuple[float, float]], order: int, tail_decay: float = 2.0
) -> tuple[np.ndarray, np.ndarray]:
    tail = max(c + TAIL_FACTOR * max(c - a, w) for c, w in scales)
    cuts = {a, tail}
    for c, w in scales:
        if a < c < tail:
            cuts.add(c)
        j = 0
        while (x := c - w * 2.0**j) > a:
            cuts.add(x)
            j += 1
        j = 0
        while (x := c + w * 2.0**j) < tail:
            if x > a:
                cuts.add(x)
            j += 1
    breaks = sorted(cuts)

    x, w = leggauss(order)
    nodes, weights = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        n, wt = _gauss_panel(lo, hi, x, w)
        nodes.append(n)
        weights.append(wt)

    # E = a + (T - a) (2 / (1 - u))^m maps (-1, 1) onto (T, inf); m = 1 / (p - 1) makes
    # an E^-p tail flat in u
    power = 1.0 / (tail_decay - 1.0)
    offset = (tail - a) * (2.0 / (1 - x)) ** power
    nodes.append(a + offset)
    weights.append(w * power * offset / (1 - x))
    log.debug(f"Built semi-infinite rule: {len(breaks)} panels x {order} nodes, tail at {tail:.6g}")
    return np.concatenate(nodes), np.concatenate(weights)


def build_quadrature(
    kind: str | QuadratureKind,
    domain: Sequence[float] | Contour,
    order: int | None = None,
    *,
    center: float | None = None,
    width: float | None = None,
    features: Iterable[complex] = (),
    tail_decay: float = 2.0,
) -> QuadratureRule:
    """
    Build a quadrature rule.

    `finite` rules are one Gauss-Legendre panel. `semi-infinite` rules grade
    Gauss-Legendre panels geometrically around each feature (a complex
    singularity location: centre Re q, width |Im q|) and finish with a
    rationally mapped tail panel, tuned to integrands falling off like
    E^-tail_decay. Without features the panels are graded around `center`
    (default a + scale) with `width` (default the scale setting), so a
    peaked integrand needs its peak passed as `center` or, better, its
    singularities as `features`. `contour` rules take a `Contour`; periodic
    contours use the trapezoidal rule.
    """
    settings = get_settings()
    order = settings.quad_order if order is None else int(order)
    if order < 2:
        raise InvalidModelError("Quadrature order must be >= 2", order=order)
    kind = QuadratureKind.coerce(kind)
    if not tail_decay > 1:
        raise InvalidModelError("Semi-infinite integrands must decay faster than 1/E", tail_decay=tail_decay)

    if kind is QuadratureKind.CONTOUR:
        if not isinstance(domain, Contour):
            raise InvalidModelError("Contour rules need a Contour domain")
        if domain.periodic:
            s = np.arange(order) / order
            w = np.full(order, 1.0 / order)
        else:
            x, w = leggauss(order)
            s, w = _gauss_panel(0.0, 1.0, x, w)
        return QuadratureRule(domain.point(s).astype(complex), w * domain.tangent(s), kind, order)

    a, b = (float(v) for v in domain)
    if kind is QuadratureKind.FINITE:
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidModelError("Finite rules need finite endpoints", a=a, b=b)
        if b <= a:
            raise InvalidModelError("Quadrature interval is degenerate", a=a, b=b)
        nodes, weights = _gauss_panel(a, b, *leggauss(order))
        return QuadratureRule(nodes, weights, kind, order)

    if b != math.inf or math.isnan(a) or a == math.inf:
        raise InvalidModelError("Semi-infinite rules need a domain (a, inf) or (-inf, inf)", a=a, b=b)
    features = list(features)
    full_line = a == -math.inf
    if full_line:
        c = center if center is not None else (complex(features[0]).real if features else 0.0)
        if not features:
            features = [complex(c, width or settings.quad_scale)]
        right = _feature_scales(c, features)
        left = _feature_scales(c, [complex(2 * c - complex(q).real, complex(q).imag) for q in features])
        rn, rw = _half_line(c, right, order, tail_decay)
        ln, lw = _half_line(c, left, order, tail_decay)
        nodes = np.concatenate([(2 * c - ln)[::-1], rn])
        weights = np.concatenate([lw[::-1], rw])
        return QuadratureRule(nodes, weights, kind, order)

    if not features:
        c = center if center is not None else a + settings.quad_scale
        w = width if width is not None else settings.quad_scale
        features = [complex(c, w)]
    nodes, weights = _half_line(a, _feature_scales(a, features), order, tail_decay)
    return QuadratureRule(nodes, weights, kind, order)


def integrate(rule: QuadratureRule, f: Callable, *, vectorized: bool = False) -> complex:
    """Return sum(w_i f(E_i)); `vectorized` functions receive the whole node array."""
    if vectorized:
        values = np.asarray(f(rule.nodes), dtype=complex)
    else:
        values = np.array([f(x) for x in rule.nodes], dtype=complex)
    if values.shape != rule.nodes.shape:
        raise InvariantViolationError("Integrand returned the wrong shape", shape=values.shape)
    if not np.all(np.isfinite(values)):
        bad = rule.nodes[~np.isfinite(values)][0]
        raise InvariantViolationError("Integrand is not finite at a quadrature node", node=bad)
    return complex(np.sum(rule.weights * values))


def self_convergent(compute: Callable[[int], complex], order: int | None = None, tol: float = QUAD_TOL) -> complex:
    """Evaluate at `order` and `2 * order`; the two must agree within `tol` (relative, floor 1)."""
    order = get_settings().quad_order if order is None else order
    coarse = compute(order)
    fine = compute(2 * order)
    if abs(fine - coarse) > tol * max(1.0, abs(fine)):
        raise NonConvergenceError(
            "Quadrature failed the order-doubling check", order=order, difference=abs(fine - coarse)
        )
    return fine
