"""
Survival amplitudes of prepared states and the Gamow semigroup.

A(t) = int |phi(E)|^2 e^{-iEt} dE / N over the chosen support, N the
support norm. With |phi|^2 = sum c_k / (E - q_k), for t > 0 the full-line
integral closes in the lower half plane. On [0, inf) the path is swung onto
the negative imaginary axis instead, which leaves the fourth-quadrant poles
plus the cut integral -i int_0^inf |phi|^2(-iy) e^{-yt} dy; the latter is
smooth and exponentially damped, so one quadrature covers all times.
"""
import cmath
import logging
import math
from enum import Enum
from typing import Sequence

import attr
import numpy as np

from const import QUAD_TOL
from models.errors import InvalidModelError, InvariantViolationError, NonConvergenceError, SemigroupDomainError
from models.quadrature import build_quadrature, integrate, self_convergent
from models.spectral import EnergyWavefunction, ResonanceParameters, Support, check_support

__all__ = (
    "CurveKind",
    "SurvivalCurve",
    "GamowStateWeight",
    "KhalfinRow",
    "survival_amplitude",
    "survival_probability",
    "long_time_amplitude",
    "survival_curve",
    "gamow_evolve",
    "gamow_curve",
    "khalfin_comparison",
)

log = logging.getLogger("Evolution")

PROBABILITY_SLACK = 1e-9
MIN_NARROWNESS = 2.0


class CurveKind(str, Enum):
    UNITARY_SEMIBOUNDED = "unitary-semibounded"
    UNITARY_FULL_LINE = "unitary-full-line"
    GAMOW_EXPONENTIAL = "gamow-exponential"


def _float_array(values) -> np.ndarray:
    return np.asarray(values, dtype=float)


@attr.s(auto_attribs=True, frozen=True, eq=False)
class SurvivalCurve:
    times: np.ndarray = attr.ib(converter=_float_array)
    values: np.ndarray = attr.ib(converter=_float_array)
    kind: CurveKind = attr.ib(converter=CurveKind)
    amplitudes: np.ndarray | None = None

    def __attrs_post_init__(self) -> None:
        if self.times.shape != self.values.shape:
            raise InvariantViolationError("Survival curve times and values differ in length")
        if len(self.times) == 0:
            return
        if np.any(self.times < 0) or np.any(np.diff(self.times) <= 0):
            raise InvalidModelError("Survival curve times must be non-negative and increasing")
        if np.any(self.values < 0) or np.any(self.values > 1 + PROBABILITY_SLACK):
            raise InvariantViolationError("Survival probability left [0, 1]", worst=float(np.max(self.values)))
        if self.times[0] == 0 and abs(self.values[0] - 1) > PROBABILITY_SLACK:
            raise InvariantViolationError("Survival probability at t = 0 is not 1", value=float(self.values[0]))


@attr.s(auto_attribs=True, frozen=True)
class GamowStateWeight:
    """Coefficient of the pure Gamow state in W(t)."""

    params: ResonanceParameters
    weight: float = attr.ib(default=1.0, converter=float)

    @weight.validator
    def _check_weight(self, attribute, value: float) -> None:
        if not 0 <= value <= 1:
            raise InvalidModelError("Gamow weight must lie in [0, 1]", weight=value)


@attr.s(auto_attribs=True, frozen=True)
class KhalfinRow:
    t: float
    p_semibounded: float
    exponential: float
    ratio: float


def _pole_terms(terms: list[tuple[complex, complex]], t: float, support: Support) -> complex:
    if support is Support.FULL_LINE:
        inside = [(q, c) for q, c in terms if q.imag < 0]
    else:
        for q, _ in terms:
            if q.real == 0 and q.imag < 0:
                raise InvalidModelError("A density pole lies on the rotated contour", pole=q)
        inside = [(q, c) for q, c in terms if q.imag < 0 and q.real > 0]
    return -2j * math.pi * sum((c * cmath.exp(-1j * q * t) for q, c in inside), 0j)


def _norm(phi: EnergyWavefunction, support: Support) -> float:
    if phi.is_zero:
        raise InvalidModelError("The zero vector has no survival amplitude")
    norm = phi.support_norm(support)
    if not norm > 0:
        raise InvalidModelError("Wavefunction has no weight on the support", norm=norm)
    return norm


def survival_amplitude(
    phi: EnergyWavefunction,
    t: float,
    support: str | Support = Support.SEMIBOUNDED,
    *,
    order: int | None = None,
    tol: float = QUAD_TOL,
) -> complex:
    """<phi|e^{-iHt}|phi> / <phi|phi>, with A(0) = 1 and A(-t) = conj A(t)."""
    support = check_support(support)
    t = float(t)
    if not math.isfinite(t):
        raise InvalidModelError("Time must be finite", t=t)
    norm = _norm(phi, support)
    if t == 0:
        return 1 + 0j
    if t < 0:
        return survival_amplitude(phi, -t, support, order=order, tol=tol).conjugate()

    terms = phi.density_poles()
    value = _pole_terms(terms, t, support)
    if support is Support.SEMIBOUNDED:
        features = [complex(0.0, 1.0 / t)] + [1j * q for q, _ in terms]

        def cut(n: int) -> complex:
            rule = build_quadrature("semi-infinite", (0.0, math.inf), n, features=features)
            return integrate(rule, lambda y: phi.density(-1j * y) * np.exp(-y * t), vectorized=True)

        value += -1j * self_convergent(cut, order, tol)
    return value / norm


def survival_probability(
    phi: EnergyWavefunction, t: float, support: str | Support = Support.SEMIBOUNDED, **kwargs
) -> float:
    return abs(survival_amplitude(phi, t, support, **kwargs)) ** 2


def long_time_amplitude(phi: EnergyWavefunction, t: float) -> complex:
    """Semibounded amplitude from the pole terms and the leading endpoint term -i |phi(0)|^2 / t."""
    if not t > 0:
        raise InvalidModelError("The long-time form needs t > 0", t=t)
    norm = _norm(phi, Support.SEMIBOUNDED)
    value = _pole_terms(phi.density_poles(), t, Support.SEMIBOUNDED) - 1j * phi.density(0.0).real / t
    return value / norm


def survival_curve(
    phi: EnergyWavefunction, times: Sequence[float], support: str | Support = Support.SEMIBOUNDED, **kwargs
) -> SurvivalCurve:
    support = check_support(support)
    amplitudes = np.array([survival_amplitude(phi, t, support, **kwargs) for t in times], dtype=complex)
    kind = CurveKind.UNITARY_SEMIBOUNDED if support is Support.SEMIBOUNDED else CurveKind.UNITARY_FULL_LINE
    return SurvivalCurve(times, np.abs(amplitudes) ** 2, kind, amplitudes)


def gamow_evolve(w: GamowStateWeight, t: float) -> GamowStateWeight:
    """W(t) = e^{-Gamma t} W(0), defined for t >= 0 only."""
    t = float(t)
    if math.isnan(t) or math.isinf(t):
        raise InvalidModelError("Time must be finite", t=t)
    if t < 0:
        raise SemigroupDomainError("Gamow states evolve forward only; t must be >= 0", t=t)
    return attr.evolve(w, weight=w.weight * math.exp(-w.params.gamma * t))


def gamow_curve(params: ResonanceParameters, times: Sequence[float]) -> SurvivalCurve:
    start = GamowStateWeight(params)
    values = [gamow_evolve(start, t).weight for t in times]
    return SurvivalCurve(times, values, CurveKind.GAMOW_EXPONENTIAL)


def khalfin_comparison(
    params: ResonanceParameters, times: Sequence[float], *, order: int | None = None, tol: float = QUAD_TOL
) -> tuple[KhalfinRow, ...]:
    """Truncated Breit-Wigner survival on [0, inf) against the exponential law."""
    if params.narrowness < MIN_NARROWNESS:
        raise InvalidModelError("Resonance is too broad to compare with exponential decay", ratio=params.narrowness)
    times = [float(t) for t in times]
    if any(t < 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
        raise InvalidModelError("Times must be non-negative and increasing")

    phi = EnergyWavefunction.breit_wigner(params, Support.SEMIBOUNDED)
    rows = []
    for t in times:
        exponential = math.exp(-params.gamma * t)
        if exponential == 0:
            raise NonConvergenceError("Exponential law underflows at this time", t=t)
        p = survival_probability(phi, t, Support.SEMIBOUNDED, order=order, tol=tol)
        rows.append(KhalfinRow(t, p, exponential, p / exponential))
    log.info(f"Khalfin comparison over {len(rows)} times, final ratio {rows[-1].ratio if rows else None}")
    return tuple(rows)
