"""
Decay probability of a resonance into a continuum of decay products.

With the channel density v(E) = sum_b weight_b |<E,b|V|psi>|^2 and
L(E) = (E - E_R)^2 + (Gamma / 2)^2,

    P(t)  = 1 - e^{-Gamma t} int v / L
    P'(t) = 2 pi e^{-Gamma t} int v (Gamma / 2 pi) / L

A model is consistent (P(0) = 0, P(inf) = 1) exactly when I = int v / L = 1;
`DecayModel.normalized` rescales the coupling to get there.
"""
import logging
import math
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence

import attr
import numpy as np

from const import QUAD_TOL
from models.errors import InvalidModelError, InvariantViolationError, SemigroupDomainError
from models.quadrature import build_quadrature, integrate, self_convergent
from models.resonance import ResonanceParameters

__all__ = (
    "Channel",
    "DecayChannelSet",
    "FormShape",
    "FormFactor",
    "BornState",
    "DecayModel",
    "DecayCurve",
    "BornLimitRow",
    "normalization_integral",
    "decay_probability",
    "decay_rate",
    "fermi_golden_rule",
    "width_consistency",
    "lifetime",
    "decay_curve",
    "born_limit_sequence",
)

log = logging.getLogger("GoldenRule")

NORMALIZED_TOL = 1e-8
# threshold features get a width this small relative to E_R so the panels grade into E^alpha
THRESHOLD_WIDTH = 1e-10


@attr.s(auto_attribs=True, frozen=True)
class Channel:
    label: str = attr.ib(converter=str)
    weight: float = attr.ib(default=1.0, converter=float)

    @weight.validator
    def _check_weight(self, attribute, value: float) -> None:
        if not (math.isfinite(value) and value > 0):
            raise InvalidModelError("Channel weights must be positive", channel=self.label, weight=value)


def _channel_tuple(values: Iterable) -> tuple[Channel, ...]:
    return tuple(v if isinstance(v, Channel) else Channel(*v) for v in values)


@attr.s(auto_attribs=True, frozen=True)
class DecayChannelSet:
    channels: tuple[Channel, ...] = attr.ib(converter=_channel_tuple)
    threshold: float = attr.ib(default=0.0, converter=float)
    full_line: bool = False

    def __attrs_post_init__(self) -> None:
        if not self.channels:
            raise InvalidModelError("A decay needs at least one channel")
        if not math.isfinite(self.threshold):
            raise InvalidModelError("Threshold must be finite", threshold=self.threshold)
        labels = [c.label for c in self.channels]
        if len(set(labels)) != len(labels):
            raise InvalidModelError("Channel labels must be unique")

    @classmethod
    def single(cls, label: str = "b", weight: float = 1.0, **kwargs) -> "DecayChannelSet":
        return cls([Channel(label, weight)], **kwargs)

    def contains(self, energy: float) -> bool:
        return self.full_line or energy > self.threshold

    def echo(self) -> list[dict]:
        return [{"b": c.label, "weight": c.weight} for c in self.channels]


class FormShape(str, Enum):
    CONSTANT = "constant"
    POWER_THRESHOLD = "power-threshold"
    LORENTZ_CUTOFF = "lorentz-cutoff"


def _multiplier_tuple(values) -> tuple[tuple[str, float], ...]:
    items = values.items() if isinstance(values, dict) else values
    return tuple(sorted((str(k), float(v)) for k, v in items))


@attr.s(auto_attribs=True, frozen=True)
class FormFactor:
    """v(E, b) = coupling * multiplier_b * shape(E - threshold)."""

    shape: FormShape = attr.ib(default=FormShape.CONSTANT, converter=FormShape)
    coupling: float = attr.ib(default=1.0, converter=float)
    alpha: float = attr.ib(default=0.5, converter=float)
    cutoff: float = attr.ib(default=1.0, converter=float)
    multipliers: tuple[tuple[str, float], ...] = attr.ib(default=(), converter=_multiplier_tuple)

    def __attrs_post_init__(self) -> None:
        if not (math.isfinite(self.coupling) and self.coupling >= 0):
            raise InvalidModelError("Coupling must be non-negative", coupling=self.coupling)
        if self.shape is FormShape.POWER_THRESHOLD and not 0 < self.alpha < 1:
            raise InvalidModelError("power-threshold needs 0 < alpha < 1 to stay integrable", alpha=self.alpha)
        if self.shape is FormShape.LORENTZ_CUTOFF and not (math.isfinite(self.cutoff) and self.cutoff > 0):
            raise InvalidModelError("lorentz-cutoff needs a positive cutoff", cutoff=self.cutoff)
        if any(not (math.isfinite(m) and m >= 0) for _, m in self.multipliers):
            raise InvalidModelError("Channel multipliers must be non-negative")

    def multiplier(self, label: str) -> float:
        return dict(self.multipliers).get(label, 1.0)

    def profile(self, energy, threshold: float = 0.0):
        """Energy dependence of v without coupling or channel factors."""
        e = np.asarray(energy, dtype=float)
        if self.shape is FormShape.CONSTANT:
            value = np.ones_like(e)
        elif self.shape is FormShape.POWER_THRESHOLD:
            value = np.power(np.clip(e - threshold, 0.0, None), self.alpha)
        else:
            x = e - threshold
            value = self.cutoff**2 / (x * x + self.cutoff**2)
        return value if value.ndim else float(value)

    def value(self, energy, label: str, threshold: float = 0.0):
        return self.coupling * self.multiplier(label) * self.profile(energy, threshold)

    def tail_decay(self) -> float:
        """Power p with v / L ~ E^-p at large E."""
        if self.shape is FormShape.POWER_THRESHOLD:
            return 2.0 - self.alpha
        if self.shape is FormShape.LORENTZ_CUTOFF:
            return 4.0
        return 2.0

    def features(self, threshold: float) -> list[complex]:
        if self.shape is FormShape.POWER_THRESHOLD:
            return [complex(threshold, THRESHOLD_WIDTH * max(1.0, abs(threshold)))]
        if self.shape is FormShape.LORENTZ_CUTOFF:
            return [complex(threshold, self.cutoff)]
        return []

    def echo(self) -> dict:
        data = {"shape": self.shape.value, "coupling": self.coupling}
        if self.shape is FormShape.POWER_THRESHOLD:
            data["alpha"] = self.alpha
        if self.shape is FormShape.LORENTZ_CUTOFF:
            data["cutoff"] = self.cutoff
        if self.multipliers:
            data["multipliers"] = dict(self.multipliers)
        return data


def _channel_measure(channels: DecayChannelSet, form: FormFactor) -> float:
    return sum(c.weight * form.multiplier(c.label) for c in channels.channels)


def _line_integral(
    params: ResonanceParameters, channels: DecayChannelSet, form: FormFactor, order: int | None = None
) -> float:
    measure = form.coupling * _channel_measure(channels, form)
    if measure == 0:
        return 0.0
    half = 0.5 * params.gamma
    if channels.full_line:
        if form.shape is not FormShape.CONSTANT:
            raise InvalidModelError("Only the constant form factor is defined on the full line", shape=form.shape.value)
        return measure * math.pi / half

    features = [params.pole, *form.features(channels.threshold)]

    def compute(n: int) -> complex:
        rule = build_quadrature(
            "semi-infinite", (channels.threshold, math.inf), n, features=features, tail_decay=form.tail_decay()
        )
        return integrate(
            rule,
            lambda e: form.profile(e, channels.threshold) / ((e - params.e_r) ** 2 + half**2),
            vectorized=True,
        )

    # the integral is of order 1 / Gamma, so compare relative to its size
    scale = 2 * math.pi / params.gamma
    value = self_convergent(lambda n: compute(n) / scale, order, QUAD_TOL).real * scale
    return measure * value


def normalization_integral(
    params: ResonanceParameters, channels: DecayChannelSet, form: FormFactor, *, order: int | None = None
) -> float:
    """I = int dE sum_b v(E, b) / ((E - E_R)^2 + (Gamma / 2)^2) over the channel support."""
    value = _line_integral(params, channels, form, order)
    if value == 0:
        raise InvariantViolationError("Normalization integral vanishes; the state has no coupling to decay")
    return value


@attr.s(auto_attribs=True, frozen=True)
class DecayModel:
    resonance: ResonanceParameters
    channels: DecayChannelSet
    form: FormFactor = attr.ib(factory=FormFactor)

    def __attrs_post_init__(self) -> None:
        if not self.channels.contains(self.resonance.e_r):
            raise InvalidModelError(
                "Resonance energy must lie above the channel threshold",
                e_r=self.resonance.e_r,
                threshold=self.channels.threshold,
            )

    @cached_property
    def integral(self) -> float:
        return normalization_integral(self.resonance, self.channels, self.form)

    @property
    def is_normalized(self) -> bool:
        return abs(self.integral - 1) <= NORMALIZED_TOL

    def normalized(self) -> "DecayModel":
        """Copy with the coupling rescaled so that I = 1."""
        form = attr.evolve(self.form, coupling=self.form.coupling / self.integral)
        model = attr.evolve(self, form=form)
        log.debug(f"Normalized coupling {self.form.coupling!r} -> {form.coupling!r}")
        return model

    def echo(self) -> dict:
        return {
            "resonance": {"er": self.resonance.e_r, "gamma": self.resonance.gamma},
            "channels": self.channels.echo(),
            "threshold": self.channels.threshold,
            "full_line": self.channels.full_line,
            "form_factor": self.form.echo(),
        }


def _check_time(t: float) -> float:
    t = float(t)
    if math.isnan(t) or math.isinf(t):
        raise InvalidModelError("Time must be finite", t=t)
    if t < 0:
        raise SemigroupDomainError("Decay is defined for t >= 0 only", t=t)
    return t


def _require_normalized(model: DecayModel) -> None:
    if not model.is_normalized:
        raise InvariantViolationError("Decay model is not normalized; call normalized() first", integral=model.integral)


def decay_probability(model: DecayModel, t: float) -> float:
    t = _check_time(t)
    _require_normalized(model)
    return 1.0 - math.exp(-model.resonance.gamma * t) * model.integral


def decay_rate(model: DecayModel, t: float) -> float:
    """dP/dt from the line integral of v against the Breit-Wigner nascent delta."""
    t = _check_time(t)
    _require_normalized(model)
    gamma = model.resonance.gamma
    return 2 * math.pi * math.exp(-gamma * t) * (gamma / (2 * math.pi)) * model.integral


def width_consistency(model: DecayModel) -> float:
    """2 pi int v delta_Gamma(E - E_R); equals Gamma for a normalized model."""
    gamma = model.resonance.gamma
    return 2 * math.pi * (gamma / (2 * math.pi)) * _line_integral(model.resonance, model.channels, model.form)


def lifetime(params: ResonanceParameters) -> float:
    return 1.0 / params.gamma


@attr.s(auto_attribs=True, frozen=True)
class BornState:
    """
    Non-interacting state f^d with H0 f^d = E_d f^d.

    `e_r` is where the golden rule's delta is pinned; it defaults to E_d.
    """

    e_d: float = attr.ib(converter=float)
    form: FormFactor
    e_r: float | None = None

    @e_d.validator
    def _check_energy(self, attribute, value: float) -> None:
        if not (math.isfinite(value) and value > 0):
            raise InvalidModelError("E_d must be positive", e_d=value)

    @property
    def evaluation_energy(self) -> float:
        return self.e_d if self.e_r is None else self.e_r

    @classmethod
    def from_model(cls, model: DecayModel) -> "BornState":
        return cls(model.resonance.e_r, model.form, model.resonance.e_r)


def fermi_golden_rule(state: BornState, channels: DecayChannelSet) -> float:
    """2 pi sum_b weight_b v(E_R, b)."""
    energy = state.evaluation_energy
    if not channels.contains(state.e_d) or not channels.contains(energy):
        raise InvalidModelError("Born state must lie above the channel threshold", e_d=state.e_d)
    return 2 * math.pi * sum(
        c.weight * state.form.value(energy, c.label, channels.threshold) for c in channels.channels
    )


@attr.s(auto_attribs=True, frozen=True, eq=False)
class DecayCurve:
    times: np.ndarray = attr.ib(converter=lambda v: np.asarray(v, dtype=float))
    p_values: np.ndarray = attr.ib(converter=lambda v: np.asarray(v, dtype=float))
    rate_values: np.ndarray = attr.ib(converter=lambda v: np.asarray(v, dtype=float))

    def __attrs_post_init__(self) -> None:
        if not (self.times.shape == self.p_values.shape == self.rate_values.shape):
            raise InvariantViolationError("Decay curve columns differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise InvalidModelError("Decay curve times must be increasing")
        if np.any(np.diff(self.p_values) < -1e-12):
            raise InvariantViolationError("Decay probability decreased")
        if np.any(self.rate_values < 0):
            raise InvariantViolationError("Decay rate is negative")
        if len(self.times) and self.times[0] == 0 and abs(self.p_values[0]) > 1e-9:
            raise InvariantViolationError("Decay probability at t = 0 is not 0", value=float(self.p_values[0]))

    @property
    def survival(self) -> np.ndarray:
        return 1.0 - self.p_values


def decay_curve(model: DecayModel, times: Sequence[float]) -> DecayCurve:
    return DecayCurve(
        times, [decay_probability(model, t) for t in times], [decay_rate(model, t) for t in times]
    )


@attr.s(auto_attribs=True, frozen=True)
class BornLimitRow:
    ratio: float
    gamma: float
    exact_rate: float
    fermi_rate: float

    @property
    def relative_error(self) -> float:
        return abs(self.exact_rate - self.fermi_rate) / self.fermi_rate


def born_limit_row(e_r: float, ratio: float, channels: DecayChannelSet, form: FormFactor) -> BornLimitRow:
    """Exact initial rate against the golden rule at Gamma = ratio * E_R."""
    params = ResonanceParameters(e_r=e_r, gamma=ratio * e_r)
    model = DecayModel(params, channels, form).normalized()
    exact = decay_rate(model, 0.0)
    fermi = fermi_golden_rule(BornState.from_model(model), channels)
    return BornLimitRow(ratio, params.gamma, exact, fermi)


def born_limit_sequence(
    e_r: float, ratios: Sequence[float], channels: DecayChannelSet, form: FormFactor
) -> list[BornLimitRow]:
    return [born_limit_row(e_r, ratio, channels, form) for ratio in ratios]
