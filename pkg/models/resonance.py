import math

import attr

from models.errors import InvalidModelError

__all__ = ("ResonanceParameters",)


def _positive_finite(instance, attribute, value) -> None:
    if not (math.isfinite(value) and value > 0):
        raise InvalidModelError(f"{attribute.name} must be positive and finite", value=value)


@attr.s(auto_attribs=True, frozen=True)
class ResonanceParameters:
    """Resonance energy E_R and width Gamma; the Gamow pole sits at E_R - i Gamma / 2."""

    e_r: float = attr.ib(converter=float, validator=_positive_finite)
    gamma: float = attr.ib(converter=float, validator=_positive_finite)

    @property
    def pole(self) -> complex:
        return complex(self.e_r, -0.5 * self.gamma)

    @property
    def narrowness(self) -> float:
        """E_R / Gamma."""
        return self.e_r / self.gamma

    @classmethod
    def from_pole(cls, z: complex) -> "ResonanceParameters":
        return cls(e_r=z.real, gamma=-2.0 * z.imag)
