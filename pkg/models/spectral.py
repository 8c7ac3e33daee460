"""
Breit-Wigner lineshapes, prepared-state energy wavefunctions and the two
realizations of a state expansion: the Dirac (real-energy) one and the
complex one with resonance pole terms plus a background integral along
the negative energy axis of the second sheet.
"""
import cmath
import logging
import math
from enum import Enum
from typing import Iterable, Sequence

import attr
import numpy as np

from const import DELTA_WIDTH, PROBE_OFFSET, QUAD_TOL
from models.errors import InvalidModelError
from models.quadrature import Contour, as_energy, build_quadrature, integrate, self_convergent
from models.resonance import ResonanceParameters
from models.scattering import SMatrixModel

__all__ = (
    "ResonanceParameters",
    "Support",
    "Kernel",
    "EnergyWavefunction",
    "ExpansionResult",
    "bw_amplitude",
    "bw_density",
    "probe_kernel",
    "delta_kernel",
    "dirac_reconstruct",
    "complex_basis_reconstruct",
    "closed_form_pairing",
)

log = logging.getLogger("Spectral")

RESIDUE_NODES = 128


class Support(str, Enum):
    SEMIBOUNDED = "semibounded"
    FULL_LINE = "full-line"


class Kernel(str, Enum):
    """Basis kernel paired with the in-state weight at each grid point."""

    PROBE = "probe"
    DELTA = "delta"


def check_kernel(kernel: "str | Kernel") -> Kernel:
    try:
        return Kernel(kernel)
    except ValueError:
        raise InvalidModelError("Kernel must be `probe` or `delta`", kernel=kernel) from None


def check_support(support: "str | Support") -> Support:
    try:
        return Support(support)
    except ValueError:
        raise InvalidModelError("Support must be `semibounded` or `full-line`", support=support) from None


def bw_amplitude(energy: complex, params: ResonanceParameters) -> complex:
    """i sqrt(Gamma / 2 pi) / (E - (E_R - i Gamma / 2))."""
    energy = as_energy(energy, "E")
    if energy == params.pole:
        raise InvalidModelError("Breit-Wigner amplitude evaluated at its pole", E=energy)
    return 1j * math.sqrt(params.gamma / (2 * math.pi)) / (energy - params.pole)


def bw_density(energy, params: ResonanceParameters):
    """(Gamma / 2 pi) / ((E - E_R)^2 + (Gamma / 2)^2); accepts arrays."""
    x = np.asarray(energy, dtype=float) - params.e_r
    value = (params.gamma / (2 * math.pi)) / (x * x + 0.25 * params.gamma**2)
    return value if np.ndim(value) else float(value)


def _complex_tuple(values: Iterable) -> tuple[complex, ...]:
    return tuple(complex(v) for v in values)


@attr.s(auto_attribs=True, frozen=True)
class EnergyWavefunction:
    """
    A prepared state phi(E) = normalization * sum_j r_j / (E - p_j).

    Poles are non-real, distinct, and never the conjugate of another pole,
    so |phi(E)|^2 = phi(E) conj_phi(E) continues to a rational function
    with simple poles only.
    """

    poles: tuple[complex, ...] = attr.ib(converter=_complex_tuple)
    residues: tuple[complex, ...] = attr.ib(converter=_complex_tuple)
    normalization: float = attr.ib(default=1.0, converter=float)
    description: str = ""

    def __attrs_post_init__(self) -> None:
        if len(self.poles) != len(self.residues):
            raise InvalidModelError("Wavefunction needs one residue per pole")
        if not (math.isfinite(self.normalization) and self.normalization > 0):
            raise InvalidModelError("Normalization must be positive", normalization=self.normalization)
        for p, r in zip(self.poles, self.residues):
            if not (cmath.isfinite(p) and cmath.isfinite(r)):
                raise InvalidModelError("Wavefunction poles and residues must be finite", pole=p)
            if p.imag == 0:
                raise InvalidModelError("Wavefunction poles must lie off the real axis", pole=p)
        if len(set(self.poles)) != len(self.poles):
            raise InvalidModelError("Wavefunction poles must be distinct")
        if any(p.conjugate() == q for p in self.poles for q in self.poles):
            raise InvalidModelError("A wavefunction pole coincides with the conjugate of another")

    @classmethod
    def normalized(
        cls,
        poles: Sequence[complex],
        residues: Sequence[complex],
        description: str = "",
        support: str = Support.SEMIBOUNDED,
    ) -> "EnergyWavefunction":
        raw = cls(poles, residues, 1.0, description)
        norm = raw.support_norm(support)
        if not norm > 0:
            raise InvalidModelError("Wavefunction cannot be normalized", norm=norm)
        return cls(poles, residues, 1.0 / math.sqrt(norm), description)

    @classmethod
    def breit_wigner(cls, params: ResonanceParameters, support: str = Support.SEMIBOUNDED) -> "EnergyWavefunction":
        """The Breit-Wigner amplitude, renormalized on the chosen support."""
        residue = 1j * math.sqrt(params.gamma / (2 * math.pi))
        description = f"breit-wigner e_r={params.e_r!r} gamma={params.gamma!r} ({check_support(support).value})"
        return cls.normalized([params.pole], [residue], description, support)

    @classmethod
    def zero(cls) -> "EnergyWavefunction":
        return cls((), (), 1.0, "zero")

    @property
    def is_zero(self) -> bool:
        return all(r == 0 for r in self.residues)

    def scaled(self, factor: complex) -> "EnergyWavefunction":
        factor = complex(factor)
        return EnergyWavefunction(
            self.poles, [factor * r for r in self.residues], self.normalization, f"{factor!r} * {self.description}"
        )

    def __call__(self, energy):
        z = np.asarray(energy, dtype=complex)
        value = np.zeros_like(z)
        for p, r in zip(self.poles, self.residues):
            value = value + r / (z - p)
        value = self.normalization * value
        return value if value.ndim else complex(value)

    def conjugate_function(self, energy):
        """Analytic continuation of conj(phi(E)) off the real axis."""
        z = np.asarray(energy, dtype=complex)
        value = np.zeros_like(z)
        for p, r in zip(self.poles, self.residues):
            value = value + r.conjugate() / (z - p.conjugate())
        value = self.normalization * value
        return value if value.ndim else complex(value)

    def density(self, energy):
        """|phi(E)|^2 on the real axis, continued analytically elsewhere."""
        value = np.asarray(self(energy)) * np.asarray(self.conjugate_function(energy))
        return value if np.ndim(value) else complex(value)

    def density_poles(self) -> list[tuple[complex, complex]]:
        """Partial fractions (q_k, c_k) with density = sum c_k / (z - q_k)."""
        n = self.normalization
        terms = []
        for p, r in zip(self.poles, self.residues):
            terms.append((p, n * r * self.conjugate_function(p)))
            terms.append((p.conjugate(), n * r.conjugate() * self(p.conjugate())))
        return terms

    def support_norm(self, support: str = Support.SEMIBOUNDED) -> float:
        """Closed-form integral of |phi|^2 over [0, inf) or the full line."""
        support = check_support(support)
        terms = self.density_poles()
        if support == Support.FULL_LINE:
            value = 2j * math.pi * sum(c for q, c in terms if q.imag > 0)
        else:
            value = -sum(c * cmath.log(-q) for q, c in terms)
        return float(complex(value).real)

    def echo(self) -> dict:
        return {
            "poles": [{"re": p.real, "im": p.imag} for p in self.poles],
            "residues": [{"re": r.real, "im": r.imag} for r in self.residues],
            "normalization": self.normalization,
            "description": self.description,
        }


@attr.s(auto_attribs=True, frozen=True, eq=False)
class ExpansionResult:
    """
    Complex-basis expansion sampled on a real grid.

    `background` and `reconstruction` are the values of the kernel pairing at
    each grid point; `pole_coefficients[i]` pairs with the i-th model pole.
    With the delta kernel the reconstruction also carries w(x - i width),
    picked up from the kernel's own lower pole.
    """

    grid: np.ndarray = attr.ib(converter=lambda v: np.asarray(v, dtype=float))
    poles: tuple[complex, ...] = attr.ib(converter=_complex_tuple)
    pole_coefficients: tuple[complex, ...] = attr.ib(converter=_complex_tuple)
    background: np.ndarray = attr.ib(converter=lambda v: np.asarray(v, dtype=complex))
    reconstruction: np.ndarray = attr.ib(converter=lambda v: np.asarray(v, dtype=complex))
    bound_states: tuple = ()

    def __attrs_post_init__(self) -> None:
        if len(self.pole_coefficients) != len(self.poles):
            raise InvalidModelError("One pole coefficient is needed per resonance")


def probe_kernel(x: float, energy, offset: float = PROBE_OFFSET):
    """kappa_x(E) = 1 / (2 pi i (E - x - i eta)); its only pole is in the upper half plane."""
    return 1 / (2j * math.pi * (np.asarray(energy, dtype=complex) - complex(x, offset)))


def delta_kernel(x: float, energy, width: float = DELTA_WIDTH):
    """
    Lorentzian nascent delta (width / pi) / ((E - x)^2 + width^2), continued off the axis.

    Paired with the in-state weight w over [0, inf) it returns w(x) up to
    O(width), so the Dirac reconstruction at x reads off <+x|phi+>.
    """
    d = np.asarray(energy, dtype=complex) - x
    return (width / math.pi) / (d * d + width * width)


def _kernel(kernel: "str | Kernel", offset: float | None):
    kernel = check_kernel(kernel)
    if offset is not None and not offset > 0:
        raise InvalidModelError("Kernel offset must be positive", offset=offset)
    if kernel is Kernel.DELTA:
        width = DELTA_WIDTH if offset is None else offset
        return kernel, lambda x, e: delta_kernel(x, e, width), width
    offset = PROBE_OFFSET if offset is None else offset
    return kernel, lambda x, e: probe_kernel(x, e, offset), offset


def _in_state_weight(phi: EnergyWavefunction, model: SMatrixModel):
    if not model.is_rational:
        raise InvalidModelError("Expansions need a rational S-matrix model", kind=model.kind.value)

    def weight(z):
        return model.rational_function(z) * phi(z)

    return weight


def _singularities(phi: EnergyWavefunction, model: SMatrixModel, x: float, offset: float) -> list[complex]:
    return [complex(x, offset), *model.poles, *phi.poles]


def dirac_reconstruct(
    phi: EnergyWavefunction,
    model: SMatrixModel,
    grid: Sequence[float],
    *,
    order: int | None = None,
    offset: float | None = None,
    tol: float = QUAD_TOL,
    kernel: "str | Kernel" = Kernel.PROBE,
) -> np.ndarray:
    """
    Pair the in-state weight with the kernel at each grid point through the
    real-energy continuum. `offset` is the probe offset or the delta width.
    """
    weight = _in_state_weight(phi, model)
    kernel, kappa, offset = _kernel(kernel, offset)
    values = []
    for x in grid:
        features = _singularities(phi, model, x, offset)

        def compute(n: int, x=x, features=features) -> complex:
            rule = build_quadrature("semi-infinite", (0.0, math.inf), n, features=features)
            return integrate(rule, lambda e: kappa(x, e) * weight(e), vectorized=True)

        values.append(self_convergent(compute, order, tol))
    log.debug(f"Dirac reconstruction with the {kernel.value} kernel on {len(values)} points")
    return np.array(values, dtype=complex)


def _pole_coefficient(weight, z: complex, radius: float) -> complex:
    # closed integral of w around z, i.e. 2 pi i Res w
    rule = build_quadrature("contour", Contour.circle(z, radius), RESIDUE_NODES)
    return integrate(rule, weight, vectorized=True)


def _residue_radius(z: complex, others: Iterable[complex]) -> float:
    radius = abs(z.imag) / 5
    for w in others:
        if w != z:
            radius = min(radius, abs(w - z) / 4)
    return radius


def complex_basis_reconstruct(
    phi: EnergyWavefunction,
    model: SMatrixModel,
    grid: Sequence[float],
    *,
    order: int | None = None,
    offset: float | None = None,
    tol: float = QUAD_TOL,
    residue_radius: float | None = None,
    kernel: "str | Kernel" = Kernel.PROBE,
) -> ExpansionResult:
    """
    Expand the kernel pairing as resonance terms plus a background.

    The real-axis integral is swung clockwise through the lower half plane
    onto the negative axis; every model pole crossed on the way contributes
    -c_i kappa_x(z_i) with c_i the closed integral of the in-state weight
    around z_i. The delta kernel has a pole of its own at x - i width, which
    the swing crosses as well.
    """
    weight = _in_state_weight(phi, model)
    if any(p.imag < 0 for p in phi.poles):
        raise InvalidModelError("Wavefunction poles below the real axis block the contour deformation")
    kernel, kappa, offset = _kernel(kernel, offset)

    singular = [*model.poles, *phi.poles]
    coefficients = []
    for z in model.poles:
        radius = residue_radius if residue_radius is not None else _residue_radius(z, singular)
        coefficients.append(_pole_coefficient(weight, z, radius))
    log.debug(f"Pole coefficients: {coefficients}")

    background, reconstruction = [], []
    for x in grid:
        features = [-s for s in _singularities(phi, model, x, offset)]

        def compute(n: int, x=x, features=features) -> complex:
            rule = build_quadrature("semi-infinite", (0.0, math.inf), n, features=features)
            return -integrate(rule, lambda y: kappa(x, -y) * weight(-y), vectorized=True)

        tail = self_convergent(compute, order, tol)
        poles = sum((-c * complex(kappa(x, z)) for c, z in zip(coefficients, model.poles)), 0j)
        if kernel is Kernel.DELTA:
            poles += complex(weight(complex(x, -offset)))
        background.append(tail)
        reconstruction.append(poles + tail)

    return ExpansionResult(grid, model.poles, coefficients, background, reconstruction)


def closed_form_pairing(phi: EnergyWavefunction, model: SMatrixModel, x: float, offset: float = PROBE_OFFSET) -> complex:
    """Exact value of the probe pairing from the partial fractions of kappa_x S phi."""
    if not model.is_rational:
        raise InvalidModelError("Closed-form pairing needs a rational S-matrix model")
    s = complex(x, offset)
    if s in phi.poles:
        raise InvalidModelError("Probe point coincides with a wavefunction pole", x=x)
    terms = [(s, complex(model.rational_function(s)) * phi(s) / (2j * math.pi))]
    for i, z in enumerate(model.poles):
        terms.append((z, complex(probe_kernel(x, z, offset)) * phi(z) * model.rational_residue(i)))
    for p, r in zip(phi.poles, phi.residues):
        terms.append((p, complex(probe_kernel(x, p, offset)) * complex(model.rational_function(p)) * phi.normalization * r))
    return -sum(c * cmath.log(-q) for q, c in terms)
