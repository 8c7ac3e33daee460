import math

import numpy as np
import pytest

from const import get_settings, process_grid, process_numbers, process_region
from models.errors import ErrorKind, InvalidModelError, InvariantViolationError, NonConvergenceError, ToolkitError
from models.quadrature import (
    Contour,
    QuadratureKind,
    QuadratureRule,
    build_quadrature,
    integrate,
    self_convergent,
)


def test_finite_rule_is_exact_to_its_degree():
    rule = build_quadrature("finite", (0.0, 1.0), 4)
    assert rule.degree == 7
    assert integrate(rule, lambda x: x**7, vectorized=True).real == pytest.approx(1 / 8, rel=1e-14)


def test_finite_rule_rejects_degenerate_interval():
    with pytest.raises(InvalidModelError):
        build_quadrature("finite", (1.0, 1.0), 8)


def test_semi_infinite_exponential():
    rule = build_quadrature("semi-infinite", (0.0, math.inf), 64)
    assert integrate(rule, lambda x: np.exp(-x), vectorized=True).real == pytest.approx(1.0, rel=1e-12)


def test_semi_infinite_resolves_narrow_lorentzian():
    c, b = 50.0, 0.01
    rule = build_quadrature("semi-infinite", (0.0, math.inf), 64, features=[complex(c, b)])
    value = integrate(rule, lambda x: (b / math.pi) / ((x - c) ** 2 + b * b), vectorized=True).real
    assert value == pytest.approx(0.5 + math.atan(c / b) / math.pi, rel=1e-10)


@pytest.mark.parametrize("hint", [{"center": 10.0}, {"features": [complex(10.0, 0.05)]}], ids=["center", "features"])
def test_semi_infinite_breit_wigner_line(hint):
    e_r, gamma = 10.0, 0.1
    rule = build_quadrature("semi-infinite", (0.0, math.inf), 64, **hint)
    value = integrate(rule, lambda e: (gamma / (2 * math.pi)) / ((e - e_r) ** 2 + 0.25 * gamma**2), vectorized=True)
    assert value.real == pytest.approx(0.5 + math.atan(2 * e_r / gamma) / math.pi, abs=1e-8)


def test_full_line_rule():
    rule = build_quadrature("semi-infinite", (-math.inf, math.inf), 64, features=[1j])
    assert np.all(np.diff(rule.nodes) > 0)
    assert integrate(rule, lambda x: 1 / (x * x + 1), vectorized=True).real == pytest.approx(math.pi, rel=1e-10)


def test_power_law_tail():
    rule = build_quadrature("semi-infinite", (1.0, math.inf), 64, tail_decay=1.5)
    assert integrate(rule, lambda x: x**-1.5, vectorized=True).real == pytest.approx(2.0, rel=1e-10)


def test_tail_must_decay():
    with pytest.raises(InvalidModelError):
        build_quadrature("semi-infinite", (0.0, math.inf), 16, tail_decay=1.0)


def test_periodic_contour_uses_trapezoid():
    rule = build_quadrature("contour", Contour.circle(0.5 + 0.5j, 1.0), 16)
    assert rule.kind is QuadratureKind.CONTOUR
    assert integrate(rule, lambda z: 1 / (z - 0.5 - 0.5j), vectorized=True) == pytest.approx(2j * math.pi, abs=1e-13)


def test_open_contour_segment():
    rule = build_quadrature("contour", Contour.segment(0j, 1 + 1j), 8)
    assert integrate(rule, lambda z: z, vectorized=True) == pytest.approx(0.5 * (1 + 1j) ** 2, abs=1e-14)


def test_rule_invariants():
    with pytest.raises(InvariantViolationError):
        QuadratureRule(np.array([1.0, 0.0]), np.array([0.5, 0.5]), "finite")
    with pytest.raises(InvariantViolationError):
        QuadratureRule(np.array([0.0, 1.0]), np.array([0.5, -0.5]), "finite")
    with pytest.raises(InvalidModelError):
        build_quadrature("spline", (0.0, 1.0))


def test_integrate_rejects_non_finite_values():
    rule = build_quadrature("finite", (-1.0, 1.0), 4)
    with pytest.raises(InvariantViolationError):
        integrate(rule, lambda x: math.inf)


def test_self_convergent():
    assert self_convergent(lambda n: 1.0 + 0j, 16) == 1.0
    with pytest.raises(NonConvergenceError) as info:
        self_convergent(lambda n: 1.0 / n, 64)
    assert info.value.kind is ErrorKind.NON_CONVERGENCE


def test_order_from_environment(monkeypatch):
    monkeypatch.setenv("GAMOWKIT_QUAD_ORDER", "16")
    assert get_settings().quad_order == 16
    assert len(build_quadrature("finite", (0.0, 1.0))) == 16
    monkeypatch.setenv("GAMOWKIT_QUAD_ORDER", "many")
    with pytest.raises(InvalidModelError):
        get_settings()


def test_error_rendering():
    error = InvalidModelError("bad pole", pole=1j)
    assert str(error) == "[InvalidModel] bad pole (pole=1j)"
    with pytest.raises(ValueError):
        ToolkitError("")


def test_string_parsers():
    assert process_numbers("1,3,-0.5") == [1.0, 3.0, -0.5]
    assert process_region("1,3,-0.5") == (1.0, 3.0, -0.5, -1e-4)
    assert process_grid("0,1,5") == [0.0, 0.25, 0.5, 0.75, 1.0]
    with pytest.raises(InvalidModelError, match="please follow example"):
        process_numbers("1,,x")
    with pytest.raises(InvalidModelError):
        process_grid("0,1,1")
