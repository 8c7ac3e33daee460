import cmath
import math

import numpy as np
import pytest

from model_cache import ModelCache
from models.errors import InvalidModelError
from models.scattering import (
    PoleSearchRegion,
    Sheet,
    SMatrixModel,
    find_poles,
    jost,
    partial_cross_section,
    phase_shift,
    pole_function,
    resonance_fwhm,
    s_matrix,
    scattering_state,
    winding_number,
)


def delta_shell_oracle(g: float, a: float, n: int = 1) -> complex:
    """Fixed point of 2ika = log(1 - 2ik/g) + 2 pi i n, the zero of f(k) below the real k axis."""
    k = complex(n * math.pi / a)
    for _ in range(200):
        k = (n * math.pi - 0.5j * cmath.log(1 - 2j * k / g)) / a
    return k * k


def test_rational_second_sheet_value(rational):
    assert s_matrix(rational, complex(3.0, -0.05), Sheet.SECOND) == pytest.approx(1 - 0.1j, abs=1e-14)


def test_rational_sheets_are_reciprocal_off_axis(rational):
    z = complex(2.5, 0.3)
    assert s_matrix(rational, z, "first") * s_matrix(rational, z, "second") == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("model_name", ["rational", "delta_shell"])
def test_unitary_on_real_axis(model_name, request):
    model = request.getfixturevalue(model_name)
    for energy in (0.3, 1.0, 2.0, 8.9, 15.0):
        assert abs(s_matrix(model, energy)) == pytest.approx(1.0, abs=1e-12)


def test_pole_raises(rational):
    with pytest.raises(InvalidModelError):
        s_matrix(rational, complex(2.0, -0.05), Sheet.SECOND)


def test_phase_shift_sweeps_through_resonance(rational):
    energies = np.linspace(1.0, 3.0, 201)
    delta = phase_shift(rational, energies)
    assert delta[-1] - delta[0] == pytest.approx(math.pi - 2 * math.atan(0.05), abs=1e-12)
    assert np.all(np.diff(delta) > 0)
    with pytest.raises(InvalidModelError):
        phase_shift(rational, [0.0, 1.0])


@pytest.mark.parametrize("energy", [1.8, 1.95, 2.0, 2.1])
def test_single_pole_lineshape(rational, energy):
    sin2 = math.sin(phase_shift(rational, energy)) ** 2
    assert sin2 == pytest.approx(0.05**2 / ((energy - 2.0) ** 2 + 0.05**2), rel=1e-12)


def test_finds_constructed_pole(rational):
    region = PoleSearchRegion(1.0, 3.0, -0.25, -1e-4)
    (pole,) = find_poles(rational, region)
    assert abs(pole.z - complex(2.0, -0.05)) < 1e-10
    assert pole.residue == pytest.approx(-0.1j, abs=1e-10)
    assert not pole.growing
    assert pole.params.gamma == pytest.approx(0.1, rel=1e-9)


def test_finds_two_poles(fixtures_dir):
    model = ModelCache().get_scattering(str(fixtures_dir / "two_pole.json"))
    region = PoleSearchRegion.below(1.0, 3.0, 1.0)
    poles = find_poles(model, region)
    assert winding_number(model, region) == len(poles) == 2
    for found, expected in zip(poles, model.poles):
        assert abs(found.z - expected) < 1e-10


def test_separates_close_poles():
    model = SMatrixModel.rational([complex(2.0, -0.05), complex(2.02, -0.05)])
    poles = find_poles(model, PoleSearchRegion(1.0, 3.0, -0.25, -1e-4))
    assert [round(p.z.real, 6) for p in poles] == [2.0, 2.02]
    assert all(abs(p.z.imag + 0.05) < 1e-10 for p in poles)


@pytest.mark.parametrize("model_name", ["rational", "delta_shell"])
def test_conjugate_pairs(model_name, request):
    model = request.getfixturevalue(model_name)
    region = PoleSearchRegion(1.0, 12.0, -1.0, -1e-4)
    decaying = find_poles(model, region)
    growing = find_poles(model, region.mirrored())
    assert len(decaying) == len(growing) == 1
    assert growing[0].growing
    assert abs(growing[0].z - decaying[0].z.conjugate()) < 1e-10


@pytest.mark.parametrize(
    "model, region",
    [
        (SMatrixModel.rational([complex(1.5, -0.1), complex(2.5, -0.2)]), PoleSearchRegion.below(1.0, 3.0, 1.0)),
        (SMatrixModel.delta_shell(20.0, 1.0), PoleSearchRegion(1.0, 200.0, -8.0, -1e-4)),
    ],
    ids=["two-pole", "delta-shell"],
)
def test_halves_find_the_same_poles(model, region):
    whole = find_poles(model, region)
    split = sorted(
        (pole for half in region.halves() for pole in find_poles(model, half)), key=lambda p: (p.z.real, p.z.imag)
    )
    assert len(whole) >= 2
    assert len(split) == len(whole) == winding_number(model, region)
    for a, b in zip(whole, split):
        assert abs(a.z - b.z) < 1e-10


def test_pole_on_boundary_is_rejected(rational):
    with pytest.raises(InvalidModelError):
        winding_number(rational, PoleSearchRegion(2.0, 3.0, -0.25, -1e-4))


def test_delta_shell_resonance(delta_shell):
    expected = delta_shell_oracle(20.0, 1.0)
    assert expected == pytest.approx(8.976 - 0.1218j, abs=1e-3)
    (pole,) = find_poles(delta_shell, PoleSearchRegion(5.0, 12.0, -1.0, -1e-4))
    assert abs(pole.z - expected) < 1e-8
    assert abs(pole_function(delta_shell, pole.z)) < 1e-10


def test_delta_shell_free_limit():
    model = SMatrixModel.delta_shell(1e-9, 1.0)
    energies = np.linspace(0.5, 30.0, 12)
    assert max(abs(s_matrix(model, e) - 1) for e in energies) < 1e-8
    assert np.max(np.abs(phase_shift(model, energies))) < 1e-8
    energy, r = 2.0, np.linspace(0.0, 5.0, 21)
    u = scattering_state(model, energy, r)
    assert np.max(np.abs(u - np.sin(math.sqrt(energy) * r))) < 1e-8


def test_jost_at_threshold(delta_shell):
    assert jost(delta_shell, 0.0) == pytest.approx(21.0)
    assert jost(delta_shell, 1e-9) == pytest.approx(21.0, rel=1e-6)
    with pytest.raises(InvalidModelError):
        jost(SMatrixModel.rational([]), 1.0)


def test_scattering_state_matching(delta_shell):
    energy, a, h = 5.0, 1.0, 1e-4
    u = scattering_state(delta_shell, energy, [a - 2 * h, a - h, a, a + h, a + 2 * h])
    inside = math.sin(math.sqrt(energy) * a) / jost(delta_shell, math.sqrt(energy))
    assert u[2] == pytest.approx(inside, abs=1e-12)
    right = (-3 * u[2] + 4 * u[3] - u[4]) / (2 * h)
    left = (3 * u[2] - 4 * u[1] + u[0]) / (2 * h)
    assert right - left == pytest.approx(20.0 * u[2], abs=1e-5)


def test_scattering_state_asymptotics(delta_shell):
    energy = 5.0
    k = math.sqrt(energy)
    r = np.array([50.0, 50.3])
    u = scattering_state(delta_shell, energy, r)
    basis = np.array([np.exp(-1j * k * r), np.exp(1j * k * r)]).T
    incoming, outgoing = np.linalg.solve(basis, u)
    assert -outgoing / incoming == pytest.approx(s_matrix(delta_shell, energy), abs=1e-10)


def test_fwhm_approaches_pole_width():
    errors = []
    for ratio in (1 / 50, 1 / 100, 1 / 200):
        e_r = 2.0
        gamma = ratio * e_r
        model = SMatrixModel.rational([complex(e_r, -0.5 * gamma)])
        peak, width = resonance_fwhm(model, e_r - 5 * gamma, e_r + 5 * gamma)
        assert peak == pytest.approx(e_r, abs=gamma)
        errors.append(abs(width - gamma) / gamma)
    assert errors == sorted(errors, reverse=True)
    assert errors[0] <= 0.08 and errors[1] <= 0.04 and errors[2] <= 0.02


def test_cross_section_peaks_at_resonance(rational):
    assert partial_cross_section(rational, 2.0) == pytest.approx(4 * math.pi / 2.0, rel=1e-12)
    with pytest.raises(InvalidModelError):
        partial_cross_section(rational, -1.0)


@pytest.mark.parametrize(
    "bounds",
    [(1.0, 3.0, -0.5, 0.1), (3.0, 1.0, -0.5, -0.1), (1.0, math.inf, -0.5, -0.1), (1.0, 3.0, 0.0, 0.5)],
)
def test_invalid_regions(bounds):
    with pytest.raises(InvalidModelError):
        PoleSearchRegion(*bounds)


def test_invalid_models():
    with pytest.raises(InvalidModelError):
        SMatrixModel.rational([complex(1.0, 0.1)])
    with pytest.raises(InvalidModelError):
        SMatrixModel.rational([complex(1.0, -0.1), complex(1.0, -0.1)])
    with pytest.raises(InvalidModelError):
        SMatrixModel.delta_shell(-1.0, 1.0)
