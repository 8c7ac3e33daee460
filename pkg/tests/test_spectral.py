import math

import numpy as np
import pytest

from models.errors import InvalidModelError
from models.quadrature import build_quadrature, integrate
from models.scattering import SMatrixModel
from models.spectral import (
    EnergyWavefunction,
    ResonanceParameters,
    bw_amplitude,
    bw_density,
    closed_form_pairing,
    complex_basis_reconstruct,
    dirac_reconstruct,
)

GRID = np.linspace(0.5, 4.0, 8)

EXPANSION_CORPUS = [
    ([complex(2.0, -0.05)], [complex(1.0, 0.5), complex(3.0, 1.0)], [1.0, 0.5j]),
    ([complex(1.5, -0.1), complex(2.5, -0.2)], [complex(2.0, 0.3)], [1.0]),
    ([complex(3.0, -0.3)], [complex(-1.0, 0.8), complex(2.0, 2.0)], [0.3 - 0.2j, 1.0]),
]


def _pair(index: int) -> tuple[EnergyWavefunction, SMatrixModel]:
    model_poles, poles, residues = EXPANSION_CORPUS[index]
    return EnergyWavefunction.normalized(poles, residues), SMatrixModel.rational(model_poles)


def test_bw_amplitude_peak_is_real():
    params = ResonanceParameters(e_r=2.0, gamma=0.5)
    value = bw_amplitude(2.0, params)
    assert value.imag == pytest.approx(0.0, abs=1e-15)
    assert value.real == pytest.approx(math.sqrt(2 / (math.pi * 0.5)), rel=1e-14)


def test_bw_amplitude_rejects_pole():
    params = ResonanceParameters(e_r=2.0, gamma=0.5)
    with pytest.raises(InvalidModelError):
        bw_amplitude(params.pole, params)


@pytest.mark.parametrize("energy", [0.0, 1.0, 1.75, 2.0, 2.25, 7.5])
def test_density_is_amplitude_squared(energy):
    params = ResonanceParameters(e_r=2.0, gamma=0.5)
    assert abs(bw_amplitude(energy, params)) ** 2 == pytest.approx(bw_density(energy, params), rel=1e-14)


def test_density_shape():
    params = ResonanceParameters(e_r=2.0, gamma=1.0)
    assert bw_density(2.0, params) == pytest.approx(2 / math.pi, rel=1e-14)
    assert bw_density(2.5, params) == pytest.approx(0.5 * bw_density(2.0, params), rel=1e-14)
    assert bw_density(2.0 + 0.25, params) == bw_density(2.0 - 0.25, params)
    assert bw_density(1e12, params) < 1e-24


def test_density_integrates_to_one_on_full_line():
    params = ResonanceParameters(e_r=2.0, gamma=0.3)
    rule = build_quadrature("semi-infinite", (-math.inf, math.inf), 64, features=[params.pole])
    assert integrate(rule, lambda e: bw_density(e, params), vectorized=True).real == pytest.approx(1.0, abs=1e-10)


def test_density_tends_to_delta():
    def smooth(e):
        return np.exp(-((e - 1.0) ** 2))

    errors = []
    for gamma in (1e-1, 1e-2, 1e-3):
        params = ResonanceParameters(e_r=1.5, gamma=gamma)
        rule = build_quadrature("semi-infinite", (-math.inf, math.inf), 64, features=[params.pole, 1.0 + 1j])
        value = integrate(rule, lambda e: bw_density(e, params) * smooth(e), vectorized=True).real
        errors.append(abs(value - smooth(1.5)))
    assert errors == sorted(errors, reverse=True)
    assert errors[-1] < 5e-3


def test_breit_wigner_norms():
    params = ResonanceParameters(e_r=2.0, gamma=0.5)
    raw = EnergyWavefunction([params.pole], [1j * math.sqrt(params.gamma / (2 * math.pi))])
    assert raw.support_norm("full-line") == pytest.approx(1.0, rel=1e-13)
    expected = 1 - math.atan(params.gamma / (2 * params.e_r)) / math.pi
    assert raw.support_norm("semibounded") == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("index", range(len(EXPANSION_CORPUS)))
def test_normalized_wavefunction_has_unit_norm(index):
    phi, _ = _pair(index)
    assert phi.support_norm() == pytest.approx(1.0, rel=1e-12)
    features = list(phi.poles)
    rule = build_quadrature("semi-infinite", (0.0, math.inf), 64, features=features)
    assert integrate(rule, phi.density, vectorized=True).real == pytest.approx(1.0, abs=1e-8)


def test_density_partial_fractions():
    phi, _ = _pair(0)
    z = complex(0.7, -0.3)
    assert sum(c / (z - q) for q, c in phi.density_poles()) == pytest.approx(phi.density(z), rel=1e-12)


@pytest.mark.parametrize(
    "poles, residues",
    [
        ([2.0], [1.0]),
        ([1 + 1j, 1 - 1j], [1.0, 1.0]),
        ([1 + 1j, 1 + 1j], [1.0, 2.0]),
        ([1 + 1j], [1.0, 2.0]),
    ],
)
def test_invalid_wavefunctions(poles, residues):
    with pytest.raises(InvalidModelError):
        EnergyWavefunction(poles, residues)


def test_dirac_matches_closed_form_for_distant_pole(rational):
    phi = EnergyWavefunction.normalized([complex(10.0, 1.0)], [1.0])
    (value,) = dirac_reconstruct(phi, rational, [2.5])
    assert value == pytest.approx(closed_form_pairing(phi, rational, 2.5), abs=1e-6)


def test_delta_kernel_recovers_the_state():
    phi = EnergyWavefunction.normalized([complex(10.0, 1.0)], [1.0])
    (value,) = dirac_reconstruct(phi, SMatrixModel.rational([]), [2.5], kernel="delta")
    assert value == pytest.approx(phi(2.5), abs=1e-6)


def test_delta_kernel_reads_off_the_in_state_weight(rational):
    phi = EnergyWavefunction.normalized([complex(10.0, 1.0)], [1.0])
    grid = [1.0, 2.5, 4.0]
    dirac = dirac_reconstruct(phi, rational, grid, kernel="delta")
    assert np.max(np.abs(dirac - rational.rational_function(grid) * phi(grid))) < 1e-6
    result = complex_basis_reconstruct(phi, rational, grid, kernel="delta")
    assert np.max(np.abs(result.reconstruction - dirac)) < 1e-6


def test_dirac_of_zero_vector(rational):
    assert np.all(dirac_reconstruct(EnergyWavefunction.zero(), rational, GRID) == 0)


def test_dirac_is_linear(rational):
    phi, _ = _pair(0)
    c = 0.3 - 1.2j
    scaled = dirac_reconstruct(phi.scaled(c), rational, GRID)
    assert np.max(np.abs(scaled - c * dirac_reconstruct(phi, rational, GRID))) < 1e-12


@pytest.mark.parametrize("index", range(len(EXPANSION_CORPUS)))
def test_complex_basis_matches_dirac(index):
    phi, model = _pair(index)
    dirac = dirac_reconstruct(phi, model, GRID)
    result = complex_basis_reconstruct(phi, model, GRID)
    assert len(result.pole_coefficients) == len(model.poles)
    assert np.max(np.abs(result.reconstruction - dirac)) < 1e-6
    exact = np.array([closed_form_pairing(phi, model, x) for x in GRID])
    assert np.max(np.abs(dirac - exact)) < 1e-6


def test_pole_coefficient_is_a_residue(rational):
    phi, _ = _pair(0)
    result = complex_basis_reconstruct(phi, rational, [1.0])
    z = rational.poles[0]
    expected = 2j * math.pi * rational.rational_residue(0) * phi(z)
    assert result.pole_coefficients[0] == pytest.approx(expected, abs=1e-10)


def test_pole_coefficient_independent_of_contour(rational):
    phi, _ = _pair(0)
    small = complex_basis_reconstruct(phi, rational, [1.0], residue_radius=0.0025)
    large = complex_basis_reconstruct(phi, rational, [1.0], residue_radius=0.01)
    assert abs(small.pole_coefficients[0] - large.pole_coefficients[0]) < 1e-8


def test_complex_basis_self_converges(rational):
    phi, _ = _pair(0)
    coarse = complex_basis_reconstruct(phi, rational, GRID, order=64)
    fine = complex_basis_reconstruct(phi, rational, GRID, order=128)
    assert np.max(np.abs(coarse.reconstruction - fine.reconstruction)) < 1e-8


def test_model_without_resonances():
    phi, _ = _pair(0)
    model = SMatrixModel.rational([])
    result = complex_basis_reconstruct(phi, model, GRID)
    assert result.pole_coefficients == ()
    assert np.array_equal(result.reconstruction, result.background)
    assert np.max(np.abs(result.reconstruction - dirac_reconstruct(phi, model, GRID))) < 1e-6


def test_expansion_contracts(rational, delta_shell):
    phi, _ = _pair(0)
    with pytest.raises(InvalidModelError):
        complex_basis_reconstruct(phi, delta_shell, GRID)
    below = EnergyWavefunction.normalized([complex(1.0, -0.5)], [1.0])
    with pytest.raises(InvalidModelError):
        complex_basis_reconstruct(below, rational, GRID)
    with pytest.raises(InvalidModelError):
        dirac_reconstruct(phi, rational, GRID, kernel="gaussian")
    with pytest.raises(InvalidModelError):
        dirac_reconstruct(phi, rational, GRID, kernel="delta", offset=0.0)
