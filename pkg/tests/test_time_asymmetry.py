import numpy as np
import pytest

from models.errors import SemigroupDomainError
from models.evolution import GamowStateWeight, gamow_evolve, survival_amplitude
from models.goldenrule import decay_probability, decay_rate
from models.openquantum import (
    DensityMatrix,
    LiouvillianGenerator,
    amplitude_damping,
    dephasing,
    lindblad_evolve,
    random_density,
    random_generator,
)
from models.spectral import EnergyWavefunction


def negative_times(rng: np.random.Generator, count: int = 20) -> np.ndarray:
    # magnitudes spread log-uniformly over [1e-12, 1e3]
    return -(10.0 ** rng.uniform(-12.0, 3.0, count))


def test_gamow_evolution_rejects_negative_times(narrow, rng):
    start = GamowStateWeight(narrow)
    for t in negative_times(rng):
        with pytest.raises(SemigroupDomainError):
            gamow_evolve(start, t)


def test_decay_rejects_negative_times(decay_model, rng):
    for t in negative_times(rng):
        with pytest.raises(SemigroupDomainError):
            decay_probability(decay_model, t)
        with pytest.raises(SemigroupDomainError):
            decay_rate(decay_model, t)


@pytest.mark.parametrize("name", ["amplitude-damping", "dephasing", "random"])
def test_dissipative_lindblad_rejects_negative_times(name, rng):
    if name == "random":
        generator = random_generator(3, rng)
    else:
        generator = amplitude_damping(0.5) if name == "amplitude-damping" else dephasing(0.8)
    rho = random_density(generator.dim, rng)
    for t in negative_times(rng):
        with pytest.raises(SemigroupDomainError):
            lindblad_evolve(generator, rho, t)


def test_unitary_evolution_runs_backwards(rng):
    h = random_generator(3, rng, jumps=0).h
    rho = random_density(3, rng)
    generator = LiouvillianGenerator(h)
    for t in -rng.uniform(0.0, 5.0, 5):
        back = lindblad_evolve(generator, lindblad_evolve(generator, rho, -t), t)
        assert isinstance(back, DensityMatrix)
        assert np.max(np.abs(back.entries - rho.entries)) < 1e-9

    phi = EnergyWavefunction.normalized([complex(2.0, 0.3)], [1.0])
    for t in rng.uniform(0.1, 5.0, 5):
        assert survival_amplitude(phi, -t) == survival_amplitude(phi, t).conjugate()
