"""
Finite-dimensional open-system dynamics.

The generator is the GKSL form
    L(rho) = -i [H, rho] + sum_k (L_k rho L_k^+ - 1/2 {L_k^+ L_k, rho})
with the jump rates folded into the L_k. Evolutions use the row-major
vectorization vec(A X B) = (A kron B^T) vec(X), so the n^2 x n^2
superoperator is exponentiated directly.
"""
import logging
import math
from typing import Iterable

import attr
import numpy as np
from scipy.linalg import expm

from const import EIGENVALUE_FLOOR, MAX_LINDBLAD_DIM, STATE_TOL
from models.errors import InvalidModelError, InvariantViolationError, NonConvergenceError, SemigroupDomainError

__all__ = (
    "DensityMatrix",
    "LiouvillianGenerator",
    "liouvillian_apply",
    "superoperator",
    "lindblad_evolve",
    "von_neumann_evolve",
    "semigroup_compose_check",
    "purity",
    "amplitude_damping",
    "dephasing",
    "random_generator",
    "random_density",
)

log = logging.getLogger("OpenQuantum")


def _square(value) -> np.ndarray:
    matrix = np.array(value, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise InvalidModelError("Expected a non-empty square matrix", shape=matrix.shape)
    if not np.all(np.isfinite(matrix)):
        raise InvalidModelError("Matrix entries must be finite")
    matrix.setflags(write=False)
    return matrix


def _hermiticity(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T)))


@attr.s(auto_attribs=True, frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite up to the eigenvalue floor."""

    entries: np.ndarray = attr.ib(converter=_square)
    tolerance: float = STATE_TOL

    def __attrs_post_init__(self) -> None:
        if _hermiticity(self.entries) > self.tolerance:
            raise InvariantViolationError("Density matrix is not Hermitian", deviation=_hermiticity(self.entries))
        trace = np.trace(self.entries)
        if abs(trace - 1) > self.tolerance:
            raise InvariantViolationError("Density matrix trace is not 1", trace=complex(trace))
        if self.min_eigenvalue < EIGENVALUE_FLOOR:
            raise InvariantViolationError("Density matrix has a negative eigenvalue", eigenvalue=self.min_eigenvalue)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.entries)).copy()

    @classmethod
    def pure(cls, vector: Iterable[complex]) -> "DensityMatrix":
        psi = np.asarray(list(vector), dtype=complex)
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise InvalidModelError("A pure state needs a non-zero vector")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def from_evolved(cls, matrix: np.ndarray, tolerance: float) -> "DensityMatrix":
        # Hermitize only; the trace is never renormalized
        return cls(0.5 * (matrix + matrix.conj().T), tolerance)


def _jump_tuple(values: Iterable) -> tuple[np.ndarray, ...]:
    return tuple(_square(v) for v in values)


@attr.s(auto_attribs=True, frozen=True, eq=False)
class LiouvillianGenerator:
    h: np.ndarray = attr.ib(converter=_square)
    jumps: tuple[np.ndarray, ...] = attr.ib(default=(), converter=_jump_tuple)

    def __attrs_post_init__(self) -> None:
        if self.dim > MAX_LINDBLAD_DIM:
            raise InvalidModelError("Generator dimension exceeds the supported maximum", dim=self.dim)
        if _hermiticity(self.h) > STATE_TOL:
            raise InvalidModelError("Hamiltonian is not Hermitian", deviation=_hermiticity(self.h))
        for jump in self.jumps:
            if jump.shape != self.h.shape:
                raise InvalidModelError("Jump operator dimension differs from the Hamiltonian", shape=jump.shape)

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @property
    def dissipative(self) -> bool:
        return any(np.any(jump != 0) for jump in self.jumps)

    @classmethod
    def from_rates(cls, h, jumps: Iterable[tuple[object, float]]) -> "LiouvillianGenerator":
        """Fold each rate into its jump as sqrt(rate) * L."""
        folded = []
        for matrix, rate in jumps:
            if not (math.isfinite(rate) and rate >= 0):
                raise InvalidModelError("Jump rates must be non-negative", rate=rate)
            folded.append(math.sqrt(rate) * np.asarray(matrix, dtype=complex))
        return cls(h, folded)


def _check_dims(generator: LiouvillianGenerator, rho: DensityMatrix) -> None:
    if rho.dim != generator.dim:
        raise InvalidModelError("State and generator dimensions differ", state=rho.dim, generator=generator.dim)


def liouvillian_apply(generator: LiouvillianGenerator, rho: DensityMatrix) -> np.ndarray:
    _check_dims(generator, rho)
    r, h = rho.entries, generator.h
    out = -1j * (h @ r - r @ h)
    for jump in generator.jumps:
        dagger = jump.conj().T
        product = dagger @ jump
        out = out + jump @ r @ dagger - 0.5 * (product @ r + r @ product)
    return out


def superoperator(generator: LiouvillianGenerator) -> np.ndarray:
    n = generator.dim
    eye = np.eye(n)
    h = generator.h
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for jump in generator.jumps:
        product = jump.conj().T @ jump
        sup = sup + np.kron(jump, jump.conj()) - 0.5 * np.kron(product, eye) - 0.5 * np.kron(eye, product.T)
    return sup


def lindblad_evolve(
    generator: LiouvillianGenerator, rho: DensityMatrix, t: float, *, tolerance: float = 1e-10
) -> DensityMatrix:
    """rho(t) = e^{Lt} rho(0) for t >= 0."""
    _check_dims(generator, rho)
    t = float(t)
    if not math.isfinite(t):
        raise InvalidModelError("Time must be finite", t=t)
    if t < 0 and generator.dissipative:
        raise SemigroupDomainError("Dissipative evolution is defined for t >= 0 only", t=t)
    if t == 0:
        return rho
    try:
        propagator = expm(superoperator(generator) * t)
    except (ValueError, np.linalg.LinAlgError) as e:
        raise NonConvergenceError("Superoperator exponential failed", t=t, error=str(e)) from e
    if not np.all(np.isfinite(propagator)):
        raise NonConvergenceError("Superoperator exponential overflowed", t=t)
    n = generator.dim
    evolved = (propagator @ rho.entries.reshape(n * n)).reshape(n, n)
    return DensityMatrix.from_evolved(evolved, tolerance)


def von_neumann_evolve(h, rho: DensityMatrix, t: float, *, tolerance: float = 1e-10) -> DensityMatrix:
    """U rho U^+ with U = e^{-iHt} from the eigenbasis of H; any real t."""
    h = _square(h)
    if _hermiticity(h) > STATE_TOL:
        raise InvalidModelError("Hamiltonian is not Hermitian", deviation=_hermiticity(h))
    if h.shape != rho.entries.shape:
        raise InvalidModelError("State and Hamiltonian dimensions differ")
    energies, vectors = np.linalg.eigh(h)
    u = (vectors * np.exp(-1j * energies * float(t))) @ vectors.conj().T
    return DensityMatrix.from_evolved(u @ rho.entries @ u.conj().T, tolerance)


def semigroup_compose_check(generator: LiouvillianGenerator, rho: DensityMatrix, t1: float, t2: float) -> float:
    """Max-norm distance between two-step and one-step evolution."""
    stepped = lindblad_evolve(generator, lindblad_evolve(generator, rho, t1), t2)
    direct = lindblad_evolve(generator, rho, t1 + t2)
    return float(np.max(np.abs(stepped.entries - direct.entries)))


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.trace(rho.entries @ rho.entries)))


def amplitude_damping(gamma: float, omega: float = 0.0) -> LiouvillianGenerator:
    """
    Two-level decay |e> -> |g> at rate gamma; basis order (g, e).

    The fixed point is the pure ground state, so purity can dip and then
    climb back to 1; only `dephasing` has non-increasing purity.
    """
    h = np.diag([0.0, omega]).astype(complex)
    lowering = np.array([[0, 1], [0, 0]], dtype=complex)
    return LiouvillianGenerator.from_rates(h, [(lowering, gamma)])


def dephasing(gamma: float, omega: float = 0.0) -> LiouvillianGenerator:
    """Pure dephasing: coherences decay at rate gamma, populations fixed."""
    h = np.diag([0.0, omega]).astype(complex)
    sigma_z = np.diag([1.0, -1.0]).astype(complex)
    return LiouvillianGenerator.from_rates(h, [(sigma_z, 0.5 * gamma)])


def _random_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))


def random_generator(dim: int, rng: np.random.Generator, jumps: int = 2, scale: float = 0.3) -> LiouvillianGenerator:
    a = _random_matrix(dim, rng)
    h = 0.5 * (a + a.conj().T)
    return LiouvillianGenerator(h, [scale * _random_matrix(dim, rng) for _ in range(jumps)])


def random_density(dim: int, rng: np.random.Generator) -> DensityMatrix:
    a = _random_matrix(dim, rng)
    rho = a @ a.conj().T
    rho = rho / np.trace(rho)
    return DensityMatrix(0.5 * (rho + rho.conj().T))
