"""Discretized 1-D Hilbert spaces, Hamiltonians and exact unitary propagators.

Everything downstream (projectors, restricted evolution, flux assembly)
consumes the grid, the dense Hamiltonian and its spectral decomposition
defined here.  Propagation is done by full eigendecomposition so that no
time-integration error enters any verification residual.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionError, DomainError, NumericError

HARD_WALL = "hard-wall"
PERIODIC = "periodic"

HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-11


@dataclass(frozen=True)
class GridModel:
    """Uniform 1-D grid with nodes x_min + j*dx, j = 0..n_points-1."""

    n_points: int
    x_min: float
    x_max: float
    boundary: str = HARD_WALL

    def __post_init__(self):
        if self.n_points < 8:
            raise DomainError(f"n_points must be >= 8, got {self.n_points}")
        if not self.x_max > self.x_min:
            raise DomainError("x_max must exceed x_min")
        if self.boundary not in (HARD_WALL, PERIODIC):
            raise DomainError(f"unknown boundary convention {self.boundary!r}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)


@dataclass(frozen=True)
class PhysicalParams:
    mass: float = 1.0
    hbar: float = 1.0
    omega: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        if not self.hbar > 0:
            raise DomainError(f"hbar must be positive, got {self.hbar}")
        if self.omega < 0:
            raise DomainError(f"omega must be >= 0, got {self.omega}")


@dataclass(frozen=True)
class PotentialSpec:
    """Potential on the grid: free, harmonic (uses params.omega) or sampled."""

    kind: str = "free"
    samples: np.ndarray | None = None

    KINDS = ("free", "harmonic", "custom")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise DomainError(f"unknown potential kind {self.kind!r}")
        if self.kind == "custom":
            if self.samples is None:
                raise DomainError("custom potential requires samples")
            samples = np.asarray(self.samples, dtype=float)
            if not np.all(np.isfinite(samples)):
                raise DomainError("custom potential samples must be finite")
            object.__setattr__(self, "samples", samples)
        elif self.samples is not None:
            raise DomainError(f"{self.kind} potential takes no samples")

    def values(self, grid: GridModel, params: PhysicalParams) -> np.ndarray:
        if self.kind == "free":
            return np.zeros(grid.n_points)
        if self.kind == "harmonic":
            return 0.5 * params.mass * params.omega**2 * grid.nodes**2
        if self.samples.shape != (grid.n_points,):
            raise DimensionError(
                f"custom potential has {self.samples.shape[0]} samples, "
                f"grid has {grid.n_points} nodes"
            )
        return self.samples


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermiticity_defect(h: np.ndarray) -> float:
    scale = np.abs(h).max() or 1.0
    return np.abs(h - h.conj().T).max() / scale


def build_hamiltonian(
    grid: GridModel, params: PhysicalParams, potential: PotentialSpec
) -> np.ndarray:
    """Dense H = 3-point finite-difference kinetic term + diagonal potential."""
    n = grid.n_points
    coeff = params.hbar**2 / (2.0 * params.mass * grid.dx**2)
    h = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    h[idx, idx] = 2.0 * coeff
    h[idx[:-1], idx[1:]] = -coeff
    h[idx[1:], idx[:-1]] = -coeff
    if grid.boundary == PERIODIC:
        h[0, n - 1] = -coeff
        h[n - 1, 0] = -coeff
    h[idx, idx] += potential.values(grid, params)
    return h


def spectral_decompose(h: np.ndarray) -> SpectralDecomposition:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionError(f"expected square matrix, got shape {h.shape}")
    defect = hermiticity_defect(h)
    if defect > HERMITICITY_TOL * 10:
        raise DomainError(f"matrix is not Hermitian (defect {defect:.3e})")
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        scale = np.abs(h).max()
        raise NumericError(
            f"eigendecomposition failed (n={h.shape[0]}, max|H|={scale:.3e}): {exc}"
        ) from exc
    return SpectralDecomposition(eigenvalues, eigenvectors)


def propagator(
    decomp: SpectralDecomposition, params: PhysicalParams, t: float
) -> np.ndarray:
    """U(t) = V exp(-i diag(lambda) t / hbar) V^dagger; exactly unitary."""
    if not np.isfinite(t):
        raise DomainError(f"time must be finite, got {t}")
    phases = np.exp(-1j * decomp.eigenvalues * t / params.hbar)
    v = decomp.eigenvectors
    return (v * phases) @ v.conj().T


def composition_residual(
    decomp: SpectralDecomposition, params: PhysicalParams, t1: float, t2: float
) -> float:
    u12 = propagator(decomp, params, t1 + t2)
    u1 = propagator(decomp, params, t1)
    u2 = propagator(decomp, params, t2)
    return np.abs(u12 - u2 @ u1).max()


@dataclass(frozen=True)
class Model:
    """Grid + parameters + Hamiltonian with its cached eigendecomposition."""

    grid: GridModel
    params: PhysicalParams
    potential: PotentialSpec
    hamiltonian: np.ndarray = field(repr=False)
    decomp: SpectralDecomposition = field(repr=False)

    @classmethod
    def build(
        cls,
        grid: GridModel,
        params: PhysicalParams,
        potential: PotentialSpec | None = None,
    ) -> "Model":
        potential = potential or PotentialSpec(
            "harmonic" if params.omega > 0 else "free"
        )
        h = build_hamiltonian(grid, params, potential)
        return cls(grid, params, potential, h, spectral_decompose(h))

    def propagator(self, t: float) -> np.ndarray:
        return propagator(self.decomp, self.params, t)

    def evolve(self, psi: np.ndarray, t: float) -> np.ndarray:
        """Apply U(t) to a state without forming the full matrix."""
        v = self.decomp.eigenvectors
        phases = np.exp(-1j * self.decomp.eigenvalues * t / self.params.hbar)
        return v @ (phases * (v.conj().T @ psi))


def gaussian_packet(
    grid: GridModel,
    center: float,
    width: float,
    momentum: float = 0.0,
    hbar: float = 1.0,
) -> np.ndarray:
    """Normalized Gaussian; |psi|^2 has e-folding scale `width` around `center`."""
    if width <= 0:
        raise DomainError(f"packet width must be positive, got {width}")
    x = grid.nodes
    psi = np.exp(-((x - center) ** 2) / (4.0 * (width / np.sqrt(2.0)) ** 2))
    psi = psi.astype(complex) * np.exp(1j * momentum * x / hbar)
    return psi / norm(grid, psi)


def inner(grid: GridModel, bra: np.ndarray, ket: np.ndarray) -> complex:
    """Grid inner product dx * sum(conj(bra) * ket)."""
    return grid.dx * np.vdot(bra, ket)


def norm(grid: GridModel, psi: np.ndarray) -> float:
    return float(np.sqrt(grid.dx) * np.linalg.norm(psi))


def truncate_to_mask(grid: GridModel, psi: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Zero the state outside `mask` and renormalize (exact support control)."""
    out = np.where(mask, psi, 0.0)
    n = norm(grid, out)
    if n == 0.0:
        raise DomainError("state has no support inside the requested region")
    return out / n
