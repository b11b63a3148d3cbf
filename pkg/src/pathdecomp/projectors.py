"""Region projectors in the position and momentum bases.

The dividing surface splits the line into a region C and its complement.
Position projectors are exactly diagonal 0/1 matrices; the momentum
projector is built from the discrete Fourier plane-wave basis of a
periodic grid, which makes it exactly idempotent by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import PERIODIC, GridModel
from .errors import DimensionError, DomainError

POSITION = "position"
MOMENTUM = "momentum"

IDEMPOTENCE_TOL = 1e-11


@dataclass(frozen=True)
class RegionSpec:
    """Half-line region C: `side_of_c` of the boundary value.

    For the position basis the boundary is snapped to the nearest grid
    node; the node itself belongs to C or its complement according to
    `boundary_membership`.  For the momentum basis the boundary is fixed
    at p = 0.
    """

    basis: str = POSITION
    boundary: float = 0.0
    side_of_c: str = "above"
    boundary_membership: str = "C"

    def __post_init__(self):
        if self.basis not in (POSITION, MOMENTUM):
            raise DomainError(f"unknown basis {self.basis!r}")
        if self.side_of_c not in ("above", "below"):
            raise DomainError(f"side_of_c must be 'above' or 'below'")
        if self.boundary_membership not in ("C", "Cbar"):
            raise DomainError("boundary_membership must be 'C' or 'Cbar'")
        if self.basis == MOMENTUM and self.boundary != 0.0:
            raise DomainError("momentum-basis boundary is fixed at p = 0")

    def snap(self, grid: GridModel) -> tuple[int, float]:
        """Nearest grid node to the requested boundary and the snap offset."""
        if not grid.x_min < self.boundary < grid.x_max:
            raise DomainError(
                f"boundary {self.boundary} outside the open grid interval "
                f"({grid.x_min}, {grid.x_max})"
            )
        index = int(round((self.boundary - grid.x_min) / grid.dx))
        index = min(max(index, 0), grid.n_points - 1)
        return index, abs(grid.nodes[index] - self.boundary)

    def masks(self, grid: GridModel) -> tuple[np.ndarray, np.ndarray]:
        """Boolean node masks (in_C, in_Cbar)."""
        index, _ = self.snap(grid)
        j = np.arange(grid.n_points)
        if self.side_of_c == "above":
            in_c = j > index
        else:
            in_c = j < index
        if self.boundary_membership == "C":
            in_c = in_c | (j == index)
        return in_c, ~in_c


@dataclass(frozen=True)
class Projector:
    matrix: np.ndarray
    region: RegionSpec
    rank: int


def position_projector(grid: GridModel, region: RegionSpec) -> Projector:
    """Diagonal 0/1 projector onto the nodes of C."""
    if region.basis != POSITION:
        raise DomainError("position_projector requires a position-basis region")
    in_c, _ = region.masks(grid)
    matrix = np.diag(in_c.astype(complex))
    return Projector(matrix, region, int(in_c.sum()))


def complement_projector(p: Projector, grid: GridModel) -> Projector:
    return Projector(
        np.eye(grid.n_points, dtype=complex) - p.matrix, p.region,
        grid.n_points - p.rank,
    )


@lru_cache(maxsize=8)
def _dft_matrix(n: int) -> np.ndarray:
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def momentum_projector(grid: GridModel) -> Projector:
    """Projector onto strictly positive DFT momenta of a periodic grid.

    The zero mode (and the Nyquist mode on even grids) is assigned to the
    complement, so C = {p > 0} is strict; rank = floor((n-1)/2).
    """
    if grid.boundary != PERIODIC:
        raise DomainError(
            "momentum projector needs a periodic grid; build the GridModel "
            f"with boundary={PERIODIC!r}"
        )
    n = grid.n_points
    f = _dft_matrix(n)
    mask = np.zeros(n)
    mask[1 : (n - 1) // 2 + 1] = 1.0
    matrix = (f.conj().T * mask) @ f
    region = RegionSpec(basis=MOMENTUM, boundary=0.0, boundary_membership="Cbar")
    return Projector(matrix, region, int(mask.sum()))


def positive_momentum_waves(grid: GridModel) -> np.ndarray:
    """Orthonormal plane waves spanning C (columns), ascending momentum."""
    n = grid.n_points
    f = _dft_matrix(n)
    return f.conj().T[:, 1 : (n - 1) // 2 + 1]


def heisenberg_projector(p: Projector | np.ndarray, u_t: np.ndarray) -> np.ndarray:
    """P(t) = U(t)^dagger P U(t)."""
    matrix = p.matrix if isinstance(p, Projector) else p
    if matrix.shape != u_t.shape:
        raise DimensionError(
            f"projector shape {matrix.shape} != propagator shape {u_t.shape}"
        )
    return u_t.conj().T @ matrix @ u_t


def idempotence_defect(matrix: np.ndarray) -> float:
    return np.abs(matrix @ matrix - matrix).max()
