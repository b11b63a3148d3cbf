"""Restricted propagators confined to the complement region.

Two constructions: the projector-product (Zeno) form, whose continuum
limit defines restricted evolution, and the Dirichlet form obtained by
exponentiating the Hamiltonian restricted to the interior nodes of the
complement.  The Dirichlet form is free of slicing error and serves as
the converged reference everywhere else in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import Model, SpectralDecomposition
from .errors import DomainError
from .projectors import POSITION, Projector, RegionSpec

ZENO = "zeno"
DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class ZenoConfig:
    total_time: float
    slices: int

    def __post_init__(self):
        if self.total_time <= 0:
            raise DomainError(f"total_time must be positive, got {self.total_time}")
        if self.slices < 1:
            raise DomainError(f"slices must be >= 1, got {self.slices}")

    @property
    def delta_t(self) -> float:
        return self.total_time / self.slices


@dataclass(frozen=True)
class RestrictedPropagator:
    matrix: np.ndarray
    method: str
    region: RegionSpec
    t_span: float


def zeno_product(u_dt: np.ndarray, p_bar: Projector, k: int) -> RestrictedPropagator:
    """[U(dt) P_complement]^k, the finite-slicing projector product."""
    if k < 1:
        raise DomainError(f"slice count must be >= 1, got {k}")
    step = u_dt @ p_bar.matrix
    result = step
    for _ in range(k - 1):
        result = step @ result
    return RestrictedPropagator(result, f"{ZENO}({k})", p_bar.region, t_span=np.nan)


class DirichletEvolution:
    """Evolution under H restricted to the complement's interior nodes.

    The boundary node is excluded (the wall), so every emitted kernel
    vanishes identically there.  The sub-block eigendecomposition is
    cached, making repeated evaluation at many times cheap.
    """

    def __init__(self, model: Model, region: RegionSpec):
        if region.basis != POSITION:
            raise DomainError("Dirichlet restriction needs a position-basis region")
        self.model = model
        self.region = region
        boundary_index, _ = region.snap(model.grid)
        _, in_cbar = region.masks(model.grid)
        interior = in_cbar.copy()
        interior[boundary_index] = False
        if not interior.any():
            raise DomainError("the complement region has no interior nodes")
        self.boundary_index = boundary_index
        self.interior = np.flatnonzero(interior)

    @cached_property
    def _sub_decomp(self) -> SpectralDecomposition:
        sub = self.model.hamiltonian[np.ix_(self.interior, self.interior)]
        eigenvalues, eigenvectors = np.linalg.eigh(sub)
        return SpectralDecomposition(eigenvalues, eigenvectors)

    def _phases(self, t: float) -> np.ndarray:
        return np.exp(-1j * self._sub_decomp.eigenvalues * t / self.model.params.hbar)

    def matrix(self, t: float) -> np.ndarray:
        """Full-dimension matrix, zero on every row/column outside the interior."""
        v = self._sub_decomp.eigenvectors
        sub = (v * self._phases(t)) @ v.conj().T
        n = self.model.grid.n_points
        out = np.zeros((n, n), dtype=complex)
        out[np.ix_(self.interior, self.interior)] = sub
        return out

    def apply(self, psi: np.ndarray, t: float) -> np.ndarray:
        """Restricted evolution of a full-grid state (projects, then evolves)."""
        v = self._sub_decomp.eigenvectors
        sub = v @ (self._phases(t) * (v.conj().T @ psi[self.interior]))
        out = np.zeros_like(psi, dtype=complex)
        out[self.interior] = sub
        return out


class SubspaceEvolution:
    """Evolution under H compressed to the range of a Hermitian projector.

    This is the continuum limit of the projector-product construction for
    an arbitrary (not necessarily diagonal) projector, e.g. the momentum
    half-space one.
    """

    def __init__(self, model: Model, p_bar: np.ndarray):
        self.model = model
        eigenvalues, eigenvectors = np.linalg.eigh(p_bar)
        keep = eigenvalues > 0.5
        # An empty range is legal (restriction onto nothing): the evolution
        # is identically zero, which the degenerate P_C = 1 case exercises.
        self.basis = eigenvectors[:, keep]
        sub = self.basis.conj().T @ model.hamiltonian @ self.basis
        sub_eigenvalues, sub_eigenvectors = np.linalg.eigh(sub)
        self._decomp = SpectralDecomposition(sub_eigenvalues, sub_eigenvectors)

    def _phases(self, t: float) -> np.ndarray:
        return np.exp(-1j * self._decomp.eigenvalues * t / self.model.params.hbar)

    def matrix(self, t: float) -> np.ndarray:
        v = self._decomp.eigenvectors
        sub = (v * self._phases(t)) @ v.conj().T
        return self.basis @ sub @ self.basis.conj().T

    def apply(self, psi: np.ndarray, t: float) -> np.ndarray:
        v = self._decomp.eigenvectors
        coeff = v @ (self._phases(t) * (v.conj().T @ (self.basis.conj().T @ psi)))
        return self.basis @ coeff


def dirichlet_restricted(
    model: Model, region: RegionSpec, t: float
) -> RestrictedPropagator:
    evo = DirichletEvolution(model, region)
    return RestrictedPropagator(evo.matrix(t), DIRICHLET, region, t_span=t)


def zeno_convergence_study(
    model: Model,
    region: RegionSpec,
    total_time: float,
    k_list: list[int],
) -> list[dict]:
    """Frobenius distance of the Zeno product to the Dirichlet reference.

    Returns one row per K with the measured empirical order between
    consecutive entries (first row has order None).
    """
    if len(k_list) < 3:
        raise DomainError("k_list needs at least 3 entries")
    if sorted(k_list) != list(k_list):
        raise DomainError("k_list must be ascending")
    from .projectors import complement_projector, position_projector

    p_c = position_projector(model.grid, region)
    p_bar = complement_projector(p_c, model.grid)
    reference = dirichlet_restricted(model, region, total_time).matrix

    rows = []
    for i, k in enumerate(k_list):
        u_dt = model.propagator(total_time / k)
        z = zeno_product(u_dt, p_bar, k)
        err = float(np.linalg.norm(z.matrix - reference))
        order = None
        if i > 0:
            prev = rows[-1]
            if err > 0 and prev["frobenius_error"] > 0:
                order = float(
                    np.log(prev["frobenius_error"] / err) / np.log(k / k_list[i - 1])
                )
        rows.append(
            {
                "K": k,
                "delta_t": total_time / k,
                "frobenius_error": err,
                "empirical_order": order,
            }
        )
    return rows
