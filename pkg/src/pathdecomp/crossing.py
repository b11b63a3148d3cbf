"""First-crossing amplitudes, candidate probabilities and the sum-rule check.

Window integrals run over a fixed global quadrature grid so that
amplitudes over adjacent windows add exactly; window endpoints are
snapped to admissible grid nodes with the offsets recorded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Model, GridModel, norm
from .errors import DomainError
from .pdx import FLUX_SIGN, QuadratureSpec, SIMPSON, boundary_derivative
from .projectors import RegionSpec
from .restricted import DirichletEvolution

SUPPORT_TOL = 1e-8


@dataclass(frozen=True)
class CrossingWindow:
    t1: float
    t2: float

    def __post_init__(self):
        if not self.t1 < self.t2:
            raise DomainError(f"window requires t1 < t2, got ({self.t1}, {self.t2})")


@dataclass(frozen=True)
class CrossingAmplitude:
    values: np.ndarray
    window: CrossingWindow
    t_final: float
    snapped_window: tuple[float, float]
    snap_offsets: tuple[float, float]


@dataclass(frozen=True)
class SumRuleReport:
    p_cross: float
    p_never: float

    @property
    def deviation(self) -> float:
        return self.p_cross + self.p_never - 1.0


def _window_nodes(
    t_span: tuple[float, float], window: CrossingWindow, quad: QuadratureSpec
) -> tuple[np.ndarray, np.ndarray, tuple[float, float], tuple[float, float]]:
    """Quadrature nodes/weights for the window on the global time grid.

    Endpoints snap to even global node indices, which keeps the composite
    Simpson rule exactly additive over adjacent windows.
    """
    t_start, t_end = t_span
    if not (t_start <= window.t1 < window.t2 <= t_end):
        raise DomainError(
            f"window ({window.t1}, {window.t2}) outside span ({t_start}, {t_end})"
        )
    n_nodes = quad.n_nodes
    h = (t_end - t_start) / (n_nodes - 1)
    grid_t = t_start + h * np.arange(n_nodes)

    def snap_even(t: float) -> int:
        j = round((t - t_start) / h)
        j = 2 * round(j / 2)
        return min(max(j, 0), n_nodes - 1)

    j1, j2 = snap_even(window.t1), snap_even(window.t2)
    if j2 <= j1:
        j2 = min(j1 + 2, n_nodes - 1)
    nodes = grid_t[j1 : j2 + 1]
    m = len(nodes)
    weights = np.zeros(m)
    if quad.rule == SIMPSON:
        weights[0::2] = 2.0 * h / 3.0
        weights[1::2] = 4.0 * h / 3.0
        weights[0] = weights[-1] = h / 3.0
    else:
        weights[:] = h
        weights[0] = weights[-1] = h / 2.0
    snapped = (grid_t[j1], grid_t[j2])
    offsets = (abs(snapped[0] - window.t1), abs(snapped[1] - window.t2))
    return nodes, weights, snapped, offsets


def first_crossing_amplitude(
    model: Model,
    region: RegionSpec,
    psi0: np.ndarray,
    t_span: tuple[float, float],
    window: CrossingWindow,
    quad: QuadratureSpec,
) -> CrossingAmplitude:
    """Amplitude to cross the surface first within the window, per endpoint.

    A(x) = integral over the window of (kernel from the wall to x at the
    final time) * (boundary flux of the restricted evolution of psi0).
    """
    grid, params = model.grid, model.params
    t_start, t_end = t_span
    in_c, _ = region.masks(grid)
    leak = grid.dx * float(np.sum(np.abs(psi0[in_c]) ** 2))
    if leak > SUPPORT_TOL:
        raise DomainError(
            f"initial state has mass {leak:.2e} in C; support precondition fails"
        )
    index, _ = region.snap(grid)
    evo = DirichletEvolution(model, region)
    nodes, weights, snapped, offsets = _window_nodes(t_span, window, quad)

    wall = np.zeros(grid.n_points, dtype=complex)
    wall[index] = 1.0
    values = np.zeros(grid.n_points, dtype=complex)
    for t_sigma, w in zip(nodes, weights):
        chi = evo.apply(psi0, t_sigma - t_start)
        dchi = boundary_derivative(chi, grid, region)
        flux = FLUX_SIGN * 1j * params.hbar / (2.0 * params.mass) * dchi
        kernel_column = model.evolve(wall, t_end - t_sigma) / grid.dx
        values += w * flux * kernel_column
    return CrossingAmplitude(values, window, t_end, snapped, offsets)


def candidate_probability(amplitude: CrossingAmplitude, grid: GridModel) -> float:
    """Squared-norm functional of the crossing amplitude (not clamped)."""
    return float(grid.dx * np.sum(np.abs(amplitude.values) ** 2))


def never_cross_probability(
    model: Model,
    region: RegionSpec,
    psi0: np.ndarray,
    t_span: tuple[float, float],
) -> float:
    """Squared norm of the restricted evolution over the full interval."""
    t_start, t_end = t_span
    if t_end == t_start:
        return float(norm(model.grid, psi0) ** 2)
    evo = DirichletEvolution(model, region)
    return float(norm(model.grid, evo.apply(psi0, t_end - t_start)) ** 2)


def sum_rule_diagnostic(
    model: Model,
    region: RegionSpec,
    psi0: np.ndarray,
    t_span: tuple[float, float],
    quad: QuadratureSpec,
) -> SumRuleReport:
    """p_cross + p_never - 1 over the full interval; reported, never asserted."""
    t_start, t_end = t_span
    window = CrossingWindow(t_start, t_end)
    amplitude = first_crossing_amplitude(model, region, psi0, t_span, window, quad)
    p_cross = candidate_probability(amplitude, model.grid)
    p_never = never_cross_probability(model, region, psi0, t_span)
    return SumRuleReport(p_cross, p_never)
