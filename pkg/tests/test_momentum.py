"""Momentum-representation crossing via the oscillator duality map."""

import numpy as np
import pytest

from pathdecomp import (
    GridModel,
    PhysicalParams,
    dual_map,
    duality_fidelity,
    momentum_pdx_residual,
    momentum_restricted_propagator,
)
from pathdecomp.errors import DomainError
from pathdecomp.pdx import QuadratureSpec


@pytest.fixture(scope="module")
def dual_unit():
    # natural units: length sqrt(m*omega) in p, period 2*pi/omega in t
    return dual_map(PhysicalParams(1.0, 1.0, 1.0), GridModel(512, -20.0, 20.0))


def test_dual_map_parameters():
    params = PhysicalParams(mass=2.0, hbar=1.0, omega=3.0)
    dual = dual_map(params, GridModel(64, -10.0, 10.0))
    assert dual.mapped_mass == pytest.approx(1.0 / 18.0)
    assert dual.mapped_omega == 3.0
    assert dual.model.params.mass == pytest.approx(1.0 / 18.0)
    assert dual.region.boundary == 0.0


def test_dual_map_rejects_free_particle():
    with pytest.raises(DomainError):
        dual_map(PhysicalParams(1.0, 1.0, 0.0), GridModel(64, -10.0, 10.0))


def test_dual_spectrum_matches_oscillator(dual_unit):
    # dual-form spectrum keeps the oscillator ladder hbar*omega*(k + 1/2)
    energies = dual_unit.model.decomp.eigenvalues[:8]
    expected = 1.0 * (np.arange(8) + 0.5)
    # three-point kinetic term biases level k downward by O((k*dx)^2)
    assert np.abs(energies - expected).max() <= 3e-2
    assert np.abs(energies[0] - 0.5) <= 1e-3


def test_momentum_restricted_vanishes_at_zero(dual_unit):
    prop = momentum_restricted_propagator(dual_unit, 0.6)
    index, _ = dual_unit.region.snap(dual_unit.grid)
    assert np.abs(prop.matrix[index, :]).max() == 0.0
    assert np.abs(prop.matrix[:, index]).max() == 0.0


def test_momentum_restricted_semigroup(dual_unit):
    a = momentum_restricted_propagator(dual_unit, 0.3).matrix
    b = momentum_restricted_propagator(dual_unit, 0.4).matrix
    c = momentum_restricted_propagator(dual_unit, 0.7).matrix
    assert np.abs(a @ b - c).max() <= 1e-12


def test_momentum_pdx_residual_benchmark(dual_unit):
    result = momentum_pdx_residual(
        dual_unit, -2.0, 2.0, (0.0, 1.0), QuadratureSpec(n_nodes=129), width=0.5
    )
    assert result.residual <= 5e-2
    assert result.resolved_sign == -1
    assert abs(result.lhs) > 1e-3


def test_momentum_pdx_scale_collapse():
    # in natural units every (m, omega) instance is the same dimensionless
    # problem, so the residual is identical across the parameter plane
    reference = None
    for m, omega in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5)]:
        params = PhysicalParams(m, 1.0, omega)
        ell = np.sqrt(m * omega)
        dual = dual_map(params, GridModel(512, -20.0 * ell, 20.0 * ell))
        result = momentum_pdx_residual(
            dual, -2.0 * ell, 2.0 * ell, (0.0, 1.0 / omega),
            QuadratureSpec(n_nodes=129), width=0.5 * ell,
        )
        if reference is None:
            reference = result.residual
        assert result.residual == pytest.approx(reference, rel=1e-6)
        assert result.resolved_sign == -1


def test_momentum_pdx_rejects_same_side(dual_unit):
    with pytest.raises(DomainError):
        momentum_pdx_residual(
            dual_unit, -2.0, -1.0, (0.0, 1.0), QuadratureSpec(n_nodes=65), 0.5
        )


def test_duality_fidelity_exact_on_matched_grids():
    defect = duality_fidelity(PhysicalParams(1.0, 1.0, 1.0), 257, 12.0, 0.7)
    assert defect <= 1e-6


def test_duality_fidelity_validation():
    with pytest.raises(DomainError):
        duality_fidelity(PhysicalParams(1.0, 1.0, 0.0), 257, 12.0, 0.7)
    with pytest.raises(DomainError):
        duality_fidelity(PhysicalParams(1.0, 1.0, 1.0), 256, 12.0, 0.7)
