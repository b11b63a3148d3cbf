"""Closed-form kernel and first-passage oracles.

These are the independent ground truth for everything grid-based, so the
tests here use only analytic arguments (symmetry, limits, calculus) plus
adaptive quadrature of the closed forms themselves.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathdecomp.errors import DomainError, NumericError
from pathdecomp.oracles import (
    EUCLIDEAN,
    REAL_TIME,
    adaptive_simpson,
    brownian_first_passage_density,
    euclidean_pdx_check,
    free_kernel,
    image_kernel_boundary_flux,
    image_restricted_kernel,
    mehler_kernel,
)

# 10-configuration sweep shared with the acceptance suite:
# (x_from, wall, x_to, tau, diffusion)
EUCLIDEAN_SWEEP = [
    (-1.0, 0.0, 1.0, 1.0, 0.5),
    (-2.0, 0.0, 1.0, 1.0, 0.5),
    (-1.0, 0.0, 2.0, 1.0, 0.5),
    (-1.0, 0.5, 1.5, 1.0, 0.5),
    (-1.0, 0.0, 1.0, 0.5, 0.5),
    (-1.0, 0.0, 1.0, 2.0, 0.5),
    (-1.0, 0.0, 1.0, 1.0, 0.25),
    (-1.0, 0.0, 1.0, 1.0, 1.0),
    (-0.5, 0.0, 0.5, 0.3, 0.7),
    (-1.5, -0.5, 0.5, 1.5, 0.4),
]


def test_free_kernel_zero_displacement():
    value = free_kernel(0.3, 0.3, 0.5, EUCLIDEAN)
    assert value == pytest.approx(np.sqrt(1.0 / (2.0 * np.pi * 0.5)))


def test_free_kernel_euclidean_normalization():
    x = np.linspace(-30.0, 30.0, 20001)
    dx = x[1] - x[0]
    values = np.array([free_kernel(xi, 0.7, 0.9, EUCLIDEAN) for xi in x])
    assert abs(values.sum().real * dx - 1.0) <= 1e-8


def test_free_kernel_real_time_modulus():
    value = free_kernel(1.2, -0.3, 0.4, REAL_TIME)
    assert abs(value) == pytest.approx(np.sqrt(1.0 / (2.0 * np.pi * 0.4)))


def test_free_kernel_rejects_nonpositive_time():
    with pytest.raises(DomainError):
        free_kernel(0.0, 1.0, 0.0, EUCLIDEAN)
    with pytest.raises(DomainError):
        free_kernel(0.0, 1.0, -0.1, REAL_TIME)


def test_image_kernel_wall_zero_exact():
    assert image_restricted_kernel(0.0, -1.0, 0.7, wall=0.0,
                                   sector=EUCLIDEAN) == 0.0
    assert image_restricted_kernel(2.0, 3.0, 0.7, wall=2.0,
                                   sector=REAL_TIME) == 0.0


def test_image_kernel_symmetry():
    a = image_restricted_kernel(-0.4, -1.3, 0.6, wall=0.0, sector=EUCLIDEAN)
    b = image_restricted_kernel(-1.3, -0.4, 0.6, wall=0.0, sector=EUCLIDEAN)
    assert a == pytest.approx(b, rel=1e-14)


def test_image_kernel_rejects_opposite_sides():
    with pytest.raises(DomainError):
        image_restricted_kernel(1.0, -1.0, 0.5, wall=0.0, sector=EUCLIDEAN)


def test_mehler_small_time_approaches_free():
    t = 1e-3
    m = mehler_kernel(0.3, 0.1, t, 1.0, 1.0, 1.0)
    f = free_kernel(0.3, 0.1, t, REAL_TIME)
    assert abs(m - f) / abs(f) <= 1e-4


def test_mehler_caustic_rejected():
    with pytest.raises(DomainError) as err:
        mehler_kernel(0.1, 0.2, np.pi, 1.0, 1.0, 1.0)
    assert "3.14" in str(err.value)


def test_mehler_magnitude_periodicity():
    t = 0.7
    a = abs(mehler_kernel(0.3, 0.1, t, 1.0, 1.0, 1.0))
    b = abs(mehler_kernel(0.3, 0.1, t + 2.0 * np.pi, 1.0, 1.0, 1.0))
    assert a == pytest.approx(b, rel=1e-12)


def test_first_passage_normalization():
    # substitute u = d / sqrt(4 D tau): the density integrates to
    # (2/sqrt(pi)) * exp(-u^2) du over (0, inf), which converges fast
    total = adaptive_simpson(
        lambda u: 2.0 / np.sqrt(np.pi) * np.exp(-u * u), 0.0, 8.0,
        rel_tol=1e-10,
    )
    assert abs(total - 1.0) <= 1e-6


def test_first_passage_mode_location():
    d, diffusion = 1.3, 0.4
    tau_star = d * d / (6.0 * diffusion)
    f_star = brownian_first_passage_density(-d, 0.0, tau_star, diffusion)
    for eps in (-1e-4, 1e-4):
        assert brownian_first_passage_density(
            -d, 0.0, tau_star * (1 + eps), diffusion
        ) < f_star


def test_first_passage_rejects_nonpositive_time():
    with pytest.raises(DomainError):
        brownian_first_passage_density(-1.0, 0.0, 0.0, 0.5)


def test_flux_identity_across_times():
    taus = np.linspace(0.05, 5.0, 40)
    for tau in taus:
        f = brownian_first_passage_density(-1.0, 0.0, tau, 0.5)
        g = image_kernel_boundary_flux(-1.0, 0.0, tau, 0.5)
        assert abs(f - g) / f <= 1e-8


def test_euclidean_pdx_reference_case():
    lhs, rhs, residual = euclidean_pdx_check(-1.0, 0.0, 1.0, 1.0, 0.5)
    assert lhs > 0
    assert residual <= 1e-6


def test_euclidean_pdx_sweep():
    for config in EUCLIDEAN_SWEEP:
        _, _, residual = euclidean_pdx_check(*config)
        assert residual <= 1e-6, f"sweep config {config} residual {residual}"


def test_euclidean_pdx_reflection_symmetry():
    _, rhs_a, _ = euclidean_pdx_check(-0.8, 0.0, 0.8, 1.0, 0.5)
    _, rhs_b, _ = euclidean_pdx_check(-1.4, 0.0, 1.4, 1.0, 0.5)
    # symmetric configurations: rhs equals the (symmetric) lhs in both cases
    lhs_a, _, _ = euclidean_pdx_check(-0.8, 0.0, 0.8, 1.0, 0.5)
    assert rhs_a == pytest.approx(lhs_a, rel=1e-6)
    assert rhs_b > 0


def test_euclidean_pdx_short_time_vanishes():
    lhs, rhs, _ = euclidean_pdx_check(-1.0, 0.0, 1.0, 1e-3, 0.5)
    assert abs(lhs) <= 1e-12
    assert abs(rhs) <= 1e-12


def test_euclidean_pdx_rejects_bad_ordering():
    with pytest.raises(DomainError):
        euclidean_pdx_check(1.0, 0.0, 2.0, 1.0, 0.5)


def test_adaptive_simpson_known_integral():
    value = adaptive_simpson(np.sin, 0.0, np.pi, rel_tol=1e-10)
    assert value == pytest.approx(2.0, rel=1e-9)


def test_adaptive_simpson_reports_non_convergence():
    with pytest.raises(NumericError):
        adaptive_simpson(lambda u: np.sin(1e5 * u * u), 0.0, 10.0,
                         rel_tol=1e-12, max_nodes=1024)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(-3.0, -0.1), tau=st.floats(0.05, 3.0),
       diffusion=st.floats(0.1, 2.0))
def test_image_kernel_positive_euclidean(x, tau, diffusion):
    # same-side Euclidean restricted kernel is strictly positive off the wall
    hbar = 1.0
    mass = hbar / (2.0 * diffusion)
    value = image_restricted_kernel(x, -1.0, tau, wall=0.0, sector=EUCLIDEAN,
                                    mass=mass, hbar=hbar)
    assert value.real > 0.0
    assert abs(value.imag) == 0.0
