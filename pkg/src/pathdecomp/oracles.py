"""Closed-form kernels used as independent ground truth.

These functions never touch the grid machinery: they are scalar formulas
(free propagators, image-constructed restricted kernels, the harmonic
oscillator kernel, Brownian first-passage density) plus a small adaptive
quadrature used to verify the Euclidean decomposition point to point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError

REAL_TIME = "real_time"
EUCLIDEAN = "euclidean"

CAUSTIC_TOL = 1e-9


@dataclass(frozen=True)
class OracleParams:
    mass: float = 1.0
    hbar: float = 1.0
    omega: float = 0.0

    def __post_init__(self):
        if self.mass <= 0 or self.hbar <= 0 or self.omega < 0:
            raise DomainError("oracle parameters must be positive (omega >= 0)")

    @property
    def diffusion(self) -> float:
        return self.hbar / (2.0 * self.mass)


def free_kernel(
    x_to: float,
    x_from: float,
    t: float,
    sector: str = REAL_TIME,
    mass: float = 1.0,
    hbar: float = 1.0,
) -> complex:
    """Free-particle propagator; real in the Euclidean sector."""
    if t <= 0:
        raise DomainError(f"kernel time must be positive, got {t}")
    d2 = (x_to - x_from) ** 2
    if sector == EUCLIDEAN:
        return math.sqrt(mass / (2.0 * math.pi * hbar * t)) * math.exp(
            -mass * d2 / (2.0 * hbar * t)
        )
    if sector == REAL_TIME:
        pref = np.sqrt(mass / (2.0 * np.pi * 1j * hbar * t))
        return complex(pref * np.exp(1j * mass * d2 / (2.0 * hbar * t)))
    raise DomainError(f"unknown sector {sector!r}")


def image_restricted_kernel(
    x_to: float,
    x_from: float,
    t: float,
    wall: float,
    sector: str = REAL_TIME,
    mass: float = 1.0,
    hbar: float = 1.0,
) -> complex:
    """Dirichlet kernel on the half-line via a reflected image source."""
    if (x_to - wall) * (x_from - wall) < 0:
        raise DomainError(
            f"points {x_to} and {x_from} lie on opposite sides of the wall {wall}"
        )
    direct = free_kernel(x_to, x_from, t, sector, mass, hbar)
    image = free_kernel(x_to, 2.0 * wall - x_from, t, sector, mass, hbar)
    return direct - image


def mehler_kernel(
    x_to: float,
    x_from: float,
    t: float,
    mass: float = 1.0,
    hbar: float = 1.0,
    omega: float = 1.0,
) -> complex:
    """Harmonic oscillator propagator, valid away from caustics omega*t = k*pi."""
    if omega <= 0:
        raise DomainError(f"omega must be positive, got {omega}")
    if t <= 0:
        raise DomainError(f"kernel time must be positive, got {t}")
    s = math.sin(omega * t)
    if abs(s) < CAUSTIC_TOL:
        caustic = round(omega * t / math.pi) * math.pi / omega
        raise DomainError(f"caustic at t = {caustic}; kernel undefined there")
    pref = np.sqrt(mass * omega / (2.0 * np.pi * 1j * hbar * s))
    phase = (
        mass
        * omega
        / (2.0 * hbar * s)
        * ((x_to**2 + x_from**2) * math.cos(omega * t) - 2.0 * x_to * x_from)
    )
    return complex(pref * np.exp(1j * phase))


def brownian_first_passage_density(
    x_from: float, wall: float, tau: float, diffusion: float
) -> float:
    """First-passage time density of Brownian motion from x_from to the wall."""
    if tau <= 0:
        raise DomainError(f"tau must be positive, got {tau}")
    if diffusion <= 0:
        raise DomainError(f"diffusion must be positive, got {diffusion}")
    d = abs(wall - x_from)
    return d / math.sqrt(4.0 * math.pi * diffusion * tau**3) * math.exp(
        -(d**2) / (4.0 * diffusion * tau)
    )


def image_kernel_boundary_flux(
    x_from: float, wall: float, tau: float, diffusion: float
) -> float:
    """D * (boundary-normal derivative of the Euclidean image kernel) at the wall.

    The normal is oriented out of the restricted region, the convention
    under which the flux equals the (positive) first-passage density.
    Differentiated analytically; mass/hbar enter only through D.
    """
    if tau <= 0:
        raise DomainError(f"tau must be positive, got {tau}")
    d = abs(wall - x_from)
    gauss = math.exp(-(d**2) / (4.0 * diffusion * tau)) / math.sqrt(
        4.0 * math.pi * diffusion * tau
    )
    # d/dx [k(x - x0) - k(x - (2a - x0))] at x = a collapses to 2 k'(a - x0).
    return diffusion * d / (diffusion * tau) * gauss


def adaptive_simpson(
    f,
    a: float,
    b: float,
    rel_tol: float = 1e-8,
    max_nodes: int = 2**16,
) -> float:
    """Composite Simpson with interval doubling until relative convergence."""
    n = 16
    previous = None
    while n <= max_nodes:
        x = np.linspace(a, b, n + 1)
        y = np.array([f(xi) for xi in x])
        h = (b - a) / n
        estimate = h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())
        if previous is not None:
            scale = max(abs(estimate), abs(previous), 1e-300)
            if abs(estimate - previous) <= rel_tol * scale:
                return estimate
        previous = estimate
        n *= 2
    raise NumericError(
        f"adaptive Simpson did not converge to rel_tol={rel_tol} "
        f"within {max_nodes} nodes"
    )


def euclidean_pdx_check(
    x_from: float,
    wall: float,
    x_to: float,
    tau_total: float,
    diffusion: float = 0.5,
    rel_tol: float = 1e-8,
) -> tuple[float, float, float]:
    """Point-to-point first-passage decomposition of the Euclidean kernel.

    lhs: free kernel across the wall.  rhs: first-passage density at the
    wall convolved with free propagation from the wall to the endpoint.
    Returns (lhs, rhs, relative residual).
    """
    if not x_from < wall < x_to:
        raise DomainError("expected x_from < wall < x_to")
    if tau_total <= 0:
        raise DomainError(f"tau_total must be positive, got {tau_total}")
    mass_over_hbar = 1.0 / (2.0 * diffusion)  # with hbar = 1
    lhs = free_kernel(x_to, x_from, tau_total, EUCLIDEAN, mass=mass_over_hbar)

    def integrand(tau_sigma: float) -> float:
        if tau_sigma <= 0.0 or tau_sigma >= tau_total:
            return 0.0
        return brownian_first_passage_density(
            x_from, wall, tau_sigma, diffusion
        ) * free_kernel(x_to, wall, tau_total - tau_sigma, EUCLIDEAN, mass=mass_over_hbar)

    rhs = adaptive_simpson(integrand, 0.0, tau_total, rel_tol=rel_tol)
    # for vanishing short-time kernels fall back to the absolute difference
    scale = abs(lhs) if abs(lhs) > 0.0 else 1.0
    return lhs, rhs, abs(lhs - rhs) / scale
