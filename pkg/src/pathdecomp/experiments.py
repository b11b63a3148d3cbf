"""Experiment dispatch: turn a validated RunConfig into a VerificationReport."""

from __future__ import annotations

import numpy as np

from . import crossing, momentum, oracles, pdx, projectors, restricted
from .core import Model, gaussian_packet, truncate_to_mask
from .config import RunConfig
from .errors import DomainError
from .report import Gate, Table, VerificationReport


def run_experiment(config: RunConfig) -> VerificationReport:
    try:
        runner = _RUNNERS[config.experiment]
    except KeyError:
        raise DomainError(f"no runner for experiment {config.experiment!r}")
    report = VerificationReport(config.experiment, config.effective)
    try:
        runner(config, report)
    except Exception as exc:
        raise type(exc)(f"[experiment {config.experiment}] {exc}") from exc
    report.finish()
    return report


def _build_model(config: RunConfig) -> Model:
    return Model.build(config.grid, config.params, config.potential)


def _boundary_amplitude_warning(report: VerificationReport, model, psi):
    # Hard-wall boxes must be wide enough that packets never feel the outer
    # walls; record the edge amplitude so reports expose violations.
    edge = max(abs(psi[0]), abs(psi[-1]))
    report.scalars["boundary_amplitude_ratio"] = float(edge / np.abs(psi).max())


def _run_resolution_identity(config: RunConfig, report: VerificationReport):
    model = _build_model(config)
    p_c = projectors.position_projector(model.grid, config.region)
    t0, t1 = config.times
    slicing = pdx.SlicingSpec(t0, t1, config.n_slices)
    u_dt = model.propagator(slicing.delta_t)
    terms = pdx.resolution_of_identity(p_c, u_dt, slicing)
    defect = terms.identity_defect()
    report.scalars["identity_defect"] = defect
    report.gates.append(
        Gate.check(
            "resolution-identity-defect",
            "sum of crossing-class terms equals the identity (max-norm)",
            defect,
            config.tolerances["identity"],
        )
    )


def _pdx_common(config: RunConfig, report: VerificationReport, same_side: bool):
    model = _build_model(config)
    sm = config.smearing
    assemble = pdx.pdx_assemble_same_side if same_side else pdx.pdx_assemble_opposite
    result = assemble(
        model,
        config.region,
        sm["src_center"],
        sm["dst_center"],
        config.times,
        config.quadrature,
        sm["width"],
        sm.get("momentum", 0.0),
    )
    psi = gaussian_packet(model.grid, sm["src_center"], sm["width"],
                          sm.get("momentum", 0.0), model.params.hbar)
    _boundary_amplitude_warning(report, model, psi)
    report.scalars.update(
        {
            "lhs_abs": abs(result.lhs),
            "rhs_abs": abs(result.rhs),
            "residual": result.residual,
        }
    )
    report.gates.append(
        Gate.check(
            "pdx-residual",
            "smeared decomposition residual |lhs - rhs| / |lhs|",
            result.residual,
            config.tolerances["residual"],
        )
    )


def _run_pdx_position(config: RunConfig, report: VerificationReport):
    _pdx_common(config, report, same_side=False)


def _run_pdx_same_side(config: RunConfig, report: VerificationReport):
    _pdx_common(config, report, same_side=True)


def _run_pdx_generalized(config: RunConfig, report: VerificationReport):
    model = _build_model(config)
    sm = config.smearing
    if config.region_basis == "momentum":
        p_c = projectors.momentum_projector(model.grid)
        packets = []
        for center in (sm["src_center"], sm["src_center"] - 1.0):
            raw = gaussian_packet(model.grid, center, sm["width"],
                                  sm.get("momentum", 0.0), model.params.hbar)
            p_bar = np.eye(model.grid.n_points) - p_c.matrix
            psi = p_bar @ raw
            packets.append(psi / np.linalg.norm(psi))
    else:
        p_c = projectors.position_projector(model.grid, config.region)
        _, in_cbar = config.region.masks(model.grid)
        packets = [
            truncate_to_mask(
                model.grid,
                gaussian_packet(model.grid, center, sm["width"],
                                sm.get("momentum", 0.0), model.params.hbar),
                in_cbar,
            )
            for center in (sm["src_center"], sm["src_center"] - 1.0)
        ]
    final = gaussian_packet(model.grid, sm["dst_center"], sm["width"],
                            0.0, model.params.hbar)
    result = pdx.generalized_pdx_residual(
        model, p_c, config.times, config.quadrature, packets, final
    )
    report.scalars.update(
        {
            "max_norm_residual": result.residual,
            "matrix_element_residual": result.matrix_element_residual,
        }
    )
    report.gates.append(
        Gate.check(
            "generalized-pdx-residual",
            "operator-form decomposition, matrix-element residual",
            result.matrix_element_residual,
            config.tolerances["residual"],
        )
    )


def _run_pdx_momentum(config: RunConfig, report: VerificationReport):
    dual = momentum.dual_map(config.params, config.grid)
    sm = config.smearing
    result = momentum.momentum_pdx_residual(
        dual,
        sm["src_center"],
        sm["dst_center"],
        config.times,
        config.quadrature,
        sm["width"],
    )
    report.scalars.update(
        {
            "residual": result.residual,
            "resolved_sign": result.resolved_sign,
            "mapped_mass": dual.mapped_mass,
        }
    )
    report.gates.append(
        Gate.check(
            "momentum-pdx-residual",
            "momentum-space decomposition residual",
            result.residual,
            config.tolerances["residual"],
        )
    )
    report.gates.append(
        Gate.boolean(
            "momentum-pdx-sign",
            "resolved flux sign matches the package convention",
            result.resolved_sign == -1,
        )
    )


def _run_zeno_convergence(config: RunConfig, report: VerificationReport):
    model = _build_model(config)
    t0, t1 = config.times
    rows = restricted.zeno_convergence_study(
        model, config.region, t1 - t0, config.zeno_k
    )
    report.tables["convergence"] = Table(
        ["K", "delta_t", "frobenius_error", "empirical_order"],
        [[r["K"], r["delta_t"], r["frobenius_error"], r["empirical_order"]]
         for r in rows],
    )
    errors = [r["frobenius_error"] for r in rows]
    decreasing = all(b < a for a, b in zip(errors, errors[1:]))
    report.gates.append(
        Gate.boolean(
            "zeno-monotone",
            "projector-product error strictly decreasing in K",
            decreasing,
        )
    )
    pairs = [(r["K"], r["frobenius_error"]) for r in rows]
    for (ka, ea), (kb, eb) in zip(pairs, pairs[1:]):
        report.gates.append(
            Gate.check(
                f"zeno-ratio-K{ka}-K{kb}",
                "error(4K) <= 0.7 * error(K) per refinement step",
                eb / ea if ea > 0 else 0.0,
                0.7,
            )
        )


def _run_crossing_distribution(config: RunConfig, report: VerificationReport):
    model = _build_model(config)
    sm = config.smearing
    _, in_cbar = config.region.masks(model.grid)
    psi0 = truncate_to_mask(
        model.grid,
        gaussian_packet(model.grid, sm["src_center"], sm["width"],
                        sm.get("momentum", 0.0), model.params.hbar),
        in_cbar,
    )
    p_never = crossing.never_cross_probability(model, config.region, psi0,
                                               config.times)
    rows = []
    for t1, t2 in config.windows:
        amp = crossing.first_crossing_amplitude(
            model, config.region, psi0, config.times,
            crossing.CrossingWindow(t1, t2), config.quadrature,
        )
        p = crossing.candidate_probability(amp, model.grid)
        rows.append([t1, t2, p, p_never, p + p_never - 1.0])
    report.tables["crossing"] = Table(
        ["t1", "t2", "p_cross", "p_never", "deviation"], rows
    )
    diag = crossing.sum_rule_diagnostic(model, config.region, psi0,
                                        config.times, config.quadrature)
    report.scalars.update(
        {
            "p_cross_full": diag.p_cross,
            "p_never": diag.p_never,
            "sum_rule_deviation": diag.deviation,
        }
    )
    report.gates.append(
        Gate.check("p-never-bound", "never-crossing probability <= 1",
                   diag.p_never, 1.0 + 1e-10)
    )
    report.gates.append(
        Gate.check("p-cross-nonnegative", "candidate probability >= 0",
                   diag.p_cross, 0.0, comparator=">=")
    )


def _run_oracle_suite(config: RunConfig, report: VerificationReport):
    tol = config.tolerances["oracle"]
    # Point-to-point Euclidean decomposition over a parameter sweep.
    sweep = [
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
    rows = []
    worst = 0.0
    for x_from, wall, x_to, tau, diffusion in sweep:
        lhs, rhs, residual = oracles.euclidean_pdx_check(
            x_from, wall, x_to, tau, diffusion
        )
        worst = max(worst, residual)
        rows.append([x_from, wall, x_to, tau, diffusion, lhs, rhs, residual])
    report.tables["euclidean_pdx"] = Table(
        ["x_from", "wall", "x_to", "tau", "diffusion", "lhs", "rhs", "residual"],
        rows,
    )
    report.gates.append(
        Gate.check("euclidean-pdx-residual",
                   "point-to-point Euclidean decomposition vs closed form",
                   worst, tol)
    )
    wall_value = abs(oracles.image_restricted_kernel(0.0, -1.0, 0.7, wall=0.0,
                                                     sector=oracles.EUCLIDEAN))
    report.gates.append(
        Gate.check("image-kernel-wall-zero",
                   "image-constructed kernel vanishes at the wall",
                   wall_value, 1e-15)
    )
    taus = np.linspace(0.05, 5.0, 25)
    flux_dev = max(
        abs(
            oracles.brownian_first_passage_density(-1.0, 0.0, t, 0.5)
            - oracles.image_kernel_boundary_flux(-1.0, 0.0, t, 0.5)
        )
        / oracles.brownian_first_passage_density(-1.0, 0.0, t, 0.5)
        for t in taus
    )
    report.gates.append(
        Gate.check("first-passage-flux-identity",
                   "first-passage density equals D * wall-normal kernel gradient",
                   flux_dev, 1e-8)
    )
    # Normalization via the Gaussian substitution u = d / sqrt(4 D tau).
    total = oracles.adaptive_simpson(
        lambda u: 2.0 / np.sqrt(np.pi) * np.exp(-u * u), 0.0, 8.0, rel_tol=1e-10
    )
    report.gates.append(
        Gate.check("first-passage-normalization",
                   "first-passage density integrates to one",
                   abs(total - 1.0), 1e-6)
    )


_RUNNERS = {
    "resolution-identity": _run_resolution_identity,
    "pdx-position": _run_pdx_position,
    "pdx-same-side": _run_pdx_same_side,
    "pdx-generalized": _run_pdx_generalized,
    "pdx-momentum": _run_pdx_momentum,
    "zeno-convergence": _run_zeno_convergence,
    "crossing-distribution": _run_crossing_distribution,
    "oracle-suite": _run_oracle_suite,
}
