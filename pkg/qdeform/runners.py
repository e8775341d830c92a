"""
One runner per subcommand. Each takes plain keyword parameters (the CLI flag
destinations) and returns a RunOutput with results, checks and optional
columns text.
"""

import io
import logging
from typing import Optional, Sequence

import numpy as np

from qdeform import acceptance
from qdeform.classical_dynamics import (
    FREQUENCY_GRID_LAMBDAS,
    FREQUENCY_GRID_U0S,
    FREQUENCY_TOL,
    Integrator,
    OscState,
    TrajectoryConfig,
    frequency_check,
    frequency_scan,
    periods_config,
)
from qdeform.deform_core import (
    ELECTRON_MASS_MEV,
    MUON_MASS_MEV,
    TAU_MASS_MEV,
    DeformationSpec,
    Statistics,
    lepton_fit,
)
from qdeform.deformed_noise import (
    Convention,
    NoiseConfig,
    TestFunction,
    brownian_variance_exact,
    characteristic_functional,
    default_family,
    mc_brownian_variance,
    mc_characteristic_functional,
    mc_mean,
    mc_quadratic_form,
    sample_paths,
    small_lambda_structure,
    spectral_quadratic_form,
)
from qdeform.fock_algebra import (
    build_boson_rep,
    check_bracket_relation,
    check_general_relation,
    check_jordan_schwinger,
    check_number_relations,
    check_qboson_relation,
    deform,
    deformed_spectrum,
    lepton_hamiltonian_spectrum,
)
from qdeform.hubbard import HERMITICITY_TOL, LatticeSpec, hopping_amplitude_table, spectrum_all_sectors
from qdeform.rel_field import (
    FieldConfig,
    MassSquared,
    build_field,
    check_charge_relations,
    excitation_energy,
    hamiltonian,
    verify_all_mode_pairs,
)
from qdeform.report import RunOutput, check, check_from_residual, run_with_metadata

logger = logging.getLogger(__name__)

ALGEBRA_CHECKS = ["qboson", "general", "jordan-schwinger-boson", "jordan-schwinger-fermion"]
MASS_TOL = 1e-12
LEPTON_SPECTRUM_TOL = 1e-10
MC_SIGMAS = 3.0


def run_algebra(which: str = "qboson", lam: float = 0.5, dim: int = 32, margin: int = 1, gh: str = "linear",
                force_f_identity: bool = False) -> RunOutput:
    """
    Residual reports of one operator identity on a truncated Fock space.

    `force_f_identity` replaces the deformation by f = 1 while keeping the
    q-boson relation, a control that must fail for λ != 0.
    """
    if which not in ALGEBRA_CHECKS:
        raise ValueError(f"Unknown algebra check {which!r}; expected one of {ALGEBRA_CHECKS}")
    results = {}
    if which == "qboson":
        spec = DeformationSpec.custom(np.ones(dim)) if force_f_identity else DeformationSpec.q_boson(lam)
        rep = build_boson_rep(dim, interior_margin=margin)
        ops = deform(rep, spec)
        reports = [check_qboson_relation(ops, lam)]
        if not force_f_identity:
            reports.append(check_bracket_relation(ops, lam))
            reports += check_number_relations(rep, [ops])
            spectrum = deformed_spectrum(spec, n_max=max(1, min(10, dim - 2)))
            results["spectrum"] = {"levels": spectrum.closed_form, "matrix": spectrum.matrix_eigenvalues,
                                   "spacings": spectrum.level_spacings}
    elif which == "general":
        g, h = acceptance.GH_PRESETS[gh]
        spec = DeformationSpec.from_gh(g, h, n_max=dim - 1)
        ops = deform(build_boson_rep(dim, interior_margin=margin), spec)
        reports = [check_general_relation(ops, g, h)]
        results["f_squared"] = spec.gh_table
    else:
        statistics = Statistics.BOSON if which.endswith("boson") else Statistics.FERMION
        spec = DeformationSpec.q_boson(lam) if statistics is Statistics.BOSON else DeformationSpec.q_fermion(lam)
        reports = check_jordan_schwinger(statistics, spec, d=dim, margin=margin)
    results["reports"] = [r.to_dict() for r in reports]
    return RunOutput(results=results, checks=[check_from_residual(r) for r in reports])


def run_leptons(m_e: float = ELECTRON_MASS_MEV, m_mu: float = MUON_MASS_MEV, m_tau: float = TAU_MASS_MEV,
                n_max: int = 3) -> RunOutput:
    fit = lepton_fit(m_e, m_mu, m_tau, n_max=n_max)
    matrix = lepton_hamiltonian_spectrum(fit, n_max)
    inputs = [m_e, m_mu, m_tau][: n_max + 1]
    input_dev = max(abs(fit.mass(n) - m) / m for n, m in enumerate(inputs))
    spectrum_dev = float(np.max(np.abs(matrix - np.asarray(fit.masses)) / np.asarray(fit.masses)))
    buf = io.StringIO()
    np.savetxt(buf, np.column_stack([np.arange(n_max + 1), fit.masses, matrix]), fmt=["%d", "%.10e", "%.10e"],
               header="n m_n_closed_form m_n_operator")
    return RunOutput(
        results={
            "k": fit.k,
            "lam": fit.lam,
            "q": float(np.exp(fit.lam)),
            "masses": fit.masses,
            "level_spacings": fit.level_spacings,
            "operator_spectrum": matrix,
        },
        checks=[
            check("fit reproduces input masses", input_dev < MASS_TOL, input_dev, MASS_TOL),
            check("masses strictly increasing", bool(np.all(np.diff(fit.masses) > 0))),
            check("k A+A + m_e spectrum matches closed form", spectrum_dev < LEPTON_SPECTRUM_TOL, spectrum_dev, LEPTON_SPECTRUM_TOL),
        ],
        columns=buf.getvalue(),
    )


def run_classical(lam: float = 0.5, q0: float = 2.0, p0: float = 0.0, dt: float = 1e-3, periods: float = 2.5,
                  steps: Optional[int] = None, integrator: str = "rk4", scan: bool = False,
                  lambdas: Sequence[float] = FREQUENCY_GRID_LAMBDAS, u0s: Sequence[float] = FREQUENCY_GRID_U0S) -> RunOutput:
    """Measured vs predicted frequency of one trajectory, or of a (λ, u0) grid with `scan`."""
    if scan:
        results = frequency_scan(lambdas, u0s, dt=dt, periods=periods)
        rows = [{"lam": r.lam, "u0": r.u0, "omega_measured": r.omega_measured, "omega_predicted": r.omega_predicted,
                 "relative_error": r.relative_error, "energy_drift": r.energy_drift} for r in results]
        worst = max(r.relative_error for r in results)
        buf = io.StringIO()
        np.savetxt(buf, np.array([[r["lam"], r["u0"], r["omega_measured"], r["omega_predicted"]] for r in rows]),
                   fmt="%.12e", header="lam u0 omega_measured omega_predicted")
        return RunOutput(results={"grid": rows},
                         checks=[check("frequency law on grid", worst < FREQUENCY_TOL, worst, FREQUENCY_TOL)],
                         columns=buf.getvalue())

    spec = DeformationSpec.q_boson(lam)
    start = OscState(q0, p0)
    method = Integrator(integrator)
    cfg = TrajectoryConfig(dt=dt, steps=steps, integrator=method) if steps else periods_config(spec, start, dt, periods, method)
    result, trajectory = frequency_check(spec, start, cfg)
    return RunOutput(
        results={
            "u0": result.u0,
            "omega_measured": result.omega_measured,
            "omega_predicted": result.omega_predicted,
            "relative_error": result.relative_error,
            "energy_drift": result.energy_drift,
            "steps": cfg.steps,
        },
        checks=[check("measured frequency matches amplitude law", result.relative_error < FREQUENCY_TOL,
                      result.relative_error, FREQUENCY_TOL)],
        columns=trajectory.to_columns(),
    )


def run_hubbard(sites: int = 2, q: float = 1.0, t: float = 1.0, U: float = 4.0, sector: Optional[Sequence[int]] = None,
                geometry: str = "open", workers: int = 1) -> RunOutput:
    spec = LatticeSpec.with_q(sites, q, t=t, U=U, geometry=geometry)
    wanted = None if sector is None else [tuple(int(n) for n in sector)]
    spectrum = spectrum_all_sectors(spec, wanted, workers=workers)
    return RunOutput(
        results={
            "ground_energy": spectrum.ground_energy,
            "eigenvalues": spectrum.eigenvalues,
            "sectors": [list(s) for s in spectrum.sectors],
            "hermiticity_residual": spectrum.hermiticity_residual,
            "hopping_table": hopping_amplitude_table(spec),
        },
        checks=[check("H is Hermitian", spectrum.hermiticity_residual < HERMITICITY_TOL,
                      spectrum.hermiticity_residual, HERMITICITY_TOL)],
        columns=spectrum.to_columns(),
    )


def run_hopping_table(q: float = 1.0, t: float = 1.0) -> RunOutput:
    """t f̄(n_x) f̄(n_y) over occupancies (destination after, source before)."""
    table = hopping_amplitude_table(LatticeSpec.with_q(2, q, t=t))
    asymmetry = float(np.max(np.abs(table - table.T)))
    return RunOutput(results={"table": table, "axes": ["n_x after hop", "n_y before hop"]},
                     checks=[check("table symmetric under reverse hop", asymmetry == 0.0, asymmetry)])


def _test_function(xi: str, width: float, half_width: float) -> TestFunction:
    if xi == "gaussian":
        return TestFunction.gaussian(width)
    if xi == "raised-cosine":
        return TestFunction.raised_cosine(half_width)
    raise ValueError(f"Unknown test function {xi!r}; expected gaussian or raised-cosine")


def run_noise(lam: float = 0.3, samples: int = 10_000, seed: int = 0, mode_cutoff: int = 64, xi: str = "gaussian",
              width: float = 1.0, half_width: float = 2.0, convention: str = "complex",
              time_grid: Sequence[float] = (0.0, 0.5, 1.0, 1.5, 2.0), workers: int = 1, fit: bool = False,
              paths: int = 0) -> RunOutput:
    """
    Monte Carlo statistics of the deformed noise against the spectral sums.

    Every Monte Carlo quantity reuses the same coefficient draws, so one seed
    fixes the whole report.
    """
    cfg = NoiseConfig(lam=lam, mode_cutoff=mode_cutoff, samples=samples, seed=seed, time_grid=tuple(time_grid),
                      convention=Convention(convention), workers=workers)
    test_fn = _test_function(xi, width, half_width)
    exact = spectral_quadratic_form(test_fn, lam, mode_cutoff)
    estimate = mc_quadratic_form(test_fn, cfg)
    mean, bound = mc_mean(cfg)
    variance = mc_brownian_variance(cfg)
    variance_exact = brownian_variance_exact(cfg.time_grid, lam, mode_cutoff)
    phi_exact = characteristic_functional(test_fn, lam, mode_cutoff, cfg.convention)
    phi = mc_characteristic_functional(test_fn, cfg)

    checks = [
        check("Monte Carlo quadratic form within 3 SE", estimate.within(exact, MC_SIGMAS),
              estimate.estimate, exact, standard_error=estimate.standard_error),
        check("sample mean within 4 sigma bound", bool(np.all(np.abs(mean) < bound)), float(np.max(np.abs(mean))), bound),
        check("Brownian variance within 4 SE", all(v.within(e, 4.0) for v, e in zip(variance, variance_exact))),
        check("characteristic functional within 4 SE", phi.within(phi_exact, 4.0), phi.estimate, phi_exact,
              standard_error=phi.standard_error),
    ]
    results = {
        "quadratic_form": {"exact": exact, "estimate": estimate.estimate, "standard_error": estimate.standard_error,
                           "standard_error_defined": estimate.standard_error_defined},
        "mean": {"max_abs": float(np.max(np.abs(mean))), "bound": bound},
        "brownian_variance": {"t": cfg.time_grid, "exact": variance_exact,
                              "estimate": [v.estimate for v in variance], "standard_error": [v.standard_error for v in variance]},
        "characteristic_functional": {"exact": phi_exact, "estimate": phi.estimate, "standard_error": phi.standard_error},
    }
    if fit:
        structure = small_lambda_structure(default_family(), (0.01, 0.02, 0.05, 0.1))
        results["small_lambda"] = structure
        checks.append(check("gradient coefficient scales as lambda^2", abs(structure.slope_c2 - 2.0) < 0.1,
                            structure.slope_c2, 0.1))
        checks.append(check("delta coefficient shift scales as lambda^2", abs(structure.slope_c0 - 2.0) < 0.1,
                            structure.slope_c0, 0.1))
    columns = None
    if paths:
        columns = "".join(p.to_columns() for p in sample_paths(
            NoiseConfig(lam=lam, mode_cutoff=mode_cutoff, samples=paths, seed=seed, time_grid=tuple(time_grid),
                        convention=Convention(convention))))
    return RunOutput(results=results, checks=checks, columns=columns)


def field_config(modes: Sequence[float] = (0.0,), m0: float = 1.0, mass: str = "quadratic",
                 mass_coeffs: Optional[Sequence[float]] = None, cutoff: int = 5, margin: int = 2) -> FieldConfig:
    window = (-cutoff * len(modes), cutoff * len(modes))
    mass_squared = MassSquared.polynomial(*mass_coeffs) if mass_coeffs else MassSquared.preset(mass, m0, window)
    return FieldConfig(modes=tuple(modes), m0=m0, mass_squared=mass_squared, cutoff=cutoff, interior_margin=margin)


def run_field(modes: Sequence[float] = (0.0,), m0: float = 1.0, mass: str = "quadratic",
              mass_coeffs: Optional[Sequence[float]] = None, cutoff: int = 5, margin: int = 2) -> RunOutput:
    cfg = field_config(modes, m0, mass, mass_coeffs, cutoff, margin)
    ops = build_field(cfg)
    H = hamiltonian(ops)
    reports = verify_all_mode_pairs(ops) + check_charge_relations(ops)
    vacuum = [0] * cfg.slots
    first_quanta = [excitation_energy(ops, vacuum, mode, species, H) for mode in range(len(cfg.modes)) for species in ("+", "-")]
    checks = [check("H diagonal and equal to closed form", H.passed, H.max_deviation, H.tolerance * H.scale,
                    offdiagonal_norm=H.offdiagonal_norm)]
    checks += [check_from_residual(r) for r in reports]
    return RunOutput(
        results={
            "config": cfg,
            "dimension": cfg.dimension,
            "levels": np.unique(np.round(H.closed_form, 12)),
            "single_quantum": [{"mode": i // 2, "species": "+-"[i % 2], "energy": e.closed_form, "charge": e.charge_after}
                               for i, e in enumerate(first_quanta)],
            "reports": [r.to_dict() for r in reports],
        },
        checks=checks,
        columns=H.to_columns(),
    )


def run_spectrum(kind: str = "qboson", lam: float = 0.5, n_max: int = 10) -> RunOutput:
    """Deformed spectrum n f²(n) against the eigenvalues of the A+A matrix."""
    if kind != "qboson":
        raise ValueError(f"Unknown spectrum kind {kind!r}; only qboson has an unbounded closed form")
    result = deformed_spectrum(DeformationSpec.q_boson(lam), n_max)
    return RunOutput(
        results={"levels": result.closed_form, "matrix": result.matrix_eigenvalues, "spacings": result.level_spacings},
        checks=[check("matrix spectrum matches q-bracket", result.passed, result.max_deviation, result.tolerance)],
    )


def run_verify_all() -> RunOutput:
    criteria = acceptance.run_acceptance()
    buf = io.StringIO()
    for c in criteria:
        buf.write(f"{'PASS' if c.passed else 'FAIL'}  {c.name}\n")
    return RunOutput(
        results={"criteria": criteria},
        checks=[check(c.name, c.passed) for c in criteria],
        columns=buf.getvalue(),
    )


SUPPORTED_SUBCOMMANDS = {
    "algebra": run_algebra,
    "leptons": run_leptons,
    "classical": run_classical,
    "hubbard": run_hubbard,
    "noise": run_noise,
    "field": run_field,
    "verify-all": run_verify_all,
}


def run_subcommand(name: str, parameters: dict) -> dict:
    if name not in SUPPORTED_SUBCOMMANDS:
        raise ValueError(f"Subcommand '{name}' is not supported (supported: {list(SUPPORTED_SUBCOMMANDS)})")
    return run_with_metadata(name, SUPPORTED_SUBCOMMANDS[name], parameters)
