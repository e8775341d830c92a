"""
The verify-all suite: every closed-form, brute-force and statistical
criterion of the toolkit, run in sequence with a pass/fail verdict each.
"""

import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from qdeform.classical_dynamics import (
    FREQUENCY_GRID_LAMBDAS,
    FREQUENCY_GRID_U0S,
    OscState,
    frequency_check,
    frequency_scan,
    periods_config,
)
from qdeform.deform_core import DeformationSpec, Statistics, lepton_fit
from qdeform.deformed_noise import (
    NoiseConfig,
    TestFunction,
    mc_quadratic_form,
    small_lambda_structure,
    default_family,
    spectral_quadratic_form,
)
from qdeform.errors import CutoffWarning
from qdeform.fock_algebra import (
    build_boson_rep,
    build_fermion_modes,
    check_general_relation,
    check_jordan_schwinger,
    check_qboson_relation,
    deform,
)
from qdeform.hubbard import Geometry, LatticeSpec, build_deformed_hubbard, diagonalize, hermiticity_residual
from qdeform.rel_field import FieldConfig, MassSquared, build_field, check_charge_relations, hamiltonian, verify_all_mode_pairs

logger = logging.getLogger(__name__)

QUOTED_K_MEV = 105.0
QUOTED_LAMBDA = 2.82
QUOTED_M3_MEV = 3.0e4
RESIDUAL_TOL = 1e-10
FERMION_JS_TOL = 1e-13
NEGATIVE_CONTROL_MIN = 0.5
CLASSICAL_TOL = 1e-4
UNDEFORMED_FREQUENCY_TOL = 1e-6
HUBBARD_TOL = 1e-10
SINGLE_ELECTRON_TOL = 1e-12
PARSEVAL_TOL = 1e-8
SLOPE_TARGET = 2.0
SLOPE_TOL = 0.1
FIELD_ENERGY_TOL = 1e-12

GH_PRESETS: dict[str, tuple[Callable[[int], float], Callable[[int], float]]] = {
    "linear": (lambda n: 1.0, lambda n: 1.0 + 0.5 * n),
    "damped": (lambda n: 0.5, lambda n: 1.0 + 0.1 * n * n),
}


@dataclass
class Criterion:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "details": self.details}


def jordan_wigner_hubbard(sites: int, t: float, U, geometry: Geometry = Geometry.OPEN, q: float = 1.0,
                          ordering: str = "site-major") -> np.ndarray:
    """
    Deformed Hubbard Hamiltonian on the full Fock space from dense
    Jordan-Wigner matrices; an oracle independent of the bit-mask builder.

    `ordering` places orbital (x, σ) at Jordan-Wigner position 2x + σ
    ("site-major") or σL + x ("spin-major"). The two bases differ by a
    fermionic reordering, so their spectra must agree.
    """
    if ordering == "site-major":
        def orbital(x, spin):
            return 2 * x + spin
    elif ordering == "spin-major":
        def orbital(x, spin):
            return spin * sites + x
    else:
        raise ValueError(f"unknown orbital ordering: {ordering}")
    rep = build_fermion_modes(2 * sites)
    c = rep.annihilators
    n = rep.numbers
    U_sites = np.full(sites, float(U)) if np.isscalar(U) else np.asarray(U, dtype=float)
    dim = rep.dimension
    eye = np.eye(dim)
    site_n = [np.real(np.diag(n[orbital(x, 0)] + n[orbital(x, 1)])) for x in range(sites)]

    def f_bar(occupation):
        return np.diag(q ** ((occupation - 1.0) / 2.0))

    H = np.zeros((dim, dim), dtype=complex)
    bonds = [(x, x + 1) for x in range(sites - 1)]
    if geometry is Geometry.RING and sites > 2:
        bonds.append((sites - 1, 0))
    for x, y in bonds:
        for a, b in ((x, y), (y, x)):
            for spin in (0, 1):
                hop = c[orbital(a, spin)].conj().T @ c[orbital(b, spin)]
                H -= t * f_bar(site_n[a]) @ f_bar(site_n[b] + 1.0) @ hop
    for x in range(sites):
        H += U_sites[x] * (n[orbital(x, 0)] - 0.5 * eye) @ (n[orbital(x, 1)] - 0.5 * eye)
    return H


def lepton_criterion() -> Criterion:
    fit = lepton_fit(n_max=3)
    m3 = fit.masses[3]
    details = {"k": fit.k, "lam": fit.lam, "m3": m3}
    passed = (
        abs(fit.k - QUOTED_K_MEV) <= 0.02 * QUOTED_K_MEV
        and abs(fit.lam - QUOTED_LAMBDA) <= 0.02 * QUOTED_LAMBDA
        and abs(m3 - QUOTED_M3_MEV) <= 0.05 * QUOTED_M3_MEV
    )
    return Criterion("lepton fit reproduces k, lambda and m3", passed, details)


def qboson_criterion() -> Criterion:
    rep = build_boson_rep(32)
    residuals = {}
    for lam in (0.1, 0.5, 1.0):
        residuals[lam] = check_qboson_relation(deform(rep, DeformationSpec.q_boson(lam)), lam).relative_residual
    control = check_qboson_relation(deform(rep, DeformationSpec.custom(np.ones(32))), 1.0).relative_residual
    passed = all(r < RESIDUAL_TOL for r in residuals.values()) and control > NEGATIVE_CONTROL_MIN
    return Criterion("q-boson relation at d=32 with negative control", passed,
                     {"residuals": residuals, "negative_control": control})


def general_criterion() -> Criterion:
    d = 24
    rep = build_boson_rep(d)
    residuals = {}
    for name, (g, h) in GH_PRESETS.items():
        ops = deform(rep, DeformationSpec.from_gh(g, h, n_max=d - 1))
        residuals[name] = check_general_relation(ops, g, h).relative_residual
    return Criterion("general f-deformation from (g, h) at d=24", all(r < RESIDUAL_TOL for r in residuals.values()),
                     {"residuals": residuals})


def jordan_schwinger_criterion() -> Criterion:
    boson = check_jordan_schwinger(Statistics.BOSON, DeformationSpec.q_boson(0.5), d=12, margin=2)
    fermion = check_jordan_schwinger(Statistics.FERMION, DeformationSpec.q_fermion(0.5))
    passed = all(r.relative_residual < RESIDUAL_TOL for r in boson) and all(r.max_abs_residual < FERMION_JS_TOL for r in fermion)
    return Criterion("SU_q(2) Jordan-Schwinger for bosons and fermions", passed, {
        "boson": {r.identity: r.relative_residual for r in boson},
        "fermion": {r.identity: r.max_abs_residual for r in fermion},
    })


def classical_criterion() -> Criterion:
    results = frequency_scan(lams=FREQUENCY_GRID_LAMBDAS, u0s=FREQUENCY_GRID_U0S, dt=1e-3)
    worst = max(r.relative_error for r in results)
    monotone = True
    for lam in FREQUENCY_GRID_LAMBDAS:
        measured = [r.omega_measured for r in results if r.lam == lam and r.u0 >= 0.0]
        monotone &= bool(np.all(np.diff(measured) > 0.0))
    spec = DeformationSpec.q_boson(1e-8)
    start = OscState.from_u(0.5)
    undeformed, _ = frequency_check(spec, start, periods_config(spec, start))
    deviation = abs(undeformed.omega_measured - 1.0)
    passed = len(results) >= 12 and worst < CLASSICAL_TOL and monotone and deviation < UNDEFORMED_FREQUENCY_TOL
    return Criterion("classical frequency law on a (lambda, u0) grid", passed,
                     {"points": len(results), "worst_relative_error": worst, "monotone_in_u0": monotone,
                      "undeformed_deviation": deviation})


def hubbard_criterion() -> Criterion:
    details = {}
    oracle_dev = 0.0
    for sites in (2, 3):
        for geometry in (Geometry.OPEN, Geometry.RING):
            spec = LatticeSpec.with_q(sites, 1.0, t=1.0, U=3.0, geometry=geometry)
            ours = diagonalize(build_deformed_hubbard(spec)).eigenvalues
            oracle = scipy.linalg.eigvalsh(jordan_wigner_hubbard(sites, 1.0, 3.0, geometry))
            oracle_dev = max(oracle_dev, float(np.max(np.abs(ours - oracle))))
    for q in (1.0, 2.0):
        spec = LatticeSpec.with_q(2, q, t=1.0, U=3.0)
        ours = diagonalize(build_deformed_hubbard(spec)).eigenvalues
        oracle = scipy.linalg.eigvalsh(jordan_wigner_hubbard(2, 1.0, 3.0, q=q, ordering="spin-major"))
        oracle_dev = max(oracle_dev, float(np.max(np.abs(ours - oracle))))
    details["oracle_deviation"] = oracle_dev

    ground_dev = 0.0
    for U in (0.0, 2.0, 4.0):
        for q in (1.0, 2.0):
            spec = LatticeSpec.with_q(2, q, t=1.0, U=U)
            ground = diagonalize(build_deformed_hubbard(spec, (1, 1))).ground_energy
            ground_dev = max(ground_dev, abs(ground + math.sqrt(U * U / 4.0 + 4.0 * q)))
    details["two_site_ground_deviation"] = ground_dev

    herm = max(
        hermiticity_residual(build_deformed_hubbard(LatticeSpec.with_q(3, q, t=1.0, U=2.0, geometry=Geometry.RING)).matrix)
        for q in (1.0, 1.5, 4.0)
    )
    details["hermiticity_residual"] = herm

    reference = diagonalize(build_deformed_hubbard(LatticeSpec.with_q(3, 1.0, t=1.0, U=2.0), (1, 0))).eigenvalues
    single_dev = max(
        float(np.max(np.abs(diagonalize(build_deformed_hubbard(LatticeSpec.with_q(3, q, t=1.0, U=2.0), (1, 0))).eigenvalues - reference)))
        for q in (1.5, 4.0)
    )
    details["single_electron_deviation"] = single_dev
    passed = oracle_dev < HUBBARD_TOL and ground_dev < HUBBARD_TOL and herm < 1e-12 and single_dev < SINGLE_ELECTRON_TOL
    return Criterion("deformed Hubbard oracles", passed, details)


def noise_criterion(seed: int = 20240611) -> Criterion:
    details = {"monte_carlo": []}
    passed = True
    for lam in (0.0, 0.15, 0.3):
        for xi in (TestFunction.gaussian(1.0), TestFunction.raised_cosine(2.0)):
            cfg = NoiseConfig(lam=lam, mode_cutoff=64, samples=10_000, seed=seed)
            exact = spectral_quadratic_form(xi, lam, cfg.mode_cutoff)
            est = mc_quadratic_form(xi, cfg)
            ok = est.within(exact, 3.0)
            passed &= ok
            details["monte_carlo"].append({"lam": lam, "xi": xi.name, "exact": exact, "estimate": est.estimate,
                                           "standard_error": est.standard_error, "passed": ok})
    with warnings.catch_warnings():
        warnings.simplefilter("error", CutoffWarning)
        parseval = max(
            abs(spectral_quadratic_form(xi, 0.0, 128) - math.pi * xi.norm_sq) / (math.pi * xi.norm_sq)
            for xi in (TestFunction.gaussian(1.0), TestFunction.raised_cosine(2.0))
        )
    fit = small_lambda_structure(default_family(), (0.01, 0.02, 0.05, 0.1))
    details.update(parseval_deviation=parseval, slope_c0=fit.slope_c0, slope_c2=fit.slope_c2,
                   sign_consistent=fit.sign_consistent)
    passed = (passed and parseval < PARSEVAL_TOL and fit.sign_consistent
              and abs(fit.slope_c2 - SLOPE_TARGET) < SLOPE_TOL and abs(fit.slope_c0 - SLOPE_TARGET) < SLOPE_TOL)
    return Criterion("deformed noise statistics", bool(passed), details)


def field_criterion() -> Criterion:
    details = {}
    passed = True
    for modes, cutoff, margin in (((0.0,), 5, 2), ((0.0, 1.0), 3, 1)):
        window = (-cutoff * len(modes), cutoff * len(modes))
        for preset in ("constant", "quadratic", "abs"):
            cfg = FieldConfig(modes=modes, m0=1.0, mass_squared=MassSquared.preset(preset, 1.0, window),
                              cutoff=cutoff, interior_margin=margin)
            ops = build_field(cfg)
            H = hamiltonian(ops)
            relations = verify_all_mode_pairs(ops) + check_charge_relations(ops)
            worst = max(r.relative_residual for r in relations)
            ok = H.passed and all(r.passed for r in relations)
            if preset == "constant":
                free = sum(k0 * (ops.number("+", i) + ops.number("-", i)) for i, k0 in enumerate(cfg.k0))
                A_dev = max(float(abs(ops.A[key] - ops.a[key]).max()) for key in ops.a)
                ok = ok and float(np.max(np.abs(H.matrix.diagonal() - free))) < FIELD_ENERGY_TOL and A_dev < FIELD_ENERGY_TOL
            passed &= ok
            details[f"{preset}/{len(modes)} modes"] = {"energy_deviation": H.max_deviation, "worst_relation": worst, "passed": ok}
    return Criterion("charge-dependent field relations and spectrum", bool(passed), details)


CRITERIA: list[Callable[[], Criterion]] = [
    lepton_criterion,
    qboson_criterion,
    general_criterion,
    jordan_schwinger_criterion,
    classical_criterion,
    hubbard_criterion,
    noise_criterion,
    field_criterion,
]


def run_acceptance(criteria=None) -> list[Criterion]:
    """Run every criterion; an exception marks that criterion failed and the suite continues."""
    out = []
    for criterion in criteria or CRITERIA:
        started = time.perf_counter()
        try:
            result = criterion()
        except Exception as e:
            logger.error("%s raised %s: %s", criterion.__name__, type(e).__name__, e)
            result = Criterion(criterion.__name__, False, {"error": f"{type(e).__name__}: {e}"})
        logger.info("%-50s %s (%.2fs)", result.name, "PASS" if result.passed else "FAIL", time.perf_counter() - started)
        out.append(result)
    return out
