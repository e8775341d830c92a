"""
Tests for truncated Fock-space operators and the deformed relations.
"""

import math

import numpy as np
import pytest

from qdeform.deform_core import DeformationSpec, Statistics, lepton_fit, q_bracket
from qdeform.errors import DimensionTooSmall, DomainError, IncompatibleStatistics
from qdeform.fock_algebra import (
    build_boson_modes,
    build_boson_rep,
    build_fermion_modes,
    check_bracket_relation,
    check_general_relation,
    check_jordan_schwinger,
    check_number_relations,
    check_qboson_relation,
    deform,
    deformed_spectrum,
    embed_operator,
    ladder,
    lepton_hamiltonian_spectrum,
    relation_residual_matrix,
)
from qdeform.runners import run_algebra
from tests.input.test_params_algebra import ALL_ALGEBRA_TEST_PARAMS

GH_CASES = [
    (lambda n: 1.0, lambda n: 1.0 + 0.5 * n),
    (lambda n: 0.5, lambda n: 1.0 + 0.1 * n * n),
]


def test_ladder_and_number():
    rep = build_boson_rep(6)
    a, adag, N = rep.a("a"), rep.adag("a"), rep.number("a")
    np.testing.assert_allclose(adag @ a, N, atol=1e-12)
    comm = a @ adag - adag @ a
    np.testing.assert_allclose(comm[:5, :5], np.eye(5), atol=1e-12)
    # truncation artifact on the top level
    assert comm[5, 5] == pytest.approx(-5.0)
    assert np.array_equal(np.diag(N).real, np.arange(6))


def test_boson_rep_too_small():
    with pytest.raises(DimensionTooSmall):
        build_boson_rep(1)


def test_fermion_anticommutators():
    rep = build_fermion_modes(3)
    c = rep.annihilators
    eye = np.eye(rep.dimension)
    for i in range(3):
        for j in range(3):
            anti = c[i] @ c[j].conj().T + c[j].conj().T @ c[i]
            np.testing.assert_allclose(anti, eye if i == j else 0 * eye, atol=1e-14)
            np.testing.assert_allclose(c[i] @ c[j] + c[j] @ c[i], 0 * eye, atol=1e-14)


def test_embed_operator_sparse_matches_dense():
    dims = (3, 2, 4)
    dense = embed_operator(ladder(2), 1, dims, parity_positions=(0,))
    sparse = embed_operator(ladder(2), 1, dims, parity_positions=(0,), sparse=True)
    np.testing.assert_array_equal(sparse.toarray(), dense)


@pytest.mark.parametrize("lam", [0.1, 0.5, 1.0])
def test_qboson_relation_at_d32(lam):
    rep = build_boson_rep(32)
    report = check_qboson_relation(deform(rep, DeformationSpec.q_boson(lam)), lam)
    assert report.passed
    assert report.relative_residual < 1e-10
    assert report.interior_dimension == 31


def test_qboson_negative_control():
    rep = build_boson_rep(32)
    report = check_qboson_relation(deform(rep, DeformationSpec.custom(np.ones(32))), 1.0)
    assert not report.passed
    assert report.relative_residual > 0.5


def test_qboson_relation_fails_on_top_level():
    rep = build_boson_rep(10)
    report = check_qboson_relation(deform(rep, DeformationSpec.q_boson(0.5)), 0.5, margin=0)
    assert not report.passed


@pytest.mark.parametrize("g, h", GH_CASES)
def test_general_relation_from_gh(g, h):
    d = 24
    spec = DeformationSpec.from_gh(g, h, n_max=d - 1)
    report = check_general_relation(deform(build_boson_rep(d), spec), g, h)
    assert report.relative_residual < 1e-10


def test_general_relation_with_qboson_coefficients():
    lam = 0.7
    q = math.exp(lam)
    ops = deform(build_boson_rep(16), DeformationSpec.q_boson(lam))
    assert check_general_relation(ops, lambda n: 1.0 / q, lambda n: q**n).passed


def test_relation_residual_matrix_diagonal_entries():
    lam = 0.5
    ops = deform(build_boson_rep(8), DeformationSpec.q_boson(lam))
    q = math.exp(lam)
    residual, terms, mask = relation_residual_matrix(ops, lambda n: 1.0 / q, lambda n: q**n)
    assert len(terms) == 3
    assert np.max(np.abs(np.diag(residual)[mask])) < 1e-12
    assert not mask[-1]


def test_fermion_relation():
    lam = 0.4
    q = math.exp(lam)
    rep = build_fermion_modes(1)
    ops = deform(rep, DeformationSpec.q_fermion(lam))
    # C C+ + q C+ C = q^N on a single q-fermion mode
    report = check_general_relation(ops, lambda n: q, lambda n: q**n)
    assert report.passed


def test_bracket_relation():
    for lam in (0.3, 1.2):
        ops = deform(build_boson_rep(20), DeformationSpec.q_boson(lam))
        assert check_bracket_relation(ops, lam).passed


def test_number_relations_two_modes():
    rep = build_boson_modes(2, 5)
    ops = [deform(rep, DeformationSpec.q_boson(0.6), label) for label in rep.labels]
    reports = check_number_relations(rep, ops)
    assert len(reports) == 8
    assert all(r.passed for r in reports)


def test_deform_statistics_and_domain():
    with pytest.raises(IncompatibleStatistics):
        deform(build_boson_rep(4), DeformationSpec.q_fermion(0.5))
    with pytest.raises(IncompatibleStatistics):
        deform(build_fermion_modes(1), DeformationSpec.q_boson(0.5))
    with pytest.raises(DomainError):
        deform(build_boson_rep(6), DeformationSpec.custom([1.0, 1.0, 1.0]))


def test_undeformed_reduction():
    rep = build_boson_rep(10)
    ops = deform(rep, DeformationSpec.q_boson(0.0))
    np.testing.assert_allclose(ops.A, rep.a("a"), atol=1e-15)


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.5])
def test_deformed_spectrum_is_q_bracket(lam):
    result = deformed_spectrum(DeformationSpec.q_boson(lam), n_max=10)
    assert result.passed
    np.testing.assert_allclose(result.closed_form, q_bracket(np.arange(11), lam))
    assert np.all(np.diff(result.level_spacings) >= -1e-12)


def test_deformed_spectrum_short_table():
    spec = DeformationSpec.custom([1.0, 1.0, 2.0, 3.0])
    result = deformed_spectrum(spec, n_max=3)
    np.testing.assert_allclose(result.closed_form, [0.0, 1.0, 4.0, 9.0])
    with pytest.raises(DomainError):
        deformed_spectrum(spec, n_max=4)


def test_jordan_schwinger_boson():
    reports = check_jordan_schwinger(Statistics.BOSON, DeformationSpec.q_boson(0.5), d=12, margin=2)
    assert len(reports) == 3
    assert all(r.relative_residual < 1e-10 for r in reports)


def test_jordan_schwinger_fermion():
    reports = check_jordan_schwinger(Statistics.FERMION, DeformationSpec.q_fermion(0.5))
    assert all(r.max_abs_residual < 1e-13 for r in reports)
    assert all(r.interior_dimension == 4 for r in reports)


def test_jordan_schwinger_needs_q_kind():
    with pytest.raises(ValueError):
        check_jordan_schwinger(Statistics.BOSON, DeformationSpec.custom([1.0] * 12))


def test_lepton_hamiltonian_spectrum():
    fit = lepton_fit()
    levels = lepton_hamiltonian_spectrum(fit, n_max=3)
    np.testing.assert_allclose(levels, fit.masses, rtol=1e-10)


@pytest.mark.parametrize("params", [p for p in ALL_ALGEBRA_TEST_PARAMS if p["tool_name"] == "check_algebra"])
def test_run_algebra(params):
    kwargs = {k: v for k, v in params.items() if not k.startswith("_") and k != "tool_name"}
    output = run_algebra(**kwargs)
    assert all(c["passed"] for c in output.checks) is params["_expect_passed"]


def test_spectrum_symmetric_under_q_inversion():
    forward = deformed_spectrum(DeformationSpec.q_boson(0.8), n_max=12)
    inverse = deformed_spectrum(DeformationSpec.q_boson(-0.8), n_max=12)
    np.testing.assert_allclose(inverse.closed_form, forward.closed_form, rtol=1e-12)
    assert inverse.passed
