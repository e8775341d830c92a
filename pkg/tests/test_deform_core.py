"""
Tests for the scalar deformation layer.
"""

import math

import numpy as np
import pytest

from qdeform.deform_core import (
    DeformationKind,
    DeformationSpec,
    Statistics,
    f_bar_fermion,
    f_squared_boson,
    lepton_fit,
    lepton_mass,
    q_bracket,
    recursion_residuals,
    sinh_ratio,
    solve_f_from_gh_boson,
    solve_f_from_gh_fermion,
)
from qdeform.errors import DomainError, NonPositive


@pytest.mark.parametrize("lam", [0.1, 0.5, 1.0, 2.0])
def test_q_bracket_matches_definition(lam):
    q = math.exp(lam)
    for n in range(12):
        expected = (q**n - q**-n) / (q - 1.0 / q)
        assert q_bracket(n, lam) == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_sinh_ratio_limits():
    x = np.linspace(-3.0, 3.0, 13)
    np.testing.assert_allclose(sinh_ratio(x, 0.0), x)
    np.testing.assert_allclose(sinh_ratio(-x, 0.7), -sinh_ratio(x, 0.7))
    assert sinh_ratio(2.5, 0.4) == pytest.approx(sinh_ratio(2.5, -0.4))
    assert isinstance(sinh_ratio(3, 0.5), float)


@pytest.mark.parametrize("n", range(1, 21))
def test_f_squared_continuous_at_zero_lambda(n):
    assert f_squared_boson(n, 0.0) == 1.0
    assert abs(f_squared_boson(n, 1e-6) - 1.0) < 1e-6 * n**2


def test_sinh_ratio_no_intermediate_overflow():
    # sinh(800) overflows a double, the ratio does not
    assert sinh_ratio(2.0, 400.0) == pytest.approx(math.exp(400.0), rel=1e-12)


def test_f_squared_boson():
    assert f_squared_boson(0, 1.0) == pytest.approx(1.0 / math.sinh(1.0))
    assert f_squared_boson(2, 1.0) == pytest.approx(math.cosh(1.0))
    np.testing.assert_allclose(f_squared_boson(np.arange(6), 0.0), np.ones(6))


def test_f_bar_fermion():
    assert f_bar_fermion(1, 0.8) == pytest.approx(1.0)
    assert f_bar_fermion(2, 0.8) == pytest.approx(math.exp(0.4))
    assert f_bar_fermion(0, 0.8) == pytest.approx(math.exp(-0.4))


@pytest.mark.parametrize("lam", [0.2, 0.9])
def test_gh_solver_recovers_q_boson(lam):
    q = math.exp(lam)
    n_max = 20
    f2 = solve_f_from_gh_boson(lambda n: 1.0 / q, lambda n: q**n, n_max)
    np.testing.assert_allclose(f2[1:], f_squared_boson(np.arange(1, n_max + 1), lam), rtol=1e-12)
    residuals = recursion_residuals(f2, lambda n: 1.0 / q, lambda n: q**n)
    scale = f2[1:] * np.arange(1, n_max + 1)
    assert np.max(np.abs(residuals) / scale) < 1e-12


def test_gh_solver_undeformed():
    f2 = solve_f_from_gh_boson([1.0] * 10, [1.0] * 10, 10)
    np.testing.assert_allclose(f2, np.ones(11))


def test_gh_solver_rejects_nonpositive():
    with pytest.raises(NonPositive):
        solve_f_from_gh_boson([1.0] * 5, [-1.0] * 5, 5)
    with pytest.raises(NonPositive):
        DeformationSpec.from_gh([1.0] * 5, [1.0, -10.0, 1.0, 1.0, 1.0], 5)


def test_gh_fermion_consistency():
    assert solve_f_from_gh_fermion([1.0, 1.0], [1.0, 1.0]) == (1.0, True)
    _, consistent = solve_f_from_gh_fermion([1.0, 2.0], [1.0, 1.0])
    assert not consistent
    with pytest.raises(NonPositive):
        solve_f_from_gh_fermion([1.0, 1.0], [0.0, 1.0])


def test_deformation_spec_kinds():
    boson = DeformationSpec.q_boson(0.5)
    assert boson.statistics is Statistics.BOSON
    assert boson.q == pytest.approx(math.exp(0.5))
    assert boson.max_occupation == math.inf
    np.testing.assert_allclose(boson.spectrum(np.arange(5)), q_bracket(np.arange(5), 0.5))

    fermion = DeformationSpec.q_fermion(0.5)
    assert fermion.statistics is Statistics.FERMION
    assert fermion.f_squared(2) == pytest.approx(math.exp(0.5))

    custom = DeformationSpec.custom([1.0, 2.0, 3.0])
    assert custom.kind is DeformationKind.CUSTOM
    assert custom.max_occupation == 2
    assert custom.spectrum(2) == pytest.approx(6.0)
    with pytest.raises(DomainError):
        custom.f_squared(3)


def test_custom_table_validation():
    with pytest.raises(NonPositive):
        DeformationSpec.custom([1.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        DeformationSpec.custom([1.0])
    with pytest.raises(ValueError):
        DeformationSpec.q_boson(float("nan"))


def test_lepton_fit_reproduces_inputs():
    fit = lepton_fit(0.511, 105.658, 1776.86)
    assert fit.k == pytest.approx(105.147, rel=1e-12)
    assert fit.lam == pytest.approx(math.acosh(1776.349 / 210.294), rel=1e-12)
    assert fit.lam == pytest.approx(2.82, rel=0.02)
    assert fit.masses[1] == pytest.approx(105.658, rel=1e-12)
    assert fit.mass(2) == pytest.approx(1776.86, rel=1e-12)
    assert fit.masses[3] == pytest.approx(3.0e4, rel=0.05)


def test_lepton_levels_increase_fast():
    fit = lepton_fit(n_max=5)
    assert len(fit.masses) == 6
    spacings = np.asarray(fit.level_spacings)
    assert np.all(spacings > 0)
    assert np.all(np.diff(spacings) > 0)
    assert lepton_mass(4, fit.k, fit.lam, fit.m_e) == pytest.approx(fit.masses[4])


@pytest.mark.parametrize("masses", [(1.0, 1.0, 2.0), (0.0, 1.0, 1.5), (2.0, 1.0, 3.0)])
def test_lepton_fit_domain_errors(masses):
    with pytest.raises(DomainError):
        lepton_fit(*masses)
