"""
Tests for the deformed Hubbard model.
"""

import math

import numpy as np
import pytest
import scipy.linalg

from qdeform.acceptance import jordan_wigner_hubbard
from qdeform.deform_core import DeformationSpec
from qdeform.errors import IncompatibleStatistics, NotHermitian, SectorEmpty
from qdeform.hubbard import (
    Geometry,
    LatticeSpec,
    build_deformed_hubbard,
    c_form_hopping_element,
    diagonalize,
    hermiticity_residual,
    hopping_amplitude_table,
    literal_hopping_element,
    sector_dimension,
    sector_states,
    sectors,
    site_occupation,
    spectrum_all_sectors,
)


@pytest.mark.parametrize("sites", [2, 3])
@pytest.mark.parametrize("geometry", [Geometry.OPEN, Geometry.RING])
def test_undeformed_matches_jordan_wigner_oracle(sites, geometry):
    spec = LatticeSpec.with_q(sites, 1.0, t=1.0, U=2.5, geometry=geometry)
    ours = diagonalize(build_deformed_hubbard(spec)).eigenvalues
    oracle = scipy.linalg.eigvalsh(jordan_wigner_hubbard(sites, 1.0, 2.5, geometry))
    np.testing.assert_allclose(ours, oracle, atol=1e-10)


@pytest.mark.parametrize("q", [1.0, 2.5])
def test_spectrum_independent_of_orbital_ordering(q):
    site_major = scipy.linalg.eigvalsh(jordan_wigner_hubbard(2, 1.0, 3.0, q=q))
    spin_major = scipy.linalg.eigvalsh(jordan_wigner_hubbard(2, 1.0, 3.0, q=q, ordering="spin-major"))
    ours = diagonalize(build_deformed_hubbard(LatticeSpec.with_q(2, q, t=1.0, U=3.0))).eigenvalues
    np.testing.assert_allclose(spin_major, site_major, atol=1e-10)
    np.testing.assert_allclose(ours, spin_major, atol=1e-10)


def test_unknown_orbital_ordering():
    with pytest.raises(ValueError):
        jordan_wigner_hubbard(2, 1.0, 3.0, ordering="diagonal")


def test_per_site_U_matches_oracle():
    U = (1.0, 3.0, -0.5)
    spec = LatticeSpec.with_q(3, 1.0, t=0.7, U=U)
    ours = diagonalize(build_deformed_hubbard(spec)).eigenvalues
    oracle = scipy.linalg.eigvalsh(jordan_wigner_hubbard(3, 0.7, U))
    np.testing.assert_allclose(ours, oracle, atol=1e-10)


@pytest.mark.parametrize("U", [0.0, 1.0, 4.0, 10.0])
def test_two_site_half_filling_ground_energy(U):
    spec = LatticeSpec.with_q(2, 1.0, t=1.0, U=U)
    ground = diagonalize(build_deformed_hubbard(spec, (1, 1))).ground_energy
    assert ground == pytest.approx(-math.sqrt(U * U / 4.0 + 4.0), abs=1e-10)


@pytest.mark.parametrize("q", [1.5, 2.0, 4.0])
@pytest.mark.parametrize("U", [0.0, 2.0, 5.0])
def test_two_site_deformed_ground_energy(q, U):
    spec = LatticeSpec.with_q(2, q, t=0.8, U=U)
    ground = diagonalize(build_deformed_hubbard(spec, (1, 1))).ground_energy
    assert ground == pytest.approx(-math.sqrt(U * U / 4.0 + 4.0 * 0.8**2 * q), abs=1e-10)


@pytest.mark.parametrize("q", [1.0, 1.5, 4.0])
def test_hermiticity(q):
    for geometry in (Geometry.OPEN, Geometry.RING):
        H = build_deformed_hubbard(LatticeSpec.with_q(3, q, t=1.0, U=2.0, geometry=geometry))
        assert hermiticity_residual(H.matrix) < 1e-12


@pytest.mark.parametrize("q", [1.5, 4.0])
def test_single_electron_spectrum_q_independent(q):
    reference = diagonalize(build_deformed_hubbard(LatticeSpec.with_q(3, 1.0, U=2.0, geometry="ring"), (0, 1))).eigenvalues
    deformed = diagonalize(build_deformed_hubbard(LatticeSpec.with_q(3, q, U=2.0, geometry="ring"), (0, 1))).eigenvalues
    np.testing.assert_allclose(deformed, reference, atol=1e-12)


def test_deformation_changes_many_body_spectrum():
    undeformed = spectrum_all_sectors(LatticeSpec.with_q(2, 1.0, U=1.0)).eigenvalues
    deformed = spectrum_all_sectors(LatticeSpec.with_q(2, 4.0, U=1.0)).eigenvalues
    assert np.max(np.abs(undeformed - deformed)) > 1e-3


def test_literal_and_c_form_elements_agree():
    spec = LatticeSpec.with_q(3, 2.5, U=1.0, geometry="ring")
    for state in sector_states(3, None):
        for x, y in spec.ordered_bonds:
            for spin in (0, 1):
                assert c_form_hopping_element(spec, int(state), x, y, spin) == literal_hopping_element(spec, int(state), x, y, spin)


def test_sectors_and_dimensions():
    assert len(sectors(3)) == 16
    assert sector_dimension(3, (1, 2)) == 9
    assert sector_dimension(3, (4, 0)) == 0
    assert len(sector_states(3, (1, 2))) == 9
    total = sum(sector_dimension(3, s) for s in sectors(3))
    assert total == 4**3
    with pytest.raises(SectorEmpty):
        build_deformed_hubbard(LatticeSpec.with_q(2, 1.0), (3, 0))


def test_sector_spectra_cover_full_space():
    spec = LatticeSpec.with_q(3, 2.0, U=1.5)
    merged = spectrum_all_sectors(spec, workers=2)
    full = diagonalize(build_deformed_hubbard(spec)).eigenvalues
    np.testing.assert_allclose(merged.eigenvalues, full, atol=1e-10)
    assert "# n_up n_dn eigenvalue" in merged.to_columns()


def test_two_site_ring_keeps_single_bond():
    spec = LatticeSpec.with_q(2, 1.0, geometry="ring")
    assert spec.bonds == [(0, 1)]


def test_hopping_table():
    q = 4.0
    table = hopping_amplitude_table(LatticeSpec.with_q(2, q, t=2.0))
    f_bar = np.array([q**-0.5, 1.0, q**0.5])
    np.testing.assert_allclose(table, 2.0 * np.outer(f_bar, f_bar))
    np.testing.assert_array_equal(table, table.T)
    # single-electron hop: empty destination after = 1, source before = 1
    assert table[1, 1] == pytest.approx(2.0)


def test_hopping_table_matches_hamiltonian_elements():
    spec = LatticeSpec.with_q(2, 4.0, t=2.0, U=1.0)
    table = hopping_amplitude_table(spec)
    H = build_deformed_hubbard(spec)
    matrix = H.matrix.toarray()
    index = {int(s): i for i, s in enumerate(H.basis)}
    checked = 0
    for state in index:
        for x, y in spec.ordered_bonds:
            for spin in (0, 1):
                src, dst = 2 * y + spin, 2 * x + spin
                if not (state >> src) & 1 or (state >> dst) & 1:
                    continue
                new = state ^ (1 << src) ^ (1 << dst)
                element = matrix[index[new], index[state]]
                expected = table[site_occupation(new, x), site_occupation(state, y)]
                assert abs(element) == pytest.approx(expected, rel=1e-12)
                assert element == pytest.approx(matrix[index[state], index[new]], rel=1e-12)
                checked += 1
    assert checked == 16


def test_lattice_validation():
    with pytest.raises(IncompatibleStatistics):
        LatticeSpec(sites=2, deformation=DeformationSpec.q_boson(0.5))
    with pytest.raises(ValueError):
        LatticeSpec.with_q(2, 0.0)
    with pytest.raises(ValueError):
        LatticeSpec(sites=3, U=(1.0, 2.0))
    with pytest.raises(ValueError):
        LatticeSpec(sites=1)


def test_diagonalize_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        diagonalize(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_ring_spectrum_invariant_under_translation():
    spectra = [
        diagonalize(build_deformed_hubbard(LatticeSpec.with_q(3, 2.0, U=U, geometry="ring"))).eigenvalues
        for U in ((1.0, 2.0, 3.0), (3.0, 1.0, 2.0), (2.0, 3.0, 1.0))
    ]
    for other in spectra[1:]:
        np.testing.assert_allclose(other, spectra[0], atol=1e-10)


def test_spectrum_continuous_as_q_approaches_one():
    reference = diagonalize(build_deformed_hubbard(LatticeSpec.with_q(2, 1.0, U=2.0), (1, 1))).eigenvalues
    deviations = [
        float(np.max(np.abs(diagonalize(build_deformed_hubbard(LatticeSpec.with_q(2, q, U=2.0), (1, 1))).eigenvalues - reference)))
        for q in (1.5, 1.1, 1.01, 1.001)
    ]
    assert all(b < a for a, b in zip(deviations, deviations[1:]))
    assert deviations[-1] < 1e-2
