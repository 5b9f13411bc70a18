"""Transfer-matrix recovery and the brane identification layer.

Oracle: synthetic row data built from a known integer matrix must be
recovered exactly before the fit is trusted on real period data.
"""

import numpy as np
import pytest

import localp2.cohomology as coh
import localp2.mirror_geometry as geom
import localp2.mirror_map as mm
from localp2.errors import DomainError, FitError
from localp2.specfun import PrecisionConfig

EXPECTED = ((1, 0, 0), (-1, 1, -1), (1, 1, 0))


# --- synthetic solve ----------------------------------------------------------

def _synthetic_rows(matrix, n_rows=4, seed=7):
    rng = np.random.default_rng(seed)
    imat = rng.normal(size=(n_rows, 3)) + 1j * rng.normal(size=(n_rows, 3))
    wmat = imat @ np.array(matrix, dtype=float)
    return imat.tolist(), wmat.tolist()


def test_solve_transfer_recovers_known_matrix():
    m0 = ((2, 1, 0), (1, 1, 0), (0, 3, 1))       # det 1
    irows, wrows = _synthetic_rows(m0)
    tm = mm.solve_transfer(irows, wrows)
    assert tm.entries == m0
    assert tm.pre_round_dev < 1e-12
    assert tm.residual < 1e-12
    assert tm.determinant() == 1


def test_solve_transfer_flags_non_integer():
    m = ((1.0, 0.0, 0.0), (0.0, 1.5, 0.0), (0.0, 0.0, 1.0))
    irows, wrows = _synthetic_rows(m)
    with pytest.raises(FitError):
        mm.solve_transfer(irows, wrows)


def test_solve_transfer_flags_non_unimodular():
    m = ((2, 0, 0), (0, 1, 0), (0, 0, 1))        # det 2
    irows, wrows = _synthetic_rows(m)
    with pytest.raises(FitError, match="unimodular"):
        mm.solve_transfer(irows, wrows)


def test_solve_transfer_flags_inconsistent_rows():
    # half the rows pull toward M, half toward M + 2*E00; the average is an
    # integer matrix, so only the post-rounding residual can catch it
    a = np.array(EXPECTED, dtype=float)
    b = a.copy()
    b[0, 0] += 2.0
    irows, _ = _synthetic_rows(EXPECTED, n_rows=3)
    imat = np.vstack([irows, irows])     # identical blocks balance the fit
    wmat = np.vstack([np.array(irows) @ a, np.array(irows) @ b])
    with pytest.raises(FitError, match="residual"):
        mm.solve_transfer(imat.tolist(), wmat.tolist())


def test_solve_transfer_shape_checks():
    irows, wrows = _synthetic_rows(EXPECTED, n_rows=2)
    with pytest.raises(DomainError):
        mm.solve_transfer(irows, wrows)
    with pytest.raises(DomainError):
        mm.solve_transfer([[1, 2], [3, 4], [5, 6]], [[1, 2], [3, 4], [5, 6]])


def test_transfer_matrix_helpers():
    tm = mm.TransferMatrix(EXPECTED, 0.0, 0.0)
    assert tm.determinant() == 1
    assert tm.column(0) == (1, -1, 1)
    with pytest.raises(DomainError):
        mm.TransferMatrix(((1, 0), (0, 1)), 0.0, 0.0)


# --- fit on real period data ----------------------------------------------------

def test_fit_transfer_matrix_standard_samples():
    tm = mm.fit_transfer_matrix((1e3, 2e3, 4e3))
    assert tm.entries == EXPECTED
    assert tm.determinant() == 1
    assert tm.column(0) == (1, -1, 1)
    assert tm.pre_round_dev < 1e-4
    assert tm.residual < 1e-8


def test_fit_transfer_matrix_with_complex_sample():
    tm = mm.fit_transfer_matrix((1e3, 2e3, 4e3, 1500 + 800j))
    assert tm.entries == EXPECTED
    assert tm.residual < 1e-8


def test_fit_transfer_matrix_stable_under_precision():
    loose = mm.fit_transfer_matrix((1e3, 2e3, 4e3), PrecisionConfig(target_rel_err=1e-6))
    tight = mm.fit_transfer_matrix((1e3, 2e3, 4e3), PrecisionConfig(target_rel_err=1e-10))
    assert loose.entries == tight.entries == EXPECTED


def test_fit_transfer_matrix_validation():
    with pytest.raises(DomainError):
        mm.fit_transfer_matrix((1e3, 2e3))
    with pytest.raises(DomainError):
        mm.fit_transfer_matrix((500.0, 2e3, 4e3))
    with pytest.raises(DomainError):
        mm.fit_transfer_matrix((1e3, 1e3, 2e3))


# --- brane identification ---------------------------------------------------------

def test_mirror_objects_coordinates():
    ns = mm.mirror_objects()
    assert [n.coords for n in ns] == [(0, 0, 1), (-1, 1, 2), (0, 1, 1)]
    assert all(n.basis == coh.Basis.BRANE for n in ns)
    lb = coh.basis_change(ns[1], coh.Basis.LINE_BUNDLE)
    assert lb.coords == (-1, 3, 0)


def test_hom_dimension_table():
    assert mm.hom_dimensions() == [[1, 3, 3], [-3, 1, 3], [-3, -3, 1]]


def test_ako_twist_check():
    assert mm.ako_twist_check() is True


def test_mirror_collection_matches_mirror_objects():
    ns = mm.mirror_objects()
    for mcls, n in zip(coh.mirror_collection(), ns):
        a = coh.basis_change(mcls, coh.Basis.LINE_BUNDLE).coords
        b = coh.basis_change(n, coh.Basis.LINE_BUNDLE).coords
        assert a == b


# --- central charges ----------------------------------------------------------------

def test_central_charge_report_clean():
    rows = mm.central_charge_report(1e3)
    assert [r["brane"] for r in rows] == ["point", "line_twist", "plane_O(-2)"]
    for r in rows:
        assert not r["flagged"]
        assert r["abs_dev"] <= r["tolerance"]
        assert abs(abs(r["charge_analytic"] - r["charge_periods"]) - r["abs_dev"]) < 1e-15


def test_central_charge_point_is_unity():
    rows = mm.central_charge_report(1e3)
    assert rows[0]["charge_analytic"] == 1.0 + 0j


def test_central_charge_plane_row_is_minus_second_period():
    # with the fitted matrix, the [O(-2)] charge reads off -I_1
    rows = mm.central_charge_report(1e3)
    pv = geom.periods(1e3)
    assert abs(rows[2]["charge_periods"] - (-pv.i1)) < 1e-12


def test_central_charge_report_accepts_precomputed_transfer():
    tm = mm.fit_transfer_matrix((1e3, 2e3, 4e3))
    a = mm.central_charge_report(2e3, transfer=tm)
    b = mm.central_charge_report(2e3)
    for ra, rb in zip(a, b):
        assert ra["charge_periods"] == rb["charge_periods"]


def test_central_charge_report_domain():
    with pytest.raises(DomainError):
        mm.central_charge_report(500.0)
