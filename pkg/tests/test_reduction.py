"""Tests for tetra_rmatrix.reduction."""

import pytest

from tetra_rmatrix.reduction import (
    SMatrix,
    build_s_matrix,
    check_s21_case,
    check_ybe,
    decompose_parity,
    normalization_selector,
    s_cases,
    s_closed_n1,
    s_element,
    s_element_raw,
    s_entry_row,
    sector_name,
    verify_n1_closed,
    verify_n1_transpose,
    verify_s21,
    verify_sybe,
    verify_z1_specialisation,
    ybe_inputs,
)
from tetra_rmatrix.report import UnsupportedSelectorError
from tetra_rmatrix.ring import U, Z, ZU, ZSeries, format_series


# ── Helpers ───────────────────────────────────────────────────────────────────


def _s11(a, b, i, j, order=4):
    return s_element(1, 1, (a,), (b,), (i,), (j,), order)


def _same(a, b):
    return not (a - b)


# ── s_element ─────────────────────────────────────────────────────────────────


class TestSElement:
    def test_vacuum_is_one(self):
        assert _s11(0, 0, 0, 0) == ZSeries.constant(1, 4)

    def test_vacuum_is_one_for_every_pair(self):
        for s, t in [(1, 2), (2, 2)]:
            assert s_element(s, t, (0, 0), (0, 0), (0, 0), (0, 0), 4) == ZSeries.constant(1, 4)

    def test_conservation(self):
        assert not _s11(1, 0, 0, 0)

    def test_matches_closed_form(self):
        expected = ZSeries.from_ratqz((1 - Z) / (1 + ZU**2 * Z), 4)
        assert _s11(1, 0, 1, 0) == expected

    def test_expanded_through_requested_order(self):
        s = _s11(1, 0, 1, 0)
        assert s.order == 4
        assert format_series(s) == ["1", "-1 - q", "q + q^2", "-q^2 - q^3", "q^3 + q^4"]

    def test_raw_unsupported_pair(self):
        with pytest.raises(UnsupportedSelectorError):
            s_element_raw(3, 1, (0,), (0,), (0,), (0,), 2)

    def test_s21_has_no_normalization(self):
        with pytest.raises(UnsupportedSelectorError):
            s_element(2, 1, (0,), (0,), (0,), (0,), 2)

    def test_selector(self):
        assert normalization_selector(1, 1, (3,), (2,)) == "1,1"
        assert normalization_selector(2, 2, (1,), (0,)) == "-,+"
        assert normalization_selector(2, 2, (1, 1), (1, 0)) == "+,-"

    def test_sector_name(self):
        assert sector_name((1, -1, 1)) == "+,-,+"

    def test_entry_row_skips_zero(self):
        assert s_entry_row((1, 1, 3, ((1,), (0,), (0,), (0,)))) is None

    def test_entry_row_text(self):
        row = s_entry_row((1, 1, 2, ((0,), (0,), (0,), (0,))))
        assert row == {"a": [0], "b": [0], "i": [0], "j": [0], "series": ["1", "0", "0"]}


# ── Closed form for n = 1 ─────────────────────────────────────────────────────


class TestClosedFormN1:
    def test_diagonal(self):
        assert _same(s_closed_n1(1, 0, 1, 0), (1 - Z) / (1 + ZU**2 * Z))

    def test_exchange(self):
        assert _same(s_closed_n1(0, 1, 1, 0), (1 + ZU**2) / (1 + ZU**2 * Z))

    def test_other_diagonal(self):
        assert _same(s_closed_n1(0, 1, 0, 1), -(ZU**2) * (1 - Z) / (1 + ZU**2 * Z))

    def test_transposed(self):
        assert _same(s_closed_n1(1, 0, 0, 1), Z * (1 + ZU**2) / (1 + ZU**2 * Z))

    def test_conservation(self):
        assert not s_closed_n1(1, 1, 1, 0)

    def test_series_agree(self):
        assert verify_n1_closed(3, 4).passed

    def test_transpose_law(self):
        assert verify_n1_transpose(3, 4).passed

    def test_z_equals_one(self):
        assert verify_z1_specialisation(3).passed


# ── SMatrix ───────────────────────────────────────────────────────────────────


class TestSMatrix:
    def test_cases_cover_blocks(self):
        cases = s_cases(1, 1)
        assert ((0,), (0,), (0,), (0,)) in cases
        assert ((1,), (0,), (0,), (1,)) in cases
        assert len(cases) == 1 + 2 * 2

    def test_build(self):
        matrix = build_s_matrix(1, 1, 1, 2, 3)
        assert matrix.entry((0,), (0,), (0,), (0,)) == ZSeries.constant(1, 3)
        data = matrix.to_dict()
        assert data["zmax"] == 3
        assert data["entries"][0]["a"] == [0]

    def test_build_rejects_s21(self):
        with pytest.raises(UnsupportedSelectorError):
            build_s_matrix(2, 1, 1, 1, 2)

    def test_insert_checks_conservation(self):
        matrix = SMatrix(1, 1, 1, 2)
        with pytest.raises(ValueError):
            matrix.insert((1,), (0,), (0,), (0,), ZSeries.constant(1, 2))

    def test_insert_checks_parity(self):
        matrix = SMatrix(2, 2, 1, 2)
        with pytest.raises(ValueError):
            matrix.insert((1,), (0,), (0,), (1,), ZSeries.constant(1, 2))

    def test_parity_decomposition(self):
        parts = decompose_parity(build_s_matrix(2, 2, 1, 2, 3))
        assert set(parts) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
        total = 0
        for (ea, eb), part in parts.items():
            for a, b, i, j in part.entries:
                assert (-1) ** sum(a) == ea
                assert (-1) ** sum(b) == eb
            total += len(part.entries)
        assert total == len(build_s_matrix(2, 2, 1, 2, 3).entries)

    def test_parity_decomposition_needs_two_two(self):
        with pytest.raises(ValueError):
            decompose_parity(build_s_matrix(1, 1, 1, 1, 2))


# ── Relations between the reductions ─────────────────────────────────────────


class TestS21:
    def test_single_case(self):
        assert check_s21_case((4, ((1,), (0,), (0,), (1,)))).passed

    def test_n1(self):
        assert verify_s21(1, 2, 6).passed

    def test_n2(self):
        assert verify_s21(2, 2, 4).passed


class TestYangBaxter:
    def test_inputs(self):
        assert ybe_inputs(1, 0) == [((0,), (0,), (0,))]
        assert len(ybe_inputs(1, 1)) == 4
        assert ybe_inputs(1, 1, sectors=(1, 1, 1)) == [((0,), (0,), (0,))]

    def test_identity_matrix_satisfies_ybe(self):
        def entry(a, b, i, j):
            return ZSeries.constant(1, 2) if (a, b) == (i, j) else ZSeries.constant(0, 2)

        assert check_ybe("identity", entry, ((1,), (0,), (1,)), 2).passed

    def test_spectral_coefficients_are_compared(self):
        # weighted swap: X^{j,i}_{i,j}(z) = 1 + z on (1, 0) and 1 elsewhere
        def entry(a, b, i, j):
            if (a, b) != (j, i):
                return ZSeries.constant(0, 2)
            if (i, j) == ((1,), (0,)):
                return ZSeries.from_ratqz(1 + Z, 2)
            return ZSeries.constant(1, 2)

        lower = ((1,), (0,), (0,))
        assert check_ybe("swap", entry, lower, 0).passed
        report = check_ybe("swap", entry, lower, 1)
        assert not report.passed
        assert report.failures[0].indices == (((0,), (0,), (1,)), lower)

    @pytest.mark.parametrize("s,t", [(1, 1), (1, 2), (2, 2)])
    def test_s_satisfies_ybe(self, s, t):
        report = verify_sybe(s, t, 1, 2, 3)
        assert report.passed, report.failures[:3]


# ── Acceptance scale ──────────────────────────────────────────────────────────


@pytest.mark.slow
class TestAcceptance:
    @pytest.mark.parametrize("max_index", [4, 5])
    def test_closed_form(self, max_index):
        report = verify_n1_closed(max_index, 6)
        assert report.passed, report.failures[:3]

    def test_s21_n2(self):
        assert verify_s21(2, 3, 6).passed
