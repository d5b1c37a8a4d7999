"""Tests for tetra_rmatrix.intertwiner."""

import pytest

from tetra_rmatrix.intertwiner import (
    REDUCTION_PAIR,
    RMatrixBlock,
    SolveCertificate,
    _build_system,
    _Eliminator,
    _pieces,
    check_theorem,
    gauge_factor,
    gauge_transform,
    normalizations,
    solve_r,
    verify_yber,
)
from tetra_rmatrix.report import IntertwinerError
from tetra_rmatrix.ring import IMAG, Z, ZFIELD, ZU, lift_to_z
from tetra_rmatrix.uqalg import AlgebraKind, Family


# ── Helpers ───────────────────────────────────────────────────────────────────


def _same(a, b):
    return not (a - b)


def _key(*values):
    return tuple((v,) for v in values)


# ── Elimination ───────────────────────────────────────────────────────────────


class TestEliminator:
    def test_unique_solution(self):
        elim = _Eliminator()
        elim.add({0: ZFIELD.one, 1: -ZFIELD.one})
        elim.add({1: ZFIELD.one, -1: Z})
        assert elim.rank == 2
        assert _same(elim.value(0), Z)
        assert _same(elim.value(1), Z)

    def test_dependent_rows_do_not_raise_rank(self):
        elim = _Eliminator()
        elim.add({0: ZFIELD.one, 1: Z})
        elim.add({0: Z, 1: Z * Z})
        assert elim.rank == 1
        assert elim.equations == 2

    def test_rational_coefficients(self):
        elim = _Eliminator()
        elim.add({0: 1 / (1 - Z), 1: ZFIELD.one, -1: ZFIELD.one})
        elim.add({1: 1 / (1 + ZU**2 * Z), -1: Z / (1 + ZU**2 * Z)})
        assert elim.rank == 2
        assert _same(elim.value(1), Z)
        assert _same(elim.value(0), (1 - Z) ** 2)

    def test_stored_rows_are_polynomial(self):
        elim = _Eliminator()
        elim.add({0: Z / (1 - Z), 1: 1 / (1 + Z)})
        (row,) = elim.pivots.values()
        assert all(v.ring == ZFIELD.ring for v in row.values())

    def test_inconsistent(self):
        elim = _Eliminator()
        elim.add({0: ZFIELD.one})
        with pytest.raises(IntertwinerError):
            elim.add({0: ZFIELD.one, -1: ZFIELD.one})

    def test_undetermined_value(self):
        elim = _Eliminator()
        elim.add({0: ZFIELD.one, 1: ZFIELD.one})
        with pytest.raises(IntertwinerError):
            elim.value(0)


# ── solve_r ───────────────────────────────────────────────────────────────────


class TestSolveR:
    def test_vacuum_block(self, d2_n1):
        solution = solve_r(d2_n1, 0)
        assert list(solution.blocks) == [(0,)]
        assert _same(solution.entry((0,), (0,), (0,), (0,)), ZFIELD.one)

    def test_certificate(self, d2_n1):
        cert = solve_r(d2_n1, 2, normalise=False)
        assert isinstance(cert, SolveCertificate)
        assert cert.nullity == cert.normalizations == 1
        assert cert.rank == cert.unknowns - 1

    def test_d2_exchange_entry(self, d2_n1):
        solution = solve_r(d2_n1, 2)
        assert _same(solution.entry((0,), (1,), (1,), (0,)), (1 + ZU**2) / (1 + ZU**2 * Z))

    def test_entry_outside_blocks(self, d2_n1):
        solution = solve_r(d2_n1, 1)
        assert not solution.entry((2,), (0,), (1,), (1,))
        assert not solution.entry((1,), (0,), (0,), (0,))

    def test_c1_normalizations(self, c1_n1):
        solution = solve_r(c1_n1, 2)
        assert solution.certificate.normalizations == 4
        assert _same(solution.entry((1,), (1,), (1,), (1,)), (Z - ZU**4) / (1 - Z * ZU**4))
        assert _same(solution.entry((0,), (1,), (0,), (1,)), -lift_to_z(IMAG) * ZU / (1 - Z))

    def test_c1_sector_blocks_vanish(self, c1_n1):
        solution = solve_r(c1_n1, 2)
        assert not solution.entry((1,), (1,), (0,), (2,))

    def test_normalizations_by_family(self):
        assert len(normalizations(AlgebraKind("a2", 2))) == 1
        assert len(normalizations(AlgebraKind("c1", 2))) == 4

    @pytest.mark.parametrize("family", ["d2", "a2", "c1"])
    def test_unique_up_to_normalization(self, family):
        kind = AlgebraKind(family, 1)
        cert = solve_r(kind, 3, normalise=False)
        assert cert.nullity == cert.normalizations

    def test_n2_unique(self):
        cert = solve_r(AlgebraKind("d2", 2), 2, normalise=False)
        assert cert.nullity == 1

    def test_pieces_cover_system(self, c1_n1):
        columns, _, rows = _build_system(c1_n1, 2)
        stages = _pieces(columns, rows)
        degree = {col: sum(key[0]) for key, col in columns.items()}
        assert len(stages) == 3
        assert sorted(c for pieces in stages for cols, _ in pieces for c in cols) == sorted(columns.values())
        assert sum(len(piece_rows) for pieces in stages for _, piece_rows in pieces) == len(rows)
        for d, pieces in enumerate(stages):
            for cols, piece_rows in pieces:
                assert {degree[c] for c in cols} == {d}
                for row in piece_rows:
                    assert max(degree[c] for c in row) == d
                    assert all(c in cols for c in row if degree[c] == d)

    def test_mapper_receives_pieces(self, d2_n1):
        calls = []

        def recording(fn, tasks):
            tasks = list(tasks)
            calls.append(len(tasks))
            return map(fn, tasks)

        solution = solve_r(d2_n1, 2, mapper=recording)
        assert len(calls) == 3
        assert sum(calls) >= 3
        expected = solve_r(d2_n1, 2)
        for nu, block in expected.blocks.items():
            assert block.matrix.keys() == solution.blocks[nu].matrix.keys()
            for key, value in block.matrix.items():
                assert _same(solution.blocks[nu].matrix[key], value)

    def test_to_dict(self, d2_n1):
        data = solve_r(d2_n1, 1).to_dict()
        assert data["algebra"] == "d2"
        assert [block["nu"] for block in data["blocks"]] == [[0], [1]]
        assert data["blocks"][0]["entries"] == [{"a": [0], "b": [0], "i": [0], "j": [0], "value": "1"}]
        assert data["certificate"]["nullity"] == 1


# ── Gauge ─────────────────────────────────────────────────────────────────────


class TestGauge:
    def test_factor_trivial_when_degrees_match(self):
        assert _same(gauge_factor((1,), (1,)), ZFIELD.one)

    def test_factor(self):
        assert _same(gauge_factor((0,), (1,)), -lift_to_z(IMAG) * ZU)
        assert _same(gauge_factor((0,), (1,), -1), 1 / (-lift_to_z(IMAG) * ZU))

    def test_round_trip(self, d2_n1):
        blocks = solve_r(d2_n1, 2).blocks
        back = gauge_transform(gauge_transform(blocks), -1)
        for nu, block in blocks.items():
            for key, value in block.matrix.items():
                assert _same(back[nu].matrix[key], value)

    def test_vacuum_block_unchanged(self):
        block = RMatrixBlock((0,), [((0,), (0,))], {(_key(0, 0), _key(0, 0)): ZFIELD.one})
        gauged = gauge_transform({(0,): block})
        assert _same(gauged[(0,)].entry(_key(0, 0), _key(0, 0)), ZFIELD.one)


# ── Comparison with the reduction ─────────────────────────────────────────────


class TestTheorem:
    def test_pairs(self):
        assert REDUCTION_PAIR[Family.A2] == (1, 2)

    @pytest.mark.parametrize("family", ["d2", "a2", "c1"])
    def test_n1(self, family):
        report = check_theorem(AlgebraKind(family, 1), 3, 4)
        assert report.passed, report.failures[:3]
        assert report.details["entries_checked"] == report.checked

    @pytest.mark.parametrize("family", ["d2", "a2", "c1"])
    @pytest.mark.parametrize("order", [2, 5])
    def test_n1_beyond_leading_order(self, family, order):
        report = check_theorem(AlgebraKind(family, 1), 2, order)
        assert report.passed, report.failures[:3]
        assert report.details["zmax"] == order

    def test_d2_n2(self):
        report = check_theorem(AlgebraKind("d2", 2), 2, 3)
        assert report.passed, report.failures[:3]

    def test_through_mapper(self, c1_n1):
        calls = []

        def recording(fn, tasks):
            calls.append(fn)
            return map(fn, tasks)

        assert check_theorem(c1_n1, 2, 3, recording).passed
        assert calls


class TestYangBaxterR:
    def test_d2_gauged(self, d2_n1):
        assert verify_yber(d2_n1, 2, 2).passed

    def test_d2_ungauged(self, d2_n1):
        assert verify_yber(d2_n1, 2, 2, gauged=False).passed

    def test_c1_even_sector(self, c1_n1):
        report = verify_yber(c1_n1, 2, 2, sectors=(1, 1, 1))
        assert report.passed
        assert report.checked > 0


# ── Acceptance scale ──────────────────────────────────────────────────────────


@pytest.mark.slow
class TestAcceptance:
    @pytest.mark.parametrize("family", ["d2", "a2", "c1"])
    def test_n1(self, family):
        report = check_theorem(AlgebraKind(family, 1), 4, 6)
        assert report.passed, report.failures[:3]

    @pytest.mark.parametrize("order", [6, 8])
    def test_d2_n2(self, order):
        report = check_theorem(AlgebraKind("d2", 2), 3, order)
        assert report.passed, report.failures[:3]
