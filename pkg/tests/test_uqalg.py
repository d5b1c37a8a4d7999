"""Tests for tetra_rmatrix.uqalg."""

import pytest

from tetra_rmatrix.fock import SparseVector
from tetra_rmatrix.report import WindowOverflowError
from tetra_rmatrix.ring import IMAG, QFIELD, U, Z, ZFIELD, kappa, lift_to_z
from tetra_rmatrix.uqalg import (
    AlgebraKind,
    Family,
    Representation,
    TensorModule,
    apply_generator,
    cartan_matrix,
    coproduct_action,
    generator_shift,
    k_eigenvalue,
    pair_basis,
    parse_generator,
    rep_generator,
    verify_coproduct_flip,
    verify_k_eigenvalues,
    verify_parity_preservation,
    verify_relations,
    verify_w_recursions,
)


# ── Helpers ───────────────────────────────────────────────────────────────────


def _ket(*m):
    return SparseVector.basis(tuple(m), QFIELD.one)


def _pair(m, m2):
    return SparseVector.basis((tuple(m), tuple(m2)), ZFIELD.one)


# ── AlgebraKind and Cartan data ───────────────────────────────────────────────


class TestAlgebraKind:
    def test_family_coerced(self):
        assert AlgebraKind("c1", 2).family is Family.C1

    def test_labels(self):
        assert AlgebraKind("d2", 2).label == "D^(2)_3"
        assert AlgebraKind("a2", 2).label == "A^(2)_4"
        assert AlgebraKind("c1", 2).label == "C^(1)_2"

    def test_rank_must_be_positive(self):
        with pytest.raises(ValueError):
            AlgebraKind("d2", 0)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            AlgebraKind("b1", 1)


class TestCartanMatrix:
    def test_a2_end_node(self):
        a = cartan_matrix(AlgebraKind("a2", 2)).a
        assert (a[0][1], a[1][0]) == (-2, -1)

    def test_c1_end_node(self):
        a = cartan_matrix(AlgebraKind("c1", 2)).a
        assert (a[0][1], a[1][0]) == (-1, -2)

    def test_d2_middle_nodes(self):
        a = cartan_matrix(AlgebraKind("d2", 3)).a
        assert a[1][2] == a[2][1] == -1
        assert a[0][3] == 0

    def test_n1_hard_coded(self):
        assert cartan_matrix(AlgebraKind("d2", 1)).a == ((2, -2), (-2, 2))
        assert cartan_matrix(AlgebraKind("a2", 1)).a == ((2, -4), (-1, 2))
        assert cartan_matrix(AlgebraKind("c1", 1)).qi == (4, 4)

    @pytest.mark.parametrize("family", ["d2", "a2", "c1"])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_symmetrizable(self, family, n):
        data = cartan_matrix(AlgebraKind(family, n))
        assert data.is_symmetrizable()
        assert all(data.a[i][i] == 2 for i in range(n + 1))


# ── Generators ────────────────────────────────────────────────────────────────


class TestGenerators:
    def test_parse(self):
        assert parse_generator("kinv3") == ("kinv", 3)
        with pytest.raises(ValueError):
            parse_generator("h1")

    def test_node_out_of_range(self, d2_n1):
        with pytest.raises(ValueError):
            rep_generator(d2_n1, "e2", 3)

    def test_d2_k0_on_vacuum(self, d2_n1):
        assert not (k_eigenvalue(d2_n1, 0, (0,)) + IMAG * U)

    def test_d2_f0(self, d2_n1):
        v = apply_generator(Representation(d2_n1, 3), "f0", (2,))
        assert v == SparseVector.basis((1,), IMAG * kappa() * (U**2 + U**-2))

    def test_d2_f0_kills_vacuum(self, d2_n1):
        assert not apply_generator(Representation(d2_n1, 3), "f0", (0,))

    def test_a2_fn_raises_by_two(self):
        kind = AlgebraKind("a2", 2)
        assert apply_generator(Representation(kind, 4), "f2", (1, 0)) == _ket(1, 2)

    def test_a2_en_needs_two_quanta(self):
        kind = AlgebraKind("a2", 2)
        assert not apply_generator(Representation(kind, 4), "e2", (0, 1))

    def test_c1_e0(self, c1_n1):
        op = rep_generator(c1_n1, "e0", 4)
        assert op.spectral_weight == 1
        assert op(_ket(1)) == _ket(3)

    def test_spectral_weights(self, d2_n1):
        rep = Representation(d2_n1, 3)
        assert rep("f0").spectral_weight == -1
        assert rep("e1").spectral_weight == 0

    def test_middle_generator(self):
        rep = Representation(AlgebraKind("d2", 2), 3)
        assert rep("e1")(_ket(2, 0)) == SparseVector.basis((1, 1), U**2 + U**-2)
        assert not rep("e1")(_ket(0, 2))

    def test_window_overflow(self, d2_n1):
        with pytest.raises(WindowOverflowError):
            apply_generator(Representation(d2_n1, 2), "e0", (2,))

    def test_generator_shift(self):
        kind = AlgebraKind("c1", 2)
        assert generator_shift(kind, "e0") == (2, 0)
        assert generator_shift(kind, "f1") == (1, -1)
        assert generator_shift(kind, "e2") == (0, -2)
        assert generator_shift(kind, "k1") == (0, 0)


# ── Defining relations ────────────────────────────────────────────────────────


class TestRelations:
    def test_e0_f0_commutator_on_vacuum(self, d2_n1):
        rep = Representation(d2_n1, 3)
        op = rep("e0") @ rep("f0") - rep("f0") @ rep("e0")
        assert op(_ket(0)) == SparseVector.basis((0,), -IMAG * kappa())

    @pytest.mark.parametrize("family", ["d2", "a2", "c1"])
    def test_n1(self, family):
        report = verify_relations(AlgebraKind(family, 1), 3)
        assert report.passed, report.failures[:3]
        assert report.checked > 0

    @pytest.mark.parametrize("family", ["d2", "a2", "c1"])
    def test_n2(self, family):
        report = verify_relations(AlgebraKind(family, 2), 2)
        assert report.passed, report.failures[:3]

    def test_k_eigenvalue_table(self, d2_n1):
        def table(r, m):
            if r == 0:
                return -IMAG * U ** (2 * m[0] + 1)
            return IMAG * U ** (-2 * m[0] - 1)

        assert verify_k_eigenvalues(d2_n1, 6, table).passed

    def test_k_eigenvalue_table_mismatch(self, d2_n1):
        assert not verify_k_eigenvalues(d2_n1, 2, lambda r, m: QFIELD.one).passed

    def test_c1_preserves_parity(self):
        assert verify_parity_preservation(AlgebraKind("c1", 2), 4).passed

    def test_d2_mixes_parity(self, d2_n1):
        assert not verify_parity_preservation(d2_n1, 2).passed


# ── Coproduct ─────────────────────────────────────────────────────────────────


class TestCoproduct:
    def _module(self, kind, window=3):
        rep = Representation(kind, window)
        return TensorModule(rep, rep, window)

    def test_pair_basis(self):
        assert len(pair_basis(1, 2)) == 6

    def test_k_is_product(self, d2_n1):
        v = coproduct_action(self._module(d2_n1), "k0")(_pair((1,), (0,)))
        expected = lift_to_z(k_eigenvalue(d2_n1, 0, (1,)) * k_eigenvalue(d2_n1, 0, (0,)))
        assert v == SparseVector.basis(((1,), (0,)), expected)

    def test_d2_en_on_second_site(self, d2_n1):
        v = coproduct_action(self._module(d2_n1), "e1")(_pair((0,), (1,)))
        assert v == SparseVector.basis(((0,), (0,)), lift_to_z(IMAG * kappa()))

    def test_f0_carries_inverse_z_on_x_site(self, d2_n1):
        v = coproduct_action(self._module(d2_n1), "f0")(_pair((1,), (0,)))
        assert v == SparseVector.basis(((0,), (0,)), lift_to_z(IMAG * kappa()) / Z)

    def test_e0_weight(self, d2_n1):
        assert coproduct_action(self._module(d2_n1), "e0", "delta_prime").spectral_weight == 1

    def test_bad_side(self, d2_n1):
        with pytest.raises(ValueError):
            coproduct_action(self._module(d2_n1), "e0", "sideways")

    @pytest.mark.parametrize("family", ["d2", "a2", "c1"])
    def test_flip(self, family):
        assert verify_coproduct_flip(AlgebraKind(family, 1), 2).passed

    def test_flip_n2(self):
        assert verify_coproduct_flip(AlgebraKind("d2", 2), 2).passed


# ── Recursions ────────────────────────────────────────────────────────────────


class TestWRecursions:
    @pytest.mark.parametrize("family", ["d2", "a2", "c1"])
    def test_n2(self, family):
        report = verify_w_recursions(AlgebraKind(family, 2), 4)
        assert report.passed, report.failures[:3]
        assert report.checked > 0

    def test_needs_n2(self, d2_n1):
        with pytest.raises(ValueError):
            verify_w_recursions(d2_n1, 3)


# ── Acceptance scale ──────────────────────────────────────────────────────────


@pytest.mark.slow
class TestAcceptance:
    @pytest.mark.parametrize("family", ["d2", "a2", "c1"])
    def test_relations_n3(self, family):
        report = verify_relations(AlgebraKind(family, 3), 6)
        assert report.passed, report.failures[:3]

    @pytest.mark.parametrize("family", ["d2", "a2", "c1"])
    def test_w_recursions(self, family):
        report = verify_w_recursions(AlgebraKind(family, 2), 6)
        assert report.passed, report.failures[:3]
