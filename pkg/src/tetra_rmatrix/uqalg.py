"""q-oscillator representations of U_q(D^(2)_{n+1}), U_q(A^(2)_{2n}) and U_q(C^(1)_n).

Generators act on F^{⊗n} truncated to a total-degree window. The spectral
parameter x is not a variable here: e_0 carries spectral weight +1 and f_0
carries -1, and two-site operators record the weight of the site holding x
as a power of z (the other site's parameter is set to 1).
"""

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from tetra_rmatrix.fock import (
    SparseOperator,
    SparseVector,
    apply,
    enumerate_basis,
    flip,
    identity,
    parity_sector,
    scale,
    tensor,
    zero_operator,
)
from tetra_rmatrix.report import Report
from tetra_rmatrix.ring import IMAG, QFIELD, U, Z, ZFIELD, kappa, lift_to_z, q_factorial, q_number


class Family(str, Enum):
    D2 = "d2"
    A2 = "a2"
    C1 = "c1"


@dataclass(frozen=True)
class AlgebraKind:
    family: Family
    n: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 1:
            raise ValueError(f"rank parameter n must be >= 1, got {self.n}")

    @property
    def label(self):
        return {
            Family.D2: f"D^(2)_{self.n + 1}",
            Family.A2: f"A^(2)_{2 * self.n}",
            Family.C1: f"C^(1)_{self.n}",
        }[self.family]

    @property
    def max_shift(self):
        """Largest change of total degree caused by one generator."""
        return 1 if self.family is Family.D2 else 2


@dataclass(frozen=True)
class CartanData:
    """Cartan matrix with q_i = u^{qi[i]}."""

    a: tuple
    qi: tuple

    def is_symmetrizable(self):
        size = len(self.qi)
        return all(self.qi[i] * self.a[i][j] == self.qi[j] * self.a[j][i] for i in range(size) for j in range(size))


_N1_CARTAN = {
    Family.D2: (((2, -2), (-2, 2)), (1, 1)),
    Family.A2: (((2, -4), (-1, 2)), (1, 4)),
    Family.C1: (((2, -2), (-2, 2)), (4, 4)),
}

# q_i labels of the end nodes (node 0, node n); middle nodes carry q.
_END_LABELS = {Family.D2: (1, 1), Family.A2: (1, 4), Family.C1: (4, 4)}


def cartan_matrix(kind):
    if kind.n == 1:
        a, qi = _N1_CARTAN[kind.family]
        return CartanData(a, qi)
    first, last = _END_LABELS[kind.family]
    qi = (first,) + (2,) * (kind.n - 1) + (last,)
    size = kind.n + 1
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            if i == j:
                row.append(2)
            elif abs(i - j) == 1:
                value = max(Fraction(qi[j], qi[i]), 1)
                if value.denominator != 1:
                    raise ValueError(f"non-integral Cartan entry a_{i}{j} = -{value}")
                row.append(-int(value))
            else:
                row.append(0)
        rows.append(tuple(row))
    data = CartanData(tuple(rows), qi)
    if not data.is_symmetrizable():
        raise ValueError(f"Cartan matrix of {kind.label} is not symmetrizable")
    return data


# ── Generator tables ─────────────────────────────────────────────────────────

_GENERATOR = re.compile(r"^(e|f|k|kinv)(\d+)$")


def parse_generator(name):
    match = _GENERATOR.match(name)
    if not match:
        raise ValueError(f"unknown generator {name!r}")
    return match.group(1), int(match.group(2))


@lru_cache(maxsize=None)
def _qn(m):
    return q_number(m)


def _shifted(m, changes):
    out = list(m)
    for pos, delta in changes:
        out[pos] += delta
    return tuple(out)


def k_eigenvalue(kind, r, m):
    """Eigenvalue of k_r on |m>."""
    n = kind.n
    if r == 0:
        if kind.family is Family.C1:
            return -(U ** (4 * m[0] + 2))
        return -IMAG * U ** (2 * m[0] + 1)
    if r < n:
        return U ** (2 * (m[r] - m[r - 1]))
    if kind.family is Family.D2:
        return IMAG * U ** (-2 * m[n - 1] - 1)
    return -(U ** (-4 * m[n - 1] - 2))


def _raising_rule(kind, r):
    n, fam = kind.n, kind.family
    if r == 0:
        step = 2 if fam is Family.C1 else 1
        return lambda m: {_shifted(m, [(0, step)]): QFIELD.one}
    if r < n:
        def rule(m):
            if m[r - 1] < 1:
                return {}
            return {_shifted(m, [(r - 1, -1), (r, 1)]): _qn(m[r - 1])}
        return rule
    if fam is Family.D2:
        def rule(m):
            if m[n - 1] < 1:
                return {}
            return {_shifted(m, [(n - 1, -1)]): IMAG * kappa() * _qn(m[n - 1])}
        return rule

    def rule(m):
        if m[n - 1] < 2:
            return {}
        return {_shifted(m, [(n - 1, -2)]): _qn(m[n - 1]) * _qn(m[n - 1] - 1) / _qn(2) ** 2}
    return rule


def _lowering_rule(kind, r):
    n, fam = kind.n, kind.family
    if r == 0:
        if fam is Family.C1:
            def rule(m):
                if m[0] < 2:
                    return {}
                return {_shifted(m, [(0, -2)]): _qn(m[0]) * _qn(m[0] - 1) / _qn(2) ** 2}
            return rule

        def rule(m):
            if m[0] < 1:
                return {}
            return {_shifted(m, [(0, -1)]): IMAG * kappa() * _qn(m[0])}
        return rule
    if r < n:
        def rule(m):
            if m[r] < 1:
                return {}
            return {_shifted(m, [(r - 1, 1), (r, -1)]): _qn(m[r])}
        return rule
    step = 1 if fam is Family.D2 else 2
    return lambda m: {_shifted(m, [(n - 1, step)]): QFIELD.one}


def generator_shift(kind, generator):
    """Change of the occupation vector caused by a generator (zero for k, kinv)."""
    letter, r = parse_generator(generator)
    n = kind.n
    shift = [0] * n
    if letter in ("k", "kinv"):
        return tuple(shift)
    sign = 1 if letter == "e" else -1
    if r == 0:
        shift[0] = 2 if kind.family is Family.C1 else 1
    elif r < n:
        shift[r - 1], shift[r] = -1, 1
    else:
        shift[n - 1] = -1 if kind.family is Family.D2 else -2
    return tuple(sign * x for x in shift)


def rep_generator(kind, generator, window):
    """The operator of ``generator`` ("e0", "f2", "k1", "kinv1", ...) on the window."""
    letter, r = parse_generator(generator)
    if r > kind.n:
        raise ValueError(f"{kind.label} has nodes 0..{kind.n}, got {generator}")
    if letter == "e":
        return SparseOperator(_raising_rule(kind, r), window, 1 if r == 0 else 0, generator)
    if letter == "f":
        return SparseOperator(_lowering_rule(kind, r), window, -1 if r == 0 else 0, generator)
    if letter == "k":
        return SparseOperator(lambda m: {m: k_eigenvalue(kind, r, m)}, window, 0, generator)
    return SparseOperator(lambda m: {m: 1 / k_eigenvalue(kind, r, m)}, window, 0, generator)


class Representation:
    """Generators of one algebra on F^{⊗n} restricted to a degree window."""

    def __init__(self, kind, window):
        self.kind = kind
        self.window = window
        self._cache = {}

    def __call__(self, generator):
        if generator not in self._cache:
            self._cache[generator] = rep_generator(self.kind, generator, self.window)
        return self._cache[generator]

    def generators(self):
        return [f"{letter}{r}" for r in range(self.kind.n + 1) for letter in ("e", "f", "k", "kinv")]

    def basis(self, max_degree):
        return [m for d in range(max_degree + 1) for m in enumerate_basis(self.kind.n, d)]


# ── Defining relations ───────────────────────────────────────────────────────


def _power(op, m, window):
    result = identity(window)
    for _ in range(m):
        result = op @ result
    return result


def _divided_power(op, m, qi, window):
    return scale(1 / q_factorial(m, qi), _power(op, m, window))


def _serre(rep, letter, i, j, a_ij, qi):
    window = rep.window
    gi, gj = rep(f"{letter}{i}"), rep(f"{letter}{j}")
    total = None
    for nu in range(1 - a_ij + 1):
        term = _divided_power(gi, 1 - a_ij - nu, qi, window) @ gj @ _divided_power(gi, nu, qi, window)
        term = term if nu % 2 == 0 else -term
        total = term if total is None else total + term
    return total


def _check_on_basis(report, label, lhs, rhs, basis):
    for m in basis:
        v = SparseVector.basis(m, QFIELD.one)
        report.check((label, m), lhs(v), rhs(v))


def verify_k_eigenvalues(kind, max_degree, table=None):
    """k_r and k_r^{-1} act diagonally and invertibly; optionally compare with ``table(r, m)``."""
    rep = Representation(kind, max_degree)
    report = Report("k-eigenvalues")
    for r in range(kind.n + 1):
        for m in rep.basis(max_degree):
            image = rep(f"k{r}")(SparseVector.basis(m, QFIELD.one))
            if set(image) != {m}:
                report.fail((f"k{r}", m), dict(image), "diagonal")
                continue
            expected = table(r, m) if table is not None else image[m]
            report.check((f"k{r}", m), image[m], expected)
    return report


def verify_parity_preservation(kind, max_degree):
    """Every generator keeps |m| mod 2 (the sector decomposition for C^(1)_n)."""
    rep = Representation(kind, max_degree + kind.max_shift)
    report = Report("parity")
    for g in rep.generators():
        for m in rep.basis(max_degree):
            moved = [image for image in rep(g)(SparseVector.basis(m, QFIELD.one)) if parity_sector(image) != parity_sector(m)]
            if moved:
                report.fail((g, m), moved, "same parity")
            else:
                report.checked += 1
    return report


def verify_relations(kind, max_degree):
    """Every defining relation on every basis vector of degree <= max_degree."""
    cartan = cartan_matrix(kind)
    a, qi = cartan.a, cartan.qi
    margin = kind.max_shift * (2 - min(min(row) for row in a))
    rep = Representation(kind, max_degree + margin)
    basis = rep.basis(max_degree)
    nodes = range(kind.n + 1)
    one = identity(rep.window)
    report = Report("relations", details={"algebra": kind.family.value, "n": kind.n, "max_degree": max_degree})

    for i in nodes:
        k, kinv = rep(f"k{i}"), rep(f"kinv{i}")
        _check_on_basis(report, f"k{i}k{i}^-1", k @ kinv, one, basis)
        _check_on_basis(report, f"k{i}^-1k{i}", kinv @ k, one, basis)
        for j in nodes:
            kj = rep(f"k{j}")
            if j > i:
                _check_on_basis(report, f"[k{i},k{j}]", k @ kj, kj @ k, basis)
            e, f = rep(f"e{j}"), rep(f"f{j}")
            _check_on_basis(report, f"k{i}e{j}k{i}^-1", k @ e @ kinv, scale(U ** (qi[i] * a[i][j]), e), basis)
            _check_on_basis(report, f"k{i}f{j}k{i}^-1", k @ f @ kinv, scale(U ** (-qi[i] * a[i][j]), f), basis)
            commutator = rep(f"e{i}") @ f - f @ rep(f"e{i}")
            if i == j:
                expected = scale(1 / (U ** qi[i] - U ** (-qi[i])), k - kinv)
            else:
                expected = zero_operator(rep.window, commutator.spectral_weight)
            _check_on_basis(report, f"[e{i},f{j}]", commutator, expected, basis)
            if i != j:
                zero = zero_operator(rep.window)
                for letter in ("e", "f"):
                    _check_on_basis(report, f"serre-{letter}{i}{j}", _serre(rep, letter, i, j, a[i][j], qi[i]), zero, basis)

    extra = [verify_k_eigenvalues(kind, max_degree)]
    if kind.family is Family.C1:
        extra.append(verify_parity_preservation(kind, max_degree))
    for sub in extra:
        report.checked += sub.checked
        report.failures.extend(sub.failures)
    return report


# ── Coproduct on two sites ───────────────────────────────────────────────────


@dataclass(frozen=True)
class TensorModule:
    """V ⊗ V' with spectral parameter x on site ``x_site`` and 1 on the other."""

    left: Representation
    right: Representation
    window: int
    x_site: int = 0

    def flipped(self):
        return TensorModule(self.right, self.left, self.window, 1 - self.x_site)


def _unit(rep):
    return identity(rep.window)


def coproduct_action(module, generator, side="delta"):
    """Δ(generator) or Δ'(generator) = P∘Δ(generator)∘P as a two-site operator over ZFIELD."""
    if side not in ("delta", "delta_prime"):
        raise ValueError(f"side must be 'delta' or 'delta_prime', got {side!r}")
    letter, r = parse_generator(generator)
    L, R = module.left, module.right
    if letter in ("k", "kinv"):
        terms = [(L(generator), R(generator))]
    elif letter == "e":
        if side == "delta":
            terms = [(_unit(L), R(generator)), (L(generator), R(f"k{r}"))]
        else:
            terms = [(L(generator), _unit(R)), (L(f"k{r}"), R(generator))]
    else:
        if side == "delta":
            terms = [(L(generator), _unit(R)), (L(f"kinv{r}"), R(generator))]
        else:
            terms = [(_unit(L), R(generator)), (L(generator), R(f"kinv{r}"))]
    total = None
    for a, b in terms:
        weight = (a, b)[module.x_site].spectral_weight
        op = tensor(a, b, module.window, Z**weight)
        total = op if total is None else total + op
    return total


def pair_basis(n, max_degree):
    """Two-site keys (m, m') with |m| + |m'| <= max_degree."""
    out = []
    for d in range(max_degree + 1):
        for flat in enumerate_basis(2 * n, d):
            out.append((flat[:n], flat[n:]))
    return out


def verify_coproduct_flip(kind, max_degree):
    """Δ'(g) = P∘Δ(g)∘P with the spectral parameters travelling with their sites."""
    window = max_degree + kind.max_shift
    rep = Representation(kind, window)
    module = TensorModule(rep, rep, window)
    swapped = module.flipped()
    report = Report("coproduct", details={"algebra": kind.family.value, "n": kind.n, "max_degree": max_degree})
    for g in rep.generators():
        lhs_op = coproduct_action(module, g, "delta_prime")
        rhs_op = coproduct_action(swapped, g, "delta")
        for key in pair_basis(kind.n, max_degree):
            v = SparseVector.basis(key, ZFIELD.one)
            report.check((g, key), lhs_op(v), flip(rhs_op(flip(v))))
    return report


# ── Recursions for w_{l,k} = |k e_{n-1}> ⊗ |(l-k) e_n> ────────────────────────


def _unit_vector(n, pos, size):
    m = [0] * n
    m[pos] = size
    return tuple(m)


def verify_w_recursions(kind, l_max):
    n = kind.n
    if n < 2:
        raise ValueError("the w recursions involve f_{n-1} and f_n and need n >= 2")
    window = l_max + 2 * kind.max_shift
    rep = Representation(kind, window)
    module = TensorModule(rep, rep, window)
    F1 = coproduct_action(module, f"f{n - 1}")
    F2 = coproduct_action(module, f"f{n}")
    qz = lift_to_z(U)

    def w(l, k):
        return SparseVector.basis((_unit_vector(n, n - 2, k), _unit_vector(n, n - 1, l - k)), ZFIELD.one)

    def qn(m):
        return lift_to_z(_qn(m))

    report = Report("w-recursions", details={"algebra": kind.family.value, "n": n, "l_max": l_max})
    if kind.family is Family.D2:
        step = F1 @ F2 - scale(qz ** (-2), F2 @ F1)
        for l in range(1, l_max + 1):
            for k in range(1, l + 1):
                rhs = step(w(l - 1, k - 1)) + F1(w(l, k - 1)) * (
                    lift_to_z(IMAG) * qz ** (2 * (l - k) + 1) / qn(l - k + 1)
                )
                report.check(("w", l, k), w(l, k), rhs)
        return report

    two_step = (
        scale(1 / qn(2), F1 @ F1 @ F2) - scale(qz ** (-2), F1 @ F2 @ F1) + scale(qz ** (-4), F2 @ F1 @ F1)
    )
    for l in range(2, l_max + 1):
        for k in range(2, l + 1):
            rhs = two_step(w(l - 2, k - 2)) + (F1 @ F1)(w(l, k - 2)) * (
                qz ** (4 * (l - k) + 2) / (qn(l - k + 1) * qn(l - k + 2))
            )
            report.check(("w", l, k), w(l, k), rhs)
    one_step = F1 @ F2 - scale(qz ** (-4), F2 @ F1)
    for l in range(3, l_max + 1):
        e_n = _unit_vector(n, n - 1, 1)
        low = SparseVector.basis((e_n, _unit_vector(n, n - 1, l - 3)), ZFIELD.one)
        high = SparseVector.basis((e_n, _unit_vector(n, n - 1, l - 1)), ZFIELD.one)
        rhs = (
            F2(w(l - 2, 1)) * (-qn(l - 1) / qn(l))
            + one_step(low) * (qz ** (-2) * qn(l - 1) / (qn(2) * qn(l)))
            + F1(high) * (qz ** (2 * (l - 1)) / qn(l))
        )
        report.check(("w", l, 1), w(l, 1), rhs)
    return report


def apply_generator(rep, generator, m):
    """Action of a generator on the basis vector |m>."""
    return apply(rep(generator), SparseVector.basis(tuple(m), QFIELD.one))
