"""Yang-Baxter solutions S^{s,t}(z) obtained from the 3d R by boundary reduction.

An element S^{a,b}_{i,j} with a, b, i, j in Z^n_{>=0} is a sum over c_0 of
z^{c_0} times a chain of n 3d R elements; the chain indices c_1, ..., c_n are
fixed by conservation, so the coefficient of z^{c_0} is a finite product.
Entries are kept as truncated series in z.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from tetra_rmatrix.fock import SparseVector, block_basis, enumerate_basis, parity_sector
from tetra_rmatrix.report import Report, UnsupportedSelectorError
from tetra_rmatrix.ring import (
    QFIELD,
    SERIES_RING,
    U,
    Z,
    ZFIELD,
    ZU,
    ZSeries,
    binomial_poly,
    format_series,
    infinite_pochhammer_ratio_series,
    lift_to_z,
    pochhammer_poly,
    q_pochhammer,
    specialise_z,
    to_ratq,
)
from tetra_rmatrix.threedr import XY_RING, r_element

ADMISSIBLE_PAIRS = ((1, 1), (1, 2), (2, 1), (2, 2))
SECTORS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def _sign(e):
    return "+" if e > 0 else "-"


def sector_name(sector):
    return ",".join(_sign(e) for e in sector)


def _check_pair(s, t):
    if (s, t) not in ADMISSIBLE_PAIRS:
        raise UnsupportedSelectorError(f"(s, t) = ({s}, {t}) is not one of {ADMISSIBLE_PAIRS}")


def _chain_coefficient(s, t, a, b, i, j, c0):
    """Coefficient of z^{c0} in the unnormalized element, or None when it vanishes."""
    c_prev = s * c0
    num = pochhammer_poly(s * c0)
    for r in range(len(a)):
        c_next = b[r] + c_prev - j[r]
        if c_next < 0:
            return None
        num = num * r_element(a[r], b[r], c_prev, i[r], j[r], c_next)
        if not num:
            return None
        c_prev = c_next
    if c_prev % t:
        return None
    den = pochhammer_poly(c0, s * s) * pochhammer_poly(c_prev // t, t * t)
    return to_ratq(num) / to_ratq(den)


@lru_cache(maxsize=None)
def s_element_raw(s, t, a, b, i, j, order, z_power=1):
    """S^{s,t}(z^z_power)^{a,b}_{i,j} with the normalization factor divided out."""
    _check_pair(s, t)
    if any(x + y != v + w for x, y, v, w in zip(a, b, i, j)):
        return ZSeries(SERIES_RING.zero, order)
    terms = {}
    for c0 in range(order // z_power + 1):
        value = _chain_coefficient(s, t, a, b, i, j, c0)
        if value:
            terms[(z_power * c0,)] = value
    return ZSeries(SERIES_RING.from_dict(terms), order)


def normalization_selector(s, t, i, j):
    """Name of the normalization factor applied to S^{s,t} entries with lower indices i, j."""
    if (s, t) == (1, 1):
        return "1,1"
    if (s, t) == (1, 2):
        return "1,2"
    if (s, t) == (2, 2):
        return sector_name((parity_sector(i), parity_sector(j)))
    raise UnsupportedSelectorError(f"no normalization factor is defined for (s, t) = ({s}, {t})")


@lru_cache(maxsize=None)
def s_element(s, t, a, b, i, j, order):
    """Normalized S^{s,t}(z)^{a,b}_{i,j} as a ZSeries."""
    raw = s_element_raw(s, t, a, b, i, j, order)
    if not raw:
        return raw
    return raw * infinite_pochhammer_ratio_series(normalization_selector(s, t, i, j), order)


# ── SMatrix container ────────────────────────────────────────────────────────


@dataclass
class SMatrix:
    s: int
    t: int
    n: int
    order: int
    entries: dict = field(default_factory=dict)

    def insert(self, a, b, i, j, series):
        if any(x + y != v + w for x, y, v, w in zip(a, b, i, j)):
            raise ValueError(f"entry {(a, b, i, j)} violates the conservation law")
        if not series:
            return
        if (self.s, self.t) == (2, 2) and (
            parity_sector(a) != parity_sector(i) or parity_sector(b) != parity_sector(j)
        ):
            raise ValueError(f"nonzero entry {(a, b, i, j)} violates the parity constraint")
        self.entries[(a, b, i, j)] = series

    def entry(self, a, b, i, j):
        return self.entries.get((a, b, i, j)) or ZSeries(SERIES_RING.zero, self.order)

    def to_dict(self):
        return {
            "s": self.s,
            "t": self.t,
            "n": self.n,
            "zmax": self.order,
            "entries": [
                {"a": list(a), "b": list(b), "i": list(i), "j": list(j), "series": format_series(v)}
                for (a, b, i, j), v in sorted(self.entries.items())
            ],
        }


def s_cases(n, max_degree):
    """All (a, b, i, j) with |i| + |j| <= max_degree and a + b = i + j."""
    cases = []
    for total in range(max_degree + 1):
        for flat in enumerate_basis(2 * n, total):
            i, j = flat[:n], flat[n:]
            nu = tuple(x + y for x, y in zip(i, j))
            for a, b in block_basis(nu):
                cases.append((a, b, i, j))
    return cases


def s_entry_row(case):
    """Export row for one entry; top level so worker pools can pickle it."""
    s, t, order, (a, b, i, j) = case
    series = s_element(s, t, a, b, i, j, order)
    if not series:
        return None
    return {"a": list(a), "b": list(b), "i": list(i), "j": list(j), "series": format_series(series)}


def build_s_matrix(s, t, n, max_degree, order):
    _check_pair(s, t)
    if (s, t) == (2, 1):
        raise UnsupportedSelectorError("S^{2,1} is only available unnormalized; see verify_s21")
    matrix = SMatrix(s, t, n, order)
    for a, b, i, j in s_cases(n, max_degree):
        matrix.insert(a, b, i, j, s_element(s, t, a, b, i, j, order))
    return matrix


def decompose_parity(matrix):
    """Split an S^{2,2} matrix by the parities of (|a|, |b|)."""
    if (matrix.s, matrix.t) != (2, 2):
        raise ValueError(f"parity decomposition needs (s, t) = (2, 2), got ({matrix.s}, {matrix.t})")
    parts = {sector: SMatrix(2, 2, matrix.n, matrix.order) for sector in SECTORS}
    for (a, b, i, j), series in matrix.entries.items():
        parts[(parity_sector(a), parity_sector(b))].insert(a, b, i, j, series)
    return parts


# ── Closed form for n = 1, (s, t) = (1, 1) ───────────────────────────────────


def _z_pochhammer(m, shift, negate):
    """(±z q^shift; q)_m in ZFIELD."""
    sign = -1 if negate else 1
    result = ZFIELD.one
    for k in range(m):
        result *= 1 - sign * Z * ZU ** (2 * (shift + k))
    return result


def s_closed_n1(a, b, i, j):
    """S^{1,1}(z)^{a,b}_{i,j} for n = 1 as a rational function of z."""
    if min(a, b, i, j) < 0 or a + b != i + j:
        return ZFIELD.zero
    if a > i:
        ratio = to_ratq(pochhammer_poly(i) * pochhammer_poly(j)) / to_ratq(pochhammer_poly(a) * pochhammer_poly(b))
        return Z ** (a - i) * lift_to_z(ratio) * s_closed_n1(i, j, a, b)
    prefactor = q_pochhammer(2, i - a, negate=True)
    total = ZFIELD.zero
    for lam in range(max(0, b - i), j + 1):
        mu = j - lam
        coeff = binomial_poly(j, lam) * binomial_poly(lam + i, b)
        if not coeff:
            continue
        scalar = to_ratq(coeff) * U ** (2 * (j * (1 - a) + mu * (mu - 1))) * prefactor
        term = lift_to_z(scalar) * _z_pochhammer(a + lam - mu, 0, False) / _z_pochhammer(i + lam - mu, 1, True)
        total += -term if lam % 2 else term
    return total


def _n1_cases(max_index):
    return [(a, b, i, j) for a, b, i, j in product(range(max_index + 1), repeat=4) if a + b == i + j]


def verify_n1_closed(max_index, order):
    """Series entries for n = 1 against the expansion of the closed form."""
    report = Report("n1-closed", details={"max_index": max_index, "zmax": order})
    for a, b, i, j in _n1_cases(max_index):
        closed = ZSeries.from_ratqz(s_closed_n1(a, b, i, j), order)
        report.check((a, b, i, j), s_element(1, 1, (a,), (b,), (i,), (j,), order), closed)
    return report


def verify_n1_transpose(max_index, order):
    """z^i (q^2)_a (q^2)_b S^{a,b}_{i,j} = z^a (q^2)_i (q^2)_j S^{i,j}_{a,b} for n = 1."""
    report = Report("n1-transpose", details={"max_index": max_index, "zmax": order})
    for a, b, i, j in _n1_cases(max_index):
        if (a, b) > (i, j):
            continue
        lhs = s_element(1, 1, (a,), (b,), (i,), (j,), order).shift(i) * to_ratq(pochhammer_poly(a) * pochhammer_poly(b))
        rhs = s_element(1, 1, (i,), (j,), (a,), (b,), order).shift(a) * to_ratq(pochhammer_poly(i) * pochhammer_poly(j))
        report.check((a, b, i, j), lhs, rhs)
    return report


def verify_z1_specialisation(max_index):
    """At z = 1 the n = 1 element reduces to δ^a_j δ^b_i."""
    report = Report("z1-specialisation", details={"max_index": max_index})
    for a, b, i, j in _n1_cases(max_index):
        expected = QFIELD.one if (a, b) == (j, i) else QFIELD.zero
        report.check((a, b, i, j), specialise_z(s_closed_n1(a, b, i, j)), expected)
    return report


# ── Transposition relation between S^{2,1} and S^{1,2} ───────────────────────


def check_s21_case(case):
    """w^{|b|} S^{2,1}(w^2)^{a,b}_{i,j} = w^{|j|} Π (q^2)_i (q^2)_j / ((q^2)_a (q^2)_b) S^{1,2}(w)^{ī,j̄}_{ā,b̄}, unnormalized."""
    order, (a, b, i, j) = case
    ratio = QFIELD.one
    for ar, br, ir, jr in zip(a, b, i, j):
        ratio *= to_ratq(pochhammer_poly(ir) * pochhammer_poly(jr)) / to_ratq(pochhammer_poly(ar) * pochhammer_poly(br))
    lhs = s_element_raw(2, 1, a, b, i, j, order, z_power=2).shift(sum(b))
    rhs = s_element_raw(1, 2, i[::-1], j[::-1], a[::-1], b[::-1], order).shift(sum(j)) * ratio
    report = Report("s21")
    report.check((a, b, i, j), lhs, rhs)
    return report


def verify_s21(n, max_degree, order, mapper=map):
    cases = [(order, case) for case in s_cases(n, max_degree)]
    return Report.merge("s21", mapper(check_s21_case, cases), n=n, max_degree=max_degree, zmax=order)


# ── Yang-Baxter equation on three tensor factors ─────────────────────────────

_SLOT_EMBEDDING = {"x": lambda e: (e, 0), "xy": lambda e: (e, e), "y": lambda e: (0, e)}


def _embed_series(series, variable):
    place = _SLOT_EMBEDDING[variable]
    return XY_RING.from_dict({place(e): c for (e,), c in series.poly.items()})


def _truncate(p, order):
    return XY_RING.from_dict({m: c for m, c in p.items() if m[0] <= order and m[1] <= order})


def _apply_pair(vector, slots, variable, entry, order, cache):
    p, r = slots
    out = {}
    for key, coeff in vector.items():
        left, right = key[p], key[r]
        nu = tuple(x + y for x, y in zip(left, right))
        for a, b in block_basis(nu):
            cache_key = (a, b, left, right, variable)
            if cache_key not in cache:
                series = entry(a, b, left, right)
                cache[cache_key] = _embed_series(series, variable) if series else None
            factor = cache[cache_key]
            if factor is None:
                continue
            image = list(key)
            image[p], image[r] = a, b
            image = tuple(image)
            term = _truncate(coeff * factor, order)
            if term:
                out[image] = out[image] + term if image in out else term
    return SparseVector(out)


def ybe_inputs(n, max_degree, sectors=None):
    """Triples (i, j, k) of n-component indices with |i| + |j| + |k| <= max_degree."""
    out = []
    for total in range(max_degree + 1):
        for flat in enumerate_basis(3 * n, total):
            triple = (flat[:n], flat[n : 2 * n], flat[2 * n :])
            if sectors is not None and tuple(parity_sector(m) for m in triple) != tuple(sectors):
                continue
            out.append(triple)
    return out


def check_ybe(name, entry, lower, order, cache=None):
    """Compare X12(x) X13(xy) X23(y) with X23(y) X13(xy) X12(x) on one basis vector.

    ``entry(a, b, i, j)`` returns the ZSeries matrix element of X(z).
    """
    cache = {} if cache is None else cache
    start = SparseVector.basis(tuple(lower), XY_RING.one)
    lhs = _apply_pair(start, (1, 2), "y", entry, order, cache)
    lhs = _apply_pair(lhs, (0, 2), "xy", entry, order, cache)
    lhs = _apply_pair(lhs, (0, 1), "x", entry, order, cache)
    rhs = _apply_pair(start, (0, 1), "x", entry, order, cache)
    rhs = _apply_pair(rhs, (0, 2), "xy", entry, order, cache)
    rhs = _apply_pair(rhs, (1, 2), "y", entry, order, cache)
    report = Report(name)
    for upper in sorted(set(lhs) | set(rhs)):
        report.check(
            (upper, tuple(lower)),
            lhs.coefficient(upper, XY_RING.zero),
            rhs.coefficient(upper, XY_RING.zero),
        )
    return report


def check_sybe_case(case):
    s, t, order, lower = case

    def entry(a, b, i, j):
        return s_element(s, t, a, b, i, j, order)

    return check_ybe("sybe", entry, lower, order)


def verify_sybe(s, t, n, max_degree, order, mapper=map):
    normalization_selector(s, t, (0,) * n, (0,) * n)
    cases = [(s, t, order, lower) for lower in ybe_inputs(n, max_degree)]
    return Report.merge(
        "sybe", mapper(check_sybe_case, cases), s=s, t=t, n=n, max_degree=max_degree, zmax=order
    )
