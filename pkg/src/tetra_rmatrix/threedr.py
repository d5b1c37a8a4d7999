"""The 3d R, its weight symmetry, the tetrahedron equation and boundary vectors.

Matrix elements R^{a,b,c}_{i,j,k} are integer polynomials in q (``QPOLY``)
and vanish unless a + b = i + j and b + c = j + k. Given the lower indices,
the upper ones therefore depend on a single free parameter b.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from sympy.polys.rings import ring

from tetra_rmatrix.fock import SparseVector
from tetra_rmatrix.report import Report
from tetra_rmatrix.ring import QFIELD, QPOLY, Q, binomial_poly, pochhammer_poly, q_pochhammer, to_ratq

XY_RING, X, Y = ring("x,y", QFIELD)

# Tensor slots of R_{124}, R_{135}, R_{236}, R_{456} (0-based).
_TETRA_LEFT = ((0, 1, 3), (0, 2, 4), (1, 2, 5), (3, 4, 5))


@lru_cache(maxsize=None)
def r_element(a, b, c, i, j, k):
    """R^{a,b,c}_{i,j,k} as an integer polynomial in q."""
    if a + b != i + j or b + c != j + k:
        return QPOLY.zero
    terms = []
    for mu in range(min(b, i) + 1):
        lam = b - mu
        e = i * k + b + lam * (c - a) + mu * (mu - i - k - 1)
        coeff = binomial_poly(lam + a, a) * binomial_poly(i, mu)
        terms.append((e, -coeff if lam % 2 else coeff))
    if not terms:
        return QPOLY.zero
    low = min(e for e, _ in terms)
    total = sum((coeff * Q ** (e - low) for e, coeff in terms), QPOLY.zero)
    if low >= 0:
        return total * Q**low
    # Individual terms may carry negative powers of q; the sum never does.
    return total.exquo(Q ** (-low))


def r_images(i, j, k):
    """Nonzero R^{a,b,c}_{i,j,k} for fixed lower indices, as ``{(a,b,c): value}``."""
    out = {}
    for b in range(min(i + j, j + k) + 1):
        value = r_element(i + j - b, b, j + k - b, i, j, k)
        if value:
            out[(i + j - b, b, j + k - b)] = value
    return out


def apply_r(vector, slots):
    """Apply R acting on tensor positions ``slots`` to a vector over multi-indices."""
    p1, p2, p3 = slots
    out = {}
    for key, coeff in vector.items():
        for (a, b, c), value in r_images(key[p1], key[p2], key[p3]).items():
            image = list(key)
            image[p1], image[p2], image[p3] = a, b, c
            image = tuple(image)
            term = coeff * value
            out[image] = out[image] + term if image in out else term
    return SparseVector(out)


# ── Weight symmetry ──────────────────────────────────────────────────────────


def symmetry_cases(max_degree):
    return [(i, j, k) for i, j, k in product(range(max_degree + 1), repeat=3) if i + j + k <= max_degree]


def check_symmetry_case(lower):
    """(q^2)_a (q^2)_b (q^2)_c R^{abc}_{ijk} = (q^2)_i (q^2)_j (q^2)_k R^{ijk}_{abc} for all a, b, c."""
    i, j, k = lower
    report = Report("symmetry")
    weight_in = pochhammer_poly(i) * pochhammer_poly(j) * pochhammer_poly(k)
    for b in range(min(i + j, j + k) + 1):
        a, c = i + j - b, j + k - b
        lhs = pochhammer_poly(a) * pochhammer_poly(b) * pochhammer_poly(c) * r_element(a, b, c, i, j, k)
        rhs = weight_in * r_element(i, j, k, a, b, c)
        report.check((a, b, c, i, j, k), lhs, rhs)
    return report


def verify_weight_symmetry(max_degree, mapper=map):
    reports = mapper(check_symmetry_case, symmetry_cases(max_degree))
    return Report.merge("symmetry", reports, max_degree=max_degree)


# ── Tetrahedron equation ─────────────────────────────────────────────────────


def tetrahedron_cases(max_degree):
    return [m for m in product(range(max_degree + 1), repeat=6) if sum(m) <= max_degree]


def check_tetrahedron_case(lower):
    """Compare R124 R135 R236 R456 and R456 R236 R135 R124 on one basis vector."""
    start = SparseVector.basis(tuple(lower), QPOLY.one)
    lhs = start
    for slots in reversed(_TETRA_LEFT):
        lhs = apply_r(lhs, slots)
    rhs = start
    for slots in _TETRA_LEFT:
        rhs = apply_r(rhs, slots)
    report = Report("tetrahedron")
    for upper in sorted(set(lhs) | set(rhs)):
        report.check(tuple(upper) + tuple(lower), lhs.coefficient(upper, QPOLY.zero), rhs.coefficient(upper, QPOLY.zero))
    return report


def verify_tetrahedron(max_degree, mapper=map):
    reports = mapper(check_tetrahedron_case, tetrahedron_cases(max_degree))
    return Report.merge("tetrahedron", reports, max_degree=max_degree)


# ── Boundary vectors ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class BoundaryVector:
    """χ_s(z) = Σ_m z^m / (q^{s^2}; q^{s^2})_m |s m>, as a bra or a ket."""

    s: int
    side: str = "ket"

    def __post_init__(self):
        if self.s not in (1, 2):
            raise ValueError(f"boundary vectors exist for s = 1, 2, got {self.s}")
        if self.side not in ("bra", "ket"):
            raise ValueError(f"side must be 'bra' or 'ket', got {self.side!r}")

    def weight(self, m):
        """Coefficient of z^m."""
        return QFIELD.one / q_pochhammer(2 * self.s * self.s, m)

    def coefficient(self, occupation):
        """Coefficient of |occupation>, as (power of z, scalar); None off the support."""
        if occupation % self.s:
            return None
        m = occupation // self.s
        return m, self.weight(m)


def _triple_weight(chi, m1, m2, m3):
    """Coefficient of |s m1, s m2, s m3> in χ(x) ⊗ χ(xy) ⊗ χ(y)."""
    return X ** (m1 + m2) * Y ** (m2 + m3) * (chi.weight(m1) * chi.weight(m2) * chi.weight(m3))


def boundary_cases(max_degree):
    return [(a, b, c) for a, b, c in product(range(max_degree + 1), repeat=3) if a + b + c <= max_degree]


def check_boundary_case(case):
    """One output (ket) or input (bra) triple of R|χ> = |χ> or <χ|R = <χ|."""
    s, side, (a, b, c) = case
    chi = BoundaryVector(s, side)
    report = Report(f"boundary-{side}-s{s}")
    if side == "ket":
        lhs = XY_RING.zero
        if (a + b) % s == 0 and (b + c) % s == 0:
            left, right = (a + b) // s, (b + c) // s
            for m2 in range(min(left, right) + 1):
                m1, m3 = left - m2, right - m2
                value = r_element(a, b, c, s * m1, s * m2, s * m3)
                if value:
                    lhs += _triple_weight(chi, m1, m2, m3) * to_ratq(value)
        rhs = XY_RING.zero
        if a % s == 0 and b % s == 0 and c % s == 0:
            rhs = _triple_weight(chi, a // s, b // s, c // s)
        report.check((a, b, c), lhs, rhs)
        return report
    # bra side: (a, b, c) are the lower indices, the pairing supplies (q^2)_{s m} weights
    i, j, k = a, b, c
    lhs = XY_RING.zero
    if (i + j) % s == 0 and (j + k) % s == 0:
        left, right = (i + j) // s, (j + k) // s
        for m2 in range(min(left, right) + 1):
            m1, m3 = left - m2, right - m2
            value = r_element(s * m1, s * m2, s * m3, i, j, k)
            if value:
                pair = pochhammer_poly(s * m1) * pochhammer_poly(s * m2) * pochhammer_poly(s * m3)
                lhs += _triple_weight(chi, m1, m2, m3) * to_ratq(value * pair)
    rhs = XY_RING.zero
    if i % s == 0 and j % s == 0 and k % s == 0:
        pair = pochhammer_poly(i) * pochhammer_poly(j) * pochhammer_poly(k)
        rhs = _triple_weight(chi, i // s, j // s, k // s) * to_ratq(pair)
    report.check((i, j, k), lhs, rhs)
    return report


def verify_boundary_eigenrelation(s, side, max_degree, mapper=map):
    cases = [(s, side, triple) for triple in boundary_cases(max_degree)]
    reports = mapper(check_boundary_case, cases)
    return Report.merge(f"boundary-{side}-s{s}", reports, s=s, side=side, max_degree=max_degree)
