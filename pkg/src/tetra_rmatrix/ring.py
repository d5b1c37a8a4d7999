"""Exact scalars and q-combinatorics.

Every scalar in the package lives in one of four sympy domains:

    QPOLY    integer polynomials in q (values of the 3d R)
    QFIELD   rational functions in u = q^(1/2) over the Gaussian rationals
    ZFIELD   rational functions in u and the spectral variable z
    ZSeries  truncated power series in z with QFIELD coefficients

Exponents handed to the helpers below are counted in powers of u, so q is
``2``, q^2 is ``4`` and q^(1/2) is ``1``.
"""

from collections.abc import Mapping
from fractions import Fraction
from functools import lru_cache
from tokenize import TokenError

from sympy import I, Symbol
from sympy.parsing.sympy_parser import parse_expr
from sympy.polys.domains import QQ_I, ZZ
from sympy.polys.polyerrors import CoercionFailed
from sympy.polys.fields import field
from sympy.polys.rings import PolyElement, ring
from sympy.polys.ring_series import rs_mul, rs_series_inversion, rs_trunc

from tetra_rmatrix.report import ScalarParseError, UnsupportedSelectorError

QPOLY, Q = ring("q", ZZ)
QFIELD, U = field("u", QQ_I)
ZFIELD, ZU, Z = field("u,z", QQ_I)
SERIES_RING, SZ = ring("z", QFIELD)

IMAG = QFIELD(QQ_I(0, 1))

# Exponent of u for the common bases.
HALF, ONE, TWO = 1, 2, 4


# ── Constructors and conversions ─────────────────────────────────────────────


def q_power(e):
    """u^e, i.e. q^(e/2)."""
    return U**e


def half_laurent(coeffs):
    """Build a Laurent polynomial in u from ``{exponent: coefficient}``."""
    total = QFIELD.zero
    for e, c in coeffs.items():
        if c:
            total += QFIELD(c) * U**e
    return total


def laurent_coefficients(x):
    """Inverse of :func:`half_laurent`; rejects values with a non-monomial denominator."""
    den = x.denom
    if len(den) != 1:
        raise ValueError(f"{format_scalar(x)} is not a Laurent polynomial in q^(1/2)")
    ((shift,), dc), = den.items()
    return {e - shift: c / dc for (e,), c in x.numer.items()}


def to_ratq(poly):
    """Embed an integer polynomial in q into QFIELD (q -> u^2)."""
    if isinstance(poly, int):
        return QFIELD(poly)
    terms = {(2 * e,): QQ_I(int(c)) for (e,), c in poly.items()}
    return QFIELD.new(QFIELD.ring.from_dict(terms))


def lift_to_z(x):
    """View a QFIELD scalar as a z-independent element of ZFIELD."""
    if isinstance(x, int):
        return ZFIELD(x)
    # numer and denom stay coprime after adjoining z
    return ZFIELD.raw_new(x.numer.set_ring(ZFIELD.ring), x.denom.set_ring(ZFIELD.ring))


# ── q-combinatorics ──────────────────────────────────────────────────────────


def q_pochhammer(base, m, step=None, *, negate=False):
    """Π_{k=1}^{m} (1 ∓ u^{base + (k-1) step}); step defaults to base.

    ``negate=True`` gives (-u^base; u^step)_m.
    """
    if m < 0:
        raise ValueError(f"q_pochhammer needs m >= 0, got {m}")
    step = base if step is None else step
    sign = -1 if negate else 1
    result = QFIELD.one
    for k in range(m):
        result *= 1 - sign * U ** (base + k * step)
    return result


def q_binomial(m, k, base=TWO):
    """Gaussian binomial in base u^base; zero unless 0 <= k <= m."""
    if k < 0 or k > m:
        return QFIELD.zero
    return q_pochhammer(base, m) / (q_pochhammer(base, k) * q_pochhammer(base, m - k))


def q_number(m, base=ONE):
    """Symmetric q-integer [m] in base u^base (default q)."""
    b = U**base
    return (b**m - b ** (-m)) / (b - b ** (-1))


def q_factorial(nu, base=ONE):
    result = QFIELD.one
    for k in range(1, nu + 1):
        result *= q_number(k, base)
    return result


def kappa():
    """(q + 1)/(q - 1)."""
    return (U**2 + 1) / (U**2 - 1)


@lru_cache(maxsize=None)
def pochhammer_poly(m, step=2):
    """(q^step; q^step)_m as an integer polynomial in q."""
    result = QPOLY.one
    for k in range(1, m + 1):
        result *= 1 - Q ** (step * k)
    return result


@lru_cache(maxsize=None)
def binomial_poly(m, k, step=2):
    """Gaussian binomial in base q^step, built with the q-Pascal rule."""
    if k < 0 or k > m:
        return QPOLY.zero
    if k == 0 or k == m:
        return QPOLY.one
    return binomial_poly(m - 1, k - 1, step) + Q ** (step * k) * binomial_poly(m - 1, k, step)


# ── Truncated series in z ────────────────────────────────────────────────────


class ZSeries:
    """Power series in z with QFIELD coefficients, exact through z^order."""

    __slots__ = ("poly", "order")

    def __init__(self, poly, order):
        if order < 0:
            raise ValueError(f"series order must be >= 0, got {order}")
        self.poly = rs_trunc(poly, SZ, order + 1)
        self.order = order

    @classmethod
    def from_coefficients(cls, coeffs, order):
        terms = {(k,): c for k, c in enumerate(coeffs) if c}
        return cls(SERIES_RING.from_dict(terms), order)

    @classmethod
    def constant(cls, c, order):
        return cls(SERIES_RING(c), order)

    @classmethod
    def from_ratqz(cls, f, order):
        """Expand a ZFIELD element around z = 0."""
        if isinstance(f, int) or f.field == QFIELD:
            return cls.constant(f, order)
        num = _z_polynomial(f.numer)
        den = _z_polynomial(f.denom)
        if not den.get((0,), QFIELD.zero):
            raise ValueError(f"{format_scalar(f)} has a pole at z = 0")
        inverse = rs_series_inversion(den, SZ, order + 1)
        return cls(rs_mul(num, inverse, SZ, order + 1), order)

    def coefficient(self, k):
        if k > self.order:
            raise IndexError(f"z^{k} is beyond the truncation order {self.order}")
        return self.poly.get((k,), QFIELD.zero)

    def coefficients(self):
        return [self.coefficient(k) for k in range(self.order + 1)]

    def _coerce(self, other):
        if isinstance(other, ZSeries):
            return other.poly, min(self.order, other.order)
        return SERIES_RING(other), self.order

    def __add__(self, other):
        poly, order = self._coerce(other)
        return ZSeries(self.poly + poly, order)

    __radd__ = __add__

    def __sub__(self, other):
        poly, order = self._coerce(other)
        return ZSeries(self.poly - poly, order)

    def __rsub__(self, other):
        return -self + other

    def __neg__(self):
        return ZSeries(-self.poly, self.order)

    def __mul__(self, other):
        if isinstance(other, ZSeries):
            order = min(self.order, other.order)
            return ZSeries(rs_mul(self.poly, other.poly, SZ, order + 1), order)
        return ZSeries(self.poly * other, self.order)

    __rmul__ = __mul__

    def inverse(self):
        if not self.coefficient(0):
            raise ZeroDivisionError("series with zero constant term is not invertible")
        return ZSeries(rs_series_inversion(self.poly, SZ, self.order + 1), self.order)

    def shift(self, k):
        """Multiply by z^k (k >= 0)."""
        return ZSeries(self.poly * SZ**k, self.order)

    def substitute_power(self, k):
        """Replace z by z^k."""
        terms = {(e * k,): c for (e,), c in self.poly.items() if e * k <= self.order}
        return ZSeries(SERIES_RING.from_dict(terms), self.order)

    def __bool__(self):
        return bool(self.poly)

    def __eq__(self, other):
        if isinstance(other, ZSeries) or isinstance(other, int):
            return not (self - other)
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"ZSeries({format_series(self)}, order={self.order})"


def _z_polynomial(p):
    """Regroup a polynomial in (u, z) as a polynomial in z over QFIELD."""
    by_z = {}
    for (eu, ez), c in p.items():
        by_z.setdefault(ez, {})[(eu,)] = c
    terms = {(ez,): QFIELD.new(QFIELD.ring.from_dict(d)) for ez, d in by_z.items()}
    return SERIES_RING.from_dict(terms)


def z_polynomial_series(p, order):
    """A ZFIELD polynomial (numerator or denominator) as a ZSeries."""
    return ZSeries(_z_polynomial(p), order)


def _euler_series(c, c_exp, z_power, base, inverse, order):
    """(c u^c_exp z^z_power; u^base)_∞ or its reciprocal, expanded to order."""
    coeffs = {}
    m = 0
    while z_power * m <= order:
        term = QFIELD(c) ** m * U ** (c_exp * m) / q_pochhammer(base, m)
        if not inverse:
            term *= (-1) ** m * U ** (base * m * (m - 1) // 2)
        coeffs[(z_power * m,)] = term
        m += 1
    return ZSeries(SERIES_RING.from_dict(coeffs), order)


# selector -> factors (c, c_exp, z_power, base, inverse)
_NORMALIZATIONS = {
    "1,1": ((1, 0, 1, 2, False), (-1, 2, 1, 2, True)),
    "1,2": ((1, 0, 2, 4, False), (-1, 2, 2, 4, True)),
    "+": ((1, 0, 1, 8, False), (1, 4, 1, 8, True)),
    "-": ((1, 4, 1, 8, False), (1, 0, 1, 8, True)),
}


@lru_cache(maxsize=None)
def infinite_pochhammer_ratio_series(selector, order):
    """Series of the normalization factor named by ``selector``.

    Selectors: ``"1,1"``, ``"1,2"`` and the four parity pairs ``"+,+"``,
    ``"+,-"``, ``"-,+"``, ``"-,-"`` (only the product of the two signs matters).
    """
    if selector in ("1,1", "1,2"):
        key = selector
    elif selector in ("+,+", "-,-"):
        key = "+"
    elif selector in ("+,-", "-,+"):
        key = "-"
    else:
        raise UnsupportedSelectorError(f"unknown normalization selector {selector!r}")
    result = ZSeries.constant(1, order)
    for factor in _NORMALIZATIONS[key]:
        result = result * _euler_series(*factor, order)
    return result


# ── Canonical text form ──────────────────────────────────────────────────────


def _rational(r):
    return Fraction(int(r.numerator), int(r.denominator))


def _format_coefficient(c, monomial):
    if hasattr(c, "y"):
        re, im = _rational(c.x), _rational(c.y)
    else:
        re, im = _rational(c), Fraction(0)
    if im == 0:
        if monomial:
            if re == 1:
                return monomial
            if re == -1:
                return f"-{monomial}"
            return f"{re}*{monomial}"
        return str(re)
    if re == 0:
        if im == 1:
            text = "i"
        elif im == -1:
            text = "-i"
        else:
            text = f"{im}*i"
    else:
        sign = "+" if im > 0 else "-"
        text = f"({re} {sign} {abs(im)}*i)"
    return f"{text}*{monomial}" if monomial else text


def _format_q(eu):
    if eu == 0:
        return ""
    if eu % 2:
        return f"q^({eu}/2)"
    e = eu // 2
    if e == 1:
        return "q"
    return f"q^{e}" if e > 0 else f"q^({e})"


def _format_poly(p):
    names = [str(s) for s in p.ring.symbols]
    terms = []
    for monom, c in p.items():
        exps = dict(zip(names, monom))
        eu = exps.get("u", 0) + 2 * exps.get("q", 0)
        ez = exps.get("z", 0)
        terms.append(((ez, eu), c))
    if not terms:
        return "0"
    parts = []
    for (ez, eu), c in sorted(terms, key=lambda t: t[0]):
        factors = [f for f in (_format_q(eu), "z" if ez == 1 else (f"z^{ez}" if ez else "")) if f]
        parts.append(_format_coefficient(c, "*".join(factors)))
    text = parts[0]
    for part in parts[1:]:
        text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return text


def format_scalar(x):
    """Canonical text of an exact scalar, e.g. ``(1 - q^2)/(1 + q*z)``."""
    if isinstance(x, int):
        return str(x)
    if not hasattr(x, "denom"):
        return _format_poly(x)
    num = _format_poly(x.numer)
    if x.denom.is_one:
        return num
    return f"({num})/({_format_poly(x.denom)})"


def format_series(s):
    return [format_scalar(c) for c in s.coefficients()]


def format_value(x):
    """Text for any value a verifier may compare."""
    if isinstance(x, ZSeries):
        return "[" + ", ".join(format_series(x)) + "]"
    if isinstance(x, PolyElement):
        if x.ring.ngens > 1:
            return str(x.as_expr())
        return format_scalar(x)
    if isinstance(x, Mapping):
        return "{" + ", ".join(f"{k}: {format_value(v)}" for k, v in sorted(x.items())) + "}"
    return format_scalar(x)


_U_POSITIVE = Symbol("u", positive=True)
_PARSE_NAMES = {"q": _U_POSITIVE**2, "u": _U_POSITIVE, "z": Symbol("z"), "i": I}


def parse_scalar(text, target=None):
    """Read the canonical text form back into QFIELD or ZFIELD.

    With ``target=None`` the field is QFIELD unless z occurs. Anything else
    raises ScalarParseError.
    """
    try:
        expr = parse_expr(text.replace("^", "**"), local_dict=dict(_PARSE_NAMES))
        expr = expr.xreplace({_U_POSITIVE: Symbol("u")})
        if target is None:
            target = ZFIELD if Symbol("z") in expr.free_symbols else QFIELD
        return target.from_expr(expr)
    except (SyntaxError, TokenError, TypeError, ValueError, AttributeError, NameError, CoercionFailed) as e:
        raise ScalarParseError(f"not a scalar: {text!r}") from e


def specialise_z(f, value=1):
    """Evaluate a ZFIELD element at an integer z, giving a QFIELD element."""

    def _collapse(p):
        terms = {}
        for (eu, ez), c in p.items():
            terms[(eu,)] = terms.get((eu,), QQ_I.zero) + c * value**ez
        return QFIELD.new(QFIELD.ring.from_dict(terms))

    den = _collapse(f.denom)
    if not den:
        raise ZeroDivisionError(f"{format_scalar(f)} has a pole at z = {value}")
    return _collapse(f.numer) / den
