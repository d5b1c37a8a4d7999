"""Bosonic Fock space F^{⊗n}: basis enumeration, pairing, sparse linear algebra.

A basis vector |m_1> ⊗ ... ⊗ |m_n> is keyed by the tuple ``(m_1, ..., m_n)``.
Multi-site vectors are keyed by tuples of such tuples, e.g. ``((1, 0), (0, 2))``.
"""

from collections.abc import Mapping
from dataclasses import dataclass
from itertools import product

from tetra_rmatrix.report import SpectralWeightError, WindowOverflowError
from tetra_rmatrix.ring import QFIELD, TWO, lift_to_z, q_pochhammer


def degree(key):
    """Total occupation number of a (possibly nested) basis key."""
    if isinstance(key, int):
        return key
    return sum(degree(k) for k in key)


def parity_sector(m):
    """(-1)^{|m|}."""
    return -1 if degree(m) % 2 else 1


def enumerate_basis(n, total, parity=None):
    """All m in Z^n_{>=0} with |m| = total, lexicographically ascending."""
    if n < 1 or total < 0:
        raise ValueError(f"enumerate_basis needs n >= 1 and degree >= 0, got n={n}, degree={total}")
    if parity is not None and parity_sector((total,)) != parity:
        return []
    out = []

    def _fill(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for first in range(remaining + 1):
            _fill(prefix + (first,), remaining - first, slots - 1)

    _fill((), total, n)
    return sorted(out)


def block_basis(nu):
    """Pairs (a, b) with a + b = nu componentwise, ordered by a."""
    return [(a, tuple(x - y for x, y in zip(nu, a))) for a in product(*(range(v + 1) for v in nu))]


def pairing(l, m):
    """<l|m> = (q^2; q^2)_m δ_{l,m}."""
    if l < 0 or m < 0:
        raise ValueError("occupation numbers are non-negative")
    return q_pochhammer(TWO, m) if l == m else QFIELD.zero


# ── Sparse vectors ───────────────────────────────────────────────────────────


class SparseVector(Mapping):
    """Immutable finite linear combination of basis keys; zeros are never stored."""

    __slots__ = ("_entries",)

    def __init__(self, entries=None):
        self._entries = {k: v for k, v in (entries or {}).items() if v}

    @classmethod
    def basis(cls, key, coeff=1):
        return cls({key: coeff})

    def __getitem__(self, key):
        return self._entries[key]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def coefficient(self, key, default=0):
        return self._entries.get(key, default)

    def __add__(self, other):
        out = dict(self._entries)
        for k, v in other.items():
            out[k] = out[k] + v if k in out else v
        return SparseVector(out)

    def __neg__(self):
        return SparseVector({k: -v for k, v in self._entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return SparseVector({k: v * scalar for k, v in self._entries.items()})

    def __rmul__(self, scalar):
        return SparseVector({k: scalar * v for k, v in self._entries.items()})

    def is_zero(self):
        return not self._entries

    def __bool__(self):
        return bool(self._entries)

    def __eq__(self, other):
        if not isinstance(other, Mapping):
            return NotImplemented
        return (self - SparseVector(other)).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"SparseVector({self._entries!r})"


def flip(v):
    """Exchange P on two-site vectors."""
    return SparseVector({(b, a): c for (a, b), c in v.items()})


# ── Windowed operators ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class SparseOperator:
    """Linear operator given by its action on basis keys.

    ``rule(key)`` returns a mapping ``{key: coefficient}``. Inputs and outputs
    must stay within total degree ``window``; ``spectral_weight`` is the power
    of the spectral parameter the operator carries.
    """

    rule: object
    window: int
    spectral_weight: int = 0
    name: str = ""

    def __call__(self, v):
        return apply(self, v)

    def __matmul__(self, other):
        return compose(self, other)

    def __add__(self, other):
        return _linear_combination(self, other, 1)

    def __sub__(self, other):
        return _linear_combination(self, other, -1)

    def __neg__(self):
        return scale(-1, self)

    def __rmul__(self, scalar):
        return scale(scalar, self)


def apply(op, v):
    out = {}
    for key, c in v.items():
        if degree(key) > op.window:
            raise WindowOverflowError(f"{op.name or 'operator'}: input {key} exceeds window {op.window}")
        for image, d in op.rule(key).items():
            if degree(image) > op.window:
                raise WindowOverflowError(f"{op.name or 'operator'}: {key} -> {image} leaves window {op.window}")
            term = c * d
            out[image] = out[image] + term if image in out else term
    return SparseVector(out)


def compose(a, b):
    """The operator a ∘ b."""

    def rule(key):
        return apply(a, apply(b, SparseVector.basis(key)))

    return SparseOperator(rule, min(a.window, b.window), a.spectral_weight + b.spectral_weight, f"{a.name}{b.name}")


def scale(scalar, op):
    return SparseOperator(
        lambda key: {k: scalar * v for k, v in op.rule(key).items()},
        op.window,
        op.spectral_weight,
        op.name,
    )


def _linear_combination(a, b, sign):
    if a.spectral_weight != b.spectral_weight:
        raise SpectralWeightError(
            f"cannot add {a.name or 'operator'} (weight {a.spectral_weight}) "
            f"and {b.name or 'operator'} (weight {b.spectral_weight})"
        )

    def rule(key):
        return SparseVector(a.rule(key)) + SparseVector(b.rule(key)) * sign

    return SparseOperator(rule, min(a.window, b.window), a.spectral_weight, f"({a.name}{'+' if sign > 0 else '-'}{b.name})")


def identity(window, unit=None):
    one = QFIELD.one if unit is None else unit
    return SparseOperator(lambda key: {key: one}, window, 0, "1")


def zero_operator(window, spectral_weight=0):
    return SparseOperator(lambda key: {}, window, spectral_weight, "0")


def tensor(a, b, window, scalar=1, spectral_weight=None):
    """scalar · (a ⊗ b) on two-site keys, coefficients lifted to ZFIELD.

    ``spectral_weight`` defaults to the sum of both factors' weights.
    """
    weight = a.spectral_weight + b.spectral_weight if spectral_weight is None else spectral_weight
    factor = lift_to_z(scalar) if isinstance(scalar, int) else scalar

    def rule(key):
        left, right = key
        out = {}
        for ka, ca in a.rule(left).items():
            for kb, cb in b.rule(right).items():
                out[(ka, kb)] = factor * lift_to_z(ca * cb)
        return out

    return SparseOperator(rule, window, weight, f"({a.name}⊗{b.name})")
