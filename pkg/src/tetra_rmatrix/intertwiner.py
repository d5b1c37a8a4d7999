"""Quantum R matrices as intertwiners of q-oscillator tensor products.

R : V_x ⊗ V_y -> V_x ⊗ V_y is fixed (up to its normalization) by
Δ'(g) R = R Δ(g) for every Chevalley generator g. R commutes with Δ(k_r), so
it is block diagonal in ν = a + b and only in-block entries are unknowns.
The system is solved exactly over Q(i)(q^(1/2), z).
"""

import logging
from dataclasses import dataclass, field

from tetra_rmatrix.fock import SparseVector, block_basis, enumerate_basis, parity_sector
from tetra_rmatrix.reduction import check_ybe, s_element, ybe_inputs
from tetra_rmatrix.report import IntertwinerError, Report
from tetra_rmatrix.ring import IMAG, ZFIELD, ZU, Z, ZSeries, format_scalar, lift_to_z, z_polynomial_series
from tetra_rmatrix.uqalg import Family, Representation, TensorModule, coproduct_action, generator_shift

log = logging.getLogger(__name__)

# (s, t) of the reduction that reproduces each family's R.
REDUCTION_PAIR = {Family.D2: (1, 1), Family.A2: (1, 2), Family.C1: (2, 2)}

_RHS = -1


@dataclass
class RMatrixBlock:
    nu: tuple
    basis: list
    matrix: dict = field(default_factory=dict)

    def entry(self, out_key, in_key):
        return self.matrix.get((out_key, in_key), ZFIELD.zero)

    def to_dict(self, kind):
        entries = []
        for (out_key, in_key), value in sorted(self.matrix.items()):
            if value:
                (a, b), (i, j) = out_key, in_key
                entries.append({"a": list(a), "b": list(b), "i": list(i), "j": list(j), "value": format_scalar(value)})
        return {
            "algebra": kind.family.value,
            "n": kind.n,
            "nu": list(self.nu),
            "basis": [[list(a), list(b)] for a, b in self.basis],
            "entries": entries,
        }


@dataclass
class SolveCertificate:
    unknowns: int
    equations: int
    rank: int
    nullity: int
    normalizations: int

    def to_dict(self):
        return {
            "unknowns": self.unknowns,
            "equations": self.equations,
            "rank": self.rank,
            "nullity": self.nullity,
            "normalizations": self.normalizations,
        }


@dataclass
class RSolution:
    kind: object
    max_block_degree: int
    blocks: dict
    certificate: SolveCertificate

    def entry(self, a, b, i, j):
        nu = tuple(x + y for x, y in zip(a, b))
        if nu != tuple(x + y for x, y in zip(i, j)) or nu not in self.blocks:
            return ZFIELD.zero
        return self.blocks[nu].entry((a, b), (i, j))

    def to_dict(self):
        return {
            "algebra": self.kind.family.value,
            "n": self.kind.n,
            "blocks": [self.blocks[nu].to_dict(self.kind) for nu in sorted(self.blocks)],
            "certificate": self.certificate.to_dict(),
        }


# ── Sparse exact elimination ─────────────────────────────────────────────────

ZPOLY = ZFIELD.ring


def _primitive(row):
    """Divide a polynomial row by the gcd of its entries."""
    entries = sorted(row.values(), key=len)
    if not entries or entries[0].is_ground:
        return row
    g = entries[0]
    for v in entries[1:]:
        g = g.gcd(v)
        if g.is_ground:
            return row
    return {c: v.exquo(g) for c, v in row.items()}


def _clear_denominators(row):
    """A ZFIELD row as polynomial numerators over their common denominator."""
    row = {c: v for c, v in row.items() if v}
    den = ZPOLY.one
    for v in row.values():
        if not v.denom.is_one:
            den = den.lcm(v.denom)
    return _primitive({c: v.numer * den.exquo(v.denom) for c, v in row.items()})


class _Eliminator:
    """Incremental fraction-free Gaussian elimination over ZFIELD.

    Rows map column -> coefficient and mean sum(coefficient * x) = row[_RHS].
    Stored rows hold polynomials with their content removed; each one is
    reduced only against the pivots that came before it, and values are
    read off by back substitution.
    """

    def __init__(self):
        self.pivots = {}
        self.equations = 0
        self._values = None

    def add(self, row):
        self.equations += 1
        row = _clear_denominators(row)
        for col, pivot_row in self.pivots.items():
            factor = row.get(col)
            if not factor:
                continue
            lead = pivot_row[col]
            combined = {c: lead * v for c, v in row.items()}
            for c, v in pivot_row.items():
                updated = combined.get(c, ZPOLY.zero) - factor * v
                if updated:
                    combined[c] = updated
                else:
                    combined.pop(c, None)
            row = _primitive(combined)
        unknowns = [c for c in row if c != _RHS]
        if not unknowns:
            if row:
                raise IntertwinerError("inconsistent intertwining equations", unknowns=None, rank=len(self.pivots))
            return
        pivot = min(unknowns, key=lambda c: (len(row[c]), c))
        self.pivots[pivot] = row
        self._values = None

    @property
    def rank(self):
        return len(self.pivots)

    def _back_substitute(self):
        values = {}
        for col, row in reversed(self.pivots.items()):
            acc = ZFIELD.new(row.get(_RHS, ZPOLY.zero))
            for c, v in row.items():
                if c in (col, _RHS):
                    continue
                if c not in values:
                    break
                acc -= ZFIELD.new(v) * values[c]
            else:
                values[col] = acc / ZFIELD.new(row[col])
        self._values = values

    def value(self, col):
        if self._values is None:
            self._back_substitute()
        if col not in self._values:
            raise IntertwinerError(f"unknown {col} is not determined")
        return self._values[col]


# ── Setting up the system ────────────────────────────────────────────────────


def _blocks(kind, max_block_degree):
    return [nu for d in range(max_block_degree + 1) for nu in enumerate_basis(kind.n, d)]


def _allowed(kind, out_key, in_key):
    if kind.family is not Family.C1:
        return True
    return parity_sector(out_key[0]) == parity_sector(in_key[0])


def normalizations(kind):
    """Prescribed entries as {(ν, out_key, in_key): value}; one per independent solution."""
    n = kind.n
    zero = (0,) * n
    e1 = (1,) + (0,) * (n - 1)
    e1x2 = (2,) + (0,) * (n - 1)
    if kind.family is not Family.C1:
        return {(zero, (zero, zero), (zero, zero)): ZFIELD.one}
    odd = -lift_to_z(IMAG) * ZU / (1 - Z)
    return {
        (zero, (zero, zero), (zero, zero)): ZFIELD.one,
        (e1, (zero, e1), (zero, e1)): odd,
        (e1, (e1, zero), (e1, zero)): odd,
        (e1x2, (e1, e1), (e1, e1)): (Z - ZU**4) / (1 - Z * ZU**4),
    }


def _check_k_blocks(kind, module, max_block_degree):
    """Δ(k_r) is diagonal with an eigenvalue tuple that depends only on ν and separates blocks."""
    seen = {}
    for nu in _blocks(kind, max_block_degree):
        signature = None
        for key in block_basis(nu):
            values = []
            for r in range(kind.n + 1):
                image = coproduct_action(module, f"k{r}")(SparseVector.basis(key, ZFIELD.one))
                if set(image) != {key}:
                    raise IntertwinerError(f"Δ(k{r}) is not diagonal on {key}")
                values.append(image[key])
            values = tuple(values)
            if signature is None:
                signature = values
            elif any(x - y for x, y in zip(values, signature)):
                raise IntertwinerError(f"Δ(k) weight varies inside block {nu}")
        for other, sig in seen.items():
            if not any(x - y for x, y in zip(sig, signature)):
                raise IntertwinerError(f"blocks {other} and {nu} share a Δ(k) weight")
        seen[nu] = signature


def _build_system(kind, max_block_degree):
    window = max_block_degree + kind.max_shift
    rep = Representation(kind, window)
    module = TensorModule(rep, rep, window)
    _check_k_blocks(kind, module, max_block_degree)

    columns = {}
    bases = {}
    for nu in _blocks(kind, max_block_degree):
        bases[nu] = block_basis(nu)
        for out_key in bases[nu]:
            for in_key in bases[nu]:
                if _allowed(kind, out_key, in_key):
                    columns[(nu, out_key, in_key)] = len(columns)

    rows = []
    for r in range(kind.n + 1):
        for letter in ("e", "f"):
            g = f"{letter}{r}"
            delta = coproduct_action(module, g, "delta")
            delta_prime = coproduct_action(module, g, "delta_prime")
            shift = generator_shift(kind, g)
            for nu, basis in bases.items():
                target = tuple(x + y for x, y in zip(nu, shift))
                if target not in bases:
                    continue
                images = {key: delta_prime(SparseVector.basis(key, ZFIELD.one)) for key in basis}
                for in_key in basis:
                    moved = delta(SparseVector.basis(in_key, ZFIELD.one))
                    equations = {}
                    for out_key, image in images.items():
                        col = columns.get((nu, out_key, in_key))
                        if col is None:
                            continue
                        for result, c in image.items():
                            row = equations.setdefault(result, {})
                            row[col] = row.get(col, ZFIELD.zero) + c
                    for mid, c in moved.items():
                        for result in bases[target]:
                            col = columns.get((target, result, mid))
                            if col is None:
                                continue
                            row = equations.setdefault(result, {})
                            row[col] = row.get(col, ZFIELD.zero) - c
                    for row in equations.values():
                        row = {c: v for c, v in row.items() if v}
                        if row:
                            rows.append(row)
    return columns, bases, rows


def _pieces(columns, rows):
    """Split the system into independent pieces, grouped by block degree.

    Every equation couples the blocks of two degrees; the unknowns of its
    higher degree are solved together, with the lower ones already known.
    Within one degree, unknowns that share no equation form separate pieces.
    """
    stage = {col: sum(key[0]) for key, col in columns.items()}
    parent = {col: col for col in columns.values()}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    tops = []
    for row in rows:
        d = max(stage[c] for c in row)
        top = [c for c in row if stage[c] == d]
        for c in top[1:]:
            parent[find(c)] = find(top[0])
        tops.append(top[0])

    pieces = {}
    for col in sorted(columns.values()):
        pieces.setdefault((stage[col], find(col)), ([], []))[0].append(col)
    for row, top in zip(rows, tops):
        pieces[(stage[top], find(top))][1].append(row)

    stages = {}
    for (d, _), piece in sorted(pieces.items()):
        stages.setdefault(d, []).append(piece)
    return [stages[d] for d in sorted(stages)]


def _solve_piece(task):
    """Rank of one piece and, when lower values are given, its solution.

    ``known`` maps the lower-degree unknowns this piece refers to onto their
    values; ``None`` solves the homogeneous system only.
    """
    cols, rows, known, prescribed = task
    inside = set(cols)
    elim = _Eliminator()
    for row in rows:
        reduced = {}
        rhs = ZFIELD.zero
        for c, v in row.items():
            if c in inside:
                reduced[c] = v
            elif known is not None:
                rhs -= v * known[c]
        if rhs:
            reduced[_RHS] = rhs
        elim.add(reduced)
    rank = elim.rank
    if known is None:
        return rank, None
    for col, value in prescribed.items():
        elim.add({col: ZFIELD.one, _RHS: value})
    if elim.rank != len(cols):
        raise IntertwinerError("normalization does not fix the intertwiner", unknowns=len(cols), rank=elim.rank)
    return rank, {col: elim.value(col) for col in cols}


def solve_r(kind, max_block_degree, normalise=True, mapper=map):
    """Solve the intertwining equations for every block with |ν| <= max_block_degree.

    Pieces of one block degree are independent and go through ``mapper``.
    With ``normalise=False`` only the homogeneous system is solved and the
    certificate (rank, nullity) is returned.
    """
    columns, bases, rows = _build_system(kind, max_block_degree)
    stages = _pieces(columns, rows)
    log.info(
        "%s: %d unknowns, %d equations in %d pieces",
        kind.label,
        len(columns),
        len(rows),
        sum(len(pieces) for pieces in stages),
    )
    prescribed = {columns[k]: v for k, v in normalizations(kind).items() if k in columns}
    known = {} if normalise else None
    rank = 0
    for pieces in stages:
        tasks = []
        for cols, piece_rows in pieces:
            needed = None
            if known is not None:
                inside = set(cols)
                needed = {c: known[c] for row in piece_rows for c in row if c not in inside}
            tasks.append((cols, piece_rows, needed, {c: prescribed[c] for c in cols if c in prescribed}))
        for piece_rank, values in mapper(_solve_piece, tasks):
            rank += piece_rank
            if values is not None:
                known.update(values)

    certificate = SolveCertificate(
        unknowns=len(columns),
        equations=len(rows),
        rank=rank,
        nullity=len(columns) - rank,
        normalizations=len(prescribed),
    )
    if certificate.nullity != len(prescribed):
        raise IntertwinerError(
            f"expected a {len(prescribed)}-dimensional solution space, found {certificate.nullity}",
            unknowns=certificate.unknowns,
            rank=certificate.rank,
        )
    if not normalise:
        return certificate
    blocks = {nu: RMatrixBlock(nu, basis) for nu, basis in bases.items()}
    for (nu, out_key, in_key), col in columns.items():
        value = known[col]
        if value:
            blocks[nu].matrix[(out_key, in_key)] = value
    return RSolution(kind, max_block_degree, blocks, certificate)


# ── Gauge and comparison with the boundary reduction ─────────────────────────


def gauge_factor(a, j, direction=1):
    """(-i q^{1/2})^{direction (|j| - |a|)} for the entry (a, b; i, j)."""
    base = -lift_to_z(IMAG) * ZU
    return base ** (direction * (sum(j) - sum(a)))


def gauge_transform(blocks, direction=1):
    """R̃ = gauge(R); ``direction=-1`` undoes it."""
    out = {}
    for nu, block in blocks.items():
        new = RMatrixBlock(nu, block.basis)
        for ((a, b), (i, j)), value in block.matrix.items():
            new.matrix[((a, b), (i, j))] = value * gauge_factor(a, j, direction)
        out[nu] = new
    return out


def check_theorem(kind, max_block_degree, order, mapper=map):
    """Every gauged R entry agrees with the matching S^{s,t} element through z^order."""
    s, t = REDUCTION_PAIR[kind.family]
    solution = solve_r(kind, max_block_degree, mapper=mapper)
    gauged = gauge_transform(solution.blocks)
    report = Report(
        "check-theorem",
        details={
            "algebra": kind.family.value,
            "n": kind.n,
            "entries_checked": 0,
            "max_block_degree": max_block_degree,
            "zmax": order,
        },
    )
    for nu, block in sorted(gauged.items()):
        for out_key in block.basis:
            for in_key in block.basis:
                (a, b), (i, j) = out_key, in_key
                value = block.entry(out_key, in_key)
                series = s_element(s, t, a, b, i, j, order)
                lhs = z_polynomial_series(value.numer, order)
                rhs = z_polynomial_series(value.denom, order) * series
                report.check((a, b, i, j), lhs, rhs)
    report.details["entries_checked"] = report.checked
    return report


def verify_yber(kind, max_degree, order, sectors=None, gauged=True, mapper=map):
    """Yang-Baxter equation for the solved R (or R̃) as truncated series in x and y."""
    solution = solve_r(kind, max_degree, mapper=mapper)
    blocks = gauge_transform(solution.blocks) if gauged else solution.blocks
    series_cache = {}

    def entry(a, b, i, j):
        key = (a, b, i, j)
        if key not in series_cache:
            nu = tuple(x + y for x, y in zip(a, b))
            value = blocks[nu].entry((a, b), (i, j)) if nu in blocks else ZFIELD.zero
            series_cache[key] = ZSeries.from_ratqz(value, order)
        return series_cache[key]

    cache = {}
    reports = [check_ybe("yber", entry, lower, order, cache) for lower in ybe_inputs(kind.n, max_degree, sectors)]
    return Report.merge(
        "yber",
        reports,
        algebra=kind.family.value,
        n=kind.n,
        max_degree=max_degree,
        zmax=order,
        gauged=gauged,
    )
