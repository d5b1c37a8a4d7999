"""Tetrahedron equation and quantum R matrix verification CLI.

Check the 3d R and its reductions to solutions of the Yang-Baxter equation,
solve the intertwining relations of the q-oscillator representations and
compare the two constructions. Reports and artifacts are written as JSON.

Usage examples:
    tetra-rmatrix verify tetrahedron --degree 3
    tetra-rmatrix verify relations --algebra a2 --n 1 --degree 6
    tetra-rmatrix verify s21 --n 1 --degree 2 --zmax 6
    tetra-rmatrix build-s --s 1 --t 1 --n 1 --degree 2 --out s11.json
    tetra-rmatrix solve-r --algebra c1 --n 1 --degree 2 --out r.json
    tetra-rmatrix check-theorem --algebra d2 --n 1 --degree 4 --zmax 6
"""

import argparse
import json
import multiprocessing
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass, fields, replace

import click

from tetra_rmatrix.golden import compare_with_golden, record_golden
from tetra_rmatrix.intertwiner import REDUCTION_PAIR, check_theorem, solve_r, verify_yber
from tetra_rmatrix.reduction import (
    ADMISSIBLE_PAIRS,
    s_cases,
    s_entry_row,
    sector_name,
    verify_n1_closed,
    verify_n1_transpose,
    verify_s21,
    verify_sybe,
    verify_z1_specialisation,
)
from tetra_rmatrix.report import ConfigError, IntertwinerError, Report, TetraError
from tetra_rmatrix.threedr import verify_boundary_eigenrelation, verify_tetrahedron, verify_weight_symmetry
from tetra_rmatrix.uqalg import AlgebraKind, Family, verify_coproduct_flip, verify_relations, verify_w_recursions

CONFIG_ENV = "TETRA_RMATRIX_CONFIG"
CONFIG_FILE = "tetra_rmatrix.json"
_INT_FIELDS = ("n", "s", "t", "degree", "zmax", "jobs")

VERIFY_TARGETS = [
    "tetrahedron",
    "symmetry",
    "boundary",
    "n1-closed",
    "relations",
    "sybe",
    "yber",
    "s21",
    "w-recursions",
    "coproduct",
]


@dataclass(frozen=True)
class RunConfig:
    algebra: str = None
    n: int = 1
    s: int = None
    t: int = None
    degree: int = 2
    zmax: int = 8
    out: str = None
    jobs: int = 1
    golden: str = None
    record_golden: bool = False
    quiet: bool = False
    sector: str = None
    side: str = None


def _config_path(args):
    if getattr(args, "config", None):
        return args.config
    if os.environ.get(CONFIG_ENV):
        return os.environ[CONFIG_ENV]
    local = os.path.join(os.getcwd(), CONFIG_FILE)
    if os.path.exists(local):
        return local
    return None


def _read_config_file(path):
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {', '.join(unknown)}")
    for name in _INT_FIELDS:
        if name in data and data[name] is not None and not isinstance(data[name], int):
            raise ConfigError(f"{path}: {name} must be an integer")
    return data


def load_config(args):
    """Flags > --config file > $TETRA_RMATRIX_CONFIG > ./tetra_rmatrix.json > defaults."""
    config = RunConfig()
    path = _config_path(args)
    if path:
        config = replace(config, **_read_config_file(path))
    flags = {f.name: getattr(args, f.name) for f in fields(RunConfig) if getattr(args, f.name, None) is not None}
    config = replace(config, **flags)
    validate_config(config)
    return config


def validate_config(config):
    for name in ("degree", "zmax"):
        if getattr(config, name) < 0:
            raise ConfigError(f"--{name} must be >= 0")
    if config.n < 1:
        raise ConfigError("--n must be >= 1")
    if config.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    if config.algebra is not None and config.algebra not in [f.value for f in Family]:
        raise ConfigError(f"unknown algebra {config.algebra!r}")
    if config.t is not None and config.s is None:
        raise ConfigError("--t needs --s")
    if config.s is not None and config.t is None and config.s not in (1, 2):
        raise ConfigError(f"--s must be 1 or 2, got {config.s}")
    if config.t is not None:
        if (config.s, config.t) not in ADMISSIBLE_PAIRS:
            raise ConfigError(f"(s, t) = ({config.s}, {config.t}) is not admissible")
        if config.algebra is not None and REDUCTION_PAIR[Family(config.algebra)] != (config.s, config.t):
            expected = REDUCTION_PAIR[Family(config.algebra)]
            raise ConfigError(f"algebra {config.algebra} pairs with (s, t) = {expected}, got ({config.s}, {config.t})")
    if config.side is not None and config.side not in ("bra", "ket"):
        raise ConfigError("--side must be 'bra' or 'ket'")
    if config.sector is not None:
        _parse_sector(config.sector)
    if (config.golden or config.record_golden) and not config.out:
        raise ConfigError("golden-file comparison needs --out")
    if config.record_golden and not config.golden:
        raise ConfigError("--record-golden needs --golden DIR")


def _parse_sector(text):
    signs = text.split(",")
    if len(signs) != 3 or any(s not in ("+", "-") for s in signs):
        raise ConfigError(f"sector must look like '+,-,+', got {text!r}")
    return tuple(1 if s == "+" else -1 for s in signs)


def _kind(config):
    if config.algebra is None:
        raise ConfigError("this command needs --algebra {d2,a2,c1}")
    return AlgebraKind(Family(config.algebra), config.n)


def _pair(config):
    if config.s is not None:
        if config.t is None:
            raise ConfigError("this command needs both --s and --t")
        return config.s, config.t
    if config.algebra is not None:
        return REDUCTION_PAIR[Family(config.algebra)]
    return 1, 1


# --- Output ---


def _ok(text):
    return click.style(text, fg="green")


def _err(text):
    return click.style(text, fg="red")


def _dim(text):
    return click.style(text, fg="bright_black")


def _progress(config, text):
    if not config.quiet:
        click.echo(text, err=True)


def _error(text):
    click.echo(click.style(f"Error: {text}", fg="red", bold=True), err=True)


@contextmanager
def _mapper(config):
    """``map`` for one job, a worker pool's ``imap`` otherwise."""
    if config.jobs <= 1:
        yield map
        return
    with multiprocessing.Pool(config.jobs) as pool:
        yield pool.imap


def _write_json(config, payload, path=None):
    """Write one artifact to ``path`` (or --out, or stdout); returns False on a golden mismatch."""
    text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    path = path or config.out
    if not path:
        sys.stdout.write(text)
        return True
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    _progress(config, _dim(f"  wrote {path}"))
    if config.record_golden:
        target = record_golden(path, config.golden)
        _progress(config, _dim(f"  recorded {target}"))
    elif config.golden:
        report = compare_with_golden(path, config.golden)
        if not report.passed:
            first = report.failures[0]
            _progress(config, _err(f"  golden mismatch in {path} at {list(first.indices)}: {first.lhs} != {first.rhs}"))
            return False
        _progress(config, _ok(f"  matches golden {os.path.basename(path)}"))
    return True


def _finish(config, report):
    counter = _dim(f"({report.checked} checked)")
    if report.passed:
        _progress(config, f"{_ok('PASS')} {report.name} {counter}")
    else:
        first = report.failures[0]
        _progress(
            config,
            f"{_err('FAIL')} {report.name} {counter}: {len(report.failures)} mismatches, "
            f"first at {list(first.indices)}: {first.lhs} != {first.rhs}",
        )
    written = _write_json(config, report.to_dict())
    return 0 if report.passed and written else 1


# --- Commands ---


def _run_verifier(target, config, mapper):
    degree, order = config.degree, config.zmax
    if target == "tetrahedron":
        return verify_tetrahedron(degree, mapper)
    if target == "symmetry":
        return verify_weight_symmetry(degree, mapper)
    if target == "boundary":
        svals = [config.s] if config.s in (1, 2) else [1, 2]
        sides = [config.side] if config.side else ["ket", "bra"]
        reports = [verify_boundary_eigenrelation(s, side, degree, mapper) for s in svals for side in sides]
        return Report.merge("boundary", reports, max_degree=degree)
    if target == "n1-closed":
        reports = [verify_n1_closed(degree, order), verify_n1_transpose(degree, order), verify_z1_specialisation(degree)]
        return Report.merge("n1-closed", reports, max_index=degree, zmax=order)
    if target == "relations":
        return verify_relations(_kind(config), degree)
    if target == "sybe":
        s, t = _pair(config)
        return verify_sybe(s, t, config.n, degree, order, mapper)
    if target == "yber":
        sectors = _parse_sector(config.sector) if config.sector else None
        return verify_yber(_kind(config), degree, order, sectors, mapper=mapper)
    if target == "s21":
        return verify_s21(config.n, degree, order, mapper)
    if target == "w-recursions":
        if config.n < 2:
            raise ConfigError("verify w-recursions needs --n >= 2")
        return verify_w_recursions(_kind(config), degree)
    return verify_coproduct_flip(_kind(config), degree)


def cmd_verify(args, config):
    _progress(config, f"Verifying {click.style(args.target, bold=True)} " + _dim(f"(degree {config.degree}, zmax {config.zmax})"))
    with _mapper(config) as mapper:
        report = _run_verifier(args.target, config, mapper)
    return _finish(config, report)


def _s_payload(s, t, n, order, rows):
    return {"s": s, "t": t, "n": n, "zmax": order, "entries": rows}


def _row_key(row):
    return tuple(tuple(row[k]) for k in ("a", "b", "i", "j"))


def _sector_path(out, sector):
    stem, ext = os.path.splitext(out)
    code = "".join("p" if e > 0 else "m" for e in sector)
    return f"{stem}.{code}{ext or '.json'}"


def cmd_build_s(args, config):
    s, t = _pair(config)
    if (s, t) == (2, 1):
        raise ConfigError("S^{2,1} has no normalization; use 'verify s21' instead")
    cases = [(s, t, config.zmax, case) for case in s_cases(config.n, config.degree)]
    _progress(config, f"Building S^{{{s},{t}}} for n={config.n}: {len(cases)} index tuples")
    with _mapper(config) as mapper:
        rows = sorted((row for row in mapper(s_entry_row, cases) if row is not None), key=_row_key)
    _progress(config, _dim(f"  {len(rows)} nonzero entries"))
    if (s, t) != (2, 2):
        return 0 if _write_json(config, _s_payload(s, t, config.n, config.zmax, rows)) else 1

    by_sector = {}
    for row in rows:
        sector = tuple(-1 if sum(row[k]) % 2 else 1 for k in ("a", "b"))
        by_sector.setdefault(sector, []).append(row)
    payloads = {
        sector: _s_payload(s, t, config.n, config.zmax, by_sector.get(sector, []))
        for sector in ((1, 1), (1, -1), (-1, 1), (-1, -1))
    }
    if not config.out:
        return 0 if _write_json(config, {sector_name(k): v for k, v in payloads.items()}) else 1
    ok = True
    for sector, payload in payloads.items():
        ok = _write_json(config, payload, _sector_path(config.out, sector)) and ok
    return 0 if ok else 1


def cmd_solve_r(args, config):
    kind = _kind(config)
    _progress(config, f"Solving the intertwiner of {click.style(kind.label, bold=True)} up to block degree {config.degree}")
    with _mapper(config) as mapper:
        solution = solve_r(kind, config.degree, mapper=mapper)
    cert = solution.certificate
    _progress(
        config,
        _dim(f"  {cert.unknowns} unknowns, {cert.equations} equations, rank {cert.rank}, nullity {cert.nullity}"),
    )
    return 0 if _write_json(config, solution.to_dict()) else 1


def cmd_check_theorem(args, config):
    kind = _kind(config)
    s, t = REDUCTION_PAIR[kind.family]
    _progress(
        config,
        f"Comparing gauged R of {click.style(kind.label, bold=True)} with S^{{{s},{t}}} "
        + _dim(f"(block degree {config.degree}, zmax {config.zmax})"),
    )
    with _mapper(config) as mapper:
        report = check_theorem(kind, config.degree, config.zmax, mapper)
    return _finish(config, report)


def _add_common_flags(p):
    p.add_argument("--algebra", choices=[f.value for f in Family], default=None)
    p.add_argument("--n", type=int, default=None, help="Number of tensor factors / rank parameter")
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--degree", type=int, default=None, help="Maximal total degree")
    p.add_argument("--zmax", type=int, default=None, help="Truncation order of z-series (default 8)")
    p.add_argument("--out", default=None, help="Write JSON here instead of stdout")
    p.add_argument("--jobs", type=int, default=None, help="Worker processes")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--golden", default=None, help="Directory of golden files to compare against")
    p.add_argument("--record-golden", action="store_true", default=None, help="Write golden files instead of comparing")
    p.add_argument("--quiet", action="store_true", default=None, help="No progress output")
    p.add_argument("--sector", default=None, help="Sector triple for yber, e.g. '+,+,+'")
    p.add_argument("--side", default=None, choices=["bra", "ket"], help="Boundary vector side")


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Tetrahedron equation and quantum R matrix verification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command")

    p_verify = sub.add_parser("verify", help="Run one identity check")
    p_verify.add_argument("target", choices=VERIFY_TARGETS)
    _add_common_flags(p_verify)

    p_build = sub.add_parser("build-s", help="Export S^{s,t}(z) entries up to a degree")
    _add_common_flags(p_build)

    p_solve = sub.add_parser("solve-r", help="Solve the intertwining relations for R(z)")
    _add_common_flags(p_solve)

    p_check = sub.add_parser("check-theorem", help="Compare gauged R(z) with the matching S^{s,t}(z)")
    _add_common_flags(p_check)

    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 0

    commands = {
        "verify": cmd_verify,
        "build-s": cmd_build_s,
        "solve-r": cmd_solve_r,
        "check-theorem": cmd_check_theorem,
    }
    try:
        config = load_config(args)
        return commands[args.command](args, config)
    except ConfigError as e:
        _error(str(e))
        parser.print_usage(sys.stderr)
        return 2
    except IntertwinerError as e:
        _error(str(e))
        return 1
    except OSError as e:
        _error(str(e))
        return 3
    except TetraError as e:
        _error(str(e))
        return 2


if __name__ == "__main__":
    sys.exit(main())
