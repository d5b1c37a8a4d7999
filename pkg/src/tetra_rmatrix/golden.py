"""Golden-file regression for JSON artifacts.

Artifacts are compared byte for byte first. If the bytes differ, both files
are parsed and compared structurally, with every scalar string read back
into its field and compared exactly. Harmless changes in formatting then
still pass.
"""

import json
import os
import shutil

from tetra_rmatrix.report import Report, ScalarParseError
from tetra_rmatrix.ring import ZFIELD, parse_scalar


def _scalars_equal(left, right):
    target = ZFIELD if "z" in left or "z" in right else None
    try:
        a = parse_scalar(left, target)
        b = parse_scalar(right, target)
    except ScalarParseError:
        return False
    return not (a - b)


def _compare(left, right, path, report):
    if isinstance(left, dict) and isinstance(right, dict):
        for key in sorted(set(left) | set(right)):
            if key not in left or key not in right:
                report.fail(path + [key], left.get(key, "<missing>"), right.get(key, "<missing>"))
                continue
            _compare(left[key], right[key], path + [key], report)
        return
    if isinstance(left, list) and isinstance(right, list):
        if len(left) != len(right):
            report.fail(path, f"{len(left)} items", f"{len(right)} items")
            return
        for index, (a, b) in enumerate(zip(left, right)):
            _compare(a, b, path + [index], report)
        return
    if isinstance(left, str) and isinstance(right, str):
        if left == right or _scalars_equal(left, right):
            report.checked += 1
        else:
            report.fail(path, left, right)
        return
    if left == right and type(left) is type(right):
        report.checked += 1
    else:
        report.fail(path, left, right)


def golden_path(path, golden_dir):
    return os.path.join(golden_dir, os.path.basename(path))


def compare_with_golden(path, golden_dir):
    """Compare the artifact at ``path`` with its namesake in ``golden_dir``.

    A missing golden file raises FileNotFoundError.
    """
    expected = golden_path(path, golden_dir)
    report = Report("golden", details={"artifact": os.path.basename(path)})
    with open(path, "rb") as f:
        actual_bytes = f.read()
    with open(expected, "rb") as f:
        expected_bytes = f.read()
    if actual_bytes == expected_bytes:
        report.checked += 1
        return report
    try:
        actual = json.loads(actual_bytes)
        reference = json.loads(expected_bytes)
    except json.JSONDecodeError as e:
        report.fail([], "unreadable JSON", str(e))
        return report
    _compare(actual, reference, [], report)
    return report


def record_golden(path, golden_dir):
    """Copy the artifact into ``golden_dir``, replacing any previous golden file."""
    os.makedirs(golden_dir, exist_ok=True)
    target = golden_path(path, golden_dir)
    shutil.copyfile(path, target)
    return target
