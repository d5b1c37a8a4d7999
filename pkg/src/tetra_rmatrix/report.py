"""Verification reports and the package exception hierarchy."""

from dataclasses import dataclass, field


class TetraError(Exception):
    """Base class for every error raised by tetra_rmatrix."""


class WindowOverflowError(TetraError):
    """An operator was applied to, or produced, a vector outside its degree window."""


class SpectralWeightError(TetraError):
    """Operators of different spectral weight were combined additively."""


class UnsupportedSelectorError(TetraError):
    """A normalization selector or (s, t) pair that has no definition."""


class IntertwinerError(TetraError):
    def __init__(self, message, *, unknowns=None, rank=None):
        self.message = message
        self.unknowns = unknowns
        self.rank = rank
        detail = f" (unknowns={unknowns}, rank={rank})" if unknowns is not None else ""
        super().__init__(f"{message}{detail}")


class ConfigError(TetraError):
    """Invalid flag or config-file combination."""


class ScalarParseError(TetraError, ValueError):
    """Text that is not the canonical form of a scalar."""


def _jsonable(value):
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    return value


@dataclass(frozen=True)
class Failure:
    indices: tuple
    lhs: str
    rhs: str

    def to_dict(self):
        return {"indices": _jsonable(self.indices), "lhs": self.lhs, "rhs": self.rhs}


@dataclass
class Report:
    """Outcome of one verifier run.

    ``checked`` counts individual comparisons; ``failures`` holds the
    mismatching ones rendered as canonical scalar strings so a report can
    cross process boundaries and be written as JSON unchanged.
    """

    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return not self.failures

    def check(self, indices, lhs, rhs):
        """Compare two exact values; record a failure when they differ."""
        self.checked += 1
        if not (lhs - rhs):
            return True
        from tetra_rmatrix.ring import format_value

        self.failures.append(Failure(tuple(indices), format_value(lhs), format_value(rhs)))
        return False

    def fail(self, indices, lhs, rhs):
        self.checked += 1
        self.failures.append(Failure(tuple(indices), str(lhs), str(rhs)))

    @classmethod
    def merge(cls, name, reports, **details):
        merged = cls(name, details=dict(details))
        for r in reports:
            merged.checked += r.checked
            merged.failures.extend(r.failures)
        return merged

    def to_dict(self):
        out = {
            "name": self.name,
            "result": "pass" if self.passed else "fail",
            "checked": self.checked,
            "failures": [f.to_dict() for f in self.failures],
        }
        out.update(self.details)
        return out
