"""Shared pytest fixtures."""

import pytest

from tetra_rmatrix.cli import CONFIG_ENV
from tetra_rmatrix.uqalg import AlgebraKind


@pytest.fixture
def d2_n1():
    """U_q(D^(2)_2) acting on a single Fock space."""
    return AlgebraKind("d2", 1)


@pytest.fixture
def a2_n1():
    """U_q(A^(2)_2) acting on a single Fock space."""
    return AlgebraKind("a2", 1)


@pytest.fixture
def c1_n1():
    """U_q(C^(1)_1) acting on a single Fock space."""
    return AlgebraKind("c1", 1)


@pytest.fixture
def isolated_cwd(tmp_path, monkeypatch):
    """Run in an empty directory with no config file or config env var in sight."""
    monkeypatch.delenv(CONFIG_ENV, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path
