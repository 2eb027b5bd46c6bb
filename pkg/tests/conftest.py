import os
import stat
import sys

import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, f"rep_{rep.when}", rep)

from rcrs.components import Atomic, Det, StatelessDet, Stateless, Sts, sig, Signature
from rcrs.formulas import TRUEC, eq
from rcrs.oracle import FiniteDomain
from rcrs.terms import add, intc, var
from rcrs.types import INT


@pytest.fixture(scope="session")
def solver_path(tmp_path_factory):
    """An executable speaking the solver contract: SMT-LIB on stdin, verdict
    on the first stdout line.  Backed by the bundled difference-logic
    decision procedure."""
    path = tmp_path_factory.mktemp("solver") / "dl-solver"
    path.write_text(f"#!/bin/sh\nexec {sys.executable} -m rcrs.dlsolver\n")
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


@pytest.fixture
def with_solver(solver_path, monkeypatch):
    monkeypatch.setenv("RCRS_SMT_SOLVER", solver_path)
    return solver_path


@pytest.fixture
def no_solver(monkeypatch):
    monkeypatch.delenv("RCRS_SMT_SOLVER", raising=False)


@pytest.fixture
def add_block():
    x, y = var("x", INT), var("y", INT)
    return StatelessDet(sig(("x", INT), ("y", INT)), TRUEC, (add(x, y),))


@pytest.fixture
def unit_delay():
    return Det(
        sig(("x", INT)), sig(("s", INT)), (intc(0),), TRUEC,
        (var("x", INT),), (var("s", INT),),
    )


@pytest.fixture
def split_block():
    x = var("x", INT)
    return StatelessDet(sig(("x", INT)), TRUEC, (x, x))


@pytest.fixture
def sum_component(add_block, unit_delay, split_block):
    from rcrs.components import Fdbk, Serial

    return Fdbk(Serial(Serial(Atomic(add_block), Atomic(unit_delay)), Atomic(split_block)))


@pytest.fixture
def small_int_domain():
    return FiniteDomain({"int": (0, 1, 2)})
