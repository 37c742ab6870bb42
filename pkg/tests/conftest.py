import os

import pytest

from infdl.parser import parse_database, parse_kripke, parse_program

FIXDIR = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")


def fixture_text(name: str) -> str:
    with open(os.path.join(FIXDIR, name), encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture(scope="session")
def exstrat():
    return parse_program(fixture_text("exstrat.idl"), "exstrat.idl")


@pytest.fixture(scope="session")
def struc3():
    return parse_database(fixture_text("struc3.edb"), "struc3.edb")


@pytest.fixture(scope="session")
def exalt():
    return parse_program(fixture_text("exalt.idl"), "exalt.idl")


@pytest.fixture(scope="session")
def struc2():
    return parse_database(fixture_text("struc2.edb"), "struc2.edb")


@pytest.fixture(scope="session")
def struc2_kripke():
    return parse_kripke(fixture_text("struc2.kripke"), "struc2.kripke")


def elems(value) -> set[str]:
    """Unwrap a unary predicate's value to a plain set of constants."""
    return {t[0] for t in value}
