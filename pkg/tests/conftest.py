from pathlib import Path

import pytest

from ceteris.model import make_spec

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"
ROOT = Path(__file__).parent.parent

BIN = ("0", "1")


def p1():
    return make_spec("P1", {"a": BIN, "b": BIN, "c": BIN}, [
        ("s1", "a", "0", "1"),
        ("s2", "b", "1", "0", {"c": "0"}),
        ("s3", "c", "0", "1", {"b": "0"}),
    ])


def p3():
    return make_spec("P3", {"a": BIN, "b": BIN, "c": BIN}, [
        ("s1", "a", "0", "1", {}, {"b"}),
        ("sb", "b", "1", "0", {"c": "0"}),
        ("s3", "c", "0", "1", {"b": "0"}),
    ])


def d2():
    return make_spec("D2", {"a": BIN, "b": BIN}, [
        ("s1", "a", "1", "0", {"b": "0"}),
        ("s2", "a", "0", "1", {"b": "1"}),
        ("s3", "b", "1", "0", {"a": "1"}),
        ("s4", "b", "0", "1", {"a": "0"}),
    ])


def o(spec, text):
    """Outcome from a compact value string in declaration order, e.g. ``o(P1, "101")``."""
    return spec.outcome(list(text))


@pytest.fixture
def P1():
    return p1()


@pytest.fixture
def P3():
    return p3()


@pytest.fixture
def D2():
    return d2()


@pytest.fixture
def P1m():
    return p1().without("s3", name="P1m")


# one verdict line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE: dict[int, str] = {}


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
