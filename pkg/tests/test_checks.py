from contextlib import contextmanager

import pytest
from exceptiongroup import ExceptionGroup

from qchip import checks
from qchip.checks import SUITES, CheckContext, run_suites, suite_names
from qchip.errors import CheckFailure, UsageError
from qchip.settings import Settings

QUICK = Settings(check_samples=200, p0=0.05, p1=0.95, steps=50)


@contextmanager
def extra_suite(name, *funcs):
    """Register a temporary suite for the duration of a test."""
    SUITES[name].extend(funcs)
    try:
        yield
    finally:
        del SUITES[name]


def test_suite_names():
    assert suite_names() == [
        "channels",
        "chip-geometry",
        "liouvillian",
        "measurement",
        "phase-space",
        "qubit-core",
    ]


@pytest.mark.parametrize(
    "suite", ["qubit-core", "phase-space", "chip-geometry", "measurement", "channels", "liouvillian"]
)
def test_suite_passes(suite):
    passed = run_suites([suite], QUICK)
    assert passed == [f"{suite}.{func.__name__}" for func in SUITES[suite]]


def test_unknown_suite():
    with pytest.raises(UsageError):
        run_suites(["nope"], QUICK)


def test_failures_are_grouped():
    def always_fails(ctx: CheckContext):
        ctx.expect(False, "always_fails", "forced")

    def raises(ctx: CheckContext):
        raise ZeroDivisionError("boom")

    def passes(ctx: CheckContext):
        ctx.within(0.0, 1e-12, "passes", "nothing")

    with extra_suite("zz-broken", always_fails, raises, passes):
        with pytest.raises(ExceptionGroup) as info:
            run_suites(["zz-broken"], QUICK)

    failures = info.value.exceptions
    assert all(isinstance(e, CheckFailure) for e in failures)
    assert [e.to_dict() for e in failures] == [
        {"suite": "zz-broken", "check": "always_fails", "message": "forced"},
        {"suite": "zz-broken", "check": "raises", "message": "ZeroDivisionError: boom"},
    ]


def test_seeded_checks_are_reproducible():
    draws = []

    def record(ctx: CheckContext):
        draws.append(ctx.rng.uniform())

    with extra_suite("zz-seeded", record):
        run_suites(["zz-seeded"], QUICK)
        run_suites(["zz-seeded"], QUICK)
        run_suites(["zz-seeded"], Settings(seed=1))
    assert draws[0] == draws[1]
    assert draws[0] != draws[2]


def test_random_bloch_inside_ball(rng):
    points = checks.random_bloch(rng, 500, radius=0.5)
    assert points.shape == (500, 3)
    assert (points**2).sum(axis=1).max() <= 0.25 + 1e-12
