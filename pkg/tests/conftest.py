import math

import mpmath
import pytest

from fracdev.samplers import RngState


def ml_series_oracle(nu, x, digits=40):
    """E_nu(x) by direct high-precision summation of the defining series."""
    y = abs(x) ** (1.0 / nu)
    ctx = mpmath.MPContext()
    ctx.prec = int(3.33 * digits) + int(3 * y / math.log(2)) + 64
    X = ctx.mpf(x)
    total = ctx.mpf(0)
    k = 0
    while True:
        term = X**k * ctx.rgamma(ctx.mpf(nu) * k + 1)
        total += term
        if k * nu > y + 10 and abs(term) < ctx.mpf(10) ** (-digits) * abs(total):
            return total
        k += 1


def ml_negative_integral_oracle(nu, x):
    """E_nu(x) for x < 0 from its Laplace-integral (completely monotone) form.

    E_nu(-y**nu) = int_0^inf exp(-r y) K(r) dr with
    K(r) = sin(nu pi)/pi * r**(nu-1) / (r**(2nu) + 2 r**nu cos(nu pi) + 1),
    integrated after r = s**(1/nu) to remove the endpoint singularity.
    """
    y = (-x) ** (1.0 / nu)
    ctx = mpmath.MPContext()
    ctx.dps = 30
    c = ctx.cos(nu * ctx.pi)
    scale = ctx.sin(nu * ctx.pi) / ctx.pi / nu

    def f(s):
        return ctx.exp(-(s ** (1 / ctx.mpf(nu))) * y) * scale / (s * s + 2 * s * c + 1)

    return ctx.quad(f, [0, ctx.mpf(y) ** (-nu), 1, ctx.inf])


@pytest.fixture
def rng():
    return RngState(20261015)


# ---------------------------------------------------------------------------
# acceptance summary: one pass/fail line per criterion
# ---------------------------------------------------------------------------

ACCEPTANCE_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion checked by the test")


def pytest_runtest_setup(item):
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        item.user_properties.append(("acceptance", int(marker.args[0])))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("acceptance")
    if crit is None:
        return
    if report.failed:
        ACCEPTANCE_RESULTS[crit] = False
    elif report.when == "call":
        ACCEPTANCE_RESULTS.setdefault(crit, True)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ACCEPTANCE_RESULTS[crit] else "FAIL"
        terminalreporter.write_line(f"criterion {crit}: {status}")
