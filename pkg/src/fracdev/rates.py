"""Rate functions: a numerical Legendre-Fenchel oracle and the closed forms.

``legendre_transform`` maximizes the concave map ``theta -> theta*x - cgf(theta)``
by bracket doubling from ``[-1, 1]`` followed by golden-section search. It is
derivative free, so kinks such as the one at ``theta = 0`` of the
``mu != 0`` moderate-deviation limit are harmless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .jumps import JumpLaw
from .kernels import cgf_limit_LD, cgf_limit_MD, interarrival_cgf
from .samplers import ProcessParams

__all__ = [
    "LegendreConvergenceError",
    "LegendreResult",
    "RateFunctionSpec",
    "legendre_transform",
    "maximize_concave",
    "optimal_theta_MD",
    "rate_LD",
    "rate_LD_renewal_form",
    "rate_MD_closed",
    "rate_MD_reflect",
]

UNBOUNDED_THETA = 1e6
MAX_ITERATIONS = 500
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class LegendreConvergenceError(RuntimeError):
    """Golden-section search hit the iteration cap (distinct from an infinite sup)."""


@dataclass(frozen=True)
class LegendreResult:
    value: float
    argmax_theta: float | None  # None marks an unbounded objective
    iterations: int
    bracket: tuple[float, float]

    @property
    def unbounded(self) -> bool:
        return self.argmax_theta is None


@dataclass(frozen=True)
class RateFunctionSpec:
    regime: str  # "LD" or "MD"
    nu: float
    lam: float
    mu: float = 0.0
    sigma2: float = 0.0
    form: str = "closed_form"

    def __post_init__(self):
        if self.regime not in ("LD", "MD"):
            raise ValueError(f"regime must be LD or MD, got {self.regime!r}")
        if self.form not in ("closed_form", "numerical"):
            raise ValueError(f"form must be closed_form or numerical, got {self.form!r}")
        if self.regime == "LD" and self.form == "closed_form":
            raise ValueError("the LD rate has no closed form; use form='numerical'")

    def __call__(self, x: float, jump: JumpLaw | None = None) -> float:
        if self.regime == "MD":
            if self.form == "closed_form":
                return rate_MD_closed(self.nu, self.lam, self.mu, self.sigma2, x)
            cgf = cgf_limit_MD(self.nu, self.lam, self.mu, self.sigma2)
            return legendre_transform(cgf, x).value
        if jump is None:
            raise ValueError("the LD rate needs the jump law")
        return rate_LD(ProcessParams(self.nu, self.lam), jump, x)


def _safe(f: Callable[[float], float]) -> Callable[[float], float]:
    def g(theta):
        v = f(theta)
        return -math.inf if math.isnan(v) else v

    return g


def maximize_concave(
    objective: Callable[[float], float],
    tol: float = 1e-10,
    lower: float = -math.inf,
    upper: float = math.inf,
) -> LegendreResult:
    """Maximize a concave function of one variable on ``[lower, upper]``.

    The objective may return ``-inf`` (outside a domain). Returns an
    unbounded result when it keeps increasing past ``|theta| = 1e6``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    f = _safe(objective)
    clip = lambda v: min(max(v, lower), upper)  # noqa: E731
    mid = clip(0.0)
    fm = f(mid)
    iterations = 0

    # bracket (a, mid, b) with f(mid) >= f(a), f(mid) >= f(b)
    step = 1.0
    a, b = clip(mid - step), clip(mid + step)
    fa, fb = f(a), f(b)
    while fb > fm and b < upper:
        iterations += 1
        if abs(b) > UNBOUNDED_THETA:
            return _unbounded(b, fb, fm, mid, iterations, (a, b))
        a, fa, mid, fm = mid, fm, b, fb
        step *= 2.0
        b = clip(mid + step)
        fb = f(b)
    while fa > fm and a > lower:
        iterations += 1
        if abs(a) > UNBOUNDED_THETA:
            return _unbounded(a, fa, fm, mid, iterations, (a, b))
        b, fb, mid, fm = mid, fm, a, fa
        step *= 2.0
        a = clip(mid - step)
        fa = f(a)
    if fb > fm:
        # maximum at the upper constraint
        return LegendreResult(fb, b, iterations, (a, b))
    if fa > fm:
        return LegendreResult(fa, a, iterations, (a, b))

    lo, hi = a, b
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol * max(1.0, abs(lo) + abs(hi)) / 2.0:
        iterations += 1
        if iterations > MAX_ITERATIONS:
            raise LegendreConvergenceError(
                f"golden-section search did not converge in {MAX_ITERATIONS} steps "
                f"(bracket [{lo}, {hi}])"
            )
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = f(x2)
    best = max((fm, mid), (f1, x1), (f2, x2), key=lambda p: p[0])
    return LegendreResult(best[0], best[1], iterations, (a, b))


def _unbounded(theta, f_theta, f_mid, mid, iterations, bracket):
    # slope test: still rising at |theta| ~ 1e6 means the sup is +inf
    slope = (f_theta - f_mid) / abs(theta - mid)
    if slope > 0 or math.isinf(f_theta):
        return LegendreResult(math.inf, None, iterations, bracket)
    raise LegendreConvergenceError(f"bracket expansion stalled at theta={theta}")


def legendre_transform(cgf: Callable[[float], float], x: float, tol: float = 1e-10) -> LegendreResult:
    """``sup_theta {theta*x - cgf(theta)}`` by bracketing and golden section."""
    x = float(x)
    return maximize_concave(lambda th: th * x - cgf(th), tol=tol)


def rate_LD(params: ProcessParams, jump: JumpLaw, x: float, tol: float = 1e-10) -> float:
    """Large-deviation rate of ``S(t)/t`` at speed ``t``."""
    return legendre_transform(cgf_limit_LD(params, jump), x, tol).value


def rate_LD_renewal_form(nu: float, lam: float, x: float, tol: float = 1e-10) -> float:
    """Counting-process rate written through the interarrival CGF.

    ``x * sup_{eta<0} {eta/x - kappa(eta)}`` for ``x > 0``; 0 at ``x = 0`` and
    ``inf`` for ``x < 0``.
    """
    if x < 0:
        return math.inf
    if x == 0:
        return 0.0

    def h(eta):
        return 0.0 if eta == 0 else eta / x - interarrival_cgf(nu, lam, eta)

    return x * maximize_concave(h, tol=tol, upper=0.0).value


def _md_constant_zero(nu: float) -> float:
    h = nu / 2.0
    return h ** (nu / (2.0 - nu)) - h ** (2.0 / (2.0 - nu))


def _md_constant_nonzero(nu: float) -> float:
    return nu ** (nu / (1.0 - nu)) - nu ** (1.0 / (1.0 - nu))


def _check_md(nu, lam, mu, sigma2):
    if not 0.0 < nu < 1.0:
        raise ValueError(f"nu must lie in (0, 1), got {nu!r}")
    if not lam > 0:
        raise ValueError(f"lambda must be > 0, got {lam!r}")
    if mu == 0 and not sigma2 > 0:
        raise ValueError("the mu = 0 regime needs sigma2 > 0")


def rate_MD_closed(nu: float, lam: float, mu: float, sigma2: float, x: float) -> float:
    """Closed-form moderate-deviation rate for all three signs of ``mu``."""
    _check_md(nu, lam, mu, sigma2)
    if mu == 0:
        return _md_constant_zero(nu) * (2.0 * x * x / (lam * sigma2)) ** (1.0 / (2.0 - nu))
    if mu > 0 and x < 0 or mu < 0 and x > 0:
        return math.inf
    return _md_constant_nonzero(nu) * (x / (lam * mu)) ** (1.0 / (1.0 - nu))


def rate_MD_reflect(nu: float, lam: float, mu: float, x: float) -> float:
    """``mu != 0`` rate computed as ``I_{-mu}(-x)``."""
    if mu == 0:
        raise ValueError("reflection needs mu != 0")
    return rate_MD_closed(nu, lam, -mu, 0.0, -x)


def optimal_theta_MD(nu: float, lam: float, mu: float, sigma2: float, x: float) -> float:
    """Maximizer ``theta_x`` of ``theta*x - Lambda_MD(theta)``.

    For ``mu = 0`` the map ``x -> theta_x`` is odd, so negative ``x`` use
    ``-theta_{|x|}``.
    """
    _check_md(nu, lam, mu, sigma2)
    if mu == 0:
        mag = (2.0 / (lam * sigma2)) ** (1.0 / (2.0 - nu)) * (nu * abs(x) / 2.0) ** (
            nu / (2.0 - nu)
        )
        return math.copysign(mag, x) if x != 0 else 0.0
    if mu > 0:
        if x < 0:
            raise ValueError(f"rate is +inf at x={x!r} when mu > 0; no maximizer")
        return (nu * x) ** (nu / (1.0 - nu)) / (lam * mu) ** (1.0 / (1.0 - nu))
    if x > 0:
        raise ValueError(f"rate is +inf at x={x!r} when mu < 0; no maximizer")
    return -((-nu * x) ** (nu / (1.0 - nu))) / (-lam * mu) ** (1.0 / (1.0 - nu))
