"""One-parameter Mittag-Leffler function on the real line.

``E_nu(x) = sum_k x**k / Gamma(nu*k + 1)`` for ``0 < nu <= 1``.

Three evaluation branches are used, selected by ``y = |x|**(1/nu)``:

* ``series`` for ``y <= Y_SWITCH``. Positive arguments are summed in the log
  domain (all terms are positive). Negative arguments alternate and cancel
  badly, so they are summed in extended precision with mpmath, with the
  working precision sized from the largest term.
* ``asymptotic_positive`` for large positive ``x``:
  ``E_nu(x) = exp(y)/nu - sum_{k>=1} x**-k / Gamma(1 - nu*k)``.
* ``asymptotic_negative`` for large negative ``x``: the algebraic part of the
  same expansion, truncated at its smallest term.

``ml_log_eval`` returns ``log E_nu(x)`` without forming ``exp(y)``, so it stays
finite far beyond the double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import gammaln, logsumexp

__all__ = [
    "Y_SWITCH",
    "MlEvalResult",
    "MlOrder",
    "MlOverflowError",
    "ml",
    "ml_eval",
    "ml_log_eval",
    "x_switch",
]

#: Branch switch on ``|x|**(1/nu)``; ``x_switch(nu) = Y_SWITCH**nu``.
Y_SWITCH = 50.0

_LOG_MAX = math.log(np.finfo(float).max)
_SMALL_Y_DOUBLE = 1.0
_MAX_ASYMPTOTIC_TERMS = 400


class MlOverflowError(OverflowError):
    """``E_nu(x)`` is finite but too large for a double; use :func:`ml_log_eval`."""


@dataclass(frozen=True)
class MlOrder:
    nu: float

    def __post_init__(self):
        nu = float(self.nu)
        if not (0.0 < nu <= 1.0):
            raise ValueError(f"Mittag-Leffler order must lie in (0, 1], got {self.nu!r}")
        object.__setattr__(self, "nu", nu)


@dataclass(frozen=True)
class MlEvalResult:
    """Value of ``E_nu(x)`` with its log and a heuristic truncation error.

    ``est_abs_err`` is the magnitude of the first neglected series term or of
    the last asymptotic correction kept; it is not a certified bound.
    """

    value: float
    log_value: float
    method: str
    est_abs_err: float


def x_switch(nu: float) -> float:
    """Largest ``|x|`` handled by the series branch for order ``nu``."""
    return Y_SWITCH ** MlOrder(nu).nu


def _as_order(order) -> MlOrder:
    return order if isinstance(order, MlOrder) else MlOrder(order)


def _check_x(x) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"Mittag-Leffler argument must be finite, got {x!r}")
    return x


def _is_integer(v: float) -> bool:
    return abs(v - round(v)) < 1e-12


def _inv_gamma_one_minus(nu: float, k: int) -> float:
    """``1/Gamma(1 - nu*k)`` via reflection, exactly 0 at the poles."""
    m = nu * k
    if _is_integer(m):
        return 0.0
    s = math.sin(math.pi * math.fmod(m, 2.0))
    try:
        return math.gamma(m) * s / math.pi
    except OverflowError:
        return math.copysign(math.inf, s)


def _algebraic_tail(nu: float, x: float) -> tuple[float, float]:
    """Optimally truncated ``sum_{k>=1} x**-k / Gamma(1 - nu*k)``.

    Returns ``(sum, |last term kept|)``. Truncation watches the envelope
    ``|x|**-k * Gamma(nu*k)``; the oscillating ``sin(pi*nu*k)`` factor would
    stop the sum early.
    """
    total = 0.0
    last = 0.0
    log_abs_x = math.log(abs(x))
    prev_env = math.inf
    for k in range(1, _MAX_ASYMPTOTIC_TERMS + 1):
        log_env = math.lgamma(nu * k) - k * log_abs_x
        if log_env > prev_env:
            break
        prev_env = log_env
        c = _inv_gamma_one_minus(nu, k)
        if c == 0.0:
            continue
        term = c / x**k
        total += term
        last = abs(term)
        if math.exp(log_env) <= 1e-18 * abs(total):
            break
    return total, last


def _series_positive(nu: float, x: float) -> tuple[float, float]:
    """Log-domain sum for ``x > 0``; returns ``(log E, first neglected term)``."""
    y = x ** (1.0 / nu)
    log_x = math.log(x)
    n_terms = int(2.0 * (y + 40.0) / nu) + 20
    while True:
        k = np.arange(n_terms + 1, dtype=float)
        log_terms = k * log_x - gammaln(nu * k + 1.0)
        peak = float(log_terms.max())
        # terms are log-concave in k, so a small trailing term ends the sum
        if log_terms[-1] < peak - 45.0 and log_terms[-1] < log_terms[-2]:
            break
        n_terms *= 2
    log_value = float(logsumexp(log_terms[:-1]))
    return log_value, math.exp(float(log_terms[-1]))


def _series_negative(nu: float, x: float) -> tuple[float, float]:
    """Alternating series for ``x < 0``; returns ``(E, first neglected term)``."""
    y = (-x) ** (1.0 / nu)
    if y <= _SMALL_Y_DOUBLE:
        terms = []
        k = 0
        while True:
            term = x**k / math.gamma(nu * k + 1.0)
            if k > 2 and abs(term) < 1e-18:
                return math.fsum(terms), abs(term)
            terms.append(term)
            k += 1
    # largest term is about exp(y); the result can be as small as exp(-y) (nu = 1)
    ctx = mpmath.MPContext()
    ctx.prec = 80 + int(math.ceil(2.0 * y / math.log(2.0)))
    mx = ctx.mpf(x)
    mnu = ctx.mpf(nu)
    total = ctx.mpf(1)
    power = ctx.mpf(1)
    prev = ctx.mpf(1)
    k = 0
    while True:
        k += 1
        power *= mx
        term = power * ctx.rgamma(mnu * k + 1)
        if abs(term) < abs(prev) and abs(term) <= ctx.mpf(1e-22) * abs(total):
            return float(total), float(abs(term))
        total += term
        prev = term


def _evaluate(nu: float, x: float) -> tuple[float, float | None, str, float]:
    """Core evaluator: ``(log_value, value or None if too large, method, err)``."""
    if x == 0.0:
        return 0.0, 1.0, "series", 0.0
    y = abs(x) ** (1.0 / nu)
    if x > 0.0:
        if y <= Y_SWITCH:
            log_value, err = _series_positive(nu, x)
            return log_value, math.exp(log_value), "series", err
        if nu == 1.0:
            log_value, err = x, 0.0
        else:
            corr, err = _algebraic_tail(nu, x)
            log_value = y - math.log(nu) + math.log1p(-nu * math.exp(-y) * corr)
        value = math.exp(log_value) if log_value <= _LOG_MAX else None
        return log_value, value, "asymptotic_positive", err
    if y <= Y_SWITCH:
        value, err = _series_negative(nu, x)
        return math.log(value), value, "series", err
    if nu == 1.0:
        # the algebraic expansion vanishes identically at nu = 1
        return x, math.exp(x), "asymptotic_negative", 0.0
    corr, err = _algebraic_tail(nu, x)
    value = -corr
    return math.log(value), value, "asymptotic_negative", err


def ml_eval(order, x: float) -> MlEvalResult:
    """Evaluate ``E_nu(x)``.

    Raises :class:`MlOverflowError` when the value exceeds the double range;
    the log form is still available through :func:`ml_log_eval`.
    """
    nu = _as_order(order).nu
    x = _check_x(x)
    log_value, value, method, err = _evaluate(nu, x)
    if value is None:
        raise MlOverflowError(
            f"E_{nu}({x}) = exp({log_value:.6g}) overflows; use ml_log_eval"
        )
    return MlEvalResult(value=value, log_value=log_value, method=method, est_abs_err=err)


def ml_log_eval(order, x: float) -> float:
    """``log E_nu(x)``; finite for every finite ``x`` since ``E_nu > 0`` on the real line."""
    nu = _as_order(order).nu
    x = _check_x(x)
    return _evaluate(nu, x)[0]


def ml(nu: float, x: float) -> float:
    """Shorthand for ``ml_eval(nu, x).value``."""
    return ml_eval(nu, x).value
