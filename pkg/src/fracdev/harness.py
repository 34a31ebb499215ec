"""Monte Carlo experiments against the asymptotic statements.

Three experiments share one configuration format:

* ``run_weak_convergence``: empirical MGF of ``t**alpha * S(t)/t`` against the
  limit ``E_nu(lam*sigma2*theta**2/2)`` (``mu = 0``) or ``E_nu(lam*mu*theta)``.
* ``run_md_tail``: tail probabilities of ``(a_t t)**alpha * S(t)/t`` with
  ``a_t = t**-beta``; ``-a_t log p_hat`` is compared with the closed-form rate.
* ``run_lln_decay``: ``P(|S(t)/t - center| > eps)`` along the ``t`` grid.

Draws are split across ``workers`` substreams of one seed and merged in
worker order, so output depends only on ``(config, seed, workers)``.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .jumps import JumpLaw, jump_from_config
from .kernels import ScalingRegime, alpha_exponent
from .mittag_leffler import MlOverflowError, ml_eval
from .rates import rate_MD_closed
from .samplers import ProcessParams, RngState, sample_scaled

__all__ = [
    "ExperimentConfig",
    "ScaledMeanRow",
    "TailEstimate",
    "LlnRow",
    "WeakConvRow",
    "builtin_config",
    "decreasing_in_t",
    "draw_scaled",
    "run_lln_decay",
    "run_md_tail",
    "run_scaled_mean",
    "run_weak_convergence",
    "wilson_interval",
]

WORKERS_ENV = "FRACDEV_WORKERS"
CHUNK = 1 << 18
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class ExperimentConfig:
    params: ProcessParams
    jump: JumpLaw
    seed: int
    n_samples: int
    t_grid: tuple[float, ...]
    beta: float = 0.5
    x_grid: tuple[float, ...] = ()
    theta_grid: tuple[float, ...] = ()
    workers: int = 1
    aggregate: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.n_samples <= 0:
            raise ValueError(f"n_samples must be > 0, got {self.n_samples}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if not self.t_grid or any(not (t > 0 and math.isfinite(t)) for t in self.t_grid):
            raise ValueError("t_grid must be a nonempty list of positive numbers")
        ScalingRegime(alpha_exponent(self.params.nu, self.jump.mean), self.beta)

    @classmethod
    def from_dict(cls, d: dict, workers: int | None = None) -> "ExperimentConfig":
        try:
            jump = d["jump"]
            env = os.environ.get(WORKERS_ENV)
            if workers is None and env:
                workers = int(env)
            return cls(
                params=ProcessParams(d["nu"], d["lambda"]),
                jump=jump_from_config(jump["kind"], jump["params"]),
                seed=int(d["seed"]),
                n_samples=int(d["n_samples"]),
                t_grid=tuple(float(t) for t in d["t_grid"]),
                beta=float(d.get("beta", 0.5)),
                x_grid=tuple(float(x) for x in d.get("x_grid", ())),
                theta_grid=tuple(float(x) for x in d.get("theta_grid", ())),
                workers=int(workers if workers is not None else d.get("workers", 1)),
            )
        except KeyError as exc:
            raise ValueError(f"config is missing key {exc.args[0]!r}") from None

    @classmethod
    def load(cls, path, workers: int | None = None) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh), workers=workers)

    def to_dict(self) -> dict:
        return {
            "nu": self.params.nu,
            "lambda": self.params.lam,
            "jump": {"kind": self.jump.kind, "params": list(astuple(self.jump))},
            "seed": self.seed,
            "n_samples": self.n_samples,
            "t_grid": list(self.t_grid),
            "beta": self.beta,
            "x_grid": list(self.x_grid),
            "theta_grid": list(self.theta_grid),
            "workers": self.workers,
        }

    @property
    def mu(self) -> float:
        return self.jump.mean

    @property
    def alpha(self) -> float:
        return alpha_exponent(self.params.nu, self.mu)


def builtin_config(name: str) -> Path:
    """Path of a shipped configuration (``weak_mu0``, ``weak_mu1``, ``md_tail``, ``lln``, ...)."""
    ref = resources.files("fracdev") / "configs" / f"{name}.json"
    if not ref.is_file():
        raise FileNotFoundError(f"no built-in config named {name!r}")
    return Path(str(ref))


def _split(n: int, workers: int) -> list[int]:
    base, extra = divmod(n, workers)
    return [base + (i < extra) for i in range(workers)]


def draw_scaled(config: ExperimentConfig, t: float, multiplier: float) -> np.ndarray:
    """``n_samples`` draws of ``multiplier * S(t) / t``, reproducible per worker count."""

    def work(worker: int, count: int) -> np.ndarray:
        rng = RngState(config.seed, worker)
        parts = []
        done = 0
        while done < count:
            size = min(CHUNK, count - done)
            parts.append(
                sample_scaled(
                    config.params, config.jump, t, 0.0, rng,
                    size=size, multiplier=multiplier, aggregate=config.aggregate,
                )
            )
            done += size
        return np.concatenate(parts) if parts else np.empty(0)

    sizes = _split(config.n_samples, config.workers)
    if config.workers == 1:
        return work(0, sizes[0])
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        parts = list(pool.map(work, range(config.workers), sizes))
    return np.concatenate(parts)


def wilson_interval(hits: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    p = hits / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if hits == 0 else max(0.0, min(p, centre - half))
    hi = 1.0 if hits == n else min(1.0, max(p, centre + half))
    return lo, hi


@dataclass(frozen=True)
class WeakConvRow:
    theta: float
    empirical_mgf: float
    std_err: float
    limit_mgf: float
    z_score: float
    overflow: bool = False


@dataclass(frozen=True)
class ScaledMeanRow:
    t: float
    mean: float
    std_err: float
    limit_mean: float
    z_score: float


@dataclass(frozen=True)
class TailEstimate:
    t: float
    a_t: float
    x: float
    tail: str  # "upper" for P(Y >= x), "lower" for P(Y <= x)
    n: int
    hits: int
    p_hat: float
    ci_low: float
    ci_high: float
    empirical_rate: float | None  # None when there are no hits
    model_rate: float


@dataclass(frozen=True)
class LlnRow:
    t: float
    eps: float
    center: float
    n: int
    hits: int
    p_hat: float
    ci_low: float
    ci_high: float


def _limit_mgf(config: ExperimentConfig, theta: float) -> float:
    nu, lam, mu = config.params.nu, config.params.lam, config.mu
    x = 0.5 * lam * config.jump.variance * theta * theta if mu == 0 else lam * mu * theta
    try:
        return ml_eval(nu, x).value
    except MlOverflowError:
        return math.inf


def _z(diff: float, se: float) -> float:
    if se > 0:
        return diff / se
    return 0.0 if diff == 0 else math.copysign(math.inf, diff)


def run_weak_convergence(config: ExperimentConfig) -> list[WeakConvRow]:
    """Empirical MGF of the ``alpha``-scaled variable at the largest ``t``, one row per theta."""
    if not config.theta_grid:
        raise ValueError("theta_grid must be nonempty for the weak-convergence experiment")
    t = config.t_grid[-1]
    y = draw_scaled(config, t, t**config.alpha)
    n = y.size
    rows = []
    for theta in sorted(config.theta_grid):
        limit = _limit_mgf(config, theta)
        with np.errstate(over="ignore"):
            e = np.exp(theta * y)
        if not (np.all(np.isfinite(e)) and math.isfinite(limit)):
            rows.append(WeakConvRow(theta, math.inf, math.inf, limit, math.nan, True))
            continue
        mean = float(e.mean())
        se = float(e.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
        overflow = not math.isfinite(se)
        rows.append(WeakConvRow(theta, mean, se, limit, _z(mean - limit, se), overflow))
    return rows


def run_scaled_mean(config: ExperimentConfig) -> ScaledMeanRow:
    """Mean of the ``alpha``-scaled variable against the mean of its weak limit.

    The limit mean is ``lam*mu/Gamma(1+nu)`` for ``mu != 0`` and 0 otherwise.
    """
    t = config.t_grid[-1]
    y = draw_scaled(config, t, t**config.alpha)
    nu, lam, mu = config.params.nu, config.params.lam, config.mu
    limit = lam * mu / math.gamma(1.0 + nu)
    mean = float(y.mean())
    se = float(y.std(ddof=1) / math.sqrt(y.size)) if y.size > 1 else math.inf
    return ScaledMeanRow(t, mean, se, limit, _z(mean - limit, se))


def _tail_side(x: float, mu: float) -> str:
    if x > 0:
        return "upper"
    if x < 0:
        return "lower"
    return "upper" if mu >= 0 else "lower"


def run_md_tail(config: ExperimentConfig) -> list[TailEstimate]:
    """Tail estimates of ``(a_t t)**alpha S(t)/t`` for every ``(t, x)`` pair."""
    if not config.x_grid:
        raise ValueError("x_grid must be nonempty for the moderate-deviation experiment")
    regime = ScalingRegime.for_process(config.params.nu, config.mu, config.beta)
    nu, lam, mu, sigma2 = config.params.nu, config.params.lam, config.mu, config.jump.variance
    rows = []
    for t in config.t_grid:
        a_t = regime.a_t(t)
        y = draw_scaled(config, t, regime.md_multiplier(t))
        n = y.size
        for x in config.x_grid:
            side = _tail_side(x, mu)
            hits = int(np.count_nonzero(y >= x if side == "upper" else y <= x))
            p_hat = hits / n
            lo, hi = wilson_interval(hits, n)
            emp = abs(-a_t * math.log(p_hat)) if hits else None
            model = rate_MD_closed(nu, lam, mu, sigma2, x)
            rows.append(TailEstimate(t, a_t, x, side, n, hits, p_hat, lo, hi, emp, model))
    return rows


def run_lln_decay(config: ExperimentConfig) -> list[LlnRow]:
    """``P(|S(t)/t - center| > eps)`` for ``eps`` in ``x_grid``.

    ``center`` is 0 for ``nu < 1`` and ``lam * mu`` for the classical ``nu = 1`` control.
    """
    if not config.x_grid:
        raise ValueError("x_grid (the eps values) must be nonempty for the LLN experiment")
    nu, lam = config.params.nu, config.params.lam
    center = lam * config.mu if nu == 1.0 else 0.0
    rows = []
    for t in config.t_grid:
        y = draw_scaled(config, t, 1.0)
        n = y.size
        dev = np.abs(y - center)
        for eps in config.x_grid:
            hits = int(np.count_nonzero(dev > eps))
            lo, hi = wilson_interval(hits, n)
            rows.append(LlnRow(t, eps, center, n, hits, hits / n, lo, hi))
    return rows


def decreasing_in_t(rows, key: str, value: str, strict: bool = False) -> dict[float, bool]:
    """Per ``key`` (``x`` or ``eps``), whether ``value`` is non-increasing along ``t``.

    Missing values (``None``) break the trend; keys with no values at all are omitted.
    """
    series: dict[float, list[tuple[float, float | None]]] = {}
    for r in rows:
        series.setdefault(getattr(r, key), []).append((r.t, getattr(r, value)))
    out = {}
    for k, pts in series.items():
        vals = [v for _, v in sorted(pts)]
        if all(v is None for v in vals):
            continue
        if any(v is None for v in vals):
            out[k] = False
            continue
        pairs = zip(vals, vals[1:])
        out[k] = all(b < a if strict else b <= a for a, b in pairs)
    return out
