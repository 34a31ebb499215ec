"""Light-tailed jump laws for the compound process.

Each law exposes its mean, variance, moment generating function (``inf``
outside the open finiteness domain), a sampler, and ``sum_of`` which draws
the sum of ``n`` i.i.d. jumps for an array of counts. Where the sum has a
closed-form law (normal, binomial, gamma, point mass) it is drawn in one shot;
``aggregate=False`` forces explicit summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Degenerate",
    "Exponential",
    "Gaussian",
    "JumpLaw",
    "TwoPoint",
    "Uniform",
    "jump_from_config",
    "parse_jump",
]

# explicit summation works through at most this many jump draws at a time
_SUM_CHUNK = 1 << 22


class JumpLaw:
    """Base class; subclasses are frozen dataclasses."""

    kind: str = ""

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def variance(self) -> float:
        raise NotImplementedError

    @property
    def mgf_domain(self) -> tuple[float, float]:
        """Open interval on which the MGF is finite."""
        return (-math.inf, math.inf)

    def mgf_minus_one(self, theta: float) -> float:
        """``E[exp(theta*X)] - 1``, accurate near ``theta = 0``."""
        raise NotImplementedError

    def mgf(self, theta: float) -> float:
        return 1.0 + self.mgf_minus_one(theta)

    def in_domain(self, theta: float) -> bool:
        lo, hi = self.mgf_domain
        return lo < theta < hi

    def sample(self, rng, size=None):
        raise NotImplementedError

    def sum_of(self, counts, rng, aggregate: bool = True) -> np.ndarray:
        """Draw ``sum_{i<n} X_i`` for every ``n`` in ``counts`` (empty sum is 0)."""
        counts = np.asarray(counts, dtype=np.int64)
        if aggregate:
            return self._aggregate(counts, rng)
        return self._explicit_sum(counts, rng)

    def _aggregate(self, counts, rng) -> np.ndarray:
        return self._explicit_sum(counts, rng)

    def _explicit_sum(self, counts, rng) -> np.ndarray:
        flat = counts.ravel()
        out = np.zeros(flat.shape, dtype=float)
        start = 0
        while start < flat.size:
            # grow the block until it holds about _SUM_CHUNK jump draws
            csum = np.cumsum(flat[start:])
            stop = start + max(1, int(np.searchsorted(csum, _SUM_CHUNK, side="right")))
            block = flat[start:stop]
            total = int(block.sum())
            if total:
                draws = np.asarray(self.sample(rng, total), dtype=float)
                owner = np.repeat(np.arange(block.size), block)
                out[start:stop] = np.bincount(owner, weights=draws, minlength=block.size)
            start = stop
        return out.reshape(counts.shape)

    def spec(self) -> str:
        """Mini-language form accepted by :func:`parse_jump`."""
        raise NotImplementedError


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class Degenerate(JumpLaw):
    c: float
    kind = "deg"

    def __post_init__(self):
        _check_finite(c=self.c)

    @property
    def mean(self):
        return float(self.c)

    @property
    def variance(self):
        return 0.0

    def mgf_minus_one(self, theta):
        return _expm1(theta * self.c)

    def sample(self, rng, size=None):
        if size is None:
            return float(self.c)
        return np.full(size, float(self.c))

    def _aggregate(self, counts, rng):
        return counts * float(self.c)

    def spec(self):
        return f"deg:{self.c!r}"


@dataclass(frozen=True)
class Gaussian(JumpLaw):
    mu: float
    sigma2: float
    kind = "gauss"

    def __post_init__(self):
        _check_finite(mu=self.mu, sigma2=self.sigma2)
        if self.sigma2 < 0:
            raise ValueError(f"variance must be >= 0, got {self.sigma2!r}")

    @property
    def mean(self):
        return float(self.mu)

    @property
    def variance(self):
        return float(self.sigma2)

    def mgf_minus_one(self, theta):
        return _expm1(theta * self.mu + 0.5 * theta * theta * self.sigma2)

    def sample(self, rng, size=None):
        return rng.generator.normal(self.mu, math.sqrt(self.sigma2), size)

    def _aggregate(self, counts, rng):
        # conditional on n, the sum is Normal(n*mean, n*variance)
        z = rng.generator.standard_normal(counts.shape)
        return counts * self.mu + np.sqrt(counts * self.sigma2) * z

    def spec(self):
        return f"gauss:{self.mu!r},{self.sigma2!r}"


@dataclass(frozen=True)
class Uniform(JumpLaw):
    a: float
    b: float
    kind = "unif"

    def __post_init__(self):
        _check_finite(a=self.a, b=self.b)
        if not self.a < self.b:
            raise ValueError(f"uniform jump needs a < b, got ({self.a!r}, {self.b!r})")

    @property
    def mean(self):
        return 0.5 * (self.a + self.b)

    @property
    def variance(self):
        return (self.b - self.a) ** 2 / 12.0

    def mgf_minus_one(self, theta):
        w = theta * (self.b - self.a)
        # exp(theta*a) * expm1(w)/w - 1, written as expm1(theta*a + log(expm1(w)/w))
        if abs(w) < 1e-3:
            log_ratio = w / 2.0 + w * w / 24.0 - w**4 / 2880.0
        elif w > 700.0:
            log_ratio = w - math.log(w) + math.log1p(-math.exp(-w))
        else:
            log_ratio = math.log(math.expm1(w) / w)
        return _expm1(theta * self.a + log_ratio)

    def sample(self, rng, size=None):
        return rng.generator.uniform(self.a, self.b, size)

    def spec(self):
        return f"unif:{self.a!r},{self.b!r}"


@dataclass(frozen=True)
class TwoPoint(JumpLaw):
    value_a: float
    value_b: float
    prob_a: float
    kind = "twopoint"

    def __post_init__(self):
        _check_finite(value_a=self.value_a, value_b=self.value_b, prob_a=self.prob_a)
        if not 0.0 <= self.prob_a <= 1.0:
            raise ValueError(f"prob_a must lie in [0, 1], got {self.prob_a!r}")

    @property
    def mean(self):
        p = self.prob_a
        return p * self.value_a + (1.0 - p) * self.value_b

    @property
    def variance(self):
        p = self.prob_a
        return p * (1.0 - p) * (self.value_a - self.value_b) ** 2

    def mgf_minus_one(self, theta):
        p = self.prob_a
        return p * _expm1(theta * self.value_a) + (1.0 - p) * _expm1(theta * self.value_b)

    def sample(self, rng, size=None):
        hit = rng.generator.random(size) < self.prob_a
        draws = np.where(hit, self.value_a, self.value_b)
        return float(draws) if size is None else draws

    def _aggregate(self, counts, rng):
        k = rng.generator.binomial(counts, self.prob_a)
        return k * self.value_a + (counts - k) * self.value_b

    def spec(self):
        return f"twopoint:{self.value_a!r},{self.value_b!r},{self.prob_a!r}"


@dataclass(frozen=True)
class Exponential(JumpLaw):
    rate: float
    kind = "exp"

    def __post_init__(self):
        _check_finite(rate=self.rate)
        if self.rate <= 0:
            raise ValueError(f"exponential rate must be > 0, got {self.rate!r}")

    @property
    def mean(self):
        return 1.0 / self.rate

    @property
    def variance(self):
        return 1.0 / self.rate**2

    @property
    def mgf_domain(self):
        return (-math.inf, float(self.rate))

    def mgf_minus_one(self, theta):
        if theta >= self.rate:
            return math.inf
        return theta / (self.rate - theta)

    def sample(self, rng, size=None):
        return rng.generator.exponential(1.0 / self.rate, size)

    def _aggregate(self, counts, rng):
        # Gamma(n, 1/rate); shape 0 gives exactly 0
        return rng.generator.gamma(counts.astype(float), 1.0 / self.rate)

    def spec(self):
        return f"exp:{self.rate!r}"


def _expm1(v: float) -> float:
    try:
        return math.expm1(v)
    except OverflowError:
        return math.inf


_KINDS = {
    "deg": (Degenerate, 1),
    "degenerate": (Degenerate, 1),
    "gauss": (Gaussian, 2),
    "gaussian": (Gaussian, 2),
    "normal": (Gaussian, 2),
    "unif": (Uniform, 2),
    "uniform": (Uniform, 2),
    "twopoint": (TwoPoint, 3),
    "exp": (Exponential, 1),
    "exponential": (Exponential, 1),
}


def jump_from_config(kind: str, params) -> JumpLaw:
    """Build a jump law from a kind name and a parameter list."""
    try:
        cls, arity = _KINDS[kind.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown jump kind {kind!r}; expected one of deg, gauss, unif, twopoint, exp"
        ) from None
    params = [float(p) for p in params]
    if len(params) != arity:
        raise ValueError(f"jump kind {kind!r} takes {arity} parameter(s), got {len(params)}")
    return cls(*params)


def parse_jump(spec: str) -> JumpLaw:
    """Parse ``kind:p1,p2,...``, e.g. ``gauss:0,1``, ``deg:1``, ``twopoint:1,-1,0.5``."""
    kind, sep, rest = spec.partition(":")
    if not sep or not rest.strip():
        raise ValueError(f"jump spec must look like 'kind:p1,p2', got {spec!r}")
    try:
        params = [float(p) for p in rest.split(",")]
    except ValueError:
        raise ValueError(f"non-numeric parameter in jump spec {spec!r}") from None
    return jump_from_config(kind, params)
