"""Exact one-dimensional samplers for the compound fractional Poisson process.

The chain is: one-sided stable ``S_nu(1)`` (Kanter's rejection-free
representation), inverse stable ``L_nu(t) = (t / S_nu(1))**nu``, fractional
Poisson count ``N = Poisson(lam * L_nu(t))`` and compound value
``sum_{k<=N} X_k``. Only marginals at a fixed ``t`` are produced.

Every sampler takes an explicit :class:`RngState` and an optional ``size``;
with ``size=None`` a Python scalar is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jumps import JumpLaw

__all__ = [
    "ProcessParams",
    "RngState",
    "sample_compound",
    "sample_fractional_poisson",
    "sample_inverse_stable",
    "sample_scaled",
    "sample_stable_subordinator",
]

_MASK64 = (1 << 64) - 1


class RngState:
    """Seeded, splittable random stream.

    Backed by the counter-based Philox generator; ``(seed, stream_id)`` are
    mixed through :class:`numpy.random.SeedSequence` so distinct stream ids
    give statistically independent substreams.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self._bitgen = np.random.Philox(ss)
        self.generator = np.random.Generator(self._bitgen)

    @property
    def counter(self) -> int:
        """Philox block counter; advances with every draw."""
        words = self._bitgen.state["state"]["counter"]
        return sum(int(w) << (64 * i) for i, w in enumerate(words))

    def substream(self, stream_id: int) -> "RngState":
        return RngState(self.seed, stream_id)

    def __repr__(self):
        return f"RngState(seed={self.seed}, stream_id={self.stream_id}, counter={self.counter})"


@dataclass(frozen=True)
class ProcessParams:
    """Fractional Poisson clock ``(nu, lam)``.

    ``nu = 1`` is accepted as the classical Poisson process (``L_1(t) = t``),
    used only as a comparison case.
    """

    nu: float
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "lam", float(self.lam))
        if not 0.0 < self.nu <= 1.0:
            raise ValueError(f"nu must lie in (0, 1] (1 = classical Poisson), got {self.nu!r}")
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ValueError(f"lambda must be a positive finite number, got {self.lam!r}")


def _check_nu(nu: float, allow_one: bool = False) -> float:
    nu = float(nu)
    upper_ok = nu <= 1.0 if allow_one else nu < 1.0
    if not (0.0 < nu and upper_ok):
        raise ValueError(f"nu must lie in (0, 1), got {nu!r}")
    return nu


def _check_t(t: float, strict: bool) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0.0 or (strict and t == 0.0):
        raise ValueError(f"t must be {'> 0' if strict else '>= 0'} and finite, got {t!r}")
    return t


def _scalar(draws, size):
    return float(draws) if size is None else draws


def sample_stable_subordinator(nu: float, rng: RngState, size=None):
    """Draw ``S_nu(1)`` with ``E[exp(-s*S)] = exp(-s**nu)``.

    ``S = sin(nu*U) * sin((1-nu)*U)**((1-nu)/nu) / sin(U)**(1/nu) * E**(-(1-nu)/nu)``
    with ``U ~ Uniform(0, pi)`` and ``E ~ Exp(1)``.
    """
    nu = _check_nu(nu)
    g = rng.generator
    # 1 - random() lies in (0, 1], keeping U away from 0
    u = math.pi * (1.0 - g.random(size))
    e = g.standard_exponential(size)
    s = (
        np.sin(nu * u)
        * np.sin((1.0 - nu) * u) ** ((1.0 - nu) / nu)
        / np.sin(u) ** (1.0 / nu)
        * e ** (-(1.0 - nu) / nu)
    )
    return _scalar(s, size)


def sample_inverse_stable(nu: float, t: float, rng: RngState, size=None):
    """Draw ``L_nu(t)`` via ``(t / S_nu(1))**nu``; ``nu = 1`` returns ``t``."""
    nu = _check_nu(nu, allow_one=True)
    t = _check_t(t, strict=False)
    if nu == 1.0 or t == 0.0:
        return _scalar(np.full(() if size is None else size, t), size)
    s = np.asarray(sample_stable_subordinator(nu, rng, size))
    return _scalar((t / s) ** nu, size)


def sample_fractional_poisson(params: ProcessParams, t: float, rng: RngState, size=None):
    """Draw ``N_{nu,lam}(t) = N_{1,lam}(L_nu(t))``."""
    t = _check_t(t, strict=False)
    if t == 0.0:
        counts = np.zeros(() if size is None else size, dtype=np.int64)
        return int(counts) if size is None else counts
    clock = sample_inverse_stable(params.nu, t, rng, size)
    counts = rng.generator.poisson(params.lam * np.asarray(clock))
    return int(counts) if size is None else counts


def sample_compound(
    params: ProcessParams,
    jump: JumpLaw,
    t: float,
    rng: RngState,
    size=None,
    aggregate: bool = True,
):
    """Draw ``S_{nu,lam}(t) = sum_{k <= N(t)} X_k``.

    ``aggregate`` draws the conditional sum from its closed-form law where one
    exists; otherwise jumps are drawn and summed one by one.
    """
    counts = np.asarray(sample_fractional_poisson(params, t, rng, size))
    total = jump.sum_of(counts, rng, aggregate=aggregate)
    return _scalar(total, size)


def sample_scaled(
    params: ProcessParams,
    jump: JumpLaw,
    t: float,
    exponent: float,
    rng: RngState,
    size=None,
    multiplier: float | None = None,
    aggregate: bool = True,
):
    """Draw ``m * S_{nu,lam}(t) / t`` with ``m = t**exponent`` unless ``multiplier`` is given."""
    t = _check_t(t, strict=True)
    m = t ** float(exponent) if multiplier is None else float(multiplier)
    s = np.asarray(sample_compound(params, jump, t, rng, size, aggregate=aggregate))
    return _scalar(m * s / t, size)
