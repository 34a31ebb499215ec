"""Moment generating functions and scaled-CGF limits.

Finite-``t`` MGFs are Mittag-Leffler evaluations; the limits
``Lambda(theta)`` are returned as :class:`CgfLimit` objects, callables whose
values live in ``[0, +inf]`` (``inf`` in-band outside the finiteness domain).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .jumps import JumpLaw
from .mittag_leffler import ml_eval, ml_log_eval
from .samplers import ProcessParams

__all__ = [
    "CgfDomainError",
    "CgfLimit",
    "ScalingRegime",
    "alpha_exponent",
    "cgf_classical_nu1",
    "cgf_limit_LD",
    "cgf_limit_MD",
    "interarrival_cgf",
    "interarrival_cgf_inverse",
    "log_mgf_compound",
    "mgf_compound",
    "mgf_inverse_stable",
    "psi_kappa",
]

# M_X(theta) - 1 at or below this is treated as M_X(theta) <= 1
MGF_SLACK = 1e-14

KINDS = ("LD", "MD_mu_zero", "MD_mu_pos", "MD_mu_neg", "NU1_classical")


class CgfDomainError(ValueError):
    """Argument outside the finiteness domain of an MGF or CGF."""


def _pow(base: float, exponent: float) -> float:
    try:
        return math.pow(base, exponent)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class CgfLimit:
    """A scaled CGF limit ``theta -> Lambda(theta)``.

    ``kind`` is one of ``LD``, ``MD_mu_zero``, ``MD_mu_pos``, ``MD_mu_neg``,
    ``NU1_classical``. LD and NU1_classical carry the jump law; the MD kinds
    only need ``mu`` or ``sigma2``.
    """

    kind: str
    nu: float
    lam: float
    mu: float = 0.0
    sigma2: float = 0.0
    jump: JumpLaw | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown CGF kind {self.kind!r}")

    @property
    def domain(self) -> tuple[float, float]:
        """Open interval where the limit is finite."""
        if self.jump is not None:
            return self.jump.mgf_domain
        return (-math.inf, math.inf)

    def __call__(self, theta: float) -> float:
        theta = float(theta)
        kind = self.kind
        if kind in ("LD", "NU1_classical"):
            if not self.jump.in_domain(theta):
                return math.inf
            excess = self.jump.mgf_minus_one(theta)
            if kind == "NU1_classical":
                return self.lam * excess
            if excess <= MGF_SLACK:
                return 0.0
            return _pow(self.lam * excess, 1.0 / self.nu)
        if kind == "MD_mu_zero":
            return _pow(0.5 * self.lam * theta * theta * self.sigma2, 1.0 / self.nu)
        if kind == "MD_mu_pos":
            return _pow(self.lam * theta * self.mu, 1.0 / self.nu) if theta > 0 else 0.0
        # MD_mu_neg
        return _pow(self.lam * theta * self.mu, 1.0 / self.nu) if theta < 0 else 0.0


def mgf_inverse_stable(nu: float, t: float, theta: float) -> float:
    """``E[exp(theta * L_nu(t))] = E_nu(theta * t**nu)``."""
    if not 0.0 < nu < 1.0 or not t > 0.0:
        raise ValueError(f"need 0 < nu < 1 and t > 0, got nu={nu!r}, t={t!r}")
    return ml_eval(nu, theta * t**nu).value


def _compound_argument(params: ProcessParams, jump: JumpLaw, t: float, theta: float) -> float:
    if not jump.in_domain(theta):
        raise CgfDomainError(
            f"E[exp({theta!r} X)] is infinite for {jump!r}; domain {jump.mgf_domain}"
        )
    return params.lam * jump.mgf_minus_one(theta) * t**params.nu


def mgf_compound(params: ProcessParams, jump: JumpLaw, t: float, theta: float) -> float:
    """Exact MGF ``E_nu(lam * (M_X(theta) - 1) * t**nu)`` of ``S_{nu,lam}(t)``."""
    return ml_eval(params.nu, _compound_argument(params, jump, t, theta)).value


def log_mgf_compound(params: ProcessParams, jump: JumpLaw, t: float, theta: float) -> float:
    """``log E[exp(theta * S_{nu,lam}(t))]``, finite well past double overflow."""
    return ml_log_eval(params.nu, _compound_argument(params, jump, t, theta))


def alpha_exponent(nu: float, mu: float) -> float:
    """Weak-convergence exponent: ``1 - nu/2`` if ``mu == 0`` else ``1 - nu``."""
    return 1.0 - nu / 2.0 if mu == 0 else 1.0 - nu


@dataclass(frozen=True)
class ScalingRegime:
    """Exponent ``alpha`` and moderate-deviation family ``a_t = t**-beta``.

    ``beta`` in ``(0, 1)`` is exactly the range for which ``a_t -> 0`` and
    ``t * a_t -> inf``.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.accepts(self.beta):
            raise ValueError(f"beta must lie in (0, 1) so that a_t -> 0 and t*a_t -> inf, got {self.beta!r}")

    @staticmethod
    def accepts(beta: float) -> bool:
        return 0.0 < beta < 1.0

    @classmethod
    def for_process(cls, nu: float, mu: float, beta: float = 0.5) -> "ScalingRegime":
        return cls(alpha=alpha_exponent(nu, mu), beta=beta)

    def a_t(self, t: float) -> float:
        return t ** (-self.beta)

    def ld_speed(self, t: float) -> float:
        return t

    def md_speed(self, t: float) -> float:
        return 1.0 / self.a_t(t)

    def weak_multiplier(self, t: float) -> float:
        """``t**alpha``: the factor in front of ``S(t)/t`` for weak convergence."""
        return t**self.alpha

    def md_multiplier(self, t: float) -> float:
        """``(a_t * t)**alpha``: the factor in front of ``S(t)/t`` for moderate deviations."""
        return (self.a_t(t) * t) ** self.alpha


def cgf_limit_LD(params: ProcessParams, jump: JumpLaw) -> CgfLimit:
    """``Lambda(theta) = (lam (M_X(theta) - 1))**(1/nu)`` where ``M_X > 1``, else 0."""
    return CgfLimit("LD", params.nu, params.lam, mu=jump.mean, sigma2=jump.variance, jump=jump)


def cgf_limit_MD(nu: float, lam: float, mu: float, sigma2: float = 0.0) -> CgfLimit:
    """Moderate-deviation limit; the kind follows the sign of ``mu``."""
    if mu == 0:
        if not sigma2 > 0:
            raise ValueError("the mu = 0 moderate-deviation limit needs sigma2 > 0")
        return CgfLimit("MD_mu_zero", nu, lam, mu=0.0, sigma2=sigma2)
    kind = "MD_mu_pos" if mu > 0 else "MD_mu_neg"
    return CgfLimit(kind, nu, lam, mu=mu, sigma2=sigma2)


def cgf_classical_nu1(lam: float, jump: JumpLaw) -> CgfLimit:
    """Compound Poisson CGF ``lam (M_X(theta) - 1)`` (the ``nu = 1`` case)."""
    return CgfLimit("NU1_classical", 1.0, lam, mu=jump.mean, sigma2=jump.variance, jump=jump)


def interarrival_cgf(nu: float, lam: float, eta: float) -> float:
    """``kappa(eta) = log(lam / (lam + (-eta)**nu))`` for ``eta < 0``.

    Mittag-Leffler interarrival times have no exponential moments, so
    ``eta >= 0`` is rejected.
    """
    if not eta < 0:
        raise CgfDomainError(f"kappa is defined for eta < 0, got {eta!r}")
    return -math.log1p((-eta) ** nu / lam)


def interarrival_cgf_inverse(nu: float, lam: float, value: float) -> float:
    """Closed-form inverse of ``kappa``: the ``eta < 0`` with ``kappa(eta) = value < 0``."""
    if not value < 0:
        raise CgfDomainError(f"kappa takes values in (-inf, 0), got {value!r}")
    return -_pow(lam * math.expm1(-value), 1.0 / nu)


def psi_kappa(nu: float, lam: float, theta: float) -> float:
    """``Psi_kappa(theta) = -kappa^{-1}(-theta)`` for ``theta > 0``."""
    if not theta > 0:
        raise CgfDomainError(f"Psi_kappa is defined for theta > 0, got {theta!r}")
    return -interarrival_cgf_inverse(nu, lam, -theta)
