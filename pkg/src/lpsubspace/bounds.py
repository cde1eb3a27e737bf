"""Closed-form and numerically inverted constants of the recovery theory.

Covers the one-dimensional marginal mass function psi of the inlier
distribution and its inverse xi1 at (1 + atom)/2, the marginal second
moment delta_star, the stability radius f of the noisy-recovery guarantee,
the noise ceiling below which that radius is informative, and the lower
bounds on the p > 1 exclusion radius for the two-line special case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .exceptions import ConfigError, ParameterError

BALL = "uniform-ball"
SPHERE = "uniform-sphere"


@dataclass(frozen=True)
class InlierDistribution:
    """Descriptor of a spherically symmetric in-subspace distribution.

    ``kind`` is uniform on the d-ball or on the (d-1)-sphere of the given
    radius; ``atom`` is the point mass at the origin (zero for both kinds,
    kept general because the constants depend on it).
    """

    dim: int
    radius: float = 1.0
    kind: str = BALL
    atom: float = 0.0

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigError("dimension must be at least 1")
        if not (0 < self.radius):
            raise ConfigError("radius must be positive")
        if self.kind not in (BALL, SPHERE):
            raise ConfigError(f"unsupported distribution {self.kind!r}")
        if not (0 <= self.atom < 1):
            raise ConfigError("atom must lie in [0, 1)")


def _marginal_cdf(exponent: int, m: float) -> float:
    """Integral of cos^exponent(phi) over [0, arcsin(m)] / over [0, pi/2].

    This is the mass of the band {|s| < m} for a marginal with density
    proportional to (1 - s^2)^((exponent - 1)/2) on [-1, 1]; the sine
    substitution keeps the integrand smooth at the endpoints.
    """
    if m <= 0:
        return 0.0
    if m >= 1:
        return 1.0
    num, _ = quad(lambda phi: math.cos(phi) ** exponent, 0.0, math.asin(m),
                  epsabs=1e-14, epsrel=1e-13)
    den, _ = quad(lambda phi: math.cos(phi) ** exponent, 0.0, math.pi / 2,
                  epsabs=1e-14, epsrel=1e-13)
    return num / den


def psi(mu1: InlierDistribution, t: float) -> float:
    """Mass of {x : |x . v| < t} for a unit vector v in the subspace.

    Well defined by spherical symmetry; non-decreasing in t, equal to the
    atom at t = 0+ and to 1 for t >= radius.
    """
    if t < 0:
        raise ParameterError("t must be nonnegative")
    if t == 0:
        return mu1.atom
    d, R = mu1.dim, mu1.radius
    m = min(t / R, 1.0)
    if mu1.kind == BALL:
        cont = _marginal_cdf(d, m)
    else:
        if d == 1:
            # two-point marginal at +-R
            cont = 1.0 if t > R else 0.0
        else:
            cont = _marginal_cdf(d - 2, m)
    return mu1.atom + (1.0 - mu1.atom) * cont


def xi1(mu1: InlierDistribution) -> float:
    """psi^{-1}((1 + atom)/2), found by bisection to residual <= 1e-12."""
    if mu1.kind == SPHERE and mu1.dim == 1:
        raise ConfigError(
            "psi is a step function for the 1-d sphere and has no inverse"
        )
    target = (1.0 + mu1.atom) / 2.0
    lo, hi = 0.0, mu1.radius
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = psi(mu1, mid)
        if abs(val - target) <= 1e-13:
            break
        if val < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16 * mu1.radius:
            break
    if abs(psi(mu1, mid) - target) > 1e-12:
        raise ConfigError("bisection failed to invert psi to the 1e-12 target")
    return mid


def delta_star(mu1: InlierDistribution) -> float:
    """Second moment E[(v . x)^2] of a one-dimensional marginal.

    For the uniform ball of radius R in d dimensions this equals
    R^2 / (d + 2).  A common statement of the same constant quotes
    R / (d + 2), measuring at unit radius and scaling linearly; this
    function always returns the second moment.
    """
    if mu1.kind != BALL:
        raise ConfigError("delta_star is defined here for the uniform ball only")
    return mu1.radius**2 / (mu1.dim + 2)


def _common_factor(p: float, mu1: InlierDistribution) -> float:
    return (1.0 - mu1.atom) ** (1.0 / p) * 2.0 ** ((p - 3.0) / p)


def stability_radius(
    p: float,
    d: int,
    K: int,
    alpha0: float,
    alpha1: float,
    mu1: InlierDistribution,
    eps: float,
) -> float:
    """Radius of the ball around the true subspace that contains the global
    lp minimizer under noise level eps.

    For 0 < p <= 1 (any K):
        f = pi sqrt(d) xi1 eps / ((alpha0 + 2 alpha1 - 1)^(1/p)
                                   (1 - atom)^(1/p) 2^((p-3)/p)),
    and for p > 1 with K = 1 the variant with p^(1/p) eps^(1/p) and
    alpha1^(1/p).  The result is capped at pi sqrt(d) / 2, where the ball
    is the whole space.
    """
    if p <= 0:
        raise ParameterError("p must be positive")
    if eps < 0:
        raise ParameterError("eps must be nonnegative")
    if p > 1 and K > 1:
        raise ParameterError("the p > 1 radius is only available for K = 1")
    xi = xi1(mu1)
    cap = math.pi * math.sqrt(d) / 2.0
    if p <= 1:
        lead = alpha0 + 2.0 * alpha1 - 1.0
        if lead <= 0:
            raise ParameterError(
                "alpha0 + 2*alpha1 - 1 must be positive for the p <= 1 radius"
            )
        f = math.pi * math.sqrt(d) * xi * eps / (lead ** (1.0 / p) * _common_factor(p, mu1))
    else:
        if alpha1 <= 0:
            raise ParameterError("alpha1 must be positive")
        f = (
            math.pi
            * math.sqrt(d)
            * xi
            * p ** (1.0 / p)
            * eps ** (1.0 / p)
            / (alpha1 ** (1.0 / p) * _common_factor(p, mu1))
        )
    return min(f, cap)


def eps_upper(
    p: float,
    d: int,
    K: int,
    alpha0: float,
    alpha1: float,
    mu1: InlierDistribution,
) -> float:
    """Largest noise level at which the stability radius stays informative
    (below pi sqrt(d) / 2)."""
    if p <= 0:
        raise ParameterError("p must be positive")
    if p > 1 and K > 1:
        raise ParameterError("the p > 1 bound is only available for K = 1")
    xi = xi1(mu1)
    if p <= 1:
        lead = alpha0 + 2.0 * alpha1 - 1.0
        if lead <= 0:
            raise ParameterError(
                "alpha0 + 2*alpha1 - 1 must be positive for the p <= 1 bound"
            )
        return lead ** (1.0 / p) * (1.0 - mu1.atom) ** (1.0 / p) / (
            2.0 ** (3.0 / p) * xi
        )
    return (
        alpha1
        * (1.0 - mu1.atom)
        * 2.0 ** (p - 3.0)
        / (p * (math.pi * math.sqrt(d) * xi) ** p)
    )


def energy_gap_lower_bound(mean_tilt_norm: float, p: float) -> float:
    """Lower bound on the gap between the energy at the true subspace and
    the global minimum, from the Frobenius norm of the expected tilt matrix.

    p >= 2:     (p/2) * m^2
    1 < p < 2:  (p-1) p^(1/(p-1)) 2^((p-4)/(p-1)) * m^(p/(p-1))
    """
    if p <= 1:
        raise ParameterError("the gap bound requires p > 1")
    m = mean_tilt_norm
    if m < 0:
        raise ParameterError("the norm must be nonnegative")
    if p >= 2:
        return 0.5 * p * m**2
    return (p - 1.0) * p ** (1.0 / (p - 1.0)) * 2.0 ** ((p - 4.0) / (p - 1.0)) * m ** (
        p / (p - 1.0)
    )


def two_line_mean_tilt_norm(p: float, alpha2: float, theta: float) -> float:
    """Norm of the expected tilt matrix at the first of two lines in the
    plane carrying uniform unit segments with weights (alpha1, alpha2) and
    angle theta: alpha2 cos(theta) sin(theta)^(p-1) / (p + 1)."""
    if p <= 1:
        raise ParameterError("defined for p > 1")
    if not (0 <= theta <= math.pi / 2):
        raise ParameterError("theta must lie in [0, pi/2]")
    if not (0 <= alpha2 <= 1):
        raise ParameterError("alpha2 must lie in [0, 1]")
    return alpha2 * math.cos(theta) * math.sin(theta) ** (p - 1.0) / (p + 1.0)


def kappa_delta_lower_bound(p: float, alpha2: float, theta: float) -> float:
    """Closed-form lower bound for the exclusion radius and noise ceiling of
    the p > 1 impossibility statement, for two lines in the plane carrying
    uniform unit segments at angle theta:

    p >= 2:     alpha2^2 cos^2(theta) sin^(2(p-1))(theta) / (8 (p+1)^2)
    1 < p < 2:  2^((p-4)/(p-1)) (p-1) p^(1/(p-1)) (p+1)^((p-1)/p)
                * alpha2^(p/(p-1)) sin^p(theta) cos^(p/(p-1))(theta)

    Vanishes as alpha2 -> 0 or theta -> 0 or pi/2.
    """
    if p <= 1:
        raise ParameterError("the exclusion bound requires p > 1")
    if not (0 <= theta <= math.pi / 2):
        raise ParameterError("theta must lie in [0, pi/2]")
    if not (0 <= alpha2 <= 1):
        raise ParameterError("alpha2 must lie in [0, 1]")
    if p >= 2:
        return (
            alpha2**2
            * math.cos(theta) ** 2
            * math.sin(theta) ** (2.0 * (p - 1.0))
            / (8.0 * (p + 1.0) ** 2)
        )
    return (
        2.0 ** ((p - 4.0) / (p - 1.0))
        * (p - 1.0)
        * p ** (1.0 / (p - 1.0))
        * (p + 1.0) ** ((p - 1.0) / p)
        * alpha2 ** (p / (p - 1.0))
        * math.sin(theta) ** p
        * math.cos(theta) ** (p / (p - 1.0))
    )


def kappa_delta_general(p: float, alpha2: float, theta: float) -> float:
    """The same exclusion bound assembled from its parts: the expected tilt
    norm fed through the energy-gap bound, divided by 4p."""
    gap = energy_gap_lower_bound(two_line_mean_tilt_norm(p, alpha2, theta), p)
    return gap / (4.0 * p)


@dataclass(frozen=True)
class ConstantsReport:
    """Bundle of the theory constants for one parameter setting."""

    p: float
    d: int
    K: int
    alpha0: float
    alpha1: float
    eps: float
    mu1: InlierDistribution
    xi1: float
    delta_star: float | None
    delta_star_unit_radius: float | None
    f: float | None
    f_capped: bool | None
    eps_upper: float | None
    zeta1_lower: float | None = None
    kappa0_lower: float | None = None

    def to_dict(self) -> dict:
        return {
            "inputs": {
                "p": self.p,
                "d": self.d,
                "K": self.K,
                "alpha0": self.alpha0,
                "alpha1": self.alpha1,
                "eps": self.eps,
                "mu1": {
                    "dim": self.mu1.dim,
                    "radius": self.mu1.radius,
                    "kind": self.mu1.kind,
                    "atom": self.mu1.atom,
                },
            },
            "xi1": self.xi1,
            "delta_star": self.delta_star,
            "delta_star_unit_radius": self.delta_star_unit_radius,
            "f": self.f,
            "f_capped": self.f_capped,
            "eps_upper": self.eps_upper,
            "zeta1_lower": self.zeta1_lower,
            "kappa0_lower": self.kappa0_lower,
        }


def constants_report(
    p: float,
    d: int,
    K: int,
    alpha0: float,
    alpha1: float,
    mu1: InlierDistribution,
    eps: float,
    alpha2: float | None = None,
    theta: float | None = None,
) -> ConstantsReport:
    """Assemble every constant available for the given parameter regime."""
    xi = xi1(mu1)
    ds = ds_unit = None
    if mu1.kind == BALL:
        ds = delta_star(mu1)
        ds_unit = 1.0 / (mu1.dim + 2)
    f = f_capped = e_up = None
    if p <= 1 or K == 1:
        f = stability_radius(p, d, K, alpha0, alpha1, mu1, eps)
        f_capped = f >= math.pi * math.sqrt(d) / 2.0
        e_up = eps_upper(p, d, K, alpha0, alpha1, mu1)
    zeta = kappa = None
    if p > 1 and alpha2 is not None and theta is not None:
        zeta = energy_gap_lower_bound(two_line_mean_tilt_norm(p, alpha2, theta), p)
        kappa = kappa_delta_lower_bound(p, alpha2, theta)
    return ConstantsReport(
        p=p,
        d=d,
        K=K,
        alpha0=alpha0,
        alpha1=alpha1,
        eps=eps,
        mu1=mu1,
        xi1=xi,
        delta_star=ds,
        delta_star_unit_radius=ds_unit,
        f=f,
        f_capped=f_capped,
        eps_upper=e_up,
        zeta1_lower=zeta,
        kappa0_lower=kappa,
    )
