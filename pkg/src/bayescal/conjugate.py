"""Normal-Gamma conjugate machinery and its Student-t posterior predictive.

Each hypothesis class gets a Gaussian score model with unknown mean and
precision. The conjugate prior used throughout is

    mean | precision ~ Normal(mu0, 1 / (beta * precision))
    precision        ~ Gamma(a, rate=b)

Note the gamma is parametrized by shape and *rate* (not scale); the update
formulas below depend on that convention and libraries disagree, so it is
fixed here once. Conditioning on data keeps the posterior in the family, and
the predictive density of a single new score has a closed Student-t form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ValidationError
from .scores import SufficientStats, _LOG_2PI, _scalar_like

#: The "much smaller than one" default used for beta, a and b in the
#: non-informative prior. Small enough to stay diffuse at single-digit n
#: while keeping every integral proper.
NONINFORMATIVE_WEIGHT = 0.01


@dataclass(frozen=True)
class NormalGammaParams:
    """Normal-Gamma hyperparameters (gamma in shape/rate form)."""

    mu0: float
    beta: float
    a: float
    b: float

    def __post_init__(self):
        if not math.isfinite(self.mu0):
            raise ValidationError(f"mu0 must be finite, got {self.mu0!r}")
        for name in ("beta", "a", "b"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValidationError(
                    f"{name} must be finite and strictly positive, got {v!r}"
                )


@dataclass(frozen=True)
class StudentT:
    """Location / scale / degrees-of-freedom triple (scale, not variance)."""

    location: float
    scale: float
    dof: float

    def __post_init__(self):
        if not math.isfinite(self.location):
            raise ValidationError("location must be finite")
        for name in ("scale", "dof"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValidationError(f"{name} must be finite and > 0, got {v!r}")


def default_noninformative_prior() -> NormalGammaParams:
    """Weak shared prior: zero location, 0.01 for each of beta, a, b.

    With a = b the precision has prior mean 1; at 0.01 its prior variance is
    100, and the conditional prior on the mean is equally diffuse.
    """
    w = NONINFORMATIVE_WEIGHT
    return NormalGammaParams(0.0, w, w, w)


def posterior_update(
    prior: NormalGammaParams, stats: SufficientStats
) -> NormalGammaParams:
    """Condition a Normal-Gamma law on one class's sufficient statistics.

    With n observations of mean m and summed squared deviation S:

        beta' = beta + n
        mu0'  = (beta*mu0 + n*m) / beta'
        a'    = a + n/2
        b'    = b + S/2 + beta*n*(m - mu0)^2 / (2*beta')

    For n = 0 the prior is returned unchanged.
    """
    if stats.n == 0:
        return prior
    n = stats.n
    beta_n = prior.beta + n
    mu_n = (prior.beta * prior.mu0 + n * stats.mean) / beta_n
    a_n = prior.a + 0.5 * n
    b_n = (
        prior.b
        + 0.5 * stats.sum_sq_dev
        + prior.beta * n * (stats.mean - prior.mu0) ** 2 / (2.0 * beta_n)
    )
    return NormalGammaParams(mu_n, beta_n, a_n, b_n)


def predictive(posterior: NormalGammaParams) -> StudentT:
    """Closed-form predictive density of one new score, parameters averaged out.

    Student-t with location mu0', scale sqrt(b'(beta'+1) / (a' beta')) and
    2a' degrees of freedom. Returned as a distribution object so callers can
    evaluate it at many points cheaply.
    """
    scale = math.sqrt(
        posterior.b * (posterior.beta + 1.0) / (posterior.a * posterior.beta)
    )
    return StudentT(posterior.mu0, scale, 2.0 * posterior.a)


def student_t_log_density(dist: StudentT, e):
    """Log density of a location-scale Student-t; vectorized over ``e``."""
    nu = dist.dof
    z = (np.asarray(e, dtype=float) - dist.location) / dist.scale
    out = (
        gammaln(0.5 * (nu + 1.0))
        - gammaln(0.5 * nu)
        - 0.5 * math.log(nu * math.pi)
        - math.log(dist.scale)
        - 0.5 * (nu + 1.0) * np.log1p(z * z / nu)
    )
    return _scalar_like(out, e)


def normal_gamma_log_density(mean, precision, params: NormalGammaParams):
    """Joint log density of (mean, precision) under a Normal-Gamma law.

    Arguments broadcast together. Precisions must be strictly positive; the
    law has no mass at or below zero.
    """
    lam = np.asarray(precision, dtype=float)
    if not (np.all(np.isfinite(lam)) and np.all(lam > 0.0)):
        raise ValidationError("precision must be finite and > 0")
    mu = np.asarray(mean, dtype=float)
    log_gamma_part = (
        params.a * math.log(params.b)
        - gammaln(params.a)
        + (params.a - 1.0) * np.log(lam)
        - params.b * lam
    )
    log_normal_part = (
        0.5 * (math.log(params.beta) + np.log(lam) - _LOG_2PI)
        - 0.5 * params.beta * lam * np.square(mu - params.mu0)
    )
    return _scalar_like(log_gamma_part + log_normal_part, mean, precision)


def sample_params(
    posterior: NormalGammaParams, rng_seed: int, count: int
) -> np.ndarray:
    """Draw (mean, precision) pairs from a Normal-Gamma law.

    Draws precision ~ Gamma(a, rate=b) then mean ~ Normal(mu0, 1/(beta*prec)).
    Returns an array of shape (count, 2): column 0 means, column 1 precisions.
    Deterministic for a given seed.
    """
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(rng_seed)
    tiny = np.finfo(float).tiny
    lam = rng.gamma(shape=posterior.a, scale=1.0 / posterior.b, size=count)
    # gamma draws with shape << 1 can underflow to exactly 0; clamp so the
    # conditional standard deviation of the mean draw stays finite
    np.maximum(lam, tiny, out=lam)
    sd = np.sqrt(1.0 / np.maximum(posterior.beta * lam, tiny))
    mu = rng.normal(posterior.mu0, sd)
    return np.column_stack([mu, lam])
