"""Brute-force quadrature oracles for the closed-form conjugate results.

The production path never integrates anything: predictive densities come from
the closed Student-t form. This module re-derives those quantities by direct
2-D trapezoid quadrature over (mean, precision) so the closed forms can be
checked against an independent numerical route, and it reproduces the failure
mode of replacing the exact parameter posterior with a peak-only
approximation.

Grid construction. The integrands here all factor as
(Gaussian likelihood terms) x (Normal-Gamma density), whose product is
proportional to another Normal-Gamma, the "profile", obtained by the
conjugate update with every Gaussian factor's point. The quadrature grid is
therefore laid out against that profile:

* precision nodes sit at equally spaced quantiles of the profile's gamma
  marginal between ``lambda_quantile_eps`` and its complement, with the
  inverse-CDF Jacobian applied, so the truncated mass is ~2*eps of the
  integral regardless of where the evaluation point lies;
* mean nodes span ``mu_halfwidth_sds`` conditional standard deviations of
  the profile on each side, via the standardized variable
  u = sqrt(beta*precision) * (mean - location), whose law under the profile
  is standard normal.

Integrand values are always computed from the model's own log-densities, so
the warping only places nodes; it cannot inject the closed-form answer.
Accuracy is established by the grid-convergence and quantile-eps-convergence
checks in the suite rather than asserted.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import gammaincinv, gammaln

from .conjugate import (
    NormalGammaParams,
    default_noninformative_prior,
    normal_gamma_log_density,
    posterior_update,
    predictive,
    sample_params,
    student_t_log_density,
)
from .errors import ValidationError
from .lr import (
    bayes_log_lr,
    bayes_log_lr_array,
    decomposition_residual,
    plugin_log_lr_array,
)
from .scores import (
    BackgroundData,
    GaussianParams,
    Hypothesis,
    _LOG_2PI,
    collect_stats,
    gaussian_log_density,
)
from .synthetic import GeneratorConfig, generate_scores


@dataclass(frozen=True)
class QuadratureSpec:
    """Discretization of the (mean, precision) integration domain."""

    mu_halfwidth_sds: float = 12.0
    lambda_quantile_eps: float = 1e-8
    grid_mu: int = 2001
    grid_lambda: int = 2001

    def __post_init__(self):
        if not (math.isfinite(self.mu_halfwidth_sds) and self.mu_halfwidth_sds > 0.0):
            raise ValidationError("mu_halfwidth_sds must be > 0")
        eps = self.lambda_quantile_eps
        if not (0.0 < eps < 0.5):
            raise ValidationError(f"lambda_quantile_eps must lie in (0, 0.5), got {eps!r}")
        if 1.0 - eps == 1.0:
            raise ValidationError("lambda_quantile_eps is below float resolution")
        for name in ("grid_mu", "grid_lambda"):
            g = getattr(self, name)
            if g < 101 or g % 2 == 0:
                raise ValidationError(f"{name} must be odd and >= 101, got {g}")

    def doubled(self) -> "QuadratureSpec":
        """The same spec at twice the resolution in both directions."""
        return QuadratureSpec(
            self.mu_halfwidth_sds,
            self.lambda_quantile_eps,
            2 * self.grid_mu - 1,
            2 * self.grid_lambda - 1,
        )


def _gamma_log_pdf(lam: np.ndarray, a: float, b: float) -> np.ndarray:
    # shape/rate convention, matching the Normal-Gamma's precision marginal
    return a * math.log(b) - gammaln(a) + (a - 1.0) * np.log(lam) - b * lam


def _trapezoid_weights(step: float, count: int) -> np.ndarray:
    w = np.full(count, step)
    w[0] = w[-1] = 0.5 * step
    return w


def _profile_nodes(profile: NormalGammaParams, spec: QuadratureSpec):
    """Quadrature nodes, Jacobians and weights laid out against a profile.

    Returns the mean-node matrix, the precision-node column, the per-row log
    scale (inverse-CDF and standardization Jacobians plus the precision-axis
    trapezoid weights, all independent of the mean direction), and the
    mean-axis trapezoid weights kept linear for the final reduction.
    """
    eps = spec.lambda_quantile_eps
    v = np.linspace(eps, 1.0 - eps, spec.grid_lambda)
    lam = gammaincinv(profile.a, v) / profile.b
    if not (np.all(np.isfinite(lam)) and lam[0] > 0.0):
        raise ValidationError(
            "degenerate precision grid; the integrand's effective gamma shape "
            "is too small for quadrature (need roughly >= 0.5)"
        )
    u = np.linspace(-spec.mu_halfwidth_sds, spec.mu_halfwidth_sds, spec.grid_mu)
    root = np.sqrt(profile.beta * lam)[:, None]
    mu = profile.mu0 + u[None, :] / root
    log_row_scale = (
        -_gamma_log_pdf(lam, profile.a, profile.b)
        - 0.5 * np.log(profile.beta * lam)
        + np.log(_trapezoid_weights(v[1] - v[0], v.size))
    )
    return mu, lam[:, None], log_row_scale[:, None], _trapezoid_weights(u[1] - u[0], u.size)


def _reduce_log_integral(log_f: np.ndarray, log_row_scale: np.ndarray, w_u: np.ndarray) -> float:
    """log of sum_ij exp(log_f + log_row_scale)_ij * w_u_j, computed stably.

    Plain shift-and-exp followed by an elementwise weighted pairwise sum;
    no BLAS reductions, so the result is bit-reproducible for a given grid.
    """
    log_f += log_row_scale
    peak = float(log_f.max())
    np.exp(log_f - peak, out=log_f)
    return peak + math.log(float(np.sum(log_f * w_u[None, :])))


def quadrature_predictive(
    posterior: NormalGammaParams, e: float, spec: QuadratureSpec = QuadratureSpec()
) -> float:
    """Log predictive density of ``e`` by direct integration.

    Integrates Normal(e | mean, 1/precision) against the Normal-Gamma
    ``posterior`` over (mean, precision), accumulating in the log domain.
    The closed-form counterpart is ``student_t_log_density(predictive(p), e)``.
    """
    profile = posterior_update(posterior, collect_stats([e]))
    mu, lam, log_row_scale, w_u = _profile_nodes(profile, spec)
    log_f = gaussian_log_density(e, mu, lam) + normal_gamma_log_density(
        mu, lam, posterior
    )
    return _reduce_log_integral(log_f, log_row_scale, w_u)


def quadrature_joint_evidence(
    prior: NormalGammaParams,
    class_scores,
    e: float | None = None,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Log marginal likelihood of one class's scores (plus optionally ``e``).

    Integrates the product of the class Gaussian likelihood at every score,
    optionally the trial score's likelihood, and the Normal-Gamma prior
    density. These are the normalizers that an exact Bayesian log-LR can be
    assembled from without ever forming a parameter posterior.
    """
    stats = collect_stats(class_scores)
    points = list(np.asarray(class_scores, dtype=float).ravel())
    if e is not None:
        points.append(float(e))
    profile = posterior_update(prior, collect_stats(points))
    mu, lam, log_row_scale, w_u = _profile_nodes(profile, spec)

    log_f = normal_gamma_log_density(mu, lam, prior)
    if stats.n > 0:
        # product of the class likelihoods via sufficient statistics:
        # sum_t log N(s_t | mu, 1/lam) for fixed (mu, lam)
        log_f = log_f + stats.n * 0.5 * (np.log(lam) - _LOG_2PI) - 0.5 * lam * (
            stats.sum_sq_dev + stats.n * np.square(stats.mean - mu)
        )
    if e is not None:
        log_f = log_f + gaussian_log_density(e, mu, lam)
    return _reduce_log_integral(log_f, log_row_scale, w_u)


def joint_evidence_log_lr(
    data: BackgroundData,
    prior: NormalGammaParams,
    e: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Bayesian log-LR assembled purely from quadrature evidence terms.

    log P(e | H1 data) - log P(e | H2 data), each obtained as the difference
    between the class evidence with and without the trial score appended.
    Must agree with the closed-form predictive-ratio route.
    """
    gain_h1 = quadrature_joint_evidence(prior, data.h1_scores, e, spec) - (
        quadrature_joint_evidence(prior, data.h1_scores, None, spec)
    )
    gain_h2 = quadrature_joint_evidence(prior, data.h2_scores, e, spec) - (
        quadrature_joint_evidence(prior, data.h2_scores, None, spec)
    )
    return gain_h1 - gain_h2


@dataclass(frozen=True)
class PitfallReport:
    """Exact vs point-mass-approximated Bayesian log-LR across a score grid."""

    e_grid: np.ndarray
    exact_log_lr: np.ndarray
    approx_log_lr: np.ndarray

    @property
    def abs_divergence(self) -> np.ndarray:
        return np.abs(self.exact_log_lr - self.approx_log_lr)

    @property
    def max_divergence(self) -> float:
        return float(self.abs_divergence.max())


def approximate_posterior_pitfall(
    data: BackgroundData,
    prior: NormalGammaParams,
    e_grid,
) -> PitfallReport:
    """Show what breaks when the parameter posterior is collapsed to its peak.

    Replaces each class's Normal-Gamma posterior with a point mass at its
    joint mode and recomputes the log-LR. The approximation is faithful near
    the posterior peak but ignores the tails, which is exactly where the
    likelihood of an outlying trial score puts its weight, so the divergence
    from the exact ratio grows in the tails and shrinks with more data.
    """
    e_grid = np.asarray(e_grid, dtype=float)
    stats1 = collect_stats(data.h1_scores)
    stats2 = collect_stats(data.h2_scores)
    if stats1.n < 2 or stats2.n < 2:
        raise ValidationError("needs at least two scores per class")
    post1 = posterior_update(prior, stats1)
    post2 = posterior_update(prior, stats2)
    # Joint mode of a Normal-Gamma: mean at mu0, precision at (a - 1/2) / b.
    theta_mode = GaussianParams(
        post1.mu0,
        post2.mu0,
        (post1.a - 0.5) / post1.b,
        (post2.a - 0.5) / post2.b,
    )
    exact = bayes_log_lr_array(e_grid, predictive(post1), predictive(post2))
    approx = plugin_log_lr_array(e_grid, theta_mode)
    return PitfallReport(e_grid=e_grid, exact_log_lr=exact, approx_log_lr=approx)


# ---------------------------------------------------------------------------
# Randomized sweeps used by both the test suite and the `verify` subcommand.
# ---------------------------------------------------------------------------


def _random_posteriors(rng: np.random.Generator, count: int) -> list[NormalGammaParams]:
    """Posterior-like Normal-Gamma draws spanning realistic fitted ranges."""
    out = []
    for _ in range(count):
        a = rng.uniform(1.2, 30.0)
        out.append(
            NormalGammaParams(
                mu0=rng.uniform(-3.0, 3.0),
                beta=rng.uniform(1.5, 60.0),
                a=a,
                b=a * rng.uniform(0.05, 20.0),
            )
        )
    return out


def _random_dataset(rng: np.random.Generator) -> BackgroundData:
    n1 = int(rng.integers(2, 13))
    n2 = int(rng.integers(2, 13))
    mu1, mu2 = rng.uniform(-4.0, 4.0, size=2)
    sd1, sd2 = rng.uniform(0.3, 3.0, size=2)
    return BackgroundData(
        rng.normal(mu1, sd1, size=n1),
        rng.normal(mu2, sd2, size=n2),
    )


def predictive_oracle_sweep(
    n_posteriors: int = 50,
    n_e: int = 17,
    seed: int = 20260810,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Max |closed-form - quadrature| log predictive density over a sweep.

    Each posterior is probed on an e-grid spanning 8 predictive scales each
    side of the predictive location.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for post in _random_posteriors(rng, n_posteriors):
        pred = predictive(post)
        e_grid = np.linspace(
            pred.location - 8.0 * pred.scale, pred.location + 8.0 * pred.scale, n_e
        )
        for e in e_grid:
            closed = student_t_log_density(pred, float(e))
            quad = quadrature_predictive(post, float(e), spec)
            worst = max(worst, abs(closed - quad))
    return worst


def joint_evidence_sweep(
    n_cases: int = 20,
    seed: int = 20260810,
    spec: QuadratureSpec = QuadratureSpec(),
    prior: NormalGammaParams | None = None,
) -> float:
    """Max |predictive-ratio route - joint-evidence route| log-LR discrepancy."""
    if prior is None:
        prior = default_noninformative_prior()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        data = _random_dataset(rng)
        pred1 = predictive(posterior_update(prior, collect_stats(data.h1_scores)))
        e = float(rng.uniform(pred1.location - 8.0 * pred1.scale, pred1.location + 8.0 * pred1.scale))
        via_joint = joint_evidence_log_lr(data, prior, e, spec)
        via_predictive = bayes_log_lr(e, data, prior).value
        worst = max(worst, abs(via_joint - via_predictive))
    return worst


def single_score_consistency(
    n_cases: int = 5,
    seed: int = 20260810,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Max gap between one-score evidence and the prior predictive density."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for post in _random_posteriors(rng, n_cases):
        s = float(rng.uniform(post.mu0 - 4.0, post.mu0 + 4.0))
        joint = quadrature_joint_evidence(post, [s], None, spec)
        pred = quadrature_predictive(post, s, spec)
        worst = max(worst, abs(joint - pred))
    return worst


def empty_evidence_normalization(
    spec: QuadratureSpec = QuadratureSpec(),
    prior: NormalGammaParams | None = None,
) -> float:
    """|log integral of the bare prior|, which must vanish.

    The residual is dominated by the deliberate 2*eps quantile truncation of
    the precision axis, so it sits near 2 * lambda_quantile_eps, not at zero.
    """
    if prior is None:
        prior = NormalGammaParams(0.0, 1.0, 2.0, 1.0)
    return abs(quadrature_joint_evidence(prior, [], None, spec))


def grid_convergence(
    n_posteriors: int = 2,
    seed: int = 20260810,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Max |result shift| when both grid resolutions are doubled."""
    rng = np.random.default_rng(seed)
    doubled = spec.doubled()
    worst = 0.0
    for post in _random_posteriors(rng, n_posteriors):
        pred = predictive(post)
        for k in (-6.0, 0.5, 6.0):
            e = pred.location + k * pred.scale
            worst = max(
                worst,
                abs(
                    quadrature_predictive(post, e, spec)
                    - quadrature_predictive(post, e, doubled)
                ),
            )
    return worst


def quantile_eps_convergence(
    n_posteriors: int = 2,
    seed: int = 20260810,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Max |result shift| when the precision-grid tail cutoff is tightened 100x."""
    rng = np.random.default_rng(seed)
    tightened = QuadratureSpec(
        spec.mu_halfwidth_sds,
        spec.lambda_quantile_eps * 1e-2,
        spec.grid_mu,
        spec.grid_lambda,
    )
    worst = 0.0
    for post in _random_posteriors(rng, n_posteriors):
        pred = predictive(post)
        for k in (-7.0, 1.0):
            e = pred.location + k * pred.scale
            worst = max(
                worst,
                abs(
                    quadrature_predictive(post, e, spec)
                    - quadrature_predictive(post, e, tightened)
                ),
            )
    return worst


def decomposition_sweep(
    n_samples: int = 10_000,
    n_datasets: int = 5,
    seed: int = 20260810,
    prior: NormalGammaParams | None = None,
) -> float:
    """Max |plugin-plus-correction minus Bayesian| residual over sampled thetas."""
    if prior is None:
        prior = default_noninformative_prior()
    rng = np.random.default_rng(seed)
    per_dataset = max(1, n_samples // n_datasets)
    worst = 0.0
    for _ in range(n_datasets):
        data = _random_dataset(rng)
        post1 = posterior_update(prior, collect_stats(data.h1_scores))
        post2 = posterior_update(prior, collect_stats(data.h2_scores))
        e = float(rng.uniform(-8.0, 8.0))
        draws1 = sample_params(post1, int(rng.integers(2**31)), per_dataset)
        draws2 = sample_params(post2, int(rng.integers(2**31)), per_dataset)
        for (m1, l1), (m2, l2) in zip(draws1, draws2):
            theta = GaussianParams(m1, m2, l1, l2)
            worst = max(worst, abs(decomposition_residual(e, data, prior, theta)))
    return worst


def pitfall_divergence(
    n_trials: int = 200,
    seed: int = 20260810,
    prior: NormalGammaParams | None = None,
    sizes: tuple[tuple[int, int], ...] = ((9, 27), (90, 270)),
) -> tuple[float, ...]:
    """Median tail divergence of the peak-only approximation per data size."""
    if prior is None:
        prior = default_noninformative_prior()
    world = GeneratorConfig()
    e_tail = world.mu1_true + 4.0 * world.sigma1_true
    medians = []
    for k, (n1, n2) in enumerate(sizes):
        divs = np.empty(n_trials)
        for t in range(n_trials):
            rng = np.random.default_rng([seed, k, t])
            data = BackgroundData(
                generate_scores(world, Hypothesis.H1, n1, rng),
                generate_scores(world, Hypothesis.H2, n2, rng),
            )
            report = approximate_posterior_pitfall(data, prior, [e_tail])
            divs[t] = report.abs_divergence[0]
        medians.append(float(np.median(divs)))
    return tuple(medians)


# ---------------------------------------------------------------------------
# Suite runner.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    comparison: str  # "<=" or ">="
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]
    config: dict

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [asdict(c) for c in self.checks],
            "config": self.config,
        }


def _check(name: str, value: float, threshold: float, comparison: str) -> CheckResult:
    passed = value <= threshold if comparison == "<=" else value >= threshold
    return CheckResult(name, float(value), float(threshold), comparison, bool(passed))


def run_verification_suite(
    seed: int = 20260810,
    n_posteriors: int = 50,
    n_e: int = 17,
    n_joint_cases: int = 20,
    n_theta_samples: int = 10_000,
    n_theta_datasets: int = 5,
    n_pitfall_trials: int = 200,
    spec: QuadratureSpec = QuadratureSpec(),
) -> VerificationReport:
    """Run every oracle check at its stated tolerance and collect the results."""
    pitfall_small, pitfall_large = pitfall_divergence(n_pitfall_trials, seed)
    checks = (
        _check(
            "predictive_closed_form_vs_quadrature",
            predictive_oracle_sweep(n_posteriors, n_e, seed, spec),
            1e-6,
            "<=",
        ),
        _check(
            "joint_evidence_route_vs_predictive_route",
            joint_evidence_sweep(n_joint_cases, seed, spec),
            1e-6,
            "<=",
        ),
        _check(
            "single_score_evidence_vs_prior_predictive",
            single_score_consistency(5, seed, spec),
            1e-8,
            "<=",
        ),
        _check("empty_evidence_normalization", empty_evidence_normalization(spec), 1e-7, "<="),
        _check("grid_convergence", grid_convergence(2, seed, spec), 1e-8, "<="),
        _check(
            "quantile_eps_convergence",
            quantile_eps_convergence(2, seed, spec),
            1e-7,
            "<=",
        ),
        _check(
            "plugin_plus_correction_identity",
            decomposition_sweep(n_theta_samples, n_theta_datasets, seed),
            1e-9,
            "<=",
        ),
        _check("peak_only_posterior_tail_divergence", pitfall_small, 0.5, ">="),
        _check(
            "peak_only_posterior_divergence_shrinks",
            pitfall_small - pitfall_large,
            0.0,
            ">=",
        ),
    )
    config = {
        "seed": seed,
        "n_posteriors": n_posteriors,
        "n_e": n_e,
        "n_joint_cases": n_joint_cases,
        "n_theta_samples": n_theta_samples,
        "n_theta_datasets": n_theta_datasets,
        "n_pitfall_trials": n_pitfall_trials,
        "quadrature": asdict(spec),
    }
    return VerificationReport(checks=checks, config=config)
