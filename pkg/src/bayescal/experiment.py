"""Resampling experiments: error-rate curves and confidence-vs-data-size tables.

Each trial draws a fresh small background database, calibrates both ways,
scores a large fresh test set, and sweeps a grid of prior log-odds recording
the cost-weighted error rate of the induced decisions. Trials are seeded
independently (trial t uses ``seed ^ t``), so runs are reproducible and
trials could be evaluated in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .conjugate import NormalGammaParams, default_noninformative_prior
from .errors import ValidationError
from .lr import LrMethod, bayes_log_lr_array, class_predictives, plugin_log_lr_array
from .scores import (
    DEFAULT_VARIANCE_FLOOR,
    BackgroundData,
    Hypothesis,
    fit_plugin,
)
from .synthetic import GeneratorConfig, generate_scores

__all__ = [
    "GeneratorConfig",
    "generate_scores",
    "ExperimentConfig",
    "ErrorCurve",
    "ConfidencePoint",
    "weighted_error_rate",
    "run_experiment",
    "confidence_curve",
    "DEFAULT_PRIOR_GRID",
]

#: 41 prior log-odds points spanning -10..+10 natural-log units.
DEFAULT_PRIOR_GRID = tuple(np.linspace(-10.0, 10.0, 41))


@dataclass(frozen=True)
class ExperimentConfig:
    """Sizes, trial count, prior grid and seeding for one error-curve run."""

    n1: int
    n2: int
    trials: int = 1000
    prior_grid: tuple[float, ...] = DEFAULT_PRIOR_GRID
    n_test_per_class: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValidationError("n1 and n2 must be >= 0")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.n_test_per_class < 1:
            raise ValidationError("n_test_per_class must be >= 1")
        if self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")
        grid = tuple(float(g) for g in self.prior_grid)
        if not grid:
            raise ValidationError("prior_grid must not be empty")
        if not all(math.isfinite(g) for g in grid):
            raise ValidationError("prior_grid values must be finite")
        object.__setattr__(self, "prior_grid", grid)


@dataclass(frozen=True)
class ErrorCurve:
    """Mean error rates over trials at each prior log-odds grid point.

    ``error_prior_only`` is the exact min(pi1, pi2) baseline of deciding from
    the prior alone; it involves no simulation. Standard errors are over
    trials. Trials whose background could not support a plugin fit are
    counted in ``degenerate_trials`` and excluded from the means.
    """

    prior_log_odds: np.ndarray
    error_plugin: np.ndarray
    error_bayes: np.ndarray
    error_prior_only: np.ndarray
    stderr_plugin: np.ndarray
    stderr_bayes: np.ndarray
    trials_used: int
    degenerate_trials: int


@dataclass(frozen=True)
class ConfidencePoint:
    """Mean hypothesis-conditional log-LR for one method at one data size."""

    n1: int
    n2: int
    method: LrMethod
    hypothesis: Hypothesis
    mean_log_lr: float
    stderr: float


def weighted_error_rate(llrs_h1, llrs_h2, prior_log_odds: float) -> float:
    """Cost-weighted error of unit-cost Bayes decisions at one prior point.

    Decisions compare each log-LR against the threshold -prior_log_odds
    (ties acquit). Returns pi1 * P(miss) + pi2 * P(false alarm) with
    pi1 = logistic(prior_log_odds).
    """
    h1 = np.asarray(llrs_h1, dtype=float)
    h2 = np.asarray(llrs_h2, dtype=float)
    if h1.size == 0 or h2.size == 0:
        raise ValidationError("both llr lists must be nonempty")
    threshold = -prior_log_odds
    p_miss = float(np.mean(h1 <= threshold))
    p_fa = float(np.mean(h2 > threshold))
    pi1 = float(expit(prior_log_odds))
    return pi1 * p_miss + (1.0 - pi1) * p_fa


def _errors_over_grid(llrs_h1, llrs_h2, grid: np.ndarray) -> np.ndarray:
    """Vectorized weighted_error_rate over a whole prior grid."""
    thresholds = -grid
    sorted_h1 = np.sort(llrs_h1)
    sorted_h2 = np.sort(llrs_h2)
    p_miss = np.searchsorted(sorted_h1, thresholds, side="right") / sorted_h1.size
    p_fa = 1.0 - np.searchsorted(sorted_h2, thresholds, side="right") / sorted_h2.size
    pi1 = expit(grid)
    return pi1 * p_miss + (1.0 - pi1) * p_fa


def run_experiment(
    gen: GeneratorConfig,
    exp: ExperimentConfig,
    prior: NormalGammaParams | None = None,
    variance_floor: float = DEFAULT_VARIANCE_FLOOR,
) -> ErrorCurve:
    """Average both methods' error-rate curves over resampled backgrounds."""
    if prior is None:
        prior = default_noninformative_prior()
    grid = np.asarray(exp.prior_grid, dtype=float)
    pi1 = expit(grid)
    baseline = np.minimum(pi1, 1.0 - pi1)

    per_trial_plugin: list[np.ndarray] = []
    per_trial_bayes: list[np.ndarray] = []
    degenerate = 0
    for t in range(exp.trials):
        rng = np.random.default_rng(exp.seed ^ t)
        data = BackgroundData(
            generate_scores(gen, Hypothesis.H1, exp.n1, rng),
            generate_scores(gen, Hypothesis.H2, exp.n2, rng),
        )
        try:
            theta = fit_plugin(data, variance_floor)
        except ValidationError:
            degenerate += 1
            continue
        pred1, pred2 = class_predictives(data, prior)
        test_h1 = generate_scores(gen, Hypothesis.H1, exp.n_test_per_class, rng, test_set=True)
        test_h2 = generate_scores(gen, Hypothesis.H2, exp.n_test_per_class, rng, test_set=True)

        per_trial_plugin.append(
            _errors_over_grid(
                plugin_log_lr_array(test_h1, theta),
                plugin_log_lr_array(test_h2, theta),
                grid,
            )
        )
        per_trial_bayes.append(
            _errors_over_grid(
                bayes_log_lr_array(test_h1, pred1, pred2),
                bayes_log_lr_array(test_h2, pred1, pred2),
                grid,
            )
        )

    if not per_trial_plugin:
        raise ValidationError(
            "every trial was degenerate (plugin fit needs n1 >= 2 and n2 >= 2)"
        )
    plugin_mat = np.vstack(per_trial_plugin)
    bayes_mat = np.vstack(per_trial_bayes)
    used = plugin_mat.shape[0]
    if used > 1:
        se_plugin = plugin_mat.std(axis=0, ddof=1) / math.sqrt(used)
        se_bayes = bayes_mat.std(axis=0, ddof=1) / math.sqrt(used)
    else:
        se_plugin = np.zeros_like(grid)
        se_bayes = np.zeros_like(grid)
    return ErrorCurve(
        prior_log_odds=grid,
        error_plugin=plugin_mat.mean(axis=0),
        error_bayes=bayes_mat.mean(axis=0),
        error_prior_only=baseline,
        stderr_plugin=se_plugin,
        stderr_bayes=se_bayes,
        trials_used=used,
        degenerate_trials=degenerate,
    )


def confidence_curve(
    gen: GeneratorConfig,
    sizes,
    trials: int,
    seed: int,
    n_test_per_class: int = 2000,
    prior: NormalGammaParams | None = None,
    variance_floor: float = DEFAULT_VARIANCE_FLOOR,
) -> tuple[ConfidencePoint, ...]:
    """Mean hypothesis-conditional log-LRs per method across background sizes.

    For each (n1, n2) size, averages E[log LR | H1] and E[log LR | H2] over
    ``trials`` resampled backgrounds, each evaluated on a fresh test set.
    """
    sizes = [(int(n1), int(n2)) for n1, n2 in sizes]
    if not sizes:
        raise ValidationError("sizes must not be empty")
    if trials < 2:
        raise ValidationError("trials must be >= 2")
    if seed < 0:
        raise ValidationError("seed must be a non-negative integer")
    if prior is None:
        prior = default_noninformative_prior()

    points: list[ConfidencePoint] = []
    for k, (n1, n2) in enumerate(sizes):
        if n1 < 2 or n2 < 2:
            raise ValidationError(f"size ({n1}, {n2}) cannot support a plugin fit")
        trial_means = {
            (method, hyp): np.empty(trials)
            for method in LrMethod
            for hyp in Hypothesis
        }
        for t in range(trials):
            rng = np.random.default_rng([seed, k, t])
            data = BackgroundData(
                generate_scores(gen, Hypothesis.H1, n1, rng),
                generate_scores(gen, Hypothesis.H2, n2, rng),
            )
            theta = fit_plugin(data, variance_floor)
            pred1, pred2 = class_predictives(data, prior)
            test = {
                Hypothesis.H1: generate_scores(gen, Hypothesis.H1, n_test_per_class, rng, test_set=True),
                Hypothesis.H2: generate_scores(gen, Hypothesis.H2, n_test_per_class, rng, test_set=True),
            }
            for hyp, scores in test.items():
                trial_means[(LrMethod.PLUGIN, hyp)][t] = plugin_log_lr_array(scores, theta).mean()
                trial_means[(LrMethod.BAYESIAN, hyp)][t] = bayes_log_lr_array(scores, pred1, pred2).mean()
        for method in (LrMethod.PLUGIN, LrMethod.BAYESIAN):
            for hyp in (Hypothesis.H1, Hypothesis.H2):
                vals = trial_means[(method, hyp)]
                points.append(
                    ConfidencePoint(
                        n1=n1,
                        n2=n2,
                        method=method,
                        hypothesis=hyp,
                        mean_log_lr=float(vals.mean()),
                        stderr=float(vals.std(ddof=1) / math.sqrt(trials)),
                    )
                )
    return tuple(points)
