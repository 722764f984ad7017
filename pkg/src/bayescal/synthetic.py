"""Synthetic two-class Gaussian score worlds for simulation studies."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .scores import Hypothesis


@dataclass(frozen=True)
class GeneratorConfig:
    """True score distributions for a synthetic world.

    Background scores are drawn straight from the class Gaussians. Test-set
    scores additionally pass through the affine shift
    ``shift_scale * score + shift_location``, an optional stressor modelling
    a mismatch between background and trial conditions. The identity shift
    (1, 0) leaves both sets identically distributed.
    """

    mu1_true: float = 2.0
    mu2_true: float = -2.0
    sigma1_true: float = 1.0
    sigma2_true: float = 1.0
    shift_location: float = 0.0
    shift_scale: float = 1.0

    def __post_init__(self):
        for name in ("mu1_true", "mu2_true", "shift_location"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        for name in ("sigma1_true", "sigma2_true", "shift_scale"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValidationError(f"{name} must be finite and > 0, got {v!r}")


def generate_scores(
    config: GeneratorConfig,
    hypothesis: Hypothesis,
    count: int,
    seed,
    *,
    test_set: bool = False,
) -> np.ndarray:
    """Draw iid scores for one class; deterministic given the seed.

    ``seed`` may be an integer or an existing ``numpy.random.Generator``
    (callers running several draws per trial pass one generator through).
    Only test-set draws receive the shift transform.
    """
    if count < 0:
        raise ValidationError(f"count must be >= 0, got {count}")
    rng = np.random.default_rng(seed)
    if hypothesis is Hypothesis.H1:
        mu, sigma = config.mu1_true, config.sigma1_true
    else:
        mu, sigma = config.mu2_true, config.sigma2_true
    draws = rng.normal(mu, sigma, size=count)
    if test_set:
        draws = config.shift_scale * draws + config.shift_location
    return draws
