"""Score data types, sufficient statistics, and the plugin Gaussian fit.

Scores are plain floats (real-valued recognizer outputs). All types here are
immutable after construction, all functions are pure, and densities are only
ever produced in the log domain.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ScoreFileError, ValidationError

_LOG_2PI = math.log(2.0 * math.pi)

#: Lower bound on the per-class ML variance, so constant data cannot produce
#: an infinite precision. CLI-overridable.
DEFAULT_VARIANCE_FLOOR = 1e-12


def _scalar_like(result: np.ndarray, *inputs) -> float | np.ndarray:
    """Return a bare float when every input was scalar, else the array."""
    if all(np.ndim(x) == 0 for x in inputs):
        return float(result)
    return result


class Hypothesis(enum.Enum):
    """The two competing hypotheses a labeled score can carry."""

    H1 = "H1"  # same-source (prosecution / target)
    H2 = "H2"  # different-source (defence / non-target)


_LABEL_ALIASES = {
    "h1": Hypothesis.H1,
    "h2": Hypothesis.H2,
    "tar": Hypothesis.H1,
    "non": Hypothesis.H2,
}


def parse_label(label: str) -> Hypothesis:
    """Map a textual class label onto a Hypothesis.

    Accepts H1/H2 case-insensitively, plus the recognizer-world aliases
    ``tar`` (-> H1) and ``non`` (-> H2).
    """
    key = label.strip().lower()
    try:
        return _LABEL_ALIASES[key]
    except KeyError:
        raise ValidationError(
            f"unknown label {label!r}; expected one of H1, H2, tar, non"
        ) from None


@dataclass(frozen=True)
class BackgroundData:
    """Labeled background scores, one sequence per hypothesis class.

    Either class may be empty (the Bayesian path tolerates n=0); every score
    must be finite.
    """

    h1_scores: tuple[float, ...]
    h2_scores: tuple[float, ...]

    def __post_init__(self):
        for name in ("h1_scores", "h2_scores"):
            values = tuple(float(v) for v in getattr(self, name))
            for i, v in enumerate(values):
                if not math.isfinite(v):
                    raise ValidationError(f"{name}[{i}] is not finite: {v!r}")
            object.__setattr__(self, name, values)

    @property
    def n1(self) -> int:
        return len(self.h1_scores)

    @property
    def n2(self) -> int:
        return len(self.h2_scores)

    def swapped(self) -> "BackgroundData":
        """The same data with the class labels exchanged."""
        return BackgroundData(self.h2_scores, self.h1_scores)


@dataclass(frozen=True)
class SufficientStats:
    """Count, mean and summed squared deviation of one class's scores."""

    n: int
    mean: float
    sum_sq_dev: float

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError(f"n must be >= 0, got {self.n}")
        if not (math.isfinite(self.mean) and math.isfinite(self.sum_sq_dev)):
            raise ValidationError("mean and sum_sq_dev must be finite")
        if self.sum_sq_dev < 0.0:
            raise ValidationError(f"sum_sq_dev must be >= 0, got {self.sum_sq_dev}")


@dataclass(frozen=True)
class GaussianParams:
    """Point-estimate Gaussian score model: a (mean, precision) pair per class."""

    mu1: float
    mu2: float
    lambda1: float
    lambda2: float

    def __post_init__(self):
        for name in ("mu1", "mu2"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        for name in ("lambda1", "lambda2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValidationError(
                    f"{name} must be a finite, strictly positive precision, got {v!r}"
                )


def collect_stats(scores) -> SufficientStats:
    """Compress a sequence of scores into (n, mean, sum of squared deviations).

    Uses a two-pass scheme (mean first, then deviations) for numerical
    stability. Rejects non-finite entries, naming the offending index.
    """
    arr = np.asarray(scores, dtype=float).ravel()
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise ValidationError(f"score [{i}] is not finite: {arr[i]!r}")
    n = int(arr.size)
    if n == 0:
        return SufficientStats(0, 0.0, 0.0)
    mean = float(arr.mean())
    ssd = 0.0 if n == 1 else float(np.square(arr - mean).sum())
    return SufficientStats(n, mean, ssd)


def fit_plugin(
    data: BackgroundData, variance_floor: float = DEFAULT_VARIANCE_FLOOR
) -> GaussianParams:
    """Maximum-likelihood Gaussian fit per class, with a variance floor.

    Per class: mean is the sample mean, precision is 1 / max(ssd/n, floor).
    The ML (1/n) variance convention is used, not the bias-corrected 1/(n-1).
    Requires at least two scores per class.
    """
    if not (math.isfinite(variance_floor) and variance_floor > 0.0):
        raise ValidationError(f"variance_floor must be > 0, got {variance_floor!r}")
    s1 = collect_stats(data.h1_scores)
    s2 = collect_stats(data.h2_scores)
    for name, s in (("H1", s1), ("H2", s2)):
        if s.n < 2:
            raise ValidationError(
                f"insufficient data for plugin fit: class {name} has n={s.n} (need >= 2)"
            )
    lam1 = 1.0 / max(s1.sum_sq_dev / s1.n, variance_floor)
    lam2 = 1.0 / max(s2.sum_sq_dev / s2.n, variance_floor)
    return GaussianParams(s1.mean, s2.mean, lam1, lam2)


def gaussian_log_density(e, mean, precision):
    """Log of the normal density N(e | mean, 1/precision).

    Arguments broadcast together; scalars in, scalar out. Never exponentiated
    internally, so extreme tail arguments stay representable.
    """
    prec = np.asarray(precision, dtype=float)
    if not (np.all(np.isfinite(prec)) and np.all(prec > 0.0)):
        raise ValidationError(f"precision must be finite and > 0, got {precision!r}")
    z = np.asarray(e, dtype=float) - np.asarray(mean, dtype=float)
    out = 0.5 * (np.log(prec) - _LOG_2PI) - 0.5 * prec * np.square(z)
    return _scalar_like(out, e, mean, precision)


def load_background_csv(path) -> BackgroundData:
    """Read labeled scores from a CSV file with header ``label,score``.

    Labels follow :func:`parse_label`. Any malformed row aborts the load with
    a :class:`ScoreFileError` carrying the 1-based line number.
    """
    path = Path(path)
    h1: list[float] = []
    h2: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ScoreFileError(path, 1, "empty file; expected header 'label,score'")
        if [c.strip().lower() for c in header] != ["label", "score"]:
            raise ScoreFileError(
                path, reader.line_num, f"expected header 'label,score', got {header!r}"
            )
        for row in reader:
            line = reader.line_num
            if not row:
                continue  # tolerate blank lines
            if len(row) != 2:
                raise ScoreFileError(path, line, f"expected 2 fields, got {len(row)}")
            try:
                label = parse_label(row[0])
            except ValidationError as exc:
                raise ScoreFileError(path, line, str(exc)) from None
            try:
                value = float(row[1])
            except ValueError:
                raise ScoreFileError(path, line, f"invalid score {row[1]!r}") from None
            if not math.isfinite(value):
                raise ScoreFileError(path, line, f"non-finite score {row[1]!r}")
            (h1 if label is Hypothesis.H1 else h2).append(value)
    return BackgroundData(tuple(h1), tuple(h2))
