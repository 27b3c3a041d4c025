"""Small-sample statistics for trial batches.

Estimators and tests used by the reporting layer: Laplace success-rate
point estimates, 95% adjusted-Wald proportion intervals, the N-1 chi-square
two-proportion test, log-transformed (geometric mean) time intervals,
Welch's two-sample t-test, and arithmetic-mean intervals for attempt
counts. Tail probabilities and quantiles come from
:mod:`gazeassist.special`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .special import (
    chi2_sf,
    normal_quantile,
    student_t_quantile,
    student_t_two_sided_p,
)


@dataclass(frozen=True)
class ProportionEstimate:
    """Success proportion with a Laplace point estimate and adjusted-Wald CI."""

    successes: int
    trials: int
    point: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class TimeSummary:
    """Geometric mean of positive durations with its confidence interval."""

    n: int
    geo_mean: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class MeanSummary:
    """Arithmetic mean with a t confidence interval (attempt counts)."""

    n: int
    mean: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    test: str
    degenerate: bool = False


def laplace(successes: int, trials: int) -> float:
    """Laplace success-rate estimate (successes + 1) / (trials + 2)."""
    if successes < 0 or trials < 0 or successes > trials:
        raise ValueError(f"need 0 <= successes <= trials, got {successes}/{trials}")
    return (successes + 1) / (trials + 2)


def adjusted_wald(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Adjusted-Wald (Agresti-Coull) interval for a binomial proportion.

    Adds z^2/2 pseudo-successes and z^2 pseudo-trials, then applies the
    Wald formula around the adjusted center; endpoints are clamped to
    [0, 1].
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if successes < 0 or successes > trials:
        raise ValueError(f"need 0 <= successes <= trials, got {successes}/{trials}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    z = normal_quantile(0.5 + level / 2.0)
    n_adj = trials + z * z
    p_adj = (successes + z * z / 2.0) / n_adj
    half = z * math.sqrt(p_adj * (1.0 - p_adj) / n_adj)
    return max(0.0, p_adj - half), min(1.0, p_adj + half)


def proportion_estimate(successes: int, trials: int, level: float = 0.95) -> ProportionEstimate:
    low, high = adjusted_wald(successes, trials, level)
    return ProportionEstimate(successes, trials, laplace(successes, trials), low, high)


def n1_chisq(x1: int, n1: int, x2: int, n2: int) -> TestResult:
    """Two-proportion chi-square test with the N-1 small-sample correction.

    The Pearson statistic on the 2x2 table is multiplied by (N-1)/N with
    N = n1 + n2; the two-sided p-value comes from chi-square with 1 dof.
    A pooled table that is all successes or all failures carries no
    evidence and is flagged degenerate with p = 1.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("both groups need at least one trial")
    if not (0 <= x1 <= n1 and 0 <= x2 <= n2):
        raise ValueError("successes must lie within trial counts")
    pooled = x1 + x2
    if pooled == 0 or pooled == n1 + n2:
        return TestResult(0.0, 1.0, "n1_chisq", degenerate=True)
    a, b = x1, n1 - x1
    c, d = x2, n2 - x2
    n = n1 + n2
    chi2 = n * (a * d - b * c) ** 2 / ((a + b) * (c + d) * (a + c) * (b + d))
    stat = chi2 * (n - 1) / n
    return TestResult(stat, chi2_sf(stat, 1.0), "n1_chisq")


def geo_mean_ci(times: list[float], level: float = 0.95) -> TimeSummary:
    """Geometric mean and CI via a t-interval on log-transformed durations."""
    n = len(times)
    if n < 2:
        raise ValueError(f"need at least two durations, got {n}")
    if any(t <= 0.0 for t in times):
        raise ValueError("durations must be positive")
    logs = [math.log(t) for t in times]
    mean = sum(logs) / n
    var = sum((v - mean) ** 2 for v in logs) / (n - 1)
    t_crit = student_t_quantile(0.5 + level / 2.0, n - 1)
    half = t_crit * math.sqrt(var / n)
    return TimeSummary(n, math.exp(mean), math.exp(mean - half), math.exp(mean + half))


def mean_ci(values: list[float], level: float = 0.95) -> MeanSummary:
    """Arithmetic mean with a t confidence interval."""
    n = len(values)
    if n < 2:
        raise ValueError(f"need at least two values, got {n}")
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    t_crit = student_t_quantile(0.5 + level / 2.0, n - 1)
    half = t_crit * math.sqrt(var / n)
    return MeanSummary(n, mean, mean - half, mean + half)


def two_sample_t(a: list[float], b: list[float]) -> TestResult:
    """Welch's unequal-variance two-sample t-test, two-sided.

    Degrees of freedom follow Welch-Satterthwaite. Two zero-variance
    samples with equal means are flagged degenerate with p = 1; with
    different means the separation is perfect and p = 0.
    """
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise ValueError("each sample needs at least two values")
    ma = sum(a) / na
    mb = sum(b) / nb
    va = sum((v - ma) ** 2 for v in a) / (na - 1)
    vb = sum((v - mb) ** 2 for v in b) / (nb - 1)
    if va == 0.0 and vb == 0.0:
        if ma == mb:
            return TestResult(0.0, 1.0, "two_sample_t", degenerate=True)
        return TestResult(math.copysign(math.inf, ma - mb), 0.0, "two_sample_t", degenerate=True)
    se2 = va / na + vb / nb
    stat = (ma - mb) / math.sqrt(se2)
    # Welch-Satterthwaite via variance fractions, robust to underflow
    ra = (va / na) / se2
    rb = (vb / nb) / se2
    df = 1.0 / (ra * ra / (na - 1) + rb * rb / (nb - 1))
    return TestResult(stat, student_t_two_sided_p(stat, df), "two_sample_t")


# Published failure rates (percent) for the eight boundary parameter sets,
# shipped as a fixture so report rendering is testable without simulation.
PARAM_SET_FAILURE_RATES: dict[int, dict[str, int]] = {
    1: {"cutting": 64, "grasping": 65},
    2: {"cutting": 50, "grasping": 42},
    3: {"cutting": 64, "grasping": 58},
    4: {"cutting": 64, "grasping": 73},
    5: {"cutting": 71, "grasping": 38},
    6: {"cutting": 50, "grasping": 65},
    7: {"cutting": 50, "grasping": 48},
    8: {"cutting": 57, "grasping": 44},
}


@dataclass(frozen=True)
class FailureTable:
    """Per-set failure rates with column means and minimum-failure sets."""

    rates: dict[int, dict[str, float]]
    column_means: dict[str, float]
    minima: dict[str, list[int]]


def aggregate_failure_table(rates: dict[int, dict[str, float]]) -> FailureTable:
    """Column means and minimum-failure set(s) per task, reporting ties."""
    if not rates:
        raise ValueError("no parameter sets to aggregate")
    tasks = sorted({task for row in rates.values() for task in row})
    means: dict[str, float] = {}
    minima: dict[str, list[int]] = {}
    for task in tasks:
        column = {s: row[task] for s, row in rates.items() if task in row}
        means[task] = sum(column.values()) / len(column)
        best = min(column.values())
        minima[task] = sorted(s for s, v in column.items() if v == best)
    return FailureTable(dict(rates), means, minima)


def failure_table_from_records(records) -> FailureTable:
    """Aggregate observed failure rates grouped by boundary set and task.

    Records missing a boundary set label are skipped; empty groups are
    excluded.
    """
    groups: dict[tuple[int, str], list[bool]] = {}
    for rec in records:
        boundary_set = rec.config.get("boundary_set")
        task = rec.config.get("task")
        if boundary_set is None or task is None:
            continue
        groups.setdefault((int(boundary_set), task), []).append(rec.outcome != "success")
    if not groups:
        raise ValueError("no records carry a boundary set and task")
    rates: dict[int, dict[str, float]] = {}
    for (boundary_set, task), fails in sorted(groups.items()):
        rates.setdefault(boundary_set, {})[task] = 100.0 * sum(fails) / len(fails)
    return aggregate_failure_table(rates)
