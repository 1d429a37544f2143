"""Descriptive and inferential statistics used by every comparison table.

p-values come from the regularized incomplete beta function, evaluated by
its continued fraction (modified Lentz), so no statistics package is
needed at run time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DegenerateInput

BETACF_TOL = 1e-10
_BETACF_MAX_ITER = 500
_TINY = 1e-300


def mean_sem(values: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error of the mean (sample sd, n - 1 denominator)."""
    n = len(values)
    if n < 2:
        raise DegenerateInput(f"need at least 2 values for a standard error, got {n}")
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    if len(xs) != len(ys):
        raise ValueError("pearson: inputs differ in length")
    n = len(xs)
    if n < 3:
        raise DegenerateInput(f"pearson needs at least 3 pairs, got {n}")
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        raise DegenerateInput("pearson: constant input")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def eta_squared(groups: Mapping[object, Sequence[float]] | Sequence[Sequence[float]]) -> float:
    """Between-group share of the total sum of squares (reported as R²)."""
    if isinstance(groups, Mapping):
        groups = list(groups.values())
    groups = [list(g) for g in groups]
    if len(groups) < 2 or any(len(g) < 1 for g in groups):
        raise DegenerateInput("eta_squared needs at least 2 non-empty groups")
    return eta_squared_from_stats([RunningStats.of(g) for g in groups])


def _betacf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < BETACF_TOL:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    return _betainc(a, b, x, 1.0 - x)


def _betainc(a: float, b: float, x: float, y: float) -> float:
    # y = 1 - x, passed separately so callers can avoid the cancellation
    if x == 0.0 or y == 0.0:
        return 0.0 if x == 0.0 else 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(y)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, y) / b


def t_two_sided_p(t: float, dof: float) -> float:
    if math.isinf(t):
        return 0.0
    t2 = t * t
    return _betainc(dof / 2.0, 0.5, dof / (dof + t2), t2 / (dof + t2))


def welch_t(a: Sequence[float], b: Sequence[float]) -> tuple[float, float, float]:
    """Welch's unequal-variance t-test: (t, Welch-Satterthwaite dof, two-sided p)."""
    return welch_t_from_stats(RunningStats.of(a), RunningStats.of(b))


def welch_t_from_stats(sa: "RunningStats", sb: "RunningStats") -> tuple[float, float, float]:
    if sa.n < 2 or sb.n < 2:
        raise DegenerateInput("welch_t needs at least 2 values per group")
    va, vb = sa.variance, sb.variance
    if va == 0 or vb == 0:
        raise DegenerateInput("welch_t: zero variance in a group")
    qa, qb = va / sa.n, vb / sb.n
    t = (sa.mean - sb.mean) / math.sqrt(qa + qb)
    dof = (qa + qb) ** 2 / (qa * qa / (sa.n - 1) + qb * qb / (sb.n - 1))
    return t, dof, t_two_sided_p(t, dof)


@dataclass
class RunningStats:
    """Welford accumulator; lets pair tables be summarised while streaming."""

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def push(self, x: float) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    def extend(self, xs: Iterable[float]) -> "RunningStats":
        for x in xs:
            self.push(x)
        return self

    @classmethod
    def of(cls, xs: Iterable[float]) -> "RunningStats":
        xs = list(xs)
        s = cls()
        if not xs:
            return s
        # exact two-pass values so small-sample results match hand arithmetic
        s.n = len(xs)
        s.mean = math.fsum(xs) / s.n
        s.m2 = math.fsum((x - s.mean) ** 2 for x in xs)
        return s

    @property
    def variance(self) -> float:
        if self.n < 2:
            raise DegenerateInput("variance needs at least 2 values")
        return self.m2 / (self.n - 1)

    @property
    def sem(self) -> float:
        return math.sqrt(self.variance / self.n)


def eta_squared_from_stats(groups: Sequence[RunningStats]) -> float:
    groups = [g for g in groups if g.n > 0]
    total = sum(g.n for g in groups)
    if len(groups) < 2 or total < 3:
        raise DegenerateInput("eta_squared needs 2 non-empty groups and 3 values")
    grand = math.fsum(g.n * g.mean for g in groups) / total
    ss_between = math.fsum(g.n * (g.mean - grand) ** 2 for g in groups)
    ss_within = math.fsum(g.m2 for g in groups)
    ss_total = ss_between + ss_within
    if ss_total <= 0:
        raise DegenerateInput("eta_squared: zero total variance")
    return min(1.0, ss_between / ss_total)


@dataclass(frozen=True)
class GroupSummary:
    label: str
    n: int
    mean: float | None
    sem: float | None
    t: float | None = None
    p: float | None = None
    eta_squared: float | None = None


def summarize_groups(groups: Mapping[str, RunningStats], pairwise_test: bool | None = None) -> list[GroupSummary]:
    """One summary per group, in mapping order.

    For exactly two groups a Welch test is attached to both rows; the
    effect size (eta squared) is attached whenever it is defined. Values
    that are undefined for the data are left as ``None``.
    """
    if pairwise_test is None:
        pairwise_test = len(groups) == 2
    t = p = eta = None
    stats = list(groups.values())
    if pairwise_test and len(stats) == 2:
        try:
            t, _, p = welch_t_from_stats(*stats)
        except DegenerateInput:
            pass
    try:
        eta = eta_squared_from_stats(stats)
    except DegenerateInput:
        pass
    rows = []
    for label, s in groups.items():
        rows.append(
            GroupSummary(
                label=label,
                n=s.n,
                mean=s.mean if s.n else None,
                sem=s.sem if s.n >= 2 else None,
                t=t,
                p=p,
                eta_squared=eta,
            )
        )
    return rows
