"""Chi-squared independence test and one-way ANOVA with computed p-values.

The tail probabilities come from the regularized incomplete gamma and beta
functions, implemented here with the standard series / continued-fraction
expansions.  Switchover points: the lower-gamma series is used for
x < a + 1 and the upper-gamma continued fraction otherwise; the beta
continued fraction is evaluated at x directly for x < (a+1)/(a+b+2) and
through the 1-x symmetry otherwise.  Both converge to well below the 1e-10
absolute error these tests need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigurationError, DegenerateDataError

_EPS = 1e-15
_FPMIN = 1e-300
_MAX_ITER = 1000


def _lower_gamma_series(a: float, x: float) -> float:
    ap = a
    total = 1.0 / a
    delta = total
    for _ in range(_MAX_ITER):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_cf(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_upper_gamma(a: float, x: float) -> float:
    """Q(a, x) = Gamma(a, x) / Gamma(a), the upper tail."""
    if a <= 0:
        raise ConfigurationError("gamma shape parameter must be positive")
    if x < 0:
        raise ConfigurationError("gamma argument must be non-negative")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _lower_gamma_series(a, x)
    return _upper_gamma_cf(a, x)


def _beta_cf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the regularized incomplete beta function."""
    if a <= 0 or b <= 0:
        raise ConfigurationError("beta shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ConfigurationError("beta argument must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_bt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    bt = math.exp(log_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _beta_cf(a, b, x) / a
    return 1.0 - bt * _beta_cf(b, a, 1.0 - x) / b


def chi_squared_sf(statistic: float, df: int) -> float:
    """Upper tail of the chi-squared distribution with df degrees of freedom."""
    if df < 1:
        raise ConfigurationError("chi-squared needs df >= 1")
    if statistic < 0:
        raise ConfigurationError("chi-squared statistic must be non-negative")
    return regularized_upper_gamma(df / 2.0, statistic / 2.0)


def f_sf(statistic: float, df1: int, df2: int) -> float:
    """Upper tail of the F distribution with (df1, df2) degrees of freedom."""
    if df1 < 1 or df2 < 1:
        raise ConfigurationError("F distribution needs df1, df2 >= 1")
    if statistic < 0:
        raise ConfigurationError("F statistic must be non-negative")
    if math.isinf(statistic):
        return 0.0
    return regularized_incomplete_beta(
        df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * statistic)
    )


@dataclass(frozen=True)
class TestResult:
    """Outcome of one significance test."""

    test: str
    statistic: float
    df: tuple[int, ...]
    p_value: float
    infinite_statistic: bool = False

    def render(self) -> str:
        dfs = ", ".join(str(d) for d in self.df)
        return f"{self.test}: statistic={self.statistic:.6g} df=({dfs}) p={self.p_value:.6g}"


@dataclass(frozen=True)
class ContingencyTable2x2:
    """Four cell counts, row-major: [[a, b], [c, d]]."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        cells = (self.a, self.b, self.c, self.d)
        if any(int(v) != v or v < 0 for v in cells):
            raise DegenerateDataError("cell counts must be non-negative integers")
        if sum(cells) == 0:
            raise DegenerateDataError("contingency table is empty")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "ContingencyTable2x2":
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise DegenerateDataError("expected a 2x2 table")
        return cls(rows[0][0], rows[0][1], rows[1][0], rows[1][1])


def chi_squared_independence(
    table: ContingencyTable2x2, *, yates: bool = False
) -> TestResult:
    """Pearson chi-squared test of independence on a 2x2 table.

    No continuity correction is applied unless ``yates`` is set.  All four
    marginal totals must be positive.
    """
    a, b, c, d = table.a, table.b, table.c, table.d
    n = a + b + c + d
    marginals = (a + b, c + d, a + c, b + d)
    if any(m == 0 for m in marginals):
        raise DegenerateDataError("a marginal total is zero; the test is undefined")
    diff = abs(a * d - b * c)
    if yates:
        diff = max(0.0, diff - n / 2.0)
    statistic = n * diff * diff / math.prod(marginals)
    return TestResult("chi-squared", statistic, (1,), chi_squared_sf(statistic, 1))


def one_way_anova(groups: Sequence[Sequence[float]]) -> TestResult:
    """One-way ANOVA F test across two or more score groups.

    Within-group variance of zero with distinct group means yields an
    infinite statistic and p = 0; fully identical data (or too few
    observations for df2 > 0) is a degenerate input.
    """
    if len(groups) < 2:
        raise ConfigurationError("ANOVA needs at least two groups")
    if any(len(g) == 0 for g in groups):
        raise DegenerateDataError("every group needs at least one observation")
    k = len(groups)
    n_total = sum(len(g) for g in groups)
    df1, df2 = k - 1, n_total - k
    if df2 <= 0:
        raise DegenerateDataError("ANOVA needs more observations than groups (df2 > 0)")
    grand = math.fsum(math.fsum(g) for g in groups) / n_total
    means = [math.fsum(g) / len(g) for g in groups]
    ss_between = math.fsum(len(g) * (m - grand) ** 2 for g, m in zip(groups, means))
    ss_within = math.fsum(
        math.fsum((x - m) ** 2 for x in g) for g, m in zip(groups, means)
    )
    if ss_within == 0.0:
        if ss_between == 0.0:
            raise DegenerateDataError("all observations are identical")
        return TestResult("anova", math.inf, (df1, df2), 0.0, infinite_statistic=True)
    statistic = (ss_between / df1) / (ss_within / df2)
    return TestResult("anova", statistic, (df1, df2), f_sf(statistic, df1, df2))
