"""Fixed-effects ANOVA and Tukey HSD pairwise comparisons."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import special

from . import _qtable


@dataclass(frozen=True)
class AnovaRow:
    source: str
    ss: float
    df: int
    ms: float
    f: float
    p: float


@dataclass(frozen=True)
class AnovaTable:
    rows: tuple[AnovaRow, ...]
    sse: float
    df_error: int
    ss_total: float
    degenerate: bool = False

    @property
    def mse(self) -> float:
        return self.sse / self.df_error if self.df_error > 0 else float("nan")

    @property
    def p(self) -> float:
        """p-value of the first (for one-way ANOVA, the only) effect."""
        return self.rows[0].p

    @property
    def f(self) -> float:
        return self.rows[0].f

    def __getitem__(self, source: str) -> AnovaRow:
        for row in self.rows:
            if row.source == source:
                return row
        raise KeyError(source)

    def to_text(self) -> str:
        lines = [f"{'Source':<12}{'SS':>18}{'df':>8}{'MS':>18}{'F':>12}{'p':>10}"]
        for r in self.rows:
            lines.append(f"{r.source:<12}{r.ss:>18.6g}{r.df:>8d}{r.ms:>18.6g}{r.f:>12.6g}{r.p:>10.4g}")
        lines.append(f"{'Error':<12}{self.sse:>18.6g}{self.df_error:>8d}{self.mse:>18.6g}")
        lines.append(f"{'Total':<12}{self.ss_total:>18.6g}{self.df_error + sum(r.df for r in self.rows):>8d}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source", "ss", "df", "ms", "f", "p"])
        for r in self.rows:
            w.writerow([r.source, repr(r.ss), r.df, repr(r.ms), repr(r.f), repr(r.p)])
        w.writerow(["error", repr(self.sse), self.df_error, repr(self.mse), "", ""])
        return buf.getvalue()


def _f_test(ss: float, df: int, sse: float, df_error: int) -> tuple[float, float, float, bool]:
    ms = ss / df
    if sse <= 0.0:
        # zero within-group variance: equal means cannot be rejected, distinct ones trivially are
        if ss <= 0.0:
            return ms, float("nan"), 1.0, True
        return ms, float("inf"), 0.0, True
    f = ms / (sse / df_error)
    return ms, f, float(special.fdtrc(df, df_error, f)), False


def one_way_anova(groups) -> AnovaTable:
    groups = [np.asarray(g, dtype=float).ravel() for g in groups]
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    if any(g.size == 0 for g in groups):
        raise ValueError("empty group")
    n_total = sum(g.size for g in groups)
    df_error = n_total - len(groups)
    if df_error < 1:
        raise ValueError("need more observations than groups")
    # shifted sums: constant groups give exact zeros instead of rounding noise
    means = [g[0] + (g - g[0]).mean() for g in groups]
    grand = means[0] + sum(g.size * (m - means[0]) for g, m in zip(groups, means)) / n_total
    ssb = float(sum(g.size * (m - grand) ** 2 for g, m in zip(groups, means)))
    sse = float(sum(((g - m) ** 2).sum() for g, m in zip(groups, means)))
    sst = float(sum(((g - grand) ** 2).sum() for g in groups))
    ms, f, p, degenerate = _f_test(ssb, len(groups) - 1, sse, df_error)
    row = AnovaRow("between", ssb, len(groups) - 1, ms, f, p)
    return AnovaTable((row,), sse, df_error, sst, degenerate)


def main_effects_anova(factors, response, names=None) -> AnovaTable:
    """Main-effects ANOVA on a balanced full-factorial design; interactions pool into error."""
    y = np.asarray(response, dtype=float).ravel()
    factors = [np.asarray(f).ravel() for f in factors]
    names = list(names) if names is not None else [f"factor{i + 1}" for i in range(len(factors))]
    if any(f.size != y.size for f in factors):
        raise ValueError("every factor needs one level per observation")
    cells: dict[tuple, int] = {}
    for key in zip(*factors):
        cells[key] = cells.get(key, 0) + 1
    n_levels = [len(np.unique(f)) for f in factors]
    if len(cells) != math.prod(n_levels) or len(set(cells.values())) != 1:
        raise ValueError("design is not a balanced full factorial")

    grand = y.mean()
    sst = float(((y - grand) ** 2).sum())
    effects = []
    for f in factors:
        ss = 0.0
        for level in np.unique(f):
            sel = y[f == level]
            ss += sel.size * (sel.mean() - grand) ** 2
        effects.append(float(ss))
    df_error = y.size - 1 - sum(k - 1 for k in n_levels)
    if df_error < 1:
        raise ValueError("no residual degrees of freedom")
    sse = max(0.0, sst - sum(effects))
    rows = []
    degenerate = False
    for name, ss, k in zip(names, effects, n_levels):
        ms, fval, p, deg = _f_test(ss, k - 1, sse, df_error)
        degenerate |= deg
        rows.append(AnovaRow(name, ss, k - 1, ms, fval, p))
    return AnovaTable(tuple(rows), sse, df_error, sst, degenerate)


# -- studentized range --------------------------------------------------------------


def studentized_range_q(p: int, f: float, alpha: float = 0.05, method: str = "table") -> float:
    """Upper ``alpha`` quantile of the studentized range for ``p`` means and ``f`` error df.

    ``method="table"`` interpolates the embedded table harmonically in ``1/f``
    and uses the infinite-df row beyond f = 120.  ``method="numeric"`` inverts
    the distribution function directly.  ``method="auto"`` uses the table when
    it covers the request.
    """
    if p < 2:
        raise ValueError("need at least two groups")
    if not f >= 1:
        raise ValueError("error degrees of freedom must be >= 1")
    tabled = alpha in _qtable.TABLE and p in _qtable.GROUPS
    if method == "auto":
        method = "table" if tabled else "numeric"
    if method == "numeric":
        from scipy.stats import studentized_range

        return float(studentized_range.ppf(1.0 - alpha, p, f))
    if method != "table":
        raise ValueError(f"unknown method {method!r}")
    if alpha not in _qtable.TABLE:
        raise ValueError(f"alpha={alpha} is not tabled (0.05, 0.01); use method='numeric'")
    if p not in _qtable.GROUPS:
        raise ValueError(f"p={p} groups is not tabled (2..10); use method='numeric'")
    col = p - 2
    rows = _qtable.TABLE[alpha]
    dfs = _qtable.DF
    if f > dfs[-1]:
        return rows[None][col]
    if f in rows:
        return rows[f][col]
    hi = next(d for d in dfs if d > f)
    lo = dfs[dfs.index(hi) - 1]
    q_lo, q_hi = rows[lo][col], rows[hi][col]
    t = (1 / f - 1 / lo) / (1 / hi - 1 / lo)
    return q_lo + t * (q_hi - q_lo)


# -- Tukey HSD ----------------------------------------------------------------------


@dataclass(frozen=True)
class TukeyPair:
    i: int
    j: int
    diff: float  # mean_i - mean_j
    threshold: float
    rejected: bool


@dataclass
class TukeyReport:
    pairs: list[TukeyPair]
    alpha: float
    q: float
    mse: float
    df_error: int
    means: np.ndarray
    labels: list[str] = field(default_factory=list)

    def pair(self, i: int, j: int) -> TukeyPair:
        for pr in self.pairs:
            if (pr.i, pr.j) == (i, j):
                return pr
            if (pr.j, pr.i) == (i, j):
                return TukeyPair(i, j, -pr.diff, pr.threshold, pr.rejected)
        raise KeyError((i, j))

    @property
    def rejected_pairs(self) -> set[tuple[int, int]]:
        return {(p.i, p.j) for p in self.pairs if p.rejected}

    def to_text(self) -> str:
        labels = self.labels or [str(i) for i in range(len(self.means))]
        lines = [f"Tukey HSD  alpha={self.alpha}  q={self.q:.4f}  MSE={self.mse:.6g}  df={self.df_error}"]
        lines.append(f"{'i':>10} {'j':>10} {'mean_i - mean_j':>18} {'threshold':>14}  reject")
        for p in self.pairs:
            lines.append(
                f"{labels[p.i]:>10} {labels[p.j]:>10} {p.diff:>18.6g} {p.threshold:>14.6g}  {'yes' if p.rejected else 'no'}"
            )
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        labels = self.labels or [str(i) for i in range(len(self.means))]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "diff", "threshold", "rejected"])
        for p in self.pairs:
            w.writerow([labels[p.i], labels[p.j], repr(p.diff), repr(p.threshold), int(p.rejected)])
        return buf.getvalue()


def tukey_threshold(q: float, mse: float, n_i: int, n_j: int) -> float:
    return q / math.sqrt(2.0) * math.sqrt(mse * (1.0 / n_i + 1.0 / n_j))


def tukey_hsd(summary, alpha: float = 0.05, labels=None, method: str = "auto") -> TukeyReport:
    """All-pairs Tukey comparison; accepts a ``SimSummary`` or a list of sample vectors."""
    groups = summary.groups if hasattr(summary, "groups") else [np.asarray(g, dtype=float) for g in summary]
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    table = one_way_anova(groups)
    k = len(groups)
    mse = table.sse / table.df_error
    q = studentized_range_q(k, table.df_error, alpha, method=method)
    means = np.array([g.mean() for g in groups])
    sizes = [g.size for g in groups]
    pairs = []
    for i, j in combinations(range(k), 2):
        thr = tukey_threshold(q, mse, sizes[i], sizes[j])
        diff = float(means[i] - means[j])
        pairs.append(TukeyPair(i, j, diff, thr, abs(diff) > thr))
    return TukeyReport(pairs, alpha, q, mse, table.df_error, means, list(labels or []))
