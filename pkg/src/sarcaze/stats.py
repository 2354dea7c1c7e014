"""Statistical kernel: special functions, Welch's t-test, agreement
metrics, paired classifier comparison, feature ranking, stratified folds.

The p-value backends (regularized incomplete beta and gamma) are
implemented here directly with series and continued-fraction expansions;
absolute error is within 1e-10 over the parameter ranges the package uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateLabels,
    DomainError,
    InsufficientData,
    InvalidConfig,
    LengthMismatch,
    TooFewPerClass,
    ZeroVariance,
)

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 1000


# --- special functions ----------------------------------------------------


def reg_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b).

    Continued-fraction evaluation (modified Lentz); the symmetry
    I_x(a,b) = 1 - I_{1-x}(b,a) keeps the fraction in its fast-converging
    region.
    """
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"beta parameters must be positive, got a={a}, b={b}")
    if x < 0.0 or x > 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if x < (a + 1.0) / (a + b + 2.0):
        return _beta_front(a, b, x) * _beta_cf(a, b, x) / a
    return 1.0 - _beta_front(b, a, 1.0 - x) * _beta_cf(b, a, 1.0 - x) / b


def _beta_front(a: float, b: float, x: float) -> float:
    return math.exp(
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )


def _beta_cf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
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
        if abs(delta - 1.0) < _EPS:
            return h
    raise ConvergenceError(f"incomplete beta fraction stalled at a={a}, b={b}, x={x}")


def reg_incomplete_gamma(s: float, x: float) -> float:
    """Lower regularized incomplete gamma P(s, x).

    Series expansion for x < s + 1, continued fraction for the upper tail
    otherwise.
    """
    if s <= 0.0:
        raise DomainError(f"shape must be positive, got s={s}")
    if x < 0.0:
        raise DomainError(f"x={x} must be non-negative")
    if x == 0.0:
        return 0.0
    if x < s + 1.0:
        return _gamma_series(s, x)
    return 1.0 - _gamma_cf(s, x)


def _gamma_prefactor(s: float, x: float) -> float:
    return math.exp(-x + s * math.log(x) - math.lgamma(s))


def _gamma_series(s: float, x: float) -> float:
    ap = s
    delta = total = 1.0 / s
    for _ in range(_MAX_ITER):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * _EPS:
            return total * _gamma_prefactor(s, x)
    raise ConvergenceError(f"incomplete gamma series stalled at s={s}, x={x}")


def _gamma_cf(s: float, x: float) -> float:
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * _gamma_prefactor(s, x)
    raise ConvergenceError(f"incomplete gamma fraction stalled at s={s}, x={x}")


def chi2_survival(x: float, df: float) -> float:
    """P(X >= x) for a chi-squared variable with ``df`` degrees of freedom."""
    if df <= 0.0:
        raise DomainError(f"df={df} must be positive")
    if x < 0.0:
        raise DomainError(f"x={x} must be non-negative")
    if x == 0.0:
        return 1.0
    if x / 2.0 < df / 2.0 + 1.0:
        return 1.0 - _gamma_series(df / 2.0, x / 2.0)
    return _gamma_cf(df / 2.0, x / 2.0)


def t_two_tailed_p(t: float, df: float) -> float:
    """Two-tailed p-value of a t statistic."""
    if df <= 0.0:
        raise DomainError(f"df={df} must be positive")
    if math.isinf(t):
        return 0.0
    return reg_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


# --- Welch's t-test -------------------------------------------------------


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p: float
    mean_a: float
    std_a: float
    n_a: int
    mean_b: float
    std_b: float
    n_b: int

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "df": self.df,
            "p": self.p,
            "mean_a": self.mean_a,
            "std_a": self.std_a,
            "n_a": self.n_a,
            "mean_b": self.mean_b,
            "std_b": self.std_b,
            "n_b": self.n_b,
        }


def welch_ttest(sample_a, sample_b) -> TTestResult:
    """Two-tailed t-test without the equal-variance assumption.

    Uses sample variances (ddof=1) and Welch-Satterthwaite degrees of
    freedom.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.ndim != 1 or b.ndim != 1:
        raise DomainError("samples must be one-dimensional")
    if a.size < 2 or b.size < 2:
        raise InsufficientData(f"need >= 2 observations per sample, got {a.size} and {b.size}")
    va = float(np.var(a, ddof=1))
    vb = float(np.var(b, ddof=1))
    ta = va / a.size
    tb = vb / b.size
    se2 = ta + tb
    if se2 == 0.0:
        raise ZeroVariance("both samples are constant; t statistic undefined")
    t = float((a.mean() - b.mean()) / math.sqrt(se2))
    df = se2 * se2 / (ta * ta / (a.size - 1) + tb * tb / (b.size - 1))
    return TTestResult(
        t=t,
        df=df,
        p=t_two_tailed_p(t, df),
        mean_a=float(a.mean()),
        std_a=math.sqrt(va),
        n_a=int(a.size),
        mean_b=float(b.mean()),
        std_b=math.sqrt(vb),
        n_b=int(b.size),
    )


# --- classification metrics -----------------------------------------------

CLASSES = (1, -1)


@dataclass(frozen=True)
class Metrics:
    precision: dict[int, float]
    recall: dict[int, float]
    f_score: dict[int, float]
    support: dict[int, int]
    weighted_precision: float
    weighted_recall: float
    weighted_f: float
    macro_f: float
    accuracy: float
    kappa: float

    def to_dict(self) -> dict:
        return {
            "per_class": {
                str(c): {
                    "precision": self.precision[c],
                    "recall": self.recall[c],
                    "f_score": self.f_score[c],
                    "support": self.support[c],
                }
                for c in CLASSES
            },
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f": self.weighted_f,
            "macro_f": self.macro_f,
            "accuracy": self.accuracy,
            "kappa": self.kappa,
        }


def _check_labels(values, name: str):
    for v in values:
        if v not in (1, -1):
            raise DomainError(f"{name} contains label {v!r}; labels must be 1 or -1")


def classification_metrics(predictions, gold) -> Metrics:
    """Per-class precision/recall/F, support-weighted and macro averages,
    accuracy, and Cohen's kappa.  Undefined ratios (empty denominator)
    score 0."""
    predictions = list(predictions)
    gold = list(gold)
    if len(predictions) != len(gold) or not gold:
        raise LengthMismatch(
            f"predictions ({len(predictions)}) and gold ({len(gold)}) must have equal nonzero length"
        )
    _check_labels(predictions, "predictions")
    _check_labels(gold, "gold")
    n = len(gold)
    precision: dict[int, float] = {}
    recall: dict[int, float] = {}
    f_score: dict[int, float] = {}
    support: dict[int, int] = {}
    for c in CLASSES:
        tp = sum(1 for p, g in zip(predictions, gold) if p == c and g == c)
        pred_c = sum(1 for p in predictions if p == c)
        gold_c = sum(1 for g in gold if g == c)
        prec = tp / pred_c if pred_c else 0.0
        rec = tp / gold_c if gold_c else 0.0
        precision[c] = prec
        recall[c] = rec
        f_score[c] = (2 * prec * rec / (prec + rec)) if prec + rec else 0.0
        support[c] = gold_c
    accuracy = sum(1 for p, g in zip(predictions, gold) if p == g) / n
    p_e = sum(
        (sum(1 for p in predictions if p == c) / n) * (support[c] / n) for c in CLASSES
    )
    if p_e == 1.0:
        kappa = 1.0 if accuracy == 1.0 else 0.0
    else:
        kappa = (accuracy - p_e) / (1.0 - p_e)
    return Metrics(
        precision=precision,
        recall=recall,
        f_score=f_score,
        support=support,
        weighted_precision=sum(precision[c] * support[c] for c in CLASSES) / n,
        weighted_recall=sum(recall[c] * support[c] for c in CLASSES) / n,
        weighted_f=sum(f_score[c] * support[c] for c in CLASSES) / n,
        macro_f=sum(f_score[c] for c in CLASSES) / len(CLASSES),
        accuracy=accuracy,
        kappa=kappa,
    )


# --- McNemar's test -------------------------------------------------------


@dataclass(frozen=True)
class McNemarResult:
    b: int
    c: int
    chi2: float
    p: float
    odds_ratio: float
    alpha: float
    significant: bool
    degenerate: bool
    exact: bool

    def to_dict(self) -> dict:
        odds = self.odds_ratio
        return {
            "b": self.b,
            "c": self.c,
            "chi2": self.chi2,
            "p": self.p,
            "odds_ratio": "inf" if math.isinf(odds) else ("nan" if math.isnan(odds) else odds),
            "alpha": self.alpha,
            "significant": self.significant,
            "degenerate": self.degenerate,
            "exact": self.exact,
        }


def mcnemar(pred_a, pred_b, gold, alpha: float = 0.05, exact: bool = False) -> McNemarResult:
    """Paired comparison of two prediction vectors against gold labels.

    b counts items A got wrong and B got right; c the reverse.  The
    statistic is the continuity-corrected (|b-c|-1)^2/(b+c) against
    chi-squared df=1.  With ``exact=True`` the p-value instead comes from
    the two-tailed binomial over the discordant pairs.  No discordant
    pairs at all gives p = 1 and sets the degenerate flag.
    """
    pred_a = list(pred_a)
    pred_b = list(pred_b)
    gold = list(gold)
    if not (len(pred_a) == len(pred_b) == len(gold)) or not gold:
        raise LengthMismatch(
            f"prediction/gold lengths differ: {len(pred_a)}, {len(pred_b)}, {len(gold)}"
        )
    _check_labels(pred_a, "pred_a")
    _check_labels(pred_b, "pred_b")
    _check_labels(gold, "gold")
    b = sum(1 for pa, pb, g in zip(pred_a, pred_b, gold) if pa != g and pb == g)
    c = sum(1 for pa, pb, g in zip(pred_a, pred_b, gold) if pa == g and pb != g)
    degenerate = b + c == 0
    if degenerate:
        chi2, p = 0.0, 1.0
    else:
        chi2 = (abs(b - c) - 1) ** 2 / (b + c)
        if exact:
            m = b + c
            tail = sum(math.comb(m, i) for i in range(min(b, c) + 1))
            p = min(1.0, 2.0 * tail / 2**m)
        else:
            p = chi2_survival(chi2, 1.0)
    if c > 0:
        odds = b / c
    elif b > 0:
        odds = math.inf
    else:
        odds = math.nan
    return McNemarResult(
        b=b,
        c=c,
        chi2=chi2,
        p=p,
        odds_ratio=odds,
        alpha=alpha,
        significant=(not degenerate) and p < alpha,
        degenerate=degenerate,
        exact=exact,
    )


# --- feature ranking ------------------------------------------------------


@dataclass(frozen=True)
class FeatureRanking:
    items: tuple[tuple[str, float], ...]
    method: str
    bins: int

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.items)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "bins": self.bins,
            "items": [{"feature": n, "merit": m} for n, m in self.items],
        }


def _discretize(column: np.ndarray, bins: int) -> np.ndarray:
    lo = float(column.min())
    hi = float(column.max())
    if hi == lo:
        return np.zeros(column.size, dtype=int)
    idx = ((column - lo) / (hi - lo) * bins).astype(int)
    return np.minimum(idx, bins - 1)


def _contingency(binned: np.ndarray, labels: np.ndarray, bins: int) -> np.ndarray:
    table = np.zeros((bins, len(CLASSES)), dtype=float)
    for col, cls in enumerate(CLASSES):
        mask = labels == cls
        if mask.any():
            table[:, col] = np.bincount(binned[mask], minlength=bins)
    return table


def _chi2_merit(table: np.ndarray) -> float:
    n = table.sum()
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / n
    mask = expected > 0
    return float((((table - expected) ** 2)[mask] / expected[mask]).sum())


def _info_gain_merit(table: np.ndarray) -> float:
    n = table.sum()
    p_xy = table / n
    marginal = p_xy.sum(axis=1, keepdims=True) @ p_xy.sum(axis=0, keepdims=True)
    mask = p_xy > 0
    return float((p_xy[mask] * np.log2(p_xy[mask] / marginal[mask])).sum())


def _rank(matrix, labels, names, bins: int, merit_fn, method: str) -> FeatureRanking:
    X = np.asarray(matrix, dtype=float)
    y = np.asarray(labels)
    names = list(names)
    if bins < 2:
        raise InvalidConfig(f"bins={bins} must be >= 2")
    if X.ndim != 2 or X.shape[0] != y.size or X.shape[1] != len(names):
        raise LengthMismatch(
            f"matrix {X.shape}, labels {y.size}, names {len(names)} are inconsistent"
        )
    if len(set(y.tolist())) < 2:
        raise DegenerateLabels("feature ranking needs both classes present")
    merits = []
    for j in range(X.shape[1]):
        table = _contingency(_discretize(X[:, j], bins), y, bins)
        merits.append(merit_fn(table))
    order = sorted(range(len(names)), key=lambda j: -merits[j])
    return FeatureRanking(
        items=tuple((names[j], merits[j]) for j in order),
        method=method,
        bins=bins,
    )


def rank_chi_squared(matrix, labels, names, bins: int = 10) -> FeatureRanking:
    """Rank features by the chi-squared statistic of the bins-by-classes
    contingency table (equal-width bins per feature)."""
    return _rank(matrix, labels, names, bins, _chi2_merit, "chi_squared")


def rank_info_gain(matrix, labels, names, bins: int = 10) -> FeatureRanking:
    """Rank features by mutual information with the label, in bits."""
    return _rank(matrix, labels, names, bins, _info_gain_merit, "info_gain")


# --- stratified folds -----------------------------------------------------


def stratified_kfold(labels, k: int, seed: int) -> np.ndarray:
    """Assign each item a fold id in 0..k-1.

    Items are shuffled within their class (seeded) and dealt round-robin
    with a counter running across classes, so per-fold class proportions
    stay within one item of the global proportions and k = n degenerates
    to leave-one-out.
    """
    y = np.asarray(labels)
    if k < 2:
        raise InvalidConfig(f"k={k} must be >= 2")
    if k > y.size:
        raise TooFewPerClass(f"k={k} exceeds the {y.size} available items")
    rng = np.random.default_rng(seed)
    folds = np.empty(y.size, dtype=int)
    position = 0
    for cls in sorted(set(y.tolist())):
        idx = np.flatnonzero(y == cls)
        perm = rng.permutation(idx.size)
        for j in perm:
            folds[idx[j]] = position % k
            position += 1
    return folds
