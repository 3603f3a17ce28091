"""Document-level evaluation: binarization, ROC/AUC, Youden's J, Welch's t-test."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc

from .annotation import LabelClass


class BinaryTarget(enum.IntEnum):
    NOT_BILATERAL = 0
    BILATERAL = 1


def binarize(label: LabelClass) -> BinaryTarget:
    """none, present and unilateral all map to not-bilateral."""
    return BinaryTarget.BILATERAL if LabelClass(label) is LabelClass.BILATERAL else BinaryTarget.NOT_BILATERAL


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    fpr: float
    tpr: float


def roc_curve(scores: Sequence[float], targets: Sequence[int]) -> list[RocPoint]:
    """ROC points at +inf and at every distinct score, in descending threshold order.

    A point at threshold ``t`` classifies ``score >= t`` as positive, so tied
    scores enter the curve together.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray([int(t) for t in targets])
    if s.shape != y.shape:
        raise ValueError("scores and targets differ in length")
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs at least one positive and one negative example")
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    tps = np.cumsum(y == 1)
    fps = np.cumsum(y == 0)
    last = np.r_[np.nonzero(np.diff(s))[0], len(s) - 1]
    points = [RocPoint(math.inf, 0.0, 0.0)]
    for i in last:
        points.append(RocPoint(float(s[i]), fps[i] / n_neg, tps[i] / n_pos))
    return points


def auc(curve: Sequence[RocPoint]) -> float:
    """Trapezoidal area under the curve."""
    fpr = np.array([p.fpr for p in curve])
    tpr = np.array([p.tpr for p in curve])
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


@dataclass(frozen=True)
class YoudenPoint:
    j: float
    threshold: float
    fpr: float
    tpr: float


def youden_j(curve: Sequence[RocPoint]) -> YoudenPoint:
    """Point maximizing TPR - FPR; ties go to lower FPR, then lower threshold."""
    best = min(curve, key=lambda p: (-(p.tpr - p.fpr), p.fpr, p.threshold))
    return YoudenPoint(best.tpr - best.fpr, best.threshold, best.fpr, best.tpr)


# --------------------------------------------------------------------------
# multi-run comparison


def student_t_sf(t: float, df: float) -> float:
    """Upper tail ``P(T > t)`` of Student's t via the regularized incomplete beta."""
    x = df / (df + t * t)
    tail = 0.5 * betainc(df / 2.0, 0.5, x)
    return float(tail if t >= 0 else 1.0 - tail)


@dataclass(frozen=True)
class WelchResult:
    mean_a: float
    mean_b: float
    std_a: float
    std_b: float
    t: float
    df: float
    p_two_sided: float


def mean_std_compare(runs_a: Sequence[float], runs_b: Sequence[float]) -> WelchResult:
    """Two-sided Welch t-test (unequal variances) between two sets of runs."""
    a = np.asarray(runs_a, dtype=np.float64)
    b = np.asarray(runs_b, dtype=np.float64)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("need at least two runs per side")
    ma, mb = float(a.mean()), float(b.mean())
    va, vb = float(a.var(ddof=1)), float(b.var(ddof=1))
    sa, sb = math.sqrt(va), math.sqrt(vb)
    se2 = va / len(a) + vb / len(b)
    if se2 == 0.0:
        if ma == mb:
            return WelchResult(ma, mb, sa, sb, 0.0, math.inf, 1.0)
        return WelchResult(ma, mb, sa, sb, math.copysign(math.inf, ma - mb), math.inf, 0.0)
    t = (ma - mb) / math.sqrt(se2)
    df = se2**2 / ((va / len(a)) ** 2 / (len(a) - 1) + (vb / len(b)) ** 2 / (len(b) - 1))
    p = min(1.0, 2.0 * student_t_sf(abs(t), df))
    return WelchResult(ma, mb, sa, sb, t, df, p)
