"""Einstein metrics in the coordinate families and a uniqueness scan for
Sp(1)-invariant Ricci curvature on the four-parameter family."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .geometry import (
    FibrationFamily,
    FourParamMetric,
    Su2Metric,
    TwoSummandMetric,
    four_param_ricci_array,
    ricci_four_param,
    ricci_su2,
    ricci_two_summand,
)

ROUND = "round"


@dataclass(frozen=True)
class EinsteinEntry:
    family: str
    ratio: Union[float, str]  # t/s, or "round" for the SU(2) entry
    einstein_constant: float
    metric: object


def einstein_ratios(family: FibrationFamily) -> list[float]:
    """Positive roots of ``(beta + delta) r^2 - gamma r + alpha = 0``, ascending."""
    alpha, beta, gamma, delta = family.ricci_coefficients
    qa = beta + delta
    disc = gamma * gamma - 4.0 * qa * alpha
    root = math.sqrt(disc)
    big = (gamma + root) / (2.0 * qa)
    # the small root via Vieta avoids cancellation
    small = alpha / (qa * big)
    return sorted(r for r in {small, big} if r > 0.0)


def einstein_list(family, n: int = 1) -> list[EinsteinEntry]:
    """Einstein metrics of a family, normalized to s = 1.

    ``family`` is a FibrationFamily, a family kind string, ``"su2"`` or
    ``"four_param"`` (whose entries are the embedded ``g_(r,r,r,1)``).
    """
    if family == "su2":
        return [EinsteinEntry("su2", ROUND, 1.0, Su2Metric(2.0, 2.0, 2.0))]
    if family == "four_param":
        sp1 = FibrationFamily("sp1", n)
        out = []
        for r in einstein_ratios(sp1):
            g = FourParamMetric(n, r, r, r, 1.0)
            out.append(EinsteinEntry("four_param", r, ricci_four_param(g).b, g))
        return out
    if not isinstance(family, FibrationFamily):
        family = FibrationFamily(family, n)
    out = []
    for r in einstein_ratios(family):
        g = TwoSummandMetric(family, r, 1.0)
        out.append(EinsteinEntry(family.kind.value, r, ricci_two_summand(g).B, g))
    return out


def _pairs(g):
    if isinstance(g, Su2Metric):
        return ricci_su2(g).coefficients(), (g.x1, g.x2, g.x3)
    if isinstance(g, TwoSummandMetric):
        return ricci_two_summand(g).coefficients(), (g.t, g.s)
    if isinstance(g, FourParamMetric):
        return ricci_four_param(g).coefficients(), (g.x1, g.x2, g.x3, g.s)
    raise TypeError(f"unsupported metric {type(g).__name__}")


def is_einstein(g, tol: float = 1e-12) -> Optional[float]:
    """Return ``lam`` with ``Ric g = lam * g`` to relative ``tol``, else None."""
    ric, m = (np.array(v, dtype=float) for v in _pairs(g))
    lam = float(ric @ m / (m @ m))
    scale = max(float(np.max(np.abs(ric))), abs(lam) * float(np.max(m)))
    if np.max(np.abs(ric - lam * m)) <= tol * scale:
        return lam
    return None


# ---------------------------------------------------------------------------
# Uniqueness scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniquenessReport:
    n: int
    samples: int
    flagged: np.ndarray  # rows (x1, x2, x3) with equal a-values but unequal x
    max_identity_defect: float

    @property
    def flag_count(self) -> int:
        return len(self.flagged)


def difference_identities(n: int, x: np.ndarray, a: np.ndarray):
    """Left and right sides of the two cleared-denominator differences

        a1 x2 x3 - a2 x1 x3 = (x1 - x2)(4n x1 x2 x3 + 4(x1 + x2 - x3))
        a2 x1 x3 - a3 x1 x2 = (x2 - x3)(4n x1 x2 x3 + 4(x2 + x3 - x1))

    for rows of ``x`` with fibre coefficients ``a`` (s = 1)."""
    x1, x2, x3 = x[:, 0], x[:, 1], x[:, 2]
    a1, a2, a3 = a[:, 0], a[:, 1], a[:, 2]
    p = 4.0 * n * x1 * x2 * x3
    lhs = np.stack([a1 * x2 * x3 - a2 * x1 * x3, a2 * x1 * x3 - a3 * x1 * x2], axis=1)
    rhs = np.stack([(x1 - x2) * (p + 4.0 * (x1 + x2 - x3)), (x2 - x3) * (p + 4.0 * (x2 + x3 - x1))], axis=1)
    return lhs, rhs


def sp1_uniqueness_scan(
    n: int,
    points: Optional[np.ndarray] = None,
    samples: int = 10**6,
    lo: float = 0.1,
    hi: float = 5.0,
    seed: int = 0,
    a_tol: float = 1e-9,
    x_tol: float = 1e-6,
    chunk: int = 200_000,
) -> UniquenessReport:
    """Search for fibre triples whose Ricci is Sp(1)-invariant (equal a_i)
    without the metric being so (unequal x_i).

    Uses ``points`` (shape (m, 3), s = 1) if given, otherwise ``samples``
    uniform draws from ``[lo, hi]^3``.
    """
    if points is None:
        rng = np.random.Generator(np.random.PCG64(seed))
        blocks = (rng.uniform(lo, hi, size=(min(chunk, samples - i), 3)) for i in range(0, samples, chunk))
    else:
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        blocks = (pts[i : i + chunk] for i in range(0, len(pts), chunk))
    flagged = []
    worst = 0.0
    total = 0
    for x in blocks:
        total += len(x)
        a, _ = four_param_ricci_array(n, x)
        a_spread = np.ptp(a, axis=1)
        x_spread = np.ptp(x, axis=1)
        hit = (a_spread <= a_tol) & (x_spread > x_tol)
        if np.any(hit):
            flagged.append(x[hit])
        lhs, rhs = difference_identities(n, x, a)
        scale = np.maximum(np.abs(lhs), np.abs(rhs)).max(axis=1)
        scale = np.maximum(scale, np.max(np.abs(a), axis=1) * np.prod(x, axis=1) / x.min(axis=1))
        defect = np.max(np.abs(lhs - rhs), axis=1) / scale
        worst = max(worst, float(np.max(defect)) if len(defect) else 0.0)
    rows = np.concatenate(flagged) if flagged else np.empty((0, 3))
    return UniquenessReport(n, total, rows, worst)
