"""Backward (ancient) Ricci iteration ``g_{i-1} = Ric g_i``.

Going backward needs no solver, only repeated Ricci evaluation, but every
iterate has to stay positive definite. Traces record how long that lasts and
whether the sequence settles.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .geometry import (
    DiagonalForm3,
    FourParamForm,
    FourParamMetric,
    Su2Metric,
    TwoSummandForm,
    TwoSummandMetric,
    canonicalize_gauge,
    positivity_check,
    ricci_four_param,
    ricci_su2,
    ricci_two_summand,
)

BERGER_RTOL = 1e-12
FIBER_FLOOR = 1e-300  # far below any collapse threshold, far above subnormals


class AncientStatus(enum.Enum):
    STILL_POSITIVE = "StillPositive"
    LOST_POSITIVITY = "LostPositivity"
    CONVERGED_COLLAPSE = "ConvergedCollapse"
    CONVERGED_EINSTEIN = "ConvergedEinstein"


@dataclass(frozen=True)
class AncientConfig:
    margin: float = 0.0  # positivity margin on every coefficient
    collapse_fiber: float = 1e-10  # fibre entry (relative to the metric's size) counted as zero
    collapse_base: float = 1e-8  # stationarity of the remaining entries during collapse
    stationary_tol: float = 1e-12  # relative step size counted as a fixed point


@dataclass
class AncientTrace:
    metrics: list = field(default_factory=list)  # metrics[k] = g_{1-k}
    steps_survived: int = 0
    status: AncientStatus = AncientStatus.STILL_POSITIVE
    fiber_length_proxy: list = field(default_factory=list)
    offending_form: Optional[object] = None

    @property
    def survived(self) -> bool:
        return self.status is not AncientStatus.LOST_POSITIVITY

    @property
    def lost_at_step(self) -> Optional[int]:
        """1-based index of the Ricci step that produced the indefinite form."""
        if self.status is AncientStatus.LOST_POSITIVITY:
            return self.steps_survived + 1
        return None


def _ricci(g):
    if isinstance(g, Su2Metric):
        return ricci_su2(g)
    if isinstance(g, TwoSummandMetric):
        return ricci_two_summand(g)
    if isinstance(g, FourParamMetric):
        return ricci_four_param(g)
    raise TypeError(f"unsupported metric {type(g).__name__}")


def _as_metric(form, like):
    if isinstance(like, Su2Metric):
        return Su2Metric(*form.coefficients())
    if isinstance(like, TwoSummandMetric):
        return TwoSummandMetric(like.family, form.A, form.B)
    return FourParamMetric(form.n, form.a1, form.a2, form.a3, form.b)


def _parts(g):
    """(smallest fibre entry, remaining entries), in units of the base scale."""
    if isinstance(g, Su2Metric):
        x = np.sort(g.as_array())
        return float(x[0]), x[1:]
    if isinstance(g, TwoSummandMetric):
        return g.t / g.s, np.array([1.0])
    x = np.sort(g.fiber) / g.s
    return float(x[0]), x[1:]


def _proxy(g) -> float:
    """Length scale of the collapsing fibre direction."""
    return math.sqrt(_parts(g)[0])


def _collapsed(prev, g, cfg) -> bool:
    fiber, rest = _parts(g)
    if fiber >= cfg.collapse_fiber:
        return False
    if isinstance(g, Su2Metric):
        # the remaining pair converges to 4
        return bool(np.all(np.abs(rest - 4.0) < cfg.collapse_base))
    _, rest_prev = _parts(prev)
    return bool(np.all(np.abs(rest - rest_prev) < cfg.collapse_base * rest))


def _underflowing(g, form, cfg) -> bool:
    """The fibre has collapsed and its squaring decay is about to leave the
    normal double range; the base entries are unaffected."""
    fiber, _ = _parts(g)
    c = form.coefficients()
    return fiber < cfg.collapse_fiber and min(c) >= 0.0 and min(c) < FIBER_FLOOR


def _floored(form):
    # hold the fibre at FIBER_FLOOR so the base keeps evolving; a real
    # collapse then shows up as base stationarity, a fake one as lost positivity
    c = [max(v, FIBER_FLOOR) for v in form.coefficients()]
    if isinstance(form, DiagonalForm3):
        return DiagonalForm3(*c)
    if isinstance(form, TwoSummandForm):
        return TwoSummandForm(form.family, *c)
    return FourParamForm(form.n, *c)


def _stationary(prev, g, cfg) -> bool:
    a = np.array(_ricci_coords(prev))
    b = np.array(_ricci_coords(g))
    return bool(np.all(np.abs(a - b) <= cfg.stationary_tol * np.abs(b)))


def _ricci_coords(g):
    if isinstance(g, Su2Metric):
        return (g.x1, g.x2, g.x3)
    if isinstance(g, TwoSummandMetric):
        return (g.t, g.s)
    return (g.x1, g.x2, g.x3, g.s)


def ancient_iterate(g1, max_steps: int = 100, config: AncientConfig = AncientConfig()) -> AncientTrace:
    """Apply ``g -> Ric g`` up to ``max_steps`` times, stopping early on
    positivity loss, fibre collapse or a fixed point."""
    trace = AncientTrace([g1], 0, AncientStatus.STILL_POSITIVE, [_proxy(g1)])
    g = g1
    for _ in range(max_steps):
        form = _ricci(g)
        if _underflowing(g, form, config):
            form = _floored(form)
        if not positivity_check(form, config.margin):
            trace.status = AncientStatus.LOST_POSITIVITY
            trace.offending_form = form
            return trace
        nxt = _as_metric(form, g)
        trace.metrics.append(nxt)
        trace.fiber_length_proxy.append(_proxy(nxt))
        trace.steps_survived += 1
        if _collapsed(g, nxt, config):
            trace.status = AncientStatus.CONVERGED_COLLAPSE
            return trace
        if _stationary(g, nxt, config):
            trace.status = AncientStatus.CONVERGED_EINSTEIN
            return trace
        g = nxt
    return trace


# ---------------------------------------------------------------------------
# Berger metrics on SU(2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BergerForm:
    """``scale * (nu, 2, 2)`` with the distinguished entry at index ``axis``."""

    nu: float
    scale: float
    axis: int

    def metric(self) -> Su2Metric:
        x = [2.0 * self.scale] * 3
        x[self.axis] = self.nu * self.scale
        return Su2Metric(*x)


def berger_form(g: Su2Metric, rtol: float = BERGER_RTOL) -> Optional[BergerForm]:
    """Recognize ``g`` as a scaled Berger metric, or return None."""
    x = g.as_array()
    top = float(x.max())
    for k in range(3):
        i, j = [m for m in range(3) if m != k]
        if abs(x[i] - x[j]) <= rtol * top:
            pair = 0.5 * (x[i] + x[j])
            if k == 0 and abs(x[0] - pair) <= rtol * top:
                return BergerForm(2.0, pair / 2.0, 0)
            return BergerForm(2.0 * x[k] / pair, pair / 2.0, k)
    return None


def classify_ancient_su2(g: Su2Metric) -> bool:
    """True iff ``g`` admits an ancient Ricci iteration: a scaled Berger
    metric whose distinguished entry is not the largest (nu <= 2)."""
    bf = berger_form(canonicalize_gauge(g))
    return bf is not None and bf.nu <= 2.0 * (1.0 + BERGER_RTOL)


# ---------------------------------------------------------------------------
# Scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    point: object
    steps_survived: int
    status: AncientStatus
    hypothesis: Optional[bool] = None  # x1 <= x <= s, U(1)-symmetric four-parameter points only


def spu1_ancient_hypothesis(g: FourParamMetric) -> Optional[bool]:
    """The necessary condition ``x1 <= x <= s`` for U(1)-symmetric metrics
    ``g_(x1,x,x,s)``; None when no two fibre entries coincide."""
    bf = berger_form(Su2Metric(g.x1, g.x2, g.x3))
    if bf is None:
        return None
    x1 = bf.nu * bf.scale
    x = 2.0 * bf.scale
    return bool(x1 <= x <= g.s)


def ancient_region_scan(points: Iterable, max_steps: int = 100, config: AncientConfig = AncientConfig()) -> list:
    rows = []
    for g in points:
        tr = ancient_iterate(g, max_steps, config)
        hyp = spu1_ancient_hypothesis(g) if isinstance(g, FourParamMetric) else None
        rows.append(ScanRow(g, tr.steps_survived, tr.status, hyp))
    return rows
