"""Forward Ricci iteration ``Ric g_{i+1} = g_i``.

Each step solves a prescribed Ricci problem with the previous metric as the
target. Traces store *normalized* metrics together with the constants that
fix their scale: ``Ric(metrics[i+1]) = constants[i] * metrics[i]``. The
genuine iteration (no free constant after the first step) is recovered by
:meth:`IterationTrace.chain`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import HopfRicciError, NoConvergence, OutsideDomain, SingularDenominator
from .geometry import (
    FourParamForm,
    FourParamMetric,
    Su2Metric,
    TwoSummandMetric,
    canonicalize_gauge,
    su2_ricci_array,
    su2_ricci_jacobian,
)
from .newton import NewtonConfig, damped_newton
from .prescribed import SU2_TRACE, solve_four_param_homotopy, solve_su2, solve_two_summand


class TraceStatus(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    SOLVE_FAILED = "SolveFailed"


@dataclass
class IterationTrace:
    family: str
    metrics: list = field(default_factory=list)
    constants: list = field(default_factory=list)
    status: TraceStatus = TraceStatus.MAX_ITERATIONS
    limit: Optional[object] = None
    failure: Optional[str] = None
    failed_step: Optional[int] = None

    @property
    def steps(self) -> int:
        return len(self.metrics) - 1

    def chain(self) -> list:
        """Un-normalized metrics: ``Ric(chain[1]) = constants[0] * chain[0]`` and
        ``Ric(chain[i+1]) = chain[i]`` afterwards.

        The last metric's scale is only fixed by a further step, so it is
        returned normalized; Ricci is blind to that scale anyway.
        """
        out = [self.metrics[0]]
        for i in range(1, len(self.metrics)):
            g = self.metrics[i]
            out.append(g.scaled(self.constants[i]) if i < len(self.constants) else g)
        return out

    def ratios(self) -> list:
        """Per-step matrices ``alpha[k, l] = x_k / x_l`` (fibre entries)."""
        out = []
        for g in self.metrics:
            x = _fiber(g)
            out.append(x[:, None] / x[None, :])
        return out

    def deviations(self) -> np.ndarray:
        """Sup-norm distance of each normalized metric from the limit."""
        if self.limit is None:
            raise ValueError("trace has no limit")
        ref = _coords(self.limit)
        return np.array([np.max(np.abs(_coords(g) - ref)) for g in self.metrics])


def _fiber(g) -> np.ndarray:
    if isinstance(g, Su2Metric):
        return g.as_array()
    if isinstance(g, FourParamMetric):
        return g.fiber
    raise TypeError(f"no fibre entries for {type(g).__name__}")


def _coords(g) -> np.ndarray:
    if isinstance(g, Su2Metric):
        return g.as_array()
    if isinstance(g, FourParamMetric):
        return np.array([g.x1, g.x2, g.x3, g.s])
    if isinstance(g, TwoSummandMetric):
        return np.array([g.t, g.s])
    raise TypeError(type(g).__name__)


def asymptotic_rate(trace: IterationTrace, window=(1e-9, 1e-3)) -> float:
    """Median of ``d_{i+1}/d_i`` over steps whose deviation lies in ``window``."""
    d = trace.deviations()
    lo, hi = window
    rates = [d[i + 1] / d[i] for i in range(len(d) - 1) if lo <= d[i] <= hi and d[i + 1] > 0]
    if not rates:
        raise ValueError("no deviations inside the measurement window")
    return float(np.median(rates[-5:]))


# ---------------------------------------------------------------------------
# SU(2)
# ---------------------------------------------------------------------------


def iterate_su2(g0: Su2Metric, max_iter: int = 500, tol: float = 1e-10) -> IterationTrace:
    g = canonicalize_gauge(g0)
    g = g.scaled(SU2_TRACE / (g.x1 + g.x2 + g.x3))
    trace = IterationTrace("su2", [g])
    for step in range(1, max_iter + 1):
        try:
            res = solve_su2(g.as_array(), x0=g.as_array())
        except NoConvergence as exc:
            trace.status, trace.failure, trace.failed_step = TraceStatus.SOLVE_FAILED, str(exc), step
            return trace
        trace.constants.append(res.kappa)
        nxt = res.metric
        trace.metrics.append(nxt)
        if np.max(np.abs(nxt.as_array() - g.as_array())) < tol * max(1.0, max(nxt.as_array())):
            trace.status = TraceStatus.CONVERGED
            trace.limit = Su2Metric(2.0, 2.0, 2.0)
            return trace
        g = nxt
    return trace


# ---------------------------------------------------------------------------
# Two-summand families
# ---------------------------------------------------------------------------


def iterate_two_summand(g0: TwoSummandMetric, max_iter: int = 500, tol: float = 1e-10) -> IterationTrace:
    """Iterate within ``g0.family``; a step without a solution ends the trace
    with ``SolveFailed``, which here means genuine non-existence."""
    family = g0.family
    g = TwoSummandMetric(family, g0.t / g0.s, 1.0)
    trace = IterationTrace(family.kind.value, [g])
    for step in range(1, max_iter + 1):
        res = solve_two_summand(family, g.t, g.s)
        if res is None:
            trace.status = TraceStatus.SOLVE_FAILED
            trace.failed_step = step
            trace.failure = f"Ric g = kappa g_(t,s) has no solution for t/s = {g.t:.17g}"
            return trace
        trace.constants.append(res.kappa)
        nxt = res.metric
        trace.metrics.append(nxt)
        if abs(nxt.t - g.t) < tol * max(1.0, nxt.t):
            trace.status = TraceStatus.CONVERGED
            trace.limit = nxt
            return trace
        g = nxt
    return trace


# ---------------------------------------------------------------------------
# Four-parameter family near the round metric
# ---------------------------------------------------------------------------


def _f_parts(n, x):
    x = np.asarray(x, dtype=float)
    num = 4.0 * n * x * x + su2_ricci_array(x)
    den = 4.0 * n + 8.0 - 2.0 * x.sum()
    return num, den


def f_map(n: int, x) -> np.ndarray:
    """Fibre part of ``Ric g_(x,1)`` divided by its horizontal part.

    ``Ric g_(x,1) = c * g_(f(x),1)`` with ``c = 4n + 8 - 2(x1 + x2 + x3)``.
    """
    num, den = _f_parts(n, x)
    if abs(den) <= 1e-12 * (4 * n + 8):
        raise SingularDenominator(f"x1 + x2 + x3 = {np.sum(x):.17g} equals 2n + 4")
    return num / den


def f_jacobian(n: int, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    num, den = _f_parts(n, x)
    dnum = su2_ricci_jacobian(x) + np.diag(8.0 * n * x)
    return (dnum + 2.0 * (num / den)[:, None]) / den


@dataclass(frozen=True)
class FMapConfig:
    """Neighbourhood of (1, 1, 1) on which ``f`` is inverted.

    The radius is in the sup norm. Construction probes the ball's vertices and
    face centres and rejects radii where the local inverse fails to converge.
    """

    n: int
    domain_radius: float = 0.15
    newton: NewtonConfig = NewtonConfig(tol=1e-13, max_iter=50)

    def __post_init__(self):
        if not (0 < self.domain_radius < 1):
            raise ValueError("domain_radius must lie in (0, 1)")
        rad = self.domain_radius
        probes = [np.array(p) for p in np.ndindex(3, 3, 3)]
        for p in probes:
            y = 1.0 + rad * (p - 1.0)
            try:
                x = f_inverse(self.n, y, self, _probing=True)
            except HopfRicciError as exc:
                raise ValueError(f"radius {rad} too large: inverse fails at {y.tolist()}") from exc
            if np.max(np.abs(x - 1.0)) >= rad:
                raise ValueError(f"radius {rad} too large: f^-1 does not map the ball into itself")


def f_inverse(n: int, y, config: Optional[FMapConfig] = None, _probing: bool = False) -> np.ndarray:
    """Local inverse of :func:`f_map` near (1, 1, 1), by Newton's method."""
    if config is None:
        config = default_fmap_config(n)
    y = np.asarray(y, dtype=float)
    if not _probing and np.max(np.abs(y - 1.0)) > config.domain_radius:
        raise OutsideDomain(f"{y.tolist()} is outside the ball of radius {config.domain_radius}")
    contraction = (2 * n + 1) / (4 * n + 3)
    x0 = 1.0 + contraction * (y - 1.0)
    x, _ = damped_newton(
        lambda x: f_map(n, x) - y,
        lambda x: f_jacobian(n, x),
        x0,
        config.newton,
        admissible=lambda x: bool(np.all(x > 0) and np.max(np.abs(x - 1.0)) < 0.5),
    )
    return x


_FMAP_CACHE: dict = {}


def default_fmap_config(n: int) -> FMapConfig:
    if n not in _FMAP_CACHE:
        _FMAP_CACHE[n] = FMapConfig(n)
    return _FMAP_CACHE[n]


def iterate_four_param_near_round(
    g0: FourParamMetric, max_iter: int = 500, tol: float = 1e-10, config: Optional[FMapConfig] = None
) -> IterationTrace:
    n = g0.n
    if config is None:
        config = default_fmap_config(n)
    y = g0.normalized().fiber
    if np.max(np.abs(y - 1.0)) > config.domain_radius:
        raise OutsideDomain(f"normalized fibre {y.tolist()} outside radius {config.domain_radius}")
    trace = IterationTrace("four-param", [g0.normalized()])
    for step in range(1, max_iter + 1):
        try:
            x = f_inverse(n, y, config)
        except NoConvergence as exc:
            trace.status, trace.failure, trace.failed_step = TraceStatus.SOLVE_FAILED, str(exc), step
            return trace
        trace.constants.append(4.0 * n + 8.0 - 2.0 * float(x.sum()))
        trace.metrics.append(FourParamMetric(n, *x.tolist(), 1.0))
        if np.max(np.abs(x - y)) < tol:
            trace.status = TraceStatus.CONVERGED
            trace.limit = FourParamMetric(n, 1.0, 1.0, 1.0, 1.0)
            return trace
        y = x
    return trace


def _four_param_newton(n, tau, z0):
    def fun(z):
        x, c = z[:3], z[3]
        out = np.empty(4)
        out[0] = c - (4 * n + 8) + 2.0 * x.sum()
        out[1:] = c * tau - 4.0 * n * x * x - su2_ricci_array(x)
        return out

    def jac(z):
        x = z[:3]
        J = np.empty((4, 4))
        J[0, :3] = 2.0
        J[0, 3] = 1.0
        J[1:, :3] = -su2_ricci_jacobian(x) - 8.0 * n * np.diag(x)
        J[1:, 3] = tau
        return J

    z, _ = damped_newton(fun, jac, z0, NewtonConfig(tol=1e-13, max_iter=30), admissible=lambda z: bool(np.all(z > 0)))
    return z


def iterate_four_param(g0: FourParamMetric, max_iter: int = 500, tol: float = 1e-10) -> IterationTrace:
    """Best-effort iteration anywhere in the four-parameter family.

    Each step first tries Newton warm-started from the previous solution and
    falls back to the full homotopy solve; failures end the trace honestly.
    """
    n = g0.n
    g = g0.normalized()
    trace = IterationTrace("four-param", [g])
    for step in range(1, max_iter + 1):
        tau = g.fiber
        z = None
        if step > 1:
            try:
                z = _four_param_newton(n, tau, np.append(g.fiber, trace.constants[-1]))
            except NoConvergence:
                z = None
        if z is None:
            try:
                res = solve_four_param_homotopy(FourParamForm.of_metric(g))
            except HopfRicciError as exc:
                trace.status, trace.failure, trace.failed_step = TraceStatus.SOLVE_FAILED, f"{type(exc).__name__}: {exc}", step
                return trace
            z = np.append(res.metric.fiber, res.kappa)
        nxt = FourParamMetric(n, *z[:3].tolist(), 1.0)
        trace.constants.append(float(z[3]))
        trace.metrics.append(nxt)
        if np.max(np.abs(nxt.fiber - g.fiber)) < tol * max(1.0, float(np.max(nxt.fiber))):
            trace.status = TraceStatus.CONVERGED
            trace.limit = nxt
            return trace
        g = nxt
    return trace


def ratio_recurrence_defect(prev: Su2Metric, nxt: Su2Metric) -> float:
    """Largest defect of the ratio recurrence between consecutive SU(2) iterates.

    For ``Ric(nxt) ∝ prev`` every ``alpha_kl`` of ``prev`` equals the
    corresponding ratio of ``nxt`` times
    ``(alpha_mk + 1 - alpha_lk) / (alpha_mk - 1 + alpha_lk)``, m the third index.
    """
    x, y = prev.as_array(), nxt.as_array()
    worst = 0.0
    for k in range(3):
        for l in range(3):
            if k == l:
                continue
            m = 3 - k - l
            a = lambda p, q: y[p] / y[q]  # noqa: E731
            rhs = a(k, l) * (a(m, k) + 1 - a(l, k)) / (a(m, k) - 1 + a(l, k))
            worst = max(worst, abs(x[k] / x[l] - rhs) / max(1.0, abs(rhs)))
    return worst


def trace_defect(trace: IterationTrace, ricci) -> float:
    """Max relative defect of ``Ric(chain[i+1]) = chain[i]`` (first step with its constant)."""
    chain = trace.chain()
    worst = 0.0
    for i in range(len(chain) - 1):
        lhs = np.array(ricci(chain[i + 1]).coefficients())
        rhs = _coords(chain[i]) * (trace.constants[0] if i == 0 else 1.0)
        worst = max(worst, float(np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(rhs)))))
    return worst
