"""Solvers for the prescribed Ricci curvature equation ``Ric g = kappa T``.

Within each family ``Ric`` is scale invariant, so a solution is a metric up to
scale together with a uniquely determined constant ``kappa > 0``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import NoConvergence, PathFailure, RootSelectionAmbiguous, ScalingFailure
from .geometry import (
    DiagonalForm3,
    FibrationFamily,
    FourParamForm,
    FourParamMetric,
    Su2Metric,
    TwoSummandMetric,
    ricci_four_param,
    ricci_su2,
    su2_ricci_array,
    su2_ricci_jacobian,
    two_summand_coefficients,
)
from .newton import NewtonConfig, damped_newton

SU2_TRACE = 6.0  # solutions are scaled to x1 + x2 + x3 = 6, so the round one is (2, 2, 2)
DEGENERATE_RTOL = 1e-13


@dataclass
class HomotopyState:
    lam: float
    point: np.ndarray  # (x1, x2, x3, c)
    step: float


@dataclass
class PathReport:
    accepted: int = 0
    rejected: int = 0
    min_step: float = math.inf
    last_lambda: float = 0.0
    states: list = field(default_factory=list)


@dataclass
class SolveResult:
    metric: object
    kappa: float
    residual: float
    iterations: int = 0
    path_report: Optional[PathReport] = None


def _as_triple(T) -> np.ndarray:
    if isinstance(T, DiagonalForm3):
        T = T.as_array()
    t = np.asarray(T, dtype=float).reshape(3)
    if not np.all(np.isfinite(t)) or np.any(t <= 0):
        raise ValueError(f"target entries must be positive, got {t.tolist()}")
    return t


# ---------------------------------------------------------------------------
# SU(2)
# ---------------------------------------------------------------------------


LOG_BOUND = 40.0  # keeps exp(z) and the Ricci quotients finite


def _su2_admissible(z):
    return bool(np.all(np.abs(z[:3]) < LOG_BOUND))


def _su2_system(tau):
    # Unknowns (log x1, log x2, log x3, c); plain floats, this is the hot loop.
    t1, t2, t3 = tau.tolist()

    def fun(z):
        w1, w2, w3, c = z.tolist()
        x1, x2, x3 = math.exp(w1), math.exp(w2), math.exp(w3)
        return np.array(
            [
                2.0 * (x1 * x1 - (x2 - x3) ** 2) / (x2 * x3) - c * t1,
                2.0 * (x2 * x2 - (x1 - x3) ** 2) / (x1 * x3) - c * t2,
                2.0 * (x3 * x3 - (x1 - x2) ** 2) / (x1 * x2) - c * t3,
                x1 + x2 + x3 - SU2_TRACE,
            ]
        )

    def jac(z):
        x = [math.exp(w) for w in z.tolist()[:3]]
        rows = []
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            xi, xj, xk = x[i], x[j], x[k]
            p = xj * xk
            r = 2.0 * (xi * xi - (xj - xk) ** 2) / p
            row = [0.0, 0.0, 0.0, -tau[i]]
            row[i] = 4.0 * xi * xi / p
            row[j] = -4.0 * (xj - xk) * xj / p - r
            row[k] = 4.0 * (xj - xk) * xk / p - r
            rows.append(row)
        rows.append(x + [0.0])
        return np.array(rows)

    return fun, jac


def _su2_initial_guesses(t, x0):
    if x0 is not None:
        yield np.asarray(x0, dtype=float)
    yield np.array([2.0, 2.0, 2.0])
    yield t
    for perm in itertools.permutations(np.sort(t)):
        yield np.array(perm)


def solve_su2(T, x0=None, tol: float = 1e-10, newton: NewtonConfig = NewtonConfig()) -> SolveResult:
    """Find ``g`` with ``Ric g = c T`` on SU(2), normalized to trace 6.

    ``x0`` is an optional first initial guess; the fallback guesses are the
    round metric, T itself and the permutations of sorted T.
    """
    t = _as_triple(T)
    scale = t.max()
    tau = t / scale
    fun, jac = _su2_system(tau)
    failures = []
    for guess in _su2_initial_guesses(t, x0):
        x = SU2_TRACE * guess / guess.sum()
        r = su2_ricci_array(x)
        c0 = float(r @ tau / (tau @ tau))
        z0 = np.concatenate([np.log(x), [c0]])
        try:
            z, its = damped_newton(fun, jac, z0, newton, admissible=_su2_admissible)
        except NoConvergence as exc:
            failures.append(str(exc))
            continue
        c = z[3] / scale
        if c <= 0:
            failures.append(f"non-positive constant {c}")
            continue
        x = np.exp(z[:3])
        x *= SU2_TRACE / x.sum()
        g = Su2Metric.from_array(x)
        defect = ricci_su2(g).as_array() - c * t
        residual = float(np.max(np.abs(defect)))
        if residual <= tol * max(1.0, float(np.max(c * t))):
            return SolveResult(g, float(c), residual, its)
        failures.append(f"residual {residual:.3e}")
    raise NoConvergence("SU(2) solve failed from every initialization: " + "; ".join(failures))


class CBranch(enum.Enum):
    GENERIC_CUBIC = "GenericCubic"
    DEGENERATE_CLOSED_FORM = "DegenerateClosedForm"


@dataclass(frozen=True)
class CFunctionResult:
    c: float
    Z: float
    branch: CBranch
    metric: Su2Metric  # induced solution of the SU(2) system, trace 6


def c_cubic_coefficients(t1, t2, t3):
    """Coefficients (highest degree first) of the cubic whose root is ``Z = x3/x1``."""
    return np.array(
        [
            t1 * t1 * (t2 - t3),
            t1 * t3 * (2 * t1 - t2 - t3),
            t1 * t3 * (2 * t3 - t1 - t2),
            t3 * t3 * (t2 - t1),
        ]
    )


def _c_from_Z(t1, t3, Z):
    return 8.0 * (t1 * Z * Z - t3) / (t1 * t1 * Z * Z - t3 * t3)


def berger_closed_form(d: float, p: float) -> tuple[float, float]:
    """Solution of the SU(2) system for a target ``(d, p, p)``.

    Returns ``(rho, c)`` where the solution is ``(rho, 1, 1)`` up to scale.
    Written without the subtractive cancellation of the textbook expressions.
    """
    root = math.sqrt(d * d + 8.0 * d * p)
    rho = 4.0 * d / (d + root)
    c = 16.0 / (d + 4.0 * p + root)
    return rho, c


def _su2_defect(y, t, c):
    r = su2_ricci_array(y)
    return float(np.max(np.abs(r - c * t)) / max(np.max(np.abs(c * t)), 1e-300))


def c_function(T1: float, T2: float, T3: float) -> CFunctionResult:
    """The constant c for which ``Ric g = c T`` has a solution on SU(2).

    Targets with two coinciding entries (to 1e-13 relative) use the closed
    form; all others go through the cubic.
    """
    t = _as_triple((T1, T2, T3))
    tmax = t.max()
    for k in range(3):
        i, j = [m for m in range(3) if m != k]
        if abs(t[i] - t[j]) <= DEGENERATE_RTOL * tmax:
            p = 0.5 * (t[i] + t[j])
            rho, c = berger_closed_form(t[k], p)
            y = np.ones(3)
            y[k] = rho
            y *= SU2_TRACE / y.sum()
            return CFunctionResult(float(c), float(y[2] / y[0]), CBranch.DEGENERATE_CLOSED_FORM, Su2Metric.from_array(y))
    return c_from_cubic(*t)


def c_from_cubic(T1: float, T2: float, T3: float) -> CFunctionResult:
    """c via the root ``Z = x3/x1`` of the cubic, with no degenerate shortcut.

    When two entries coincide the cubic loses its leading term and the
    remaining quadratic is solved instead, so this also serves as an
    independent check of the closed form.
    """
    t = _as_triple((T1, T2, T3))
    # Label the extremes 1 and 3: the formula for c is 0/0 when t1 = t3.
    order = np.argsort(t, kind="stable")
    t1, t2, t3 = t[order]
    if t1 == t3:
        y = np.full(3, 2.0)
        return CFunctionResult(float(2.0 / t1), 1.0, CBranch.GENERIC_CUBIC, Su2Metric.from_array(y))
    coeffs = c_cubic_coefficients(t1, t2, t3)
    dpoly = np.polyder(coeffs)
    candidates = []
    for root in np.roots(coeffs):
        if abs(root.imag) > 1e-8 * max(1.0, abs(root)) or root.real <= 0:
            continue
        Z = root.real
        for _ in range(3):
            d = np.polyval(dpoly, Z)
            if d == 0:
                break
            Z -= np.polyval(coeffs, Z) / d
        c = _c_from_Z(t1, t3, Z)
        denom = 4.0 * Z - 4.0 - c * t1 * Z + c * t3
        if c <= 0 or denom == 0:
            continue
        y2 = 4.0 * (Z * Z - 1.0) / denom
        if y2 <= 0:
            continue
        y = np.array([1.0, y2, Z])
        candidates.append((_su2_defect(y, np.array([t1, t2, t3]), c), c, y))
    candidates = [cand for cand in candidates if cand[0] < 1e-6]
    if not candidates:
        raise RootSelectionAmbiguous(f"no cubic root gives a positive solution for T={t.tolist()}")
    _, c, y_sorted = min(candidates, key=lambda cand: cand[0])
    y = np.empty(3)
    y[order] = y_sorted
    y *= SU2_TRACE / y.sum()
    return CFunctionResult(float(c), float(y[2] / y[0]), CBranch.GENERIC_CUBIC, Su2Metric.from_array(y))


# ---------------------------------------------------------------------------
# Two-summand families
# ---------------------------------------------------------------------------


def two_summand_threshold(family: FibrationFamily) -> float:
    """Infimum of the ratios a/b for which ``Ric g = kappa (a, b)`` is solvable."""
    alpha, _, gamma, _ = family.ricci_coefficients
    return alpha / gamma


def solve_two_summand(family: FibrationFamily, a: float, b: float) -> Optional[SolveResult]:
    """Solve ``A(r) = kappa a, B(r) = kappa b`` for ``r = t/s``; None if unsolvable.

    The returned metric has s = 1.
    """
    if not (a > 0 and b > 0):
        raise ValueError("target coefficients must be positive")
    alpha, beta, gamma, delta = family.ricci_coefficients
    # A(r) b - B(r) a = qa r^2 + qb r + qc
    qa, qb, qc = b * beta, a * delta, b * alpha - a * gamma
    if qc >= 0:
        return None
    r = -2.0 * qc / (qb + math.sqrt(qb * qb - 4.0 * qa * qc))
    A, B = two_summand_coefficients(family, r)
    kappa = B / b
    if not (r > 0 and kappa > 0):
        return None
    residual = max(abs(A - kappa * a), abs(B - kappa * b))
    return SolveResult(TwoSummandMetric(family, r, 1.0), float(kappa), float(residual))


# ---------------------------------------------------------------------------
# Four-parameter family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContinuationConfig:
    initial_step_fraction: float = 1.0 / 64.0  # of the path length 4n
    min_step_fraction: float = 1e-6
    max_step_fraction: float = 1.0 / 8.0
    corrector_tol: float = 1e-12
    corrector_max_iter: int = 12
    easy_iterations: int = 4
    easy_accepts_to_double: int = 3
    box: tuple = (1e-8, 1e8)
    final_tol: float = 1e-10


def _prce_system(n, tau):
    def fun(z, lam):
        x, c = z[:3], z[3]
        out = np.empty(4)
        out[0] = c - (4 * n + 8) + 2.0 * x.sum()
        out[1:] = c * tau - lam * x * x - su2_ricci_array(x)
        return out

    def jac(z, lam):
        x, c = z[:3], z[3]
        J = np.empty((4, 4))
        J[0, :3] = 2.0
        J[0, 3] = 1.0
        J[1:, :3] = -su2_ricci_jacobian(x) - 2.0 * lam * np.diag(x)
        J[1:, 3] = tau
        return J

    def dlam(z):
        out = np.zeros(4)
        out[1:] = -z[:3] ** 2
        return out

    return fun, jac, dlam


def _correct(fun, jac, z, lam, cfg):
    f = fun(z, lam)
    for it in range(cfg.corrector_max_iter + 1):
        norm = np.max(np.abs(f))
        if not np.isfinite(norm):
            return None, it
        if norm <= cfg.corrector_tol:
            return z, it
        if it == cfg.corrector_max_iter:
            return None, it
        try:
            dz = np.linalg.solve(jac(z, lam), -f)
        except np.linalg.LinAlgError:
            return None, it
        z = z + dz
        if np.any(z <= 0):
            return None, it
        f = fun(z, lam)
    return None, cfg.corrector_max_iter


def homotopy_start(n: int, tau) -> np.ndarray:
    """Point ``(x1, x2, x3, c)`` solving the SU(2) system and the trace equation."""
    su2 = solve_su2(tau)
    c0 = su2.kappa
    if c0 >= 4 * n + 8:
        raise ScalingFailure(f"c = {c0:.6g} >= 4n+8 = {4 * n + 8}; no positive scaling exists")
    x_hat = su2.metric.as_array()
    mu = (4 * n + 8 - c0) / (2.0 * x_hat.sum())
    return np.concatenate([mu * x_hat, [c0]])


def solve_four_param_homotopy(T: FourParamForm, config: ContinuationConfig = ContinuationConfig()) -> SolveResult:
    """Solve ``Ric g = kappa T`` on S^(4n+3) by continuation in the
    coefficient ``lam`` of the fibre-horizontal coupling term, from 0 to 4n.
    """
    n = T.n
    if not all(v > 0 for v in T.coefficients()):
        raise ValueError("target must be positive definite")
    tau = T.fiber / T.b
    fun, jac, dlam = _prce_system(n, tau)
    z = homotopy_start(n, tau)
    lo, hi = config.box
    end = 4.0 * n
    h = end * config.initial_step_fraction
    h_min = end * config.min_step_fraction
    h_max = end * config.max_step_fraction
    lam = 0.0
    report = PathReport()
    report.states.append(HomotopyState(lam, z.copy(), h))
    easy = 0
    while lam < end:
        h = min(h, end - lam)
        try:
            tangent = np.linalg.solve(jac(z, lam), -dlam(z))
        except np.linalg.LinAlgError as exc:
            raise PathFailure(f"singular Jacobian at lambda={lam:.6g}", lam) from exc
        trial_lam = lam + h
        z_new, its = _correct(fun, jac, z + h * tangent, trial_lam, config)
        if z_new is None:
            report.rejected += 1
            easy = 0
            h *= 0.5
            if h < h_min:
                raise PathFailure(f"step size underflow at lambda={lam:.6g}", lam)
            continue
        if np.any(z_new < lo) or np.any(z_new > hi):
            raise PathFailure(f"path left the box [{lo:g}, {hi:g}] at lambda={trial_lam:.6g}", lam)
        z, lam = z_new, trial_lam
        report.accepted += 1
        report.min_step = min(report.min_step, h)
        report.last_lambda = lam
        report.states.append(HomotopyState(lam, z.copy(), h))
        easy = easy + 1 if its <= config.easy_iterations else 0
        if easy >= config.easy_accepts_to_double:
            h = min(2.0 * h, h_max)
            easy = 0

    x, c = z[:3], float(z[3])
    g = FourParamMetric(n, float(x[0]), float(x[1]), float(x[2]), 1.0)
    kappa = c / T.b
    ric = ricci_four_param(g)
    defect = np.array(ric.coefficients()) - kappa * np.array(T.coefficients())
    residual = float(np.max(np.abs(defect)))
    if residual > config.final_tol * max(1.0, kappa * max(T.coefficients())):
        raise PathFailure(f"endpoint residual {residual:.3e} exceeds tolerance", lam)
    return SolveResult(g, kappa, residual, report.accepted, report)


@dataclass(frozen=True)
class Spu1ClosedForm:
    fiber_ratio: float  # x1 / x with x2 = x3 = x
    c_value: float
    condition_holds: bool

    def su2_metric(self, x: float = 1.0) -> Su2Metric:
        return Su2Metric(self.fiber_ratio * x, x, x)


def spu1_closed_form(n: int, T1: float, T2: float, b: float) -> Spu1ClosedForm:
    """Closed-form SU(2) solution for targets with T2 = T3 and the sufficient
    condition ``c(T1/b, T2/b, T2/b) < 4n + 8``."""
    if not (T1 > 0 and T2 > 0 and b > 0):
        raise ValueError("T1, T2 and b must be positive")
    rho, c = berger_closed_form(T1 / b, T2 / b)
    return Spu1ClosedForm(rho, c, c < 4 * n + 8)


@dataclass(frozen=True)
class SolvabilityPredicates:
    ratio_bound: bool
    c_condition: bool
    c_value: float


def solvability_predicates(T: FourParamForm) -> SolvabilityPredicates:
    """Evaluate the two sufficient conditions for solvability of ``Ric g = kappa T``."""
    n = T.n
    if not all(v > 0 for v in T.coefficients()):
        raise ValueError("target must be positive definite")
    ratio_bound = all(T.b / ti < 2 * n + 4 for ti in T.fiber)
    c = c_function(*(T.fiber / T.b)).c
    return SolvabilityPredicates(ratio_bound, c < 4 * n + 8, c)


def solve_four_param_symmetric(T: FourParamForm) -> Optional[SolveResult]:
    """Targets with equal fibre entries reduce to the two-summand quadratic."""
    a: Sequence[float] = T.fiber
    if not np.allclose(a, a[0], rtol=1e-14, atol=0):
        raise ValueError("fibre entries must coincide")
    res = solve_two_summand(FibrationFamily("sp1", T.n), float(a[0]), T.b)
    if res is None:
        return None
    r = res.metric.t
    return SolveResult(FourParamMetric(T.n, r, r, r, 1.0), res.kappa, res.residual)
