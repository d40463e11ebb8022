"""Ricci curvature of homogeneous metrics on spheres and projective spaces.

Three coordinate families are covered:

* left-invariant metrics on SU(2), diagonal ``(x1, x2, x3)`` in a Milnor basis
  ``[e_i, e_{i+1}] = 2 e_{i+2}``;
* the two-summand metrics ``g_{t,s} = t*ghat|V + s*ghat|H`` of a Hopf fibration;
* the four-parameter metrics ``g_(x1,x2,x3,s)`` on S^(4n+3), an arbitrary
  diagonal left-invariant metric on the S^3 fibres and ``s*ghat`` horizontally.

Conventions
-----------
Every Ricci coefficient is the value of ``Ric`` on a unit vector of the
reference metric ``ghat`` (the round metric of curvature 1 for spheres, the
Fubini-Study metric of holomorphic curvature 4 for CP^(2n+1)). Because ``Ric``
is invariant under constant rescaling, these coefficients depend only on
ratios of the metric parameters. A metric is Einstein with constant ``lam``
exactly when every coefficient equals ``lam`` times the matching metric entry.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np


def _check_positive(**values):
    for name, v in values.items():
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be a positive finite number, got {v!r}")


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Su2Metric:
    """Diagonal left-invariant metric on SU(2); entries are squared lengths."""

    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        _check_positive(x1=self.x1, x2=self.x2, x3=self.x3)

    @classmethod
    def from_array(cls, x) -> "Su2Metric":
        x1, x2, x3 = (float(v) for v in x)
        return cls(x1, x2, x3)

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    def scaled(self, c: float) -> "Su2Metric":
        return Su2Metric(c * self.x1, c * self.x2, c * self.x3)


@dataclass(frozen=True)
class DiagonalForm3:
    """Diagonal symmetric bilinear form in the Milnor basis (any signs)."""

    r1: float
    r2: float
    r3: float

    def __post_init__(self):
        _check_finite(r1=self.r1, r2=self.r2, r3=self.r3)

    @classmethod
    def from_array(cls, r) -> "DiagonalForm3":
        r1, r2, r3 = (float(v) for v in r)
        return cls(r1, r2, r3)

    def as_array(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3])

    def coefficients(self) -> tuple[float, ...]:
        return (self.r1, self.r2, self.r3)


class FamilyKind(enum.Enum):
    CIRCLE_FIBER_SPHERE = "circle"  # S^1 -> S^(2n+1) -> CP^n
    SP1_FIBER_SPHERE = "sp1"  # S^3 -> S^(4n+3) -> HP^n
    SPIN7_FIBER_SPHERE = "spin7"  # S^7 -> S^15 -> S^8
    CP1_FIBER_PROJECTIVE = "cp1"  # CP^1 -> CP^(2n+1) -> HP^n


@dataclass(frozen=True)
class FibrationFamily:
    kind: FamilyKind
    n: int = 1

    def __post_init__(self):
        if not isinstance(self.kind, FamilyKind):
            object.__setattr__(self, "kind", FamilyKind(self.kind))
        _check_n(self.n)
        if self.kind is FamilyKind.SPIN7_FIBER_SPHERE and self.n != 1:
            raise ValueError("the S^7 fibration only exists for n = 1 (S^15)")

    @property
    def dims(self) -> tuple[int, int]:
        """(vertical dimension, horizontal dimension)."""
        n = self.n
        return {
            FamilyKind.CIRCLE_FIBER_SPHERE: (1, 2 * n),
            FamilyKind.SP1_FIBER_SPHERE: (3, 4 * n),
            FamilyKind.SPIN7_FIBER_SPHERE: (7, 8),
            FamilyKind.CP1_FIBER_PROJECTIVE: (2, 4 * n),
        }[self.kind]

    @property
    def dimension(self) -> int:
        return sum(self.dims)

    @property
    def ricci_coefficients(self) -> tuple[float, float, float, float]:
        """``(alpha, beta, gamma, delta)`` with ``A = alpha + beta r^2`` and
        ``B = gamma - delta r`` for ``r = t/s``.

        For the projective family the fibres are totally geodesic round
        2-spheres of curvature 4 and the base HP^n has Ricci constant 4n+8;
        the O'Neill tensors are fixed by the Fubini-Study constant 4n+4.
        """
        d_v, d_h = self.dims
        if self.kind is FamilyKind.CP1_FIBER_PROJECTIVE:
            return (4.0, float(d_h), float(d_h + 8), 4.0)
        return (float(d_v - 1), float(d_h), float(d_h + 3 * d_v - 1), float(2 * d_v))

    @property
    def round_einstein_constant(self) -> float:
        if self.kind is FamilyKind.CP1_FIBER_PROJECTIVE:
            return 4.0 * self.n + 4.0
        return float(self.dimension - 1)


@dataclass(frozen=True)
class TwoSummandMetric:
    family: FibrationFamily
    t: float
    s: float

    def __post_init__(self):
        _check_positive(t=self.t, s=self.s)

    @property
    def ratio(self) -> float:
        return self.t / self.s

    def scaled(self, c: float) -> "TwoSummandMetric":
        return replace(self, t=c * self.t, s=c * self.s)


@dataclass(frozen=True)
class TwoSummandForm:
    """``A*ghat|V + B*ghat|H``."""

    family: FibrationFamily
    A: float
    B: float

    def __post_init__(self):
        _check_finite(A=self.A, B=self.B)

    def coefficients(self) -> tuple[float, ...]:
        return (self.A, self.B)

    def per_g_unit(self, g: TwoSummandMetric) -> tuple[float, float]:
        """Ricci values on g-unit vectors, i.e. ``(A/t, B/s)``."""
        return (self.A / g.t, self.B / g.s)


@dataclass(frozen=True)
class FourParamMetric:
    n: int
    x1: float
    x2: float
    x3: float
    s: float

    def __post_init__(self):
        _check_n(self.n)
        _check_positive(x1=self.x1, x2=self.x2, x3=self.x3, s=self.s)

    @property
    def fiber(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    def normalized(self) -> "FourParamMetric":
        """Representative with s = 1."""
        return FourParamMetric(self.n, self.x1 / self.s, self.x2 / self.s, self.x3 / self.s, 1.0)

    def scaled(self, c: float) -> "FourParamMetric":
        return FourParamMetric(self.n, c * self.x1, c * self.x2, c * self.x3, c * self.s)


@dataclass(frozen=True)
class FourParamForm:
    """Fibre diagonal ``(a1, a2, a3)`` and horizontal coefficient ``b``, all against ghat.

    A four-parameter metric ``g_(x1,x2,x3,s)`` is itself such a form with
    ``a = x`` and ``b = s``.
    """

    n: int
    a1: float
    a2: float
    a3: float
    b: float

    def __post_init__(self):
        _check_n(self.n)
        _check_finite(a1=self.a1, a2=self.a2, a3=self.a3, b=self.b)

    @classmethod
    def of_metric(cls, g: FourParamMetric) -> "FourParamForm":
        return cls(g.n, g.x1, g.x2, g.x3, g.s)

    @property
    def fiber(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])

    def coefficients(self) -> tuple[float, ...]:
        return (self.a1, self.a2, self.a3, self.b)

    def horizontal_per_g_unit(self, s: float) -> float:
        return self.b / s


Form = Union[DiagonalForm3, TwoSummandForm, FourParamForm]


# ---------------------------------------------------------------------------
# Ricci curvature
# ---------------------------------------------------------------------------


def _excess(a, b, c):
    """``a + b - c``, subtracting the closer pair first so that a tiny third
    term survives (the subtraction of nearly equal floats is exact)."""
    ac, bc = a - c, b - c
    if isinstance(ac, np.ndarray):
        return np.where(np.abs(ac) <= np.abs(bc), ac + b, bc + a)
    return ac + b if abs(ac) <= abs(bc) else bc + a


def su2_ricci_array(x):
    """Vectorised SU(2) Ricci; ``x`` has shape (..., 3)."""
    x = np.asarray(x, dtype=float)
    if x.shape == (3,):
        x1, x2, x3 = x.tolist()
    else:
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    # x_i^2 - (x_j - x_k)^2 in factored form, stable near collapse
    e1, e2, e3 = _excess(x2, x3, x1), _excess(x1, x3, x2), _excess(x1, x2, x3)
    r1 = 2.0 * e2 * e3 / (x2 * x3)
    r2 = 2.0 * e1 * e3 / (x1 * x3)
    r3 = 2.0 * e1 * e2 / (x1 * x2)
    if x.shape == (3,):
        return np.array([r1, r2, r3])
    return np.stack([r1, r2, r3], axis=-1)


def su2_ricci_jacobian(x) -> np.ndarray:
    """d r_i / d x_j at a single point."""
    x = np.asarray(x, dtype=float).tolist()
    r = su2_ricci_array(x).tolist()
    jac = np.empty((3, 3))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        xi, xj, xk = x[i], x[j], x[k]
        jac[i, i] = 4.0 * xi / (xj * xk)
        jac[i, j] = -4.0 * (xj - xk) / (xj * xk) - r[i] / xj
        jac[i, k] = 4.0 * (xj - xk) / (xj * xk) - r[i] / xk
    return jac


def ricci_su2(g: Su2Metric) -> DiagonalForm3:
    return DiagonalForm3(*su2_ricci_array((g.x1, g.x2, g.x3)).tolist())


def two_summand_coefficients(family: FibrationFamily, r):
    """(A, B) as functions of ``r = t/s``; accepts arrays."""
    alpha, beta, gamma, delta = family.ricci_coefficients
    return alpha + beta * r * r, gamma - delta * r


def ricci_two_summand(g: TwoSummandMetric) -> TwoSummandForm:
    A, B = two_summand_coefficients(g.family, g.t / g.s)
    return TwoSummandForm(g.family, float(A), float(B))


def four_param_ricci_array(n: int, x, s=1.0):
    """Vectorised four-parameter Ricci.

    ``x`` has shape (..., 3); returns ``(a, b)`` with ``a`` of shape (..., 3).
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    y = x / s[..., None] if s.ndim else x / s
    a = 4.0 * n * y * y + su2_ricci_array(x)
    b = 4.0 * n + 8.0 - 2.0 * y.sum(axis=-1)
    return a, b


def ricci_four_param(g: FourParamMetric) -> FourParamForm:
    a, b = four_param_ricci_array(g.n, (g.x1, g.x2, g.x3), g.s)
    a1, a2, a3 = a.tolist()
    return FourParamForm(g.n, a1, a2, a3, float(b))


# ---------------------------------------------------------------------------
# Gauge and positivity
# ---------------------------------------------------------------------------


def canonicalize_gauge(g):
    """Sort the fibre entries ascending.

    The gauge group acts transitively on oriented Milnor bases, and the Ricci
    formulas are equivariant under every relabelling, so sorting loses nothing.
    """
    if isinstance(g, Su2Metric):
        return Su2Metric(*sorted((g.x1, g.x2, g.x3)))
    if isinstance(g, FourParamMetric):
        x1, x2, x3 = sorted((g.x1, g.x2, g.x3))
        return FourParamMetric(g.n, x1, x2, x3, g.s)
    raise TypeError(f"cannot canonicalize {type(g).__name__}")


def positivity_check(f: Form, margin: float = 0.0) -> bool:
    """True iff every coefficient of ``f`` exceeds ``margin``."""
    if margin < 0:
        raise ValueError("margin must be non-negative")
    return all(c > margin for c in f.coefficients())
