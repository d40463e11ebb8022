"""Damped Newton iteration with step halving."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NoConvergence


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-12
    max_iter: int = 100
    max_halvings: int = 40


def damped_newton(
    fun: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], np.ndarray],
    z0,
    config: NewtonConfig = NewtonConfig(),
    admissible: Optional[Callable[[np.ndarray], bool]] = None,
):
    """Solve ``fun(z) = 0`` from ``z0``.

    A step is halved until the sup-norm residual decreases and, if given,
    ``admissible`` accepts the trial point. Returns ``(z, iterations)``.
    """
    z = np.array(z0, dtype=float)
    f = fun(z)
    norm = np.max(np.abs(f))
    for it in range(config.max_iter + 1):
        if not np.isfinite(norm):
            break
        if norm <= config.tol:
            return z, it
        if it == config.max_iter:
            break
        try:
            dz = np.linalg.solve(jac(z), -f)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Jacobian at iteration {it}") from exc
        step = 1.0
        for _ in range(config.max_halvings + 1):
            trial = z + step * dz
            if admissible is None or admissible(trial):
                f_trial = fun(trial)
                n_trial = np.max(np.abs(f_trial))
                if np.isfinite(n_trial) and n_trial < norm:
                    break
            step *= 0.5
        else:
            raise NoConvergence(f"line search failed at iteration {it}, residual {norm:.3e}")
        z, f, norm = trial, f_trial, n_trial
    raise NoConvergence(f"no convergence after {config.max_iter} iterations, residual {norm:.3e}")
