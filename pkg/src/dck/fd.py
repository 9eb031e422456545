"""Finite-difference oracle.

Central differences with optional Richardson extrapolation, used throughout
the test suite (and the ``check-derivatives`` command) to validate the
analytic derivative formulas against an independent computation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DckError, EvaluationFailed


@dataclass(frozen=True)
class FDConfig:
    """Central-difference settings.

    ``richardson_levels = 0`` is a plain central difference at ``step``;
    level k eliminates the first k even-order truncation terms using
    evaluations at step/2, step/4, ...
    """

    step: float = 1e-5
    richardson_levels: int = 2

    def __post_init__(self):
        if self.step <= 0.0:
            raise ValueError("step must be positive")
        if self.richardson_levels < 0:
            raise ValueError("richardson_levels must be nonnegative")


def _central(fn, at, index, h):
    x = np.array(at, dtype=float)
    x[index] = at[index] + h
    try:
        hi = fn(x)
        x[index] = at[index] - h
        lo = fn(x)
    except DckError as exc:
        raise EvaluationFailed(
            f"probe at index {index} with step {h!r} failed: {exc}"
        ) from exc
    return (hi - lo) / (2.0 * h)


def fd_derivative(fn, at, index: int, cfg: FDConfig = FDConfig()) -> float:
    """Derivative of scalar ``fn`` with respect to component ``index`` of ``at``."""
    at = np.asarray(at, dtype=float)
    levels = cfg.richardson_levels
    table = [
        _central(fn, at, index, cfg.step / (2.0**k)) for k in range(levels + 1)
    ]
    # Romberg-style elimination of h^2, h^4, ... terms.
    for m in range(1, levels + 1):
        factor = 4.0**m
        table = [
            (factor * table[k + 1] - table[k]) / (factor - 1.0)
            for k in range(len(table) - 1)
        ]
    return float(table[0])


def fd_gradient(fn, at, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Convenience: all partials of scalar ``fn`` at ``at``."""
    at = np.asarray(at, dtype=float)
    return np.array([fd_derivative(fn, at, i, cfg) for i in range(at.size)])
