"""Monotone stationary fronts of the reduced equation, pinned at the
habitat interface x = 0.

On each half-line the stationary profile conserves the energy
D/2 (w')^2 + G(w), which turns the second-order problem into a first-order
one anchored at the half-line's limit value.  The two halves match in C^1
at a unique interface value found as the root of the difference of the two
energy constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    ModelParams,
    PiecewiseCapacity,
    Side,
    ValidationError,
    alpha,
    antiderivative_F,
    carrying_equilibrium,
)
from .numerics import bisect

__all__ = ["StationaryFront", "matching_value_solve", "front_construct"]

CONVERGED_TOL = 1e-10


@dataclass(frozen=True)
class StationaryFront:
    """Sampled monotone steady profile with its interface data.

    Regimes: "BB" connects the species-1 plateau on the left to the
    species-2 plateau on the right (two-front segregation); "TH2" connects
    the two species-1 plateaus (species 1 holds both regions).
    """

    regime: str
    matching_value: float
    x: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    left_limit: float
    right_limit: float
    derivative_at_zero: float
    diffusion: float

    def evaluate(self, xq) -> np.ndarray:
        xq = np.asarray(xq, dtype=float)
        out = np.interp(xq, self.x, self.values)
        out = np.where(xq < self.x[0], self.left_limit, out)
        out = np.where(xq > self.x[-1], self.right_limit, out)
        return out


def _limits(params: ModelParams, caps: PiecewiseCapacity, regime: str) -> tuple[float, float]:
    left = carrying_equilibrium(params, caps.k1_f, 1)
    if regime == "BB":
        return left, -carrying_equilibrium(params, caps.k2_u, 2)
    if regime == "TH2":
        return left, carrying_equilibrium(params, caps.k1_u, 1)
    raise ValidationError("regime must be 'BB' or 'TH2'")


def matching_value_solve(
    params: ModelParams, caps: PiecewiseCapacity, regime: str
) -> float:
    """Interface value making the two half-line energy levels equal.

    The mismatch function H(w) = [F_F(w) - F_U(w)] - [F_F(left limit) -
    F_U(right limit)] is a cubic whose derivative changes sign at most once,
    so the bracketed root is unique; it is located by bisection to 1e-12.
    """
    from .invasion import gamma_coefficients

    if caps.is_homogeneous():
        raise ValidationError(
            "homogeneous environment: front position undetermined"
        )
    gamma_f, gamma_u = gamma_coefficients(params, caps, 12)
    if regime == "BB":
        if not (gamma_f > 0.0 and gamma_u < 0.0):
            raise ValidationError(
                f"two-front regime needs gamma_F > 0 > gamma_U, got "
                f"({gamma_f:.6g}, {gamma_u:.6g})"
            )
    elif regime == "TH2":
        if not (gamma_f > 0.0 and gamma_u > 0.0):
            raise ValidationError(
                f"one-invader regime needs gamma_F > 0 and gamma_U > 0, got "
                f"({gamma_f:.6g}, {gamma_u:.6g})"
            )
    else:
        raise ValidationError("regime must be 'BB' or 'TH2'")

    left, right = _limits(params, caps, regime)
    if math.isclose(left, right, rel_tol=0.0, abs_tol=1e-14):
        return left  # constant profile; forced by uniqueness

    def H(w: float) -> float:
        return (
            antiderivative_F(Side.F, w, params, caps)
            - antiderivative_F(Side.U, w, params, caps)
            - antiderivative_F(Side.F, left, params, caps)
            + antiderivative_F(Side.U, right, params, caps)
        )

    lo, hi = min(left, right), max(left, right)
    if H(lo) * H(hi) > 0.0:
        raise RuntimeError(
            f"energy mismatch has no sign change on ({lo:.6g}, {hi:.6g})"
        )
    return bisect(H, lo, hi, tol=1e-12)


def _march_half(
    F, limit: float, start: float, D: float, mesh_step: float, n_nodes: int
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 march of the energy-form profile equation away from
    the interface; pads with the limit once converged."""
    F_limit = F(limit)
    direction = 1.0 if limit > start else -1.0

    def slope(w: float) -> float:
        return direction * math.sqrt(2.0 * max(F_limit - F(w), 0.0) / D)

    values = np.empty(n_nodes + 1)
    slopes = np.empty(n_nodes + 1)
    values[0], slopes[0] = start, slope(start)
    w = start
    h = mesh_step
    for j in range(1, n_nodes + 1):
        if abs(w - limit) < CONVERGED_TOL:
            values[j:] = limit
            slopes[j:] = 0.0
            break
        k1 = slope(w)
        k2 = slope(w + 0.5 * h * k1)
        k3 = slope(w + 0.5 * h * k2)
        k4 = slope(w + h * k3)
        w = w + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (limit - w) * direction < 0.0:
            w = limit
        values[j], slopes[j] = w, slope(w)
    return values, slopes


def front_construct(
    params: ModelParams,
    caps: PiecewiseCapacity,
    regime: str,
    truncation_half_length: float = 40.0,
    mesh_step: float = 0.005,
) -> StationaryFront:
    """Build the stationary front on [-X, X] by marching both half-lines
    away from the matching value at x = 0."""
    w0 = matching_value_solve(params, caps, regime)
    left, right = _limits(params, caps, regime)
    D = params.D
    n_half = int(round(truncation_half_length / mesh_step))

    def F_side(side: Side):
        return lambda w: antiderivative_F(side, w, params, caps)

    vals_r, slopes_r = _march_half(F_side(Side.U), right, w0, D, mesh_step, n_half)
    vals_l, slopes_l = _march_half(F_side(Side.F), left, w0, D, mesh_step, n_half)
    # The left march walks toward -infinity, so w' in x is minus the march
    # slope there; flipping the array restores x-ordering.
    x = np.linspace(-n_half * mesh_step, n_half * mesh_step, 2 * n_half + 1)
    values = np.concatenate([vals_l[:0:-1], vals_r])
    slopes = np.concatenate([-slopes_l[:0:-1], slopes_r])

    d0_right = slopes_r[0]
    d0_left = -slopes_l[0]
    if abs(d0_left - d0_right) > 1e-8 * max(1.0, abs(d0_right)):
        raise RuntimeError(
            f"one-sided derivatives at 0 disagree: {d0_left!r} vs {d0_right!r}"
        )
    return StationaryFront(
        regime=regime,
        matching_value=w0,
        x=x,
        values=values,
        slopes=slopes,
        left_limit=left,
        right_limit=right,
        derivative_at_zero=d0_right,
        diffusion=D,
    )
