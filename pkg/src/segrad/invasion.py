"""Invasion criteria, threshold levels and compactly supported subsolutions
("bubbles") of the reduced bistable equation.

The sign of the invasion coefficient gamma (the integral of the reaction
term between its two stable zeros) decides which species wins on a
homogeneous side.  Bubbles are even stationary subsolutions used to decide
whether initial data are large enough to trigger an invasion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import (
    ModelParams,
    PiecewiseCapacity,
    Side,
    ValidationError,
    alpha,
    antiderivative_G,
    reaction_g,
)
from .numerics import adaptive_simpson, bisect

__all__ = [
    "InvasionReport",
    "Bubble",
    "AdmissibilityResult",
    "gamma_coefficients",
    "theta_threshold",
    "bubble_half_width",
    "bubble_construct",
    "admissible_initial_data",
    "wolbachia_classify",
    "invasion_report",
]


def _pair_rates(params: ModelParams, pair: int) -> tuple[float, float]:
    if pair == 12:
        return params.b2, params.d2
    if pair == 13:
        return params.b3, params.d3
    raise ValidationError("species pair must be 12 or 13")


def _pair_alpha(params: ModelParams, pair: int) -> float:
    bi, di = _pair_rates(params, pair)
    return 1.0 - di / bi


def gamma_coefficients(
    params: ModelParams, caps: PiecewiseCapacity, pair: int = 12
) -> tuple[float, float]:
    """Invasion coefficients (gamma_F, gamma_U) for one competing pair.

    gamma on a side is the antiderivative gap between the two stable states,
    G(K1 a1) - G(-K2 a_i); in closed form (b1 K1^2 a1^3 - b_i K2^2 a_i^3)/6.
    Positive gamma means species 1 invades on that side.
    """
    a1 = alpha(params, 1)
    ai = _pair_alpha(params, pair)
    out = []
    for side in (Side.F, Side.U):
        hi = caps.k1(side) * a1
        lo = -caps.k2(side) * ai
        out.append(
            antiderivative_G(side, pair, hi, params, caps)
            - antiderivative_G(side, pair, lo, params, caps)
        )
    return out[0], out[1]


def theta_threshold(
    side: Side, params: ModelParams, caps: PiecewiseCapacity, pair: int = 12
) -> float:
    """Threshold level where the antiderivative matches its value at the
    opposite stable state.

    On side F (gamma_F >= 0 required) the threshold lies in (0, K1 a1) and
    solves G(theta) = G(-K2 a_i).  On side U the branch depends on the sign
    of gamma_U: negative gamma gives a threshold in (-K2 a_i, 0) solving
    G(theta) = G(K1 a1); positive gamma gives one in (0, K1 a1) as on F.
    Located by bisection to 1e-12.
    """
    a1 = alpha(params, 1)
    ai = _pair_alpha(params, pair)
    gamma_f, gamma_u = gamma_coefficients(params, caps, pair)
    k1, k2 = caps.k1(side), caps.k2(side)

    def G(w: float) -> float:
        return antiderivative_G(side, pair, w, params, caps)

    if side is Side.F:
        if gamma_f < 0.0:
            raise ValidationError(
                f"threshold on side F needs gamma_F >= 0, got {gamma_f:.6g}"
            )
        target = G(-k2 * ai)
        return bisect(lambda w: G(w) - target, 0.0, k1 * a1, tol=1e-12)
    if gamma_u < 0.0:
        target = G(k1 * a1)
        return bisect(lambda w: G(w) - target, -k2 * ai, 0.0, tol=1e-12)
    if gamma_u > 0.0:
        target = G(-k2 * ai)
        return bisect(lambda w: G(w) - target, 0.0, k1 * a1, tol=1e-12)
    raise ValidationError("threshold on side U undefined at gamma_U = 0")


# ---------------------------------------------------------------------------
# bubbles


@dataclass(frozen=True)
class Bubble:
    """Even compactly supported stationary subsolution.

    Kinds: "F" peaks at a positive level on side F; "U" dips to a negative
    level on side U; "U1" peaks at a positive level on side U.  The profile
    equals ``plateau`` outside [-half_width, half_width].  ``x``/``values``
    sample the full symmetric profile; ``slopes`` carry the exact energy-form
    derivative at each node for interpolation.
    """

    kind: str
    level: float
    half_width: float
    x: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    plateau: float
    side: Side
    pair: int
    diffusion: float

    def evaluate(self, xq, center: float = 0.0) -> np.ndarray:
        """Profile values at arbitrary positions for the bubble centered at
        ``center`` (cubic Hermite between samples, plateau outside)."""
        xq = np.asarray(xq, dtype=float)
        s = np.abs(xq - center)
        n = (len(self.x) + 1) // 2
        xs = self.x[n - 1 :]
        ys = self.values[n - 1 :]
        ds = self.slopes[n - 1 :]
        inside = s < self.half_width
        out = np.full(xq.shape, self.plateau)
        if np.any(inside):
            out[inside] = _hermite_eval(s[inside], xs, ys, ds)
        return out


def _hermite_eval(xq: np.ndarray, xs: np.ndarray, ys: np.ndarray, ds: np.ndarray):
    idx = np.clip(np.searchsorted(xs, xq, side="right") - 1, 0, len(xs) - 2)
    h = xs[idx + 1] - xs[idx]
    t = (xq - xs[idx]) / h
    t2, t3 = t * t, t * t * t
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + t
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    return h00 * ys[idx] + h10 * h * ds[idx] + h01 * ys[idx + 1] + h11 * h * ds[idx + 1]


def _bubble_setup(
    kind: str, params: ModelParams, caps: PiecewiseCapacity
) -> tuple[Side, int, float, float, float]:
    """Side, pair, level interval (lo, hi) and plateau for a bubble kind."""
    a1 = alpha(params, 1)
    a2 = alpha(params, 2)
    low_plateau = -max(caps.k2_f, caps.k2_u) * a2
    high_plateau = max(caps.k1_f, caps.k1_u) * a1
    gamma_f, gamma_u = gamma_coefficients(params, caps, 12)
    if kind == "F":
        if gamma_f <= 0.0:
            raise ValidationError(f"kind-F bubble needs gamma_F > 0, got {gamma_f:.6g}")
        theta = theta_threshold(Side.F, params, caps, 12)
        return Side.F, 12, theta, caps.k1_f * a1, low_plateau
    if kind == "U":
        if gamma_u >= 0.0:
            raise ValidationError(f"kind-U bubble needs gamma_U < 0, got {gamma_u:.6g}")
        theta = theta_threshold(Side.U, params, caps, 12)
        return Side.U, 12, -caps.k2_u * a2, theta, high_plateau
    if kind == "U1":
        if gamma_u <= 0.0:
            raise ValidationError(f"kind-U1 bubble needs gamma_U > 0, got {gamma_u:.6g}")
        theta = theta_threshold(Side.U, params, caps, 12)
        return Side.U, 12, theta, caps.k1_u * a1, low_plateau
    raise ValidationError("bubble kind must be 'F', 'U' or 'U1'")


def bubble_half_width(
    kind: str, level: float, params: ModelParams, caps: PiecewiseCapacity
) -> float:
    """Half width of a bubble by direct quadrature of the arrival time
    integral dz / sqrt(2 (G(level) - G(z)) / D).

    The inverse-square-root singularity at z = level is removed by the
    substitution z = level -/+ s^2, after which the integrand is smooth and
    adaptive Simpson integration applies.
    """
    side, pair, lo, hi, plateau = _bubble_setup(kind, params, caps)
    if not lo < level < hi:
        raise ValidationError(f"bubble level must lie in ({lo:.6g}, {hi:.6g})")
    D = params.D

    def G(w: float) -> float:
        return antiderivative_G(side, pair, w, params, caps)

    def g(w: float) -> float:
        return reaction_g(side, 0.0 if pair == 12 else 1.0, w, params, caps)

    G_level = G(level)
    sgn = 1.0 if kind in ("F", "U1") else -1.0  # profile falls (F/U1) or rises (U)
    s_max = math.sqrt(abs(level - plateau))
    f_level = g(level)
    fp = _g_prime(side, pair, level, params, caps)

    def integrand(s: float) -> float:
        h = s * s
        if h < 1e-9 * max(1.0, abs(level)):
            # Taylor form of (G(level) - G(z))/h avoids the 0/0 cancellation;
            # the reaction term is piecewise quadratic, so two terms suffice
            # at this scale.
            val = sgn * f_level - 0.5 * fp * h
            return 2.0 / math.sqrt(2.0 * max(val, 1e-300) / D)
        z = level - sgn * h
        gap = G_level - G(z)
        return 2.0 * s / math.sqrt(2.0 * max(gap, 1e-300) / D)

    tol = 1e-9 * max(1.0, s_max)
    return adaptive_simpson(integrand, 0.0, s_max, tol=tol)


def _g_prime(side, pair, w, params, caps) -> float:
    bi, di = _pair_rates(params, pair)
    if w >= 0.0:
        return params.b1 * (1.0 - 2.0 * w / caps.k1(side)) - params.d1
    return (bi - di) + 2.0 * bi * w / caps.k2(side)


def bubble_construct(
    kind: str,
    level: float,
    params: ModelParams,
    caps: PiecewiseCapacity,
    mesh_step: float = 1e-3,
) -> Bubble:
    """Integrate the degenerate first-order profile equation from the center
    outwards and assemble the even profile.

    The march solves dchi/dx = -sgn * sqrt(2 (G(level) - G(chi)) / D) with a
    quartic Taylor seed where the slope vanishes at the center, and locates
    the plateau crossing by step bisection.  The resulting arc length is
    cross-checked against :func:`bubble_half_width`; disagreement beyond
    1e-6 relative aborts.
    """
    side, pair, lo, hi, plateau = _bubble_setup(kind, params, caps)
    if not lo < level < hi:
        raise ValidationError(f"bubble level must lie in ({lo:.6g}, {hi:.6g})")
    D = params.D
    p = 0.0 if pair == 12 else 1.0

    def G(w: float) -> float:
        return antiderivative_G(side, pair, w, params, caps)

    def g(w: float) -> float:
        return reaction_g(side, p, w, params, caps)

    G_level = G(level)
    falling = kind in ("F", "U1")
    sgn = -1.0 if falling else 1.0  # slope sign of the outward march

    def slope(chi: float) -> float:
        return sgn * math.sqrt(2.0 * max(G_level - G(chi), 0.0) / D)

    rng = abs(level - plateau)
    f_level = g(level)
    fp_level = _g_prime(side, pair, level, params, caps)

    def taylor(x: float) -> float:
        # chi'' = -g/D at the center; exact to O(x^6).
        return (
            level
            - f_level / D * x * x / 2.0
            + f_level * fp_level / (D * D) * x**4 / 24.0
        )

    x_seed = math.sqrt(2.0 * D * (1e-7 * rng) / abs(f_level))
    dchi = rng / 20000.0

    def crossed(chi: float) -> bool:
        return chi <= plateau if falling else chi >= plateau

    def rk4(x: float, chi: float, h: float) -> float:
        k1 = slope(chi)
        k2 = slope(chi + 0.5 * h * k1)
        k3 = slope(chi + 0.5 * h * k2)
        k4 = slope(chi + h * k3)
        return chi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def advance(x: float, chi: float, x_stop: float) -> tuple[float, float]:
        """March to x_stop; the energy trajectory is smooth through the
        plateau crossing, so no event handling is needed here."""
        while x < x_stop - 1e-15:
            sl = abs(slope(chi))
            h = min(x_stop - x, dchi / max(sl, 1e-9), max(x / 8.0, x_seed / 8.0))
            x, chi = x + h, rk4(x, chi, h)
        return x, chi

    # Pass 1: arc length to the plateau crossing, bisecting the final step.
    x, chi = x_seed, taylor(x_seed)
    L = None
    while L is None:
        sl = abs(slope(chi))
        h = min(dchi / max(sl, 1e-9), max(x / 8.0, x_seed / 8.0))
        nxt = rk4(x, chi, h)
        if crossed(nxt):
            lo_h, hi_h = 0.0, h
            for _ in range(80):
                mid = 0.5 * (lo_h + hi_h)
                if crossed(rk4(x, chi, mid)):
                    hi_h = mid
                else:
                    lo_h = mid
            L = x + 0.5 * (lo_h + hi_h)
        else:
            x, chi = x + h, nxt

    L_quad = bubble_half_width(kind, level, params, caps)
    if abs(L - L_quad) > 1e-6 * max(1.0, L_quad):
        raise RuntimeError(
            f"bubble arc length {L!r} disagrees with quadrature {L_quad!r}"
        )

    # Pass 2: sample on a uniform mesh [0, L].  The march runs straight
    # through the crossing; forcing the endpoint onto the plateau would put
    # a spurious kink into the samples that centered differencing amplifies
    # by 1/h^2.
    m = max(4, math.ceil(L / mesh_step))
    h_out = L / m
    values = np.empty(m + 1)
    values[0] = level
    x, chi = x_seed, taylor(x_seed)
    for j in range(1, m + 1):
        target = j * h_out
        if target <= x_seed:
            values[j] = taylor(target)
            continue
        x, chi = advance(x, chi, target)
        values[j] = chi
    xs = np.linspace(0.0, L, m + 1)
    slopes = np.array([slope(v) for v in values])

    x_full = np.concatenate([-xs[:0:-1], xs])
    v_full = np.concatenate([values[:0:-1], values])
    s_full = np.concatenate([-slopes[:0:-1], slopes])
    return Bubble(
        kind=kind,
        level=level,
        half_width=L,
        x=x_full,
        values=v_full,
        slopes=s_full,
        plateau=plateau,
        side=side,
        pair=pair,
        diffusion=D,
    )


# ---------------------------------------------------------------------------
# admissibility of initial data


@dataclass(frozen=True)
class AdmissibilityResult:
    classification: str  # "admissible_BB" | "admissible_TH2" | "inadmissible"
    x_alpha: float | None = None
    y_beta: float | None = None


def admissible_initial_data(
    omega0, report: "InvasionReport", bubble_low: Bubble, bubble_high: Bubble | None
) -> AdmissibilityResult:
    """Search grid translations placing the bubbles around the initial data.

    In the two-front regime the data must be sandwiched: a kind-F bubble
    centered at -x_alpha below, a kind-U bubble centered at +y_beta above,
    with each shift exceeding the bubble's half width.  In the one-invader
    regime the data must dominate both a kind-F and a kind-U1 bubble (the
    pointwise maximum of two subsolutions is again a subsolution).  Returns
    the first witnesses found, scanning grid nodes only.
    """
    grid = omega0.grid
    x = grid.nodes()
    w0 = np.asarray(omega0.values, dtype=float)
    tol = 1e-12

    def first_shift(bubble: Bubble, sign: int, dominates: bool) -> float | None:
        # sign -1: centered at -shift (region x < 0); +1: centered at +shift.
        shifts = x[x > bubble.half_width]
        for shift in shifts:
            prof = bubble.evaluate(x, center=sign * shift)
            ok = np.all(prof <= w0 + tol) if dominates else np.all(w0 <= prof + tol)
            if ok:
                return float(shift)
        return None

    if report.scenario == "two_fronts":
        if bubble_high is None or bubble_high.kind != "U" or bubble_low.kind != "F":
            raise ValidationError("two-front check needs a kind-F and a kind-U bubble")
        xa = first_shift(bubble_low, -1, dominates=True)
        yb = first_shift(bubble_high, +1, dominates=False)
        if xa is not None and yb is not None:
            return AdmissibilityResult("admissible_BB", xa, yb)
        return AdmissibilityResult("inadmissible", xa, yb)
    if report.scenario == "species1_invades":
        if bubble_high is None or bubble_high.kind != "U1" or bubble_low.kind != "F":
            raise ValidationError("one-invader check needs kind-F and kind-U1 bubbles")
        xa = first_shift(bubble_low, -1, dominates=True)
        ya = first_shift(bubble_high, +1, dominates=True)
        if xa is not None and ya is not None:
            return AdmissibilityResult("admissible_TH2", xa, ya)
        return AdmissibilityResult("inadmissible", xa, ya)
    raise ValidationError(
        f"admissibility undefined for scenario {report.scenario!r}"
    )


# ---------------------------------------------------------------------------
# classification report


@dataclass(frozen=True)
class InvasionReport:
    """Invasion coefficients, thresholds and the qualitative outcome map."""

    gamma_f: float
    gamma_u: float
    theta_f: float | None
    theta_u: float | None
    theta1_u: float | None
    scenario: str
    gamma13_f: float | None = None
    gamma13_u: float | None = None
    wolbachia_case: str | None = None


def _scenario_from_signs(gamma_f: float, gamma_u: float) -> str:
    if gamma_f > 0.0 and gamma_u < 0.0:
        return "two_fronts"
    if gamma_f > 0.0 and gamma_u > 0.0:
        return "species1_invades"
    if gamma_f < 0.0 and gamma_u < 0.0:
        return "species2_invades"
    if gamma_f < 0.0 and gamma_u > 0.0:
        return "species2_front"
    return "degenerate"


def wolbachia_classify(params: ModelParams, caps: PiecewiseCapacity) -> str:
    """Map the urban-side invasion signs of both competing pairs to the
    qualitative replacement outcome.

    Requires species 1 invasive on side F against both strains.  The pair
    coefficients are ordered (wild below infected) because the infected
    strain is the weaker competitor; a violation indicates an internal
    inconsistency.
    """
    params.require_wolbachia_hypothesis()
    g12_f, g12_u = gamma_coefficients(params, caps, 12)
    g13_f, g13_u = gamma_coefficients(params, caps, 13)
    if g12_f <= 0.0:
        raise ValidationError(f"species 1 must invade side F: gamma12_F = {g12_f:.6g}")
    if g13_f <= 0.0:
        raise ValidationError(f"species 1 must invade side F: gamma13_F = {g13_f:.6g}")
    if not (g12_f < g13_f and g12_u < g13_u):
        raise RuntimeError("pair ordering gamma12 < gamma13 violated")
    if g12_u > 0.0 and g13_u > 0.0:
        return "n1_everywhere"
    if g12_u < 0.0 and g13_u < 0.0:
        return "replacement_then_coexist_regions"
    if g12_u < 0.0 < g13_u:
        return "replacement_enables_n1"
    return "none"


def invasion_report(
    params: ModelParams, caps: PiecewiseCapacity, include_pair13: bool = False
) -> InvasionReport:
    """Assemble coefficients, thresholds and scenario for a configuration."""
    gamma_f, gamma_u = gamma_coefficients(params, caps, 12)
    theta_f = theta_threshold(Side.F, params, caps, 12) if gamma_f >= 0.0 else None
    theta_u = theta_threshold(Side.U, params, caps, 12) if gamma_u < 0.0 else None
    theta1_u = theta_threshold(Side.U, params, caps, 12) if gamma_u > 0.0 else None
    g13_f = g13_u = None
    case = None
    if include_pair13:
        g13_f, g13_u = gamma_coefficients(params, caps, 13)
        case = wolbachia_classify(params, caps)
    return InvasionReport(
        gamma_f=gamma_f,
        gamma_u=gamma_u,
        theta_f=theta_f,
        theta_u=theta_u,
        theta1_u=theta1_u,
        scenario=_scenario_from_signs(gamma_f, gamma_u),
        gamma13_f=g13_f,
        gamma13_u=g13_u,
        wolbachia_case=case,
    )
