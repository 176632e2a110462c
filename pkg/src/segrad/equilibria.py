"""Homogeneous steady states of the 2- and 3-species systems and their
linear stability.

All computations here are for the space-independent (well-mixed) dynamics
with scalar carrying capacities K1, K2.  Stability is classified from
numerical eigenvalues of the analytic Jacobian, except at the two points
where the 3-species right-hand side is not differentiable (total density of
species 2+3 equal to zero); there the directional-limit sign rules apply.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams, ValidationError, alpha, carrying_equilibrium

__all__ = [
    "EquilibriumPoint",
    "rhs_2species",
    "jacobian_2species",
    "coexistence_condition_2species",
    "equilibria_2species",
    "rhs_3species",
    "jacobian_3species",
    "stability_condition_3species",
    "equilibria_3species",
    "stability_classification",
]

# Below this total density of species 2+3 the frequency factor n2/(n2+n3)
# has no derivative; classification falls back to directional sign rules.
SINGULAR_TOL = 1e-12

# Eigenvalue real parts within this band of zero are inconclusive.
EIGEN_TOL = 1e-9

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class EquilibriumPoint:
    """A nonnegative steady state with its stability tag.

    ``species`` lists the 1-based indices with nonzero density.  The
    eigenvalues are those of the Jacobian when it exists at the point;
    points classified by directional sign rules carry none.
    """

    densities: tuple[float, ...]
    kind: str  # "extinction" | "single_species" | "coexistence"
    species: tuple[int, ...]
    stability: str  # "stable" | "unstable" | "undetermined"
    eigenvalues: tuple[complex, ...] | None = None
    note: str = ""
    unstable_direction: tuple[float, ...] | None = None


# ---------------------------------------------------------------------------
# two species


def rhs_2species(n, params: ModelParams, K1: float, K2: float) -> np.ndarray:
    n1, n2 = float(n[0]), float(n[1])
    return np.array(
        [
            params.b1 * n1 * (1.0 - n1 / K1) - params.c * n1 * n2 - params.d1 * n1,
            params.b2 * n2 * (1.0 - n2 / K2) - params.c * n1 * n2 - params.d2 * n2,
        ]
    )


def jacobian_2species(point, params: ModelParams, K1: float, K2: float) -> np.ndarray:
    """Analytic Jacobian of the two-species dynamics at ``point``."""
    n1, n2 = float(point[0]), float(point[1])
    c = params.c
    return np.array(
        [
            [params.b1 * (1.0 - 2.0 * n1 / K1) - c * n2 - params.d1, -c * n1],
            [-c * n2, params.b2 * (1.0 - 2.0 * n2 / K2) - c * n1 - params.d2],
        ]
    )


def coexistence_condition_2species(
    params: ModelParams, K1: float, K2: float
) -> tuple[bool, float]:
    """Competition threshold above which a (strictly) positive steady state
    exists; returns (satisfied, threshold)."""
    g1, g2 = params.b1 - params.d1, params.b2 - params.d2
    threshold = max(params.b1 / K1 * (g2 / g1), params.b2 / K2 * (g1 / g2))
    return params.c > threshold, threshold


def _coexistence_2species(params: ModelParams, K1: float, K2: float) -> tuple[float, float]:
    c = params.c
    g1, g2 = params.b1 - params.d1, params.b2 - params.d2
    denom = c * c - params.b1 * params.b2 / (K1 * K2)
    n1 = (c * g2 - params.b2 / K2 * g1) / denom
    n2 = (c * g1 - params.b1 / K1 * g2) / denom
    return n1, n2


def equilibria_2species(
    params: ModelParams, K1: float, K2: float
) -> list[EquilibriumPoint]:
    """All nonnegative steady states of the two-species dynamics.

    The interior coexistence state exists only above the competition
    threshold; its absence below the threshold is reported by omission,
    not as an error.
    """
    n1s = carrying_equilibrium(params, K1, 1)
    n2s = carrying_equilibrium(params, K2, 2)
    candidates: list[tuple[tuple[float, ...], str, tuple[int, ...], str]] = [
        ((0.0, 0.0), "extinction", (), ""),
        ((n1s, 0.0), "single_species", (1,), ""),
        ((0.0, n2s), "single_species", (2,), ""),
    ]
    satisfied, _ = coexistence_condition_2species(params, K1, K2)
    if satisfied:
        candidates.append((_coexistence_2species(params, K1, K2), "coexistence", (1, 2), ""))
    points = []
    for densities, kind, species, note in candidates:
        stability, eigs = _classify_smooth(
            jacobian_2species(densities, params, K1, K2)
        )
        points.append(
            EquilibriumPoint(densities, kind, species, stability, eigs, note)
        )
    return points


# ---------------------------------------------------------------------------
# three species


def rhs_3species(n, params: ModelParams, K1: float, K2: float) -> np.ndarray:
    n1, n2, n3 = float(n[0]), float(n[1]), float(n[2])
    S = n2 + n3
    frac = n2 / S if S > SINGULAR_TOL else 0.0
    c = params.c
    return np.array(
        [
            params.b1 * n1 * (1.0 - n1 / K1) - c * n1 * S - params.d1 * n1,
            params.b2 * n2 * frac * (1.0 - S / K2) - c * n1 * n2 - params.d2 * n2,
            params.b3 * n3 * (1.0 - S / K2) - c * n1 * n3 - params.d3 * n3,
        ]
    )


def jacobian_3species(point, params: ModelParams, K1: float, K2: float) -> np.ndarray:
    """Analytic Jacobian of the three-species dynamics.

    Only defined where n2 + n3 exceeds the singular tolerance; the frequency
    factor n2/(n2+n3) is not differentiable at the origin of that pair.
    """
    n1, n2, n3 = float(point[0]), float(point[1]), float(point[2])
    S = n2 + n3
    if S <= SINGULAR_TOL:
        raise ValidationError(
            "Jacobian undefined where n2 + n3 vanishes; use directional rules"
        )
    c = params.c
    b2, b3 = params.b2, params.b3
    J = np.empty((3, 3))
    J[0, 0] = params.b1 * (1.0 - 2.0 * n1 / K1) - c * S - params.d1
    J[0, 1] = -c * n1
    J[0, 2] = -c * n1
    J[1, 0] = -c * n2
    J[1, 1] = b2 * (1.0 - (n3 / S) ** 2 - 2.0 * n2 / K2) - c * n1 - params.d2
    J[1, 2] = -b2 * (n2 / S) ** 2
    J[2, 0] = -c * n3
    J[2, 1] = -b3 * n3 / K2
    J[2, 2] = b3 * (1.0 - (n2 + 2.0 * n3) / K2) - c * n1 - params.d3
    return J


def stability_condition_3species(
    params: ModelParams, K1: float, K2: float
) -> tuple[bool, float]:
    """Competition threshold making all three single-species states stable."""
    g1, g2, g3 = params.b1 - params.d1, params.b2 - params.d2, params.b3 - params.d3
    threshold = max(
        params.b1 / K1 * (g2 / g1),
        params.b2 / K2 * (g1 / g2),
        params.b3 / K2 * (g2 / g3),
    )
    return params.c > threshold, threshold


def _full_coexistence_printed(
    params: ModelParams, K1: float, K2: float
) -> tuple[float, float, float]:
    """Closed-form candidate for the interior three-species state.

    Returns (n1, n2, N) where N is the total density of species 2+3.  The
    n2 component follows the printed rational expression; it is refined by
    Newton iteration before use.
    """
    b1, b2, b3 = params.b1, params.b2, params.b3
    d1, d2, d3 = params.d1, params.d2, params.d3
    c = params.c
    g1, g3 = b1 - d1, b3 - d3
    q = b1 * b3 / (K1 * K2) - c * c
    n41 = (b3 / K2 * g1 - c * g3) / q
    n42 = (b1 / K1 * g3 - c * g1) / q
    num = (b1 / K1 * g3 - c * g1) * (
        b1 * b3 / (K1 * K2) * d2 + c * b3 / K2 * g1 - c * c * (b3 + d2 - d3)
    )
    den = q * (K2 * q - b1 / K1 * g3 + c * g1)
    n22 = K2 / b2 * num / den
    return n41, n22, n42


def _newton_refine(n0, params: ModelParams, K1: float, K2: float, max_iter: int = 50):
    """Damped Newton solve of the three-species equilibrium system."""
    n = np.array(n0, dtype=float)
    res = rhs_3species(n, params, K1, K2)
    for _ in range(max_iter):
        norm = np.max(np.abs(res))
        if norm < 1e-13:
            break
        try:
            step = np.linalg.solve(jacobian_3species(n, params, K1, K2), -res)
        except (np.linalg.LinAlgError, ValidationError):
            return None
        lam = 1.0
        while lam > 1e-6:
            trial = n + lam * step
            trial_res = rhs_3species(trial, params, K1, K2)
            if np.max(np.abs(trial_res)) < (1.0 - 0.5 * lam) * norm + 1e-15:
                n, res = trial, trial_res
                break
            lam *= 0.5
        else:
            return None
    if np.max(np.abs(res)) > 1e-11:
        return None
    return n


def equilibria_3species(
    params: ModelParams, K1: float, K2: float, include_infeasible: bool = False
) -> list[EquilibriumPoint]:
    """All nonnegative steady states of the three-species dynamics.

    Mixed states whose closed-form coordinates come out negative are
    infeasible for the parameters at hand; they are omitted unless
    ``include_infeasible`` is set, in which case they appear tagged
    "undetermined" with a note.
    """
    params.require_wolbachia_hypothesis()
    n1s = carrying_equilibrium(params, K1, 1)
    n2s = carrying_equilibrium(params, K2, 2)
    n3s = carrying_equilibrium(params, K2, 3)

    points: list[EquilibriumPoint] = []

    # Total extinction: the right-hand side has no Jacobian here, but the
    # directional growth of a pure-species-2 perturbation is b2 - d2 > 0.
    points.append(
        EquilibriumPoint(
            (0.0, 0.0, 0.0),
            "extinction",
            (),
            "unstable",
            None,
            "directional rule: pure species-2 perturbations grow",
            unstable_direction=(0.0, 1.0, 0.0),
        )
    )

    # Species 1 alone: again no Jacobian (n2 + n3 = 0); the directional
    # growth rates are -(b1-d1), b2 - d2 - c n1* and b3 - d3 - c n1*.
    g2_rate = params.b2 - params.d2 - params.c * n1s
    g3_rate = params.b3 - params.d3 - params.c * n1s
    worst = max(-(params.b1 - params.d1), g2_rate, g3_rate)
    if worst < -EIGEN_TOL:
        tag = "stable"
    elif worst > EIGEN_TOL:
        tag = "unstable"
    else:
        tag = "undetermined"
    points.append(
        EquilibriumPoint(
            (n1s, 0.0, 0.0),
            "single_species",
            (1,),
            tag,
            None,
            "directional rule at the n2+n3 = 0 boundary",
        )
    )

    smooth_candidates: list[tuple[tuple[float, float, float], str, tuple[int, ...]]] = [
        ((0.0, n2s, 0.0), "single_species", (2,)),
        ((0.0, 0.0, n3s), "single_species", (3,)),
    ]

    infeasible: list[tuple[tuple[float, float, float], tuple[int, ...]]] = []

    # Pairwise mixed states reuse the two-species coexistence formulas.
    ok12, _ = coexistence_condition_2species(params, K1, K2)
    if ok12:
        m1, m2 = _coexistence_2species(params, K1, K2)
        smooth_candidates.append(((m1, m2, 0.0), "coexistence", (1, 2)))
    pair13 = ModelParams(
        b1=params.b1, b2=params.b3, b3=params.b3,
        d1=params.d1, d2=params.d3, d3=params.d3,
        c=params.c, D=params.D,
    )
    ok13, _ = coexistence_condition_2species(pair13, K1, K2)
    if ok13:
        m1, m3 = _coexistence_2species(pair13, K1, K2)
        smooth_candidates.append(((m1, 0.0, m3), "coexistence", (1, 3)))

    # Species 2 + 3 without species 1: explicit closed form.
    n32 = params.d2 / params.b2 * K2 * (params.b3 - params.d3) / params.d3
    n23 = n3s - n32
    if n23 >= 0.0:
        smooth_candidates.append(((0.0, n32, n23), "coexistence", (2, 3)))
    else:
        infeasible.append(((0.0, n32, n23), (2, 3)))

    # Full interior state: printed formula refined by Newton.
    n41, n22, n42 = _full_coexistence_printed(params, K1, K2)
    cand = (n41, n22, n42 - n22)
    if all(v >= 0.0 for v in cand) and n42 > 0.0:
        refined = _newton_refine(cand, params, K1, K2)
        if refined is not None and np.all(refined >= -1e-12):
            smooth_candidates.append(
                ((float(refined[0]), float(refined[1]), float(refined[2])), "coexistence", (1, 2, 3))
            )
        else:
            infeasible.append((cand, (1, 2, 3)))
    else:
        infeasible.append((cand, (1, 2, 3)))

    for densities, kind, species in smooth_candidates:
        stability, eigs = _classify_smooth(
            jacobian_3species(densities, params, K1, K2)
        )
        points.append(EquilibriumPoint(densities, kind, species, stability, eigs))

    if include_infeasible:
        for densities, species in infeasible:
            points.append(
                EquilibriumPoint(
                    densities,
                    "coexistence",
                    species,
                    "undetermined",
                    None,
                    "infeasible: negative coordinate",
                )
            )
    return points


# ---------------------------------------------------------------------------
# classification


def _classify_smooth(J: np.ndarray) -> tuple[str, tuple[complex, ...]]:
    eigs = tuple(np.linalg.eigvals(J))
    reals = [e.real for e in eigs]
    if max(reals) < -EIGEN_TOL:
        return "stable", eigs
    if max(reals) > EIGEN_TOL:
        return "unstable", eigs
    return "undetermined", eigs


def stability_classification(point, params: ModelParams, caps_scalar) -> str:
    """Classify the linear stability of an equilibrium of either system.

    ``caps_scalar`` is the pair (K1, K2).  The point must actually be an
    equilibrium (residual below 1e-8 in max norm), otherwise the call is a
    contract violation.
    """
    K1, K2 = caps_scalar
    point = tuple(float(v) for v in point)
    if len(point) == 2:
        res = rhs_2species(point, params, K1, K2)
        if np.max(np.abs(res)) > 1e-8:
            raise ValidationError("not an equilibrium: residual exceeds 1e-8")
        return _classify_smooth(jacobian_2species(point, params, K1, K2))[0]
    if len(point) != 3:
        raise ValidationError("point must have 2 or 3 densities")
    res = rhs_3species(point, params, K1, K2)
    if np.max(np.abs(res)) > 1e-8:
        raise ValidationError("not an equilibrium: residual exceeds 1e-8")
    if point[1] + point[2] <= SINGULAR_TOL:
        if point[0] <= SINGULAR_TOL:
            return "unstable"  # pure species-2 perturbations grow at b2 - d2
        n1 = point[0]
        worst = max(
            params.b1 * (1.0 - 2.0 * n1 / K1) - params.d1,
            params.b2 - params.d2 - params.c * n1,
            params.b3 - params.d3 - params.c * n1,
        )
        if worst < -EIGEN_TOL:
            return "stable"
        if worst > EIGEN_TOL:
            return "unstable"
        return "undetermined"
    return _classify_smooth(jacobian_3species(point, params, K1, K2))[0]
