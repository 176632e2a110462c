"""Parameters and pointwise reaction terms for a two-habitat competition model.

The spatial domain is split at x = 0 into a forest-like region F (x < 0) and
an urban-like region U (x > 0); each species sees a different carrying
capacity on each side.  Everything in this module is a pure function of the
parameters and works on scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "ValidationError",
    "Side",
    "ModelParams",
    "PiecewiseCapacity",
    "alpha",
    "carrying_equilibrium",
    "baseline_parameters",
    "reaction_f",
    "antiderivative_F",
    "reaction_g",
    "antiderivative_G",
]


class ValidationError(ValueError):
    """A parameter set or configuration violates a model hypothesis."""


class Side(Enum):
    """Habitat side: F is the region x < 0, U is x > 0.

    The point x = 0 itself is assigned to U; any measure-zero convention
    gives the same dynamics.
    """

    F = "F"
    U = "U"


@dataclass(frozen=True)
class ModelParams:
    """Birth/death rates, competition strength and diffusion coefficient.

    Species 1 competes with species 2; species 3 is the variant of species 2
    carrying the symbiont (it shares the carrying capacity of species 2).
    Rates are per unit time, ``c`` per unit density per time.
    """

    b1: float
    b2: float
    b3: float
    d1: float
    d2: float
    d3: float
    c: float
    D: float = 1.0

    def __post_init__(self) -> None:
        for name in ("b1", "b2", "b3", "d1", "d2", "d3", "c", "D"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"parameter {name} must be strictly positive")
        if not self.b1 > self.d1:
            raise ValidationError("species 1 viability requires b1 > d1")
        if not self.b2 > self.d2:
            raise ValidationError("species 2 viability requires b2 > d2")

    def require_wolbachia_hypothesis(self) -> None:
        """Check the rate ordering assumed for the infected strain.

        Carrying the symbiont costs fertility and longevity, so the infected
        strain must satisfy b3 > d3 (viability), b2 > b3 and d3 > d2.
        """
        if not self.b3 > self.d3:
            raise ValidationError("species 3 viability requires b3 > d3")
        if not (self.b2 > self.b3 and self.d3 > self.d2):
            raise ValidationError(
                "infected-strain ordering requires b2 > b3 and d3 > d2"
            )

    def birth(self, species: int) -> float:
        return (self.b1, self.b2, self.b3)[species - 1]

    def death(self, species: int) -> float:
        return (self.d1, self.d2, self.d3)[species - 1]


@dataclass(frozen=True)
class PiecewiseCapacity:
    """Carrying capacities of species 1 and 2/3 on each side of x = 0."""

    k1_f: float
    k1_u: float
    k2_f: float
    k2_u: float

    def __post_init__(self) -> None:
        for name in ("k1_f", "k1_u", "k2_f", "k2_u"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"capacity {name} must be strictly positive")

    def k1(self, side: Side) -> float:
        return self.k1_f if side is Side.F else self.k1_u

    def k2(self, side: Side) -> float:
        return self.k2_f if side is Side.F else self.k2_u

    def is_homogeneous(self) -> bool:
        return self.k1_f == self.k1_u and self.k2_f == self.k2_u


def alpha(params: ModelParams, species: int) -> float:
    """Reproductive excess 1 - d_i/b_i of a species."""
    return 1.0 - params.death(species) / params.birth(species)


def carrying_equilibrium(params: ModelParams, K: float, species: int) -> float:
    """Single-species logistic equilibrium K * (1 - d_i/b_i)."""
    return K * alpha(params, species)


def baseline_parameters() -> ModelParams:
    """Reference rates used by the bundled scenarios (c = 10, D = 0.5)."""
    return ModelParams(b1=1.12, b2=1.0, b3=0.9, d1=0.27, d2=0.2, d3=0.24, c=10.0, D=0.5)


def _split(omega):
    wp = np.maximum(omega, 0.0)
    wm = np.maximum(-np.asarray(omega), 0.0)
    return wp, wm


def _as_input(value, omega):
    return float(value) if np.ndim(omega) == 0 else value


def reaction_f(side: Side, omega, params: ModelParams, caps: PiecewiseCapacity):
    """Bistable reaction term of the reduced two-species equation.

    For omega >= 0 this is the logistic net growth of species 1 at density
    omega; for omega <= 0 it is minus the logistic net growth of species 2
    at density -omega.  Exactly one branch is active at any omega.
    """
    k1, k2 = caps.k1(side), caps.k2(side)
    wp, wm = _split(omega)
    val = (
        params.b1 * wp * (1.0 - wp / k1)
        - params.d1 * wp
        - params.b2 * wm * (1.0 - wm / k2)
        + params.d2 * wm
    )
    return _as_input(val, omega)


def antiderivative_F(side: Side, omega, params: ModelParams, caps: PiecewiseCapacity):
    """Closed-form antiderivative of :func:`reaction_f`, normalized to 0 at 0.

    Piecewise cubic: (b1-d1) w^2/2 - b1 w^3/(3 K1) for w >= 0 and
    (b2-d2) w^2/2 + b2 w^3/(3 K2) for w < 0.
    """
    return antiderivative_G(side, 12, omega, params, caps)


def reaction_g(side: Side, p: float, omega, params: ModelParams, caps: PiecewiseCapacity):
    """Reaction term of the reduced equation at infected fraction p.

    ``p`` is the fraction of species 2/3 individuals carrying the symbiont.
    p = 0 recovers :func:`reaction_f`; p = 1 is the competition of species 1
    against the pure infected strain.  The quadratic (1-p)^2 factor encodes
    the mating incompatibility of infected males with uninfected females.
    """
    if not 0.0 <= p <= 1.0:
        raise ValidationError("infected fraction p must lie in [0, 1]")
    k1, k2 = caps.k1(side), caps.k2(side)
    b_eff = params.b2 * (1.0 - p) ** 2 + params.b3 * p
    d_eff = params.d2 * (1.0 - p) + params.d3 * p
    wp, wm = _split(omega)
    val = (
        params.b1 * wp * (1.0 - wp / k1)
        - params.d1 * wp
        - wm * (b_eff * (1.0 - wm / k2) - d_eff)
    )
    return _as_input(val, omega)


def antiderivative_G(
    side: Side, pair: int, omega, params: ModelParams, caps: PiecewiseCapacity
):
    """Closed-form antiderivative of the pairwise reaction term.

    ``pair`` selects the competitor of species 1: 12 for the wild strain
    (p = 0, identical to :func:`antiderivative_F`) and 13 for the infected
    strain (p = 1).  Normalized so G(0) = 0.
    """
    if pair not in (12, 13):
        raise ValidationError("species pair must be 12 or 13")
    bi = params.b2 if pair == 12 else params.b3
    di = params.d2 if pair == 12 else params.d3
    k1, k2 = caps.k1(side), caps.k2(side)
    wp, wm = _split(omega)
    pos = (params.b1 - params.d1) * wp**2 / 2.0 - params.b1 * wp**3 / (3.0 * k1)
    neg = (bi - di) * wm**2 / 2.0 - bi * wm**3 / (3.0 * k2)
    val = pos + neg
    return _as_input(val, omega)
