"""Semi-implicit finite-difference time integration on a truncated interval
with reflecting (Neumann) boundaries.

Diffusion is treated with backward Euler (unconditionally stable
tridiagonal solve); the reaction is evaluated explicitly at the previous
time level, which bounds the usable time step by the reaction's Lipschitz
constant over the invariant density box.  A state is owned by one runner at
a time; independent runs need no coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .model import ModelParams, PiecewiseCapacity, ValidationError

__all__ = [
    "NumericalError",
    "Grid1D",
    "Field",
    "SimState",
    "RunLog",
    "SYSTEM_KINDS",
    "tridiag_solve",
    "reaction_lipschitz_bound",
    "default_dt",
    "step_semi_implicit",
    "run_to_time",
    "segregation_metric",
    "snapshots_to_csv",
]

SYSTEM_KINDS = ("two_species", "three_species_wolbachia", "reduced_scalar")

# Fraction of accumulated clamped mass (relative to the initial mass) above
# which a run is considered numerically broken.
CLAMP_BUDGET = 1e-8


class NumericalError(RuntimeError):
    """A run violated a numerical sanity bound (clamping, non-convergence)."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform vertex-centered mesh on [-half_length, half_length]."""

    half_length: float = 40.0
    n_nodes: int = 801

    def __post_init__(self) -> None:
        if self.n_nodes < 3:
            raise ValidationError("grid needs at least 3 nodes")
        if self.half_length <= 0.0:
            raise ValidationError("grid half length must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / (self.n_nodes - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(-self.half_length, self.half_length, self.n_nodes)

    def capacity_arrays(self, caps: PiecewiseCapacity) -> tuple[np.ndarray, np.ndarray]:
        """Per-node capacities; x = 0 takes the U value."""
        x = self.nodes()
        k1 = np.where(x < 0.0, caps.k1_f, caps.k1_u)
        k2 = np.where(x < 0.0, caps.k2_f, caps.k2_u)
        return k1, k2

    def interface_node(self) -> int | None:
        """Index of the node sitting exactly on the capacity jump, if any."""
        x = self.nodes()
        i = int(np.argmin(np.abs(x)))
        return i if abs(x[i]) < 1e-9 * self.dx else None


@dataclass(frozen=True)
class Field:
    """Nodal values of one density (or of the signed reduced variable)."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        if len(self.values) != self.grid.n_nodes:
            raise ValidationError("field length does not match grid")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("field values must be finite")


@dataclass(frozen=True)
class SimState:
    """Time, grid and the stacked per-species nodal values of one system."""

    kind: str
    time: float
    grid: Grid1D
    fields: np.ndarray  # shape (n_fields, n_nodes)

    def __post_init__(self) -> None:
        if self.kind not in SYSTEM_KINDS:
            raise ValidationError(f"unknown system kind {self.kind!r}")
        expected = {"two_species": 2, "three_species_wolbachia": 3, "reduced_scalar": 1}
        if self.fields.shape != (expected[self.kind], self.grid.n_nodes):
            raise ValidationError("field array shape does not match system kind")
        if self.kind != "reduced_scalar" and np.any(self.fields < 0.0):
            raise ValidationError("densities must be nonnegative")


def tridiag_solve(lower, diag, upper, rhs) -> np.ndarray:
    """Thomas elimination for a tridiagonal system.

    ``lower[0]`` and ``upper[-1]`` are ignored.  Intended for strictly
    diagonally dominant systems, where no pivoting is needed; a vanishing
    pivot raises.
    """
    a = np.asarray(lower, dtype=float)
    b = np.asarray(diag, dtype=float)
    c = np.asarray(upper, dtype=float)
    d = np.asarray(rhs, dtype=float).copy()
    n = len(b)
    if not (len(a) == len(c) == n and len(d) == n):
        raise ValidationError("tridiagonal bands and rhs must share one length")
    cp = np.empty(n)
    bp = b.copy()
    for i in range(1, n):
        if bp[i - 1] == 0.0:
            raise NumericalError("zero pivot in tridiagonal elimination")
        m = a[i] / bp[i - 1]
        bp[i] = b[i] - m * c[i - 1]
        d[i] = d[i] - m * d[i - 1]
    if bp[-1] == 0.0:
        raise NumericalError("zero pivot in tridiagonal elimination")
    x = np.empty(n)
    x[-1] = d[-1] / bp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = (d[i] - c[i] * x[i + 1]) / bp[i]
    return x


def _diffusion_banded(r: float, n: int) -> np.ndarray:
    """Banded form of I + r*T where T is the Neumann Laplacian stencil with
    reflecting ghost nodes (second-order closure)."""
    ab = np.zeros((3, n))
    ab[1, :] = 1.0 + 2.0 * r
    ab[0, 1:] = -r
    ab[2, :-1] = -r
    ab[0, 1] = -2.0 * r
    ab[2, n - 2] = -2.0 * r
    return ab


def _reaction_tables(
    grid: Grid1D, caps: PiecewiseCapacity
) -> tuple[np.ndarray, np.ndarray, int | None]:
    """Capacity arrays plus the index of the on-jump node.

    A node exactly on the jump represents a cell straddling both habitats;
    its reaction is averaged over the two sides so the effective interface
    stays at x = 0 instead of shifting by half a cell.
    """
    k1, k2 = grid.capacity_arrays(caps)
    return k1, k2, grid.interface_node()


def _reaction(kind: str, fields: np.ndarray, params: ModelParams, k1: np.ndarray, k2: np.ndarray) -> np.ndarray:
    c = params.c
    if kind == "two_species":
        n1, n2 = fields
        return np.stack(
            [
                n1 * (params.b1 * (1.0 - n1 / k1) - c * n2 - params.d1),
                n2 * (params.b2 * (1.0 - n2 / k2) - c * n1 - params.d2),
            ]
        )
    if kind == "three_species_wolbachia":
        n1, n2, n3 = fields
        S = n2 + n3
        # The mating-frequency factor n2/(n2+n3) has limit 0 along n2 -> 0;
        # set it to 0 once the pair density is negligible.
        frac = np.divide(n2, S, out=np.zeros_like(S), where=S > 1e-12)
        return np.stack(
            [
                n1 * (params.b1 * (1.0 - n1 / k1) - c * S - params.d1),
                n2 * (params.b2 * frac * (1.0 - S / k2) - c * n1 - params.d2),
                n3 * (params.b3 * (1.0 - S / k2) - c * n1 - params.d3),
            ]
        )
    w = fields[0]
    wp = np.maximum(w, 0.0)
    wm = np.maximum(-w, 0.0)
    f = (
        params.b1 * wp * (1.0 - wp / k1)
        - params.d1 * wp
        - params.b2 * wm * (1.0 - wm / k2)
        + params.d2 * wm
    )
    return f[None, :]


def _reaction_with_interface(
    kind: str,
    fields: np.ndarray,
    params: ModelParams,
    k1: np.ndarray,
    k2: np.ndarray,
    iface: int | None,
    caps: PiecewiseCapacity,
) -> np.ndarray:
    """Reaction arrays with a second-order treatment of the on-jump node.

    The node exactly at x = 0 straddles both habitats: its reaction is the
    average of the two sides' values plus the standard immersed-interface
    correction (h/6) d/dx[f_U - f_F] that cancels the O(h) defect of the
    centered Laplacian across the curvature jump.  Without this the
    effective interface sits half a cell off and steady fronts land
    visibly displaced.
    """
    rea = _reaction(kind, fields, params, k1, k2)
    if iface is not None and 0 < iface < fields.shape[1] - 1:
        cols = fields[:, iface - 1 : iface + 2]
        k1_f = np.full(3, caps.k1_f)
        k2_f = np.full(3, caps.k2_f)
        k1_u = np.full(3, caps.k1_u)
        k2_u = np.full(3, caps.k2_u)
        f_f = _reaction(kind, cols, params, k1_f, k2_f)
        f_u = _reaction(kind, cols, params, k1_u, k2_u)
        jump = f_u - f_f
        rea[:, iface] = (
            0.5 * (f_f[:, 1] + f_u[:, 1]) + (jump[:, 2] - jump[:, 0]) / 12.0
        )
    return rea


def reaction_lipschitz_bound(
    state: SimState, params: ModelParams, caps: PiecewiseCapacity
) -> float:
    """Max-norm Lipschitz constant of the reaction over the invariant box
    [0, max(current max, capacity max)] per species."""
    k1_min = min(caps.k1_f, caps.k1_u)
    k2_min = min(caps.k2_f, caps.k2_u)
    k1_max = max(caps.k1_f, caps.k1_u)
    k2_max = max(caps.k2_f, caps.k2_u)
    c = params.c
    if state.kind == "two_species":
        m1 = max(float(state.fields[0].max()), k1_max)
        m2 = max(float(state.fields[1].max()), k2_max)
        row1 = params.b1 * (1.0 + 2.0 * m1 / k1_min) + params.d1 + c * m2 + c * m1
        row2 = params.b2 * (1.0 + 2.0 * m2 / k2_min) + params.d2 + c * m1 + c * m2
        return max(row1, row2)
    if state.kind == "three_species_wolbachia":
        m1 = max(float(state.fields[0].max()), k1_max)
        m2 = max(float(state.fields[1].max()), k2_max)
        m3 = max(float(state.fields[2].max()), k2_max)
        row1 = params.b1 * (1.0 + 2.0 * m1 / k1_min) + params.d1 + c * (m2 + m3) + 2.0 * c * m1
        row2 = (
            params.b2 * (2.0 + 2.0 * m2 / k2_min)
            + params.d2
            + c * m1
            + c * m2
            + params.b2
        )
        row3 = (
            params.b3 * (1.0 + (m2 + 2.0 * m3) / k2_min)
            + params.d3
            + c * m1
            + c * m3
            + params.b3 * m3 / k2_min
        )
        return max(row1, row2, row3)
    w = state.fields[0]
    mp = max(float(np.maximum(w, 0.0).max()), k1_max)
    mm = max(float(np.maximum(-w, 0.0).max()), k2_max)
    return max(
        params.b1 * (1.0 + 2.0 * mp / k1_min) + params.d1,
        params.b2 * (1.0 + 2.0 * mm / k2_min) + params.d2,
    )


def default_dt(state: SimState, params: ModelParams, caps: PiecewiseCapacity) -> float:
    """Default step: the reaction stability bound, the explicit-diffusion
    accuracy scale dx^2/(2D), or 0.01, whichever is smallest."""
    bound = 0.9 / reaction_lipschitz_bound(state, params, caps)
    return min(bound, state.grid.dx**2 / (2.0 * params.D), 0.01)


def _check_dt(dt: float, state: SimState, params: ModelParams, caps: PiecewiseCapacity) -> None:
    if dt <= 0.0:
        raise ValidationError("dt must be positive")
    bound = 0.9 / reaction_lipschitz_bound(state, params, caps)
    if dt > bound * (1.0 + 1e-12):
        raise ValidationError(
            f"dt = {dt:.6g} exceeds the reaction stability bound {bound:.6g}; "
            f"choose dt <= 0.9 / Lipschitz(reaction)"
        )


def _advance(
    fields: np.ndarray,
    kind: str,
    params: ModelParams,
    k1: np.ndarray,
    k2: np.ndarray,
    iface: int | None,
    caps: PiecewiseCapacity,
    ab: np.ndarray,
    dt: float,
    dx: float,
) -> tuple[np.ndarray, float]:
    """One semi-implicit step on raw arrays; returns (new fields, clamped mass)."""
    rhs = fields + dt * _reaction_with_interface(kind, fields, params, k1, k2, iface, caps)
    out = solve_banded((1, 1), ab, rhs.T).T
    clamped = 0.0
    if kind != "reduced_scalar":
        neg = np.minimum(out, 0.0)
        clamped = float(-neg.sum() * dx)
        if clamped:
            out = np.maximum(out, 0.0)
    return out, clamped


def diffusion_step(values: np.ndarray, grid: Grid1D, D: float, dt: float) -> np.ndarray:
    """One backward-Euler step of pure Neumann diffusion (reaction off).

    This is exactly the implicit half of :func:`step_semi_implicit`; exposed
    so conservation and refinement checks can probe it in isolation.
    """
    if dt <= 0.0 or D <= 0.0:
        raise ValidationError("dt and D must be positive")
    r = D * dt / grid.dx**2
    ab = _diffusion_banded(r, grid.n_nodes)
    return solve_banded((1, 1), ab, np.asarray(values, dtype=float))


def step_semi_implicit(
    state: SimState, params: ModelParams, caps: PiecewiseCapacity, dt: float
) -> SimState:
    """Advance one step: explicit reaction, implicit diffusion, then clamp
    density undershoots at zero.

    Raises when dt violates the reaction stability bound, and when the
    clamped mass in this step exceeds the run budget relative to the
    current mass (a symptom of a dt violation).
    """
    _check_dt(dt, state, params, caps)
    k1, k2, iface = _reaction_tables(state.grid, caps)
    r = params.D * dt / state.grid.dx**2
    ab = _diffusion_banded(r, state.grid.n_nodes)
    out, clamped = _advance(
        state.fields, state.kind, params, k1, k2, iface, caps, ab, dt, state.grid.dx
    )
    mass = float(np.abs(state.fields).sum() * state.grid.dx)
    if clamped > CLAMP_BUDGET * max(mass, 1e-300):
        raise NumericalError(
            f"clamped mass {clamped:.3e} exceeds budget; reduce dt"
        )
    return replace(state, time=state.time + dt, fields=out)


@dataclass
class RunLog:
    """Sampled observations of one run."""

    times: list[float]
    sup_dt: list[float]
    segregation: list[float]
    observer_rows: list[dict]
    snapshots: list[tuple[float, np.ndarray]]
    steady_reached: bool = False
    steady_time: float | None = None
    clamped_total: float = 0.0


def run_to_time(
    state: SimState,
    params: ModelParams,
    caps: PiecewiseCapacity,
    dt: float,
    t_end: float,
    sample_interval: float = 1.0,
    observers: Sequence[Callable[[SimState], dict]] = (),
    snapshot_interval: float | None = None,
    stop_when_steady: bool = False,
    steady_tol: float = 1e-6,
    steady_samples: int = 10,
) -> tuple[SimState, RunLog]:
    """Repeatedly step to ``t_end``, sampling observers at fixed intervals.

    The step is shrunk slightly so an integer number of steps lands exactly
    on ``t_end``.  With ``stop_when_steady`` the run ends early once the
    sup-norm discrete time derivative stays below ``steady_tol`` for
    ``steady_samples`` consecutive samples.
    """
    if t_end < state.time:
        raise ValidationError("t_end must not precede the state time")
    log = RunLog([], [], [], [], [])
    if t_end == state.time:
        return state, log
    _check_dt(dt, state, params, caps)

    n_steps = max(1, math.ceil((t_end - state.time) / dt - 1e-12))
    dt_eff = (t_end - state.time) / n_steps
    sample_every = max(1, round(sample_interval / dt_eff))
    snap_every = None
    if snapshot_interval is not None:
        snap_every = max(1, round(snapshot_interval / dt_eff))

    k1, k2, iface = _reaction_tables(state.grid, caps)
    dx = state.grid.dx
    r = params.D * dt_eff / dx**2
    ab = _diffusion_banded(r, state.grid.n_nodes)

    fields = state.fields.copy()
    mass0 = max(float(np.abs(fields).sum() * dx), 1e-300)
    t = state.time
    quiet = 0
    clamped_total = 0.0

    def current_state() -> SimState:
        return SimState(state.kind, t, state.grid, fields.copy())

    if snap_every is not None:
        log.snapshots.append((t, fields.copy()))

    for step in range(1, n_steps + 1):
        new_fields, clamped = _advance(
            fields, state.kind, params, k1, k2, iface, caps, ab, dt_eff, dx
        )
        clamped_total += clamped
        if clamped_total > CLAMP_BUDGET * mass0:
            raise NumericalError(
                f"accumulated clamped mass {clamped_total:.3e} exceeds "
                f"{CLAMP_BUDGET:.0e} of the initial mass; reduce dt"
            )
        t = state.time + step * dt_eff
        sup_dt = float(np.abs(new_fields - fields).max()) / dt_eff
        fields = new_fields
        if step % sample_every == 0 or step == n_steps:
            log.times.append(t)
            log.sup_dt.append(sup_dt)
            if state.kind != "reduced_scalar":
                log.segregation.append(
                    _segregation(fields)
                )
            if observers:
                snapshot = current_state()
                row = {"time": t, "sup_dt": sup_dt}
                for obs in observers:
                    row.update(obs(snapshot))
                log.observer_rows.append(row)
            quiet = quiet + 1 if sup_dt < steady_tol else 0
            if stop_when_steady and quiet >= steady_samples:
                log.steady_reached = True
                log.steady_time = t
                break
        if snap_every is not None and (step % snap_every == 0 or step == n_steps):
            log.snapshots.append((t, fields.copy()))

    log.clamped_total = clamped_total
    return current_state(), log


def _segregation(fields: np.ndarray) -> float:
    others = fields[1:].sum(axis=0)
    return float((fields[0] * others).max())


def segregation_metric(state: SimState) -> float:
    """Max over nodes of n1*(n2 [+ n3]); zero means disjoint supports."""
    if state.kind == "reduced_scalar":
        raise ValidationError(
            "segregation metric undefined for the reduced scalar system"
        )
    return _segregation(state.fields)


def snapshots_to_csv(path, log: RunLog, grid: Grid1D, field_names: Sequence[str]) -> None:
    """Write the sampled snapshots as CSV rows (time, x, one column per
    field), 17 significant digits for lossless round-trips."""
    x = grid.nodes()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("time,x," + ",".join(field_names) + "\n")
        for t, fields in log.snapshots:
            for i in range(grid.n_nodes):
                row = [f"{t:.17g}", f"{x[i]:.17g}"]
                row += [f"{fields[k, i]:.17g}" for k in range(fields.shape[0])]
                fh.write(",".join(row) + "\n")
