"""Scratch validation: stationary fronts vs long-time PDE solutions."""
import time

import numpy as np

from segrad.model import PiecewiseCapacity, baseline_parameters
from segrad.stationary import front_construct, matching_value_solve
from segrad.pde import Grid1D, SimState, run_to_time, default_dt

params = baseline_parameters()
caps1 = PiecewiseCapacity(k1_f=10, k1_u=1, k2_f=1, k2_u=10)
caps2 = PiecewiseCapacity(k1_f=10, k1_u=7, k2_f=1, k2_u=5)

t0 = time.time()
w0 = matching_value_solve(params, caps1, "BB")
front = front_construct(params, caps1, "BB", 40.0, 0.005)
print(f"BB matching value = {w0:.8f}; construct wall = {time.time()-t0:.1f}s")
print(f"limits: {front.left_limit:.6f} / {front.right_limit:.6f}; "
      f"endpoint values {front.values[0]:.8f} / {front.values[-1]:.8f}")
print(f"derivative at zero = {front.derivative_at_zero:.6f}")

# residual check
h = front.x[1] - front.x[0]
vals = front.values
lap = (vals[:-2] - 2 * vals[1:-1] + vals[2:]) / h**2
from segrad.model import Side, reaction_f
x_in = front.x[1:-1]
f_in = np.where(
    x_in < 0,
    reaction_f(Side.F, vals[1:-1], params, caps1),
    reaction_f(Side.U, vals[1:-1], params, caps1),
)
mask = np.abs(x_in) > 2 * h  # exclude the interface kink in curvature
res = np.abs(-params.D * lap - f_in)
print(f"front residual (excl interface): {res[mask].max():.2e}; at interface rows: {res[~mask].max():.2e}")

grid = Grid1D(40.0, 801)
x = grid.nodes()


def block(lo, hi, val):
    return np.where((x >= lo) & (x <= hi), val, 0.0)


# 2-species case-1 run (reflected data)
state = SimState("two_species", 0.0, grid, np.stack([block(-20, -10, 2.0), block(10, 20, 2.5)]))
dt = default_dt(state, params, caps1)
final, log = run_to_time(state, params, caps1, dt, 500.0, stop_when_steady=True)
omega = final.fields[0] - final.fields[1]
pred = front.evaluate(x)
m30 = np.abs(x) <= 30
print(f"\n2-species vs BB front, max dev |x|<=30: {np.abs(omega - pred)[m30].max():.4f}")

# reduced run from same omega0
w_init = block(-20, -10, 2.0) - block(10, 20, 2.5)
state_r = SimState("reduced_scalar", 0.0, grid, w_init[None, :])
dt_r = default_dt(state_r, params, caps1)
final_r, log_r = run_to_time(state_r, params, caps1, dt_r, 500.0, stop_when_steady=True)
dev_r = np.abs(final_r.fields[0] - pred)[m30].max()
print(f"reduced vs BB front, max dev |x|<=30: {dev_r:.5f} (steady={log_r.steady_reached} t={final_r.time:.0f})")

# TH2 front for case 2
front2 = front_construct(params, caps2, "TH2", 40.0, 0.005)
print(f"\nTH2 matching value = {front2.matching_value:.8f}, limits {front2.left_limit:.4f}/{front2.right_limit:.4f}")
state2 = SimState("two_species", 0.0, grid, np.stack([block(-20, -10, 2.0), block(10, 20, 2.5)]))
dt2 = default_dt(state2, params, caps2)
final2, log2 = run_to_time(state2, params, caps2, dt2, 500.0, stop_when_steady=True)
omega2 = final2.fields[0] - final2.fields[1]
dev2 = np.abs(omega2 - front2.evaluate(x))[m30].max()
print(f"case2 vs TH2 front, max dev |x|<=30: {dev2:.4f}; n2 max: {final2.fields[1].max():.2e}")
print(f"n1 mean x<-5: {final2.fields[0][x < -5].mean():.4f}  x>5: {final2.fields[0][x > 5].mean():.4f}")

# strong-competition study direction
print("\nc-sweep at T=20 (case-1 data):")
for c in (10.0, 100.0, 1000.0):
    from dataclasses import replace as drep
    p = drep(params, c=c)
    st = SimState("two_species", 0.0, grid, np.stack([block(-20, -10, 2.0), block(10, 20, 2.5)]))
    dtc = default_dt(st, p, caps1)
    t1 = time.time()
    fin, lg = run_to_time(st, p, caps1, dtc, 20.0)
    om_c = fin.fields[0] - fin.fields[1]
    st_r = SimState("reduced_scalar", 0.0, grid, w_init[None, :])
    fin_r, _ = run_to_time(st_r, p, caps1, default_dt(st_r, p, caps1), 20.0)
    seg = float((fin.fields[0] * fin.fields[1]).max())
    dev = float(np.abs(om_c - fin_r.fields[0]).max())
    print(f"  c={c:6.0f}: dt={dtc:.2e} seg={seg:.6f} dev={dev:.6f} wall={time.time()-t1:.1f}s")
