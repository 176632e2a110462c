"""Locate the reduced-equation vs front deviation; cross-check with fine dx."""
import numpy as np

from segrad.model import PiecewiseCapacity, baseline_parameters
from segrad.stationary import front_construct
from segrad.pde import Grid1D, SimState, run_to_time, default_dt

params = baseline_parameters()
caps1 = PiecewiseCapacity(k1_f=10, k1_u=1, k2_f=1, k2_u=10)
front = front_construct(params, caps1, "BB", 40.0, 0.005)

for n_nodes in (801, 3201):
    grid = Grid1D(40.0, n_nodes)
    x = grid.nodes()
    w0 = np.where((x >= -20) & (x <= -10), 2.0, 0.0) - np.where((x >= 10) & (x <= 20), 2.5, 0.0)
    state = SimState("reduced_scalar", 0.0, grid, w0[None, :])
    dt = default_dt(state, params, caps1)
    final, log = run_to_time(state, params, caps1, dt, 500.0, stop_when_steady=True)
    w = final.fields[0]
    pred = front.evaluate(x)
    dev = np.abs(w - pred)
    m = np.abs(x) <= 30
    i = int(np.argmax(np.where(m, dev, 0)))
    print(f"n={n_nodes} dx={grid.dx:.4f}: max dev {dev[m].max():.5f} at x={x[i]:.3f} "
          f"(steady t={final.time:.0f})")
    k = max(1, (n_nodes - 1) // 800)
    for j in range(i - 6 * k, i + 7 * k, 2 * k):
        print(f"   x={x[j]:7.3f} w={w[j]:9.5f} front={pred[j]:9.5f} dev={dev[j]:.5f}")
