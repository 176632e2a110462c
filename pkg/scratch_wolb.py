"""Scratch validation: Wolbachia scenarios (reflected data), outcomes and timing."""
import time

import numpy as np

from segrad.model import PiecewiseCapacity, baseline_parameters
from segrad.pde import Grid1D, SimState, run_to_time, default_dt

params = baseline_parameters()
grid = Grid1D(40.0, 801)
x = grid.nodes()


def block(lo, hi, val):
    return np.where((x >= lo) & (x <= hi), val, 0.0)


def run(caps, n1_0, n2_0, n3_0, label, t_end):
    state = SimState("three_species_wolbachia", 0.0, grid, np.stack([n1_0, n2_0, n3_0]))
    dt = default_dt(state, params, caps)
    t0 = time.time()

    left, right = x < -5, x > 5

    def means(s):
        out = {}
        for i, name in enumerate(("n1", "n2", "n3")):
            out[f"{name}_l"] = float(s.fields[i][left].mean())
            out[f"{name}_r"] = float(s.fields[i][right].mean())
            out[f"{name}_max"] = float(s.fields[i].max())
        return out

    final, log = run_to_time(
        state, params, caps, dt, t_end, sample_interval=2.0, observers=[means],
        stop_when_steady=True, steady_tol=1e-6, steady_samples=10,
    )
    wall = time.time() - t0
    print(f"{label}: dt={dt:.4g} wall={wall:.0f}s t_final={final.time:.0f} steady={log.steady_reached}")
    m = means(final)
    print("  final:", {k: round(v, 4) for k, v in m.items()})
    # find intermediate n3 dominance on the right
    stage = [r for r in log.observer_rows if r["n3_r"] > 10 * r["n1_r"] and r["n3_r"] > 10 * r["n2_r"]]
    if stage:
        print(f"  n3 dominant right from t={stage[0]['time']:.0f} to t={stage[-1]['time']:.0f}")
    return final, log


caps_w1 = PiecewiseCapacity(k1_f=10, k1_u=1, k2_f=1, k2_u=10)
n1_0 = block(-20, -10, 2.0)
print("--- wolb1 (release [15,25] width 10) ---")
run(caps_w1, n1_0, np.where(x >= 0, 7.5, 0.0), block(15, 25, 7.0), "wolb1", 2000.0)
print("--- wolb2 (release [15,20] width 5) ---")
run(caps_w1, n1_0, np.where(x >= 0, 7.5, 0.0), block(15, 20, 7.0), "wolb2", 2000.0)

caps_w3 = PiecewiseCapacity(k1_f=10, k1_u=4, k2_f=1, k2_u=4.5)
print("--- wolb3 (release [20,25] width 5) ---")
run(caps_w3, n1_0, np.where(x >= 0, 3.5, 0.0), block(20, 25, 3.0), "wolb3", 2000.0)
print("--- wolb4 (release [10,25] width 15) ---")
f4, log4 = run(caps_w3, n1_0, np.where(x >= 0, 3.5, 0.0), block(10, 25, 3.0), "wolb4", 2000.0)
