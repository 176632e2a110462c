"""Scratch validation: orientation of case-1 dynamics, gamma values, speeds."""
import time

import numpy as np

from segrad.model import ModelParams, PiecewiseCapacity, baseline_parameters, alpha
from segrad.invasion import gamma_coefficients
from segrad.pde import Grid1D, SimState, run_to_time, default_dt

params = baseline_parameters()
caps1 = PiecewiseCapacity(k1_f=10, k1_u=1, k2_f=1, k2_u=10)

print("alpha1 =", alpha(params, 1), "alpha2 =", alpha(params, 2), "alpha3 =", alpha(params, 3))
print("gamma12 case1:", gamma_coefficients(params, caps1, 12))
print("gamma13 case1:", gamma_coefficients(params, caps1, 13))
caps2 = PiecewiseCapacity(k1_f=10, k1_u=7, k2_f=1, k2_u=5)
print("gamma12 case2:", gamma_coefficients(params, caps2, 12))
caps3 = PiecewiseCapacity(k1_f=10, k1_u=4, k2_f=1, k2_u=4.5)
print("gamma12 wolb3:", gamma_coefficients(params, caps3, 12))
print("gamma13 wolb3:", gamma_coefficients(params, caps3, 13))

grid = Grid1D(40.0, 801)
x = grid.nodes()


def block(lo, hi, val):
    return np.where((x >= lo) & (x <= hi), val, 0.0)


def run_case1(n1_0, n2_0, label, t_end=500.0):
    fields = np.stack([n1_0, n2_0])
    state = SimState("two_species", 0.0, grid, fields)
    dt = default_dt(state, params, caps1)
    t0 = time.time()
    final, log = run_to_time(
        state, params, caps1, dt, t_end, sample_interval=1.0,
        stop_when_steady=True, steady_tol=1e-6, steady_samples=10,
    )
    wall = time.time() - t0
    n1, n2 = final.fields
    left = x < -5
    right = x > 5
    print(f"{label}: dt={dt:.5g} wall={wall:.1f}s t={final.time:.0f} "
          f"steady={log.steady_reached}")
    print(f"  n1 mean left={n1[left].mean():.4f} right={n1[right].mean():.4f} "
          f"n2 mean left={n2[left].mean():.4f} right={n2[right].mean():.4f}")
    print(f"  max n1={n1.max():.4f} max n2={n2.max():.4f} sup_dt={log.sup_dt[-1]:.2e}")
    return final


print("\n--- case 1, paper-literal data (n1 at [10,20], n2 at [-20,-10]) ---")
run_case1(block(10, 20, 2.0), block(-20, -10, 2.5), "literal")

print("\n--- case 1, reflected data (n1 at [-20,-10], n2 at [10,20]) ---")
run_case1(block(-20, -10, 2.0), block(10, 20, 2.5), "reflected")
