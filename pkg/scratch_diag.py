"""Diagnose the 2-species vs front deviation profile."""
import numpy as np

from segrad.model import PiecewiseCapacity, baseline_parameters
from segrad.stationary import front_construct
from segrad.pde import Grid1D, SimState, run_to_time, default_dt

params = baseline_parameters()
caps1 = PiecewiseCapacity(k1_f=10, k1_u=1, k2_f=1, k2_u=10)
front = front_construct(params, caps1, "BB", 40.0, 0.005)

grid = Grid1D(40.0, 801)
x = grid.nodes()
block = lambda lo, hi, v: np.where((x >= lo) & (x <= hi), v, 0.0)

state = SimState("two_species", 0.0, grid, np.stack([block(-20, -10, 2.0), block(10, 20, 2.5)]))
final, log = run_to_time(state, params, caps1, default_dt(state, params, caps1), 500.0,
                         stop_when_steady=True)
n1, n2 = final.fields
omega = n1 - n2
pred = front.evaluate(x)
dev = np.abs(omega - pred)
i = int(np.argmax(np.where(np.abs(x) <= 30, dev, 0)))
print(f"max dev {dev[np.abs(x)<=30].max():.4f} at x = {x[i]:.2f}")
for j in range(i - 12, i + 13, 2):
    print(f"  x={x[j]:7.2f}  n1={n1[j]:8.4f} n2={n2[j]:8.4f} omega={omega[j]:8.4f} "
          f"front={pred[j]:8.4f} dev={dev[j]:.4f}")
print("overlap max n1*n2:", float((n1 * n2).max()))
# where does omega cross zero vs front?
halfdev = dev.copy(); halfdev[np.abs(x) > 5] = 0
zc_sim = x[np.argmin(np.abs(omega))]
zc_front = x[np.argmin(np.abs(pred))]
print(f"omega zero near x={zc_sim:.2f}; front zero near x={zc_front:.2f}")
