"""Scratch validation: bubbles, thresholds, monotone-in-time evolution."""
import time

import numpy as np

from segrad.model import PiecewiseCapacity, Side, baseline_parameters, reaction_f, alpha
from segrad.invasion import (
    bubble_construct,
    bubble_half_width,
    theta_threshold,
    gamma_coefficients,
)
from segrad.pde import Grid1D, SimState, run_to_time, default_dt

params = baseline_parameters()
caps1 = PiecewiseCapacity(k1_f=10, k1_u=1, k2_f=1, k2_u=10)
caps2 = PiecewiseCapacity(k1_f=10, k1_u=7, k2_f=1, k2_u=5)

th_f = theta_threshold(Side.F, params, caps1, 12)
th_u = theta_threshold(Side.U, params, caps1, 12)
th1_u = theta_threshold(Side.U, params, caps2, 12)
print(f"theta_F={th_f:.6f} (expect ~0.457), theta_U={th_u:.6f} (~-0.461), "
      f"theta1_U(case2)={th1_u:.6f}")

a1 = alpha(params, 1)
for kind, caps, lo, hi in (
    ("F", caps1, th_f, 10 * a1),
    ("U", caps1, -8.0, th_u),
    ("U1", caps2, th1_u, 7 * a1),
):
    for frac in (0.25, 0.5, 0.75):
        level = lo + frac * (hi - lo)
        t0 = time.time()
        b = bubble_construct(kind, level, params, caps, mesh_step=5e-4)
        lq = bubble_half_width(kind, level, params, caps)
        # residual of -D chi'' = f(chi) on interior
        h = b.x[1] - b.x[0]
        lap = (b.values[:-2] - 2 * b.values[1:-1] + b.values[2:]) / h**2
        p = 0.0 if b.pair == 12 else 1.0
        f_in = reaction_f(b.side, b.values[1:-1], params, caps)
        res = np.abs(-params.D * lap - f_in).max()
        # energy along profile: D/2 chi'^2 + F(chi) = F(level)
        from segrad.model import antiderivative_F
        en = params.D / 2 * b.slopes**2 + antiderivative_F(b.side, b.values, params, caps)
        en_err = np.abs(en - antiderivative_F(b.side, b.level, params, caps)).max()
        print(f"{kind} level={level:7.4f}: L={b.half_width:.6f} quad={lq:.6f} "
              f"rel={(abs(b.half_width-lq)/lq):.2e} res={res:.2e} energy={en_err:.2e} "
              f"nodes={len(b.x)} wall={time.time()-t0:.2f}s")

# monotone-in-time: reduced equation started from F-bubble shifted into x<0
grid = Grid1D(40.0, 801)
x = grid.nodes()
b = bubble_construct("F", 4.0, params, caps1, mesh_step=5e-4)
print(f"\nF-bubble level 4: L = {b.half_width:.4f}")
w0 = b.evaluate(x, center=-(b.half_width + 2.0))
state = SimState("reduced_scalar", 0.0, grid, w0[None, :])
dt = default_dt(state, params, caps1)
fields = state.fields.copy()
worst = 0.0
import segrad.pde as pde
st = state
for k in range(500):
    st2 = pde.step_semi_implicit(st, params, caps1, dt)
    worst = min(worst, float((st2.fields - st.fields).min()))
    st = st2
print(f"500 steps monotone check: most negative increment = {worst:.3e}")
