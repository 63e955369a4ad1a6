"""
Negative energy collapse
========================

A tall Gaussian has E < 0, so radial blow-up is predicted. On a uniform
grid the profile shrinks to the mesh scale near the origin and the step
size hits its floor. How much the kinetic term grows before that happens
depends on the resolution, not only on the equation.
"""
from ibnls.evolution import SimConfig, detect_blowup, evolve, initial_field
from ibnls.experiments import classify
from ibnls.functionals import report
from ibnls.grid import make_grid
from ibnls.ground_state import solve_ground_state
from ibnls.model import make_params

data = {"family": "gaussian", "amplitude": 12.0, "width": 1.0}
grid = make_grid(make_params(6, 1.0), 10.0, 512)
gs = solve_ground_state(grid)
u0 = initial_field(grid, data, gs)
print("E(u0) =", f"{report(u0).energy:.1f}", " regime:", classify(u0, gs).regime)

for r_max in (10.0, 20.0):
    cfg = SimConfig(N=6, b=1.0, r_max=r_max, n=512, T=3e-4, R=4.0, dt0=1e-6,
                    dt_min=1e-10, output_interval=1e-6, data=data)
    series = evolve(cfg)
    det = detect_blowup(series, 10.0)
    V = series.column("V_R")
    print(f"r_max {r_max:g}: {series.termination}, growth {det['growth']:.1f}x, "
          f"V_R(end) = {V[-1]:.3g}, verdict at 10x: {det['verdict']}")
