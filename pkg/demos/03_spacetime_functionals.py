"""Space-time functionals: Strichartz-type norms, localized mass, Morawetz flux.

Every L^q-in-time quantity integrates the trajectory's stored frames by
trapezoid, so the snapshot stride is the accuracy knob.  The script
measures the classical ratio diagnostics on linear and defocusing runs.
"""

import numpy as np

import snls

SC = 7.0 / 6.0

grid = snls.RadialGrid(r_max=40.0, n=2048)
r = grid.nodes
u0 = snls.RadialField(grid, np.exp(-(r**2) / 2).astype(complex))
ctl = snls.StepController(dt_max=0.002, snapshot_stride=0.02)

print("== linear Strichartz ratio over [0, 4] ==")
lin = snls.linear_trajectory(u0, (0.0, 4.0), snls.StepController(snapshot_stride=0.05))
rep = snls.space_time_norms(lin, (0.0, 4.0))
print(f"S = L15_t,x = {rep.S:.4f};  ratio S / ||u0||_Hsc = {rep.S / snls.sobolev_norm(u0, SC):.4f}")
print(f"W = {rep.W:.4f}  (max of the two admissible-pair pieces)")

print("\n== admissible exponent pairs: 2/q + 3/r = 3/2 ==")
for q, rr in [(10 / 3, 10 / 3), (15, 90 / 41)]:
    print(f"  (q, r) = ({q:.4f}, {rr:.4f}) -> 2/q + 3/r = {2/q + 3/rr:.15f}")

print("\n== localized mass: scale bound M(u;0,R) <= C R^(7/6) ||u||_Hsc ==")
hsc = snls.sobolev_norm(u0, SC)
for R in (0.5, 1.0, 2.0, 4.0, 8.0):
    m = snls.localized_mass(u0, R)
    print(f"  R = {R:4.1f}: M = {m:.5f}, ratio = {m / (R**(7/6) * hsc):.4f}")

print("\n== localized-mass rate along the linear flow: |dM/dt| R^(5/6) / E ==")
traj = snls.linear_trajectory(u0, (0.0, 1.0), snls.StepController(snapshot_stride=0.02))
sup = traj.densities["H_sc"].max()
for R in (2.0, 4.0, 8.0):
    rates = [abs(snls.localized_mass_rate(traj, t, R)) for t in traj.times[2:-2:8]]
    print(f"  R = {R:4.1f}: max ratio = {max(rates) * R**(5/6) / sup:.4f}")

print("\n== Morawetz flux ratio over defocusing runs ==")
for amp in (0.5, 1.0, 1.5, 2.0):
    data = snls.RadialField(grid, amp * np.exp(-(r**2) / 2).astype(complex))
    run = snls.evolve(data, (0.0, 1.0), ctl)
    c_cut = 4.0
    flux = snls.morawetz_flux(run, (0.0, 1.0), c_cut)
    ratio = flux / ((c_cut * 1.0) ** (2 / 3) * run.densities["H_sc"].max())
    print(f"  amplitude {amp:3.1f}: flux = {flux:10.5f}, ratio = {ratio:.4f}")

print("\n== per-frame density stream (first rows) ==")
print("t, mass, energy, Hsc, s_density")
run = snls.evolve(u0, (0.0, 0.1), ctl)
for m in range(0, run.times.size, 2):
    d = run.densities
    print(f"{run.times[m]:.2f}, {d['mass'][m]:.6f}, {d['energy'][m]:.6f}, "
          f"{d['H_sc'][m]:.6f}, {d['s_density'][m]:.6f}")
