"""Radial sine-spectral toolkit: transforms, fractional derivatives, norms.

A radial field u(r) on R^3 is carried by w = r*u on a uniform grid with
Dirichlet ends; the orthonormal DST-I of w diagonalizes the radial
Laplacian, so fractional derivatives and Sobolev norms are exact spectral
multipliers.  This script walks the core operations on a unit Gaussian
and checks them against closed forms.
"""

import numpy as np
from scipy.special import gamma

import snls

SC = 7.0 / 6.0

grid = snls.RadialGrid(r_max=40.0, n=4096)
r = grid.nodes
u = snls.RadialField(grid, np.exp(-(r**2) / 2).astype(complex))

print("== grid ==")
print(f"n = {grid.n}, r_max = {grid.r_max}, dr = {grid.dr:.5f}")

print("\n== transform round trip ==")
back = snls.from_spectral(snls.to_spectral(u))
print("round-trip L2 error:", snls.lebesgue_norm(
    snls.RadialField(grid, back.values - u.values), 2.0))

print("\n== norms vs closed forms ==")
print(f"mass          {snls.mass(u):.12f}   (pi^3/2 = {np.pi**1.5:.12f})")
print(f"||u||_L2      {snls.lebesgue_norm(u, 2.0):.12f}   (pi^3/4 = {np.pi**0.75:.12f})")
closed = np.sqrt(2 * np.pi * gamma(SC + 1.5))
print(f"||u||_Hsc     {snls.sobolev_norm(u, SC):.12f}   (sqrt(2 pi Gamma(sc+3/2)) = {closed:.12f})")

print("\n== fractional derivative |grad|^s as the multiplier rho^s ==")
for s in (0.5, 1.0, SC, 2.0):
    print(f"  ||grad^{s:.3f} u||_L2 = {snls.sobolev_norm(u, s):.6f}")

print("\n== scaling symmetry: Hsc and L9 are the invariant norms ==")
for lam in (0.5, 1.0, 2.0):
    v = snls.rescale(u, lam)
    print(f"  lambda = {lam:4.2f}: Hsc = {snls.sobolev_norm(v, SC):.8f}, "
          f"L9 = {snls.lebesgue_norm(v, 9.0):.8f}")

print("\n== embedding and weighted-norm ratios (bounded constants) ==")
print(f"  L9 / Hsc             = {snls.lebesgue_norm(u, 9.0) / snls.sobolev_norm(u, SC):.4f}")
print(f"  ||u/r^sc||_L2 / Hsc  = {snls.hardy_ratio(u, SC):.4f}")

print("\n== discrete interpolation holds with constant exactly 1 ==")
delta = 0.05
lo = snls.sobolev_norm(u, SC - delta)
hi = snls.sobolev_norm(u, SC + 1 - delta)
mid = snls.sobolev_norm(u, SC)
print(f"  Hsc = {mid:.10f} <= Hlo^(1-d) Hhi^d = {lo**(1-delta)*hi**delta:.10f}")
