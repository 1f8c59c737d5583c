"""A short tour of the norm layer: grids, Luxemburg norms, the generalized
Hoelder inequality and Herz-Morrey norms.

Run with: python demos/norms_tour.py
"""

import numpy as np

import vexnorm as vx

# a 1d grid covering the shells 2^-5 < |x| <= 2^2 at spacing 2^-6
grid = vx.build_grid(n=1, k_min=-5, k_max=2, level=8)
print(f"grid: {grid.num_cells} active cells, h = {grid.h}")

# the Luxemburg norm of chi_[1,2] under a decaying exponent
q = vx.LogDecay(2.0, 1.0)          # q(x) = 2 + 1/ln(e + |x|)
chi = vx.characteristic_shell(grid, 1)
print(f"||chi_A1||_q = {vx.luxemburg_norm(chi, q):.6f}")
print(f"modular at the norm = {vx.modular(chi, q, vx.luxemburg_norm(chi, q)):.12f}")

# the generalized Hoelder inequality on a random pair
rng = np.random.default_rng(0)
f = vx.from_callable(grid, lambda x: np.sin(3 * x[:, 0]))
g = vx.from_callable(grid, lambda x: np.exp(-x[:, 0] ** 2))
pair = vx.holder_pair(f, g, q)
print(f"int |fg| = {pair.lhs:.6f}  <=  r_q ||f||_q ||g||_q' = {pair.rhs:.6f}")

# a Herz-Morrey norm weights each dyadic shell by 2^(k alpha) and damps the
# truncation index by 2^(-k0 lambda)
params = vx.HerzMorreyParams(alpha=0.2, lam=0.1, p=1.0, q=q)
print(f"Herz-Morrey norm of f: {vx.herz_morrey_norm(f, params):.6f}")

# the norm-ratio exponent of characteristic functions: for q = const it is
# exactly 1/q, for variable exponents it lands strictly between the bounds
for qq in (vx.Constant(2.0), q):
    est = vx.estimate_delta(qq, grid)
    print(f"delta for {type(qq).__name__}: {est.delta:.4f} "
          f"(C = {est.C:.3f}, {est.n_pairs} pairs)")
