"""Recover a sparse input and filter from one graph-filtered output.

Run: python3 demos/blind_recovery.py
"""

import numpy as np

import blindgraph as bg
from blindgraph.experiments import draw_instance, gen_graph

rng = np.random.default_rng(7)
g = gen_graph("er", rng, connected=True, n=50, p=0.1)
spec = bg.build_shift(g)
S, L = 3, 3

# ground truth: S-sparse x, length-L filter h, output y = H x
(x,), h = draw_instance(spec.n, S, L, rng)
y = bg.apply_filter(spec, h, x)
print("true support:", np.flatnonzero(x))
print("true filter :", np.round(h, 4))

# the bilinear model is linear in Z = x h^T once lifted
basis = bg.build_filter_basis(spec, L)
op = bg.build_lifting(spec, basis)
y_hat = bg.gft(spec, y)
for solve in (bg.solve_l1, bg.solve_nuclear_l21, bg.solve_reweighted):
    sol = solve(op, y_hat)
    print(f"{solve.__name__:18s} rmse {bg.rmse(sol.x_hat, sol.h_hat, x, h):.2e}  status {sol.status}")

sol = bg.solve_reweighted(op, y_hat)
# x and h are recovered up to a common scale
scale = h[0] / sol.h_hat[0]
print("estimated support:", np.flatnonzero(np.abs(sol.x_hat) > 1e-6 * np.abs(sol.x_hat).max()))
print("estimated filter :", np.round(sol.h_hat * scale, 4))
