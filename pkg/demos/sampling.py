"""Recovery from a subset of node observations, against the LS and AM baselines.

Run: python3 demos/sampling.py
"""

import numpy as np

import blindgraph as bg
from blindgraph.experiments import draw_instance, gen_graph

rng = np.random.default_rng(3)
g = gen_graph("er", rng, connected=True, n=66, p=0.2)
spec = bg.build_shift(g)
S, L = 3, 3
(x,), h = draw_instance(spec.n, S, L, rng)
basis = bg.build_filter_basis(spec, L)

print(" obs  proposed        ls        am")
for n_obs in (40, 50, 60, 66):
    obs = np.sort(rng.choice(spec.n, n_obs, replace=False))
    op = bg.build_lifting(spec, basis, obs, sampling="vertex")
    y = bg.apply_filter(spec, h, x)[obs]
    errs = [bg.rmse(s.x_hat, s.h_hat, x, h)
            for s in (bg.solve_reweighted(op, y), bg.baseline_ls(op, y), bg.baseline_am(op, y, S))]
    print(f"{n_obs:4d}" + "".join(f"{e:10.3g}" for e in errs))

# relative noise; the ball radius is the known noise energy
sigma = 0.01
op = bg.build_lifting(spec, basis, np.arange(spec.n), sampling="vertex")
y = bg.apply_filter(spec, h, x)
y_noisy = y + sigma * y * rng.standard_normal(y.shape)
cfg = bg.SolverConfig(noise_eps=sigma * np.linalg.norm(y_noisy))
sol = bg.solve_noisy(op, y_noisy, cfg)
print(f"noisy, sigma={sigma}: rmse {bg.rmse(sol.x_hat, sol.h_hat, x, h):.3g}")
