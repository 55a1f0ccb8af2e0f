"""Locate the sources of an SIS outbreak from final-time infection frequencies.

Run: python3 demos/epidemic.py
"""

import numpy as np

from blindgraph.experiments import draw_model, draw_prior, gen_graph, localize_sources, sis_simulate
from blindgraph.experiments.epidemic import score_support

rng = np.random.default_rng(11)
karate = gen_graph("karate", rng)
model = draw_model(karate, rng, T=3, W=500)
print("sources       :", model.sources, "p0 =", np.round(model.p0[model.sources], 3))
print("activity level:", np.round(model.upsilon, 3))

outbreaks = sis_simulate(model, rng)
order = rng.permutation(karate.n_nodes)
prior = draw_prior(model, 2 * model.S, rng)
for n_obs in (16, 24, 34):
    p_hat, err, sol = localize_sources(model, outbreaks, order[:n_obs])
    err_prior = score_support(p_hat, model.sources, model.S, prior)
    top = np.argsort(-np.abs(p_hat))[:model.S]
    print(f"{n_obs:2d} observed: estimate {np.sort(top)}, error {err:.2f}, with a 2S prior {err_prior:.2f}")
