"""SIS outbreaks on a graph and blind localization of their sources."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..graph import Graph
from ..lifting import build_lifting
from ..solvers import SolverConfig, solve_reweighted
from ..spectral import build_filter_basis, build_shift

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EpidemicModel:
    """SIS process with a time-varying activity level.

    At step ``t`` infected nodes heal with probability ``upsilon[t] * omega``
    and a susceptible node with ``m`` infected neighbours catches the
    infection with probability ``min(1, upsilon[t] * beta * m)``.
    """

    graph: Graph
    omega: float
    beta: float
    upsilon: np.ndarray
    p0: np.ndarray
    W: int = 500
    Q: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.graph.directed:
            raise ValueError("epidemic graph must be undirected")
        if not 0 < self.omega < 1 or not 0 <= self.beta < 1:
            raise ValueError("need omega in (0, 1) and beta in [0, 1)")
        ups = np.asarray(self.upsilon, dtype=float)
        if ups.ndim != 1 or ups.size < 1 or np.any(ups < 0):
            raise ValueError("upsilon must be a nonempty nonnegative schedule")
        if np.any(ups * self.omega > 1):
            raise ValueError("upsilon * omega exceeds 1")
        p0 = np.asarray(self.p0, dtype=float)
        if p0.shape != (self.graph.n_nodes,) or np.any(p0 < 0) or np.any(p0 > 1):
            raise ValueError("p0 must be a probability vector over the nodes")
        if not np.any(p0 > 0):
            raise ValueError("p0 has no possible source")
        if self.W < 1:
            raise ValueError("W must be positive")
        if self.Q is not None and not self.S <= self.Q <= self.graph.n_nodes:
            raise ValueError("need S <= Q <= N")
        object.__setattr__(self, "upsilon", ups)
        object.__setattr__(self, "p0", p0)

    @property
    def T(self) -> int:
        return self.upsilon.size

    @property
    def S(self) -> int:
        return int(np.count_nonzero(self.p0))

    @property
    def sources(self) -> np.ndarray:
        return np.flatnonzero(self.p0)

    def shift_matrix(self) -> np.ndarray:
        return self.omega * np.eye(self.graph.n_nodes) - self.beta * self.graph.adjacency()

    def filter_taps(self) -> np.ndarray:
        """Coefficients of ``prod_t (1 - upsilon_t s)`` in increasing powers of ``s``."""
        c = np.array([1.0])
        for u in self.upsilon:
            c = np.convolve(c, [1.0, -u])
        return c

    def mean_field(self) -> list:
        """Linearized infection probabilities ``p_t = (I - upsilon_t S) p_{t-1}``."""
        S = self.shift_matrix()
        out = [self.p0.copy()]
        for u in self.upsilon:
            out.append(out[-1] - u * (S @ out[-1]))
        return out


def sis_simulate(model: EpidemicModel, seed=None) -> list:
    """``W`` boolean state matrices of shape ``(N, T + 1)``.

    Initial infections are independent Bernoulli draws from ``p0``; an
    empty draw is rejected and redrawn.
    """
    rng = np.random.default_rng(seed)
    A = model.graph.adjacency() != 0
    N = model.graph.n_nodes
    outbreaks = []
    rejected = 0
    for _ in range(model.W):
        while True:
            state = rng.random(N) < model.p0
            if state.any():
                break
            rejected += 1
        hist = np.zeros((N, model.T + 1), dtype=bool)
        hist[:, 0] = state
        for t, u in enumerate(model.upsilon):
            m = A.astype(int) @ state.astype(int)
            heal = rng.random(N) < u * model.omega
            catch = rng.random(N) < np.minimum(1.0, u * model.beta * m)
            state = np.where(state, ~heal, catch)
            hist[:, t + 1] = state
        outbreaks.append(hist)
    if rejected:
        log.info("rejected %d empty initial draws", rejected)
    model.meta["rejected"] = model.meta.get("rejected", 0) + rejected
    return outbreaks


def score_support(p_hat, sources, S: int, candidates=None) -> float:
    """Fraction of ``sources`` missing from the ``S`` largest ``|p_hat|`` entries
    among ``candidates`` (all nodes by default). Ties go to the lower index."""
    p_hat = np.asarray(p_hat)
    cand = np.arange(p_hat.size) if candidates is None else np.sort(np.asarray(candidates, dtype=int))
    order = cand[np.lexsort((cand, -np.abs(p_hat[cand])))]
    est = set(order[:S].tolist())
    return len(set(np.asarray(sources).tolist()) - est) / S


def localize_sources(model: EpidemicModel, outbreaks, observed, prior=None, cfg: SolverConfig | None = None,
                     restrict: bool = False):
    """Estimate the source probabilities and score the recovered support.

    Returns ``(p0_hat, error, solution)``. ``prior`` is a candidate source
    set: the support estimate is the ``S`` largest entries of ``p0_hat``
    within it. With ``restrict=True`` the prior also pins the rows of the
    lifted matrix outside it to zero.
    """
    observed = np.sort(np.asarray(observed, dtype=int))
    if observed.size < 1:
        raise ValueError("at least one node must be observed")
    final = np.mean([o[:, -1] for o in outbreaks], axis=0)
    spec = build_shift(model.graph, "custom", matrix=model.shift_matrix())
    basis = build_filter_basis(spec, model.T + 1)
    op = build_lifting(spec, basis, observed, sampling="vertex")
    support = None if prior is None else np.sort(np.asarray(prior, dtype=int))
    sol = solve_reweighted(op, final[observed].astype(float), cfg, support=support if restrict else None)
    p_hat = sol.x_hat
    # the rank-one sign convention is arbitrary; probabilities are nonnegative
    if np.sum(p_hat) < 0:
        p_hat = -p_hat
    return p_hat, score_support(p_hat, model.sources, model.S, support), sol


def draw_model(graph: Graph, rng, T: int = 3, W: int = 500, omega: float = 0.05, beta: float = 0.1,
               S_choices=(3, 4, 5), p_range=(0.05, 0.2), ups_range=(0.5, 1.5)) -> EpidemicModel:
    N = graph.n_nodes
    S = int(rng.choice(S_choices))
    p0 = np.zeros(N)
    p0[rng.choice(N, S, replace=False)] = rng.uniform(*p_range, size=S)
    ups = rng.uniform(*ups_range, size=T)
    return EpidemicModel(graph, omega, beta, ups, p0, W)


def draw_prior(model: EpidemicModel, Q: int, rng, order=None) -> np.ndarray:
    """``Q`` candidate sources: the true ones plus others taken from ``order``
    (a random permutation of the non-sources when omitted). A shared
    ``order`` makes priors of different sizes nested."""
    N = model.graph.n_nodes
    src = model.sources
    if not src.size <= Q <= N:
        raise ValueError(f"prior size {Q} must lie in [{src.size}, {N}]")
    if order is None:
        order = rng.permutation(np.setdiff1d(np.arange(N), src))
    return np.sort(np.concatenate([src, np.asarray(order[:Q - src.size], dtype=int)]))
