"""Sweep drivers. Every trial is a pure function of the master seed and
its cell coordinates, so cells can be reordered or run in isolation."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace

import numpy as np

from ..errors import BlindGraphError
from ..lifting import build_lifting
from ..solvers import (SUCCESS_RMSE, MultiOutputProblem, baseline_am, baseline_ls, rmse, solve_l1,
                       solve_multi, solve_noisy, solve_nuclear_l21, solve_reweighted)
from ..spectral import build_filter_basis, build_shift
from ..theory import rho
from . import svg
from .epidemic import draw_model, draw_prior, localize_sources, score_support, sis_simulate
from .graphs import gen_graph
from .outputs import ExperimentResult
from .protocol import ExperimentSpec, TrialRecord, draw_instance, trial_seed

log = logging.getLogger(__name__)

SOLVER_ALIASES = {"n21": "nuclear_l21", "rw": "reweighted", "rwP": "reweighted_multi"}
PHASE_SOLVERS = ("l1", "nuclear_l21", "reweighted", "reweighted_multi")
SWEEP_SOLVERS = ("proposed", "proposed_known_support", "ls", "am", "proposed_noisy", "known_support_noisy")

# stream tags keep the seeds of different experiment kinds apart
_PHASE, _SWEEP, _RHO, _EPI = 1, 2, 3, 4


def canonical_solver(name: str) -> str:
    return SOLVER_ALIASES.get(name, name)


@dataclass
class PhaseDiagram:
    solver: str
    P: int
    S_values: list
    L_values: list
    rates: np.ndarray

    def rate(self, S, L) -> float:
        return float(self.rates[self.S_values.index(S), self.L_values.index(L)])


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def _safe(fn):
    """Run a solver; solver failures become an infinite-RMSE record."""
    try:
        return fn(), None
    except (BlindGraphError, ValueError, np.linalg.LinAlgError) as exc:
        log.warning("solver failed: %s", exc)
        return None, type(exc).__name__


def _graph(spec: ExperimentSpec, rng):
    params = dict(spec.graph.params)
    return gen_graph(spec.graph.kind, rng, connected=spec.connected, **params)


# ----------------------------------------------------------------------------
# phase diagrams


def _phase_trial(spec, S, L, tr, Pmax, solvers):
    seed = trial_seed(spec.seed, _PHASE, S, L, tr)
    rng = np.random.default_rng(seed)
    g = _graph(spec, rng)
    sp = build_shift(g)
    N = sp.n
    xs, h = draw_instance(N, S, L, rng, P=Pmax)
    basis = build_filter_basis(sp, L)
    op = build_lifting(sp, basis)
    ys = [op.forward(np.outer(x, h)) for x in xs]
    cfg = spec.solver_config
    out = []
    for name, P in solvers:
        if name == "reweighted_multi":
            prob = MultiOutputProblem([y for y in ys[:P]])
            res, dt = _timed(lambda: _safe(lambda: solve_multi(op, prob, cfg)))
            (sols, status) = res
            if sols is None:
                err, st = np.inf, status
            else:
                sl, hh = sols
                # the worst output decides success
                err = max(rmse(s.x_hat, hh, xs[p], h) for p, s in enumerate(sl))
                st = sl[0].status
        else:
            fn = {"l1": solve_l1, "nuclear_l21": solve_nuclear_l21, "reweighted": solve_reweighted}[name]
            (sol, status), dt = _timed(lambda: _safe(lambda: fn(op, ys[0], cfg)))
            err, st = (np.inf, status) if sol is None else (rmse(sol.x_hat, sol.h_hat, xs[0], h), sol.status)
        out.append(TrialRecord(S, L, P, N, tr, tr, name, float(err), st, seed, dt))
    return out


def _phase_solvers(spec):
    res = []
    for s in spec.solvers:
        s = canonical_solver(s)
        if s not in PHASE_SOLVERS:
            raise ValueError(f"unknown phase solver {s!r}")
        if s == "reweighted_multi":
            for P in spec.P_values:
                res.append((s, int(P)))
        else:
            res.append((s, 1))
    return res


def run_phase_diagram(spec: ExperimentSpec) -> ExperimentResult:
    """Success-rate grids over ``(S, L)`` for each requested solver.

    Each trial draws a fresh graph and instance from its own seed; all
    solvers see the same draw, so rates are paired across solvers.
    """
    solvers = _phase_solvers(spec)
    Pmax = max(P for _, P in solvers)
    records = []
    for S in spec.S_values:
        for L in spec.L_values:
            for tr in range(spec.trials):
                records.extend(_phase_trial(spec, int(S), int(L), tr, Pmax, solvers))
    diagrams = phase_diagrams(records, spec.S_values, spec.L_values)
    summary = {"success_rate": {f"{d.solver}_P{d.P}": d.rates for d in diagrams.values()},
               "S_values": list(spec.S_values), "L_values": list(spec.L_values), "trials": spec.trials}
    figs = {f"phase_{d.solver}_P{d.P}.svg": svg.heatmap(d.rates, spec.S_values, spec.L_values,
                                                          f"{d.solver} P={d.P} success rate", "S", "L")
            for d in diagrams.values()}
    res = ExperimentResult("phase", records, summary, figs)
    res.diagrams = diagrams
    return res


def phase_diagrams(records, S_values, L_values) -> dict:
    out = {}
    keys = sorted({(r.solver, r.P) for r in records})
    for solver, P in keys:
        R = np.full((len(S_values), len(L_values)), np.nan)
        for i, S in enumerate(S_values):
            for j, L in enumerate(L_values):
                cell = [r.success for r in records if r.solver == solver and r.P == P and r.S == S and r.L == L]
                if cell:
                    R[i, j] = np.mean(cell)
        out[(solver, P)] = PhaseDiagram(solver, P, list(S_values), list(L_values), R)
    return out


# ----------------------------------------------------------------------------
# observation-count sweep


def _noisy(y, sigma, rng):
    return y + sigma * y * rng.standard_normal(y.shape)


def _sweep_trial(spec, nobs, tr, solvers, S, L, sigma):
    seed = trial_seed(spec.seed, _SWEEP, nobs, tr)
    rng = np.random.default_rng(seed)
    g = _graph(spec, rng)
    sp = build_shift(g)
    N = sp.n
    xs, h = draw_instance(N, S, L, rng)
    x = xs[0]
    obs = np.sort(rng.choice(N, size=nobs, replace=False))
    noise_rng = np.random.default_rng(trial_seed(spec.seed, _SWEEP, nobs, tr, 1))
    basis = build_filter_basis(sp, L)
    op = build_lifting(sp, basis, obs, sampling="vertex")
    y = op.forward(np.outer(x, h)).real
    y_noisy = _noisy(y, sigma, noise_rng)
    cfg = spec.solver_config
    # ball radius from the known relative noise level
    ncfg = replace(cfg, noise_eps=max(sigma * float(np.linalg.norm(y_noisy)), 1e-12))
    supp = np.flatnonzero(x)
    fns = {
        "proposed": lambda: solve_reweighted(op, y, cfg),
        "proposed_known_support": lambda: solve_reweighted(op, y, cfg, support=supp),
        "ls": lambda: baseline_ls(op, y),
        "am": lambda: baseline_am(op, y, S, cfg),
        "proposed_noisy": lambda: solve_noisy(op, y_noisy, ncfg),
        "known_support_noisy": lambda: solve_noisy(op, y_noisy, ncfg, support=supp),
    }
    out = []
    for name in solvers:
        (sol, status), dt = _timed(lambda: _safe(fns[name]))
        err, st = (np.inf, status) if sol is None else (rmse(sol.x_hat, sol.h_hat, x, h), sol.status)
        out.append(TrialRecord(S, L, 1, nobs, tr, tr, name, float(err), st, seed, dt))
    return out


def run_sampling_sweep(spec: ExperimentSpec) -> ExperimentResult:
    """Median RMSE against the number of observed nodes.

    ``options`` may set ``S``, ``L`` (both default 3) and ``sigma`` (0.01),
    the relative noise level of the noisy variants.
    """
    S = int(spec.options.get("S", 3))
    L = int(spec.options.get("L", 3))
    sigma = float(spec.options.get("sigma", 0.01))
    solvers = [canonical_solver(s) for s in spec.solvers]
    for s in solvers:
        if s not in SWEEP_SOLVERS:
            raise ValueError(f"unknown sweep solver {s!r}")
    counts = [int(c) for c in spec.observed_counts]
    if not counts:
        raise ValueError("observed_counts is empty")
    records = []
    for nobs in counts:
        for tr in range(spec.trials):
            records.extend(_sweep_trial(spec, nobs, tr, solvers, S, L, sigma))
    medians = sweep_medians(records, counts, solvers)
    summary = {"median_rmse": medians, "observed_counts": counts, "S": S, "L": L, "sigma": sigma}
    series = {s: (counts, medians[s]) for s in solvers}
    figs = {"sweep_median_rmse.svg": svg.line_plot(series, "median RMSE", "observed nodes", "RMSE",
                                                   dashed=("proposed_noisy", "known_support_noisy"))}
    return ExperimentResult("sampling_sweep", records, summary, figs)


def sweep_medians(records, counts, solvers) -> dict:
    return {s: [float(np.median([r.rmse for r in records if r.solver == s and r.observed == c]))
                for c in counts] for s in solvers}


# ----------------------------------------------------------------------------
# coherence correlation


def run_rho_correlation(spec: ExperimentSpec) -> ExperimentResult:
    """Recovery quality of one solver split by the median of ``rho_U(K)``.

    ``options``: ``n_graphs`` (30), ``p_range`` ([0.05, 0.15]), ``n`` (50),
    ``S``/``L`` (3), ``K`` (defaults to ``S``). The graph edge probability
    is drawn per graph from ``p_range``.
    """
    o = spec.options
    n_graphs = int(o.get("n_graphs", 30))
    lo, hi = o.get("p_range", (0.05, 0.15))
    n = int(o.get("n", 50))
    S, L = int(o.get("S", 3)), int(o.get("L", 3))
    K = int(o.get("K", S))
    solver = canonical_solver(spec.solvers[0] if spec.solvers else "l1")
    fn = {"l1": solve_l1, "nuclear_l21": solve_nuclear_l21, "reweighted": solve_reweighted}.get(solver)
    if fn is None:
        raise ValueError(f"unknown solver {solver!r} for the coherence study")
    records, per_graph = [], []
    for gi in range(n_graphs):
        grng = np.random.default_rng(trial_seed(spec.seed, _RHO, gi))
        p = float(grng.uniform(lo, hi))
        g = gen_graph("er", grng, connected=spec.connected, n=n, p=p)
        sp = build_shift(g)
        r_u = rho(np.sqrt(n) * sp.u_analysis, K)
        basis = build_filter_basis(sp, L)
        op = build_lifting(sp, basis)
        errs = []
        for tr in range(spec.trials):
            seed = trial_seed(spec.seed, _RHO, gi, tr)
            rng = np.random.default_rng(seed)
            xs, h = draw_instance(n, S, L, rng)
            y = op.forward(np.outer(xs[0], h))
            (sol, status), dt = _timed(lambda: _safe(lambda: fn(op, y, spec.solver_config)))
            err, st = (np.inf, status) if sol is None else (rmse(sol.x_hat, sol.h_hat, xs[0], h), sol.status)
            errs.append(err)
            records.append(TrialRecord(S, L, 1, n, gi, tr, solver, float(err), st, seed, dt,
                                       {"rho_u": r_u, "p": p}))
        errs = np.array(errs)
        per_graph.append({"graph_id": gi, "p": p, "rho_u": r_u, "failure_rate": float(np.mean(errs >= SUCCESS_RMSE)),
                          "mean_rmse": float(np.mean(errs))})
    split = rho_split(per_graph)
    summary = {"graphs": per_graph, "split": split, "K": K, "S": S, "L": L, "solver": solver}
    xs_ = [g["rho_u"] for g in sorted(per_graph, key=lambda d: d["rho_u"])]
    figs = {"rho_correlation.svg": svg.line_plot(
        {"failure rate": (xs_, [g["failure_rate"] for g in sorted(per_graph, key=lambda d: d["rho_u"])]),
         "mean RMSE": (xs_, [g["mean_rmse"] for g in sorted(per_graph, key=lambda d: d["rho_u"])])},
        f"{solver} recovery against rho_U({K})", f"rho_U({K})", "")}
    return ExperimentResult("rho_correlation", records, summary, figs)


def rho_split(per_graph) -> dict:
    """Group means below and above the median coherence (ties go low)."""
    r = np.array([g["rho_u"] for g in per_graph])
    med = float(np.median(r))
    low = [g for g in per_graph if g["rho_u"] <= med]
    high = [g for g in per_graph if g["rho_u"] > med]

    def mean(gs, key):
        return float(np.mean([g[key] for g in gs])) if gs else float("nan")

    return {"median_rho": med, "n_low": len(low), "n_high": len(high),
            "low_failure": mean(low, "failure_rate"), "high_failure": mean(high, "failure_rate"),
            "low_rmse": mean(low, "mean_rmse"), "high_rmse": mean(high, "mean_rmse")}


# ----------------------------------------------------------------------------
# epidemic source localization


def _prior_size(label, N, S) -> int:
    if label == "N":
        return N
    if label == "N/2":
        return N // 2
    if label == "2S":
        return 2 * S
    return int(label)


def run_epidemic(spec: ExperimentSpec) -> ExperimentResult:
    """Localization error against observed-node count, per prior size.

    Each realization draws one source vector, schedule and outbreak set,
    shared by every observation count and prior. Observed sets are nested
    prefixes of one random node order and priors are nested too, so each
    observation set needs a single solve. ``options``: ``T`` (3), ``W`` (500),
    ``omega``, ``beta``, ``Q`` (labels among ``N``, ``N/2``, ``2S`` or
    integers), ``S_choices``, ``p_range``, ``ups_range``.
    """
    o = spec.options
    T, W = int(o.get("T", 3)), int(o.get("W", 500))
    kw = {k: o[k] for k in ("omega", "beta") if k in o}
    for k in ("S_choices", "p_range", "ups_range"):
        if k in o:
            kw[k] = tuple(o[k])
    Qs = [str(q) for q in o.get("Q", ["N", "N/2", "2S"])]
    g = gen_graph(spec.graph.kind, spec.seed, **spec.graph.params)
    N = g.n_nodes
    counts = [int(c) for c in (spec.observed_counts or [N])]
    records = []
    for r in range(spec.trials):
        seed = trial_seed(spec.seed, _EPI, r)
        rng = np.random.default_rng(seed)
        model = draw_model(g, rng, T=T, W=W, **kw)
        outbreaks = sis_simulate(model, rng)
        order = rng.permutation(N)
        others = rng.permutation(np.setdiff1d(np.arange(N), model.sources))
        priors = {q: draw_prior(model, min(N, _prior_size(q, N, model.S)), rng, others) for q in Qs}
        for nobs in counts:
            # one solve per observation set; priors only filter the candidates
            res, dt = _timed(lambda: _safe(lambda: localize_sources(model, outbreaks, order[:nobs], None,
                                                                    spec.solver_config)))
            out, status = res
            for q in Qs:
                if out is None:
                    err, st, rm = 1.0, status, np.inf
                else:
                    p_hat, _, sol = out
                    err = score_support(p_hat, model.sources, model.S, priors[q])
                    st = sol.status
                    rm = rmse(sol.x_hat, sol.h_hat, model.p0, model.filter_taps())
                records.append(TrialRecord(model.S, T + 1, 1, nobs, 0, r, "reweighted", float(rm), st, seed, dt,
                                           {"Q": q, "loc_error": float(err),
                                            "upsilon": " ".join(f"{u:.6f}" for u in model.upsilon),
                                            "rejected": int(model.meta.get("rejected", 0))}))
    means = epidemic_means(records, counts, Qs)
    summary = {"mean_error": means, "observed_counts": counts, "Q": Qs, "T": T, "W": W, **kw}
    series = {f"Q={q}": (counts, means[q]) for q in Qs}
    figs = {"epidemic_error.svg": svg.line_plot(series, "source localization error", "observed nodes", "error")}
    return ExperimentResult("epidemic", records, summary, figs)


def epidemic_means(records, counts, Qs) -> dict:
    return {q: [float(np.mean([r.extra["loc_error"] for r in records if r.observed == c and r.extra["Q"] == q]))
                for c in counts] for q in Qs}


RUNNERS = {"phase": run_phase_diagram, "sampling_sweep": run_sampling_sweep,
           "rho_correlation": run_rho_correlation, "epidemic": run_epidemic}


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    if spec.kind not in RUNNERS:
        raise ValueError(f"no runner for experiment kind {spec.kind!r}")
    return RUNNERS[spec.kind](spec)
