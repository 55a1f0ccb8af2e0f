"""Convex and baseline solvers for the lifted blind identification problem.

All convex programs are solved over real ``Z`` with ADMM. The equality
constraint ``M vec(Z) = y`` is enforced by exact affine projection; the
noisy variant splits off ``r = M vec(Z)`` and projects ``r`` on a ball.
Each nonsmooth penalty gets its own consensus copy of ``Z`` so every
proximal step is closed form.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import prox
from .errors import DegenerateIterate, DimensionMismatch, ZeroMatrix
from .lifting import LiftedOperator, real_split

log = logging.getLogger(__name__)

SUCCESS_RMSE = 0.01


@dataclass(frozen=True)
class SolverConfig:
    tau: float = 1.0
    delta: float | None = None
    reweight_iters: int = 3
    admm_penalty: float = 1.0
    max_iters: int = 3000
    tol_primal: float = 1e-7
    tol_dual: float = 1e-7
    noise_eps: float | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.delta is not None and self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.reweight_iters < 0:
            raise ValueError("reweight_iters must be non-negative")
        if self.admm_penalty <= 0 or self.tol_primal <= 0 or self.tol_dual <= 0:
            raise ValueError("penalty and tolerances must be positive")
        if self.noise_eps is not None and self.noise_eps < 0:
            raise ValueError("noise_eps must be non-negative")

    def resolved_delta(self, y, N: int) -> float:
        if self.delta is not None:
            return self.delta
        d = 1e-3 * np.linalg.norm(y) / np.sqrt(N)
        return float(d) if d > 0 else 1e-12


@dataclass
class LiftedSolution:
    Z: np.ndarray
    x_hat: np.ndarray
    h_hat: np.ndarray
    objective: float
    primal_residual: float
    dual_residual: float
    iters: int
    status: str
    singular_values: np.ndarray
    feasibility: float = 0.0
    info: dict = field(default_factory=dict)

    def to_dict(self, seed=None) -> dict:
        return {
            "Z": self.Z.tolist(),
            "x_hat": self.x_hat.tolist(),
            "h_hat": self.h_hat.tolist(),
            "objective": self.objective,
            "residuals": {"primal": self.primal_residual, "dual": self.dual_residual,
                          "feasibility": self.feasibility},
            "iters": self.iters,
            "status": self.status,
            "seed": seed,
        }

    def to_json(self, seed=None) -> str:
        return json.dumps(self.to_dict(seed), indent=2)


@dataclass
class MultiOutputProblem:
    outputs: list
    shared_support: bool = True
    taus: list | None = None

    def __post_init__(self):
        if len(self.outputs) < 1:
            raise ValueError("need at least one output signal")
        n = len(self.outputs[0])
        if any(len(y) != n for y in self.outputs):
            raise DimensionMismatch("all outputs must have the same length")
        if self.taus is not None and len(self.taus) != len(self.outputs):
            raise DimensionMismatch("one tau per output is required")

    @property
    def P(self) -> int:
        return len(self.outputs)


# ----------------------------------------------------------------------------
# rank-one extraction and error metric


def extract_rank_one(Z):
    """Top singular pair of ``Z`` as ``(x, h)`` with ``||h|| = 1``.

    The sign is fixed so the first non-negligible entry of ``h`` is positive;
    ``outer(x, h)`` is the best rank-one approximation of ``Z``.
    """
    Z = np.asarray(Z, dtype=float)
    if not np.any(Z):
        raise ZeroMatrix("cannot factor an all-zero matrix")
    u, s, vt = np.linalg.svd(Z, full_matrices=False)
    x, h = u[:, 0] * s[0], vt[0].copy()
    nz = np.flatnonzero(np.abs(h) > 1e-12 * np.abs(h).max())
    if h[nz[0]] < 0:
        x, h = -x, -h
    return x, h


def rmse(x_hat, h_hat, x0, h0) -> float:
    """Frobenius distance between the outer products; blind to rescaling."""
    x_hat, h_hat = np.ravel(x_hat), np.ravel(h_hat)
    x0, h0 = np.ravel(x0), np.ravel(h0)
    if x_hat.shape != x0.shape or h_hat.shape != h0.shape:
        raise DimensionMismatch("estimate and truth shapes differ")
    return float(np.linalg.norm(np.outer(x_hat, h_hat) - np.outer(x0, h0)))


# ----------------------------------------------------------------------------
# ADMM machinery


class _Factor:
    """Thin SVD of a real-split operator, shared by every output using it."""

    def __init__(self, op: LiftedOperator):
        A = real_split(op, np.zeros(op.n_obs)).a_real
        Us, s, Vt = np.linalg.svd(A, full_matrices=False)
        r = int(np.sum(s > 1e-10 * max(s[0], 1e-300))) if s.size else 0
        self.A = A
        self.Q = Vt[:r].T
        self.Us, self.s = Us[:, :r], s[:r]


class _Constraints:
    """Per-output constraints ``A_p vec(Z_p) = b_p`` (or a ball around ``b_p``)."""

    def __init__(self, ops, ys, eps: float | None):
        shared = all(o is ops[0] for o in ops)
        factors = [_Factor(ops[0])] * len(ops) if shared else [_Factor(o) for o in ops]
        self.shared = shared
        self.factors = factors
        self.B = np.stack([np.concatenate([np.real(y), np.imag(y)]).astype(float) for y in ys])
        self.Zls = np.stack([f.Q @ ((f.Us.T @ b) / f.s) for f, b in zip(factors, self.B)])
        self.ls_residuals = np.linalg.norm(self.apply(self.Zls) - self.B, axis=1)
        self.eps = eps

    @property
    def n(self) -> int:
        return self.factors[0].A.shape[1]

    def apply(self, X):
        if self.shared:
            return X @ self.factors[0].A.T
        return np.stack([f.A @ x for f, x in zip(self.factors, X)])

    def apply_t(self, R):
        if self.shared:
            return R @ self.factors[0].A
        return np.stack([f.A.T @ r for f, r in zip(self.factors, R)])

    def project(self, X):
        if self.shared:
            Q = self.factors[0].Q
            return self.Zls + X - (X @ Q) @ Q.T
        return np.stack([zl + x - f.Q @ (f.Q.T @ x) for f, zl, x in zip(self.factors, self.Zls, X)])

    def solve_shifted(self, R, k: float):
        # (k I + A^T A)^{-1} via the thin SVD of A
        out = []
        for f, rhs in zip(self.factors, R):
            c = f.Q.T @ rhs
            out.append((rhs - f.Q @ (c * (f.s ** 2 / (k + f.s ** 2)))) / k)
        return np.stack(out)

    def residuals(self, X):
        return np.linalg.norm(self.apply(X) - self.B, axis=1)


def _sq(a) -> float:
    a = a.ravel()
    return float(a @ a)


def _to_mats(X, N, L):
    # X[p] = vec(Z_p), column-major -> Z_p = X[p].reshape(L, N).T
    return X.reshape(X.shape[0], L, N).transpose(0, 2, 1)


def _to_vecs(Zs):
    return Zs.transpose(0, 2, 1).reshape(Zs.shape[0], -1)


class _Penalty:
    def __init__(self, kind, N, L, weight=1.0):
        self.kind, self.N, self.L = kind, N, L
        self.weight = weight

    def prox(self, X, t):
        N, L = self.N, self.L
        if self.kind == "l1":
            return prox.soft_threshold(X, t * self.weight)
        Zs = _to_mats(X, N, L)
        if self.kind == "nuclear":
            P = Zs.shape[0]
            W = prox.singular_value_threshold(Zs.reshape(P * N, L), t * self.weight)
            return _to_vecs(W.reshape(P, N, L))
        if self.kind == "l21_shared":
            # rows of the horizontal stack [Z_1, ..., Z_P]
            H = Zs.transpose(1, 0, 2).reshape(N, -1)
            H = prox.row_shrink(H, t * np.asarray(self.weight))
            return _to_vecs(H.reshape(N, Zs.shape[0], L).transpose(1, 0, 2))
        if self.kind == "l21_blocks":
            return _to_vecs(prox.row_shrink(Zs, t * np.asarray(self.weight)))
        raise ValueError(self.kind)

    def value(self, X) -> float:
        N, L = self.N, self.L
        if self.kind == "l1":
            return float(self.weight * np.sum(np.abs(X)))
        Zs = _to_mats(X, N, L)
        if self.kind == "nuclear":
            return self.weight * prox.nuclear_norm(Zs.reshape(-1, L))
        if self.kind == "l21_shared":
            H = Zs.transpose(1, 0, 2).reshape(N, -1)
            return prox.l21_norm(H, self.weight)
        return prox.l21_norm(Zs, self.weight)


@dataclass
class _State:
    z: np.ndarray
    W: list
    Y: list
    rho: float
    r: np.ndarray | None = None
    Yr: np.ndarray | None = None


def _admm(cons: _Constraints, penalties: list, cfg: SolverConfig, state: _State | None = None,
          history: list | None = None):
    k = len(penalties)
    ball = cfg.noise_eps is not None
    if state is None:
        z = cons.Zls.copy()
        state = _State(z, [z.copy() for _ in range(k)], [np.zeros_like(z) for _ in range(k)], cfg.admm_penalty)
        if ball:
            state.r = cons.apply(z)
            state.Yr = np.zeros_like(state.r)
    z, W, Y, rho = state.z, list(state.W), list(state.Y), state.rho
    r, Yr = state.r, state.Yr
    status = "max_iters"
    pres = dres = np.inf
    it = 0
    for it in range(1, cfg.max_iters + 1):
        acc = W[0] - Y[0]
        for j in range(1, k):
            acc = acc + W[j] - Y[j]
        if not ball:
            z = cons.project(acc / k)
        else:
            z = cons.solve_shifted(acc + cons.apply_t(r - Yr), k)
        W_old = W
        W = [pen.prox(z + Yj, 1.0 / rho) for pen, Yj in zip(penalties, Y)]
        sq_p = sq_d = 0.0
        for j in range(k):
            d = z - W[j]
            Y[j] = Y[j] + d
            sq_p += _sq(d)
            sq_d += _sq(W[j] - W_old[j])
        if ball:
            Az = cons.apply(z)
            r_old = r
            r = np.stack([prox.project_ball(a + yp, b, cons.eps) for a, yp, b in zip(Az, Yr, cons.B)])
            Yr = Yr + Az - r
            sq_p += _sq(Az - r)
            sq_d += _sq(r - r_old)
        pres = np.sqrt(sq_p)
        dres = rho * np.sqrt(sq_d)
        if history is not None:
            history.append(sum(pen.value(z) for pen in penalties))
        zn = np.sqrt(max([_sq(z)] + [_sq(Wj) for Wj in W]))
        yn = rho * np.sqrt(sum(_sq(Yj) for Yj in Y) + (_sq(Yr) if ball else 0.0))
        if pres <= cfg.tol_primal * max(1.0, zn) and dres <= cfg.tol_dual * max(1.0, yn):
            status = "converged"
            break
        if it % 10 == 0:
            if pres > 10 * dres:
                rho *= 2.0
                Y = [Yj / 2.0 for Yj in Y]
                if ball:
                    Yr = Yr / 2.0
            elif dres > 10 * pres:
                rho /= 2.0
                Y = [Yj * 2.0 for Yj in Y]
                if ball:
                    Yr = Yr * 2.0
    return _State(z, W, Y, rho, r, Yr), it, status, float(pres), float(dres)


def _finish(cons: _Constraints, penalties, state, status, N, L, cfg, support_rows=None, N_full=None):
    z = state.z
    feas = cons.residuals(z)
    tol = 1e-6 * (1.0 + np.linalg.norm(cons.B, axis=1))
    if cfg.noise_eps is None:
        if np.any(feas > tol):
            status = "infeasible"
    elif np.any(cons.ls_residuals > cons.eps + tol):
        status = "infeasible"
    obj = float(sum(pen.value(z) for pen in penalties))
    Zs = _to_mats(z, N, L)
    if support_rows is not None:
        full = np.zeros((Zs.shape[0], N_full, L))
        full[:, support_rows] = Zs
        Zs = full
    return Zs, obj, float(np.linalg.norm(feas)), status


def _solution(Z, obj, pres, dres, it, status, feas, info=None) -> LiftedSolution:
    if np.any(Z):
        x, h = extract_rank_one(Z)
    else:
        x, h = np.zeros(Z.shape[0]), np.zeros(Z.shape[1])
    sv = np.linalg.svd(Z, compute_uv=False)
    return LiftedSolution(Z, x, h, obj, pres, dres, it, status, sv, feas, dict(info or {}))


def _prepare(op: LiftedOperator, y_obs, support, eps):
    y_obs = np.asarray(y_obs)
    if y_obs.shape != (op.n_obs,):
        raise DimensionMismatch(f"observation vector has shape {y_obs.shape}, expected {(op.n_obs,)}")
    if support is not None:
        support = np.unique(np.asarray(support, dtype=int))
        op = op.restrict_rows(support)
    return op, _Constraints([op], [y_obs], eps), support


def _single(op, y_obs, cfg, kinds_weights, support=None, state=None, history=None):
    N_full, L = op.N, op.L
    op_r, con, support = _prepare(op, y_obs, support, cfg.noise_eps)
    N = op_r.N
    pens = []
    for kind, w in kinds_weights:
        if support is not None and np.ndim(w):
            w = np.asarray(w)[support]
        pens.append(_Penalty(kind, N, L, w))
    state, it, status, pres, dres = _admm(con, pens, cfg, state, history)
    Zs, obj, feas, status = _finish(con, pens, state, status, N, L, cfg, support, N_full)
    return _solution(Zs[0], obj, pres, dres, it, status, feas), state


# ----------------------------------------------------------------------------
# public solvers


def solve_l1(op: LiftedOperator, y_obs, cfg: SolverConfig | None = None, support=None) -> LiftedSolution:
    """Minimize ``||Z||_1`` subject to ``M vec(Z) = y``."""
    cfg = cfg or SolverConfig()
    sol, _ = _single(op, y_obs, cfg, [("l1", 1.0)], support)
    return sol


def solve_nuclear_l21(op: LiftedOperator, y_obs, cfg: SolverConfig | None = None, support=None,
                      weights=None, history: list | None = None) -> LiftedSolution:
    """Minimize ``||Z||_* + sum_i w_i ||Z[i]||_2`` subject to the lifted equality.

    ``weights`` defaults to ``tau`` on every row. ``history`` collects the
    objective at every ADMM iterate when given.
    """
    cfg = cfg or SolverConfig()
    w = cfg.tau if weights is None else np.asarray(weights, dtype=float)
    sol, _ = _single(op, y_obs, cfg, [("nuclear", 1.0), ("l21_blocks", w)], support, history=history)
    return sol


def reweight(Z, tau: float, delta: float) -> np.ndarray:
    return tau / (np.linalg.norm(Z, axis=-1) + delta)


def solve_reweighted(op: LiftedOperator, y_obs, cfg: SolverConfig | None = None, support=None) -> LiftedSolution:
    """Iteratively reweighted nuclear plus row-sparsity minimization.

    Outer pass 0 uses uniform weights ``tau``; pass ``k`` uses
    ``tau / (||z_i(k-1)|| + delta)``. ADMM is warm-started across passes.
    """
    cfg = cfg or SolverConfig()
    if cfg.reweight_iters < 1:
        raise ValueError("solve_reweighted needs reweight_iters >= 1")
    delta = cfg.resolved_delta(y_obs, op.N)
    w = np.full(op.N, cfg.tau)
    state = None
    best = None
    total = 0
    trace = []
    for k in range(cfg.reweight_iters + 1):
        sol, state = _single(op, y_obs, cfg, [("nuclear", 1.0), ("l21_blocks", w)], support, state)
        total += sol.iters
        trace.append({"pass": k, "status": sol.status, "feasibility": sol.feasibility,
                      "active_rows": int(np.sum(np.linalg.norm(sol.Z, axis=1) > 1e-6))})
        # a pass that loses feasibility never replaces a feasible one
        if best is None or sol.status != "infeasible" or best.status == "infeasible":
            best = sol
        w = reweight(sol.Z, cfg.tau, delta)
    best.iters = total
    best.info["passes"] = trace
    return best


def solve_noisy(op: LiftedOperator, y_obs, cfg: SolverConfig | None = None, support=None,
                reweighted: bool = True) -> LiftedSolution:
    """Nuclear plus row-sparsity minimization with ``||y - M vec(Z)||_2 <= eps``.

    The ball lives in the domain the operator outputs: build the operator
    with ``sampling="vertex"`` to bound the node-domain residual.
    """
    cfg = cfg or SolverConfig()
    if cfg.noise_eps is None or cfg.noise_eps <= 0:
        raise ValueError("solve_noisy needs a positive noise_eps")
    delta = cfg.resolved_delta(y_obs, op.N)
    w = np.full(op.N, cfg.tau)
    passes = cfg.reweight_iters + 1 if reweighted else 1
    state, total = None, 0
    for _ in range(passes):
        sol, state = _single(op, y_obs, cfg, [("nuclear", 1.0), ("l21_blocks", w)], support, state)
        total += sol.iters
        w = reweight(sol.Z, cfg.tau, delta)
    sol.iters = total
    return sol


def solve_multi(ops, prob: MultiOutputProblem, cfg: SolverConfig | None = None, reweighted: bool | None = None):
    """Joint recovery of one filter from ``P`` outputs.

    Returns ``(solutions, h_hat)``: one ``LiftedSolution`` per output, each
    carrying its slice of the stacked input estimate, plus the shared
    filter estimate from the rank-one factor of the vertically stacked
    ``[Z_1; ...; Z_P]``. Reweighting (``cfg.reweight_iters`` passes when
    ``reweighted`` is left as None) acts on rows of ``[Z_1, ..., Z_P]`` with
    a shared support and on each ``Z_p`` otherwise.
    """
    cfg = cfg or SolverConfig()
    if isinstance(ops, LiftedOperator):
        ops = [ops] * prob.P
    if len(ops) != prob.P:
        raise DimensionMismatch("one operator per output is required")
    N, L = ops[0].N, ops[0].L
    if any(o.N != N or o.L != L for o in ops):
        raise DimensionMismatch("operators must share N and L")
    if reweighted is None:
        reweighted = cfg.reweight_iters > 0
    cons = _Constraints(ops, [np.asarray(y, dtype=complex) for y in prob.outputs], cfg.noise_eps)
    P = prob.P
    if prob.shared_support:
        w = np.full(N, cfg.tau)
        kind = "l21_shared"
    else:
        taus = np.asarray(prob.taus if prob.taus is not None else [cfg.tau] * P, dtype=float)
        w = np.repeat(taus[:, None], N, axis=1)
        kind = "l21_blocks"
        tau_col = taus[:, None]
    delta = cfg.resolved_delta(np.concatenate([np.asarray(y) for y in prob.outputs]), N * P)
    passes = cfg.reweight_iters + 1 if reweighted else 1
    state, total = None, 0
    for _ in range(passes):
        pens = [_Penalty("nuclear", N, L, 1.0), _Penalty(kind, N, L, w)]
        state, it, status, pres, dres = _admm(cons, pens, cfg, state)
        total += it
        Zs, obj, feas, status = _finish(cons, pens, state, status, N, L, cfg)
        if prob.shared_support:
            H = Zs.transpose(1, 0, 2).reshape(N, -1)
            w = reweight(H, cfg.tau, delta)
        else:
            w = tau_col / (np.linalg.norm(Zs, axis=2) + delta)
    Zv = Zs.reshape(P * N, L)
    if np.any(Zv):
        x_stack, h = extract_rank_one(Zv)
    else:
        x_stack, h = np.zeros(P * N), np.zeros(L)
    sols = []
    for p in range(P):
        Zp = Zs[p]
        sols.append(LiftedSolution(Zp, x_stack[p * N:(p + 1) * N], h.copy(), obj, pres, dres, total, status,
                                   np.linalg.svd(Zp, compute_uv=False), float(cons.residuals(state.z)[p])))
    return sols, h


# ----------------------------------------------------------------------------
# baselines


def baseline_ls(op: LiftedOperator, y_obs) -> LiftedSolution:
    """Minimum-norm least-squares solution of the lifted system."""
    con = _Constraints([op], [np.asarray(y_obs, dtype=complex)], None)
    Z = con.Zls[0].reshape(op.L, op.N).T
    return _solution(Z, float(np.linalg.norm(con.Zls[0])), 0.0, 0.0, 1, "converged", float(con.ls_residuals[0]))


def _x_operator(op: LiftedOperator, h) -> np.ndarray:
    # y = mix @ diag(psi h) U x
    D = (op.psi_rows @ h)[:, None] * op.u_rows
    return D if op.mix is None else op.mix @ D


def _h_operator(op: LiftedOperator, x) -> np.ndarray:
    D = (op.u_rows @ x)[:, None] * op.psi_rows
    return D if op.mix is None else op.mix @ D


def _lstsq_real(A, b):
    Ar = np.vstack([A.real, A.imag])
    br = np.concatenate([np.real(b), np.imag(b)])
    sol, *_ = np.linalg.lstsq(Ar, br, rcond=1e-10)
    return sol


def _l1_vector(A, b, cfg: SolverConfig):
    """``min ||x||_1`` s.t. ``A x = b`` using the same ADMM engine (L = 1)."""
    N = A.shape[1]
    op = LiftedOperator(np.eye(N, dtype=complex), np.ones((N, 1), dtype=complex), np.arange(A.shape[0]),
                        "frequency", np.asarray(A, dtype=complex))
    con = _Constraints([op], [np.asarray(b, dtype=complex)], None)
    state, *_ = _admm(con, [_Penalty("l1", N, 1)], replace(cfg, noise_eps=None))
    return state.z[0]


def hard_threshold(x, S: int) -> np.ndarray:
    """Keep the ``S`` largest-magnitude entries; ties go to the lowest index."""
    x = np.asarray(x, dtype=float)
    order = np.lexsort((np.arange(x.size), -np.abs(x)))
    out = np.zeros_like(x)
    keep = order[:S]
    out[keep] = x[keep]
    return out


def baseline_am(op: LiftedOperator, y_obs, S: int, cfg: SolverConfig | None = None, h_init=None,
                max_outer: int = 50, tol: float = 1e-8) -> LiftedSolution:
    """Alternating minimization with known sparsity level ``S``.

    Alternates an LS fit of ``h`` given ``x`` with an l1 fit of ``x`` given
    ``h`` followed by hard thresholding to ``S`` entries. Starts from the
    filter estimate of the least-squares lifted solution.
    """
    cfg = cfg or SolverConfig()
    y_obs = np.asarray(y_obs, dtype=complex)
    if h_init is None:
        ls = baseline_ls(op, y_obs)
        h = ls.h_hat if np.any(ls.h_hat) else np.ones(op.L) / np.sqrt(op.L)
    else:
        h = np.asarray(h_init, dtype=float)
    x = np.zeros(op.N)
    status = "max_iters"
    it = 0
    for it in range(1, max_outer + 1):
        Ax = _x_operator(op, h)
        if not np.any(Ax):
            raise DegenerateIterate("filter iterate annihilates every observation")
        x_new = hard_threshold(_l1_vector(Ax, y_obs, cfg), S)
        Ah = _h_operator(op, x_new)
        if not np.any(Ah):
            raise DegenerateIterate("thresholded input iterate is zero")
        h_new = _lstsq_real(Ah, y_obs)
        change = np.linalg.norm(np.outer(x_new, h_new) - np.outer(x, h))
        x, h = x_new, h_new
        if change <= tol * max(1.0, np.linalg.norm(np.outer(x, h))):
            status = "converged"
            break
    Z = np.outer(x, h)
    resid = float(np.linalg.norm(op.forward(Z) - y_obs))
    sol = _solution(Z, float(np.sum(np.abs(x))), resid, 0.0, it, status, resid)
    return sol
