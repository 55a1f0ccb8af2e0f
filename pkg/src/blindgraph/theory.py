"""Computable recovery theory: coherence functions, the recovery bound,
spark and brute-force identifiability checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import NotNormal, TooLarge
from .spectral import REPEAT_TOL, FilterBasis, ShiftSpectrum, n_distinct

SPARK_MAX_COLS = 20
IDENT_MAX_N = 12


def rho(A, k: int) -> float:
    """Largest energy captured by ``k`` entries of any single row of ``A``.

    The best ``k``-subset of a row is its ``k`` largest magnitudes, so no
    subset enumeration is needed.
    """
    A = np.atleast_2d(np.asarray(A))
    if not 1 <= k <= A.shape[1]:
        raise ValueError(f"k={k} must lie in [1, {A.shape[1]}]")
    sq = np.sort(np.abs(A) ** 2, axis=1)[:, ::-1]
    return float(np.max(np.sum(sq[:, :k], axis=1)))


def rho_bruteforce(A, k: int) -> float:
    A = np.atleast_2d(np.asarray(A))
    sq = np.abs(A) ** 2
    best = 0.0
    for cols in itertools.combinations(range(A.shape[1]), k):
        best = max(best, float(np.max(sq[:, list(cols)].sum(axis=1))))
    return best


@dataclass(frozen=True, eq=False)
class CoherenceProfile:
    rho_u: dict
    rho_psi: dict
    u_scaled: np.ndarray
    psi_used: np.ndarray

    def to_csv(self, path) -> None:
        ks = sorted(set(self.rho_u) | set(self.rho_psi))
        with open(path, "w") as fh:
            fh.write("k,rho_u,rho_psi\n")
            for k in ks:
                ru = f"{self.rho_u[k]!r}" if k in self.rho_u else ""
                rp = f"{self.rho_psi[k]!r}" if k in self.rho_psi else ""
                fh.write(f"{k},{ru},{rp}\n")


def coherence_profile(spec: ShiftSpectrum, basis: FilterBasis, K: int | None = None) -> CoherenceProfile:
    """Coherence tables on the normalizations the recovery bound assumes.

    ``U`` is rescaled so that ``U^H U = N I`` and the filter basis is
    replaced by its orthonormal factor ``P``.
    """
    if not spec.normal:
        raise NotNormal("coherence analysis assumes a normal shift")
    N = spec.n
    K = N if K is None else int(K)
    u_scaled = np.sqrt(N) * spec.u_analysis
    P = basis.psi_orth
    rho_u = {k: rho(u_scaled, k) for k in range(1, K + 1)}
    rho_psi = {k: rho(P, k) for k in range(1, P.shape[1] + 1)}
    return CoherenceProfile(rho_u, rho_psi, u_scaled, P)


@dataclass(frozen=True)
class RecoveryBound:
    alpha: float
    alpha1: float
    gamma: float
    p_rec_lower: float
    S: int
    L: int
    N: int
    applicable: bool = field(default=False)


def recovery_alpha(rho_u1, rho_psi1, rho_us, rho_psil, S, L, N):
    """Bound exponent and its simplified lower bound, returned as ``(alpha, alpha1, gamma)``."""
    gamma = np.sqrt(2 * N * (np.log(2 * L * N) + 1) + 1)
    logs = np.log(4 * gamma * np.sqrt(2 * L * S)) * np.log(2 * S * N ** 2)
    c = rho_u1 * rho_psi1 * L * S / (rho_us * rho_psil)
    alpha = 3 * np.log(2) / (120 * c + 8 * np.sqrt(c)) / (rho_us * rho_psil * logs)
    alpha1 = (3 * np.log(2) / 128) / (L * S * rho_us * rho_psil * logs)
    return float(alpha), float(alpha1), float(gamma)


def recovery_probability(alpha: float, N: int) -> float:
    return float(min(1.0, max(0.0, 1.0 - N ** (1.0 - alpha))))


def theorem1_bound(profile: CoherenceProfile, S: int, L: int, N: int) -> RecoveryBound:
    """Evaluate the recovery-probability bound for ``S``-sparse inputs and length-``L`` filters.

    ``p_rec_lower`` is always reported; ``applicable`` is False when the
    exponent is below one, where the guarantee says nothing.
    """
    if S not in profile.rho_u or L not in profile.rho_psi:
        raise ValueError("coherence profile does not cover the requested S and L")
    alpha, alpha1, gamma = recovery_alpha(profile.rho_u[1], profile.rho_psi[1], profile.rho_u[S],
                                          profile.rho_psi[L], S, L, N)
    return RecoveryBound(alpha, alpha1, gamma, recovery_probability(alpha, N), S, L, N, alpha >= 1)


def _rank(A, tol_ref: float) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol_ref))


def spark(A) -> int:
    """Size of the smallest linearly dependent column subset (``cols + 1`` if none)."""
    A = np.atleast_2d(np.asarray(A))
    n = A.shape[1]
    if n > SPARK_MAX_COLS:
        raise TooLarge(f"spark search limited to {SPARK_MAX_COLS} columns, got {n}")
    smax = np.linalg.svd(A, compute_uv=False)[0] if A.size else 0.0
    tol = 1e-8 * smax
    for k in range(1, n + 1):
        for cols in itertools.combinations(range(n), k):
            if _rank(A[:, cols], tol) < k:
                return k
    return n + 1


def support_family(N: int, S: int, mode: str = "all"):
    if mode == "all":
        return [tuple(c) for c in itertools.combinations(range(N), S)]
    if mode == "adjacent":
        return sorted({tuple(sorted((s + j) % N for j in range(S))) for s in range(N)})
    if mode == "equally_spaced":
        if N % S:
            return []
        step = N // S
        return sorted({tuple(sorted((s + j * step) % N for j in range(S))) for s in range(step)})
    raise ValueError(f"unknown support mode {mode!r}")


@dataclass
class Identifiability:
    identifiable: bool
    min_distinct: int
    witness_rows: tuple | None
    witness_support: tuple | None
    vacuous: bool = False

    def __bool__(self):
        return self.identifiable


def _max_null_rows(B, tol):
    """Largest row set ``I`` with ``B[I]`` column-rank deficient, with a null vector."""
    N, S = B.shape
    if _rank(B, tol) < S:
        return tuple(range(N))
    best: tuple = ()
    for R in itertools.combinations(range(N), S - 1):
        BR = B[list(R)]
        if S > 1:
            _, s, vh = np.linalg.svd(BR)
            if np.sum(s > tol) < S - 1:
                continue
            x = vh[-1].conj()
        else:
            x = np.ones(1)
        resid = np.abs(B @ x)
        rows = tuple(np.flatnonzero(resid <= 1e-8 * max(np.abs(B).max(), 1e-300)))
        if len(rows) > len(best):
            best = rows
    return best


def check_identifiability(spec: ShiftSpectrum, L: int, S: int, supports: str = "all") -> Identifiability:
    """Brute-force the distinct-eigenvalue condition for ``S``-sparse inputs.

    For each candidate support, the largest row set of ``U`` that can
    annihilate an ``S``-sparse input is found by fixing ``S - 1`` rows and
    taking the null vector they leave. The condition holds when the
    eigenvalues outside every such row set take more than ``L - 1``
    distinct values. The minimum is over maximal row sets, which is where
    it is attained.
    """
    N = spec.n
    if N > IDENT_MAX_N:
        raise TooLarge(f"identifiability enumeration limited to N <= {IDENT_MAX_N}")
    U = spec.u_analysis
    tol = 1e-8 * np.linalg.norm(U, 2)
    lam = spec.eigvals
    worst = None
    for omega in support_family(N, S, supports):
        rows = _max_null_rows(U[:, list(omega)], tol)
        comp = [i for i in range(N) if i not in rows]
        d = n_distinct(lam[comp], REPEAT_TOL, np.max(np.abs(lam))) if comp else 0
        if worst is None or d < worst[0]:
            worst = (d, rows, omega)
    if worst is None:
        return Identifiability(True, N, None, None, vacuous=True)
    d, rows, omega = worst
    ok = d > L - 1
    return Identifiability(ok, d, None if ok else rows, None if ok else omega)
