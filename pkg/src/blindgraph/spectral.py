"""Shift operators, their spectra, graph Fourier transforms and graph filters.

The frequency convention is ``x_hat = U @ x`` with ``U = inv(V)`` and
``S = V @ diag(lam) @ U``. A filter ``h`` of length ``L`` has frequency
response ``Psi @ h`` where ``Psi[i, j] = lam[i] ** j``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, EigenFailure, NonDiagonalizable
from .graph import Graph

COND_LIMIT = 1e10
REPEAT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ShiftSpectrum:
    shift: np.ndarray
    eigvecs: np.ndarray
    eigvals: np.ndarray
    u_analysis: np.ndarray
    normal: bool
    inv_condition: float

    @property
    def n(self) -> int:
        return self.shift.shape[0]

    @property
    def repeated_eigenvalues(self) -> bool:
        return n_distinct(self.eigvals) < self.n

    def check(self) -> None:
        S, V, U, lam = self.shift, self.eigvecs, self.u_analysis, self.eigvals
        N = self.n
        scale = max(np.linalg.norm(S), 1.0)
        assert np.linalg.norm(S @ V - V * lam) / scale <= 1e-8, "S V != V Lambda"
        assert np.linalg.norm(U @ V - np.eye(N)) <= 1e-8 * N, "U V != I"
        if self.normal:
            assert np.linalg.norm(U - V.conj().T) <= 1e-8 * N, "U != V^H on a normal shift"


@dataclass(frozen=True, eq=False)
class FilterBasis:
    psi: np.ndarray
    psi_orth: np.ndarray
    sigma: np.ndarray
    r_factor: np.ndarray
    rank_deficient: bool

    @property
    def L(self) -> int:
        return self.psi.shape[1]


def n_distinct(values, tol: float = REPEAT_TOL, scale: float | None = None) -> int:
    """Number of clusters among complex ``values`` at ``tol * scale``.

    ``scale`` defaults to ``max |values|``.
    """
    values = np.asarray(values, dtype=complex).ravel()
    if values.size == 0:
        return 0
    if scale is None:
        scale = np.max(np.abs(values))
    thresh = tol * max(scale, 1e-300)
    reps: list[complex] = []
    for v in values:
        if all(abs(v - r) > thresh for r in reps):
            reps.append(v)
    return len(reps)


def _ordering(lam: np.ndarray) -> np.ndarray:
    # descending real part, then descending imaginary part; keys rounded so
    # analytically equal values are not split by last-bit noise
    scale = max(np.max(np.abs(lam)), 1.0)
    re = np.round(lam.real / scale, 12)
    im = np.round(lam.imag / scale, 12)
    return np.lexsort((-im, -re))


def _is_normal(S: np.ndarray) -> bool:
    C = S @ S.conj().T - S.conj().T @ S
    return np.linalg.norm(C) <= 1e-10 * max(np.linalg.norm(S) ** 2, 1.0)


def directed_cycle_matrix(N: int) -> np.ndarray:
    """Adjacency with ``A[(j + 1) % N, j] = 1``: a one-step cyclic shift."""
    return np.roll(np.eye(N), 1, axis=0)


def _cycle_spectrum(N: int) -> ShiftSpectrum:
    S = directed_cycle_matrix(N)
    k = np.arange(N)
    lam = np.exp(2j * np.pi * k / N)
    # (S v)_i = v_{i-1}; v_k[i] = exp(-2 pi j k i / N) / sqrt(N) has eigenvalue lam_k
    V = np.exp(-2j * np.pi * np.outer(k, k) / N) / np.sqrt(N)
    order = _ordering(lam)
    lam, V = lam[order], V[:, order]
    U = V.conj().T
    return ShiftSpectrum(S, V, lam, U, True, 1.0)


def spectrum_of(S, check: bool = True) -> ShiftSpectrum:
    """Eigendecompose a dense real shift matrix.

    Symmetric shifts use ``eigh``; other normal shifts use a complex Schur
    form (unitary by construction); the rest go through ``eig`` followed by
    an explicit inverse guarded by the condition number of ``V``.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"shift must be square, got shape {S.shape}")
    try:
        if np.array_equal(S, S.T):
            lam, V = np.linalg.eigh(S)
            lam = lam.astype(complex)
            normal, cond = True, 1.0
            U = None
        elif _is_normal(S):
            T, V = scipy.linalg.schur(S.astype(complex), output="complex")
            lam = np.diag(T).copy()
            normal, cond = True, 1.0
            U = None
        else:
            lam, V = scipy.linalg.eig(S)
            V = V / np.linalg.norm(V, axis=0)
            cond = float(np.linalg.cond(V))
            if not np.isfinite(cond) or cond > COND_LIMIT:
                raise NonDiagonalizable(f"eigenvector matrix condition {cond:.3g} exceeds {COND_LIMIT:g}")
            normal = False
            U = None
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise EigenFailure(str(exc)) from exc

    order = _ordering(lam)
    lam, V = lam[order], V[:, order]
    if normal:
        U = V.conj().T
    else:
        U = np.linalg.inv(V)
    spec = ShiftSpectrum(S, V, lam, U, normal, cond)
    if check:
        spec.check()
    return spec


def build_shift(graph: Graph, kind: str = "adjacency", matrix=None, rescale: bool = False) -> ShiftSpectrum:
    """Build a shift operator for ``graph`` and its spectral decomposition.

    Parameters
    ----------
    kind : {"adjacency", "laplacian", "directed_cycle", "custom"}
        ``directed_cycle`` ignores the edges and uses the analytic DFT
        eigenbasis of an ``n_nodes`` cycle. ``custom`` takes ``matrix``.
    rescale : bool
        Divide the shift by its spectral radius so Vandermonde columns stay
        bounded for long filters.
    """
    N = graph.n_nodes
    if kind == "directed_cycle":
        # unit spectral radius already, so rescaling is a no-op
        return _cycle_spectrum(N)
    if kind == "adjacency":
        S = graph.adjacency()
    elif kind == "laplacian":
        if graph.directed:
            raise ValueError("laplacian shift requires an undirected graph")
        A = graph.adjacency()
        S = np.diag(A.sum(axis=1)) - A
    elif kind == "custom":
        if matrix is None:
            raise ValueError("custom shift requires a matrix")
        S = np.asarray(matrix, dtype=float)
        if S.shape != (N, N):
            raise DimensionMismatch(f"custom shift shape {S.shape} does not match {N} nodes")
    else:
        raise ValueError(f"unknown shift kind {kind!r}")
    spec = spectrum_of(S)
    if rescale:
        radius = np.max(np.abs(spec.eigvals))
        if radius > 0:
            spec = ShiftSpectrum(spec.shift / radius, spec.eigvecs, spec.eigvals / radius,
                                 spec.u_analysis, spec.normal, spec.inv_condition)
    return spec


def build_filter_basis(spec: ShiftSpectrum, L: int) -> FilterBasis:
    N = spec.n
    if not 1 <= L <= N:
        raise ValueError(f"filter length L={L} must satisfy 1 <= L <= {N}")
    psi = np.vander(spec.eigvals, L, increasing=True).astype(complex)
    P, sigma, Rh = np.linalg.svd(psi, full_matrices=False)
    deficient = bool(sigma[-1] < 1e-10 * sigma[0])
    if deficient:
        warnings.warn(f"Vandermonde basis is numerically rank deficient (sigma_min/sigma_max={sigma[-1] / sigma[0]:.2e}); "
                      "filter coefficients are not identifiable", RuntimeWarning, stacklevel=2)
    basis = FilterBasis(psi, P, sigma, Rh.conj().T, deficient)
    assert np.linalg.norm(P.conj().T @ P - np.eye(L)) <= 1e-10
    assert np.linalg.norm(psi - (P * sigma) @ Rh) <= 1e-8 * np.linalg.norm(psi)
    return basis


def _check_signal(spec: ShiftSpectrum, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[0] != spec.n:
        raise DimensionMismatch(f"signal length {x.shape[0]} does not match {spec.n} nodes")
    return x


def gft(spec: ShiftSpectrum, x) -> np.ndarray:
    return spec.u_analysis @ _check_signal(spec, x)


def igft(spec: ShiftSpectrum, x_hat) -> np.ndarray:
    out = spec.eigvecs @ _check_signal(spec, x_hat)
    return out


def frequency_response(spec: ShiftSpectrum, h) -> np.ndarray:
    h = np.asarray(h, dtype=float).ravel()
    if h.size > spec.n:
        raise DimensionMismatch(f"filter length {h.size} exceeds {spec.n} nodes")
    return np.vander(spec.eigvals, h.size, increasing=True) @ h


def apply_filter(spec: ShiftSpectrum, h, x, mode: str = "vertex") -> np.ndarray:
    """Output of ``sum_l h[l] S^l`` applied to ``x``.

    ``vertex`` mode shifts iteratively; ``frequency`` mode multiplies the
    GFT of ``x`` by the frequency response and transforms back. For a real
    shift with a complex eigenbasis the frequency result is complex with
    negligible imaginary part; it is returned real in that case.
    """
    h = np.asarray(h, dtype=float).ravel()
    x = _check_signal(spec, x)
    if h.size < 1 or h.size > spec.n:
        raise DimensionMismatch(f"filter length {h.size} must be in [1, {spec.n}]")
    if mode == "vertex":
        y = h[0] * x
        xl = x
        for hl in h[1:]:
            xl = spec.shift @ xl
            y = y + hl * xl
        return y
    if mode == "frequency":
        y_hat = frequency_response(spec, h) * gft(spec, x)
        y = igft(spec, y_hat)
        if np.isrealobj(x) and np.all(np.abs(y.imag) <= 1e-9 * max(np.abs(y).max(), 1e-300)):
            return y.real
        return y
    raise ValueError(f"unknown filter mode {mode!r}")


def simulate_diffusion(spec: ShiftSpectrum, x0, steps: int) -> list:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    x = _check_signal(spec, x0)
    out = [x]
    for _ in range(steps):
        x = spec.shift @ x
        out.append(x)
    return out
