"""The lifted measurement operator ``Z -> {u_i^T Z psi_i}``.

``Z`` is an ``N x L`` matrix and ``vec`` stacks its columns, so row ``i`` of
the dense operator is ``kron(psi_i, u_i)``. Two observation models exist:

* ``frequency``: keep the frequency rows indexed by ``observed``.
* ``vertex``: synthesize the full frequency output, map it back to the
  vertex domain with ``V`` and keep the entries at ``observed`` nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .spectral import FilterBasis, ShiftSpectrum

MATERIALIZE_LIMIT = 200_000


@dataclass(frozen=True, eq=False)
class LiftedOperator:
    u_rows: np.ndarray
    psi_rows: np.ndarray
    observed: np.ndarray
    sampling: str
    mix: np.ndarray | None = None

    @property
    def N(self) -> int:
        return self.u_rows.shape[1]

    @property
    def L(self) -> int:
        return self.psi_rows.shape[1]

    @property
    def n_obs(self) -> int:
        return self.observed.size

    @property
    def shape(self) -> tuple:
        return (self.n_obs, self.N * self.L)

    def _core(self, Z):
        return np.einsum("il,il->i", self.u_rows @ Z, self.psi_rows)

    def forward(self, Z) -> np.ndarray:
        Z = np.asarray(Z)
        if Z.shape != (self.N, self.L):
            raise DimensionMismatch(f"Z has shape {Z.shape}, expected {(self.N, self.L)}")
        y = self._core(Z)
        return y if self.mix is None else self.mix @ y

    def adjoint(self, z) -> np.ndarray:
        z = np.asarray(z)
        if z.shape != (self.n_obs,):
            raise DimensionMismatch(f"z has shape {z.shape}, expected {(self.n_obs,)}")
        if self.mix is not None:
            z = self.mix.conj().T @ z
        # sum_i z_i conj(u_i) conj(psi_i)^T
        return self.u_rows.conj().T @ (z[:, None] * self.psi_rows.conj())

    def gram(self, Z) -> np.ndarray:
        return self.adjoint(self.forward(Z))

    def gram_kron(self, Z) -> np.ndarray:
        """``M^H M vec(Z)`` with ``M`` assembled densely from its Kronecker rows."""
        Z = np.asarray(Z)
        M = self.materialize()
        vz = Z.reshape(-1, order="F")
        return (M.conj().T @ (M @ vz)).reshape(self.N, self.L, order="F")

    def materialize(self) -> np.ndarray:
        if self.N * self.L > MATERIALIZE_LIMIT:
            raise MemoryError(f"refusing to materialize a {self.n_obs} x {self.N * self.L} operator")
        # row i is kron(psi_i, u_i): column index l * N + k
        rows = (self.psi_rows[:, :, None] * self.u_rows[:, None, :]).reshape(self.u_rows.shape[0], -1)
        return rows if self.mix is None else self.mix @ rows

    def restrict_rows(self, support) -> "LiftedOperator":
        """Operator acting on ``Z[support]`` only (other rows pinned to zero)."""
        support = np.asarray(support, dtype=int)
        return LiftedOperator(self.u_rows[:, support], self.psi_rows, self.observed, self.sampling, self.mix)


def build_lifting(spec: ShiftSpectrum, basis: FilterBasis, observed=None, sampling: str = "frequency") -> LiftedOperator:
    """Lifted operator for a shift spectrum and filter basis.

    ``observed`` defaults to every node. With ``sampling="vertex"`` the
    observations are ``(V @ M vec Z)[observed]``, i.e. node samples of the
    filter output.
    """
    N = spec.n
    if basis.psi.shape[0] != N:
        raise DimensionMismatch("filter basis and spectrum disagree on N")
    if observed is None:
        observed = np.arange(N)
    observed = np.asarray(observed, dtype=int).ravel()
    if observed.size == 0:
        raise ValueError("observation set is empty")
    if observed.size > N or np.any(observed < 0) or np.any(observed >= N):
        raise DimensionMismatch(f"observed indices must lie in [0, {N})")
    if np.unique(observed).size != observed.size:
        raise ValueError("observed indices must be distinct")
    U, psi = spec.u_analysis.astype(complex), basis.psi
    if sampling == "frequency":
        return LiftedOperator(U[observed], psi[observed], observed, "frequency")
    if sampling == "vertex":
        return LiftedOperator(U, psi, observed, "vertex", spec.eigvecs[observed].astype(complex))
    raise ValueError(f"unknown sampling {sampling!r}")


def resampled_lifting(spec: ShiftSpectrum, basis: FilterBasis, rng) -> LiftedOperator:
    """Operator whose ``U`` rows are drawn uniformly with replacement.

    Only meant for empirical studies of the random-row model behind the
    recovery bound; experiments use ``build_lifting``.
    """
    rng = np.random.default_rng(rng)
    N = spec.n
    idx = rng.integers(0, N, size=N)
    U = spec.u_analysis.astype(complex)
    return LiftedOperator(U[idx], basis.psi, np.arange(N), "frequency")


@dataclass(frozen=True, eq=False)
class RealSplitSystem:
    a_real: np.ndarray
    b_real: np.ndarray


def real_split(op: LiftedOperator, y_obs) -> RealSplitSystem:
    y_obs = np.asarray(y_obs)
    if y_obs.shape != (op.n_obs,):
        raise DimensionMismatch(f"observation vector has shape {y_obs.shape}, expected {(op.n_obs,)}")
    M = op.materialize()
    a = np.vstack([M.real, M.imag])
    b = np.concatenate([np.real(y_obs), np.imag(y_obs)]).astype(float)
    return RealSplitSystem(a, b)


def operator_norm(op: LiftedOperator, iters: int = 500, rng=0, tol: float = 1e-12) -> float:
    """Largest singular value of the operator by power iteration on the Gram map."""
    rng = np.random.default_rng(rng)
    Z = rng.standard_normal((op.N, op.L)) + 0j
    Z /= np.linalg.norm(Z)
    est = 0.0
    for _ in range(iters):
        G = op.gram(Z)
        nrm = np.linalg.norm(G)
        if nrm == 0:
            return 0.0
        Z = G / nrm
        if abs(nrm - est) <= tol * nrm:
            est = nrm
            break
        est = nrm
    return float(np.sqrt(est))
