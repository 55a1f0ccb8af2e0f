"""Experiment descriptions, per-trial records and seeded instance draws."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from ..solvers import SUCCESS_RMSE, SolverConfig
from .graphs import GraphSpec

KINDS = ("phase", "sampling_sweep", "rho_correlation", "epidemic", "single_solve")


@dataclass
class ExperimentSpec:
    kind: str
    graph: GraphSpec = field(default_factory=lambda: GraphSpec("er", {"n": 50, "p": 0.1}))
    S_values: list = field(default_factory=lambda: [1, 2, 3])
    L_values: list = field(default_factory=lambda: [1, 2, 3])
    P_values: list = field(default_factory=lambda: [1])
    observed_counts: list = field(default_factory=list)
    trials: int = 20
    solvers: list = field(default_factory=lambda: ["reweighted"])
    solver_config: SolverConfig = field(default_factory=SolverConfig)
    seed: int = 0
    out_dir: str | None = None
    connected: bool = True
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if isinstance(self.graph, dict):
            self.graph = GraphSpec.from_dict(self.graph)
        if isinstance(self.solver_config, dict):
            self.solver_config = SolverConfig(**self.solver_config)
        if self.kind == "phase" and (not self.S_values or not self.L_values):
            raise ValueError("phase grid is empty")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown ExperimentSpec fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        return d


@dataclass
class TrialRecord:
    S: int
    L: int
    P: int
    observed: int
    graph_id: int
    trial: int
    solver: str
    rmse: float
    status: str
    seed: int
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.rmse < SUCCESS_RMSE


def trial_seed(master: int, *coords) -> int:
    """Deterministic per-trial seed from the master seed and cell coordinates."""
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFF] + [int(c) & 0xFFFFFFFF for c in coords])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def draw_sparse_input(N: int, S: int, rng, support=None) -> np.ndarray:
    """Unit-norm Gaussian input on a uniformly random ``S``-subset."""
    x = np.zeros(N)
    if support is None:
        support = rng.choice(N, size=S, replace=False)
    x[support] = rng.standard_normal(len(support))
    nrm = np.linalg.norm(x)
    return x / nrm if nrm > 0 else x


def draw_filter(L: int, rng) -> np.ndarray:
    h = rng.standard_normal(L)
    return h / np.linalg.norm(h)


def draw_instance(N: int, S: int, L: int, rng, P: int = 1, shared_support: bool = True):
    """Ground truth ``(xs, h)``; ``xs`` has shape ``(P, N)``."""
    # h and the first input do not depend on P, so P=1 and P>1 runs pair up
    support = np.sort(rng.choice(N, size=S, replace=False))
    h = draw_filter(L, rng)
    xs = [draw_sparse_input(N, S, rng, support)]
    for _ in range(P - 1):
        sup = support if shared_support else np.sort(rng.choice(N, size=S, replace=False))
        xs.append(draw_sparse_input(N, S, rng, sup))
    return np.array(xs), h
