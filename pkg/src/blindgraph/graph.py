"""Graph container plus edge-list and dense complex-matrix I/O."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Graph:
    """Weighted graph on nodes ``0 .. n_nodes-1``.

    An edge ``(src, dst, w)`` means node ``dst`` listens to node ``src``;
    in the shift this lands at ``A[dst, src] = w``. Undirected graphs list
    each edge once and the adjacency is symmetrized.
    """

    n_nodes: int
    edges: tuple = field(default_factory=tuple)
    directed: bool = False

    def __post_init__(self):
        if int(self.n_nodes) < 1:
            raise ValueError(f"n_nodes must be positive, got {self.n_nodes}")
        cleaned = []
        for e in self.edges:
            if len(e) == 2:
                src, dst, w = e[0], e[1], 1.0
            else:
                src, dst, w = e
            src, dst, w = int(src), int(dst), float(w)
            if not (0 <= src < self.n_nodes and 0 <= dst < self.n_nodes):
                raise ValueError(f"edge ({src}, {dst}) out of range for {self.n_nodes} nodes")
            if src == dst:
                raise ValueError(f"self-loop at node {src} is not allowed in the edge list")
            cleaned.append((src, dst, w))
        object.__setattr__(self, "n_nodes", int(self.n_nodes))
        object.__setattr__(self, "edges", tuple(cleaned))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n_nodes, self.n_nodes))
        for src, dst, w in self.edges:
            A[dst, src] += w
            if not self.directed and src != dst:
                A[src, dst] += w
        return A

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    @classmethod
    def from_adjacency(cls, A, directed: bool | None = None) -> "Graph":
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("adjacency must be square")
        if directed is None:
            directed = not np.allclose(A, A.T)
        if not directed:
            i, j = np.nonzero(np.triu(A, 1))
            edges = [(int(a), int(b), float(A[a, b])) for a, b in zip(i, j)]
        else:
            dst, src = np.nonzero(A - np.diag(np.diag(A)))
            edges = [(int(s), int(d), float(A[d, s])) for s, d in zip(src, dst)]
        return cls(A.shape[0], tuple(edges), bool(directed))


def read_edge_list(path, n_nodes: int | None = None, directed: bool = False) -> Graph:
    """Parse ``src dst [weight]`` lines; ``#`` starts a comment."""
    edges = []
    max_idx = -1
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ValueError(f"{path}:{lineno}: expected 'src dst [weight]', got {raw!r}")
            src, dst = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
            edges.append((src, dst, w))
            max_idx = max(max_idx, src, dst)
    if n_nodes is None:
        n_nodes = max_idx + 1
    return Graph(n_nodes, tuple(edges), directed)


def write_edge_list(graph: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# nodes={graph.n_nodes} directed={int(graph.directed)}\n")
        for src, dst, w in graph.edges:
            if w == 1.0:
                fh.write(f"{src} {dst}\n")
            else:
                fh.write(f"{src} {dst} {w!r}\n")


def _format_complex(z: complex) -> str:
    re, im = float(np.real(z)), float(np.imag(z))
    if im == 0.0:
        return repr(re)
    sign = "+" if im >= 0 or np.isnan(im) else "-"
    return f"{re!r}{sign}{abs(im)!r}i"


def _parse_complex(tok: str) -> complex:
    tok = tok.strip()
    if tok.endswith("i"):
        return complex(tok[:-1] + "j")
    return complex(float(tok))


def write_matrix_csv(M, path) -> None:
    """One row per line, complex entries written as ``a+bi``."""
    M = np.atleast_2d(np.asarray(M))
    with open(path, "w") as fh:
        for row in M:
            fh.write(",".join(_format_complex(v) for v in row) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([_parse_complex(t) for t in line.split(",")])
    if not rows:
        return np.zeros((0, 0))
    M = np.array(rows, dtype=complex)
    if np.all(M.imag == 0):
        return M.real
    return M


def karate_path() -> str:
    """Location of the bundled Zachary karate-club edge list."""
    return os.path.join(os.path.dirname(__file__), "data", "karate.edges")
