"""Seeded graph generators."""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from ..graph import Graph, karate_path, read_edge_list


@dataclass(frozen=True)
class GraphSpec:
    """Declarative graph source: a generator name plus its parameters."""

    kind: str = "er"
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d) -> "GraphSpec":
        d = dict(d)
        kind = d.pop("kind")
        return cls(kind, d.pop("params", d))


def _from_nx(G, directed=False) -> Graph:
    G = nx.convert_node_labels_to_integers(G, ordering="sorted")
    edges = []
    for u, v, data in sorted(G.edges(data=True)):
        edges.append((int(u), int(v), float(data.get("weight", 1.0))))
    return Graph(G.number_of_nodes(), tuple(edges), directed)


def _er(n, p, rng):
    A = np.triu(rng.random((n, n)) < p, 1)
    i, j = np.nonzero(A)
    return Graph(n, tuple((int(a), int(b), 1.0) for a, b in zip(i, j)), False)


def _connected(g: Graph) -> bool:
    A = g.adjacency() != 0
    seen = np.zeros(g.n_nodes, bool)
    seen[0] = True
    frontier = seen.copy()
    while frontier.any():
        frontier = (A[frontier].any(axis=0)) & ~seen
        seen |= frontier
    return bool(seen.all())


def gen_graph(kind: str, seed=None, connected: bool = False, max_tries: int = 10_000, **params) -> Graph:
    """Generate a graph.

    kinds: ``er(n, p)``, ``directed_cycle(n)``, ``small_world(n, k, beta)``,
    ``pref_attach(n, m)``, ``random_regular(n, d)``, ``karate`` and
    ``from_file(path)``. With ``connected=True`` random families are
    redrawn until connected.
    """
    rng = np.random.default_rng(seed)

    def draw():
        if kind == "er":
            return _er(int(params["n"]), float(params["p"]), rng)
        if kind == "small_world":
            return _from_nx(nx.watts_strogatz_graph(int(params["n"]), int(params["k"]), float(params["beta"]),
                                                    seed=int(rng.integers(2 ** 32))))
        if kind == "pref_attach":
            return _from_nx(nx.barabasi_albert_graph(int(params["n"]), int(params["m"]), seed=int(rng.integers(2 ** 32))))
        if kind == "random_regular":
            return _from_nx(nx.random_regular_graph(int(params["d"]), int(params["n"]), seed=int(rng.integers(2 ** 32))))
        raise ValueError(f"unknown graph kind {kind!r}")

    if kind == "directed_cycle":
        n = int(params["n"])
        if n < 2:
            raise ValueError("directed cycle needs n >= 2")
        return Graph(n, tuple((j, (j + 1) % n, 1.0) for j in range(n)), True)
    if kind == "karate":
        return read_edge_list(karate_path())
    if kind == "from_file":
        return read_edge_list(params["path"], directed=bool(params.get("directed", False)))
    for p in ("p", "beta"):
        if p in params and not 0 <= float(params[p]) <= 1:
            raise ValueError(f"{p} must lie in [0, 1]")
    for _ in range(max_tries):
        g = draw()
        if not connected or _connected(g):
            return g
    raise RuntimeError(f"no connected {kind} graph after {max_tries} draws")


def matched_params(n: int, p: float) -> dict:
    """Parameters giving every random family the ER expected edge count."""
    m_edges = p * n * (n - 1) / 2
    k = max(2, int(round(2 * m_edges / n / 2)) * 2)
    m = max(1, int(round(m_edges / n)))
    d = int(round(2 * m_edges / n))
    if (d * n) % 2:
        d += 1
    return {
        "er": {"n": n, "p": p},
        "small_world": {"n": n, "k": k, "beta": 0.1},
        "pref_attach": {"n": n, "m": m},
        "random_regular": {"n": n, "d": d},
        "directed_cycle": {"n": n},
    }
