"""Hamming-1 graphs over sampled masks and their electrical/spectral analysis.

Nodes carry contribution scores; edges join masks that differ in exactly one
bit, so a sampled mask set induces a subgraph of the d-dimensional hypercube.
On top of that graph: the combinatorial Laplacian, the Dirichlet energy of
the score function (its smoothness), connected clusters of generalizing
nodes, and effective resistance with every edge a unit resistor.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import GraphDisconnectedError, IllConditionedWarning
from .metrics import ContributionRecord
from .rng import SeededRng

CONDITION_LIMIT = 1e12
MAX_CORRELATION_PAIRS = 10_000


class UnionFind:
    """Disjoint sets over 0..n-1 with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra

    def groups(self) -> list[list[int]]:
        by_root: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            by_root.setdefault(self.find(i), []).append(i)
        return sorted(by_root.values())


@dataclass
class SubnetGraph:
    """Sampled masks with scores, plus the exact Hamming-1 edge set among them."""

    nodes: list  # (Mask, score) pairs
    edges: list  # (i, j) index pairs with i < j
    adjacency: list = field(repr=False)  # neighbor lists, sorted

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def scores(self) -> np.ndarray:
        return np.array([s for _, s in self.nodes])

    @property
    def masks(self) -> list:
        return [m for m, _ in self.nodes]


def build_graph(records: list[ContributionRecord]) -> SubnetGraph:
    """Connect records whose masks differ in exactly one bit.

    The edge set is found by pairwise XOR + popcount over the packed mask
    words; duplicate masks are rejected.
    """
    if not records:
        raise ValueError("need at least one record")
    d = records[0].mask.d
    if any(r.mask.d != d for r in records):
        raise ValueError("all masks must share the same length d")
    seen = set()
    for r in records:
        key = r.mask.packed.tobytes()
        if key in seen:
            raise ValueError(f"duplicate mask {r.mask.to_string()}")
        seen.add(key)

    packed = np.stack([r.mask.packed for r in records])
    n = len(records)
    edges = []
    for i in range(n - 1):
        dist = np.bitwise_count(packed[i + 1 :] ^ packed[i]).sum(axis=1)
        for j in np.nonzero(dist == 1)[0]:
            edges.append((i, i + 1 + int(j)))
    adjacency = [[] for _ in range(n)]
    for i, j in edges:
        adjacency[i].append(j)
        adjacency[j].append(i)
    for neighbors in adjacency:
        neighbors.sort()
    nodes = [(r.mask, float(r.score)) for r in records]
    return SubnetGraph(nodes, edges, adjacency)


def laplacian(g: SubnetGraph) -> np.ndarray:
    """Combinatorial Laplacian L = D - A (symmetric, rows sum to zero, PSD)."""
    L = np.zeros((g.n_nodes, g.n_nodes))
    for i, j in g.edges:
        L[i, i] += 1.0
        L[j, j] += 1.0
        L[i, j] -= 1.0
        L[j, i] -= 1.0
    return L


def dirichlet_energy(g: SubnetGraph) -> tuple[float, float]:
    """Sum of squared score differences over edges, and its per-edge mean.

    Computed both as the explicit edge sum and as the quadratic form against
    the Laplacian; the two must agree to 1e-9 relative or the call fails.
    """
    scores = g.scores
    raw = float(sum((scores[i] - scores[j]) ** 2 for i, j in g.edges))
    quad = float(scores @ laplacian(g) @ scores)
    if abs(raw - quad) > 1e-9 * max(1.0, abs(raw)):
        raise ArithmeticError(f"energy cross-check failed: edge sum {raw!r} vs quadratic form {quad!r}")
    per_edge = raw / g.n_edges if g.n_edges else 0.0
    return raw, per_edge


def connected_components(g: SubnetGraph) -> list[list[int]]:
    """Connected components as sorted lists of node indices."""
    uf = UnionFind(g.n_nodes)
    for i, j in g.edges:
        uf.union(i, j)
    return uf.groups()


def generalizing_clusters(g: SubnetGraph, eps: float) -> tuple[list[list[int]], float | None]:
    """Connected components of the subgraph on nodes with score < eps.

    Returns the clusters and the largest cluster's share of the restricted
    node set (1.0 for a singleton, None when no node qualifies).
    """
    if not np.isfinite(eps):
        raise ValueError("eps must be finite")
    keep = g.scores < eps
    if not keep.any():
        return [], None
    uf = UnionFind(g.n_nodes)
    for i, j in g.edges:
        if keep[i] and keep[j]:
            uf.union(i, j)
    clusters = sorted(
        [idx for idx in group if keep[idx]] for group in uf.groups() if keep[group[0]]
    )
    clusters = [c for c in clusters if c]
    largest = max(len(c) for c in clusters)
    return clusters, largest / int(keep.sum())


def laplacian_pseudoinverse(L: np.ndarray, components: list[list[int]]) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a graph Laplacian, componentwise.

    Each component's block uses the rank-correction identity
    Lp = (L + J/n)^-1 - J/n with J the all-ones matrix; entries across
    components are zero. Emits :class:`IllConditionedWarning` when a block's
    condition number exceeds 1e12.
    """
    L = np.asarray(L, dtype=np.float64)
    n = L.shape[0]
    out = np.zeros_like(L)
    for comp in components:
        idx = np.asarray(comp, dtype=np.intp)
        k = idx.size
        if k == 1:
            continue  # isolated node: zero row/column of L, zero block of the pseudoinverse
        sub = L[np.ix_(idx, idx)]
        shifted = sub + 1.0 / k
        cond = np.linalg.cond(shifted)
        if cond > CONDITION_LIMIT:
            warnings.warn(
                f"Laplacian block of size {k} has condition number {cond:.3g}",
                IllConditionedWarning,
                stacklevel=2,
            )
        out[np.ix_(idx, idx)] = np.linalg.inv(shifted) - 1.0 / k
    return out


def _component_labels(g: SubnetGraph) -> np.ndarray:
    labels = np.empty(g.n_nodes, dtype=np.intp)
    for c, comp in enumerate(connected_components(g)):
        labels[comp] = c
    return labels


def effective_resistance(g: SubnetGraph, i: int, j: int, Lpinv: np.ndarray) -> float | None:
    """Resistance between nodes i and j with unit resistors on every edge.

    rho(i, j) = Lp_ii + Lp_jj - 2 Lp_ij; returns None when the nodes lie in
    different components (infinite resistance).
    """
    n = g.n_nodes
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"node index out of range for {n} nodes")
    if i == j:
        return 0.0
    labels = _component_labels(g)
    if labels[i] != labels[j]:
        return None
    return float(Lpinv[i, i] + Lpinv[j, j] - 2.0 * Lpinv[i, j])


def resistance_oracle(g: SubnetGraph, i: int, j: int) -> float:
    """Resistance by direct circuit solve: ground node j, inject unit current at i.

    Independent of the pseudoinverse path; solves the reduced Laplacian
    system and returns the potential at i.
    """
    n = g.n_nodes
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"node index out of range for {n} nodes")
    if i == j:
        return 0.0
    labels = _component_labels(g)
    if labels[i] != labels[j]:
        raise GraphDisconnectedError(f"nodes {i} and {j} are in different components")
    # solve within the shared component only; other components would make the
    # grounded system singular
    comp = [k for k in range(n) if labels[k] == labels[i]]
    keep = [k for k in comp if k != j]
    reduced = laplacian(g)[np.ix_(keep, keep)]
    current = np.zeros(len(keep))
    pos = keep.index(i)
    current[pos] = 1.0
    try:
        potential = np.linalg.solve(reduced, current)
    except np.linalg.LinAlgError as exc:
        raise GraphDisconnectedError(f"singular reduced system for nodes {i}, {j}") from exc
    return float(potential[pos])


@dataclass(frozen=True)
class ResistanceResult:
    """Connected node pairs with (resistance, |score difference|) and their Pearson r."""

    pairs: list  # (i, j, rho, score_gap)
    pearson_r: float | None


def resistance_score_correlation(
    g: SubnetGraph,
    Lpinv: np.ndarray,
    max_pairs: int = MAX_CORRELATION_PAIRS,
    rng: SeededRng | None = None,
) -> ResistanceResult:
    """Correlate effective resistance with |score difference| over connected pairs.

    All same-component pairs are used, or a seeded without-replacement sample
    of ``max_pairs`` when there are more. Pearson r is None when either
    variable is constant.
    """
    labels = _component_labels(g)
    scores = g.scores
    all_pairs = [
        (i, j)
        for i in range(g.n_nodes)
        for j in range(i + 1, g.n_nodes)
        if labels[i] == labels[j]
    ]
    if len(all_pairs) < 3:
        raise ValueError(f"need >= 3 connected pairs, found {len(all_pairs)}")
    if len(all_pairs) > max_pairs:
        if rng is None:
            rng = SeededRng(0)
        chosen = rng.choice(len(all_pairs), size=max_pairs, replace=False)
        all_pairs = [all_pairs[k] for k in np.sort(chosen)]
    rows = []
    for i, j in all_pairs:
        rho = float(Lpinv[i, i] + Lpinv[j, j] - 2.0 * Lpinv[i, j])
        rows.append((i, j, rho, float(abs(scores[i] - scores[j]))))
    rhos = np.array([r[2] for r in rows])
    gaps = np.array([r[3] for r in rows])
    if rhos.std() == 0.0 or gaps.std() == 0.0:
        return ResistanceResult(rows, None)
    r = float(np.corrcoef(rhos, gaps)[0, 1])
    return ResistanceResult(rows, r)
