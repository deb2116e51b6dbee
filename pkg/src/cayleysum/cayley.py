"""Cayley sum graphs on k x k and their combinatorial verification.

The graph on the additive group G = k x k with connection set S joins x
and y whenever x + y lies in S; it is |S|-regular (the adjacency matrix
gets a diagonal 1 at x when 2x is in S, so loops count once in degrees).
Vertices are encoded as flat integers u * q + v.

Four-cycle and K_{2,3} counts exploit the group structure: in the
loop-deleted view the codegree of x and y depends only on d = x - y,

    codeg(x, y) = r(d) - [x+y in S] ([2x in S] + [2y in S]),

where r(d) = #{(s, s') in S^2 : s - s' = d}; the correction terms reduce
to counting 3-term progressions with difference d inside S.  This gives
exact counts in O(|S|^2 + q^2) and is cross-checked against brute-force
enumeration (small graphs) and a dense matrix route (explicit graphs).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import BadParameter, SizeExceeded
from .ffield import FiniteField
from .sidon import SumSet

MAX_MATERIALIZED_VERTICES = 1 << 22
MAX_DENSE_VERTICES = 4096
MAX_BRUTE_VERTICES = 60


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

class CayleySumGraph:
    """Graph on k x k with x ~ y iff x + y in S (loops where 2x in S)."""

    def __init__(self, sum_set: SumSet):
        self.sum_set = sum_set
        self.field = sum_set.field
        q = self.field.q
        self.q = q
        self.n = q * q
        self._s_flat = sum_set.u_codes() * q + sum_set.v_codes()
        self._s_lookup = np.zeros(self.n, dtype=bool)
        self._s_lookup[self._s_flat] = True

    @property
    def degree(self) -> int:
        return len(self.sum_set)

    def _flat_sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        f, q = self.field, self.q
        return f.sub_v(a // q, b // q) * q + f.sub_v(a % q, b % q)

    def _flat_add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        f, q = self.field, self.q
        return f.add_v(a // q, b // q) * q + f.add_v(a % q, b % q)

    def adjacent(self, x: int, y: int) -> bool:
        f, q = self.field, self.q
        s = f.add_code(x // q, y // q) * q + f.add_code(x % q, y % q)
        return bool(self._s_lookup[s])

    def neighbors(self, x: int) -> np.ndarray:
        """Sorted flat codes of {s - x : s in S}."""
        out = self._flat_sub(self._s_flat, np.int64(x))
        out.sort()
        return out

    def loop_vertices(self) -> np.ndarray:
        """Flat codes of vertices x with 2x in S."""
        codes = np.arange(self.n, dtype=np.int64)
        doubled = self._flat_add(codes, codes)
        return codes[self._s_lookup[doubled]]

    def loop_count(self) -> int:
        return int(len(self.loop_vertices()))

    def adjacency_matrix(self) -> np.ndarray:
        """Dense 0/1 matrix with the loop diagonal; capped at 2^22 entries."""
        if self.n * self.n > MAX_MATERIALIZED_VERTICES ** 2 or self.n > MAX_DENSE_VERTICES:
            raise SizeExceeded(f"will not materialize a {self.n}x{self.n} matrix")
        codes = np.arange(self.n, dtype=np.int64)
        sums = self._flat_add(codes[:, None], codes[None, :])
        return self._s_lookup[sums].astype(np.float64)

    def simple_view(self) -> "SimpleGraphView":
        return SimpleGraphView(self)

    def summary(self) -> dict:
        return {
            "n": self.n,
            "degree": self.degree,
            "loops": self.loop_count(),
            "family": self.sum_set.family,
            "field": self.field.descriptor(),
        }


class SimpleGraphView:
    """Loop-deleted view of a Cayley sum graph."""

    def __init__(self, base: CayleySumGraph):
        self.base = base
        self.n = base.n

    def adjacent(self, x: int, y: int) -> bool:
        return x != y and self.base.adjacent(x, y)

    def neighbors(self, x: int) -> np.ndarray:
        out = self.base.neighbors(x)
        return out[out != x]

    def loop_count(self) -> int:
        return 0

    def adjacency_matrix(self) -> np.ndarray:
        a = self.base.adjacency_matrix()
        np.fill_diagonal(a, 0.0)
        return a


class SimpleGraph:
    """Explicit simple graph given by an edge list (used for random-graph
    comparisons and small test fixtures)."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        self.n = n
        seen = set()
        for u, v in edges:
            if u == v:
                raise BadParameter("loops are not allowed in a SimpleGraph")
            seen.add((min(u, v), max(u, v)))
        self.edges = tuple(sorted(seen))
        self._adj = [set() for _ in range(n)]
        for u, v in self.edges:
            self._adj[u].add(v)
            self._adj[v].add(u)

    def adjacent(self, x: int, y: int) -> bool:
        return y in self._adj[x]

    def neighbors(self, x: int) -> np.ndarray:
        return np.array(sorted(self._adj[x]), dtype=np.int64)

    def loop_count(self) -> int:
        return 0

    def adjacency_matrix(self) -> np.ndarray:
        if self.n > MAX_DENSE_VERTICES:
            raise SizeExceeded(f"will not materialize a {self.n}x{self.n} matrix")
        a = np.zeros((self.n, self.n), dtype=np.float64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a


@dataclass(frozen=True)
class RandomGraph:
    """A sampled Erdos-Renyi graph G(n, p_edge), reproducible from the seed."""

    n: int
    p_edge: float
    seed: int
    edges: tuple[tuple[int, int], ...]

    def graph(self) -> SimpleGraph:
        return SimpleGraph(self.n, self.edges)


def build(sum_set: SumSet) -> CayleySumGraph:
    return CayleySumGraph(sum_set)


def sample_er(n: int, p_edge: float, seed: int) -> RandomGraph:
    """G(n, p_edge): each unordered pair independently, seeded PCG64."""
    if n > MAX_DENSE_VERTICES:
        raise SizeExceeded(f"random-graph comparisons capped at n = {MAX_DENSE_VERTICES}")
    if not 0 <= p_edge <= 1:
        raise BadParameter(f"edge probability {p_edge} outside [0, 1]")
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, k=1)
    mask = rng.random(len(iu)) < p_edge
    edges = tuple(zip(iu[mask].tolist(), iv[mask].tolist()))
    return RandomGraph(n, p_edge, seed, edges)


# ---------------------------------------------------------------------------
# codegrees and subgraph counts
# ---------------------------------------------------------------------------

def codegree(view, u: int, v: int) -> int:
    """Number of common neighbors of u != v in the loop-deleted view."""
    if u == v:
        raise BadParameter("codegree requires distinct vertices")
    nu = set(view.neighbors(u).tolist()) - {u, v}
    nv = set(view.neighbors(v).tolist()) - {u, v}
    return len(nu & nv)


def _difference_counts(graph: CayleySumGraph) -> tuple[np.ndarray, np.ndarray]:
    """r[d] = ordered pairs of S at difference d; r3[d] = 3-term
    progressions s, s-d, s-2d inside S.  Index 0 is unused downstream."""
    q, n = graph.q, graph.n
    s = graph._s_flat
    r = np.zeros(n, dtype=np.int64)
    r3 = np.zeros(n, dtype=np.int64)
    chunk = max(1, (1 << 22) // max(1, len(s)))
    for lo in range(0, len(s), chunk):
        block = s[lo:lo + chunk]
        d = graph._flat_sub(block[:, None], s[None, :])
        r += np.bincount(d.ravel(), minlength=n)
        # third point 2 s' - s for ordered pair (s, s') at difference d
        third = graph._flat_sub(graph._flat_add(s[None, :], s[None, :]), block[:, None])
        ok = graph._s_lookup[third]
        r3 += np.bincount(d[ok], minlength=n)
    return r, r3


def _choose(m: np.ndarray, k: int) -> np.ndarray:
    m = m.astype(np.int64)
    if k == 2:
        out = m * (m - 1) // 2
    elif k == 3:
        out = m * (m - 1) * (m - 2) // 6
    else:
        raise BadParameter(f"unsupported k = {k}")
    return np.where(m >= k, out, 0)


def _cayley_pattern_sum(graph: CayleySumGraph, k: int) -> int:
    """sum over ordered vertex pairs (x, y), x != y, of C(codeg(x, y), k)
    in the loop-deleted view, via the difference decomposition."""
    n = graph.n
    r, r3 = _difference_counts(graph)
    has_zero = bool(graph._s_lookup[0])
    if graph.field.p == 2:
        # 2x = 0: the correction is 2*[d in S][0 in S], uniform in x
        d_in_s = graph._s_lookup.astype(np.int64)
        n2 = n * (d_in_s if has_zero else np.zeros_like(d_in_s))
        n1 = np.zeros_like(n2)
    else:
        n2 = r3
        n1 = 2 * (r - r3)
    n0 = n - n1 - n2
    total = n0 * _choose(r, k) + n1 * _choose(r - 1, k) + n2 * _choose(r - 2, k)
    total[0] = 0  # d = 0 would be x = y
    return int(total.sum())


def _dense_pattern_sum(adj: np.ndarray, k: int) -> int:
    """Same pairwise codegree sum for an explicit simple adjacency matrix."""
    n = adj.shape[0]
    if n > MAX_DENSE_VERTICES:
        raise SizeExceeded(f"dense codegree route capped at n = {MAX_DENSE_VERTICES}")
    m = adj @ adj
    np.fill_diagonal(m, 0.0)
    counts = np.rint(m).astype(np.int64)
    return int(_choose(counts, k).sum())


def _pattern_sum(graph_like, k: int) -> int:
    if isinstance(graph_like, CayleySumGraph):
        return _cayley_pattern_sum(graph_like, k)
    if isinstance(graph_like, SimpleGraphView):
        return _cayley_pattern_sum(graph_like.base, k)
    if isinstance(graph_like, RandomGraph):
        return _dense_pattern_sum(graph_like.graph().adjacency_matrix(), k)
    return _dense_pattern_sum(graph_like.adjacency_matrix(), k)


def count_C4(graph_like) -> int:
    """Exact number of 4-cycles in the loop-deleted view: every C4 is
    counted once per opposite pair and once per unordered choice of its
    two common neighbors, so it equals the ordered pair sum over 4."""
    return _pattern_sum(graph_like, 2) // 4


def count_K23(graph_like) -> int:
    """Exact number of K_{2,3} subgraphs (unordered 2-side and 3-side)."""
    return _pattern_sum(graph_like, 3) // 2


def max_codegree(graph_like) -> int:
    """Largest codegree over distinct vertex pairs in the loop-deleted view
    (<= 2 everywhere is equivalent to K_{2,3}-freeness)."""
    if isinstance(graph_like, (CayleySumGraph, SimpleGraphView)):
        graph = graph_like.base if isinstance(graph_like, SimpleGraphView) else graph_like
        r, _ = _difference_counts(graph)
        r = r.copy()
        r[0] = 0
        if graph.field.p == 2 and graph._s_lookup[0]:
            # every pair at difference d in S has its codegree lowered by 2
            r[graph._s_flat] -= 2
        # in odd characteristic some pair always attains the uncorrected r(d):
        # the corrected population n0 = q^2 - 2r + r3 > 0 since r <= q << q^2
        return int(r.max())
    adj = graph_like.adjacency_matrix() if not isinstance(graph_like, RandomGraph) \
        else graph_like.graph().adjacency_matrix()
    m = adj @ adj
    np.fill_diagonal(m, 0.0)
    return int(m.max())


def brute_force_count(graph_like, pattern: str) -> int:
    """Independent oracle: exhaustive vertex-tuple enumeration (n <= 60),
    deduplicated by pattern automorphisms."""
    view = graph_like.simple_view() if isinstance(graph_like, CayleySumGraph) else graph_like
    if isinstance(view, RandomGraph):
        view = view.graph()
    n = view.n
    if n > MAX_BRUTE_VERTICES:
        raise SizeExceeded(f"brute force capped at {MAX_BRUTE_VERTICES} vertices")
    nbr = [frozenset(view.neighbors(x).tolist()) - {x} for x in range(n)]
    adj = lambda u, v: v in nbr[u]
    if pattern == "C4":
        count = 0
        for quad in itertools.combinations(range(n), 4):
            a, b, c, d = quad
            # three ways to pair opposite vertices
            for w, x, y, z in ((a, b, c, d), (a, c, b, d), (a, b, d, c)):
                if adj(w, x) and adj(x, y) and adj(y, z) and adj(z, w):
                    count += 1
        return count
    if pattern == "K23":
        count = 0
        verts = range(n)
        for u, v in itertools.combinations(verts, 2):
            others = [w for w in verts if w != u and w != v]
            for a, b, c in itertools.combinations(others, 3):
                if (adj(u, a) and adj(u, b) and adj(u, c)
                        and adj(v, a) and adj(v, b) and adj(v, c)):
                    count += 1
        return count
    raise BadParameter(f"unknown pattern {pattern!r} (expected 'C4' or 'K23')")


# ---------------------------------------------------------------------------
# component structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Component:
    size: int
    kind: str  # "complete" | "complete_bipartite" | "other"
    label: str  # e.g. "K_9" or "K_9,9"


@dataclass(frozen=True)
class StructureReport:
    n: int
    components: tuple[Component, ...]

    def tally(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.components:
            out[c.label] = out.get(c.label, 0) + 1
        return out

    def __str__(self):
        tally = self.tally()
        return " + ".join(f"{v}x{k}" for k, v in sorted(tally.items()))


def structure_report(graph_like) -> StructureReport:
    """Connected components of the loop-deleted view, each classified by
    exact edge counts and a 2-coloring test."""
    view = graph_like.simple_view() if isinstance(graph_like, CayleySumGraph) else graph_like
    if isinstance(view, RandomGraph):
        view = view.graph()
    n = view.n
    if n > 1 << 20:
        raise SizeExceeded("structure report capped at 2^20 vertices")
    seen = np.zeros(n, dtype=bool)
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        # BFS with 2-coloring
        color = {start: 0}
        queue = deque([start])
        seen[start] = True
        members = [start]
        bipartite = True
        half_edges = 0
        while queue:
            x = queue.popleft()
            for y in view.neighbors(x).tolist():
                half_edges += 1
                if y not in color:
                    color[y] = color[x] ^ 1
                    seen[y] = True
                    members.append(y)
                    queue.append(y)
                elif color[y] == color[x]:
                    bipartite = False
        size = len(members)
        edges = half_edges // 2
        side0 = sum(1 for v in members if color[v] == 0)
        side1 = size - side0
        if edges == size * (size - 1) // 2:
            comps.append(Component(size, "complete", f"K_{size}"))
        elif bipartite and side0 == side1 and edges == side0 * side1 and size >= 2:
            comps.append(Component(size, "complete_bipartite", f"K_{side0},{side1}"))
        else:
            comps.append(Component(size, "other", f"other_{size}"))
    return StructureReport(n, tuple(comps))


# ---------------------------------------------------------------------------
# independence
# ---------------------------------------------------------------------------

def hoffman_bound(n: int, degree: int, lambda_max_nontrivial: float) -> float:
    """Spectral independence bound n * lambda / d."""
    if degree <= 0:
        raise BadParameter("degree must be positive")
    return n * lambda_max_nontrivial / degree


def greedy_independent_set(graph_like, seed: int) -> list[int]:
    """Maximal independent set from a seeded random greedy pass (the
    returned set is re-verifiable: no edge joins two of its members)."""
    view = graph_like.simple_view() if isinstance(graph_like, CayleySumGraph) else graph_like
    if isinstance(view, RandomGraph):
        view = view.graph()
    n = view.n
    if n > 1 << 20:
        raise SizeExceeded("greedy independent set capped at 2^20 vertices")
    order = np.random.default_rng(seed).permutation(n)
    blocked = np.zeros(n, dtype=bool)
    chosen: list[int] = []
    for x in order.tolist():
        if blocked[x]:
            continue
        chosen.append(x)
        blocked[x] = True
        blocked[view.neighbors(x)] = True
    return sorted(chosen)
