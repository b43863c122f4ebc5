"""Network bookkeeping and interference-graph analysis.

Vertices are BSS ids (the transmission AP_m -> STA_m); a directed edge
``m -> n`` means AP_m's radiation reaches STA_n.  All traversals visit
vertices in ascending id order so results are reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from .errors import BudgetExceededError, IncompleteStateError, NotADAGError
from .mimo import as_channel, svd_beamform

Edge = Tuple[int, int]
BRUTE_FORCE_BUDGET = 20


@dataclass
class NetworkState:
    """Connection matrix ``C`` (``C[n, m] == 1`` iff STA_n hears AP_m),
    transmit-status vector ``T`` and the channel ``H_mn`` for each hearing
    pair, keyed ``(m, n)``; ``(m, m)`` is AP_m's own link."""

    connection: np.ndarray
    transmitting: np.ndarray
    channels: Dict[Edge, np.ndarray] = field(default_factory=dict)
    p_t: float = 1.0

    def __post_init__(self):
        C = np.asarray(self.connection, dtype=int)
        T = np.asarray(self.transmitting, dtype=int).reshape(-1)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise ValueError("connection matrix must be square")
        if T.shape[0] != C.shape[0]:
            raise ValueError("transmit vector length must match the connection matrix")
        if not np.all(np.isin(C, (0, 1))) or not np.all(np.isin(T, (0, 1))):
            raise ValueError("C and T must be binary")
        if not np.all(np.diag(C) == 1):
            raise ValueError("every STA hears its own AP: diag(C) must be all ones")
        for (m, n) in self.channels:
            if not C[n, m]:
                raise ValueError(f"channel ({m}, {n}) given for a pair that does not hear each other")
        self.connection, self.transmitting = C, T

    @property
    def K(self) -> int:
        return self.connection.shape[0]

    def channel(self, m: int, n: int) -> np.ndarray:
        try:
            return self.channels[(m, n)]
        except KeyError:
            raise IncompleteStateError(f"missing channel from AP{m} to STA{n}") from None


def adjacency(state: NetworkState) -> np.ndarray:
    """Interference matrix ``diag(T) (C - I)``."""
    C, T = state.connection, state.transmitting
    return np.diag(T) @ (C - np.eye(state.K, dtype=int))


@dataclass(frozen=True)
class InterferenceGraph:
    vertices: Tuple[int, ...]
    weights: Mapping[Edge, float] = field(default_factory=dict)

    def __post_init__(self):
        vs = tuple(sorted(set(int(v) for v in self.vertices)))
        object.__setattr__(self, "vertices", vs)
        w = {(int(a), int(b)): float(x) for (a, b), x in self.weights.items()}
        vset = set(vs)
        for a, b in w:
            if a == b:
                raise ValueError(f"self loop on vertex {a}")
            if a not in vset or b not in vset:
                raise ValueError(f"edge ({a}, {b}) has an endpoint outside the vertex set")
        object.__setattr__(self, "weights", w)
        succ: Dict[int, List[int]] = {v: [] for v in vs}
        pred: Dict[int, List[int]] = {v: [] for v in vs}
        for a, b in sorted(w):
            succ[a].append(b)
            pred[b].append(a)
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_pred", pred)

    @property
    def edges(self) -> List[Tuple[int, int, float]]:
        return [(a, b, self.weights[(a, b)]) for a, b in sorted(self.weights)]

    def edge_set(self) -> frozenset:
        return frozenset(self.weights)

    def successors(self, v: int) -> List[int]:
        return self._succ[v]

    def predecessors(self, v: int) -> List[int]:
        return self._pred[v]

    def indegree(self, v: int) -> int:
        return len(self._pred[v])

    def outdegree(self, v: int) -> int:
        return len(self._succ[v])

    def out_weight(self, vs: Iterable[int]) -> float:
        return math.fsum(self.weights[(v, w)] for v in vs for w in self._succ[v])

    def subgraph(self, vs: Iterable[int]) -> "InterferenceGraph":
        keep = set(vs) & set(self.vertices)
        return InterferenceGraph(
            tuple(keep), {e: x for e, x in self.weights.items() if e[0] in keep and e[1] in keep}
        )

    def without(self, vs: Iterable[int]) -> "InterferenceGraph":
        drop = set(vs)
        return self.subgraph(v for v in self.vertices if v not in drop)


def topology_graph(state: NetworkState) -> InterferenceGraph:
    """Unit-weight interference graph; needs no channels."""
    A = adjacency(state)
    T = state.transmitting
    vertices = [m for m in range(state.K) if T[m]]
    # idle APs radiate nothing, so edges also require an active source
    edges = {(m, n): 1.0 for n in range(state.K) for m in range(state.K) if A[n, m] and T[m]}
    return InterferenceGraph(tuple(vertices), edges)


def build_graph(state: NetworkState, beamformers: Optional[Mapping] = None) -> InterferenceGraph:
    """Interference graph weighted by pre-filter received interference power
    ``P_T * ||H_mn p_m||^2``.

    ``beamformers`` may supply precomputed :class:`BeamformPair` per AP.
    """
    topo = topology_graph(state)
    bfs = dict(beamformers or {})
    weights = {}
    for m, n in sorted(topo.weights):
        if m not in bfs:
            bfs[m] = svd_beamform(state.channel(m, m))
        h = as_channel(state.channel(m, n)) @ bfs[m].precoder
        weights[(m, n)] = state.p_t * float(np.vdot(h, h).real)
    return InterferenceGraph(topo.vertices, weights)


def _is_acyclic(g: InterferenceGraph, removed=frozenset()) -> bool:
    indeg = {v: 0 for v in g.vertices if v not in removed}
    for a, b in g.weights:
        if a in indeg and b in indeg:
            indeg[b] += 1
    ready = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while ready:
        v = ready.pop()
        seen += 1
        for w in g.successors(v):
            if w in indeg:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
    return seen == len(indeg)


def detect_cycles(g: InterferenceGraph) -> List[Tuple[int, ...]]:
    """Cycles closed by the back edges of a depth-first search.

    Each cycle starts at its smallest vertex; the list is empty iff ``g``
    is acyclic.
    """
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in g.vertices}
    found = []
    seen = set()
    for root in g.vertices:
        if color[root] != WHITE:
            continue
        path = [root]
        color[root] = GRAY
        stack = [iter(g.successors(root))]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                color[path.pop()] = BLACK
                continue
            if color[nxt] == WHITE:
                color[nxt] = GRAY
                path.append(nxt)
                stack.append(iter(g.successors(nxt)))
            elif color[nxt] == GRAY:
                cyc = path[path.index(nxt):]
                k = cyc.index(min(cyc))
                cyc = tuple(cyc[k:] + cyc[:k])
                if cyc not in seen:
                    seen.add(cyc)
                    found.append(cyc)
    return found


def feasible_for_is(g: InterferenceGraph) -> bool:
    return not detect_cycles(g)


def _on_cycle(g: InterferenceGraph) -> List[int]:
    out = []
    for v in g.vertices:
        stack, visited = list(g.successors(v)), set()
        while stack:
            w = stack.pop()
            if w == v:
                out.append(v)
                break
            if w not in visited:
                visited.add(w)
                stack.extend(g.successors(w))
    return out


@dataclass(frozen=True)
class CycleBreakResult:
    deleted: frozenset
    residual: InterferenceGraph


def break_cycles(g: InterferenceGraph, budget: int = BRUTE_FORCE_BUDGET) -> CycleBreakResult:
    """Exact minimum vertex deletion that leaves ``g`` acyclic.

    Among minimum-size sets the one whose members' outgoing edges carry the
    largest total weight wins; remaining ties go to the lexicographically
    smallest id tuple.
    """
    if len(g.vertices) > budget:
        raise BudgetExceededError(
            f"{len(g.vertices)} vertices exceed the brute-force budget of {budget}; partition the network"
        )
    if _is_acyclic(g):
        return CycleBreakResult(frozenset(), g)
    # a minimum deletion set never contains a vertex that lies on no cycle
    candidates = _on_cycle(g)
    for size in range(1, len(candidates) + 1):
        best, best_w = None, -math.inf
        for combo in itertools.combinations(candidates, size):
            if not _is_acyclic(g, frozenset(combo)):
                continue
            w = g.out_weight(combo)
            if w > best_w:
                best, best_w = combo, w
        if best is not None:
            return CycleBreakResult(frozenset(best), g.without(best))
    raise AssertionError("deleting every cycle vertex always leaves a DAG")


def topological_order(g: InterferenceGraph) -> List[int]:
    """Kahn's algorithm processed layer by layer; each layer ascending."""
    indeg = {v: g.indegree(v) for v in g.vertices}
    layer = sorted(v for v, d in indeg.items() if d == 0)
    order: List[int] = []
    while layer:
        order.extend(layer)
        nxt = []
        for v in layer:
            for w in g.successors(v):
                indeg[w] -= 1
                if indeg[w] == 0:
                    nxt.append(w)
        layer = sorted(nxt)
    if len(order) != len(g.vertices):
        raise NotADAGError("interference graph contains a cycle")
    return order


def connected_components(g: InterferenceGraph) -> List[InterferenceGraph]:
    """Weakly connected components, ordered by smallest vertex id."""
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in g.weights:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: Dict[int, List[int]] = {}
    for v in g.vertices:
        groups.setdefault(find(v), []).append(v)
    return [g.subgraph(groups[r]) for r in sorted(groups)]


def parse_edge_list(text: str) -> InterferenceGraph:
    """Parse ``src dst weight`` lines.  A line holding a single id declares
    an isolated vertex; ``#`` starts a comment."""
    vertices, weights = set(), {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if len(parts) == 1:
                vertices.add(int(parts[0]))
                continue
            if len(parts) != 3:
                raise ValueError
            a, b, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ValueError(f"line {lineno}: expected 'src dst weight', got {raw!r}") from None
        if a < 0 or b < 0:
            raise ValueError(f"line {lineno}: vertex ids must be non-negative")
        if (a, b) in weights:
            raise ValueError(f"line {lineno}: duplicate edge {a} -> {b}")
        vertices.update((a, b))
        weights[(a, b)] = w
    return InterferenceGraph(tuple(vertices), weights)


def format_edge_list(g: InterferenceGraph) -> str:
    lines = [f"{a} {b} {w!r}" for a, b, w in g.edges]
    touched = {v for e in g.weights for v in e}
    lines += [str(v) for v in g.vertices if v not in touched]
    return "\n".join(lines) + "\n"
