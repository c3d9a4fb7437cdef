"""Explicit-state reasoning over the fully built induced preference graph.

This is the ground-truth engine: every outcome becomes a node, every
improving flip an edge, and the four queries are answered by breadth-first
search and strongly connected components.  It is exact but only usable for
small specifications, so graph construction refuses anything above
``node_limit`` outcomes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import OutcomeMismatch, TooLarge, VariableMismatch
from .model import Outcome, PreferenceSpec, id_key
from .semantics import Flip, compile_spec

DEFAULT_NODE_LIMIT = 2 ** 20


@dataclass
class InducedPreferenceGraph:
    spec: PreferenceSpec
    nodes: list[tuple]
    index: dict[tuple, int]
    # adjacency[u] maps successor index -> sorted tuple of licensing ids
    adjacency: list[dict[int, tuple[str, ...]]] = field(repr=False)

    @property
    def edge_count(self) -> int:
        """Number of distinct (worse, better) outcome pairs."""
        return sum(len(a) for a in self.adjacency)

    @property
    def flip_count(self) -> int:
        return sum(len(ids) for a in self.adjacency for ids in a.values())

    def outcome(self, i: int) -> Outcome:
        return Outcome(tuple(zip(self.spec.variable_names, self.nodes[i])))

    def index_of(self, outcome: Outcome) -> int:
        if outcome.names != self.spec.variable_names:
            raise OutcomeMismatch(f"outcome {outcome} does not fit spec {self.spec.name!r}")
        try:
            return self.index[outcome.values]
        except KeyError:
            raise OutcomeMismatch(f"outcome {outcome} has values outside the domains") from None

    def flip(self, u: int, v: int) -> Flip:
        return Flip(self.outcome(u), self.outcome(v), self.adjacency[u][v][0])

    def edges(self):
        for u, succ in enumerate(self.adjacency):
            for v, ids in sorted(succ.items()):
                for sid in ids:
                    yield Flip(self.outcome(u), self.outcome(v), sid)

    def pairs(self):
        for u, succ in enumerate(self.adjacency):
            for v in sorted(succ):
                yield u, v

    def dump(self) -> str:
        """Plain-text edge list, one ``worse -> better : ids`` line per pair."""
        lines = [f"# {self.spec.name}: {len(self.nodes)} outcomes, {self.edge_count} edges"]
        for u, v in self.pairs():
            ids = ",".join(self.adjacency[u][v])
            lines.append(f"{self.outcome(u)} -> {self.outcome(v)} : {ids}")
        return "\n".join(lines) + "\n"


def build_ipg(spec: PreferenceSpec, node_limit: int = DEFAULT_NODE_LIMIT) -> InducedPreferenceGraph:
    total = spec.outcome_count
    if total > node_limit:
        raise TooLarge(
            f"{spec.name!r} has {total} outcomes, above the explicit limit of {node_limit}"
        )
    nodes = [o.values for o in spec.outcomes()]
    index = {n: i for i, n in enumerate(nodes)}
    domains = [v.domain for v in spec.variables]
    compiled = compile_spec(spec)
    adjacency: list[dict[int, tuple[str, ...]]] = []
    for beta in nodes:
        succ: dict[int, set[str]] = {}
        for cs in compiled:
            for alpha in cs.successors(beta, domains):
                succ.setdefault(index[alpha], set()).add(cs.id)
        adjacency.append({v: tuple(sorted(ids, key=id_key)) for v, ids in succ.items()})
    return InducedPreferenceGraph(spec, nodes, index, adjacency)


def _graph(spec_or_graph, node_limit):
    if isinstance(spec_or_graph, InducedPreferenceGraph):
        return spec_or_graph
    return build_ipg(spec_or_graph, node_limit)


def _bfs_path(g: InducedPreferenceGraph, src: int, dst: int, allowed=None) -> list[int] | None:
    """Shortest path of at least one edge from src to dst, as node indices."""
    parent: dict[int, int] = {}
    queue = deque([src])
    seen = {src} if src != dst else set()
    while queue:
        u = queue.popleft()
        for v in sorted(g.adjacency[u]):
            if allowed is not None and v not in allowed:
                continue
            if v in parent or (v in seen and v != dst):
                continue
            parent[v] = u
            if v == dst:
                path = [dst]
                cur = dst
                while True:
                    cur = parent[cur]
                    path.append(cur)
                    if cur == src:
                        break
                return path[::-1]
            seen.add(v)
            queue.append(v)
    return None


def _path_flips(g: InducedPreferenceGraph, path: list[int]) -> list[Flip]:
    return [g.flip(u, v) for u, v in zip(path, path[1:])]


def reachable_from(g: InducedPreferenceGraph, src: int) -> set[int]:
    """Nodes reachable from src through one or more flips."""
    out: set[int] = set()
    stack = list(g.adjacency[src])
    while stack:
        u = stack.pop()
        if u in out:
            continue
        out.add(u)
        stack.extend(v for v in g.adjacency[u] if v not in out)
    return out


def dominates_explicit(spec, better: Outcome, worse: Outcome, node_limit: int = DEFAULT_NODE_LIMIT):
    """Is ``better`` reachable from ``worse`` by improving flips?

    Returns ``(answer, flips)`` where flips is a shortest witness path or
    None.  An outcome never dominates itself.
    """
    g = _graph(spec, node_limit)
    a, b = g.index_of(better), g.index_of(worse)
    if a == b:
        return False, None
    path = _bfs_path(g, b, a)
    if path is None:
        return False, None
    return True, _path_flips(g, path)


def strongly_connected_components(adjacency) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components come out in reverse topological order."""
    n = len(adjacency)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(sorted(adjacency[root])))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            u, it = work[-1]
            advanced = False
            for v in it:
                if index[v] == -1:
                    index[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack[v] = True
                    work.append((v, iter(sorted(adjacency[v]))))
                    advanced = True
                    break
                if on_stack[v]:
                    low[u] = min(low[u], index[v])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[u])
            if low[u] == index[u]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == u:
                        break
                comps.append(sorted(comp))
    return comps


def consistent_explicit(spec, node_limit: int = DEFAULT_NODE_LIMIT):
    """Is the induced preference graph acyclic?

    Returns ``(answer, cycle)``; the cycle is a list of flips whose last
    target equals the first source, starting at the smallest outcome of the
    first nontrivial component.
    """
    g = _graph(spec, node_limit)
    cyclic = [c for c in strongly_connected_components(g.adjacency) if len(c) > 1]
    if not cyclic:
        return True, None
    comp = min(cyclic, key=lambda c: c[0])
    start = comp[0]
    path = _bfs_path(g, start, start, allowed=set(comp))
    return False, _path_flips(g, path)


def subsumes_explicit(p1: PreferenceSpec, p2: PreferenceSpec, node_limit: int = DEFAULT_NODE_LIMIT):
    """Does every preference of ``p1`` also hold in ``p2``?

    Checking the edges of IPG(p1) suffices because reachability is
    transitive.  Returns ``(answer, counter_flip)``.
    """
    if not p1.same_variables(p2):
        raise VariableMismatch(f"{p1.name!r} and {p2.name!r} declare different variables")
    g1 = build_ipg(p1, node_limit)
    g2 = build_ipg(p2, node_limit)
    cache: dict[int, set[int]] = {}
    for u, v in g1.pairs():
        if v in g2.adjacency[u]:
            continue
        if u not in cache:
            cache[u] = reachable_from(g2, u)
        if v not in cache[u]:
            return False, g1.flip(u, v)
    return True, None


P1_NOT_IN_P2 = "P1_NOT_IN_P2"
P2_NOT_IN_P1 = "P2_NOT_IN_P1"


def equivalent_explicit(p1: PreferenceSpec, p2: PreferenceSpec, node_limit: int = DEFAULT_NODE_LIMIT):
    """Returns ``(answer, counter_flip, direction)``."""
    ok, flip = subsumes_explicit(p1, p2, node_limit)
    if not ok:
        return False, flip, P1_NOT_IN_P2
    ok, flip = subsumes_explicit(p2, p1, node_limit)
    if not ok:
        return False, flip, P2_NOT_IN_P1
    return True, None, None
