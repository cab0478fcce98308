"""DAG and PDAG values, d-separation, covered arrows and Markov equivalence.

Nodes are the dense integers ``0..p-1``. Every graph value is immutable and
hashable, so graphs can be used directly as memoization keys.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import CycleError, InvalidArgumentError

Arrow = tuple[int, int]
Edge = frozenset  # unordered pair of nodes


@dataclass(frozen=True)
class Dag:
    """A directed acyclic graph on nodes ``0..p-1``.

    Acyclicity is checked on construction; an arrow set with a cycle raises
    :class:`CycleError`.
    """

    p: int
    arrows: frozenset[Arrow] = frozenset()

    def __post_init__(self):
        if self.p < 0:
            raise InvalidArgumentError(f"node count must be nonnegative, got {self.p}")
        arrows = frozenset((int(i), int(j)) for i, j in self.arrows)
        for i, j in arrows:
            if not (0 <= i < self.p and 0 <= j < self.p):
                raise InvalidArgumentError(f"arrow {i}->{j} outside nodes 0..{self.p - 1}")
            if i == j:
                raise InvalidArgumentError(f"self-loop on node {i}")
            if (j, i) in arrows:
                raise CycleError(f"arrows {i}->{j} and {j}->{i} both present")
        object.__setattr__(self, "arrows", arrows)
        if len(self.topological_order()) != self.p:
            raise CycleError(f"arrow set {sorted(arrows)} contains a directed cycle")

    def __repr__(self):
        return f"Dag(p={self.p}, arrows={sorted(self.arrows)})"

    def __len__(self):
        return len(self.arrows)

    @property
    def nodes(self) -> range:
        return range(self.p)

    @cached_property
    def _parents(self) -> tuple[frozenset[int], ...]:
        pa: list[set[int]] = [set() for _ in range(self.p)]
        for i, j in self.arrows:
            pa[j].add(i)
        return tuple(frozenset(s) for s in pa)

    @cached_property
    def _children(self) -> tuple[frozenset[int], ...]:
        ch: list[set[int]] = [set() for _ in range(self.p)]
        for i, j in self.arrows:
            ch[i].add(j)
        return tuple(frozenset(s) for s in ch)

    def parents(self, node: int) -> frozenset[int]:
        return self._parents[node]

    def children(self, node: int) -> frozenset[int]:
        return self._children[node]

    def has_arrow(self, i: int, j: int) -> bool:
        return (i, j) in self.arrows

    def adjacent(self, i: int, j: int) -> bool:
        return (i, j) in self.arrows or (j, i) in self.arrows

    def ancestors(self, nodes: Iterable[int]) -> frozenset[int]:
        """Proper ancestors of ``nodes`` (nodes themselves excluded unless reachable)."""
        return self._reach(nodes, self._parents)

    def descendants(self, nodes: Iterable[int]) -> frozenset[int]:
        return self._reach(nodes, self._children)

    @staticmethod
    def _reach(nodes, step) -> frozenset[int]:
        seen: set[int] = set()
        stack = list(nodes)
        while stack:
            for nxt in step[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return frozenset(seen)

    def topological_order(self) -> tuple[int, ...]:
        """Kahn's algorithm, always emitting the smallest available source.

        Returns fewer than ``p`` nodes when the arrows contain a cycle, which
        is how construction detects cycles.
        """
        indeg = [0] * self.p
        children: list[list[int]] = [[] for _ in range(self.p)]
        for i, j in self.arrows:
            indeg[j] += 1
            children[i].append(j)
        heap = [v for v in range(self.p) if indeg[v] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            v = heapq.heappop(heap)
            order.append(v)
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(heap, c)
        return tuple(order)

    def is_consistent_with(self, order: Sequence[int]) -> bool:
        """True if every arrow points forward in ``order``."""
        pos = {v: k for k, v in enumerate(order)}
        return all(pos[i] < pos[j] for i, j in self.arrows)


@dataclass(frozen=True)
class Pdag:
    """A partially directed graph: directed arrows plus undirected edges."""

    p: int
    directed: frozenset[Arrow] = frozenset()
    undirected: frozenset[frozenset[int]] = frozenset()

    def __post_init__(self):
        directed = frozenset((int(i), int(j)) for i, j in self.directed)
        undirected = frozenset(frozenset(int(v) for v in e) for e in self.undirected)
        if any(len(e) != 2 for e in undirected):
            raise InvalidArgumentError("undirected edges must join two distinct nodes")
        if {frozenset(a) for a in directed} & undirected:
            raise InvalidArgumentError("an edge is both directed and undirected")
        object.__setattr__(self, "directed", directed)
        object.__setattr__(self, "undirected", undirected)

    def __repr__(self):
        und = sorted(tuple(sorted(e)) for e in self.undirected)
        return f"Pdag(p={self.p}, directed={sorted(self.directed)}, undirected={und})"


@dataclass(frozen=True)
class InterventionFamily:
    """Ordered intervention targets; regime 0 is always observational."""

    targets: tuple[frozenset[int], ...] = (frozenset(),)

    def __post_init__(self):
        targets = tuple(frozenset(int(v) for v in t) for t in self.targets)
        if not targets:
            raise InvalidArgumentError("an intervention family needs at least one regime")
        if targets[0]:
            raise InvalidArgumentError(
                f"regime 0 must be observational, got targets {sorted(targets[0])}"
            )
        object.__setattr__(self, "targets", targets)

    @classmethod
    def of(cls, *targets: Iterable[int]) -> "InterventionFamily":
        return cls(tuple(frozenset(t) for t in targets))

    def __len__(self):
        return len(self.targets)

    def __getitem__(self, k: int) -> frozenset[int]:
        return self.targets[k]

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.targets)

    def validate_for(self, p: int) -> None:
        for k, t in enumerate(self.targets):
            bad = [v for v in t if not 0 <= v < p]
            if bad:
                raise InvalidArgumentError(f"regime {k} targets {sorted(bad)} outside nodes 0..{p - 1}")


def _as_set(nodes) -> frozenset[int]:
    if isinstance(nodes, int):
        return frozenset((nodes,))
    return frozenset(int(v) for v in nodes)


def _check_disjoint(a, b, c):
    if a & b or a & c or b & c:
        raise InvalidArgumentError(
            f"d-separation sets must be disjoint, got {sorted(a)}, {sorted(b)}, {sorted(c)}"
        )


def d_separated(dag: Dag, a, b, c=(), method: str = "bayes_ball") -> bool:
    """Whether ``a`` and ``b`` are d-separated given ``c`` in ``dag``.

    Parameters
    ----------
    dag : Dag
    a, b, c : int or iterable of int
        Pairwise disjoint node sets; single nodes are accepted.
    method : {"bayes_ball", "moral"}
        Reachability on the DAG, or separation in the moralized ancestral
        graph. Both give identical answers.
    """
    a, b, c = _as_set(a), _as_set(b), _as_set(c)
    _check_disjoint(a, b, c)
    if not a or not b:
        return True
    if method == "bayes_ball":
        return _dsep_bayes_ball(dag, a, b, c)
    if method == "moral":
        return _dsep_moral(dag, a, b, c)
    raise InvalidArgumentError(f"unknown d-separation method {method!r}")


def _dsep_bayes_ball(dag: Dag, a, b, c) -> bool:
    # nodes with a descendant in c (or in c) let a ball bounce at a collider
    opens_collider = c | dag.ancestors(c)
    # direction "up": ball arrived from a child; "down": from a parent
    queue = deque((v, "up") for v in a)
    visited = set()
    while queue:
        node, direction = queue.popleft()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node in b and node not in c:
            return False
        if direction == "up":
            if node in c:
                continue
            for pa in dag.parents(node):
                queue.append((pa, "up"))
            for ch in dag.children(node):
                queue.append((ch, "down"))
        else:
            if node not in c:
                for ch in dag.children(node):
                    queue.append((ch, "down"))
            if node in opens_collider:
                for pa in dag.parents(node):
                    queue.append((pa, "up"))
    return True


def _dsep_moral(dag: Dag, a, b, c) -> bool:
    keep = a | b | c
    keep = keep | dag.ancestors(keep)
    nbrs: dict[int, set[int]] = {v: set() for v in keep}
    for v in keep:
        pa = [u for u in dag.parents(v) if u in keep]
        for u in pa:
            nbrs[u].add(v)
            nbrs[v].add(u)
        for u, w in itertools.combinations(pa, 2):
            nbrs[u].add(w)
            nbrs[w].add(u)
    seen = set(a)
    stack = list(a)
    while stack:
        v = stack.pop()
        if v in b:
            return False
        for u in nbrs[v]:
            if u not in seen and u not in c:
                seen.add(u)
                stack.append(u)
    return True


def interventional_dag(dag: Dag, target: Iterable[int]) -> Dag:
    """Remove every arrow pointing into an intervened node."""
    target = _as_set(target)
    if any(not 0 <= v < dag.p for v in target):
        raise InvalidArgumentError(f"targets {sorted(target)} outside nodes 0..{dag.p - 1}")
    return Dag(dag.p, frozenset((i, j) for i, j in dag.arrows if j not in target))


def covered_arrows(dag: Dag) -> frozenset[Arrow]:
    return frozenset(
        (i, j) for i, j in dag.arrows if dag.parents(j) == dag.parents(i) | {i}
    )


def is_covered(dag: Dag, arrow: Arrow) -> bool:
    i, j = arrow
    return dag.has_arrow(i, j) and dag.parents(j) == dag.parents(i) | {i}


def reverse_arrow(dag: Dag, arrow: Arrow) -> Dag:
    """Flip one arrow without any legality check beyond acyclicity."""
    i, j = arrow
    return Dag(dag.p, (dag.arrows - {(i, j)}) | {(j, i)})


def skeleton(dag: Dag | Pdag) -> frozenset[frozenset[int]]:
    if isinstance(dag, Pdag):
        return frozenset(frozenset(a) for a in dag.directed) | dag.undirected
    return frozenset(frozenset(a) for a in dag.arrows)


def immoralities(dag: Dag) -> frozenset[tuple[frozenset[int], int]]:
    """All v-structures ``i -> k <- j`` with ``i`` and ``j`` non-adjacent.

    Each is stored as ``(frozenset({i, j}), k)`` so the spouses are unordered.
    """
    found = set()
    for k in dag.nodes:
        for i, j in itertools.combinations(sorted(dag.parents(k)), 2):
            if not dag.adjacent(i, j):
                found.add((frozenset((i, j)), k))
    return frozenset(found)


def _same_p(g: Dag, h: Dag):
    if g.p != h.p:
        raise InvalidArgumentError(f"graphs have different node counts ({g.p} vs {h.p})")


def markov_equivalent(g: Dag, h: Dag) -> bool:
    _same_p(g, h)
    return skeleton(g) == skeleton(h) and immoralities(g) == immoralities(h)


def i_markov_equivalent(g: Dag, h: Dag, family: InterventionFamily) -> bool:
    """Markov equivalence plus equal skeletons of every intervention DAG."""
    _same_p(g, h)
    family.validate_for(g.p)
    if not markov_equivalent(g, h):
        return False
    return all(
        skeleton(interventional_dag(g, t)) == skeleton(interventional_dag(h, t)) for t in family
    )


def markov_equivalence_class(dag: Dag) -> frozenset[Dag]:
    """Every DAG reachable from ``dag`` by covered-arrow reversals.

    By the transformational characterization of Markov equivalence this is the
    whole equivalence class. The cost grows with the class size, so this is
    meant for small or sparse graphs.
    """
    seen = {dag}
    queue = deque([dag])
    while queue:
        g = queue.popleft()
        for arrow in covered_arrows(g):
            h = reverse_arrow(g, arrow)
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return frozenset(seen)


def _common_orientation(p: int, members: Iterable[Dag], skel) -> Pdag:
    members = list(members)
    directed = frozenset.intersection(*(m.arrows for m in members))
    undirected = skel - {frozenset(a) for a in directed}
    return Pdag(p, directed, undirected)


def cpdag(dag: Dag) -> Pdag:
    """Essential graph: arrows oriented alike in every Markov-equivalent DAG."""
    return _common_orientation(dag.p, markov_equivalence_class(dag), skeleton(dag))


def i_markov_equivalence_class(dag: Dag, family: InterventionFamily) -> frozenset[Dag]:
    return frozenset(
        h for h in markov_equivalence_class(dag) if i_markov_equivalent(dag, h, family)
    )


def i_essential_graph(dag: Dag, family: InterventionFamily) -> Pdag:
    """Arrows shared by every member of the interventional equivalence class."""
    family.validate_for(dag.p)
    return _common_orientation(dag.p, i_markov_equivalence_class(dag, family), skeleton(dag))


def enumerate_dags(p: int) -> Iterator[Dag]:
    """Yield every labelled DAG on ``p`` nodes (1, 1, 3, 25, 543, 29281, ...)."""
    pairs = list(itertools.combinations(range(p), 2))
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        arrows = []
        for (i, j), c in zip(pairs, choice):
            if c == 1:
                arrows.append((i, j))
            elif c == 2:
                arrows.append((j, i))
        try:
            yield Dag(p, frozenset(arrows))
        except CycleError:
            continue
