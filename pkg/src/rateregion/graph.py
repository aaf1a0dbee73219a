"""Graphs of layered/binned coding schemes.

One node per (post-split) message, holding the codeword variable that
carries it.  Two directed edge kinds connect nodes:

* superposition, bottom -> top: the top codebook is drawn conditionally on
  the bottom codeword, so the top's encoders must all know the bottom
  (``top.tx <= bottom.tx``) and anyone decoding the top must first decode
  the bottom (``top.rx <= bottom.rx``).  Stacking composes: a node is
  effectively superposed on all of its superposition ancestors.
* binning, victim -> binner: the binner re-selects its codeword so that it
  looks jointly drawn with the victim's, which requires the binner's
  encoders to know the victim codeword (``binner.tx <= victim.tx``).

A pair binned against each other in both directions behaves like an
undirected edge; the connected components of such mutual pairs are the
joint-binning classes.  Three structural rules make the mixed graph
equivalent to a DAG: every class is complete under mutual binning, class
members share the same out-of-class parents, and no cycle mixes directed
edges.  `orient` then directs each class's internal edges from lower to
higher node (canonical order) and returns the DAG whose factorization is
the scheme's target distribution.
"""

from __future__ import annotations

import heapq
import itertools
from collections import defaultdict
from dataclasses import dataclass

from .network import MessageId, NetworkSpec, SchemeError

SUPERPOSITION = "superposition"
BINNING = "binning"

_KIND_RANK = {"Q": 0, "U": 1, "X": 2, "Y": 3}


@dataclass(frozen=True)
class Rv:
    """A random variable: the shared sequence Q, a codeword variable U
    (one per message), a channel input X_k, or a channel output Y_z."""

    kind: str
    msg: MessageId | None = None
    index: int | None = None

    def key(self):
        if self.kind == "Q":
            return (0, ())
        if self.kind == "U":
            return (1, self.msg.key())
        return (_KIND_RANK[self.kind], (self.index,))

    def __str__(self) -> str:
        if self.kind == "Q":
            return "Q"
        if self.kind == "U":
            return f"U[{self.msg}]"
        return f"{self.kind}{self.index}"


Q = Rv("Q")


def U(m: MessageId) -> Rv:
    return Rv("U", msg=m)


def X(k: int) -> Rv:
    return Rv("X", index=k)


def Y(z: int) -> Rv:
    return Rv("Y", index=z)


@dataclass(frozen=True)
class Edge:
    """src -> dst.  Superposition: src is the bottom, dst the top.
    Binning: src is the victim, dst the binner."""

    src: MessageId
    dst: MessageId
    kind: str


@dataclass(frozen=True)
class ChainGraph:
    """The mixed graph of a scheme, with joint-binning classes derived
    from mutual binning pairs (one-directional pairs never join a class)."""

    network: NetworkSpec
    nodes: tuple[MessageId, ...]
    sup_edges: tuple[tuple[MessageId, MessageId], ...]  # (bottom, top)
    bin_edges: tuple[tuple[MessageId, MessageId], ...]  # (victim, binner)
    classes: tuple[tuple[MessageId, ...], ...]

    def is_mutual(self, a: MessageId, b: MessageId) -> bool:
        return (a, b) in self.bin_edges and (b, a) in self.bin_edges

    def mutual_pairs(self):
        return [(a, b) for (a, b) in self.bin_edges if (b, a) in self.bin_edges and a.key() < b.key()]

    def one_way_bins(self):
        return [(v, b) for (v, b) in self.bin_edges if (b, v) not in self.bin_edges]

    def class_of(self, node: MessageId) -> tuple[MessageId, ...]:
        for cls in self.classes:
            if node in cls:
                return cls
        raise KeyError(f"{node} is not a node of the graph")


def build(network: NetworkSpec, edges) -> ChainGraph:
    """Construct the scheme graph, rejecting edges that violate the
    encodability/decodability side conditions."""
    nodes = network.messages
    node_set = set(nodes)
    sup: set[tuple[MessageId, MessageId]] = set()
    bins: set[tuple[MessageId, MessageId]] = set()
    for e in edges:
        for endpoint in (e.src, e.dst):
            if endpoint not in node_set:
                raise SchemeError(f"edge endpoint {endpoint} is not a message of the network")
        if e.src == e.dst:
            raise SchemeError(f"self-edge on {e.src}")
        if e.kind == SUPERPOSITION:
            bottom, top = e.src, e.dst
            if not top.tx.issubset(bottom.tx):
                raise SchemeError(
                    f"superposition {bottom} -> {top}: top transmitter set"
                    f" {{{top.tx}}} is not a subset of bottom transmitter set {{{bottom.tx}}}"
                )
            if not top.rx.issubset(bottom.rx):
                raise SchemeError(
                    f"superposition {bottom} -> {top}: top receiver set"
                    f" {{{top.rx}}} is not a subset of bottom receiver set {{{bottom.rx}}}"
                )
            if (bottom, top) in sup:
                raise SchemeError(f"duplicate superposition edge {bottom} -> {top}")
            sup.add((bottom, top))
        elif e.kind == BINNING:
            victim, binner = e.src, e.dst
            if not binner.tx.issubset(victim.tx):
                raise SchemeError(
                    f"binning of {binner} against {victim}: binner transmitter set"
                    f" {{{binner.tx}}} is not a subset of victim transmitter set {{{victim.tx}}}"
                )
            if (victim, binner) in bins:
                raise SchemeError(f"duplicate binning edge {victim} -> {binner}")
            bins.add((victim, binner))
        else:
            raise SchemeError(f"unknown edge kind {e.kind!r}")
    both = {p for p in sup if p in bins} | {(b, a) for (a, b) in sup if (a, b) in bins}
    for a, b in sorted(both, key=lambda p: (p[0].key(), p[1].key())):
        raise SchemeError(f"pair {a}, {b} carries both a superposition and a binning edge")

    # joint-binning classes: connected components of mutual pairs
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v, b in bins:
        if (b, v) in bins:
            ra, rb = find(v), find(b)
            if ra != rb:
                parent[ra] = rb
    groups = defaultdict(list)
    for n in nodes:
        groups[find(n)].append(n)
    classes = tuple(
        sorted(
            (tuple(sorted(g, key=MessageId.key)) for g in groups.values()),
            key=lambda c: c[0].key(),
        )
    )
    return ChainGraph(
        network=network,
        nodes=nodes,
        sup_edges=tuple(sorted(sup, key=lambda p: (p[0].key(), p[1].key()))),
        bin_edges=tuple(sorted(bins, key=lambda p: (p[0].key(), p[1].key()))),
        classes=classes,
    )


def _outside_parents(g: ChainGraph, node: MessageId, cls) -> frozenset[MessageId]:
    cls_set = set(cls)
    ps = {b for (b, t) in g.sup_edges if t == node and b not in cls_set}
    ps |= {v for (v, b) in g.bin_edges if b == node and v not in cls_set}
    return frozenset(ps)


def check_assumptions(g: ChainGraph) -> list[str]:
    """Validate the three structural rules; empty report means all hold.

    1. every joint-binning class is complete under mutual binning;
    2. class members have identical parent sets outside the class;
    3. no semi-directed cycle (any cycle with a directed edge).
    """
    report = []
    for cls in g.classes:
        if len(cls) < 2:
            continue
        for a, b in itertools.combinations(cls, 2):
            if not g.is_mutual(a, b):
                report.append(
                    f"assumption 1: class {{{', '.join(map(str, cls))}}} is not"
                    f" fully connected; {a} and {b} are not mutually binned"
                )
        parent_sets = {m: _outside_parents(g, m, cls) for m in cls}
        reference = parent_sets[cls[0]]
        for m in cls[1:]:
            if parent_sets[m] != reference:
                diff = sorted(parent_sets[m] ^ reference, key=MessageId.key)
                report.append(
                    f"assumption 2: class {{{', '.join(map(str, cls))}}} members"
                    f" {cls[0]} and {m} differ in outside parents:"
                    f" {{{', '.join(map(str, diff))}}}"
                )

    # semi-directed cycles: contract classes, then look for directed cycles
    comp_index = {}
    for i, cls in enumerate(g.classes):
        for n in cls:
            comp_index[n] = i
    arcs = defaultdict(set)
    directed = list(g.sup_edges) + g.one_way_bins()
    for a, b in directed:
        ca, cb = comp_index[a], comp_index[b]
        if ca == cb:
            report.append(
                f"assumption 3: directed edge {a} -> {b} inside joint-binning"
                f" class {{{', '.join(map(str, g.classes[ca]))}}} closes a"
                " semi-directed cycle"
            )
        else:
            arcs[ca].add(cb)

    color = {}
    stack_trace = []

    def dfs(c):
        color[c] = 1
        stack_trace.append(c)
        for d in sorted(arcs[c]):
            if color.get(d) == 1:
                cycle = stack_trace[stack_trace.index(d):] + [d]
                names = " -> ".join(str(g.classes[i][0]) for i in cycle)
                report.append(f"assumption 3: semi-directed cycle {names}")
            elif d not in color:
                dfs(d)
        stack_trace.pop()
        color[c] = 2

    for c in range(len(g.classes)):
        if c not in color:
            dfs(c)
    return report


@dataclass(frozen=True)
class Dag:
    """The oriented form of a valid scheme graph.

    ``bin_edges`` holds the oriented dependency parents introduced by
    binning (one-directional edges plus each class's canonical low-to-high
    orientation); ``graph`` keeps the original mixed graph so that
    bin-index ownership stays queryable after orientation.
    """

    graph: ChainGraph
    nodes: tuple[MessageId, ...]
    sup_edges: tuple[tuple[MessageId, MessageId], ...]
    bin_edges: tuple[tuple[MessageId, MessageId], ...]  # (parent, child)
    topo: tuple[MessageId, ...]

    @property
    def network(self) -> NetworkSpec:
        return self.graph.network

    def sup_parents(self, n: MessageId) -> frozenset[MessageId]:
        return frozenset(b for (b, t) in self.sup_edges if t == n)

    def bin_parents(self, n: MessageId) -> frozenset[MessageId]:
        return frozenset(p for (p, c) in self.bin_edges if c == n)

    def parents(self, n: MessageId) -> frozenset[MessageId]:
        return self.sup_parents(n) | self.bin_parents(n)

    def sup_ancestors(self, n: MessageId) -> frozenset[MessageId]:
        """All nodes ``n`` is (transitively) stacked on."""
        seen: set[MessageId] = set()
        frontier = [n]
        while frontier:
            x = frontier.pop()
            for b in self.sup_parents(x):
                if b not in seen:
                    seen.add(b)
                    frontier.append(b)
        return frozenset(seen)

    def sup_descendants(self, n: MessageId) -> frozenset[MessageId]:
        """All nodes (transitively) stacked on ``n``."""
        seen: set[MessageId] = set()
        frontier = [n]
        while frontier:
            x = frontier.pop()
            for (b, t) in self.sup_edges:
                if b == x and t not in seen:
                    seen.add(t)
                    frontier.append(t)
        return frozenset(seen)


def orient(g: ChainGraph) -> Dag:
    """Orient every joint-binning class low -> high in canonical node order.

    Requires `check_assumptions` to pass; under those rules every acyclic
    orientation of a class is equivalent, so the canonical one is chosen
    for determinism.
    """
    problems = check_assumptions(g)
    if problems:
        raise SchemeError("graph violates structural assumptions:\n" + "\n".join(problems))
    oriented = set(g.one_way_bins())
    for cls in g.classes:
        for a, b in itertools.combinations(cls, 2):  # cls is canonically sorted
            oriented.add((a, b))
    bin_edges = tuple(sorted(oriented, key=lambda p: (p[0].key(), p[1].key())))

    children = defaultdict(list)
    indegree = {n: 0 for n in g.nodes}
    for a, b in list(g.sup_edges) + list(bin_edges):
        children[a].append(b)
        indegree[b] += 1
    heap = [n.key() for n in g.nodes if indegree[n] == 0]
    by_key = {n.key(): n for n in g.nodes}
    heapq.heapify(heap)
    topo = []
    while heap:
        n = by_key[heapq.heappop(heap)]
        topo.append(n)
        for c in children[n]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(heap, c.key())
    assert len(topo) == len(g.nodes), "orientation produced a cycle"
    return Dag(graph=g, nodes=g.nodes, sup_edges=g.sup_edges, bin_edges=bin_edges, topo=tuple(topo))


@dataclass(frozen=True)
class Factorization:
    """One factor per node, in topological order: P(U | parents, Q)."""

    factors: tuple[tuple[MessageId, tuple[Rv, ...]], ...]

    def parents_of(self, node: MessageId) -> tuple[Rv, ...]:
        for n, ps in self.factors:
            if n == node:
                return ps
        raise KeyError(f"{node} has no factor")

    def nodes(self) -> tuple[MessageId, ...]:
        return tuple(n for n, _ in self.factors)

    def pretty(self) -> list[str]:
        out = []
        for node, ps in self.factors:
            cond = ", ".join(str(p) for p in ps)
            out.append(f"P({U(node)} | {cond})")
        return out


def factorize(dag: Dag) -> Factorization:
    """Read the target-distribution factorization off the oriented graph."""
    factors = []
    for node in dag.topo:
        parents = [U(p) for p in dag.parents(node)]
        parents.append(Q)
        factors.append((node, tuple(sorted(parents, key=Rv.key))))
    return Factorization(tuple(factors))


def d_separated(dag: Dag, a, b, c) -> bool:
    """Whether A and B are independent given C in every distribution that
    factorizes over the oriented graph (Q is a root parent of every node).

    Uses the ancestral moral graph: keep the ancestors of A, B, C, marry
    co-parents, drop C, and test connectivity.
    """
    a, b, c = frozenset(a), frozenset(b), frozenset(c)
    if a & b or a & c or b & c:
        raise ValueError("d-separation query sets must be pairwise disjoint")
    known = {Q} | {U(n) for n in dag.nodes}
    unknown = (a | b | c) - known
    if unknown:
        names = ", ".join(sorted(str(v) for v in unknown))
        raise ValueError(f"unknown variable(s) in d-separation query: {names}")
    if not a or not b:
        return True

    parents = {Q: frozenset()}
    for n in dag.nodes:
        parents[U(n)] = frozenset(U(p) for p in dag.parents(n)) | {Q}

    relevant: set[Rv] = set()
    frontier = list(a | b | c)
    while frontier:
        v = frontier.pop()
        if v in relevant:
            continue
        relevant.add(v)
        frontier.extend(parents[v])

    neighbors = defaultdict(set)
    for v in relevant:
        ps = [p for p in parents[v] if p in relevant]
        for p in ps:
            neighbors[v].add(p)
            neighbors[p].add(v)
        for p1, p2 in itertools.combinations(ps, 2):
            neighbors[p1].add(p2)
            neighbors[p2].add(p1)

    blocked = set(c)
    reached = set()
    frontier = [v for v in a]
    while frontier:
        v = frontier.pop()
        if v in reached or v in blocked:
            continue
        reached.add(v)
        frontier.extend(neighbors[v] - blocked)
    return not (reached & b)
