"""Two-terminal reliability graphs built from monotone expressions.

The construction factors out events common to every clause as a chain of
mandatory edges, then splits the remaining clauses by their smallest
shared event and recurses with an explicit stack.  Each intermediate
vertex stands for the residual clause family still to be satisfied on the
way to ``T``; two vertices are the same exactly when their residual
families coincide.  Vertices with identical incoming (then outgoing) edge
sets are merged afterwards until nothing changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import InconsistencyError
from .expr_core import MonotoneExpression, minimal_transversals, minimize_clauses

SOURCE, SINK = "S", "T"


@dataclass(frozen=True)
class ReliabilityGraph:
    """Directed acyclic multigraph; ``edges`` are ``(from, to, event)`` triples."""

    n_events: int
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, int], ...]
    source: str = SOURCE
    sink: str = SINK

    def __post_init__(self):
        vs = set(self.vertices)
        for u, v, lab in self.edges:
            if u not in vs or v not in vs:
                raise InconsistencyError(f"edge {u}->{v} uses an unknown vertex")
            if not 1 <= lab <= self.n_events:
                raise InconsistencyError(f"edge label {lab} outside [1, {self.n_events}]")
            if v == self.source or u == self.sink:
                raise InconsistencyError("edges may not enter S or leave T")

    def out_edges(self) -> dict[str, list[tuple[str, int]]]:
        out: dict[str, list[tuple[str, int]]] = {v: [] for v in self.vertices}
        for u, v, lab in self.edges:
            out[u].append((v, lab))
        return out

    def topological_order(self) -> list[str]:
        indeg = {v: 0 for v in self.vertices}
        for _, v, _ in self.edges:
            indeg[v] += 1
        out = self.out_edges()
        ready = sorted(v for v, d in indeg.items() if d == 0)
        order = []
        while ready:
            u = ready.pop(0)
            order.append(u)
            for v, _ in out[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    ready.append(v)
            ready.sort()
        if len(order) != len(self.vertices):
            raise InconsistencyError("graph contains a cycle")
        return order


def _family(clauses: Iterable[frozenset]) -> frozenset:
    return frozenset(frozenset(c) for c in clauses)


def _label(fam: frozenset) -> str:
    return ",".join(str(e) for e in sorted(frozenset().union(*fam)))


def _build(expr: MonotoneExpression) -> tuple[set, frozenset, frozenset]:
    """Literal stack construction; vertices are residual clause families."""
    root = _family(expr.clauses)
    sink = frozenset([frozenset()])
    edges: set = set()
    seen = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        common = frozenset.intersection(*v)
        for s in sorted(common):
            nxt = _family(c - {s} for c in v)
            edges.add((v, nxt, s))
            seen.add(nxt)
            v = nxt
        if v == sink:
            continue
        remaining = set(v)
        for s in sorted(frozenset().union(*v)):
            part = [c for c in remaining if s in c]
            if not part:
                continue
            remaining.difference_update(part)
            child = _family(c - {s} for c in part)
            edges.add((v, child, s))
            if child not in seen:
                seen.add(child)
                stack.append(child)
    return edges, root, sink


def _merge_pass(edges: set, keep: set, incoming: bool) -> tuple[set, bool]:
    """Identify vertices sharing the same in-edge (or out-edge) multiset."""
    signature: dict = {}
    for u, v, lab in edges:
        if incoming:
            signature.setdefault(v, set()).add((u, lab))
        else:
            signature.setdefault(u, set()).add((v, lab))
    groups: dict = {}
    for vert, sig in signature.items():
        if vert in keep:
            continue
        groups.setdefault(frozenset(sig), []).append(vert)
    rename = {}
    for members in groups.values():
        if len(members) > 1:
            members.sort(key=_sort_key)
            for m in members[1:]:
                rename[m] = members[0]
    if not rename:
        return edges, False
    merged = {(rename.get(u, u), rename.get(v, v), lab) for u, v, lab in edges}
    return merged, True


def _sort_key(fam: frozenset):
    return (_label(fam), sorted(sorted(c) for c in fam))


def sat_to_graph(expr: MonotoneExpression, merge: bool = True) -> ReliabilityGraph:
    edges, root, sink = _build(expr)
    if merge:
        changed = True
        while changed:
            edges, a = _merge_pass(edges, {root, sink}, incoming=True)
            edges, b = _merge_pass(edges, {root, sink}, incoming=False)
            changed = a or b
    touched = {u for u, _, _ in edges} | {v for _, v, _ in edges}
    inner = sorted(touched - {root, sink}, key=_sort_key)
    names = {root: SOURCE, sink: SINK}
    used: dict[str, int] = {}
    for fam in inner:
        base = _label(fam)
        used[base] = used.get(base, 0) + 1
        names[fam] = base if used[base] == 1 else f"{base}#{used[base]}"
    vertices = [SOURCE] + [names[f] for f in inner] + [SINK]
    named = sorted((names[u], names[v], lab) for u, v, lab in edges)
    return ReliabilityGraph(expr.n_events, tuple(vertices), tuple(named))


def enumerate_paths(graph: ReliabilityGraph) -> tuple[frozenset[int], ...]:
    """Label sets of every simple S->T path."""
    graph.topological_order()  # raises on cycles
    out = graph.out_edges()
    found: set[frozenset[int]] = set()

    def walk(u: str, labels: frozenset) -> None:
        if u == graph.sink:
            found.add(labels)
            return
        for v, lab in out[u]:
            walk(v, labels | {lab})

    walk(graph.source, frozenset())
    return tuple(sorted(found, key=lambda c: (sorted(c), len(c))))


def min_cutsets(graph: ReliabilityGraph) -> tuple[frozenset[int], ...]:
    """Minimal event sets whose removal disconnects S from T."""
    return minimal_transversals(minimize_clauses(enumerate_paths(graph)))


def _quote(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def export_dot(graph: ReliabilityGraph, name: str = "reliability") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for v in graph.vertices:
        if v == graph.source:
            attrs = "shape=box, style=bold"
        elif v == graph.sink:
            attrs = "shape=doublecircle"
        else:
            attrs = "shape=circle"
        lines.append(f"  {_quote(v)} [{attrs}];")
    for u, v, lab in graph.edges:
        lines.append(f'  {_quote(u)} -> {_quote(v)} [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _kernel_arrays(graph: ReliabilityGraph):
    order = graph.topological_order()
    index = {v: i for i, v in enumerate(order)}
    edges = sorted(graph.edges, key=lambda e: (index[e[0]], index[e[1]], e[2]))
    src = np.asarray([index[u] for u, _, _ in edges], dtype=np.int64)
    dst = np.asarray([index[v] for _, v, _ in edges], dtype=np.int64)
    lab = np.asarray([e[2] - 1 for e in edges], dtype=np.int64)
    return src, dst, lab, len(order), index[graph.source], index[graph.sink]


def connected(graph: ReliabilityGraph, events: Iterable[int]) -> bool:
    """Is there an S->T path using only edges labelled by ``events``?"""
    open_ = np.zeros((1, graph.n_events), dtype=np.bool_)
    for e in events:
        open_[0, e - 1] = True
    src, dst, lab, nv, s, t = _kernel_arrays(graph)
    return bool(_kernels.connected_count(src, dst, lab, nv, s, t, open_))


@dataclass(frozen=True)
class PercolationResult:
    samples: int
    successes: int

    @property
    def estimate(self) -> float:
        return self.successes / self.samples

    @property
    def stderr(self) -> float:
        p = self.estimate
        return float(np.sqrt(p * (1 - p) / self.samples))


def percolation(graph: ReliabilityGraph, x, samples: int, seed: int, batch: int = 1 << 16) -> PercolationResult:
    """Monte Carlo S-T connectivity with event ``i`` present with probability ``x[i-1]``.

    Edges sharing a label are opened or closed together, since they stand
    for the same event.
    """
    xs = np.broadcast_to(np.asarray(x, dtype=np.float64), (graph.n_events,))
    rng = np.random.default_rng(seed)
    arrays = _kernel_arrays(graph)
    hits = 0
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        open_ = rng.random((m, graph.n_events)) < xs
        hits += int(_kernels.connected_count(*arrays, open_))
        done += m
    return PercolationResult(samples, hits)
