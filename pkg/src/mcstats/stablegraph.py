"""Stable graphs of multicurves on a closed surface.

A multicurve c_1 g_1 + ... + c_k g_k is encoded by the decorated graph whose
vertices are the complementary pieces (labelled by genus) and whose edges
are the curves (labelled by weight).  Loops and parallel edges are allowed.

Symmetry orders follow one convention throughout: count pairs (vertex
bijection, edge bijection) preserving incidence, vertex genus and edge
weight, without counting the swap of a loop's two half-edges.  The graph
file can override both orders when better group-theoretic information is
available.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, permutations, product
from math import factorial, prod

__all__ = [
    "Vertex",
    "Edge",
    "StableGraph",
    "GraphConstants",
    "GraphValidationError",
    "MulticurveSyntaxError",
    "parse_multicurve",
    "format_multicurve",
    "one_handle_count",
    "sym_plus_order",
    "sym_order",
    "graph_constants",
    "canonical_form",
    "automorphism_count",
    "from_canonical",
    "enumerate_stable_graphs",
]


class GraphValidationError(ValueError):
    pass


class MulticurveSyntaxError(ValueError):
    def __init__(self, message: str, lineno: int):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


@dataclass(frozen=True)
class Vertex:
    id: str
    genus: int


@dataclass(frozen=True)
class Edge:
    id: str
    ends: tuple[str, str]
    weight: int = 1

    @property
    def is_loop(self) -> bool:
        return self.ends[0] == self.ends[1]


def _natural_key(s: str):
    return [(0, int(t), "") if t.isdigit() else (1, 0, t) for t in re.findall(r"\d+|\D+", s)]


@dataclass(frozen=True)
class StableGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    sym_plus_override: int | None = None
    sym_override: int | None = None
    ambient_genus: int | None = None
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "_index", {v.id: i for i, v in enumerate(self.vertices)})
        self._validate()

    # structure
    def valence(self, vid: str) -> int:
        return sum((e.ends[0] == vid) + (e.ends[1] == vid) for e in self.edges)

    @property
    def k(self) -> int:
        return len(self.edges)

    @property
    def betti(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @property
    def genus(self) -> int:
        return sum(v.genus for v in self.vertices) + self.betti

    @property
    def d(self) -> int:
        return 3 * self.genus - 3

    def vertex(self, vid: str) -> Vertex:
        return self.vertices[self._index[vid]]

    def edge_order(self) -> list[Edge]:
        """Edges in variable order: ids sorted naturally (e2 before e10)."""
        return sorted(self.edges, key=lambda e: _natural_key(e.id))

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(e.weight for e in self.edge_order())

    def half_edges(self, vid: str) -> list[int]:
        """Variable indices at a vertex; a loop contributes its index twice."""
        out = []
        for i, e in enumerate(self.edge_order()):
            out.extend([i] * ((e.ends[0] == vid) + (e.ends[1] == vid)))
        return out

    def is_pants(self) -> bool:
        return all(v.genus == 0 and self.valence(v.id) == 3 for v in self.vertices)

    def with_weights(self, weights) -> "StableGraph":
        edges = [
            Edge(e.id, e.ends, w) for e, w in zip(self.edge_order(), weights)
        ]
        return StableGraph(self.vertices, edges, self.sym_plus_override, self.sym_override, self.ambient_genus)

    def relabeled(self, vertex_names: dict[str, str], edge_names: dict[str, str]) -> "StableGraph":
        vs = [Vertex(vertex_names[v.id], v.genus) for v in self.vertices]
        es = [
            Edge(edge_names[e.id], (vertex_names[e.ends[0]], vertex_names[e.ends[1]]), e.weight)
            for e in self.edges
        ]
        return StableGraph(vs, es, self.sym_plus_override, self.sym_override, self.ambient_genus)

    def _validate(self):
        if not self.vertices:
            raise GraphValidationError("graph has no vertices")
        if len(self._index) != len(self.vertices):
            raise GraphValidationError("duplicate vertex id")
        if len({e.id for e in self.edges}) != len(self.edges):
            raise GraphValidationError("duplicate edge id")
        for v in self.vertices:
            if v.genus < 0:
                raise GraphValidationError(f"vertex {v.id}: negative genus")
        for e in self.edges:
            for end in e.ends:
                if end not in self._index:
                    raise GraphValidationError(f"edge {e.id}: unknown vertex {end!r}")
            if e.weight < 1:
                raise GraphValidationError(f"edge {e.id}: weight must be a positive integer")
        # connectivity
        seen = {self.vertices[0].id}
        stack = [self.vertices[0].id]
        adj: dict[str, set] = {v.id: set() for v in self.vertices}
        for e in self.edges:
            adj[e.ends[0]].add(e.ends[1])
            adj[e.ends[1]].add(e.ends[0])
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(self.vertices):
            raise GraphValidationError("graph is disconnected")
        for v in self.vertices:
            n = self.valence(v.id)
            if 2 * v.genus - 2 + n <= 0:
                raise GraphValidationError(
                    f"vertex {v.id}: unstable (genus {v.genus}, {n} half-edges)"
                )
        g = self.genus
        if self.ambient_genus is not None and g != self.ambient_genus:
            raise GraphValidationError(
                f"genus mismatch: declared {self.ambient_genus}, graph gives {g}"
            )
        if g < 2:
            raise GraphValidationError(f"total genus {g} < 2")
        if not 1 <= self.k <= 3 * g - 3:
            raise GraphValidationError(f"curve count {self.k} outside 1..{3 * g - 3}")
        for name in ("sym_plus_override", "sym_override"):
            val = getattr(self, name)
            if val is not None and val < 1:
                raise GraphValidationError(f"{name} must be positive")


# -- text format ---------------------------------------------------------------

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_LINE_PATTERNS = {
    "genus": re.compile(r"genus\s+(\d+)$"),
    "vertex": re.compile(rf"vertex\s+({_IDENT})\s+genus\s+(\d+)$"),
    "edge": re.compile(rf"edge\s+({_IDENT})\s+({_IDENT})\s+({_IDENT})(?:\s+weight\s+(\d+))?$"),
    "override": re.compile(r"override\s+(sym_plus|sym)\s+(\d+)$"),
}


def parse_multicurve(text: str) -> StableGraph:
    vertices, edges = [], []
    overrides: dict[str, int] = {}
    genus = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword = line.split()[0]
        pattern = _LINE_PATTERNS.get(keyword)
        m = pattern.match(line) if pattern else None
        if not m:
            raise MulticurveSyntaxError(f"cannot parse {line!r}", lineno)
        if keyword == "genus":
            if genus is not None:
                raise MulticurveSyntaxError("genus declared twice", lineno)
            genus = int(m.group(1))
        elif keyword == "vertex":
            vertices.append(Vertex(m.group(1), int(m.group(2))))
        elif keyword == "edge":
            w = int(m.group(4)) if m.group(4) else 1
            edges.append(Edge(m.group(1), (m.group(2), m.group(3)), w))
        else:
            if m.group(1) in overrides:
                raise MulticurveSyntaxError(f"override {m.group(1)} given twice", lineno)
            overrides[m.group(1)] = int(m.group(2))
    return StableGraph(
        vertices,
        edges,
        sym_plus_override=overrides.get("sym_plus"),
        sym_override=overrides.get("sym"),
        ambient_genus=genus,
    )


def format_multicurve(graph: StableGraph) -> str:
    lines = [f"genus {graph.genus}"]
    lines += [f"vertex {v.id} genus {v.genus}" for v in graph.vertices]
    lines += [f"edge {e.id} {e.ends[0]} {e.ends[1]} weight {e.weight}" for e in graph.edge_order()]
    if graph.sym_plus_override is not None:
        lines.append(f"override sym_plus {graph.sym_plus_override}")
    if graph.sym_override is not None:
        lines.append(f"override sym {graph.sym_override}")
    return "\n".join(lines) + "\n"


# -- invariants ----------------------------------------------------------------


@dataclass(frozen=True)
class GraphConstants:
    one_handles: int
    sym_plus: int
    sym: int
    d: int
    k: int
    overridden: bool = False


def one_handle_count(graph: StableGraph) -> int:
    return sum(1 for v in graph.vertices if v.genus == 1 and graph.valence(v.id) == 1)


def _edge_multiset(graph: StableGraph, order: list[str]) -> Counter:
    pos = {vid: i for i, vid in enumerate(order)}
    out = Counter()
    for e in graph.edges:
        a, b = sorted((pos[e.ends[0]], pos[e.ends[1]]))
        out[(a, b, e.weight)] += 1
    return out


def _vertex_classes(graph: StableGraph) -> list[list[str]]:
    """Vertices grouped by an isomorphism-invariant label, classes sorted."""

    def label(v: Vertex):
        loops = sorted(e.weight for e in graph.edges if e.is_loop and e.ends[0] == v.id)
        other = sorted(e.weight for e in graph.edges if not e.is_loop and v.id in e.ends)
        return (v.genus, graph.valence(v.id), tuple(loops), tuple(other))

    groups: dict = {}
    for v in graph.vertices:
        groups.setdefault(label(v), []).append(v.id)
    return [groups[key] for key in sorted(groups)]


def _orderings(graph: StableGraph):
    classes = _vertex_classes(graph)
    for parts in product(*(permutations(c) for c in classes)):
        yield [vid for part in parts for vid in part]


def automorphism_count(graph: StableGraph) -> int:
    classes = _vertex_classes(graph)
    base = [vid for c in classes for vid in c]
    ref = _edge_multiset(graph, base)
    parallel = prod(factorial(m) for m in ref.values())
    count = 0
    for order in _orderings(graph):
        if _edge_multiset(graph, order) == ref:
            count += 1
    return count * parallel


def sym_plus_order(graph: StableGraph) -> int:
    if graph.sym_plus_override is not None:
        return graph.sym_plus_override
    return automorphism_count(graph)


def sym_order(graph: StableGraph) -> int:
    if graph.sym_override is not None:
        return graph.sym_override
    return automorphism_count(graph)


def graph_constants(graph: StableGraph) -> GraphConstants:
    return GraphConstants(
        one_handles=one_handle_count(graph),
        sym_plus=sym_plus_order(graph),
        sym=sym_order(graph),
        d=graph.d,
        k=graph.k,
        overridden=graph.sym_plus_override is not None or graph.sym_override is not None,
    )


def canonical_form(graph: StableGraph) -> bytes:
    """Byte string equal for two graphs iff they are isomorphic."""
    best = None
    for order in _orderings(graph):
        genera = ",".join(str(graph.vertex(v).genus) for v in order)
        es = ",".join(
            f"{a}-{b}:{w}" for (a, b, w), m in sorted(_edge_multiset(graph, order).items())
            for _ in range(m)
        )
        s = f"g={graph.genus};v={genera};e={es}"
        if best is None or s < best:
            best = s
    return best.encode("ascii")


def from_canonical(data: bytes | str) -> StableGraph:
    text = data.decode("ascii") if isinstance(data, bytes) else data
    parts = dict(p.split("=", 1) for p in text.split(";"))
    genera = [int(x) for x in parts["v"].split(",")]
    vertices = [Vertex(f"v{i}", g) for i, g in enumerate(genera)]
    edges = []
    for i, item in enumerate(p for p in parts["e"].split(",") if p):
        ends, w = item.split(":")
        a, b = ends.split("-")
        edges.append(Edge(f"e{i + 1}", (f"v{a}", f"v{b}"), int(w)))
    return StableGraph(vertices, edges, ambient_genus=int(parts["g"]))


# -- enumeration ---------------------------------------------------------------


def _partitions(total: int, parts: int, cap: int | None = None):
    """Non-increasing tuples of ``parts`` non-negative ints summing to total."""
    if cap is None:
        cap = total
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, cap), -1, -1):
        if first * parts < total:
            break
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def enumerate_stable_graphs(
    g: int, k: int, weights: int | None = None, max_graphs: int = 100_000
) -> list[StableGraph]:
    """All decorated stable graphs of genus g with k edges, up to isomorphism.

    Edge weights are all 1 unless ``weights`` caps them, in which case every
    assignment from 1..weights is produced (again up to isomorphism).
    """
    if g < 2 or not 1 <= k <= 3 * g - 3:
        raise ValueError(f"need g >= 2 and 1 <= k <= {3 * g - 3}")
    from .wpvolume import ResourceLimitError

    found: dict[bytes, StableGraph] = {}
    # each vertex contributes at least 1 to sum(2g_v - 2 + n_v) = 2g - 2
    for nv in range(1, min(k + 1, 2 * g - 2) + 1):
        betti = k - nv + 1
        total = g - betti
        if total < 0:
            continue
        pairs = [(i, j) for i in range(nv) for j in range(i, nv)]
        for genera in _partitions(total, nv):
            for edge_set in combinations_with_replacement(pairs, k):
                deg = [0] * nv
                for i, j in edge_set:
                    deg[i] += 1
                    deg[j] += 1
                if any(2 * gv - 2 + n <= 0 for gv, n in zip(genera, deg)):
                    continue
                vertices = [Vertex(f"v{i}", gv) for i, gv in enumerate(genera)]
                base = [Edge(f"e{t + 1}", (f"v{i}", f"v{j}")) for t, (i, j) in enumerate(edge_set)]
                try:
                    graph = StableGraph(vertices, base)
                except GraphValidationError:
                    continue
                candidates = [graph]
                if weights:
                    candidates = [graph.with_weights(ws) for ws in product(range(1, weights + 1), repeat=k)]
                for cand in candidates:
                    key = canonical_form(cand)
                    if key not in found:
                        found[key] = from_canonical(key)
                        if len(found) > max_graphs:
                            raise ResourceLimitError(f"more than {max_graphs} graphs")
    return [found[key] for key in sorted(found, key=lambda b: (len(found[b].vertices), b))]
