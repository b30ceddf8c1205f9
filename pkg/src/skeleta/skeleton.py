"""1-skeleta: graphs with axial functions, connections, and the derived
compatibility system; slices, holonomy, and straightness.

A skeleton is validated from (graph, alpha, theta): the positive scalars
lambda are always derived by solving, for every oriented edge pq and every
edge e at p, the exact 2x2 system

    alpha(e) = lambda * alpha(theta_pq(e)) + c * alpha(pq),

which has a unique solution because the two directions on the right are
independent.  Inputs carrying their own lambda are rejected: the scalars are
uniquely determined and stored values could only disagree.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .polynomial import Vector, solve_pair

Edge = tuple[str, str]


class SkeletonError(ValueError):
    """Axiom violation or malformed skeleton input."""


class Graph:
    """Connected constant-valency graph with oriented edges."""

    def __init__(self, vertices: Iterable[str], edges: Iterable[Edge]):
        self.vertices = sorted(set(vertices))
        oriented = set()
        for p, q in edges:
            if p == q:
                raise SkeletonError(f"self-loop at {p}")
            oriented.add((p, q))
            oriented.add((q, p))
        self.oriented_edges = oriented
        self.star: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for p, q in sorted(oriented):
            if p not in self.star or q not in self.star:
                raise SkeletonError(f"edge ({p},{q}) uses unknown vertex")
            self.star[p].append((p, q))
        valencies = {len(s) for s in self.star.values()}
        if len(valencies) != 1:
            raise SkeletonError(f"valency is not constant: {sorted(valencies)}")
        self.valency = valencies.pop()
        if not self._connected():
            raise SkeletonError("graph is not connected")

    def _connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for _, w in self.star[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def edges_at(self, v: str) -> list[Edge]:
        return self.star[v]


class Skeleton:
    """A validated quadruple (graph, alpha, theta, lambda) in Q^n."""

    def __init__(self, graph: Graph, alpha: Mapping[Edge, Vector],
                 theta: Mapping[Edge, Mapping[Edge, Edge]],
                 lam: Mapping[Edge, Mapping[Edge, Fraction]], dimension: int):
        self.graph = graph
        self.alpha = dict(alpha)
        self.theta = {e: dict(m) for e, m in theta.items()}
        self.lam = {e: dict(m) for e, m in lam.items()}
        self.dimension = dimension

    # container-style conveniences used everywhere downstream
    @property
    def vertices(self) -> list[str]:
        return self.graph.vertices

    @property
    def valency(self) -> int:
        return self.graph.valency

    def edges_at(self, v: str) -> list[Edge]:
        return self.graph.edges_at(v)

    def oriented_edges(self) -> list[Edge]:
        return sorted(self.graph.oriented_edges)

    def unoriented_edges(self) -> list[Edge]:
        return sorted({(p, q) for p, q in self.graph.oriented_edges if p < q})

    def is_gkm(self) -> bool:
        return all(l == 1 for m in self.lam.values() for l in m.values())

    def connection_number(self, edge: Edge) -> Fraction:
        """Product of lambda over the full edge star (single-step holonomy)."""
        out = Fraction(1)
        for l in self.lam[edge].values():
            out *= l
        return out

    def holonomy(self, path: Sequence[str]) -> tuple[dict[Edge, Edge], Fraction]:
        """Path connection map and number along a vertex sequence."""
        if len(path) == 0:
            raise SkeletonError("empty path")
        for v in path:
            if v not in self.graph.star:
                raise SkeletonError(f"unknown vertex {v}")
        kmap = {e: e for e in self.edges_at(path[0])}
        number = Fraction(1)
        for p, q in zip(path, path[1:]):
            if (p, q) not in self.graph.oriented_edges:
                raise SkeletonError(f"vertices {p},{q} are not adjacent")
            step = self.theta[(p, q)]
            kmap = {e0: step[e] for e0, e in kmap.items()}
            number *= self.connection_number((p, q))
        return kmap, number

    def straightness(self) -> "StraightnessReport":
        """Decide straightness on a fundamental cycle basis.

        Holonomy numbers are multiplicative under concatenation and invariant
        under basepoint conjugation, so checking the fundamental cycles of a
        spanning tree suffices.  On success the report carries constants c_p
        with c_q = c_p * |K_pq| for every edge, normalized to 1 at the
        lexicographically smallest vertex.
        """
        base = self.vertices[0]
        constants = {base: Fraction(1)}
        parent: dict[str, Optional[str]] = {base: None}
        order = [base]
        queue = [base]
        while queue:
            v = queue.pop(0)
            for _, w in self.edges_at(v):
                if w not in constants:
                    constants[w] = constants[v] * self.connection_number((v, w))
                    parent[w] = v
                    order.append(w)
                    queue.append(w)
        for p, q in self.oriented_edges():
            if constants[q] != constants[p] * self.connection_number((p, q)):
                loop = _tree_path(parent, p) + [q] + list(reversed(_tree_path(parent, q)))[1:]
                return StraightnessReport(False, None, loop)
        return StraightnessReport(True, constants, None)

    # -- slices ---------------------------------------------------------------

    def subskeleton(self, edge_subset: Iterable[Edge],
                    vertices: Optional[Iterable[str]] = None) -> "Subskeleton":
        return Subskeleton(self, edge_subset, vertices)

    def slice_edges(self, span: Sequence[Vector]) -> set[Edge]:
        """Oriented edges whose direction lies in the span of the given vectors."""
        out = set()
        for e in self.graph.oriented_edges:
            if _in_span(self.alpha[e], span):
                out.add(e)
        return out

    def slices(self, k: int = 2, span: Optional[Sequence[Vector]] = None) -> list["Subskeleton"]:
        """Connected slices: components of the subgraph of edges whose
        directions lie in a k-dimensional subspace.

        With no explicit subspace, k must be 2 and the subspaces range over
        spans of unordered pairs of edges at each vertex; identical slices
        (same edge set) are reported once, sorted deterministically.
        """
        if span is not None:
            return self._components(self.slice_edges(span))
        if k != 2:
            raise SkeletonError("automatic enumeration is for 2-slices only")
        seen: dict[frozenset, Subskeleton] = {}
        for v in self.vertices:
            edges = self.edges_at(v)
            for i in range(len(edges)):
                for j in range(i + 1, len(edges)):
                    h = [self.alpha[edges[i]], self.alpha[edges[j]]]
                    slice_edges = self.slice_edges(h)
                    for comp in self._components(slice_edges):
                        if v in comp.vertices:
                            key = frozenset(comp.edge_set)
                            seen.setdefault(key, comp)
        return sorted(seen.values(), key=lambda s: sorted(s.edge_set))

    def _components(self, edges: set[Edge]) -> list["Subskeleton"]:
        verts = sorted({p for p, _ in edges})
        seen: set[str] = set()
        comps = []
        adj: dict[str, list[str]] = {v: [] for v in verts}
        for p, q in edges:
            adj[p].append(q)
        for v in verts:
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            comp_edges = {e for e in edges if e[0] in comp}
            comps.append(Subskeleton(self, comp_edges))
        return comps


class StraightnessReport:
    __slots__ = ("is_straight", "constants", "counterexample")

    def __init__(self, is_straight: bool, constants: Optional[dict[str, Fraction]],
                 counterexample: Optional[list[str]]):
        self.is_straight = is_straight
        self.constants = constants
        self.counterexample = counterexample


class Subskeleton:
    """A subgraph closed under the restricted connection, with normal data.

    An explicit vertex list permits the edgeless case (single vertices)."""

    def __init__(self, parent: Skeleton, edges: Iterable[Edge],
                 vertices: Optional[Iterable[str]] = None):
        edge_set = set(edges)
        for p, q in list(edge_set):
            edge_set.add((q, p))
        self.parent = parent
        self.edge_set = edge_set
        self.vertices = sorted({p for p, _ in edge_set} | set(vertices or ()))
        if not self.vertices:
            raise SkeletonError("empty subskeleton")
        self.star: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for p, q in sorted(edge_set):
            self.star[p].append((p, q))
        valencies = {len(s) for s in self.star.values()}
        if len(valencies) != 1:
            raise SkeletonError("subskeleton valency is not constant")
        self.valency = valencies.pop()
        # closure under the restricted connection
        for e in sorted(edge_set):
            m = parent.theta[e]
            for e0 in self.star[e[0]]:
                if m[e0] not in edge_set:
                    raise SkeletonError(f"connection does not restrict along {e}")
        self.normal: dict[str, list[Edge]] = {
            v: [e for e in parent.edges_at(v) if e not in edge_set]
            for v in self.vertices
        }

    def covalency(self) -> int:
        return self.parent.valency - self.valency

    def edges_at(self, v: str) -> list[Edge]:
        return self.star[v]

    def normal_edges_at(self, v: str) -> list[Edge]:
        return self.normal[v]

    def contains_vertex(self, v: str) -> bool:
        return v in self.star

    def normal_step_number(self, edge: Edge) -> Fraction:
        """Product of lambda over the normal edges for one step."""
        out = Fraction(1)
        lam = self.parent.lam[edge]
        for e in self.normal[edge[0]]:
            out *= lam[e]
        return out

    def normal_holonomy(self, path: Sequence[str]) -> Fraction:
        for v in path:
            if v not in self.star:
                raise SkeletonError(f"path leaves the subskeleton at {v}")
        number = Fraction(1)
        for p, q in zip(path, path[1:]):
            if (p, q) not in self.edge_set:
                raise SkeletonError(f"path edge ({p},{q}) not in subskeleton")
            number *= self.normal_step_number((p, q))
        return number

    def normal_straightness(self) -> tuple[bool, Optional[dict[str, Fraction]], Optional[list[str]]]:
        """Fundamental-cycle test for normal holonomy; constants on success."""
        base = self.vertices[0]
        values = {base: Fraction(1)}
        parent: dict[str, Optional[str]] = {base: None}
        queue = [base]
        while queue:
            v = queue.pop(0)
            for _, w in self.star[v]:
                if w not in values:
                    values[w] = values[v] * self.normal_step_number((v, w))
                    parent[w] = v
                    queue.append(w)
        for p, q in sorted(self.edge_set):
            if values[q] != values[p] * self.normal_step_number((p, q)):
                loop = _tree_path(parent, p) + [q] + list(reversed(_tree_path(parent, q)))[1:]
                return False, None, loop
        return True, values, None

    def is_normally_straight(self) -> bool:
        return self.normal_straightness()[0]

    def as_skeleton(self) -> Skeleton:
        """The subskeleton as a standalone skeleton (same ambient space)."""
        graph = Graph(self.vertices, self.edge_set)
        alpha = {e: self.parent.alpha[e] for e in self.edge_set}
        theta = {
            e: {e0: self.parent.theta[e][e0] for e0 in self.star[e[0]]}
            for e in self.edge_set
        }
        lam = {
            e: {e0: self.parent.lam[e][e0] for e0 in self.star[e[0]]}
            for e in self.edge_set
        }
        return Skeleton(graph, alpha, theta, lam, self.parent.dimension)


# -- validation ----------------------------------------------------------------


def validate(vertices: Iterable[str], edges: Mapping[Edge, Vector],
             connection: Optional[Mapping[Edge, Mapping[Edge, Edge]]] = None,
             dimension: Optional[int] = None,
             require_gkm: bool = False) -> Skeleton:
    """Build and fully check a skeleton from raw data.

    `edges` may carry one or both orientations; the missing one is synthesized
    with the opposite vector.  When no connection is given it is inferred
    (and must be unique).  Raises SkeletonError naming the offending vertex
    or edge on any axiom violation.
    """
    alpha: dict[Edge, Vector] = {}
    for (p, q), v in edges.items():
        alpha[(p, q)] = Vector(v)
    for (p, q), v in list(alpha.items()):
        rev = (q, p)
        if rev in alpha:
            if alpha[rev] != -v:
                raise SkeletonError(f"opposite orientations disagree on ({p},{q})")
        else:
            alpha[rev] = -v
    graph = Graph(vertices, alpha.keys())
    dims = {v.dim for v in alpha.values()}
    if len(dims) != 1:
        raise SkeletonError("mixed vector dimensions")
    dim = dims.pop()
    if dimension is not None and dimension != dim:
        raise SkeletonError(f"declared dimension {dimension} != vector dimension {dim}")
    for e, v in alpha.items():
        if v.is_zero():
            raise SkeletonError(f"zero axial vector on {e}")
    # A1: pairwise linear independence at each vertex
    for p in graph.vertices:
        star = graph.edges_at(p)
        for i in range(len(star)):
            for j in range(i + 1, len(star)):
                if alpha[star[i]].is_parallel(alpha[star[j]]):
                    raise SkeletonError(
                        f"A1 violation at vertex {p}: edges {star[i]} and {star[j]} are parallel")
    if connection is None:
        inferred = infer_connection(graph, alpha)
        if inferred.ambiguous:
            raise SkeletonError(
                "connection is ambiguous; pass one explicitly "
                f"(first ambiguous edge: {inferred.ambiguous_edges()[0]})")
        if inferred.infeasible_edge is not None:
            raise SkeletonError(f"no valid connection along {inferred.infeasible_edge}")
        theta = inferred.connection()
    else:
        theta = {e: dict(m) for e, m in connection.items()}
        _check_connection_shape(graph, theta)
    lam = _derive_lambda(graph, alpha, theta)
    sk = Skeleton(graph, alpha, theta, lam, dim)
    if require_gkm and not sk.is_gkm():
        raise SkeletonError("GKM flag claimed but some lambda differs from 1")
    return sk


def _check_connection_shape(graph: Graph, theta: Mapping[Edge, Mapping[Edge, Edge]]) -> None:
    for (p, q) in graph.oriented_edges:
        m = theta.get((p, q))
        if m is None:
            raise SkeletonError(f"connection missing for edge ({p},{q})")
        if sorted(m.keys()) != sorted(graph.edges_at(p)):
            raise SkeletonError(f"connection domain mismatch at ({p},{q})")
        if sorted(m.values()) != sorted(graph.edges_at(q)):
            raise SkeletonError(f"connection is not a bijection along ({p},{q})")
        if m[(p, q)] != (q, p):
            raise SkeletonError(f"connection must map ({p},{q}) to ({q},{p})")
        back = theta.get((q, p))
        if back is None:
            raise SkeletonError(f"connection missing for edge ({q},{p})")
        for e, f in m.items():
            if back.get(f) != e:
                raise SkeletonError(f"connection not involutive across ({p},{q})")


def _derive_lambda(graph: Graph, alpha: Mapping[Edge, Vector],
                   theta: Mapping[Edge, Mapping[Edge, Edge]]) -> dict[Edge, dict[Edge, Fraction]]:
    lam: dict[Edge, dict[Edge, Fraction]] = {}
    for (p, q) in sorted(graph.oriented_edges):
        m = theta[(p, q)]
        lam_pq: dict[Edge, Fraction] = {}
        for e in graph.edges_at(p):
            if e == (p, q):
                lam_pq[e] = Fraction(1)
                continue
            target = m[e]
            sol = solve_pair(alpha[target], alpha[(p, q)], alpha[e])
            if sol is None:
                raise SkeletonError(
                    f"coplanarity failure: alpha{e} outside the plane of "
                    f"alpha{target} and alpha({p},{q})")
            l, _ = sol
            if l <= 0:
                raise SkeletonError(f"nonpositive lambda for edge {e} along ({p},{q})")
            lam_pq[e] = l
        lam[(p, q)] = lam_pq
    return lam


class InferenceResult:
    """All positive-lambda matchings per edge, found by exhaustive search."""

    def __init__(self, candidates: dict[Edge, list[dict[Edge, Edge]]],
                 infeasible_edge: Optional[Edge]):
        self.candidates = candidates
        self.infeasible_edge = infeasible_edge
        self.ambiguous = any(len(c) > 1 for c in candidates.values())

    def ambiguous_edges(self) -> list[Edge]:
        return sorted(e for e, c in self.candidates.items() if len(c) > 1)

    def connection(self, pick_first: bool = False) -> dict[Edge, dict[Edge, Edge]]:
        """The unique connection, or the deterministic first candidate per
        edge when pick_first is set."""
        if self.infeasible_edge is not None:
            raise SkeletonError(f"no valid connection along {self.infeasible_edge}")
        if self.ambiguous and not pick_first:
            raise SkeletonError("connection is ambiguous")
        theta: dict[Edge, dict[Edge, Edge]] = {}
        for (p, q), cands in self.candidates.items():
            if (p, q) in theta:
                continue
            m = cands[0]
            theta[(p, q)] = m
            theta[(q, p)] = {f: e for e, f in m.items()}
        return theta


def infer_connection(graph: Graph, alpha: Mapping[Edge, Vector]) -> InferenceResult:
    """Search all bijections of edge stars compatible with the coplanarity
    axiom at positive lambda.  Candidates are enumerated deterministically.

    Matchings are canonicalized across orientations (the reverse edge uses
    the inverse matching), so each unordered edge is searched once.
    """
    candidates: dict[Edge, list[dict[Edge, Edge]]] = {}
    for (p, q) in sorted(graph.oriented_edges):
        if p > q:
            continue
        sources = [e for e in graph.edges_at(p) if e != (p, q)]
        targets = [f for f in graph.edges_at(q) if f != (q, p)]
        found: list[dict[Edge, Edge]] = []
        for perm in _permutations(targets):
            ok = True
            for e, f in zip(sources, perm):
                sol = solve_pair(alpha[f], alpha[(p, q)], alpha[e])
                if sol is None or sol[0] <= 0:
                    ok = False
                    break
            if ok:
                m = dict(zip(sources, perm))
                m[(p, q)] = (q, p)
                found.append(m)
        if not found:
            return InferenceResult(candidates, (p, q))
        candidates[(p, q)] = found
        candidates[(q, p)] = [{f: e for e, f in m.items()} for m in found]
    return InferenceResult(candidates, None)


def _permutations(items: list) -> Iterable[tuple]:
    from itertools import permutations
    return permutations(items)


def _tree_path(parent: Mapping[str, Optional[str]], v: str) -> list[str]:
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return list(reversed(path))


def _in_span(v: Vector, span: Sequence[Vector]) -> bool:
    """Exact membership of v in the span of the given vectors."""
    rows = [list(s) for s in span]
    rows.append(list(v))
    base_rank = _rank([list(s) for s in span])
    return _rank(rows) == base_rank


def _rank(rows: list[list[Fraction]]) -> int:
    if not rows:
        return 0
    mat = [list(map(Fraction, r)) for r in rows]
    ncols = len(mat[0])
    rank = 0
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        inv = 1 / mat[row][col]
        mat[row] = [x * inv for x in mat[row]]
        for r in range(len(mat)):
            if r != row and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[row])]
        row += 1
        rank += 1
    return rank
