"""Polarizing covectors, acyclic orientations, Morse functions, indices,
Betti numbers, and flow-ups.

A covector is accepted only after three exact checks: it pairs nonzero with
every edge vector, it satisfies the quadruple genericity inequality at every
vertex (no two disjoint pairs of normalized edge directions share a
difference), and the induced orientation is acyclic.  Candidate search, when
no covector is supplied, walks a deterministic sequence so failures are
reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterator, Optional, Sequence

from .polynomial import Vector
from .skeleton import Edge, Skeleton, SkeletonError


class PolarizationError(SkeletonError):
    """The candidate covector fails one of the acceptance checks."""


class MorseData:
    """An accepted generic polarizing covector with its induced structure."""

    def __init__(self, skeleton: Skeleton, xi: Vector):
        self.skeleton = skeleton
        self.xi = xi
        self.pairing = {e: xi.dot(skeleton.alpha[e]) for e in skeleton.graph.oriented_edges}
        self.rising = {e for e, m in self.pairing.items() if m > 0}
        self.phi = _morse_function(skeleton, self.rising)
        self.index = {
            v: sum(1 for e in skeleton.edges_at(v) if self.pairing[e] < 0)
            for v in skeleton.vertices
        }

    def oriented(self, e: Edge) -> bool:
        return e in self.rising

    def vertices_by_phi(self) -> list[str]:
        return sorted(self.skeleton.vertices, key=lambda v: self.phi[v])

    def edges_up(self, v: str) -> list[Edge]:
        return [e for e in self.skeleton.edges_at(v) if e in self.rising]

    def edges_down(self, v: str) -> list[Edge]:
        return [e for e in self.skeleton.edges_at(v) if e not in self.rising]

    def betti_numbers(self) -> list[int]:
        d = self.skeleton.valency
        b = [0] * (d + 1)
        for v in self.skeleton.vertices:
            b[self.index[v]] += 1
        return b

    def flow_up(self, v: str) -> tuple[set[str], set[str]]:
        """(strict flow-up F_script, phi-superlevel F): vertices reachable
        along the orientation, and vertices at or above v's phi value."""
        reach = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for e in self.edges_up(x):
                if e[1] not in reach:
                    reach.add(e[1])
                    stack.append(e[1])
        superlevel = {x for x in self.skeleton.vertices if self.phi[x] >= self.phi[v]}
        return reach, superlevel

    def is_pointed(self) -> bool:
        b = self.betti_numbers()
        return b[0] == 1 and b[-1] == 1

    def is_noncyclic(self) -> bool:
        """Every 2-slice is pointed under the restricted covector."""
        for s in self.skeleton.slices(2):
            sub = s.as_skeleton()
            sub_morse = MorseData(sub, self.xi)
            if not sub_morse.is_pointed():
                return False
        return True


def check_polarization(skeleton: Skeleton, xi: Vector) -> Optional[str]:
    """None when xi is an accepted generic polarizing covector, else a
    human-readable reason naming the offending edge, vertex, or cycle."""
    if xi.dim != skeleton.dimension:
        return "covector has wrong dimension"
    for e in skeleton.oriented_edges():
        if xi.dot(skeleton.alpha[e]) == 0:
            return f"covector annihilates edge {e}"
    for p in skeleton.vertices:
        star = skeleton.edges_at(p)
        normalized = [skeleton.alpha[e].scale(1 / xi.dot(skeleton.alpha[e])) for e in star]
        for quad in combinations(range(len(star)), 4):
            reason = _quadruple_violation(normalized, quad)
            if reason is not None:
                a, b, c, d = (star[i] for i in reason)
                return (f"covector is non-generic at {p}: "
                        f"{a},{b} and {c},{d} have equal direction differences")
    cyc = _directed_cycle(skeleton, xi)
    if cyc is not None:
        return f"induced orientation has a cycle: {' -> '.join(cyc)}"
    return None


def _quadruple_violation(normalized: Sequence[Vector], quad) -> Optional[tuple]:
    i, j, k, l = quad
    pairs = [((i, j), (k, l)), ((i, k), (j, l)), ((i, l), (j, k))]
    for (a, b), (c, d) in pairs:
        if normalized[a] - normalized[b] == normalized[c] - normalized[d]:
            return (a, b, c, d)
        if normalized[a] - normalized[b] == normalized[d] - normalized[c]:
            return (a, b, d, c)
    return None


def _directed_cycle(skeleton: Skeleton, xi: Vector) -> Optional[list[str]]:
    rising = {e for e in skeleton.graph.oriented_edges if xi.dot(skeleton.alpha[e]) > 0}
    color = {v: 0 for v in skeleton.vertices}
    stack_trace: list[str] = []

    def visit(v: str) -> Optional[list[str]]:
        color[v] = 1
        stack_trace.append(v)
        for e in skeleton.edges_at(v):
            if e not in rising:
                continue
            w = e[1]
            if color[w] == 1:
                return stack_trace[stack_trace.index(w):] + [w]
            if color[w] == 0:
                out = visit(w)
                if out is not None:
                    return out
        stack_trace.pop()
        color[v] = 2
        return None

    for v in skeleton.vertices:
        if color[v] == 0:
            out = visit(v)
            if out is not None:
                return out
    return None


def find_polarization(skeleton: Skeleton, xi: Optional[Vector] = None,
                      budget: int = 4000) -> MorseData:
    """Accept the supplied covector or search deterministic candidates.

    Search order: coordinate covectors, then integer lattice points by
    max-norm and lexicographic order.  Raises PolarizationError with the
    reason (for a supplied candidate) or after exhausting the budget.
    """
    if xi is not None:
        reason = check_polarization(skeleton, xi)
        if reason is not None:
            raise PolarizationError(reason)
        return MorseData(skeleton, xi)
    tried = 0
    for candidate in _candidates(skeleton.dimension):
        if tried >= budget:
            break
        tried += 1
        if check_polarization(skeleton, candidate) is None:
            return MorseData(skeleton, candidate)
    raise PolarizationError(f"no accepted covector within budget ({tried} tried)")


def _candidates(n: int) -> Iterator[Vector]:
    for i in range(n):
        coords = [Fraction(0)] * n
        coords[i] = Fraction(1)
        yield Vector(coords)
        yield Vector([-c for c in coords])
    height = 1
    while True:
        for point in _lattice_shell(n, height):
            yield Vector(point)
        height += 1


def _lattice_shell(n: int, h: int) -> Iterator[tuple]:
    def rec(prefix: list[int]) -> Iterator[tuple]:
        if len(prefix) == n:
            if max(abs(c) for c in prefix) == h:
                yield tuple(Fraction(c) for c in prefix)
            return
        for c in range(-h, h + 1):
            yield from rec(prefix + [c])
    yield from rec([])


def _morse_function(skeleton: Skeleton, rising: set[Edge]) -> dict[str, Fraction]:
    """Longest-oriented-path heights, made injective by id-rank offsets.

    Offsets are k/(|V|+1) for the lexicographic rank k within each height
    class, which preserves every strict height inequality.
    """
    order = _topological_order(skeleton, rising)
    height = {v: 0 for v in skeleton.vertices}
    for v in order:
        for e in skeleton.edges_at(v):
            if e in rising:
                height[e[1]] = max(height[e[1]], height[v] + 1)
    groups: dict[int, list[str]] = {}
    for v in skeleton.vertices:
        groups.setdefault(height[v], []).append(v)
    denom = len(skeleton.vertices) + 1
    phi = {}
    for h, vs in groups.items():
        for k, v in enumerate(sorted(vs)):
            phi[v] = Fraction(h) + Fraction(k, denom)
    return phi


def _topological_order(skeleton: Skeleton, rising: set[Edge]) -> list[str]:
    indeg = {v: 0 for v in skeleton.vertices}
    for e in rising:
        indeg[e[1]] += 1
    queue = sorted(v for v in skeleton.vertices if indeg[v] == 0)
    out = []
    while queue:
        v = queue.pop(0)
        out.append(v)
        for e in skeleton.edges_at(v):
            if e in rising:
                indeg[e[1]] -= 1
                if indeg[e[1]] == 0:
                    queue.append(e[1])
        queue.sort()
    if len(out) != len(skeleton.vertices):
        raise PolarizationError("orientation is cyclic")
    return out
