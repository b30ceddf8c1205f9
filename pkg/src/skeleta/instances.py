"""Built-in instances and the JSON interchange format.

Builders return a validated Skeleton plus an InstanceSpec with metadata
(drawing positions, a default polarizing covector where one is canonical).
The file format is a single JSON document:

    {"dimension": n,
     "vertices": ["id", ...],
     "edges": [{"from": p, "to": q, "alpha": ["p/q", ...]}, ...],
     "connection": [{"edge": [p, q], "map": [[[p,r],[q,s]], ...]}, ...],
     "positions": {"id": ["x", "y"], ...}}

Only one orientation per edge needs to be listed; the other is synthesized.
"connection" and "positions" are optional ("positions" is a drawing aid
only and never enters validation).
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping, Optional

from .polynomial import Vector, parse_fraction
from .skeleton import Edge, Graph, Skeleton, SkeletonError, infer_connection, validate


class InstanceSpec:
    """A named instance: validated skeleton plus presentation metadata."""

    def __init__(self, name: str, skeleton: Skeleton,
                 positions: Optional[dict[str, Vector]] = None,
                 default_xi: Optional[Vector] = None,
                 notes: str = ""):
        self.name = name
        self.skeleton = skeleton
        self.positions = positions or {}
        self.default_xi = default_xi
        self.notes = notes


def _complete_graph(positions: Mapping[str, Vector]) -> Skeleton:
    """Complete graph with positional axial function and the vertex-swap
    connection theta_pq(pr) = qr (compatibility scalars all one)."""
    verts = sorted(positions)
    alpha = {}
    for p in verts:
        for q in verts:
            if p != q:
                alpha[(p, q)] = positions[q] - positions[p]
    theta = {}
    for p in verts:
        for q in verts:
            if p == q:
                continue
            m = {}
            for r in verts:
                if r == p:
                    continue
                m[(p, r)] = (q, p) if r == q else (q, r)
            theta[(p, q)] = m
    return validate(verts, alpha, theta)


def seg() -> InstanceSpec:
    """A single edge in Q^1."""
    alpha = {("p", "q"): Vector([1])}
    theta = {("p", "q"): {("p", "q"): ("q", "p")},
             ("q", "p"): {("q", "p"): ("p", "q")}}
    sk = validate(["p", "q"], alpha, theta)
    return InstanceSpec("seg", sk, positions=None, default_xi=Vector([1]))


def tri() -> InstanceSpec:
    """Complete graph on three points of the plane (2-valent)."""
    pos = {"p1": Vector([0, 0]), "p2": Vector([3, 1]), "p3": Vector([1, 4])}
    sk = _complete_graph(pos)
    return InstanceSpec("tri", sk, positions=pos, default_xi=Vector([Fraction(1, 5), 1]))


def k4() -> InstanceSpec:
    """Complete graph on the unit square (3-valent, planar)."""
    pos = {"p1": Vector([0, 0]), "p2": Vector([1, 0]),
           "p3": Vector([0, 1]), "p4": Vector([1, 1])}
    sk = _complete_graph(pos)
    return InstanceSpec("k4", sk, positions=pos, default_xi=Vector([Fraction(1, 3), 1]))


_QUAD_POSITIONS = {
    "quad1": [(0, 0), (3, 0), (4, 2), (1, 3)],
    "quad2": [(0, 0), (2, 0), (3, 2), (-1, 2)],
    "quad3": [(0, 0), (5, 1), (6, 4), (1, 5)],
    "quad4": [(0, 0), (4, -1), (5, 3), (-1, 2)],
    "quad5": [(0, 0), (3, 1), (2, 4), (-2, 3)],
}


def quad(name: str) -> InstanceSpec:
    """Complete graph on four convex-position points (3-valent, planar)."""
    coords = _QUAD_POSITIONS[name]
    pos = {f"p{i+1}": Vector([Fraction(x), Fraction(y)]) for i, (x, y) in enumerate(coords)}
    sk = _complete_graph(pos)
    return InstanceSpec(name, sk, positions=pos, default_xi=Vector([Fraction(1, 7), 1]))


def simplex3() -> InstanceSpec:
    """Complete graph on four affinely independent points of Q^3."""
    pos = {"p1": Vector([0, 0, 0]), "p2": Vector([1, 0, 0]),
           "p3": Vector([0, 1, 0]), "p4": Vector([0, 0, 1])}
    sk = _complete_graph(pos)
    return InstanceSpec("simplex3", sk, positions=None,
                        default_xi=Vector([1, 2, 4]))


_POLYGON_POSITIONS = {
    3: [(0, 0), (4, 1), (1, 3)],
    4: [(0, 0), (4, 0), (5, 3), (-1, 2)],
    5: [(0, 0), (4, -1), (6, 2), (3, 5), (-1, 3)],
    6: [(0, 0), (3, -1), (5, 1), (5, 4), (2, 6), (-2, 2)],
    7: [(0, 0), (3, -1), (6, 1), (7, 4), (4, 7), (0, 8), (-2, 3)],
    8: [(0, 0), (3, -1), (6, 0), (8, 3), (7, 6), (4, 8), (0, 7), (-2, 3)],
}


def polygon(m: int, positions: Optional[list] = None) -> InstanceSpec:
    """Convex positional m-gon boundary (2-valent, planar).

    Positions may be supplied (cyclic order, strictly convex); otherwise a
    built-in convex position set is used.  The connection is forced.
    """
    if positions is None:
        if m not in _POLYGON_POSITIONS:
            raise SkeletonError(f"no built-in positions for a {m}-gon")
        positions = _POLYGON_POSITIONS[m]
    if len(positions) != m or m < 3:
        raise SkeletonError("polygon needs m >= 3 positions in cyclic order")
    pts = [Vector([Fraction(x), Fraction(y)]) for x, y in positions]
    for i in range(m):
        a, b, c = pts[i], pts[(i + 1) % m], pts[(i + 2) % m]
        turn = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if turn <= 0:
            raise SkeletonError("polygon positions are not strictly convex")
    pos = {f"p{i+1}": pts[i] for i in range(m)}
    verts = sorted(pos)
    names = [f"p{i+1}" for i in range(m)]
    alpha = {}
    for i in range(m):
        p, q = names[i], names[(i + 1) % m]
        alpha[(p, q)] = pos[q] - pos[p]
    full = dict(alpha)
    for (p, q), v in list(alpha.items()):
        full[(q, p)] = -v
    theta = {}
    for i in range(m):
        p, q = names[i], names[(i + 1) % m]
        before, after = names[(i - 1) % m], names[(i + 2) % m]
        theta[(p, q)] = {(p, q): (q, p), (p, before): (q, after)}
        theta[(q, p)] = {(q, p): (p, q), (q, after): (p, before)}
    sk = validate(verts, full, theta)
    return InstanceSpec(f"polygon{m}", sk, positions=pos,
                        default_xi=Vector([Fraction(1, 9), 1]))


def prism3() -> InstanceSpec:
    """Triangular prism: inner triangle and its doubled copy (3-valent,
    planar, compatibility scalars all one by the homothety structure)."""
    inner = {"a1": Vector([1, 0]), "a2": Vector([-1, 1]), "a3": Vector([0, -2])}
    pos = dict(inner)
    for k, v in inner.items():
        pos["b" + k[1]] = v.scale(2)
    names_in = ["a1", "a2", "a3"]
    alpha: dict[Edge, Vector] = {}
    for i in range(3):
        for j in range(3):
            if i != j:
                alpha[(names_in[i], names_in[j])] = inner[names_in[j]] - inner[names_in[i]]
                alpha[("b" + str(i + 1), "b" + str(j + 1))] = \
                    (inner[names_in[j]] - inner[names_in[i]]).scale(2)
    for i in range(1, 4):
        alpha[(f"a{i}", f"b{i}")] = pos[f"b{i}"] - pos[f"a{i}"]
        alpha[(f"b{i}", f"a{i}")] = pos[f"a{i}"] - pos[f"b{i}"]
    # connection: along triangle edges swap endpoints, radial edges match
    # parallel triangle edges across the homothety
    theta: dict[Edge, dict[Edge, Edge]] = {}
    def others(i):
        return [j for j in range(1, 4) if j != i]
    for layer in ("a", "b"):
        for i in range(1, 4):
            for j in others(i):
                k = next(x for x in others(i) if x != j)
                m = {
                    (f"{layer}{i}", f"{layer}{j}"): (f"{layer}{j}", f"{layer}{i}"),
                    (f"{layer}{i}", f"{layer}{k}"): (f"{layer}{j}", f"{layer}{k}"),
                    (f"{layer}{i}", f"{'b' if layer == 'a' else 'a'}{i}"):
                        (f"{layer}{j}", f"{'b' if layer == 'a' else 'a'}{j}"),
                }
                theta[(f"{layer}{i}", f"{layer}{j}")] = m
    for i in range(1, 4):
        j, k = others(i)
        m = {(f"a{i}", f"b{i}"): (f"b{i}", f"a{i}"),
             (f"a{i}", f"a{j}"): (f"b{i}", f"b{j}"),
             (f"a{i}", f"a{k}"): (f"b{i}", f"b{k}")}
        theta[(f"a{i}", f"b{i}")] = m
        theta[(f"b{i}", f"a{i}")] = {v: kk for kk, v in m.items()}
    sk = validate(sorted(pos), alpha, theta)
    return InstanceSpec("prism3", sk, positions=pos, default_xi=Vector([Fraction(1, 11), 1]))


# -- the heptagon-with-diagonals counterexample ---------------------------------

# Free parameters of the mirror-symmetric slope family; the two dependent
# slopes below make every holonomy cycle close exactly, and the shear keeps
# every slope away from zero so the covector (0,1) pairs nonzero with every
# edge.  Orientation is chosen so the unique source is p7 and the flow-up of
# p5 is exactly {p1,...,p5}.
_HEPT_T1 = Fraction(2)
_HEPT_T2 = Fraction(-3, 2)
_HEPT_U1 = Fraction(-1)
_HEPT_U4 = Fraction(-10, 3)
_HEPT_SHEAR = Fraction(1, 6)

_HEPT_ORDER = {"p7": 0, "p6": 1, "p5": 2, "p1": 3, "p4": 4, "p2": 5, "p3": 6}


def _hept_dependent_slopes(t1: Fraction, t2: Fraction, u1: Fraction, u4: Fraction):
    t5 = (-t1**2*t2*u1 + t1**2*t2*u4 - 2*t1**2*u1**2 + t1**2*u1*u4
          + t1*t2*u1**2 - t1*u1**2*u4 + t2*u1**2*u4) / \
         (t1**2*u1 - t1*t2*u4 + t1*u1**2 - t2*u1*u4)
    u3 = -(t1**2*t2**2 + 2*t1**2*t2*u1 + 2*t1**2*t2*u4 + 2*t1**2*u1*u4
           - t1*t2**2*u1 - t1*t2**2*u4 - t2**2*u1*u4) / \
         (t2*(t1 + u1)*(t1 + u4))
    return t5, u3


def hept7() -> InstanceSpec:
    """Convex heptagon with short diagonals (4-valent, planar).

    The axial function is not positional: the edge directions solve the
    holonomy closure conditions exactly over the rationals, which a vertex
    placement cannot (the regular heptagon is irrational).  The skeleton is
    straight but not GKM; positions attached here are for drawing only.
    """
    t1, t2, u1, u4 = _HEPT_T1, _HEPT_T2, _HEPT_U1, _HEPT_U4
    t5, u3 = _hept_dependent_slopes(t1, t2, u1, u4)
    eps = _HEPT_SHEAR
    t = {1: t1, 2: t2, 3: -t2, 4: -t1, 5: t5, 6: Fraction(0), 7: -t5}
    u = {1: u1, 2: -u1, 3: u3, 4: u4, 5: Fraction(0), 6: -u4, 7: -u3}
    ts = {k: v + eps for k, v in t.items()}
    us = {k: v + eps for k, v in u.items()}

    def mod7(i):
        return ((i - 1) % 7) + 1

    alpha: dict[Edge, Vector] = {}

    def add(i, j, s):
        lo, hi = (i, j) if _HEPT_ORDER[f"p{i}"] < _HEPT_ORDER[f"p{j}"] else (j, i)
        r = 1 if s > 0 else -1
        alpha[(f"p{lo}", f"p{hi}")] = Vector([Fraction(r), Fraction(r) * s])

    for i in range(1, 8):
        add(i, mod7(i + 1), ts[i])
        add(i, mod7(i + 3), us[i])
    full = dict(alpha)
    for (p, q), v in list(alpha.items()):
        full[(q, p)] = -v
    verts = [f"p{i}" for i in range(1, 8)]
    graph = Graph(verts, list(full))
    inference = infer_connection(graph, full)
    if inference.infeasible_edge is not None:
        raise SkeletonError("heptagon connection infeasible (bad frozen data)")
    theta = inference.connection(pick_first=True)
    sk = validate(verts, full, theta)
    pos = {
        "p1": Vector([Fraction(39, 50), Fraction(-31, 50)]),
        "p2": Vector([Fraction(49, 50), Fraction(11, 50)]),
        "p3": Vector([Fraction(43, 100), Fraction(9, 10)]),
        "p4": Vector([Fraction(-43, 100), Fraction(9, 10)]),
        "p5": Vector([Fraction(-49, 50), Fraction(11, 50)]),
        "p6": Vector([Fraction(-39, 50), Fraction(-31, 50)]),
        "p7": Vector([Fraction(0), Fraction(-1)]),
    }
    return InstanceSpec("hept7", sk, positions=pos, default_xi=Vector([0, 1]),
                        notes="straight, not GKM; connection chosen "
                              "deterministically among the valid matchings")


_BUILDERS = {
    "seg": seg,
    "tri": tri,
    "k4": k4,
    "quad1": lambda: quad("quad1"),
    "quad2": lambda: quad("quad2"),
    "quad3": lambda: quad("quad3"),
    "quad4": lambda: quad("quad4"),
    "quad5": lambda: quad("quad5"),
    "simplex3": simplex3,
    "prism3": prism3,
    "pent": lambda: polygon(5),
    "hept7": hept7,
}


def instance_names() -> list[str]:
    return sorted(_BUILDERS)


def build_instance(name: str) -> InstanceSpec:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise SkeletonError(f"unknown instance {name!r}; known: {', '.join(instance_names())}")
    return builder()


# -- JSON interchange ------------------------------------------------------------


def skeleton_to_obj(sk: Skeleton, positions: Optional[Mapping[str, Vector]] = None) -> dict:
    edges = []
    for (p, q) in sk.unoriented_edges():
        edges.append({
            "from": p, "to": q,
            "alpha": [str(c) for c in sk.alpha[(p, q)]],
        })
    connection = []
    for (p, q) in sk.oriented_edges():
        connection.append({
            "edge": [p, q],
            "map": [[list(e), list(f)] for e, f in sorted(sk.theta[(p, q)].items())],
        })
    obj = {
        "dimension": sk.dimension,
        "vertices": list(sk.vertices),
        "edges": edges,
        "connection": connection,
    }
    if positions:
        obj["positions"] = {v: [str(c) for c in pos] for v, pos in sorted(positions.items())}
    return obj


def skeleton_from_obj(obj: Mapping) -> tuple[Skeleton, dict[str, Vector]]:
    dim = obj.get("dimension")
    alpha: dict[Edge, Vector] = {}
    for item in obj["edges"]:
        p, q = item["from"], item["to"]
        alpha[(p, q)] = Vector([parse_fraction(c) for c in item["alpha"]])
    connection = None
    if obj.get("connection"):
        connection = {}
        for item in obj["connection"]:
            p, q = item["edge"]
            connection[(p, q)] = {tuple(e): tuple(f) for e, f in item["map"]}
    sk = validate(obj["vertices"], alpha, connection, dimension=dim)
    positions = {}
    for v, coords in (obj.get("positions") or {}).items():
        positions[v] = Vector([parse_fraction(c) for c in coords])
    return sk, positions


def save_instance(path: str, sk: Skeleton, positions=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(skeleton_to_obj(sk, positions), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_instance(path: str) -> tuple[Skeleton, dict[str, Vector]]:
    with open(path, encoding="utf-8") as fh:
        return skeleton_from_obj(json.load(fh))
