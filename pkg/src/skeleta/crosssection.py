"""Cross sections, Kirwan maps, tau expansions, flip-flop maps, and
constructive Kirwan preimages.

A cross section at a regular value collects the oriented edges crossing the
level.  Values on those edges live in the hyperplane ring (y-variables of
the covector-adapted frame).  The two distinguished subsets at a level are
the rising edges out of the highest vertex below it and the reversed falling
edges of the lowest vertex above it; on either subset the edge-to-beta map
is injective, and membership questions reduce to polynomial interpolation
in the beta values with all coefficients polynomial.

Levels are canonicalized to midpoints between consecutive Morse values, so
every sweep visits the same regular values deterministically.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .cohomology import (
    EquivariantClass,
    IntegralData,
    constant_class,
    edge_thom_class,
    is_class,
    vertex_thom_class,
    basis_by_degree,
)
from .morse import MorseData
from .polynomial import FactoredFraction, Polynomial, Vector
from .residues import EdgeForm, XiBasis, res_xi_adapted
from .skeleton import Edge, Skeleton, SkeletonError


class ExpansionError(SkeletonError):
    """A tau expansion has a non-polynomial coefficient (non-membership)."""

    def __init__(self, message: str, coefficient_index: Optional[int] = None):
        super().__init__(message)
        self.coefficient_index = coefficient_index


class CrossSectionData:
    """Edges crossing a regular level, with their adapted edge forms."""

    def __init__(self, level: Fraction, edges: list[Edge],
                 delta_minus: list[Edge], delta_plus: list[Edge],
                 below: Optional[str], above: Optional[str]):
        self.level = level
        self.edges = edges              # rising orientation, sorted
        self.delta_minus = delta_minus  # rising out of the vertex just below
        self.delta_plus = delta_plus    # rising into the vertex just above
        self.below = below
        self.above = above


class CrossSectionClass:
    """A map from crossing edges to hyperplane-ring polynomials."""

    def __init__(self, data: CrossSectionData, values: Mapping[Edge, Polynomial]):
        self.data = data
        self.values = {e: values[e] for e in data.edges}

    def __getitem__(self, e: Edge) -> Polynomial:
        return self.values[e]

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.values.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CrossSectionClass):
            return NotImplemented
        return self.values == other.values

    def to_obj(self) -> dict:
        return {
            "level": str(self.data.level),
            "values": {f"{p}->{q}": poly.to_obj()
                       for (p, q), poly in sorted(self.values.items())},
        }


class LevelContext:
    """Shared data for all cross-section work on one polarized skeleton."""

    def __init__(self, skeleton: Skeleton, morse: MorseData, data: IntegralData):
        self.skeleton = skeleton
        self.morse = morse
        self.data = data
        self.basis = XiBasis(morse.xi)
        self._forms: dict[Edge, EdgeForm] = {}
        self.order = morse.vertices_by_phi()
        self.rank = {v: i + 1 for i, v in enumerate(self.order)}  # 1-based
        phi = morse.phi
        n = len(self.order)
        self.levels = [phi[self.order[0]] - 1]
        for i in range(n - 1):
            self.levels.append((phi[self.order[i]] + phi[self.order[i + 1]]) / 2)
        self.levels.append(phi[self.order[-1]] + 1)
        self._sections: dict[int, CrossSectionData] = {}

    def edge_form(self, e: Edge) -> EdgeForm:
        form = self._forms.get(e)
        if form is None:
            form = self.basis.edge_form(self.skeleton.alpha[e])
            self._forms[e] = form
        return form

    def level_above(self, v: str) -> int:
        return self.rank[v]

    def level_count(self) -> int:
        return len(self.levels)

    def cross_section(self, k: int) -> CrossSectionData:
        """Canonical cross section number k (0 = below everything)."""
        if k in self._sections:
            return self._sections[k]
        if not 0 <= k < len(self.levels):
            raise SkeletonError(f"no canonical level {k}")
        morse = self.morse
        edges = sorted(
            e for e in morse.rising
            if self.rank[e[0]] <= k < self.rank[e[1]]
        )
        below = self.order[k - 1] if k >= 1 else None
        above = self.order[k] if k < len(self.order) else None
        delta_minus = [e for e in edges if e[0] == below] if below else []
        delta_plus = [e for e in edges if e[1] == above] if above else []
        out = CrossSectionData(self.levels[k], edges, delta_minus, delta_plus,
                               below, above)
        self._sections[k] = out
        return out

    def section_at_value(self, c: Fraction) -> CrossSectionData:
        """Cross section at an arbitrary regular value."""
        morse = self.morse
        for v in self.order:
            if morse.phi[v] == c:
                raise SkeletonError(f"level {c} is critical (vertex {v})")
        edges = sorted(e for e in morse.rising
                       if morse.phi[e[0]] < c < morse.phi[e[1]])
        below_cands = [v for v in self.order if morse.phi[v] < c]
        above_cands = [v for v in self.order if morse.phi[v] > c]
        below = below_cands[-1] if below_cands else None
        above = above_cands[0] if above_cands else None
        delta_minus = [e for e in edges if e[0] == below] if below else []
        delta_plus = [e for e in edges if e[1] == above] if above else []
        return CrossSectionData(c, edges, delta_minus, delta_plus, below, above)


def kirwan_map(ctx: LevelContext, f: EquivariantClass,
               csd: CrossSectionData) -> CrossSectionClass:
    """Evaluate a class on crossing edges through the edge projections."""
    values = {}
    for e in csd.edges:
        form = ctx.edge_form(e)
        fx = ctx.basis.to_xi_coords(f[e[0]])
        values[e] = fx.substitute(0, form.beta)
    return CrossSectionClass(csd, values)


def kirwan_well_defined(ctx: LevelContext, f: EquivariantClass,
                        csd: CrossSectionData) -> bool:
    """The projection agrees from both endpoints of every crossing edge."""
    for e in csd.edges:
        form = ctx.edge_form(e)
        lo = ctx.basis.to_xi_coords(f[e[0]]).substitute(0, form.beta)
        hi = ctx.basis.to_xi_coords(f[e[1]]).substitute(0, form.beta)
        if lo != hi:
            return False
    return True


def cross_integral(ctx: LevelContext, g: CrossSectionClass) -> FactoredFraction:
    """The cross-sectional integral as an exact fraction over the
    hyperplane ring; polynomial exactly when g is in the cross-sectional
    cohomology."""
    n = ctx.skeleton.dimension
    total = FactoredFraction.zero(n)
    for e in g.data.edges:
        gv = g[e]
        if gv.is_zero():
            continue
        form = ctx.edge_form(e)
        i_vertex = e[0]
        scale = ctx.data.constants[i_vertex] * form.m
        term = FactoredFraction.from_poly(gv.scale(1 / scale))
        for e2 in ctx.skeleton.edges_at(i_vertex):
            if e2 == e:
                continue
            form2 = ctx.edge_form(e2)
            term = term.div_poly((form.beta - form2.beta).scale(form2.m))
        total = total + term
    return total


def cross_integral_via_residues(ctx: LevelContext, f: EquivariantClass,
                                k: int) -> Polynomial:
    """Residue form of the cross-sectional integral of a Kirwan image: the
    sum over vertices below the level of the directional residues of
    f(q) over the product of the edge vectors at q."""
    out = Polynomial.zero(ctx.skeleton.dimension)
    for v in ctx.order[:k]:
        forms = [ctx.edge_form(e) for e in ctx.skeleton.edges_at(v)]
        f_xi = ctx.basis.to_xi_coords(f[v])
        res = res_xi_adapted(f_xi, forms)
        out = out + res.scale(1 / ctx.data.constants[v])
    return out


# -- tau expansions ----------------------------------------------------------------


class TauExpansion:
    """Coefficients of the interpolating polynomial through (beta, value)."""

    def __init__(self, nvars: int, nodes: list[Polynomial], coefficients: list[Polynomial]):
        self.nvars = nvars
        self.nodes = nodes
        self.coefficients = coefficients

    def evaluate(self, beta: Polynomial) -> Polynomial:
        out = Polynomial.zero(self.nvars)
        power = Polynomial.const(self.nvars, 1)
        for c in self.coefficients:
            out = out + c * power
            power = power * beta
        return out

    def transition_polynomial(self) -> Polynomial:
        """The coefficients assembled against powers of the distinguished
        degree-one element x (variable 0 of the adapted frame)."""
        x = Polynomial.variable(self.nvars, 0)
        out = Polynomial.zero(self.nvars)
        power = Polynomial.const(self.nvars, 1)
        for c in self.coefficients:
            out = out + c * power
            power = power * x
        return out


def expand_in_tau(nodes: Sequence[Polynomial], values: Sequence[Polynomial],
                  nvars: Optional[int] = None) -> TauExpansion:
    """Solve sum_k c_k * beta^k = value at every node, exactly.

    The nodes must be pairwise distinct; the unique interpolating polynomial
    of degree < m is computed in Lagrange form, which is the Vandermonde
    solve with denominators the pairwise node differences.  A
    non-polynomial coefficient raises ExpansionError (non-membership).
    """
    m = len(nodes)
    if m != len(values):
        raise SkeletonError("nodes/values length mismatch")
    if m == 0:
        if nvars is None:
            raise SkeletonError("empty expansion needs an explicit nvars")
        return TauExpansion(nvars, [], [])
    n = nodes[0].nvars
    for i in range(m):
        for j in range(i + 1, m):
            if nodes[i] == nodes[j]:
                raise SkeletonError("tau map is not injective")
    coeff_sums = [FactoredFraction.zero(n) for _ in range(m)]
    one = Polynomial.const(n, 1)
    for v in range(m):
        num_coeffs = [one]
        for w in range(m):
            if w == v:
                continue
            shifted = [Polynomial.zero(n)] + num_coeffs
            scaled = [c * nodes[w] for c in num_coeffs] + [Polynomial.zero(n)]
            num_coeffs = [a - b for a, b in zip(shifted, scaled)]
        base = FactoredFraction.from_poly(values[v])
        for w in range(m):
            if w != v:
                base = base.div_poly(nodes[v] - nodes[w])
        for k in range(m):
            if not num_coeffs[k].is_zero():
                coeff_sums[k] = coeff_sums[k] + base.mul_poly(num_coeffs[k])
    coefficients = []
    for k, total in enumerate(coeff_sums):
        poly = total.as_polynomial()
        if poly is None:
            raise ExpansionError(
                f"coefficient {k} of the expansion is not polynomial",
                coefficient_index=k)
        coefficients.append(poly)
    return TauExpansion(n, list(nodes), coefficients)


def restrict(ctx: LevelContext, g: CrossSectionClass, side: str) -> TauExpansion:
    """Restriction to a delta subset followed by tau expansion.

    side "-" restricts to the rising star of the vertex just below the
    level, side "+" to the reversed falling star of the vertex just above.
    For certified cross-sectional classes membership is guaranteed, so an
    ExpansionError here signals an uncertified input or an upstream bug.
    """
    csd = g.data
    subset = csd.delta_minus if side == "-" else csd.delta_plus
    if side not in ("-", "+"):
        raise SkeletonError("side must be '-' or '+'")
    nodes = [ctx.edge_form(e).beta for e in subset]
    values = [g[e] for e in subset]
    return expand_in_tau(nodes, values, nvars=ctx.skeleton.dimension)


def flip_flop(ctx: LevelContext, g: CrossSectionClass, k: int, direction: str
              ) -> tuple[CrossSectionClass, Polynomial]:
    """Transition across the single vertex between adjacent canonical levels.

    direction "up" maps a class on level k-1 to level k across the k-th
    vertex; "down" maps level k to level k-1.  Returns the new class and the
    transition polynomial (coefficients of the source-side expansion strung
    on powers of x).
    """
    if direction not in ("up", "down"):
        raise SkeletonError("direction must be 'up' or 'down'")
    vertex = ctx.order[k - 1]
    low = ctx.cross_section(k - 1)
    high = ctx.cross_section(k)
    if direction == "up":
        if g.data is not low and g.data.level != low.level:
            raise SkeletonError("class is not on the level below the vertex")
        expansion = restrict(ctx, g, "+")
        values = {}
        for e in high.edges:
            if e in g.values:
                values[e] = g[e]
            else:
                values[e] = expansion.evaluate(ctx.edge_form(e).beta)
        return CrossSectionClass(high, values), expansion.transition_polynomial()
    if g.data is not high and g.data.level != high.level:
        raise SkeletonError("class is not on the level above the vertex")
    expansion = restrict(ctx, g, "-")
    values = {}
    for e in low.edges:
        if e in g.values:
            values[e] = g[e]
        else:
            values[e] = expansion.evaluate(ctx.edge_form(e).beta)
    return CrossSectionClass(low, values), expansion.transition_polynomial()


def kirwan_preimage(ctx: LevelContext, g: CrossSectionClass, k: int
                    ) -> EquivariantClass:
    """A class whose Kirwan image at canonical level k equals g, built by
    sweeping the flip-flop maps down to the empty level and up to the top,
    collecting one transition polynomial per vertex.

    Raises ExpansionError when an expansion en route is not polynomial
    (the expected failure when some 2-slice lacks the Morse package), and
    verifies both the class property and the round trip exactly."""
    sk = ctx.skeleton
    transition: dict[str, Polynomial] = {}
    current = g
    for j in range(k, 0, -1):
        current, poly = flip_flop(ctx, current, j, "down")
        transition[ctx.order[j - 1]] = poly
    current = g
    for j in range(k + 1, len(ctx.levels)):
        current, poly = flip_flop(ctx, current, j, "up")
        transition[ctx.order[j - 1]] = poly
    values = {v: ctx.basis.from_xi_coords(p) for v, p in transition.items()}
    cls = EquivariantClass(sk, values)
    ok, witness = is_class(sk, cls)
    if not ok:
        raise ExpansionError(f"preimage fails divisibility at {witness}")
    image = kirwan_map(ctx, cls, g.data)
    if image != g:
        raise ExpansionError("preimage round trip failed")
    return cls


# -- cross-sectional cohomology membership ------------------------------------------


def hc_membership(ctx: LevelContext, g: CrossSectionClass,
                  family: Optional[Mapping[str, EquivariantClass]] = None
                  ) -> tuple[bool, Optional[tuple[str, int]]]:
    """Finite membership criterion for the cross-sectional cohomology.

    With a generating family (complete mode): checks that the cross integral
    of g against the Kirwan image of x^k * tau_v is polynomial for every
    family member and every 0 <= k < |V_c|; the beta function on the
    crossing edges annihilates its own degree-|V_c| characteristic
    polynomial, so higher powers of x reduce to lower ones, and the family
    spans the classes over the polynomial ring.

    Without a family (necessary mode): the same checks against vertex and
    edge Thom classes and the constants, sound but not complete.

    Returns (verdict, witness) with witness = (class label, power).
    """
    csd = g.data
    bound = max(1, len(csd.edges))
    if family is not None:
        tests = [(f"family:{v}", cls) for v, cls in sorted(family.items())]
    else:
        sk = ctx.skeleton
        tests = [("const:1", constant_class(sk, Polynomial.const(sk.dimension, 1)))]
        tests += [(f"vertex:{v}", vertex_thom_class(sk, v)) for v in sk.vertices]
        tests += [(f"edge:{p}-{q}", edge_thom_class(sk, (p, q)))
                  for (p, q) in sk.unoriented_edges()]
    x_std = ctx.basis.from_xi_coords(Polynomial.variable(ctx.skeleton.dimension, 0))
    for label, cls in tests:
        twisted = cls
        for k in range(bound):
            image = kirwan_map(ctx, twisted, csd)
            prod_values = {e: g[e] * image[e] for e in csd.edges}
            total = cross_integral(ctx, CrossSectionClass(csd, prod_values))
            if total.as_polynomial() is None:
                return False, (label, k)
            twisted = twisted * x_std
    return True, None


def hc_membership_oracle(ctx: LevelContext, g: CrossSectionClass,
                         max_degree: int) -> tuple[bool, Optional[tuple[str, int]]]:
    """Exhaustive-sample membership check: integrates g against the Kirwan
    image of every basis class of each degree up to the bound.  Used to
    certify the finite criterion at desk scale."""
    csd = g.data
    for degree in range(max_degree + 1):
        for idx, cls in enumerate(basis_by_degree(ctx.skeleton, degree)):
            image = kirwan_map(ctx, cls, csd)
            prod_values = {e: g[e] * image[e] for e in csd.edges}
            total = cross_integral(ctx, CrossSectionClass(csd, prod_values))
            if total.as_polynomial() is None:
                return False, (f"deg{degree}#{idx}", 0)
    return True, None
