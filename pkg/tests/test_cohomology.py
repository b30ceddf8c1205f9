import math
from fractions import Fraction

import pytest

from skeleta.cohomology import (
    ClassError,
    EquivariantClass,
    IntegralData,
    NonPolynomialIntegral,
    NotStraightError,
    PipelineFailure,
    ThomClassError,
    basis_by_degree,
    constant_class,
    edge_thom_class,
    generating_family,
    integral,
    integral_pairing,
    is_class,
    morse_package,
    planar_codim2_class,
    thom_class,
    thom_multiply,
    vertex_thom_class,
    weak_generating_class,
)
from skeleta.instances import build_instance
from skeleta.morse import MorseData, find_polarization
from skeleta.polynomial import Polynomial, Vector

from conftest import random_class, random_fraction, rng


def dim_sym(k, n):
    return 0 if k < 0 else math.comb(k + n - 1, n - 1)


class TestIsClass:
    def test_constant_map(self, instances):
        sk = instances["k4"].skeleton
        one = constant_class(sk, Polynomial.const(2, 1))
        ok, witness = is_class(sk, one)
        assert ok and witness is None

    def test_vertex_thom_class(self, instances):
        sk = instances["k4"].skeleton
        for v in sk.vertices:
            ok, _ = is_class(sk, vertex_thom_class(sk, v))
            assert ok

    def test_perturbation_detected_with_edge(self, instances):
        sk = instances["k4"].skeleton
        cls = vertex_thom_class(sk, "p1")
        values = dict(cls.values)
        x3 = Polynomial.variable(2, 0) ** 3
        values["p2"] = values["p2"] + x3
        broken = EquivariantClass(sk, values)
        ok, witness = is_class(sk, broken)
        assert not ok and witness is not None
        assert "p2" in witness

    def test_inhomogeneous_rejected(self, instances):
        sk = instances["k4"].skeleton
        x = Polynomial.variable(2, 0)
        with pytest.raises(ClassError):
            EquivariantClass(sk, {"p1": x + Polynomial.const(2, 1)})

    def test_ring_structure_random_products(self, instances):
        sk = instances["k4"].skeleton
        r = rng(41)
        for _ in range(6):
            f = random_class(r, sk, 1)
            g = random_class(r, sk, 2)
            ok, _ = is_class(sk, f * g)
            assert ok

    def test_duality_cross_check(self, instances, integral_data):
        # a class passes the edge-class pairing test; a perturbed non-class
        # fails it for some edge class
        sk = instances["k4"].skeleton
        data = integral_data["k4"]
        r = rng(43)
        f = random_class(r, sk, 2)
        for edge in sk.unoriented_edges():
            sigma = edge_thom_class(sk, edge)
            assert integral_pairing(f, sigma, data) is not None
        values = dict(f.values)
        values["p3"] = values["p3"] + Polynomial.variable(2, 0) ** 2
        broken = EquivariantClass(sk, values)
        assert not is_class(sk, broken)[0]
        failures = [
            edge for edge in sk.unoriented_edges()
            if integral_pairing(broken, edge_thom_class(sk, edge), data) is None
        ]
        assert failures


class TestThomClasses:
    def test_vertex_subskeleton(self, instances):
        sk = instances["simplex3"].skeleton
        sub = sk.subskeleton([], vertices=["p2"])
        tc = thom_class(sub)
        assert tc.cls == vertex_thom_class(sk, "p2")
        assert tc.cls.degree == sk.valency
        assert tc.cls.support() == {"p2"}

    def test_edge_formula(self, instances):
        sk = instances["prism3"].skeleton
        for (p, q) in sk.unoriented_edges()[:4]:
            sub = sk.subskeleton([(p, q)])
            tc = thom_class(sub, basepoint=p)
            expected = edge_thom_class(sk, (p, q))
            assert tc.cls == expected
            # explicit form at the far endpoint
            prod = Polynomial.const(2, sk.connection_number((p, q)))
            for e in sk.edges_at(q):
                if e != (q, p):
                    prod = prod * Polynomial.from_vector(sk.alpha[e])
            assert tc.cls[q] == prod

    def test_face_slice_of_simplex(self, instances):
        sk = instances["simplex3"].skeleton
        for s in sk.slices(2):
            tc = thom_class(s)
            ok, _ = is_class(sk, tc.cls)
            assert ok
            assert tc.cls.degree == s.covalency() == 1

    def test_cocycle_relation(self, instances):
        sk = instances["simplex3"].skeleton
        s = sk.slices(2)[0]
        tc = thom_class(s)
        for (p, q) in sorted(s.edge_set):
            lhs = tc.constants[q]
            rhs = tc.constants[p] * s.normal_step_number((p, q))
            assert lhs == rhs

    def test_not_normally_straight_certificate(self):
        from test_skeleton import near_regular_heptagon
        sk, boundary = near_regular_heptagon()
        sub = sk.subskeleton(boundary)
        with pytest.raises(ThomClassError) as err:
            thom_class(sub)
        assert err.value.loop is not None

    def test_thom_multiply_unit(self, instances):
        sk = instances["simplex3"].skeleton
        s = sk.slices(2)[0]
        tc = thom_class(s)
        one = {v: Polynomial.const(3, 1) for v in s.vertices}
        assert thom_multiply(one, tc) == tc.cls

    def test_thom_multiply_restriction_of_class(self, instances):
        sk = instances["simplex3"].skeleton
        s = sk.slices(2)[0]
        tc = thom_class(s)
        r = rng(47)
        g = random_class(r, sk, 1)
        restricted = {v: g[v] for v in s.vertices}
        out = thom_multiply(restricted, tc)
        ok, _ = is_class(sk, out)
        assert ok
        for v in s.vertices:
            assert out[v] == g[v] * tc.cls[v]

    def test_slice_class_times_thom_lands_in_parent(self, instances):
        sk = instances["simplex3"].skeleton
        s = sk.slices(2)[0]
        sub = s.as_skeleton()
        tc = thom_class(s)
        r = rng(53)
        cls = random_class(r, sub, 1)
        out = thom_multiply({v: cls[v] for v in sub.vertices}, tc)
        ok, _ = is_class(sk, out)
        assert ok


class TestIntegral:
    def test_vertex_classes(self, instances, integral_data):
        for name in ("tri", "k4", "simplex3", "hept7", "prism3"):
            sk = instances[name].skeleton
            data = integral_data[name]
            for v in sk.vertices:
                out = integral(vertex_thom_class(sk, v), data)
                assert out == Polynomial.const(sk.dimension, 1 / data.constants[v])

    def test_low_degree_vanishes(self, instances, integral_data):
        sk = instances["k4"].skeleton
        data = integral_data["k4"]
        r = rng(59)
        for deg in (0, 1, 2):
            f = random_class(r, sk, deg)
            assert integral(f, data).is_zero()

    def test_seg_two_term_value(self, instances):
        spec = instances["seg"]
        sk = spec.skeleton
        m = find_polarization(sk, spec.default_xi)
        data = IntegralData.for_skeleton(sk, m)
        f = EquivariantClass(sk, {"q": Polynomial.variable(1, 0)})
        assert integral(f, data) == Polynomial.const(1, -1)

    def test_integrals_polynomial_up_to_dplus2(self, instances, integral_data):
        for name in ("tri", "k4", "prism3"):
            sk = instances[name].skeleton
            data = integral_data[name]
            for deg in range(sk.valency + 3):
                for cls in basis_by_degree(sk, deg):
                    integral(cls, data)  # raises if not polynomial

    def test_non_straight_rejected(self):
        from test_skeleton import near_regular_heptagon
        sk, _ = near_regular_heptagon()
        with pytest.raises(NotStraightError) as err:
            IntegralData.for_skeleton(sk)
        assert err.value.loop is not None

    def test_non_class_integral_blocked(self, instances, integral_data):
        sk = instances["k4"].skeleton
        data = integral_data["k4"]
        bad = EquivariantClass(sk, {"p1": Polynomial.variable(2, 0)})
        assert not is_class(sk, bad)[0]
        with pytest.raises(NonPolynomialIntegral) as err:
            integral(bad, data)
        assert err.value.blockers


class TestBasisByDegree:
    def test_degree_zero_constants(self, instances):
        for name in ("k4", "hept7", "simplex3"):
            sk = instances[name].skeleton
            basis = basis_by_degree(sk, 0)
            assert len(basis) == 1

    def test_seg_degree_one(self, instances):
        sk = instances["seg"].skeleton
        assert len(basis_by_degree(sk, 1)) == 2

    def test_hept7_obstruction_dimension(self, instances):
        sk = instances["hept7"].skeleton
        constrained = basis_by_degree(sk, 1, vanishing=["p6", "p7"])
        assert len(constrained) == 0

    def test_all_outputs_are_classes(self, instances):
        sk = instances["prism3"].skeleton
        for deg in range(4):
            for cls in basis_by_degree(sk, deg):
                ok, _ = is_class(sk, cls)
                assert ok

    @pytest.mark.parametrize("name", ["k4", "simplex3"])
    def test_free_module_rank_prediction(self, name, instances, morse_data):
        sk = instances[name].skeleton
        b = morse_data[name].betti_numbers()
        n = sk.dimension
        for m in range(sk.valency + 3):
            predicted = sum(bj * dim_sym(m - j, n) for j, bj in enumerate(b))
            assert len(basis_by_degree(sk, m)) == predicted

    def test_hept7_rank_deficit(self, instances, morse_data):
        # without the package the degree-wise dimensions fall short of the
        # free-module prediction somewhere up to d + 2
        sk = instances["hept7"].skeleton
        b = morse_data["hept7"].betti_numbers()
        deficits = []
        for m in range(sk.valency + 3):
            predicted = sum(bj * dim_sym(m - j, 2) for j, bj in enumerate(b))
            deficits.append(predicted - len(basis_by_degree(sk, m)))
        assert any(d != 0 for d in deficits)


class TestGeneratingFamily:
    def test_seg_forced_family(self, instances, morse_data, integral_data):
        sk = instances["seg"].skeleton
        fam = generating_family(sk, morse_data["seg"], integral_data["seg"])
        assert fam["p"].values["p"] == Polynomial.const(1, 1)
        assert fam["q"].support() == {"q"}
        assert fam["q"]["q"] == Polynomial.from_vector(sk.alpha[("q", "p")])

    def test_k4_degrees_and_ranks(self, instances, morse_data, integral_data):
        sk = instances["k4"].skeleton
        m = morse_data["k4"]
        fam = generating_family(sk, m, integral_data["k4"])
        degrees = sorted(cls.degree for cls in fam.classes.values())
        assert degrees == [0, 1, 2, 3]
        # family elements times monomials span each graded piece
        for deg in range(sk.valency + 3):
            predicted = len(basis_by_degree(sk, deg))
            spanned = _spanned_dimension(sk, fam, deg)
            assert spanned == predicted

    def test_hept7_fails_at_p5(self, instances, morse_data, integral_data):
        sk = instances["hept7"].skeleton
        with pytest.raises(PipelineFailure) as err:
            generating_family(sk, morse_data["hept7"], integral_data["hept7"])
        assert err.value.vertex == "p5"

    @pytest.mark.parametrize("name", ["quad1", "quad2", "quad3", "quad4", "quad5"])
    def test_quadrilateral_instances(self, name, instances, morse_data, integral_data):
        sk = instances[name].skeleton
        m = morse_data[name]
        fam = generating_family(sk, m, integral_data[name])
        for v, cls in fam.items():
            assert cls.degree == m.index[v]
            reach, _ = m.flow_up(v)
            assert cls.support() <= reach

    def test_weak_oracle_matches_pipeline(self, instances, morse_data):
        for name in ("k4", "simplex3", "prism3", "pent"):
            sk = instances[name].skeleton
            m = morse_data[name]
            for v in sk.vertices:
                assert weak_generating_class(sk, m, v) is not None
        hept = instances["hept7"].skeleton
        hm = morse_data["hept7"]
        missing = [v for v in hept.vertices
                   if weak_generating_class(hept, hm, v) is None]
        assert missing == ["p5"]


def _spanned_dimension(sk, fam, degree):
    """Rank of {monomial * family class} inside the degree-m coefficient space."""
    from skeleta.cohomology import monomials, nullspace
    n = sk.dimension
    monos_all = monomials(n, degree)
    col_index = {}
    for v in sk.vertices:
        for mono in monos_all:
            col_index[(v, mono)] = len(col_index)
    rows = []
    for v, cls in fam.items():
        shift = degree - cls.degree
        if shift < 0:
            continue
        for mono in monomials(n, shift):
            gen = cls * Polynomial(n, {mono: 1})
            row = [Fraction(0)] * len(col_index)
            for x, poly in gen.values.items():
                for e, c in poly.terms.items():
                    row[col_index[(x, e)]] = c
            rows.append(row)
    # row rank
    rank = 0
    width = len(col_index)
    mat = [r[:] for r in rows]
    rowi = 0
    for col in range(width):
        piv = next((r for r in range(rowi, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[rowi], mat[piv] = mat[piv], mat[rowi]
        inv = 1 / mat[rowi][col]
        mat[rowi] = [x * inv for x in mat[rowi]]
        for r2 in range(len(mat)):
            if r2 != rowi and mat[r2][col] != 0:
                f0 = mat[r2][col]
                mat[r2] = [a - f0 * b for a, b in zip(mat[r2], mat[rowi])]
        rowi += 1
        rank += 1
    return rank


class TestMorsePackage:
    def test_k4_has_package(self, instances, morse_data):
        rep = morse_package(instances["k4"].skeleton, morse_data["k4"])
        assert rep.has_package and rep.theorem_agreement
        assert rep.family is not None

    def test_hept7_counterexample(self, instances, morse_data):
        rep = morse_package(instances["hept7"].skeleton, morse_data["hept7"])
        assert rep.straight and rep.noncyclic
        assert not rep.has_package
        assert rep.failure["vertex"] == "p5"
        assert rep.oracle_failures[0]["constrained_dimension"] == 0
        assert rep.oracle_failures[0]["vanishing"] == ["p6", "p7"]
        assert rep.theorem_agreement

    def test_simplex_slices_and_package(self, instances, morse_data):
        rep = morse_package(instances["simplex3"].skeleton, morse_data["simplex3"])
        assert rep.has_package
        assert len(rep.slice_verdicts) == 4
        assert all(s["has_package"] for s in rep.slice_verdicts)


class TestPlanarCodim2:
    def test_k4_index_one_vertices(self, instances, morse_data, integral_data):
        sk = instances["k4"].skeleton
        m = morse_data["k4"]
        vs = [v for v in sk.vertices if m.index[v] == sk.valency - 2]
        assert vs
        for v in vs:
            cls = planar_codim2_class(sk, m, integral_data["k4"], v)
            assert cls.degree == sk.valency - 2
            ok, _ = is_class(sk, cls)
            assert ok

    def test_hept7_index_two_vertices(self, instances, morse_data, integral_data):
        sk = instances["hept7"].skeleton
        m = morse_data["hept7"]
        vs = [v for v in sk.vertices if m.index[v] == 2]
        assert vs
        for v in vs:
            cls = planar_codim2_class(sk, m, integral_data["hept7"], v)
            assert cls.degree == 2
            assert cls.support() <= m.flow_up(v)[0]

    def test_wedge_ratio_product_closes(self, instances, morse_data, integral_data):
        # the closure identity is asserted inside the construction; reaching
        # a verified class is the observable consequence
        sk = instances["prism3"].skeleton
        m = morse_data["prism3"]
        vs = [v for v in sk.vertices if m.index[v] == sk.valency - 2]
        for v in vs:
            planar_codim2_class(sk, m, integral_data["prism3"], v)
