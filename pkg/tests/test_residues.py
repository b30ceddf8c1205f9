from fractions import Fraction

import pytest

from skeleta.polynomial import Polynomial, Vector
from skeleta.residues import (
    NonPolarizedError,
    RepeatedRootError,
    XiBasis,
    elementary_symmetric,
    power_reduce,
    res_xi,
    residue_at_infinity,
    rho_project,
)

from conftest import random_fraction, random_polynomial, rng


def V(*coords):
    return Vector([Fraction(c) for c in coords])


def linear(nvars, *coeffs):
    terms = {}
    for i, c in enumerate(coeffs):
        if c:
            e = [0] * nvars
            e[i] = 1
            terms[tuple(e)] = Fraction(c)
    return Polynomial(nvars, terms)


def random_linear_y(r, nvars):
    """Random linear form in the y-variables (no x = variable 0)."""
    coeffs = [0] + [random_fraction(r, -6, 6, 3) for _ in range(nvars - 1)]
    return linear(nvars, *coeffs)


class TestXiBasis:
    def test_defining_relations(self):
        xi = V(2, -3, 5)
        b = XiBasis(xi)
        assert xi.dot(b.x_vector) == 1
        for y in b.y_vectors:
            assert xi.dot(y) == 0
        assert len(b.y_vectors) == 2

    def test_roundtrip_random_degree3(self):
        r = rng(7)
        xi = V(1, -2, 3)
        b = XiBasis(xi)
        for _ in range(15):
            f = random_polynomial(r, 3, 3)
            assert b.from_xi_coords(b.to_xi_coords(f)) == f

    def test_constant_fixed(self):
        b = XiBasis(V(0, 1))
        c = Polynomial.const(2, Fraction(5, 3))
        assert b.to_xi_coords(c) == c

    def test_edge_form_reconstructs_vector(self):
        b = XiBasis(V(1, 2))
        alpha = V(3, -1)
        ef = b.edge_form(alpha)
        assert ef.m == 1
        x = Polynomial.variable(2, 0)
        assert b.from_xi_coords((x - ef.beta).scale(ef.m)) == Polynomial.from_vector(alpha)

    def test_edge_form_opposite_vector_same_beta(self):
        b = XiBasis(V(1, 2, -1))
        alpha = V(3, -1, 2)
        assert b.edge_form(alpha).beta == b.edge_form(-alpha).beta

    def test_nonpolarized_vector_rejected(self):
        b = XiBasis(V(0, 1))
        with pytest.raises(NonPolarizedError):
            b.edge_form(V(1, 0))


class TestRhoProject:
    def test_kernel_element(self):
        b = XiBasis(V(1, 1))
        alpha = V(2, 1)
        ef = b.edge_form(alpha)
        out = rho_project(Polynomial.from_vector(alpha), ef, b)
        assert out.is_zero()

    def test_other_edge_value(self):
        # rho_e(alpha') = m' * (beta_e - beta')
        b = XiBasis(V(1, 1))
        e1 = b.edge_form(V(2, 1))
        e2 = b.edge_form(V(1, 3))
        out = rho_project(Polynomial.from_vector(V(1, 3)), e1, b)
        assert out == (e1.beta - e2.beta).scale(e2.m)

    def test_y_polynomial_unchanged(self):
        b = XiBasis(V(1, 0, 0))
        ef = b.edge_form(V(1, 1, 1))
        # a polynomial in the annihilator variables only
        f = Polynomial.from_vector(b.y_vectors[0]) * Polynomial.from_vector(b.y_vectors[1])
        f_xi = b.to_xi_coords(f)
        assert f_xi.max_exponent(0) == 0
        assert rho_project(f, ef, b) == f_xi

    def test_ring_homomorphism(self):
        r = rng(31)
        b = XiBasis(V(1, -1, 2))
        ef = b.edge_form(V(1, 1, 1))
        for _ in range(10):
            f = random_polynomial(r, 3, 2)
            g = random_polynomial(r, 3, 2)
            assert rho_project(f * g, ef, b) == rho_project(f, ef, b) * rho_project(g, ef, b)


class TestResidueAtInfinity:
    def test_single_root_constant(self):
        one = Polynomial.const(2, 1)
        z = Polynomial.variable(2, 1)
        assert residue_at_infinity(one, [z]) == one

    def test_leading_coefficient_identity(self):
        # res of x^{m-1} over prod(x - z_i) is 1, for any distinct roots
        r = rng(11)
        x = Polynomial.variable(3, 0)
        for m in range(1, 6):
            roots = []
            while len(roots) < m:
                z = random_linear_y(r, 3)
                if all(z != w for w in roots):
                    roots.append(z)
            assert residue_at_infinity(x ** (m - 1), roots) == Polynomial.const(3, 1)

    def test_low_degree_vanishing(self):
        r = rng(13)
        x = Polynomial.variable(3, 0)
        for m in range(2, 6):
            roots = []
            while len(roots) < m:
                z = random_linear_y(r, 3)
                if all(z != w for w in roots):
                    roots.append(z)
            for k in range(m - 1):
                assert residue_at_infinity(x ** k, roots).is_zero()

    def test_product_identity(self):
        # sum over i of prod_{j!=i} z_j / prod_{j!=i}(z_j - z_i) = 1
        r = rng(17)
        for m in range(2, 6):
            roots = []
            while len(roots) < m:
                z = random_linear_y(r, 3)
                if all(z != w for w in roots) and not z.is_zero():
                    roots.append(z)
            from skeleta.polynomial import FactoredFraction
            total = FactoredFraction.zero(3)
            for i in range(m):
                term = FactoredFraction.from_poly(Polynomial.const(3, 1))
                for j in range(m):
                    if j != i:
                        term = term.mul_poly(roots[j]).div_poly(roots[j] - roots[i])
                total = total + term
            assert total.as_polynomial() == Polynomial.const(3, 1)

    def test_linearity_and_symmetry(self):
        r = rng(19)
        roots = [linear(2, 0, 1), linear(2, 0, 2), linear(2, 0, -1)]
        f = random_polynomial(r, 2, 3)
        g = random_polynomial(r, 2, 2)
        rf = residue_at_infinity(f, roots)
        rg = residue_at_infinity(g, roots)
        assert residue_at_infinity(f + g, roots) == rf + rg
        shuffled = [roots[2], roots[0], roots[1]]
        assert residue_at_infinity(f, shuffled) == rf

    def test_repeated_roots_rejected(self):
        z = linear(2, 0, 1)
        with pytest.raises(RepeatedRootError):
            residue_at_infinity(Polynomial.const(2, 1), [z, z])


class TestResXi:
    def test_single_direction(self):
        b = XiBasis(V(1, 0))
        out = res_xi(Polynomial.const(2, 1), [V(1, 0)], b)
        assert out == Polynomial.const(2, 1)

    def test_divisibility_detection(self):
        # residues of x^k * f / prod vanish for all k < m exactly when the
        # denominator divides f
        r = rng(23)
        b = XiBasis(V(1, 0, 0))
        x = Polynomial.variable(3, 0)
        divisible, nondivisible = 0, 0
        for trial in range(50):
            m = r.randrange(2, 5)
            roots = []
            while len(roots) < m:
                z = random_linear_y(r, 3)
                if all(z != w for w in roots):
                    roots.append(z)
            h = random_polynomial(r, 3, 2)
            if h.is_zero():
                continue
            denominator = Polynomial.const(3, 1)
            for z in roots:
                denominator = denominator * (x - z)
            if trial % 2 == 0:
                numerator = h * denominator
                expect_zero = True
                divisible += 1
            else:
                remainder = random_linear_y(r, 3) + Polynomial.const(3, 0)
                numerator = h * denominator + remainder
                if remainder.is_zero():
                    continue
                expect_zero = False
                nondivisible += 1
            seen_nonzero = False
            for k in range(m):
                res = residue_at_infinity(x ** k * numerator, roots)
                if not res.is_zero():
                    seen_nonzero = True
            assert seen_nonzero != expect_zero
        assert divisible > 10 and nondivisible > 10


class TestSymmetricFunctions:
    def test_small_cases(self):
        a, b = Fraction(2), Fraction(3)
        assert elementary_symmetric(1, [a, b]) == 5
        assert elementary_symmetric(2, [a, b]) == 6
        assert elementary_symmetric(0, [a, b]) == 1

    def test_symbolic_values(self):
        x = Polynomial.variable(2, 0)
        y = Polynomial.variable(2, 1)
        assert elementary_symmetric(1, [x, y]) == x + y
        assert elementary_symmetric(2, [x, y]) == x * y

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            elementary_symmetric(3, [Fraction(1), Fraction(2)])

    def test_power_reduction_symbolic(self):
        # v^m = sum_j c_j v^j for every v among the values
        x = Polynomial.variable(2, 0)
        y = Polynomial.variable(2, 1)
        coeffs = power_reduce([x, y])
        # a^2 = (a+b)*a - ab
        for v in (x, y):
            total = Polynomial.zero(2)
            power = Polynomial.const(2, 1)
            for c in coeffs:
                total = total + (c * power if isinstance(c, Polynomial) else power.scale(c))
                power = power * v
            assert total == v * v

    def test_power_reduction_numeric(self):
        r = rng(29)
        for _ in range(10):
            m = r.randrange(2, 6)
            values = [random_fraction(r) for _ in range(m)]
            coeffs = power_reduce(values)
            for v in values:
                assert sum(c * v ** j for j, c in enumerate(coeffs)) == v ** m
