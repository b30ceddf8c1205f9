from fractions import Fraction

import pytest

from skeleta.polynomial import (
    FactoredFraction,
    Polynomial,
    Vector,
    divide_by_linear,
    solve_pair,
    wedge2,
)

from conftest import random_polynomial, rng


def V(*coords):
    return Vector([Fraction(c) for c in coords])


def test_vector_arithmetic():
    a, b = V(1, 2), V(3, -1)
    assert a + b == V(4, 1)
    assert a - b == V(-2, 3)
    assert -a == V(-1, -2)
    assert a.scale(Fraction(1, 2)) == V(Fraction(1, 2), 1)
    assert a.dot(b) == 1
    assert wedge2(a, b) == -7


def test_parallel_detection():
    assert V(2, -4).is_parallel(V(-1, 2))
    assert not V(2, -4).is_parallel(V(1, 2))
    assert V(0, 0).is_parallel(V(1, 2))


def test_solve_pair_unique_and_membership():
    a, b = V(1, 0, 1), V(0, 1, 1)
    assert solve_pair(a, b, V(2, 3, 5)) == (2, 3)
    assert solve_pair(a, b, V(2, 3, 4)) is None


def test_polynomial_basics():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    p = (x + y) * (x - y)
    assert p == x * x - y * y
    assert p.homogeneous_degree() == 2
    assert (p + Polynomial.const(2, 1)).homogeneous_degree() is None
    assert Polynomial.zero(2).homogeneous_degree() == -1
    assert (x * 0).is_zero()
    assert p.degree() == 2


def test_power_and_substitution():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    p = (x + 2 * y) ** 3
    assert p.coefficient((0, 3)) == 8
    # substitute x -> y gives (3y)^3
    assert p.substitute(0, y) == (3 * y) ** 3


def test_divide_by_linear_identity_case():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    assert divide_by_linear(x - y, x - y) == Polynomial.const(2, 1)


def test_divide_by_linear_difference_of_squares():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    assert divide_by_linear(x * x - y * y, x - y) == x + y


def test_divide_by_linear_substitution_witness():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    assert divide_by_linear(x * x + y * y, x - y) is None


def test_divide_by_linear_rejects_bad_divisors():
    x = Polynomial.variable(2, 0)
    with pytest.raises(ValueError):
        divide_by_linear(x, Polynomial.zero(2))
    with pytest.raises(ValueError):
        divide_by_linear(x, x * x)
    with pytest.raises(ValueError):
        divide_by_linear(x, x + Polynomial.const(2, 1))


def test_exact_division_roundtrip_random():
    r = rng(101)
    for _ in range(40):
        f = random_polynomial(r, 3, 3)
        ell_terms = {}
        for i in range(3):
            c = r.randrange(-3, 4)
            if c:
                e = [0, 0, 0]
                e[i] = 1
                ell_terms[tuple(e)] = Fraction(c)
        ell = Polynomial(3, ell_terms)
        if ell.is_zero():
            continue
        product = f * ell
        q = divide_by_linear(product, ell)
        assert q is not None and q * ell == product
        assert q == f or (q - f).is_zero()


def test_factored_fraction_cancellation():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    frac = FactoredFraction.from_poly(x * x - y * y).div_poly(x - y)
    assert frac.as_polynomial() == x + y
    blocked = FactoredFraction.from_poly(x * x + y * y).div_poly(x - y)
    assert blocked.as_polynomial() is None
    assert blocked.blocking_factors()


def test_factored_fraction_addition():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    one = Polynomial.const(2, 1)
    # 1/(x-y) + 1/(y-x) = 0
    a = FactoredFraction.from_poly(one).div_poly(x - y)
    b = FactoredFraction.from_poly(one).div_poly(y - x)
    assert (a + b).is_zero()
    # x/(x-y) - y/(x-y) = 1
    c = FactoredFraction.from_poly(x).div_poly(x - y)
    d = FactoredFraction.from_poly(y).div_poly(x - y)
    assert (c - d).as_polynomial() == one


def test_serialization_canonical_order():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    p = x * x + 2 * y + Polynomial.const(2, Fraction(1, 3))
    obj = p.to_obj()
    assert obj[0]["coefficient"] == "1/3"
    assert Polynomial.from_obj(2, obj) == p
    degrees = [sum(item["exponents"]) for item in obj]
    assert degrees == sorted(degrees)


def test_fraction_string_format():
    assert str(Fraction(3, 1)) == "3"
    assert str(Fraction(-7, 2)) == "-7/2"
