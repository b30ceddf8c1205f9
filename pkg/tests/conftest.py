from __future__ import annotations

import random
from fractions import Fraction

import pytest

from skeleta.cohomology import IntegralData, basis_by_degree
from skeleta.instances import build_instance
from skeleta.morse import find_polarization
from skeleta.polynomial import Polynomial, Vector


@pytest.fixture(scope="session")
def instances():
    names = ["seg", "tri", "k4", "simplex3", "hept7", "prism3", "pent",
             "quad1", "quad2", "quad3", "quad4", "quad5"]
    return {name: build_instance(name) for name in names}


@pytest.fixture(scope="session")
def morse_data(instances):
    return {
        name: find_polarization(spec.skeleton, spec.default_xi)
        for name, spec in instances.items()
    }


@pytest.fixture(scope="session")
def integral_data(instances, morse_data):
    return {
        name: IntegralData.for_skeleton(spec.skeleton, morse_data[name])
        for name, spec in instances.items()
    }


def rng(seed: int) -> random.Random:
    return random.Random(seed)


def random_fraction(r: random.Random, lo: int = -9, hi: int = 9,
                    max_den: int = 5) -> Fraction:
    num = r.randrange(lo, hi + 1)
    den = r.randrange(1, max_den + 1)
    return Fraction(num, den)


def random_polynomial(r: random.Random, nvars: int, degree: int,
                      terms: int = 4) -> Polynomial:
    out = {}
    for _ in range(terms):
        exps = [0] * nvars
        for _ in range(degree):
            exps[r.randrange(nvars)] += 1
        out[tuple(exps)] = random_fraction(r)
    return Polynomial(nvars, out)


def random_homogeneous(r: random.Random, nvars: int, degree: int) -> Polynomial:
    from skeleta.cohomology import monomials
    terms = {}
    for mono in monomials(nvars, degree):
        if r.random() < 0.7:
            terms[mono] = random_fraction(r)
    return Polynomial(nvars, terms)


def random_class(r: random.Random, skeleton, degree: int,
                 cache: dict = {}):
    """Random rational combination of the degree-basis classes."""
    key = (id(skeleton), degree)
    if key not in cache:
        cache[key] = basis_by_degree(skeleton, degree)
    basis = cache[key]
    if not basis:
        return None
    out = None
    for cls in basis:
        c = random_fraction(r, -4, 4, 3)
        term = cls * Polynomial.const(skeleton.dimension, c)
        out = term if out is None else out + term
    return out
