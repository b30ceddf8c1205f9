"""Exact multivariate polynomial arithmetic over the rationals.

Polynomials are elements of Sym(Q^n): the degree-one part is spanned by the
coordinate variables, coefficients are `fractions.Fraction`, and equality is
syntactic (no zero terms are ever stored).  Monomials are keyed by dense
exponent tuples ordered graded-lexicographically, which makes serialization
and leading-term extraction deterministic.

The module also provides exact single-divisor division (used for the
linear-form divisibility tests throughout the library) and a small
factored-denominator fraction type used by the integral and residue
operators, whose denominators are always products of explicit factors.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

Scalar = Union[int, Fraction]


def _as_fraction(c: Scalar) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


def monomial_key(exps: tuple[int, ...]) -> tuple:
    """Graded-lex sort key: total degree first, then lexicographic."""
    return (sum(exps), exps)


class Vector(tuple):
    """A point of Q^n, used both for axial-function values and covectors."""

    def __new__(cls, coords: Iterable[Scalar]) -> "Vector":
        return super().__new__(cls, (_as_fraction(c) for c in coords))

    @property
    def dim(self) -> int:
        return len(self)

    def __add__(self, other: "Vector") -> "Vector":  # type: ignore[override]
        return Vector(a + b for a, b in zip(self, other, strict=True))

    def __sub__(self, other: "Vector") -> "Vector":
        return Vector(a - b for a, b in zip(self, other, strict=True))

    def __neg__(self) -> "Vector":
        return Vector(-a for a in self)

    def scale(self, c: Scalar) -> "Vector":
        c = _as_fraction(c)
        return Vector(c * a for a in self)

    def dot(self, other: Sequence[Fraction]) -> Fraction:
        return sum((a * b for a, b in zip(self, other, strict=True)), Fraction(0))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self)

    def is_parallel(self, other: "Vector") -> bool:
        """True if the two vectors are linearly dependent (either may be 0)."""
        n = len(self)
        for i in range(n):
            for j in range(i + 1, n):
                if self[i] * other[j] - self[j] * other[i] != 0:
                    return False
        return True


def wedge2(u: Vector, v: Vector) -> Fraction:
    """Oriented area u ^ v in the plane."""
    if len(u) != 2 or len(v) != 2:
        raise ValueError("wedge2 requires plane vectors")
    return u[0] * v[1] - u[1] * v[0]


def solve_pair(a: Vector, b: Vector, target: Vector) -> Optional[tuple[Fraction, Fraction]]:
    """Solve target = s*a + t*b exactly; None if no (unique) solution.

    a and b must be linearly independent; the overdetermined rows beyond the
    pivot pair are verified, so a target outside span(a, b) returns None.
    """
    n = len(target)
    pivot = None
    for i in range(n):
        for j in range(i + 1, n):
            det = a[i] * b[j] - a[j] * b[i]
            if det != 0:
                pivot = (i, j, det)
                break
        if pivot:
            break
    if pivot is None:
        raise ValueError("solve_pair requires independent directions")
    i, j, det = pivot
    s = (target[i] * b[j] - target[j] * b[i]) / det
    t = (a[i] * target[j] - a[j] * target[i]) / det
    for k in range(n):
        if s * a[k] + t * b[k] != target[k]:
            return None
    return s, t


class Polynomial:
    """Immutable exact polynomial in a fixed number of variables."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], Scalar] | None = None):
        self.nvars = nvars
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for exps, c in terms.items():
                c = _as_fraction(c)
                if c != 0:
                    if len(exps) != nvars:
                        raise ValueError("exponent tuple has wrong length")
                    clean[tuple(exps)] = c
        self.terms = clean
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c: Scalar) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        exps = [0] * nvars
        exps[i] = 1
        return cls(nvars, {tuple(exps): 1})

    @classmethod
    def from_vector(cls, v: Vector) -> "Polynomial":
        """The linear form with coefficient v_i on variable i."""
        n = len(v)
        terms = {}
        for i, c in enumerate(v):
            if c != 0:
                exps = [0] * n
                exps[i] = 1
                terms[tuple(exps)] = c
        return cls(n, terms)

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def homogeneous_degree(self) -> Optional[int]:
        """Common total degree of all terms, or None if inhomogeneous.

        The zero polynomial is homogeneous of every degree and returns -1.
        """
        degs = {sum(e) for e in self.terms}
        if not degs:
            return -1
        if len(degs) > 1:
            return None
        return degs.pop()

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms, key=monomial_key)
        return exps, self.terms[exps]

    def coefficient(self, exps: tuple[int, ...]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: monomial_key(kv[0]))

    def max_exponent(self, var: int) -> int:
        """Largest exponent of the given variable (0 for the zero poly)."""
        return max((e[var] for e in self.terms), default=0)

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError("mixed variable counts")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Polynomial(self.nvars, terms)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) - c
        return Polynomial(self.nvars, terms)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.nvars, terms)

    def __rmul__(self, other: Scalar) -> "Polynomial":
        return self.scale(other)

    def scale(self, c: Scalar) -> "Polynomial":
        c = _as_fraction(c)
        if c == 0:
            return Polynomial.zero(self.nvars)
        return Polynomial(self.nvars, {e: c * co for e, co in self.terms.items()})

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __setattr__(self, name, value):
        if name in ("nvars", "terms") and hasattr(self, "terms"):
            raise AttributeError("Polynomial is immutable")
        super().__setattr__(name, value)

    # -- substitution and evaluation ----------------------------------------

    def substitute(self, var: int, value: "Polynomial") -> "Polynomial":
        """Ring homomorphism sending variable `var` to `value`."""
        if value.nvars != self.nvars:
            raise ValueError("mixed variable counts")
        powers: dict[int, Polynomial] = {0: Polynomial.const(self.nvars, 1)}
        top = self.max_exponent(var)
        for k in range(1, top + 1):
            powers[k] = powers[k - 1] * value
        out = Polynomial.zero(self.nvars)
        for e, c in self.terms.items():
            rest = list(e)
            k = rest[var]
            rest[var] = 0
            out = out + Polynomial(self.nvars, {tuple(rest): c}) * powers[k]
        return out

    def substitute_all(self, values: Sequence["Polynomial"]) -> "Polynomial":
        """Simultaneous substitution of every variable (linear change etc.)."""
        if len(values) != self.nvars:
            raise ValueError("need one replacement per variable")
        out = Polynomial.zero(self.nvars)
        for e, c in self.terms.items():
            term = Polynomial.const(self.nvars, c)
            for i, k in enumerate(e):
                if k:
                    term = term * values[i] ** k
            out = out + term
        return out

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError("wrong point dimension")
        pt = [_as_fraction(c) for c in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                for _ in range(k):
                    v *= pt[i]
            total += v
        return total

    # -- division -----------------------------------------------------------

    def exact_div(self, den: "Polynomial") -> Optional["Polynomial"]:
        """Exact quotient self/den, or None when den does not divide exactly.

        Leading-term division in graded-lex order; complete for exact
        divisibility since the order is multiplicative.
        """
        self._check(den)
        if den.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return Polynomial.zero(self.nvars)
        d_exps, d_coef = den.leading()
        quotient: dict[tuple[int, ...], Fraction] = {}
        rem = self
        while not rem.is_zero():
            r_exps, r_coef = rem.leading()
            q_exps = tuple(a - b for a, b in zip(r_exps, d_exps))
            if any(e < 0 for e in q_exps):
                return None
            q_coef = r_coef / d_coef
            quotient[q_exps] = q_coef
            rem = rem - Polynomial(self.nvars, {q_exps: q_coef}) * den
        return Polynomial(self.nvars, quotient)

    def primitive(self) -> tuple[Fraction, "Polynomial"]:
        """Write self = content * primitive with integer coprime coefficients
        and positive leading coefficient."""
        if self.is_zero():
            return Fraction(0), self
        nums = [c.numerator for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        g = 0
        for v in nums:
            g = gcd(g, abs(v))
        l = 1
        for v in dens:
            l = l * v // gcd(l, v)
        content = Fraction(g, l)
        prim = self.scale(1 / content)
        if prim.leading()[1] < 0:
            content = -content
            prim = -prim
        return content, prim

    # -- serialization -------------------------------------------------------

    def to_obj(self) -> list[dict]:
        """JSON-friendly form: canonical list of {exponents, coefficient}."""
        return [
            {"exponents": list(e), "coefficient": format_fraction(c)}
            for e, c in self.sorted_terms()
        ]

    @classmethod
    def from_obj(cls, nvars: int, obj: Iterable[Mapping]) -> "Polynomial":
        terms = {}
        for item in obj:
            terms[tuple(item["exponents"])] = parse_fraction(item["coefficient"])
        return cls(nvars, terms)

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        names = _var_names(self.nvars)
        parts = []
        for e, c in reversed(self.sorted_terms()):
            mono = "*".join(
                f"{names[i]}^{k}" if k > 1 else names[i]
                for i, k in enumerate(e)
                if k
            )
            if mono:
                parts.append(f"{c}*{mono}" if c != 1 else mono)
            else:
                parts.append(str(c))
        return " + ".join(parts)


def _var_names(n: int) -> list[str]:
    return [f"v{i}" for i in range(n)]


def format_fraction(c: Fraction) -> str:
    return str(c)


def parse_fraction(s: Union[str, int]) -> Fraction:
    return Fraction(s)


def divide_by_linear(f: Polynomial, ell: Polynomial) -> Optional[Polynomial]:
    """Exact quotient f/ell for a nonzero homogeneous linear form ell.

    Returns None when ell does not divide f; the decision is exact.
    """
    if ell.is_zero() or ell.homogeneous_degree() != 1:
        raise ValueError("divisor must be a nonzero linear form")
    return f.exact_div(ell)


class FactoredFraction:
    """A rational function num / prod(factor^mult) with tracked factors.

    Every denominator produced by the integral and residue operators is a
    product of explicit polynomial factors (linear forms, or differences of
    root values), so keeping the denominator factored makes cancellation a
    sequence of exact single-divisor divisions and keeps degrees small.
    Factors are stored in primitive form; scalar content lives in the
    numerator.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Mapping[tuple, tuple[Polynomial, int]] | None = None):
        self.num = num
        self.den: dict[tuple, tuple[Polynomial, int]] = dict(den) if den else {}
        if num.is_zero():
            self.den = {}

    @classmethod
    def from_poly(cls, p: Polynomial) -> "FactoredFraction":
        return cls(p)

    @classmethod
    def zero(cls, nvars: int) -> "FactoredFraction":
        return cls(Polynomial.zero(nvars))

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def copy_den(self) -> dict[tuple, tuple[Polynomial, int]]:
        return dict(self.den)

    def div_poly(self, factor: Polynomial) -> "FactoredFraction":
        """Divide by a polynomial factor (nonzero)."""
        if factor.is_zero():
            raise ZeroDivisionError("division by zero factor")
        if factor.is_constant():
            return FactoredFraction(self.num.scale(1 / factor.constant_value()), self.den)
        content, prim = factor.primitive()
        key = _factor_key(prim)
        den = self.copy_den()
        p, m = den.get(key, (prim, 0))
        den[key] = (p, m + 1)
        return FactoredFraction(self.num.scale(1 / content), den)

    def mul_poly(self, p: Polynomial) -> "FactoredFraction":
        return FactoredFraction(self.num * p, self.den)

    def scale(self, c: Scalar) -> "FactoredFraction":
        return FactoredFraction(self.num.scale(c), self.den)

    def __mul__(self, other: "FactoredFraction") -> "FactoredFraction":
        den = self.copy_den()
        for key, (p, m) in other.den.items():
            q, m0 = den.get(key, (p, 0))
            den[key] = (q, m0 + m)
        return FactoredFraction(self.num * other.num, den)

    def __neg__(self) -> "FactoredFraction":
        return FactoredFraction(-self.num, self.den)

    def __add__(self, other: "FactoredFraction") -> "FactoredFraction":
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        # lcm of the two factored denominators
        keys = set(self.den) | set(other.den)
        lcm: dict[tuple, tuple[Polynomial, int]] = {}
        for key in keys:
            p1, m1 = self.den.get(key, (None, 0))
            p2, m2 = other.den.get(key, (None, 0))
            poly = p1 if p1 is not None else p2
            lcm[key] = (poly, max(m1, m2))
        num1 = self.num
        num2 = other.num
        for key, (poly, m) in lcm.items():
            _, m1 = self.den.get(key, (None, 0))
            _, m2 = other.den.get(key, (None, 0))
            for _ in range(m - m1):
                num1 = num1 * poly
            for _ in range(m - m2):
                num2 = num2 * poly
        return FactoredFraction(num1 + num2, lcm)

    def __sub__(self, other: "FactoredFraction") -> "FactoredFraction":
        return self + (-other)

    def simplified(self) -> "FactoredFraction":
        """Cancel denominator factors that divide the numerator exactly."""
        if self.num.is_zero():
            return FactoredFraction(self.num)
        num = self.num
        den: dict[tuple, tuple[Polynomial, int]] = {}
        for key, (poly, m) in self.den.items():
            while m > 0:
                q = num.exact_div(poly)
                if q is None:
                    break
                num = q
                m -= 1
            if m > 0:
                den[key] = (poly, m)
        return FactoredFraction(num, den)

    def as_polynomial(self) -> Optional[Polynomial]:
        """The polynomial this fraction equals, or None if it is not one."""
        s = self.simplified()
        if s.den:
            return None
        return s.num

    def blocking_factors(self) -> list[Polynomial]:
        """Denominator factors that fail to cancel (after simplification)."""
        s = self.simplified()
        return [p for p, _ in s.den.values()]

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FactoredFraction):
            return NotImplemented
        return (self - other).num.is_zero()

    def __repr__(self) -> str:
        if not self.den:
            return repr(self.num)
        dens = " * ".join(
            f"({p!r})^{m}" if m > 1 else f"({p!r})"
            for p, m in self.den.values()
        )
        return f"({self.num!r}) / ({dens})"


def _factor_key(prim: Polynomial) -> tuple:
    return tuple(sorted(prim.terms.items(), key=lambda kv: monomial_key(kv[0])))
