"""Covector-adapted coordinates and the residue calculus.

For a fixed covector xi, the ambient polynomial ring splits as S_xi[x]: a
distinguished degree-one element x with <xi, x> = 1 together with a basis of
the annihilator hyperplane W_xi.  Every vector a with m = <xi, a> nonzero is
then m*(x - beta) for a linear form beta in the y-variables; the residue at
infinity of f / prod(x - beta_i) with distinct beta_i is evaluated through
the exact distinct-root formula and is always a polynomial in S_xi.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence, Union

from .polynomial import (
    FactoredFraction,
    Polynomial,
    Scalar,
    Vector,
    _as_fraction,
)


class XiBasis:
    """Basis x, y_1..y_{n-1} adapted to a covector xi.

    x is e_j / xi_j for the first nonzero coordinate j of xi (so <xi,x> = 1);
    the y-basis is the reduced row-echelon kernel basis of xi ordered by free
    column, which makes every coordinate change deterministic.
    """

    def __init__(self, xi: Vector):
        n = xi.dim
        if xi.is_zero():
            raise ValueError("xi must be nonzero")
        self.xi = xi
        self.n = n
        pivot = next(i for i in range(n) if xi[i] != 0)
        self.pivot = pivot
        x_vec = [Fraction(0)] * n
        x_vec[pivot] = 1 / xi[pivot]
        self.x_vector = Vector(x_vec)
        ys = []
        for i in range(n):
            if i == pivot:
                continue
            y = [Fraction(0)] * n
            y[i] = Fraction(1)
            y[pivot] = -xi[i] / xi[pivot]
            ys.append(Vector(y))
        self.y_vectors = ys
        # columns of B are the new basis vectors in standard coordinates
        cols = [self.x_vector] + ys
        self.matrix = [[cols[j][i] for j in range(n)] for i in range(n)]
        self.inverse = _invert(self.matrix)

    # -- coordinate changes --------------------------------------------------

    def to_xi_coords(self, f: Polynomial) -> Polynomial:
        """Rewrite f in the adapted variables (x, y_1..y_{n-1})."""
        if f.nvars != self.n:
            raise ValueError("dimension mismatch")
        # standard variable e_i = sum_k inverse[k][i] * (new variable k)
        replacements = [
            Polynomial(self.n, {
                _unit(self.n, k): self.inverse[k][i]
                for k in range(self.n)
                if self.inverse[k][i] != 0
            })
            for i in range(self.n)
        ]
        return f.substitute_all(replacements)

    def from_xi_coords(self, f: Polynomial) -> Polynomial:
        """Inverse of to_xi_coords."""
        if f.nvars != self.n:
            raise ValueError("dimension mismatch")
        replacements = [
            Polynomial(self.n, {
                _unit(self.n, i): self.matrix[i][k]
                for i in range(self.n)
                if self.matrix[i][k] != 0
            })
            for k in range(self.n)
        ]
        return f.substitute_all(replacements)

    def pairing(self, v: Vector) -> Fraction:
        return self.xi.dot(v)

    def edge_form(self, alpha: Vector) -> "EdgeForm":
        """Write alpha = m*(x - beta); requires <xi, alpha> nonzero."""
        m = self.pairing(alpha)
        if m == 0:
            raise NonPolarizedError("vector annihilated by xi")
        in_xi = self.to_xi_coords(Polynomial.from_vector(alpha))
        beta_terms = {}
        for e, c in in_xi.terms.items():
            if e[0] == 0:
                beta_terms[e] = -c / m
            elif e[0] == 1 and sum(e) == 1:
                if c != m:
                    raise AssertionError("inconsistent x-coefficient")
            else:
                raise AssertionError("edge form is not linear")
        return EdgeForm(m, Polynomial(self.n, beta_terms))


class EdgeForm:
    """The pair (m, beta) with alpha = m*(x - beta) in adapted coordinates."""

    __slots__ = ("m", "beta")

    def __init__(self, m: Fraction, beta: Polynomial):
        self.m = m
        self.beta = beta

    def __repr__(self) -> str:
        return f"EdgeForm(m={self.m}, beta={self.beta!r})"


class NonPolarizedError(ValueError):
    """A vector pairs to zero with the chosen covector."""


def rho_project(f: Polynomial, edge: EdgeForm, basis: XiBasis, in_xi_coords: bool = False) -> Polynomial:
    """Projection along the edge direction: substitute x -> beta.

    Input may be given in standard coordinates (default) or already in the
    adapted frame; output is always in the adapted frame with x-degree zero.
    """
    g = f if in_xi_coords else basis.to_xi_coords(f)
    return g.substitute(0, edge.beta)


def residue_at_infinity(f: Polynomial, roots: Sequence[Polynomial]) -> Polynomial:
    """Coefficient of x^{-1} in the Laurent expansion of f/prod(x - z_k).

    Computed by the exact distinct-root formula sum_k f(z_k)/prod_{j!=k}
    (z_k - z_j); f lives in the adapted frame (variable 0 is x) and the roots
    are x-free.  The result is always a polynomial in the y-variables.
    """
    if not roots:
        raise ValueError("need at least one root")
    nvars = f.nvars
    for z in roots:
        if z.max_exponent(0) != 0:
            raise ValueError("roots must not involve x")
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if roots[i] == roots[j]:
                raise RepeatedRootError("roots must be pairwise distinct")
    total = FactoredFraction.zero(nvars)
    for k, zk in enumerate(roots):
        term = FactoredFraction.from_poly(f.substitute(0, zk))
        for j, zj in enumerate(roots):
            if j != k:
                term = term.div_poly(zk - zj)
        total = total + term
    out = total.as_polynomial()
    if out is None:
        raise AssertionError("residue sum failed to be polynomial")
    return out


class RepeatedRootError(ValueError):
    """The distinct-root residue formula was asked to use repeated roots."""


def res_xi(f: Polynomial, alphas: Sequence[Vector], basis: XiBasis) -> Polynomial:
    """Directional residue of f / prod(alpha_i): the x^{-1} coefficient in the
    adapted frame divided by prod <xi, alpha_i>.

    The alpha_i must pair nonzero with xi and have pairwise distinct beta
    forms (guaranteed by pairwise linear independence).
    """
    forms = []
    for a in alphas:
        forms.append(basis.edge_form(a))  # raises NonPolarizedError on m = 0
    betas = [ef.beta for ef in forms]
    for i in range(len(betas)):
        for j in range(i + 1, len(betas)):
            if betas[i] == betas[j]:
                raise RepeatedRootError("beta forms must be distinct")
    f_xi = basis.to_xi_coords(f)
    res = residue_at_infinity(f_xi, betas)
    scale = Fraction(1)
    for ef in forms:
        scale *= ef.m
    return res.scale(1 / scale)


def res_xi_adapted(f_xi: Polynomial, forms: Sequence[EdgeForm]) -> Polynomial:
    """res_xi for input already written in the adapted frame."""
    betas = [ef.beta for ef in forms]
    res = residue_at_infinity(f_xi, betas)
    scale = Fraction(1)
    for ef in forms:
        scale *= ef.m
    return res.scale(1 / scale)


def elementary_symmetric(k: int, values: Sequence[Union[Polynomial, Scalar]]) -> Union[Polynomial, Fraction]:
    """The k-th elementary symmetric function of the given values."""
    m = len(values)
    if k < 0 or k > m:
        raise ValueError("index out of range")
    vals = _uniform(values)
    if vals and isinstance(vals[0], Polynomial):
        zero: Union[Polynomial, Fraction] = Polynomial.zero(vals[0].nvars)
        one: Union[Polynomial, Fraction] = Polynomial.const(vals[0].nvars, 1)
    else:
        zero, one = Fraction(0), Fraction(1)
    coeffs: list = [one] + [zero] * m
    for v in vals:
        for j in range(m, 0, -1):
            coeffs[j] = coeffs[j] + coeffs[j - 1] * v
    return coeffs[k]


def _uniform(values: Sequence[Union[Polynomial, Scalar]]) -> list:
    polys = [v for v in values if isinstance(v, Polynomial)]
    if not polys:
        return [_as_fraction(v) for v in values]
    nvars = polys[0].nvars
    out = []
    for v in values:
        if isinstance(v, Polynomial):
            out.append(v)
        else:
            out.append(Polynomial.const(nvars, v))
    return out


def power_reduce(values: Sequence[Union[Polynomial, Scalar]]) -> list:
    """Coefficients c_0..c_{m-1} with v^m = sum_j c_j v^j for each v among
    the given values: c_j = (-1)^(m-j-1) * s_{m, m-j}.

    The reduction is uniform in which value is raised, so no index argument
    is taken.
    """
    m = len(values)
    out = []
    for j in range(m):
        s = elementary_symmetric(m - j, values)
        sign = (-1) ** (m - j - 1)
        out.append(s * sign if isinstance(s, Polynomial) else Fraction(sign) * s)
    return out


def _unit(n: int, i: int) -> tuple[int, ...]:
    e = [0] * n
    e[i] = 1
    return tuple(e)


def _invert(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact inverse by Gauss-Jordan; raises on singular input."""
    n = len(matrix)
    aug = [[Fraction(matrix[i][j]) for j in range(n)] + [Fraction(1) if k == i else Fraction(0) for k in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular basis matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]
