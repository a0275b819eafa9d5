"""Independent reference implementations used only by the tests."""

import itertools
from fractions import Fraction

import sympy

from jointkit import linalg
from jointkit.field import PrimeField


def sym_vars(n):
    return sympy.symbols(f"x1:{n + 1}"), sympy.symbols(f"y1:{n + 1}")


def to_sympy(p, xs):
    expr = sympy.Integer(0)
    for a, c in p.items():
        c = sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sympy.Integer(c)
        term = c
        for xi, e in zip(xs, a):
            term *= xi**e
        expr += term
    return expr


def hasse_by_expansion(p, a):
    """D^a p read off as the coefficient of y^a in p(x + y), via sympy."""
    n = p.n
    xs, ys = sym_vars(n)
    expr = to_sympy(p, xs).subs({x: x + y for x, y in zip(xs, ys)}, simultaneous=True)
    poly = sympy.Poly(sympy.expand(expr), *ys)
    coeff = poly.coeff_monomial(tuple(a)) if poly.degree() >= 0 else 0
    out = {}
    cp = sympy.Poly(sympy.expand(coeff), *xs)
    for mono, c in cp.terms():
        c = Fraction(int(c.p), int(c.q))
        if isinstance(p.field, PrimeField):
            c = c.numerator * pow(c.denominator, -1, p.field.p) % p.field.p
        if c:
            out[mono] = c
    return out


def brute_joints(family):
    """Scan every point of F_p^n; return {point: m} for joints."""
    F = family.field
    n = family.n
    out = {}
    for x in itertools.product(range(F.p), repeat=n):
        through = [l for _, l in family if l.contains(x)]
        if len(through) < n:
            continue
        if linalg.rank([list(l.direction) for l in through], F) == n:
            out[tuple(x)] = len(through)
    return out


def inverse_by_fermat(a, p):
    return pow(a, p - 2, p)


def line_derivative_oracle(p, l, completion):
    """Lowest-order transverse Taylor coefficient of p along l, via sympy.

    Expands p(x0 + t d + s_1 nu_1 + s_2 nu_2 + ...) and returns (order, coeffs in t)
    for the lex-first monomial in s of minimal total degree whose coefficient
    is not identically zero in t.
    """
    n = p.n
    xs, _ = sym_vars(n)
    t = sympy.Symbol("t")
    ss = sympy.symbols(f"s1:{len(completion) + 1}")
    sub = {}
    for i in range(n):
        e = sympy.Rational(l.x0[i]) + t * sympy.Rational(l.direction[i])
        for s, nu in zip(ss, completion):
            e += s * sympy.Rational(nu[i])
        sub[xs[i]] = e
    expr = sympy.expand(to_sympy(p, xs).subs(sub, simultaneous=True))
    poly = sympy.Poly(expr, *ss)
    best = None
    for mono, coeff in poly.terms():
        if sympy.expand(coeff) == 0:
            continue
        key = (sum(mono), mono)
        if best is None or key < best[0]:
            best = (key, coeff)
    (order, _), coeff = best
    return order, sympy.Poly(coeff, t)


def root_multiplicity(upoly, t0):
    """Order of vanishing of a sympy univariate Poly at t0 by repeated division."""
    t = upoly.gen
    lin = sympy.Poly(t - sympy.Rational(t0), t)
    m = 0
    q = upoly
    while not q.is_zero:
        quo, rem = sympy.div(q, lin)
        if not rem.is_zero:
            break
        q = quo
        m += 1
    return m
