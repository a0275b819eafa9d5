"""Sparse multivariate polynomials and the affine-invariant Hasse calculus.

A :class:`MultiPoly` maps exponent tuples to nonzero raw field values.  On
top of ring arithmetic this module provides Hasse derivatives, affine
substitution, directional derivatives in an arbitrary basis, restrictions
to affine planes, transverse derivatives, multiplicities, and the minimal
non-vanishing transverse derivative of a polynomial along a plane.

Bases and plane frames are given as lists of *direction vectors* (the
columns omega_1, ..., omega_k).  Anything with ``x0`` and ``dirs``
attributes (e.g. :class:`jointkit.affine.AffineSubspace`) is accepted
wherever a plane is expected; a plain ``(x0, dirs)`` pair works too.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from math import comb
from types import MappingProxyType
from typing import Iterable, Sequence

from . import linalg
from .field import Field, FieldValue

INFINITY = math.inf
#: degree of the zero polynomial, ordered below every natural number
ZERO_DEGREE = -math.inf


class PolyError(ValueError):
    pass


def _raw(field: Field, v):
    return field.coerce(v)


def grlex_key(a: tuple) -> tuple:
    return (sum(a), a)


class MultiPoly:
    """Immutable sparse polynomial in ``n`` variables over ``field``."""

    __slots__ = ("field", "n", "_terms", "_hash")

    def __init__(self, field: Field, n: int, terms=None, *, _trusted: bool = False):
        self.field = field
        self.n = int(n)
        self._hash = None
        if _trusted:
            self._terms = terms
            return
        clean = {}
        if terms:
            red = field.reduce
            for a, c in dict(terms).items():
                a = tuple(int(e) for e in a)
                if len(a) != self.n:
                    raise PolyError(f"exponent {a} has wrong length for n={self.n}")
                if any(e < 0 for e in a):
                    raise PolyError(f"negative exponent in {a}")
                c = red(_raw(field, c))
                if c != 0:
                    c = red(clean.get(a, 0) + c)
                    if c != 0:
                        clean[a] = c
                    else:
                        clean.pop(a, None)
        self._terms = clean

    # constructors
    @classmethod
    def zero(cls, field: Field, n: int) -> "MultiPoly":
        return cls(field, n, {}, _trusted=True)

    @classmethod
    def constant(cls, field: Field, n: int, c=1) -> "MultiPoly":
        return cls(field, n, {(0,) * n: c})

    @classmethod
    def variable(cls, field: Field, n: int, i: int) -> "MultiPoly":
        a = [0] * n
        a[i] = 1
        return cls(field, n, {tuple(a): 1})

    @classmethod
    def monomial(cls, field: Field, a: Sequence[int], c=1) -> "MultiPoly":
        return cls(field, len(a), {tuple(a): c})

    @classmethod
    def gens(cls, field: Field, n: int) -> list["MultiPoly"]:
        return [cls.variable(field, n, i) for i in range(n)]

    @classmethod
    def linear_form(cls, field: Field, coeffs: Sequence, const=0) -> "MultiPoly":
        """const + sum_i coeffs[i] * x_i."""
        n = len(coeffs)
        terms = {(0,) * n: const}
        for i, c in enumerate(coeffs):
            a = [0] * n
            a[i] = 1
            terms[tuple(a)] = c
        return cls(field, n, terms)

    # basic queries
    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, a: Sequence[int]):
        return self._terms.get(tuple(a), self.field.zero)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    @property
    def degree(self):
        if not self._terms:
            return ZERO_DEGREE
        return max(sum(a) for a in self._terms)

    @property
    def order(self):
        """Lowest total degree in the support (INFINITY for zero)."""
        if not self._terms:
            return INFINITY
        return min(sum(a) for a in self._terms)

    def degree_in(self, i: int) -> int:
        return max((a[i] for a in self._terms), default=0)

    def homogeneous_part(self, d: int) -> "MultiPoly":
        return MultiPoly(self.field, self.n, {a: c for a, c in self._terms.items() if sum(a) == d}, _trusted=True)

    def sorted_terms(self) -> list:
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_coefficient(self):
        if not self._terms:
            return self.field.zero
        return self.sorted_terms()[0][1]

    def is_constant(self) -> bool:
        return all(sum(a) == 0 for a in self._terms)

    # ring structure
    def _check(self, other: "MultiPoly"):
        if not isinstance(other, MultiPoly):
            raise TypeError(f"expected MultiPoly, got {type(other).__name__}")
        if other.n != self.n:
            raise PolyError(f"variable count mismatch: {self.n} vs {other.n}")
        if other.field != self.field:
            raise PolyError(f"field mismatch: {self.field} vs {other.field}")

    def _coerce_operand(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, FieldValue)):
            return MultiPoly.constant(self.field, self.n, _raw(self.field, other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce_operand(other)
        if other is NotImplemented:
            return other
        return MultiPoly(self.field, self.n, _add_terms(self.field, self._terms, other._terms, 1), _trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce_operand(other)
        if other is NotImplemented:
            return other
        return MultiPoly(self.field, self.n, _add_terms(self.field, self._terms, other._terms, -1), _trusted=True)

    def __rsub__(self, other):
        other = self._coerce_operand(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        red = self.field.reduce
        return MultiPoly(self.field, self.n, {a: red(-c) for a, c in self._terms.items()}, _trusted=True)

    def scale(self, c) -> "MultiPoly":
        c = _raw(self.field, c)
        if c == 0:
            return MultiPoly.zero(self.field, self.n)
        red = self.field.reduce
        return MultiPoly(self.field, self.n, {a: red(v * c) for a, v in self._terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, FieldValue)):
            return self.scale(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check(other)
        return MultiPoly(self.field, self.n, _mul_terms(self.field, self._terms, other._terms), _trusted=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, FieldValue)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, FieldValue)):
            c = _raw(self.field, other)
            return self.scale(self.field.inv(c))
        return NotImplemented

    def __pow__(self, e: int) -> "MultiPoly":
        if e < 0:
            raise PolyError("negative power")
        result = MultiPoly.constant(self.field, self.n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.n == other.n and self.field == other.field and self._terms == other._terms
        if isinstance(other, (int, Fraction, FieldValue)):
            return self == MultiPoly.constant(self.field, self.n, _raw(self.field, other))
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.n, frozenset(self._terms.items())))
        return self._hash

    # evaluation
    def evaluate(self, x: Sequence):
        """Raw value of the evaluation map at ``x``."""
        if len(x) != self.n:
            raise PolyError(f"point has dimension {len(x)}, polynomial has n={self.n}")
        F = self.field
        x = [_raw(F, v) for v in x]
        total = 0
        for a, c in self._terms.items():
            t = c
            for xi, e in zip(x, a):
                if e:
                    t = t * xi**e
            total += t
        return F.reduce(total)

    def __call__(self, *x) -> FieldValue:
        if len(x) == 1 and isinstance(x[0], (list, tuple)):
            x = x[0]
        return FieldValue(self.field, self.evaluate(x))

    # text form
    def to_text(self) -> str:
        return poly_to_text(self)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"MultiPoly({self.field}, n={self.n}, '{self.to_text()}')"


# --------------------------------------------------------------------------
# term-level helpers (raw dicts)


def _add_terms(F: Field, t1: dict, t2: dict, sign: int) -> dict:
    out = dict(t1)
    red = F.reduce
    for a, c in t2.items():
        v = red(out.get(a, 0) + sign * c)
        if v != 0:
            out[a] = v
        else:
            out.pop(a, None)
    return out


def _mul_terms(F: Field, t1: dict, t2: dict) -> dict:
    if not t1 or not t2:
        return {}
    if len(t1) < len(t2):
        t1, t2 = t2, t1
    acc: dict = {}
    items2 = list(t2.items())
    for a, c in t1.items():
        for b, d in items2:
            k = tuple(x + y for x, y in zip(a, b))
            acc[k] = acc.get(k, 0) + c * d
    red = F.reduce
    out = {}
    for k, v in acc.items():
        v = red(v)
        if v != 0:
            out[k] = v
    return out


def _one_terms(F: Field, m: int) -> dict:
    return {(0,) * m: F.one}


# --------------------------------------------------------------------------
# serialization

_TOKEN_RE = re.compile(r"\s*(?:(?P<var>x(?P<idx>\d+)(?:\^(?P<exp>\d+))?)|(?P<num>\d+(?:/\d+)?)|(?P<op>[-+*]))")


def poly_to_text(p: MultiPoly) -> str:
    """``coeff * x1^a1 ... xn^an`` terms joined by `` + ``, descending grlex."""
    if p.is_zero():
        return "0"
    parts = []
    for a, c in p.sorted_terms():
        mono = " ".join(f"x{i + 1}^{e}" for i, e in enumerate(a) if e)
        cs = p.field.format(c)
        parts.append(f"{cs} * {mono}" if mono else cs)
    return " + ".join(parts)


def poly_from_text(text: str, field: Field, n: int) -> MultiPoly:
    """Parse sums of products of integer/rational constants and ``x<i>^<e>``.

    Factors may be joined by ``*`` or whitespace; terms by ``+`` or ``-``.
    """
    text = text.strip()
    if not text:
        raise PolyError("empty polynomial text")
    terms: dict = {}
    sign, coeff, a, seen = 1, 1, [0] * n, False

    def flush():
        if not seen:
            raise PolyError(f"dangling operator in {text!r}")
        key = tuple(a)
        terms[key] = field.reduce(terms.get(key, 0) + field.reduce(sign * coeff))

    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise PolyError(f"cannot parse {text!r} at position {pos}")
        pos = m.end()
        if m.group("var"):
            i = int(m.group("idx")) - 1
            if not 0 <= i < n:
                raise PolyError(f"variable x{i + 1} out of range for n={n}")
            a[i] += int(m.group("exp") or 1)
            seen = True
        elif m.group("num"):
            coeff = coeff * field.parse(m.group("num"))
            seen = True
        elif m.group("op") in "+-":
            if seen:
                flush()
                sign, coeff, a, seen = 1, 1, [0] * n, False
            if m.group("op") == "-":
                sign = -sign
    flush()
    return MultiPoly(field, n, terms)


# --------------------------------------------------------------------------
# multi-index helpers


def multi_binom(c: Sequence[int], a: Sequence[int]) -> int:
    out = 1
    for ci, ai in zip(c, a):
        if ai > ci:
            return 0
        out *= comb(ci, ai)
    return out


def multinomial(parts: Sequence[int]) -> int:
    out = 1
    total = 0
    for k in parts:
        total += k
        out *= comb(total, k)
    return out


def compositions(total: int, parts: int):
    """Weak compositions of ``total`` into ``parts`` nonnegative integers, lex order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def indices_of_order(order: int, m: int):
    """All a in N^m with |a| == order, in lexicographically ascending order."""
    return sorted(compositions(order, m))


def indices_up_to(order: int, m: int):
    for r in range(order + 1):
        yield from indices_of_order(r, m)


def _as_frame(plane):
    if hasattr(plane, "x0") and hasattr(plane, "dirs"):
        return list(plane.x0), [list(d) for d in plane.dirs]
    x0, dirs = plane
    return list(x0), [list(d) for d in dirs]


# --------------------------------------------------------------------------
# Hasse calculus


def hasse_derivative(p: MultiPoly, a: Sequence[int]) -> MultiPoly:
    """D^a p: the coefficient of y^a in p(x + y)."""
    a = tuple(a)
    if len(a) != p.n:
        raise PolyError(f"index {a} has wrong length for n={p.n}")
    if any(e < 0 for e in a):
        raise PolyError("negative derivative index")
    if not any(a):
        return p
    F = p.field
    red = F.reduce
    out = {}
    for c, coef in p.items():
        b = multi_binom(c, a)
        if b == 0:
            continue
        v = red(coef * b)
        if v != 0:
            out[tuple(ci - ai for ci, ai in zip(c, a))] = v
    return MultiPoly(F, p.n, out, _trusted=True)


def hasse_value(p: MultiPoly, a: Sequence[int], x: Sequence):
    """D^a p(x) without materialising the derivative."""
    F = p.field
    total = 0
    for c, coef in p.items():
        b = multi_binom(c, a)
        if b == 0:
            continue
        t = coef * b
        for xi, ci, ai in zip(x, c, a):
            e = ci - ai
            if e:
                t = t * xi**e
        total += t
    return F.reduce(total)


def compose_affine(p: MultiPoly, M: Sequence[Sequence], b: Sequence | None = None) -> MultiPoly:
    """q(t) = p(M t + b) where M has p.n rows and m columns."""
    F = p.field
    if len(M) != p.n:
        raise PolyError(f"matrix has {len(M)} rows, polynomial has n={p.n}")
    m = len(M[0]) if M else 0
    if any(len(row) != m for row in M):
        raise PolyError("ragged matrix")
    if b is None:
        b = [0] * p.n
    if len(b) != p.n:
        raise PolyError("offset has wrong dimension")
    M = [[_raw(F, v) for v in row] for row in M]
    b = [_raw(F, v) for v in b]
    # forms[i] = sum_j M[i][j] t_j + b_i
    forms = []
    for i in range(p.n):
        terms = {}
        if b[i] != 0:
            terms[(0,) * m] = b[i]
        for j in range(m):
            if M[i][j] != 0:
                e = [0] * m
                e[j] = 1
                terms[tuple(e)] = M[i][j]
        forms.append(terms)
    powers = [[_one_terms(F, m)] for _ in range(p.n)]

    def power(i, e):
        pw = powers[i]
        while len(pw) <= e:
            pw.append(_mul_terms(F, pw[-1], forms[i]))
        return pw[e]

    prefix: dict = {(): _one_terms(F, m)}

    def prod(a):
        if a in prefix:
            return prefix[a]
        head = prod(a[:-1])
        e = a[-1]
        val = head if e == 0 else _mul_terms(F, head, power(len(a) - 1, e))
        prefix[a] = val
        return val

    acc: dict = {}
    for a, coef in p.items():
        for k, v in prod(a).items():
            acc[k] = acc.get(k, 0) + coef * v
    red = F.reduce
    out = {}
    for k, v in acc.items():
        v = red(v)
        if v != 0:
            out[k] = v
    return MultiPoly(F, m, out, _trusted=True)


def taylor_shift(p: MultiPoly, x0: Sequence) -> MultiPoly:
    """p(x0 + t); the coefficient of t^a is D^a p(x0)."""
    F = p.field
    if len(x0) != p.n:
        raise PolyError("shift point has wrong dimension")
    x0 = [_raw(F, v) for v in x0]
    acc: dict = {}
    for c, coef in p.items():
        # expand prod_i (x0_i + t_i)^{c_i}
        factors = []
        for ci, xi in zip(c, x0):
            if xi == 0:
                factors.append([(ci, 1)])
            else:
                factors.append([(j, comb(ci, j) * xi ** (ci - j)) for j in range(ci + 1)])
        for combo in itertools.product(*factors):
            k = tuple(j for j, _ in combo)
            v = coef
            for _, w in combo:
                v = v * w
            acc[k] = acc.get(k, 0) + v
    red = F.reduce
    out = {}
    for k, v in acc.items():
        v = red(v)
        if v != 0:
            out[k] = v
    return MultiPoly(F, p.n, out, _trusted=True)


def identity_matrix(F: Field, n: int):
    return [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]


def _basis_matrix(F: Field, basis: Sequence[Sequence], n: int):
    if len(basis) != n or any(len(w) != n for w in basis):
        raise PolyError(f"basis must consist of {n} vectors of length {n}")
    L = linalg.columns_to_matrix([[_raw(F, v) for v in w] for w in basis], n)
    if linalg.rank(L, F) != n:
        raise PolyError("basis vectors are linearly dependent")
    return L


def _directional_by_definition(p: MultiPoly, L, a) -> MultiPoly:
    F = p.field
    q = compose_affine(p, L)
    dq = hasse_derivative(q, a)
    return compose_affine(dq, linalg.inverse(L, F))


def expansion_weights(F: Field, vectors: Sequence[Sequence], a: Sequence[int]) -> dict:
    """Weights w with (v_1.grad)^{a_1}...(v_m.grad)^{a_m} = sum_b w[b] D^b.

    Sums over decompositions b = alpha_1 + ... + alpha_m with |alpha_l| = a_l
    of the multinomial factor prod_j b_j! / prod_l alpha_{l,j}! times
    v_1^{alpha_1} ... v_m^{alpha_m}.
    """
    n = len(vectors[0]) if vectors else 0
    vecs = [[_raw(F, v) for v in w] for w in vectors]
    per_vec = []
    for l, al in enumerate(a):
        opts = []
        for alpha in compositions(al, n):
            w = 1
            for vj, e in zip(vecs[l], alpha):
                if e:
                    w = w * vj**e
            if F.reduce(w) != 0:
                opts.append((alpha, w))
        per_vec.append(opts)
    weights: dict = {}
    for combo in itertools.product(*per_vec):
        b = [0] * n
        w = 1
        for alpha, wl in combo:
            w = w * wl
            for j, e in enumerate(alpha):
                b[j] += e
        mult = 1
        for j in range(n):
            mult *= multinomial([alpha[j] for alpha, _ in combo])
        key = tuple(b)
        weights[key] = weights.get(key, 0) + mult * w
    red = F.reduce
    return {k: red(v) for k, v in weights.items() if red(v) != 0}


def _directional_by_expansion(p: MultiPoly, basis, a) -> MultiPoly:
    F = p.field
    out = MultiPoly.zero(F, p.n)
    for b, w in sorted(expansion_weights(F, basis, a).items()):
        if sum(b) > p.degree:
            continue
        out = out + hasse_derivative(p, b).scale(w)
    return out


def directional_hasse(p: MultiPoly, basis: Sequence[Sequence], a: Sequence[int], route: str = "definition") -> MultiPoly:
    """(omega_1.grad)^{a_1} ... (omega_n.grad)^{a_n} p.

    ``route="definition"`` computes D^a(p o L)(L^{-1} x) with L e_i = omega_i;
    ``route="expansion"`` sums standard Hasse derivatives weighted by
    products of basis coordinates; ``route="both"`` computes both and raises
    ``AssertionError`` if they differ.
    """
    F = p.field
    a = tuple(a)
    if len(a) != p.n:
        raise PolyError("index has wrong length")
    L = _basis_matrix(F, basis, p.n)
    if sum(a) > p.degree:
        return MultiPoly.zero(F, p.n)
    if route == "definition":
        return _directional_by_definition(p, L, a)
    if route == "expansion":
        return _directional_by_expansion(p, basis, a)
    if route == "both":
        r1 = _directional_by_definition(p, L, a)
        r2 = _directional_by_expansion(p, basis, a)
        assert r1 == r2, f"directional derivative routes disagree: {r1} vs {r2}"
        return r1
    raise ValueError(f"unknown route {route!r}")


def transverse_derivative(p: MultiPoly, nu: Sequence[Sequence], lam: Sequence[int], completion: Sequence[Sequence] | None = None) -> MultiPoly:
    """(nu_1.grad)^{lam_1} ... p as a polynomial in x.

    Without ``completion`` the expansion over the transverse vectors alone is
    used.  With a completion (vectors that together with ``nu`` form a basis),
    the defining route D^a(p o L)(L^{-1} x), a = (0, ..., 0, lam), is used.
    The two agree for every admissible completion.
    """
    F = p.field
    lam = tuple(lam)
    if len(lam) != len(nu):
        raise PolyError("order vector and transverse vectors differ in length")
    if not any(lam):
        return p
    if completion is None:
        out = MultiPoly.zero(F, p.n)
        for b, w in sorted(expansion_weights(F, nu, lam).items()):
            if sum(b) > p.degree:
                continue
            out = out + hasse_derivative(p, b).scale(w)
        return out
    basis = [list(v) for v in completion] + [list(v) for v in nu]
    a = (0,) * len(completion) + lam
    L = _basis_matrix(F, basis, p.n)
    return _directional_by_definition(p, L, a)


def restrict_to_plane(p: MultiPoly, plane) -> MultiPoly:
    """p(x0 + t_1 omega_1 + ... + t_k omega_k) in F[t_1, ..., t_k]."""
    F = p.field
    x0, dirs = _as_frame(plane)
    if len(x0) != p.n or any(len(d) != p.n for d in dirs):
        raise PolyError("plane lives in a different ambient dimension")
    Om = linalg.columns_to_matrix([[_raw(F, v) for v in d] for d in dirs], p.n)
    if linalg.rank(Om, F) != len(dirs):
        raise PolyError("plane directions are linearly dependent")
    return compose_affine(p, Om, x0)


def _check_transverse(F: Field, dirs, nu, n):
    if len(dirs) + len(nu) != n:
        raise PolyError(f"need {n - len(dirs)} transverse vectors, got {len(nu)}")
    M = linalg.columns_to_matrix([[_raw(F, v) for v in w] for w in list(dirs) + list(nu)], n)
    if linalg.rank(M, F) != n:
        raise PolyError("vectors are not transverse to the plane")


def restricted_transverse_derivative(p: MultiPoly, plane, nu: Sequence[Sequence], lam: Sequence[int]) -> MultiPoly:
    """((nu.grad)^lam p) restricted to the plane, in the plane's parameters."""
    F = p.field
    x0, dirs = _as_frame(plane)
    _check_transverse(F, dirs, nu, p.n)
    return restrict_to_plane(transverse_derivative(p, nu, lam), (x0, dirs))


def multiplicity(p: MultiPoly, x0: Sequence):
    """mult(p, x0): lowest total degree of p(x0 + t); INFINITY for p = 0."""
    if p.is_zero():
        return INFINITY
    return taylor_shift(p, x0).order


def lowest_order_indices(p: MultiPoly, x: Sequence, basis: Sequence[Sequence] | None = None):
    """``(m, indices)``: m = mult(p, x) and every a with |a| = m whose
    directional derivative in ``basis`` is nonzero at x (lex ascending).

    Works order by order from standard Hasse values at x, then changes basis
    on the lowest homogeneous part only.
    """
    F = p.field
    if p.is_zero():
        return INFINITY, []
    x = [_raw(F, v) for v in x]
    n = p.n
    for r in range(int(p.degree) + 1):
        part = {}
        for b in indices_of_order(r, n):
            v = hasse_value(p, b, x)
            if v != 0:
                part[b] = v
        if part:
            break
    H = MultiPoly(F, n, part, _trusted=True)
    if basis is not None:
        L = _basis_matrix(F, basis, n)
        H = compose_affine(H, L)
    return r, sorted(H.terms)


def minimal_transverse_derivative(p: MultiPoly, plane, nu: Sequence[Sequence] | None = None):
    """Lowest-order lam (lex within an order) whose restricted transverse
    derivative is nonzero.  Returns ``(lam, q)``.

    When ``nu`` is omitted the standard-basis completion of the plane is used.
    """
    if p.is_zero():
        raise PolyError("the zero polynomial has no non-vanishing derivative")
    F = p.field
    x0, dirs = _as_frame(plane)
    if nu is None:
        nu = greedy_completion(F, dirs, p.n)
    _check_transverse(F, dirs, nu, p.n)
    m = len(nu)
    for order in range(int(p.degree) + 1):
        for lam in indices_of_order(order, m):
            q = restrict_to_plane(transverse_derivative(p, nu, lam), (x0, dirs))
            if not q.is_zero():
                return lam, q
    raise AssertionError("no non-vanishing transverse derivative found up to deg p")


def greedy_completion(F: Field, dirs: Sequence[Sequence], n: int) -> list[list]:
    """Standard basis vectors e_1, e_2, ... added greedily until full rank."""
    current = [[_raw(F, v) for v in d] for d in dirs]
    out = []
    r = linalg.rank(current, F) if current else 0
    for i in range(n):
        if r == n:
            break
        e = [F.one if j == i else F.zero for j in range(n)]
        trial = current + [e]
        r2 = linalg.rank(trial, F)
        if r2 > r:
            current = trial
            out.append(e)
            r = r2
    return out


def univariate_roots_multiplicity(q: MultiPoly, t) -> float | int:
    """Multiplicity of a one-variable polynomial at parameter t."""
    if q.n != 1:
        raise PolyError("expected a univariate polynomial")
    return multiplicity(q, [t])


def random_poly(field: Field, n: int, degree: int, nterms: int, rng, coeff_range: int = 9) -> MultiPoly:
    """A random polynomial with at most ``nterms`` monomials of degree <= ``degree``."""
    monos = [a for a in indices_up_to(degree, n)]
    terms = {}
    for _ in range(nterms):
        a = monos[rng.randrange(len(monos))]
        c = rng.randint(-coeff_range, coeff_range)
        if c:
            terms[a] = c
    return MultiPoly(field, n, terms)


def vanishes_on_grid(p: MultiPoly, grid_values: Iterable) -> bool:
    vals = list(grid_values)
    return all(p.evaluate(pt) == 0 for pt in itertools.product(vals, repeat=p.n))
