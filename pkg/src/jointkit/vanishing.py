"""Low-degree polynomials with prescribed vanishing, and the tools that use them.

Vanishing conditions are linear in the coefficients of a degree <= D
polynomial, so the smallest-degree annihilator is a kernel computation.
Identical vanishing of a restriction to a (k-1)-plane is imposed by
evaluation on a (D+1)^(k-1) parameter grid, which needs |F| > D.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from . import linalg
from .affine import (
    AffineSubspace,
    GeometryError,
    as_point,
    canonicalize,
    complete_transverse,
    contains_subspace,
    is_transverse,
    subspace_from_json,
)
from .caps import CapExceeded, get_caps
from .field import Field, PrimeField, field_from_descriptor
from .mpoly import (
    MultiPoly,
    PolyError,
    expansion_weights,
    indices_of_order,
    indices_up_to,
    lowest_order_indices,
    minimal_transverse_derivative,
    multi_binom,
    multiplicity,
    restrict_to_plane,
    transverse_derivative,
)


class VanishingError(ValueError):
    pass


@dataclass(frozen=True)
class PointOrder:
    """All Hasse derivatives of order < m vanish at x."""

    x: tuple
    m: int


@dataclass(frozen=True)
class PlaneTransverse:
    """Every transverse derivative of order <= A vanishes identically on ``pi``.

    ``pi`` is a (k-1)-plane inside the k-plane ``P`` and ``nu`` completes
    P's directions to a basis.
    """

    pi: AffineSubspace
    P: AffineSubspace
    nu: tuple
    A: int

    def __post_init__(self):
        if self.pi.k != self.P.k - 1:
            raise GeometryError("pi must have dimension one less than P")
        if not contains_subspace(self.P, self.pi):
            raise GeometryError("pi is not contained in P")
        if not is_transverse(self.P, self.nu):
            raise GeometryError("nu is not transverse to P")
        if self.A < 0:
            raise ValueError("order budget must be nonnegative")


@dataclass(frozen=True)
class VanishingSpec:
    field: Field
    n: int
    constraints: tuple = ()

    def to_json(self) -> dict:
        F = self.field
        out = []
        for c in self.constraints:
            if isinstance(c, PointOrder):
                out.append({"type": "point", "x": [F.format(v) for v in c.x], "m": c.m})
            else:
                out.append({
                    "type": "plane",
                    "pi": c.pi.to_json(),
                    "P": c.P.to_json(),
                    "nu": [[F.format(v) for v in w] for w in c.nu],
                    "A": c.A,
                })
        return {"field": str(F), "n": self.n, "constraints": out}

    @classmethod
    def from_json(cls, obj: dict) -> "VanishingSpec":
        F = field_from_descriptor(obj.get("field"))
        n = int(obj["n"])
        cons = []
        for c in obj.get("constraints", []):
            if c["type"] == "point":
                cons.append(PointOrder(as_point(F, [F.parse(str(v)) for v in c["x"]]), int(c["m"])))
            elif c["type"] == "plane":
                nu = tuple(tuple(F.parse(str(v)) for v in w) for w in c["nu"])
                cons.append(PlaneTransverse(subspace_from_json(c["pi"], F), subspace_from_json(c["P"], F), nu, int(c["A"])))
            else:
                raise VanishingError(f"unknown constraint type {c['type']!r}")
        return cls(F, n, tuple(cons))


def point_spec(field: Field, points, m: int = 1) -> VanishingSpec:
    pts = [as_point(field, x) for x in points]
    n = len(pts[0]) if pts else 0
    return VanishingSpec(field, n, tuple(PointOrder(x, m) for x in pts))


@dataclass
class ConditionMatrix:
    field: Field
    n: int
    D: int
    columns: list  # exponent tuples, graded-lex ascending
    rows: list = dc_field(default_factory=list)
    labels: list = dc_field(default_factory=list)

    @property
    def shape(self):
        return len(self.rows), len(self.columns)


def monomials_grlex(n: int, D: int) -> list:
    return list(indices_up_to(D, n))


def _derivative_row(F: Field, columns, y, weights: dict) -> list:
    """Row of sum_b w_b D^b x^c evaluated at y, over monomial columns c."""
    n = len(y)
    maxdeg = max((sum(c) for c in columns), default=0)
    pw = [[1] * (maxdeg + 1) for _ in range(n)]
    for i in range(n):
        for e in range(1, maxdeg + 1):
            pw[i][e] = F.reduce(pw[i][e - 1] * y[i])
    row = []
    for c in columns:
        total = 0
        for b, w in weights.items():
            mb = multi_binom(c, b)
            if not mb:
                continue
            t = w * mb
            for i in range(n):
                e = c[i] - b[i]
                if e:
                    t = t * pw[i][e]
            total += t
        row.append(F.reduce(total))
    return row


def grid_points(F: Field, D: int, dim: int):
    """The (D+1)^dim grid on the first D+1 field elements."""
    vals = list(itertools.islice(F.elements(), D + 1))
    return itertools.product(vals, repeat=dim)


def build_conditions(spec: VanishingSpec, D: int) -> ConditionMatrix:
    F, n = spec.field, spec.n
    if D < 0:
        raise ValueError("degree bound must be nonnegative")
    if D > get_caps().max_degree:
        raise CapExceeded(f"degree {D} exceeds max_degree={get_caps().max_degree}")
    if isinstance(F, PrimeField) and F.p <= D:
        raise VanishingError(
            f"F_{F.p} has only {F.p} elements; identical vanishing is tested on a grid of "
            f"{D + 1} values per parameter, which needs |F| > D = {D}"
        )
    cols = monomials_grlex(n, D)
    cm = ConditionMatrix(F, n, D, cols)
    for ci, c in enumerate(spec.constraints):
        if isinstance(c, PointOrder):
            x = as_point(F, c.x)
            for r in range(c.m):
                for a in indices_of_order(r, n):
                    cm.rows.append(_derivative_row(F, cols, x, {a: 1}))
                    cm.labels.append((ci, "point", a))
        else:
            dim = c.pi.k
            for lam in indices_up_to(c.A, len(c.nu)):
                w = expansion_weights(F, c.nu, lam) if any(lam) else {(0,) * n: 1}
                if not w:
                    continue
                for t in grid_points(F, D, dim):
                    y = c.pi.point_at(t)
                    cm.rows.append(_derivative_row(F, cols, y, w))
                    cm.labels.append((ci, "plane", lam, t))
    return cm


def _kernel_poly(cm: ConditionMatrix):
    F = cm.field
    ker = linalg.nullspace(cm.rows, len(cm.columns), F)
    if not ker:
        return None
    v = ker[0]
    lead = next(x for x in v if x != 0)
    inv = F.inv(lead)
    return MultiPoly(F, cm.n, {c: F.reduce(x * inv) for c, x in zip(cm.columns, v) if x != 0})


def min_degree_annihilator(spec: VanishingSpec, D_max: int) -> tuple[int, MultiPoly]:
    """Smallest D <= D_max admitting a nonzero p of degree <= D meeting ``spec``.

    The returned kernel vector has first nonzero coefficient 1 in graded-lex
    order.
    """
    D_max = min(D_max, get_caps().max_degree)
    for D in range(D_max + 1):
        cm = build_conditions(spec, D)
        p = _kernel_poly(cm)
        if p is not None:
            return D, p
    raise VanishingError(f"degree budget exhausted: no annihilator of degree <= {D_max}")


@dataclass
class VanishingReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_vanishing(p: MultiPoly, spec: VanishingSpec) -> VanishingReport:
    """Independent check: multiplicities at points, zero restrictions on planes."""
    if p.is_zero():
        raise PolyError("verify_vanishing expects a nonzero polynomial")
    viol = []
    for ci, c in enumerate(spec.constraints):
        if isinstance(c, PointOrder):
            m = multiplicity(p, c.x)
            if m < c.m:
                viol.append({"constraint": ci, "kind": "point", "multiplicity": m, "required": c.m})
        else:
            for lam in indices_up_to(c.A, len(c.nu)):
                q = restrict_to_plane(transverse_derivative(p, c.nu, lam), c.pi)
                if not q.is_zero():
                    viol.append({"constraint": ci, "kind": "plane", "lambda": lam})
    return VanishingReport(viol)


# --------------------------------------------------------------------------
# lines, roots and exceptional planes


def minimal_line_derivative(p: MultiPoly, l: AffineSubspace) -> tuple[int, MultiPoly]:
    """(order, q): a minimal-order derivative of p not vanishing on l, restricted to l."""
    if p.is_zero():
        raise PolyError("the zero polynomial has no non-vanishing derivative")
    if l.k != 1:
        raise GeometryError("expected a line")
    lam, q = minimal_transverse_derivative(p, l)
    return sum(lam), q


@dataclass
class RootAccounting:
    order: int
    q: MultiPoly
    deg_q: int
    deg_p: int
    marks: list  # (parameter, multiplicity, claimed)
    total: int
    violations: list

    @property
    def slack(self) -> int:
        return self.deg_p - self.total

    @property
    def ok(self) -> bool:
        return not self.violations


def line_root_accounting(p: MultiPoly, l: AffineSubspace, marked: Sequence) -> RootAccounting:
    """Multiplicities of D_l p|_l at marked points against Bezout's bound."""
    order, q = minimal_line_derivative(p, l)
    marks = []
    viol = []
    seen = set()
    for x, claim in marked:
        if not l.contains(x):
            raise GeometryError(f"marked point {x} is not on the line")
        (t,) = l.parameters_of(x)
        if t in seen:
            raise GeometryError(f"point {x} marked twice")
        seen.add(t)
        mu = multiplicity(q, [t])
        marks.append((t, mu, claim))
        if mu < claim:
            viol.append({"kind": "claim", "parameter": t, "multiplicity": mu, "claimed": claim})
    total = sum(m for _, m, _ in marks)
    dq, dp = int(q.degree), int(p.degree)
    if total > dq:
        viol.append({"kind": "bezout", "total": total, "deg_q": dq})
    if dq > dp:
        viol.append({"kind": "degree", "deg_q": dq, "deg_p": dp})
    return RootAccounting(order, q, dq, dp, marks, total, viol)


def exceptional_plane_test(p: MultiPoly, P: AffineSubspace, nu: Sequence | None = None, A: int = 0) -> bool:
    """True iff some transverse derivative of order <= A is nonzero on P."""
    if p.is_zero():
        raise PolyError("exceptional_plane_test needs a nonzero polynomial")
    if nu is None:
        nu = complete_transverse(P)
    lam, _ = minimal_transverse_derivative(p, P, nu)
    return sum(lam) <= A


def exceptional_plane_direct(p: MultiPoly, P: AffineSubspace, nu: Sequence, A: int) -> bool:
    """The same predicate by trying every lambda with |lambda| <= A."""
    for lam in indices_up_to(A, len(nu)):
        if not restrict_to_plane(transverse_derivative(p, nu, lam), P).is_zero():
            return True
    return False


def hyperplane_bound(p: MultiPoly, hyperplanes: Sequence[AffineSubspace]) -> dict:
    """Among distinct hyperplanes, count those on which p vanishes; must be <= deg p."""
    if p.is_zero():
        raise PolyError("bound is only meaningful for nonzero p")
    hs = list(hyperplanes)
    if len(set(hs)) != len(hs):
        raise GeometryError("hyperplanes must be distinct")
    for H in hs:
        if H.k != p.n - 1:
            raise GeometryError("expected hyperplanes")
    vanishing = [i for i, H in enumerate(hs) if restrict_to_plane(p, H).is_zero()]
    d = int(p.degree)
    return {"vanishing": vanishing, "count": len(vanishing), "degree": d, "ok": len(vanishing) <= d}


# --------------------------------------------------------------------------
# multijoint dichotomy


def _hyperplanes_in_plane(F: Field, P: AffineSubspace, x, others, B: int) -> list:
    """B distinct (k-1)-planes in P through x avoiding the points ``others``.

    In P's parameters the hyperplane through t_x with normal w is kept only
    if w . (t_y - t_x) != 0 for every other y; normals run along the moment
    curve (1, s, s^2, ...), so distinct s give distinct hyperplanes.
    """
    k = P.k
    tx = P.parameters_of(x)
    diffs = [[F.reduce(a - b) for a, b in zip(P.parameters_of(y), tx)] for y in others]
    out = []
    for s in F.elements():
        if len(out) == B:
            break
        w = [F.reduce(F.coerce(s) ** i) for i in range(k)]
        if any(F.reduce(sum(wi * di for wi, di in zip(w, d))) == 0 for d in diffs):
            continue
        basis = linalg.nullspace([w], k, F)
        dirs = [[F.reduce(sum(b[j] * P.dirs[j][i] for j in range(k))) for i in range(P.n)] for b in basis]
        out.append(canonicalize(F, x, dirs))
    if len(out) < B:
        raise VanishingError("field too small to choose the requested (k-1)-planes")
    return out


@dataclass
class DichotomyReport:
    D: int
    p: MultiPoly
    A: int
    B: int
    rows: list  # per multijoint
    type1: int
    exceptional: int
    unclassified: int
    line_accounting: list
    plane_accounting: list
    violations: list

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "A": self.A,
            "B": self.B,
            "annihilator": self.p.to_text(),
            "type1": self.type1,
            "exceptional": self.exceptional,
            "unclassified": self.unclassified,
            "violations": self.violations,
        }


def multijoint_spec(planes, families, multijoints, A: int, B: int):
    """Claim-style constraints: B (k-1)-planes per multijoint inside its plane."""
    F = planes[0].field
    n = planes[0].n
    by_plane: dict = {}
    for mj in multijoints:
        by_plane.setdefault(mj.chosen[0], []).append(mj.point)
    cons = []
    pis: dict = {}
    for pi_idx, pts in sorted(by_plane.items()):
        P = planes[pi_idx]
        nu = tuple(tuple(v) for v in complete_transverse(P))
        for x in pts:
            others = [y for y in pts if y != x]
            hs = _hyperplanes_in_plane(F, P, x, others, B)
            pis[x] = hs
            for H in hs:
                cons.append(PlaneTransverse(H, P, nu, A))
    return VanishingSpec(F, n, tuple(cons)), pis


def multijoint_dichotomy(planes, families, multijoints, A: int, B: int = 1, D_max: int = 32) -> DichotomyReport:
    """Classify every multijoint as type 1 or lying on an exceptional plane.

    For each multijoint x with chosen plane P(x) and lines l_i(x), a(x) is a
    minimal-length nonvanishing index in the basis (dirs of P, dirs of the
    l_i).  Type 1 (transverse part of a(x) > A) is confirmed by
    mult(D_l p|_l, t_x) >= a_{k+i}(x) on the line with the largest
    a_{k+i}; type 2 is confirmed by P(x) being exceptional.
    """
    spec, _ = multijoint_spec(planes, families, multijoints, A, B)
    D, p = min_degree_annihilator(spec, D_max)
    F = p.field
    k = planes[0].k
    line_cache: dict = {}
    exc_cache: dict = {}
    rows = []
    per_line: dict = {}
    viol = []
    t1 = exc = unc = 0
    for mj in multijoints:
        P = planes[mj.chosen[0]]
        lines = [fam.by_id(lid) for fam, lid in zip(families, mj.chosen[1:])]
        basis = [list(d) for d in P.dirs] + [list(l.direction) for l in lines]
        m, idx = lowest_order_indices(p, mj.point, basis)
        a = idx[0]
        trans = a[k:]
        row = {"point": [F.format(v) for v in mj.point], "a": list(a), "mult": m}
        if sum(trans) > A:
            i = max(range(len(trans)), key=lambda j: (trans[j], -j))
            key = (i, mj.chosen[1 + i])
            l = lines[i]
            if key not in line_cache:
                line_cache[key] = minimal_line_derivative(p, l)
            _, q = line_cache[key]
            (t,) = l.parameters_of(mj.point)
            mu = multiplicity(q, [t])
            row.update(type=1, family=i, line=mj.chosen[1 + i], line_mult=mu)
            per_line.setdefault(key, []).append(mu)
            if mu >= trans[i]:
                t1 += 1
                row["classified"] = True
            else:
                unc += 1
                row["classified"] = False
                viol.append({"kind": "line-multiplicity", "point": row["point"], "mult": mu, "needed": trans[i]})
        else:
            pi = mj.chosen[0]
            if pi not in exc_cache:
                exc_cache[pi] = exceptional_plane_test(p, P, complete_transverse(P), A)
            row.update(type=2, exceptional=exc_cache[pi])
            if exc_cache[pi]:
                exc += 1
                row["classified"] = True
            else:
                unc += 1
                row["classified"] = False
                viol.append({"kind": "type2-not-exceptional", "point": row["point"]})
        rows.append(row)
    dp = int(p.degree)
    line_acc = []
    for (i, lid), mus in sorted(per_line.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
        _, q = line_cache[(i, lid)]
        ok = sum(mus) <= q.degree <= dp
        line_acc.append({"family": i, "line": lid, "sum_mult": sum(mus), "deg_q": int(q.degree), "ok": ok})
        if not ok:
            viol.append({"kind": "bezout", "family": i, "line": lid})
    plane_acc = []
    counts: dict = {}
    for mj in multijoints:
        counts[mj.chosen[0]] = counts.get(mj.chosen[0], 0) + 1
    for pi, is_exc in sorted(exc_cache.items()):
        if not is_exc:
            continue
        P = planes[pi]
        lam, g = minimal_transverse_derivative(p, P, complete_transverse(P))
        n_pi = counts[pi] * B
        ok = n_pi <= g.degree
        plane_acc.append({"plane": pi, "hyperplanes": n_pi, "deg_g": int(g.degree), "ok": ok})
        if not ok:
            viol.append({"kind": "plane-count", "plane": pi})
    return DichotomyReport(D, p, A, B, rows, t1, exc, unc, line_acc, plane_acc, viol)
