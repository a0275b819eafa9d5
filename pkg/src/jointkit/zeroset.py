"""Zero sets of factored polynomials, and planar-structure certificates for joints."""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import linalg
from .affine import (
    AffineSubspace,
    GeometryError,
    as_point,
    canonicalize,
    contains_subspace,
    point_key,
    span_plane,
    vectors_rank,
)
from .field import Field
from .incidence import JointRecord, LineFamily, dyadic_level
from .mpoly import MultiPoly, PolyError, hasse_derivative, restrict_to_plane


# --------------------------------------------------------------------------
# factored varieties


def normalize_factor(f: MultiPoly) -> MultiPoly:
    """Rescale so the graded-lex leading coefficient is 1."""
    if f.is_zero():
        raise PolyError("zero factor")
    if f.degree < 1:
        raise PolyError("scalar factors are not allowed")
    return f / f.leading_coefficient()


class FactoredVariety:
    """Z(p) for p given as a product of factors with multiplicities.

    Factors are normalized (leading coefficient 1) and factors that are
    scalar multiples of each other are merged.  No factorization is
    attempted: the caller supplies the factors.
    """

    def __init__(self, factors: Sequence):
        merged: dict = {}
        order = []
        n = field = None
        for item in factors:
            f, mult = item if isinstance(item, tuple) else (item, 1)
            if mult < 1:
                raise ValueError("factor multiplicities must be >= 1")
            g = normalize_factor(f)
            if n is None:
                n, field = g.n, g.field
            elif g.n != n or g.field != field:
                raise PolyError("factors must share field and number of variables")
            if g not in merged:
                order.append(g)
                merged[g] = 0
            merged[g] += mult
        if not order:
            raise PolyError("a variety needs at least one factor")
        self.factors = tuple((g, merged[g]) for g in order)
        self.field: Field = field
        self.n: int = n
        p = MultiPoly.constant(field, n, 1)
        sf = MultiPoly.constant(field, n, 1)
        for g, m in self.factors:
            p = p * g**m
            sf = sf * g
        self.p = p
        self.p_sf = sf
        self.d = int(p.degree)
        self._grad = [hasse_derivative(sf, tuple(1 if j == i else 0 for j in range(n))) for i in range(n)]

    @property
    def gradient(self) -> list:
        """First Hasse partials of the square-free part."""
        return list(self._grad)

    def contains_point(self, x) -> bool:
        return self.p_sf.evaluate(as_point(self.field, x)) == 0

    def contains_line(self, l: AffineSubspace) -> bool:
        return restrict_to_plane(self.p_sf, l).is_zero()

    def plane_factors(self) -> list[AffineSubspace]:
        """The zero planes of the degree-1 factors."""
        return [factor_plane(g) for g, _ in self.factors if g.degree == 1]

    def __repr__(self):
        return "FactoredVariety(" + " * ".join(f"({g.to_text()})^{m}" for g, m in self.factors) + ")"


def factor_plane(f: MultiPoly) -> AffineSubspace:
    """The hyperplane {f = 0} of a degree-1 polynomial."""
    if f.degree != 1:
        raise PolyError("expected a linear factor")
    F, n = f.field, f.n
    a = [f.coefficient(tuple(1 if j == i else 0 for j in range(n))) for i in range(n)]
    c = f.coefficient((0,) * n)
    i = next(j for j, v in enumerate(a) if v != 0)
    x0 = [F.zero] * n
    x0[i] = F.reduce(-c * F.inv(a[i]))
    dirs = linalg.nullspace([a], n, F)
    return canonicalize(F, x0, dirs)


def factor_intersection_line(f: MultiPoly, g: MultiPoly) -> AffineSubspace | None:
    """The line {f = g = 0} of two linear polynomials in three variables (None if parallel)."""
    if f.degree != 1 or g.degree != 1:
        raise PolyError("expected linear factors")
    F, n = f.field, f.n
    rows, rhs = [], []
    for h in (f, g):
        rows.append([h.coefficient(tuple(1 if j == i else 0 for j in range(n))) for i in range(n)])
        rhs.append(F.reduce(-h.coefficient((0,) * n)))
    if linalg.rank(rows, F) != 2:
        return None
    x0 = linalg.solve(rows, rhs, F)
    dirs = linalg.nullspace(rows, n, F)
    if x0 is None or len(dirs) != 1:
        return None
    return canonicalize(F, x0, dirs)


def square_free_part(V) -> MultiPoly:
    if not isinstance(V, FactoredVariety):
        V = FactoredVariety(V)
    return V.p_sf


class PointClass(enum.Enum):
    CRITICAL = "critical"
    REGULAR = "regular"
    FLAT = "flat"

    @property
    def is_regular(self) -> bool:
        return self is not PointClass.CRITICAL


class LineClass(enum.Enum):
    CRITICAL = "critical-line"
    FLAT = "flat-line"
    GENERIC = "generic"


def _distinct(lines):
    seen, out = set(), []
    for l in lines:
        if l not in seen:
            seen.add(l)
            out.append(l)
    return out


def has_coplanar_triple(lines: Sequence[AffineSubspace]) -> bool:
    """True if three of the (concurrent) lines lie in a common plane."""
    F = lines[0].field if lines else None
    for a, b, c in combinations(lines, 3):
        if vectors_rank(F, [a.direction, b.direction, c.direction]) <= 2:
            return True
    return False


def classify_point(V: FactoredVariety, x, incident_lines: Sequence[AffineSubspace] = ()) -> PointClass:
    """Critical if grad p_sf(x) = 0; flat if regular with three coplanar lines of Z through x."""
    x = as_point(V.field, x)
    if not V.contains_point(x):
        raise GeometryError(f"point {x} is not on the zero set")
    lines = _distinct(incident_lines)
    for l in lines:
        if not l.contains(x):
            raise GeometryError(f"line {l} does not pass through {x}")
        if not V.contains_line(l):
            raise GeometryError(f"line {l} is not contained in the zero set")
    if all(g.evaluate(x) == 0 for g in V._grad):
        return PointClass.CRITICAL
    if len(lines) >= 3 and has_coplanar_triple(lines):
        return PointClass.FLAT
    return PointClass.REGULAR


def classify_line(V: FactoredVariety, l: AffineSubspace, flat_witnesses: Sequence = ()) -> LineClass:
    """Critical line if every partial of p_sf vanishes on l; flat line if at
    least 3d - 3 of the witnesses (point, lines-through-it) are flat points.
    """
    if not V.contains_line(l):
        raise GeometryError("line is not contained in the zero set")
    if all(restrict_to_plane(g, l).is_zero() for g in V._grad):
        return LineClass.CRITICAL
    need = 3 * V.d - 3
    flat = set()
    for x, lines in flat_witnesses:
        x = as_point(V.field, x)
        if not l.contains(x):
            raise GeometryError(f"witness {x} is not on the line")
        if x in flat:
            continue
        if classify_point(V, x, lines) is PointClass.FLAT:
            flat.add(x)
    return LineClass.FLAT if len(flat) >= need else LineClass.GENERIC


@dataclass
class CensusReport:
    d: int
    critical: int
    flat: int
    flat_not_in_plane: int
    critical_bound: int
    flat_bound: int
    classes: list

    @property
    def ok(self) -> bool:
        return self.critical <= self.critical_bound and self.flat_not_in_plane <= self.flat_bound


def line_census(V: FactoredVariety, candidates: Sequence) -> CensusReport:
    """Count critical and flat lines among candidates; check d^2 and 3d^2-4d."""
    planes = V.plane_factors()
    seen = set()
    classes = []
    crit = flat = flat_out = 0
    for item in candidates:
        l, wit = (item if isinstance(item, tuple) else (item, ()))
        if l in seen:
            continue
        seen.add(l)
        c = classify_line(V, l, wit)
        classes.append(c)
        if c is LineClass.CRITICAL:
            crit += 1
        elif c is LineClass.FLAT:
            flat += 1
            if not any(contains_subspace(P, l) for P in planes):
                flat_out += 1
    d = V.d
    return CensusReport(d, crit, flat, flat_out, d * d, max(3 * d * d - 4 * d, 0), classes)


# --------------------------------------------------------------------------
# planar structure


@dataclass(frozen=True)
class PlanePartition:
    """Planes and a map joint point -> plane index."""

    planes: tuple
    assignment: dict

    @classmethod
    def from_hint(cls, hint) -> "PlanePartition":
        assign = {}
        for i, pts in enumerate(hint.joints):
            for x in pts:
                assign[x] = i
        return cls(tuple(hint.planes), assign)


@dataclass
class StructureCertificate:
    planes: list
    joints: list  # per plane, sorted points
    lines: list  # per plane, line ids of L_Pi
    c1: Fraction
    violations: list
    incidences_total: int = 0
    incidences_assigned: int = 0
    incidences_by_plane: int = 0
    c2: Fraction | None = None
    level_subsets: dict = dc_field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return not self.violations

    def to_json(self, family: LineFamily | None = None) -> dict:
        F = self.planes[0].field if self.planes else None
        fmt = (lambda x: [F.format(v) for v in x]) if F else list
        return {
            "accepted": self.accepted,
            "c1": str(self.c1),
            "c2": None if self.c2 is None else str(self.c2),
            "planes": [
                {"plane": P.to_json(), "joints": [fmt(x) for x in js], "lines": list(ls)}
                for P, js, ls in zip(self.planes, self.joints, self.lines)
            ],
            "violations": self.violations,
            "incidences": {
                "total": self.incidences_total,
                "assigned": self.incidences_assigned,
                "by_plane": self.incidences_by_plane,
            },
        }


def _points(J) -> list:
    return [j.point if isinstance(j, JointRecord) else tuple(j) for j in J]


def planar_structure_verify(J, L: LineFamily, partition: PlanePartition, c1=Fraction(1, 2)) -> StructureCertificate:
    """Check P1 (each joint keeps a c1 share of its lines in its plane's
    family) and P2 (the per-plane line families are pairwise disjoint).
    """
    c1 = Fraction(c1)
    if not 0 < c1 <= 1:
        raise ValueError("c1 must lie in (0, 1]")
    F = L.field
    pts = sorted({as_point(F, x) for x in _points(J)}, key=point_key)
    planes = list(partition.planes)
    assign = {as_point(F, x): i for x, i in partition.assignment.items()}
    per_plane: list = [[] for _ in planes]
    for x in pts:
        if x not in assign:
            raise GeometryError(f"joint {x} is not assigned to a plane")
        i = assign[x]
        if not 0 <= i < len(planes):
            raise GeometryError(f"joint {x} assigned to unknown plane {i}")
        per_plane[i].append(x)
    viol = []
    through = {x: [lid for lid, l in L if l.contains(x)] for x in pts}
    in_plane = [[(lid, l) for lid, l in L if contains_subspace(P, l)] for P in planes]
    L_pi = []
    for i, P in enumerate(planes):
        for x in per_plane[i]:
            if not P.contains(x):
                viol.append({"kind": "containment", "joint": [F.format(v) for v in x], "plane": i})
        L_pi.append([lid for lid, l in in_plane[i] if any(l.contains(x) for x in per_plane[i])])
    owner: dict = {}
    for i, ls in enumerate(L_pi):
        for lid in ls:
            if lid in owner:
                viol.append({"kind": "P2", "line": lid, "planes": [owner[lid], i]})
            else:
                owner[lid] = i
    total = assigned = by_plane = 0
    for i in range(len(planes)):
        ls = set(L_pi[i])
        for x in per_plane[i]:
            m = len(through[x])
            k = sum(1 for lid in through[x] if lid in ls)
            total += m
            assigned += k
            if k < c1 * m:
                viol.append({"kind": "P1", "joint": [F.format(v) for v in x], "plane": i, "in_plane": k, "total": m})
        # the same count, plane by plane
        lines_i = [L.by_id(lid) for lid in L_pi[i]]
        by_plane += sum(1 for x in per_plane[i] for l in lines_i if l.contains(x))
    return StructureCertificate(planes, per_plane, L_pi, c1, viol, total, assigned, by_plane)


@dataclass
class SearchResult:
    certificate: StructureCertificate | None
    best_c1: Fraction
    blocking: list

    @property
    def success(self) -> bool:
        return self.certificate is not None and self.certificate.accepted


def _plane_key(P: AffineSubspace):
    return (P.dirs, P.x0)


def _any_plane_through(F, x, lines) -> AffineSubspace:
    vecs = [list(lines[0].direction)] if lines else []
    for i in range(3):
        e = [F.one if j == i else F.zero for j in range(3)]
        if vectors_rank(F, vecs + [e]) > len(vecs):
            vecs.append(e)
        if len(vecs) == 2:
            break
    return canonicalize(F, x, vecs)


def planar_structure_search(J, L: LineFamily, c1=Fraction(1, 2), max_rounds: int = 50) -> SearchResult:
    """Greedy plane assignment with conflict repair; the verifier has the last word."""
    c1 = Fraction(c1)
    F = L.field
    if L.n != 3:
        raise GeometryError("planar structure search works in dimension 3")
    pts = sorted({as_point(F, x) for x in _points(J)}, key=point_key)
    if not pts:
        return SearchResult(planar_structure_verify([], L, PlanePartition((), {}), c1), Fraction(1), [])
    through = {x: [l for _, l in L if l.contains(x)] for x in pts}
    cand: dict = {}  # plane -> {joint: in-plane line count}
    for x in pts:
        for a, b in combinations(through[x], 2):
            P = span_plane(F, x, [a, b])
            if P is None or P in cand and x in cand[P]:
                continue
            cand.setdefault(P, {})[x] = sum(1 for l in through[x] if contains_subspace(P, l))
    # planes that give many joints a c1 share go first
    def support(P):
        ok = [s for x, s in cand[P].items() if s >= c1 * len(through[x])]
        return (-len(ok), -sum(ok), _plane_key(P))

    order = sorted(cand, key=support)
    assign: dict = {}
    for P in order:
        for x, s in sorted(cand[P].items(), key=lambda kv: point_key(kv[0])):
            if x not in assign and s >= c1 * len(through[x]):
                assign[x] = P
    for x in pts:
        if x not in assign:
            # no plane reaches c1: take its best plane (P1 will report it)
            opts = sorted((P for P in cand if x in cand[P]), key=lambda P: (-cand[P][x], _plane_key(P)))
            assign[x] = opts[0] if opts else _any_plane_through(F, x, through[x])
    planes = []
    index: dict = {}

    def partition():
        planes.clear()
        index.clear()
        a = {}
        for x in pts:
            P = assign[x]
            if P not in index:
                index[P] = len(planes)
                planes.append(P)
            a[x] = index[P]
        return PlanePartition(tuple(planes), a)

    cert = planar_structure_verify(pts, L, partition(), c1)
    rounds = 0
    while rounds < max_rounds and any(v["kind"] == "P2" for v in cert.violations):
        rounds += 1
        changed = False
        for v in cert.violations:
            if v["kind"] != "P2":
                continue
            i, j = v["planes"]
            keep, move = planes[i], planes[j]
            l = L.by_id(v["line"])
            for x in pts:
                if assign[x] == move and l.contains(x) and x in cand.get(keep, {}):
                    assign[x] = keep
                    changed = True
            break
        if not changed:
            break
        cert = planar_structure_verify(pts, L, partition(), c1)
    shares = []
    for i, js in enumerate(cert.joints):
        ls = set(cert.lines[i])
        for x in js:
            m = len(through[x])
            k = sum(1 for lid in (lid for lid, l in L if l.contains(x)) if lid in ls)
            shares.append(Fraction(k, m) if m else Fraction(1))
    best_c1 = min(shares) if shares else Fraction(1)
    if cert.accepted:
        return SearchResult(cert, best_c1, [])
    return SearchResult(None, best_c1, cert.violations)


def nearly_planar_verify(J, L: LineFamily, subsets: dict, partition: PlanePartition, c1=Fraction(1, 2), c2=Fraction(1, 2)) -> StructureCertificate:
    """Each level keeps a c2 share, and the union of the kept joints has planar structure."""
    c2 = Fraction(c2)
    if not 0 < c2 <= 1:
        raise ValueError("c2 must lie in (0, 1]")
    F = L.field
    pts = sorted({as_point(F, x) for x in _points(J)}, key=point_key)
    m = {x: sum(1 for _, l in L if l.contains(x)) for x in pts}
    levels: dict = defaultdict(set)
    for x in pts:
        if m[x] >= 1:
            levels[dyadic_level(m[x])].add(x)
    union = set()
    clean: dict = {}
    for k, sub in subsets.items():
        k = int(k)
        sub = {as_point(F, x) for x in _points(sub)}
        for x in sub:
            if x not in levels.get(k, ()):
                raise GeometryError(f"joint {x} is not in level {k}")
        clean[k] = sub
        union |= sub
    viol = []
    for k in sorted(levels):
        have = len(clean.get(k, ()))
        if have < c2 * len(levels[k]):
            viol.append({"kind": "level", "k": k, "kept": have, "size": len(levels[k])})
    part = PlanePartition(partition.planes, {x: i for x, i in partition.assignment.items() if as_point(F, x) in union})
    cert = planar_structure_verify(sorted(union, key=point_key), L, part, c1)
    cert.violations = viol + cert.violations
    cert.c2 = c2
    cert.level_subsets = {k: sorted(v, key=point_key) for k, v in sorted(clean.items())}
    return cert


def per_plane_kakeya_report(cert: StructureCertificate, L: LineFamily) -> dict:
    """Per plane: sum_k |J_{k,Pi}| k^{3/2} against |L_Pi| |L|^{1/2}."""
    Lt = len(L)
    rows = []
    for i, (P, js, ls) in enumerate(zip(cert.planes, cert.joints, cert.lines)):
        counts: dict = defaultdict(int)
        for x in js:
            m = sum(1 for _, l in L if l.contains(x))
            counts[dyadic_level(m)] += 1
        s = sum(c * k**1.5 for k, c in sorted(counts.items()))
        denom = len(ls) * Lt**0.5
        rows.append({
            "plane": i,
            "levels": {str(k): c for k, c in sorted(counts.items())},
            "sum": s,
            "L_plane": len(ls),
            "ratio": s / denom if denom else 0.0,
        })
    total_lines = sum(len(ls) for ls in cert.lines)
    return {"planes": rows, "sum_L_plane": total_lines, "L": Lt, "disjoint_ok": total_lines <= Lt}
