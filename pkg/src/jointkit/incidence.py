"""Joints, multijoints, dyadic levels, Kakeya-type sums and incidence counts."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import linalg
from .affine import (
    AffineSubspace,
    GeometryError,
    Relation,
    as_point,
    direction_in_span,
    intersect_line_plane,
    intersect_lines,
    subspace_from_json,
)
from .caps import CapExceeded, get_caps
from .field import Field, field_from_descriptor


@dataclass(frozen=True)
class LineFamily:
    """A finite family of pairwise distinct lines with stable identifiers."""

    field: Field
    n: int
    lines: tuple
    ids: tuple

    @classmethod
    def from_lines(cls, lines: Sequence[AffineSubspace], ids: Sequence | None = None, field: Field | None = None, n: int | None = None) -> "LineFamily":
        lines = tuple(lines)
        if ids is None:
            ids = tuple(range(len(lines)))
        ids = tuple(ids)
        if len(ids) != len(lines):
            raise ValueError("one identifier per line is required")
        if len(set(ids)) != len(ids):
            raise ValueError("line identifiers must be unique")
        if lines:
            field = lines[0].field
            n = lines[0].n
        if field is None or n is None:
            raise ValueError("an empty family needs an explicit field and dimension")
        for l in lines:
            if l.k != 1:
                raise GeometryError("family members must be lines")
            if l.field != field or l.n != n:
                raise GeometryError("all lines must share field and ambient dimension")
        if len(set(lines)) != len(lines):
            raise GeometryError("lines in a family must be pairwise distinct")
        caps = get_caps()
        if len(lines) > caps.max_lines:
            raise CapExceeded(f"{len(lines)} lines exceeds max_lines={caps.max_lines}")
        return cls(field, n, lines, ids)

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return iter(zip(self.ids, self.lines))

    def by_id(self, ident) -> AffineSubspace:
        return self.lines[self.ids.index(ident)]

    def lines_through(self, x) -> list:
        return [i for i, l in self if l.contains(x)]

    def to_json(self) -> dict:
        return {
            "field": str(self.field),
            "n": self.n,
            "lines": [dict(id=i, **l.to_json()) for i, l in self],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LineFamily":
        F = field_from_descriptor(obj.get("field"))
        lines = [subspace_from_json(d, F) for d in obj["lines"]]
        ids = [d.get("id", k) for k, d in enumerate(obj["lines"])]
        return cls.from_lines(lines, ids, field=F, n=obj.get("n"))


@dataclass(frozen=True)
class JointRecord:
    point: tuple
    incident_lines: tuple
    m: int
    N: int | None = None


def _sort_key(x):
    return tuple(x)


def _candidate_points(family: LineFamily) -> dict:
    """Map every pairwise intersection point to the ids of lines through it."""
    hits: dict = defaultdict(set)
    items = list(family)
    for (i, a), (j, b) in combinations(items, 2):
        r = intersect_lines(a, b)
        if r.kind is Relation.POINT:
            s = hits[r.point]
            s.add(i)
            s.add(j)
    return hits


def _dirs_rank(field, dirs) -> int:
    return linalg.rank([list(d) for d in dirs], field) if dirs else 0


def find_joints(family: LineFamily, with_multiplicity: bool = True, max_tuples: int | None = None) -> list[JointRecord]:
    """All joints of the family, sorted by point.

    Candidates are pairwise intersection points; a point is a joint when the
    directions of the lines through it span F^n.
    """
    F, n = family.field, family.n
    order = {i: k for k, i in enumerate(family.ids)}
    out = []
    for x, ids in _candidate_points(family).items():
        if len(ids) < n:
            continue
        ids = sorted(ids, key=order.__getitem__)
        dirs = [family.lines[order[i]].direction for i in ids]
        if _dirs_rank(F, dirs) < n:
            continue
        N = _count_tuples(F, n, dirs, max_tuples) if with_multiplicity else None
        out.append(JointRecord(x, tuple(ids), len(ids), N))
    out.sort(key=lambda r: _sort_key(r.point))
    return out


class _TupleCounter:
    def __init__(self, cap):
        self.cap = cap
        self.visited = 0

    def tick(self):
        self.visited += 1
        if self.visited > self.cap:
            raise CapExceeded(f"tuple enumeration exceeded cap of {self.cap}")


def _count_tuples(F, n: int, dirs: Sequence, max_tuples: int | None) -> int:
    """Ordered n-tuples of distinct lines with independent directions.

    Prefix pruning: a partial tuple is extended only while its directions
    remain independent, so dependent prefixes are never expanded.
    """
    cap = get_caps().max_tuples if max_tuples is None else max_tuples
    counter = _TupleCounter(cap)
    m = len(dirs)
    dirs = [list(d) for d in dirs]

    def extend(prefix_rows, used):
        if len(prefix_rows) == n:
            return 1
        total = 0
        for j in range(m):
            if j in used:
                continue
            counter.tick()
            rows = prefix_rows + [dirs[j]]
            if linalg.rank(rows, F) == len(rows):
                total += extend(rows, used | {j})
        return total

    return extend([], frozenset())


def joint_tuple_multiplicity(x, family: LineFamily, max_tuples: int | None = None) -> int:
    """N(x): ordered n-tuples of lines through x forming a joint at x."""
    point = x.point if isinstance(x, JointRecord) else as_point(family.field, x)
    dirs = [l.direction for _, l in family if l.contains(point)]
    return _count_tuples(family.field, family.n, dirs, max_tuples)


# --------------------------------------------------------------------------
# multijoints


@dataclass(frozen=True)
class MultijointRecord:
    point: tuple
    planes: tuple
    lines: tuple  # one tuple of incident line ids per family
    N: int
    chosen: tuple  # first spanning (plane, line_1, ..., line_{n-k}) in lex order


def find_multijoints(planes: Sequence[AffineSubspace], families: Sequence[LineFamily], max_tuples: int | None = None) -> list[MultijointRecord]:
    """Multijoints of a family of k-planes and n - k line families.

    N'(x) counts tuples (plane, one line per family) through x whose
    direction spaces jointly span F^n.
    """
    planes = list(planes)
    families = list(families)
    if not planes:
        return []
    F, n, k = planes[0].field, planes[0].n, planes[0].k
    if k < 2 or n < 3:
        raise GeometryError("multijoints need k >= 2 and n >= 3")
    if len(families) != n - k:
        raise GeometryError(f"need {n - k} line families for k={k} planes in dimension {n}")
    cap = get_caps().max_tuples if max_tuples is None else max_tuples
    candidates = set()
    for fam in families:
        for _, l in fam:
            for P in planes:
                r = intersect_line_plane(l, P)
                if r.kind is Relation.POINT:
                    candidates.add(r.point)
    for f1, f2 in combinations(families, 2):
        for _, a in f1:
            for _, b in f2:
                r = intersect_lines(a, b)
                if r.kind is Relation.POINT:
                    candidates.add(r.point)
    out = []
    for x in sorted(candidates, key=_sort_key):
        inc_planes = [i for i, P in enumerate(planes) if P.contains(x)]
        if not inc_planes:
            continue
        inc_lines = [[i for i, l in fam if l.contains(x)] for fam in families]
        if any(not ls for ls in inc_lines):
            continue
        count = 0
        first = None
        visited = 0
        for pi in inc_planes:
            base = [list(d) for d in planes[pi].dirs]

            def walk(j, rows, chosen):
                nonlocal count, first, visited
                if j == len(families):
                    count += 1
                    if first is None:
                        first = (pi,) + tuple(chosen)
                    return
                fam = families[j]
                for lid in inc_lines[j]:
                    visited += 1
                    if visited > cap:
                        raise CapExceeded(f"multijoint tuple enumeration exceeded cap of {cap}")
                    r2 = rows + [list(fam.by_id(lid).direction)]
                    if linalg.rank(r2, F) == len(r2):
                        walk(j + 1, r2, chosen + [lid])

            walk(0, base, [])
        if count:
            out.append(MultijointRecord(x, tuple(inc_planes), tuple(tuple(ls) for ls in inc_lines), count, first))
    return out


def multijoint_ratio(num_joints: int, planes: Sequence, families: Sequence[LineFamily]) -> float:
    """|J| / (L |P|^{1/(d-1)}) with L the largest family and d = n - k + 1."""
    planes = list(planes)
    if not planes:
        return 0.0
    n, k = planes[0].n, planes[0].k
    d = n - k + 1
    L = max(len(f) for f in families)
    return num_joints / (L * len(planes) ** (1.0 / (d - 1)))


# --------------------------------------------------------------------------
# Kakeya-type sums and levels


@dataclass(frozen=True)
class KakeyaSum:
    s: Fraction
    multiset: Counter
    total: float
    ratio: float


def _as_fraction(s) -> Fraction:
    if isinstance(s, str):
        return Fraction(s.strip())
    if isinstance(s, float):
        return Fraction(s).limit_denominator(10**6)
    return Fraction(s)


def kakeya_sum(joints: Sequence[JointRecord], s, L: int) -> KakeyaSum:
    """Sum over joints of m(x)^s, and its ratio to L^s."""
    s = _as_fraction(s)
    if s <= 0:
        raise ValueError("exponent must be positive")
    ms = Counter(j.m for j in joints)
    e = float(s)
    if s.denominator == 1:
        total = float(sum(c * m ** s.numerator for m, c in ms.items()))
    else:
        total = math.fsum(c * m**e for m, c in sorted(ms.items()))
    denom = float(L) ** e if L else 0.0
    ratio = total / denom if denom else 0.0
    return KakeyaSum(s, ms, total, ratio)


def dyadic_level(m: int) -> int:
    """The dyadic k with k <= m < 2k."""
    if m < 1:
        raise ValueError("level of a point on no lines is undefined")
    return 1 << (m.bit_length() - 1)


def dyadic_levels(joints: Sequence[JointRecord]) -> dict:
    table: dict = defaultdict(list)
    for j in joints:
        table[dyadic_level(j.m)].append(j)
    return dict(sorted(table.items()))


@dataclass(frozen=True)
class LevelVerdict:
    k: int
    count: int
    good: bool
    large: bool


def _le_rational_powers(base_a: Fraction, exp_a: Fraction, base_b: Fraction, exp_b: Fraction) -> bool:
    """Exact test of base_a**exp_a <= base_b**exp_b for positive bases."""
    q = exp_a.denominator * exp_b.denominator // math.gcd(exp_a.denominator, exp_b.denominator)
    lhs = base_a ** int(exp_a * q)
    rhs = base_b ** int(exp_b * q)
    return lhs <= rhs


def classify_levels(table: dict, L: int, eps=Fraction(1, 4), C=10, c=1) -> dict:
    """Good iff |J_k| k^{2 - eps/2} <= C L^{3/2}; large iff k > c L^{1/2}.

    Both comparisons are exact: sides are raised to a common integer power.
    """
    eps = _as_fraction(eps)
    C = _as_fraction(C)
    c = _as_fraction(c)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("eps must lie in (0, 1/2)")
    if C <= 0 or c <= 0:
        raise ValueError("constants must be positive")
    out = {}
    e = 2 - eps / 2
    for k, js in sorted(table.items()):
        cnt = len(js) if not isinstance(js, int) else js
        # |J_k| k^e <= C L^{3/2}  <=>  (|J_k| k^e / C)^q <= L^{3q/2}
        q = 2 * e.denominator
        lhs = (Fraction(cnt) / C) ** q * Fraction(k) ** int(e * q)
        rhs = Fraction(L) ** int(Fraction(3, 2) * q)
        good = lhs <= rhs
        large = Fraction(k) ** 2 > c**2 * L
        out[k] = LevelVerdict(k, cnt, good, large)
    return out


def incidence_count(joints: Sequence[JointRecord]) -> int:
    return sum(j.m for j in joints)


# --------------------------------------------------------------------------
# Szemeredi-Trotter incidences inside a plane


@dataclass(frozen=True)
class STReport:
    incidences: int
    num_points: int
    num_lines: int
    levels: dict  # dyadic k -> |S_k|
    ratio: float
    level_ratios: dict = dc_field(default_factory=dict)


def st_incidences(plane: AffineSubspace, points: Sequence, lines: Sequence[AffineSubspace]) -> STReport:
    """Exact point-line incidences in a 2-plane with Szemeredi-Trotter ratios."""
    if plane.k != 2:
        raise GeometryError("st_incidences needs a 2-plane")
    F = plane.field
    pts = sorted({as_point(F, x) for x in points}, key=_sort_key)
    for x in pts:
        if not plane.contains(x):
            raise GeometryError(f"point {x} is not in the plane")
    for l in lines:
        if not (plane.contains(l.x0) and direction_in_span(plane, l.direction)):
            raise GeometryError(f"line {l} is not in the plane")
    per_point = {x: sum(1 for l in lines if l.contains(x)) for x in pts}
    I = sum(per_point.values())
    S, Lc = len(pts), len(lines)
    levels: dict = defaultdict(int)
    for x, m in per_point.items():
        if m >= 1:
            levels[dyadic_level(m)] += 1
    denom = S ** (2 / 3) * Lc ** (2 / 3) + Lc + S
    ratio = I / denom if denom else 0.0
    level_ratios = {}
    for k, cnt in sorted(levels.items()):
        if k >= 2:
            level_ratios[k] = cnt / (Lc**2 / k**3 + Lc / k)
    return STReport(I, S, Lc, dict(sorted(levels.items())), ratio, level_ratios)


def joints_report(family: LineFamily, joints: Sequence[JointRecord], s="3/2") -> dict:
    """JSON-ready report: L, joints, level counts, Kakeya sum."""
    F = family.field
    ks = kakeya_sum(joints, s, len(family))
    return {
        "L": len(family),
        "joints": [
            {"point": [F.format(v) for v in j.point], "lines": list(j.incident_lines), "m": j.m, "N": j.N}
            for j in joints
        ],
        "levels": {str(k): len(v) for k, v in dyadic_levels(joints).items()},
        "kakeya": {"s": f"{ks.s.numerator}/{ks.s.denominator}" if ks.s.denominator != 1 else str(ks.s.numerator), "sum": ks.total, "ratio": ks.ratio},
    }


def good_set_ratio(joints: Sequence[JointRecord], L: int, eps=Fraction(1, 4), C=10, c=1) -> float:
    """Sum of m^{2-eps} over joints on good small levels, divided by L^{3/2}."""
    eps = _as_fraction(eps)
    verdicts = classify_levels(dyadic_levels(joints), L, eps, C, c)
    e = float(2 - eps)
    total = math.fsum(j.m**e for j in joints if not verdicts[dyadic_level(j.m)].large and verdicts[dyadic_level(j.m)].good)
    return total / L**1.5 if L else 0.0
