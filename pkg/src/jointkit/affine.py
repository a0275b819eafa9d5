"""Exact affine subspaces of F^n: canonical forms, incidence, intersections."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from . import linalg
from .field import Field, field_from_descriptor


class GeometryError(ValueError):
    pass


Point = tuple


def as_point(field: Field, x: Sequence) -> Point:
    return tuple(field.coerce(v) for v in x)


@dataclass(frozen=True)
class AffineSubspace:
    """x0 + span(dirs), stored canonically.

    ``dirs`` is the row-reduced echelon basis of the direction space (so the
    n x k matrix with these columns is in reduced column echelon form) and
    ``x0`` has zero coordinates at every pivot position.  Two descriptions of
    the same subspace therefore compare (and hash) equal.
    """

    field: Field
    x0: Point
    dirs: tuple

    @property
    def n(self) -> int:
        return len(self.x0)

    @property
    def k(self) -> int:
        return len(self.dirs)

    @property
    def direction(self):
        if self.k != 1:
            raise GeometryError("direction is only defined for lines")
        return self.dirs[0]

    @property
    def pivots(self) -> tuple:
        out = []
        for d in self.dirs:
            out.append(next(i for i, v in enumerate(d) if v != 0))
        return tuple(out)

    def contains(self, x: Sequence) -> bool:
        return contains(self, x)

    def point_at(self, t: Sequence) -> Point:
        F = self.field
        out = list(self.x0)
        for ti, d in zip(t, self.dirs):
            ti = F.coerce(ti)
            out = [o + ti * di for o, di in zip(out, d)]
        return tuple(F.reduce(v) for v in out)

    def parameters_of(self, x: Sequence) -> tuple:
        """Coordinates t with point_at(t) == x (requires x in the subspace)."""
        if not self.contains(x):
            raise GeometryError(f"point {x} is not in the subspace")
        F = self.field
        x = as_point(F, x)
        # canonical dirs have unit pivots and x0 is zero there
        return tuple(F.reduce(x[c]) for c in self.pivots)

    def to_json(self) -> dict:
        F = self.field
        return {"field": str(F), "x0": [F.format(v) for v in self.x0], "dirs": [[F.format(v) for v in d] for d in self.dirs]}

    def __repr__(self):
        F = self.field
        x0 = ", ".join(F.format(v) for v in self.x0)
        dirs = "; ".join("(" + ", ".join(F.format(v) for v in d) + ")" for d in self.dirs)
        return f"AffineSubspace[{F}]({x0} + span{{{dirs}}})"


def canonicalize(field: Field, x0: Sequence, dirs: Sequence[Sequence]) -> AffineSubspace:
    """Canonical representation of x0 + span(dirs); dirs must be independent."""
    F = field
    x0 = [F.coerce(v) for v in x0]
    n = len(x0)
    rows = [[F.coerce(v) for v in d] for d in dirs]
    if not rows:
        raise GeometryError("a subspace needs at least one direction")
    if any(len(r) != n for r in rows):
        raise GeometryError("direction vectors must match the base point's dimension")
    R, pivots = linalg.rref(rows, F)
    if len(pivots) != len(rows):
        raise GeometryError("direction vectors are linearly dependent")
    R = R[: len(pivots)]
    for row, c in zip(R, pivots):
        f = x0[c]
        if f != 0:
            x0 = [F.reduce(xi - f * ri) for xi, ri in zip(x0, row)]
    return AffineSubspace(F, tuple(F.reduce(v) for v in x0), tuple(tuple(r) for r in R))


def line(field: Field, point: Sequence, direction: Sequence) -> AffineSubspace:
    return canonicalize(field, point, [direction])


def line_through(field: Field, a: Sequence, b: Sequence) -> AffineSubspace:
    a = as_point(field, a)
    b = as_point(field, b)
    d = [field.reduce(y - x) for x, y in zip(a, b)]
    if all(v == 0 for v in d):
        raise GeometryError("points coincide")
    return canonicalize(field, a, [d])


def plane(field: Field, point: Sequence, dirs: Sequence[Sequence]) -> AffineSubspace:
    return canonicalize(field, point, dirs)


def subspace_from_json(obj: dict, field: Field | str | None = None) -> AffineSubspace:
    if not isinstance(field, Field):
        field = field_from_descriptor(obj.get("field", field))
    return canonicalize(field, [field.parse(str(v)) for v in obj["x0"]], [[field.parse(str(v)) for v in d] for d in obj["dirs"]])


def contains(S: AffineSubspace, x: Sequence) -> bool:
    """Exact test of x - x0 in span(dirs)."""
    F = S.field
    if len(x) != S.n:
        raise GeometryError(f"point dimension {len(x)} differs from ambient dimension {S.n}")
    x = as_point(F, x)
    # reduce x - x0 against the echelon rows; member iff remainder vanishes
    r = [F.reduce(a - b) for a, b in zip(x, S.x0)]
    for row, c in zip(S.dirs, S.pivots):
        f = r[c]
        if f != 0:
            r = [F.reduce(ri - f * di) for ri, di in zip(r, row)]
    return all(v == 0 for v in r)


def contains_subspace(big: AffineSubspace, small: AffineSubspace) -> bool:
    if not big.contains(small.x0):
        return False
    return all(direction_in_span(big, d) for d in small.dirs)


def direction_in_span(S: AffineSubspace, v: Sequence) -> bool:
    F = S.field
    r = [F.coerce(a) for a in v]
    for row, c in zip(S.dirs, S.pivots):
        f = r[c]
        if f != 0:
            r = [F.reduce(ri - f * di) for ri, di in zip(r, row)]
    return all(x == 0 for x in r)


class Relation(enum.Enum):
    POINT = "point"
    DISJOINT = "disjoint"
    IDENTICAL = "identical"
    CONTAINED = "contained"


class Intersection(NamedTuple):
    kind: Relation
    point: Point | None = None


def _check_compatible(a: AffineSubspace, b: AffineSubspace):
    if a.field != b.field:
        raise GeometryError(f"field mismatch: {a.field} vs {b.field}")
    if a.n != b.n:
        raise GeometryError(f"ambient dimension mismatch: {a.n} vs {b.n}")


def intersect_lines(l1: AffineSubspace, l2: AffineSubspace) -> Intersection:
    _check_compatible(l1, l2)
    if l1 == l2:
        return Intersection(Relation.IDENTICAL)
    F = l1.field
    d1, d2 = l1.direction, l2.direction
    if d1 == d2:  # canonical directions of parallel lines coincide
        return Intersection(Relation.DISJOINT)
    # l1.x0 + s d1 = l2.x0 + t d2
    A = [[d1[i], F.reduce(-d2[i])] for i in range(l1.n)]
    b = [F.reduce(l2.x0[i] - l1.x0[i]) for i in range(l1.n)]
    sol = linalg.solve(A, b, F)
    if sol is None:
        return Intersection(Relation.DISJOINT)
    return Intersection(Relation.POINT, l1.point_at([sol[0]]))


def intersect_line_plane(l: AffineSubspace, P: AffineSubspace) -> Intersection:
    _check_compatible(l, P)
    F = l.field
    d = l.direction
    if direction_in_span(P, d):
        return Intersection(Relation.CONTAINED if P.contains(l.x0) else Relation.DISJOINT)
    # P.x0 + sum s_i w_i = l.x0 + t d
    A = [[w[i] for w in P.dirs] + [F.reduce(-d[i])] for i in range(l.n)]
    b = [F.reduce(l.x0[i] - P.x0[i]) for i in range(l.n)]
    sol = linalg.solve(A, b, F)
    if sol is None:
        return Intersection(Relation.DISJOINT)
    return Intersection(Relation.POINT, l.point_at([sol[-1]]))


def direction_rank(objects: Sequence[AffineSubspace]) -> int:
    objects = list(objects)
    if not objects:
        return 0
    F = objects[0].field
    rows = [list(d) for S in objects for d in S.dirs]
    return linalg.rank(rows, F)


def vectors_rank(field: Field, vectors) -> int:
    vectors = [list(v) for v in vectors]
    if not vectors:
        return 0
    return linalg.rank(vectors, field)


def complete_transverse(P: AffineSubspace) -> list[tuple]:
    """Standard basis vectors, chosen greedily, completing P's directions to F^n."""
    F = P.field
    current = [list(d) for d in P.dirs]
    r = len(current)
    out = []
    for i in range(P.n):
        if r == P.n:
            break
        e = [F.one if j == i else F.zero for j in range(P.n)]
        if linalg.rank(current + [e], F) > r:
            current.append(e)
            out.append(tuple(e))
            r += 1
    return out


def is_transverse(P: AffineSubspace, nu: Sequence[Sequence]) -> bool:
    return len(nu) + P.k == P.n and vectors_rank(P.field, list(P.dirs) + [list(v) for v in nu]) == P.n


def span_plane(field: Field, point: Sequence, lines: Sequence[AffineSubspace]) -> AffineSubspace | None:
    """The plane through ``point`` spanned by the directions of ``lines`` (None if rank < 2)."""
    R, piv = linalg.rref([list(l.direction) for l in lines], field)
    if len(piv) != 2:
        return None
    return canonicalize(field, point, R[:2])


def point_key(x: Point):
    """Sort key making points of any exact field totally ordered."""
    return tuple(x)
