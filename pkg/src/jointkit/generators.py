"""Deterministic builders for the standard joint and multijoint configurations."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Any

from .affine import AffineSubspace, canonicalize, line
from .caps import CapExceeded, get_caps
from .field import QQ, Field, FieldError, PrimeField, is_prime
from .incidence import LineFamily, find_joints, find_multijoints


@dataclass(frozen=True)
class ConfigDescriptor:
    """Kind tag, parameters and (when known) exact expected counts."""

    kind: str
    params: dict
    expected: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "expected": dict(self.expected)}


class SelfCheckError(AssertionError):
    pass


def self_check(desc: ConfigDescriptor, family: LineFamily, joints=None) -> None:
    """Compare a descriptor's expected counts with measured ones."""
    exp = desc.expected
    if "lines" in exp and len(family) != exp["lines"]:
        raise SelfCheckError(f"{desc.kind}: expected {exp['lines']} lines, built {len(family)}")
    if "joints" in exp or "m" in exp:
        if joints is None:
            joints = find_joints(family, with_multiplicity=False)
        if "joints" in exp and len(joints) != exp["joints"]:
            raise SelfCheckError(f"{desc.kind}: expected {exp['joints']} joints, found {len(joints)}")
        if "m" in exp and any(j.m != exp["m"] for j in joints):
            raise SelfCheckError(f"{desc.kind}: expected every joint to have m={exp['m']}")


def _unit(F: Field, n: int, i: int) -> list:
    return [F.one if j == i else F.zero for j in range(n)]


def _check_line_cap(count: int):
    cap = get_caps().max_lines
    if count > cap:
        raise CapExceeded(f"configuration needs {count} lines, max_lines={cap}")


def axis_grid(n: int, N: int, field: Field = QQ) -> LineFamily:
    """Axis-parallel lines through the lattice [0, N)^(n-1) in every direction."""
    if n < 2 or N < 1:
        raise ValueError("axis_grid needs n >= 2 and N >= 1")
    if isinstance(field, PrimeField) and N > field.p:
        raise FieldError(f"side {N} exceeds the field size {field.p}")
    _check_line_cap(n * N ** (n - 1))
    lines = []
    ids = []
    for axis in range(n):
        others = [i for i in range(n) if i != axis]
        for c in itertools.product(range(N), repeat=n - 1):
            x0 = [0] * n
            for i, v in zip(others, c):
                x0[i] = v
            lines.append(line(field, x0, _unit(field, n, axis)))
            ids.append(f"e{axis + 1}:" + ",".join(map(str, c)))
    return LineFamily.from_lines(lines, ids, field=field, n=n)


def axis_grid_descriptor(n: int, N: int) -> ConfigDescriptor:
    return ConfigDescriptor("axis-grid", {"n": n, "N": N}, {"lines": n * N ** (n - 1), "joints": N**n, "m": n})


@dataclass(frozen=True)
class PlaneHint:
    """A suggested plane partition: per plane, its joints and in-plane lines."""

    planes: tuple
    joints: tuple  # tuple of point tuples per plane
    lines: tuple  # tuple of line-id tuples per plane


def loomis_whitney_grid(N: int, field: Field = QQ) -> tuple[LineFamily, PlaneHint]:
    """The 3D axis grid with the partition into horizontal planes z = c."""
    fam = axis_grid(3, N, field)
    planes, pj, pl = [], [], []
    for c in range(N):
        P = canonicalize(field, [0, 0, c], [[1, 0, 0], [0, 1, 0]])
        planes.append(P)
        pj.append(tuple((field.coerce(a), field.coerce(b), field.coerce(c)) for a in range(N) for b in range(N)))
        pl.append(tuple(i for i, l in fam if P.contains(l.x0) and l.direction[2] == 0))
    return fam, PlaneHint(tuple(planes), tuple(pj), tuple(pl))


def _bush_directions(F: Field, M: int, coplanar: bool) -> list:
    if coplanar:
        dirs = [[0, 1, 0]] + [[1, i, 0] for i in range(M - 1)]
    else:
        dirs = [[1, i, i * i] for i in range(M)]
    return [[F.coerce(v) for v in d] for d in dirs]


def bush(M: int, center=(0, 0, 0), coplanar: bool = True, add_transverse: bool = False, field: Field = QQ) -> LineFamily:
    """M distinct lines through ``center``; optionally one more out of their plane.

    Coplanar directions are (0,1,0), (1,i,0); non-coplanar ones lie on the
    moment curve (1,i,i^2), any three of which are independent.
    """
    if M < 2:
        raise ValueError("a bush needs M >= 2")
    if isinstance(field, PrimeField) and M > field.p:
        raise FieldError(f"F_{field.p} has too few slopes for {M} distinct directions")
    _check_line_cap(M + int(add_transverse))
    dirs = _bush_directions(field, M, coplanar)
    lines = [line(field, center, d) for d in dirs]
    ids = [f"b{i}" for i in range(M)]
    if add_transverse:
        # (0,0,1) leaves the plane z=0; (0,1,-1) avoids the moment-curve cone
        t = [0, 0, 1] if coplanar else [0, 1, -1]
        lines.append(line(field, center, t))
        ids.append("t")
    assert len(set(lines)) == len(lines), "bush directions collided"
    return LineFamily.from_lines(lines, ids, field=field, n=3)


def bush_descriptor(M: int, coplanar: bool, add_transverse: bool) -> ConfigDescriptor:
    exp: dict[str, Any] = {"lines": M + int(add_transverse)}
    if add_transverse or not coplanar:
        exp.update(joints=1, m=M + int(add_transverse))
    else:
        exp.update(joints=0)
    return ConfigDescriptor("bush", {"M": M, "coplanar": coplanar, "add_transverse": add_transverse}, exp)


def finite_field_counterexample(p: int) -> LineFamily:
    """Every line of the plane F_p^2 x {0} plus one vertical line per base point."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    F = PrimeField(p)
    _check_line_cap(2 * p * p + p)
    lines, ids = [], []
    # lines y = a x + b, and verticals x = c inside the plane
    for a in range(p):
        for b in range(p):
            lines.append(line(F, [0, b, 0], [1, a, 0]))
            ids.append(f"y={a}x+{b}")
    for c in range(p):
        lines.append(line(F, [c, 0, 0], [0, 1, 0]))
        ids.append(f"x={c}")
    for u in range(p):
        for v in range(p):
            lines.append(line(F, [u, v, 0], [0, 0, 1]))
            ids.append(f"v{u},{v}")
    return LineFamily.from_lines(lines, ids, field=F, n=3)


def ff_descriptor(p: int) -> ConfigDescriptor:
    return ConfigDescriptor("ff-counterexample", {"p": p}, {"lines": 2 * p * p + p, "joints": p * p, "m": p + 2})


def ff_kakeya_ratio(p: int) -> float:
    """p^2 (p+2)^{3/2} / (2p^2+p)^{3/2}: the closed form of the Kakeya ratio."""
    return p * p * (p + 2) ** 1.5 / (2 * p * p + p) ** 1.5


def random_lines(n: int, count: int, field: Field, seed: int, coord_range: int = 5) -> LineFamily:
    """``count`` distinct random lines, reproducible from ``seed``.

    Over F_p coordinates are uniform residues; over Q they are integers in
    [-coord_range, coord_range].
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    _check_line_cap(count)
    rng = random.Random(seed)
    if isinstance(field, PrimeField):
        p = field.p
        total = (p**n - 1) // (p - 1) * p ** (n - 1)  # number of lines in F_p^n
        if count > total:
            raise FieldError(f"F_{p}^{n} has only {total} lines, asked for {count}")
        draw = lambda: rng.randrange(p)
    else:
        draw = lambda: rng.randint(-coord_range, coord_range)
    seen: set = set()
    lines = []
    attempts = 0
    while len(lines) < count:
        attempts += 1
        if attempts > 1000 * count + 1000:
            raise FieldError("could not draw enough distinct lines")
        d = [draw() for _ in range(n)]
        if all(field.reduce(v) == 0 for v in d):
            continue
        x0 = [draw() for _ in range(n)]
        l = line(field, x0, d)
        if l in seen:
            continue
        seen.add(l)
        lines.append(l)
    return LineFamily.from_lines(lines, field=field, n=n)


def multijoint_grid(n: int, k: int, N: int, field: Field = QQ) -> tuple[list[AffineSubspace], list[LineFamily]]:
    """Coordinate k-planes x_{k+1..n} = c and, for each j, lines along e_{k+j}.

    Every lattice point of [0, N)^n with its first k coordinates in [0, N)
    is then a multijoint with exactly one spanning tuple.
    """
    if k < 2 or n <= k or N < 1:
        raise ValueError("multijoint_grid needs k >= 2, n > k, N >= 1")
    if isinstance(field, PrimeField) and N > field.p:
        raise FieldError(f"side {N} exceeds the field size {field.p}")
    r = n - k
    _check_line_cap(r * N ** (n - 1))
    plane_dirs = [_unit(field, n, i) for i in range(k)]
    planes = []
    for c in itertools.product(range(N), repeat=r):
        planes.append(canonicalize(field, [0] * k + list(c), plane_dirs))
    fams = []
    for j in range(r):
        axis = k + j
        others = [i for i in range(n) if i != axis]
        lines, ids = [], []
        for c in itertools.product(range(N), repeat=n - 1):
            x0 = [0] * n
            for i, v in zip(others, c):
                x0[i] = v
            lines.append(line(field, x0, _unit(field, n, axis)))
            ids.append(f"e{axis + 1}:" + ",".join(map(str, c)))
        fams.append(LineFamily.from_lines(lines, ids, field=field, n=n))
    return planes, fams


def multijoint_descriptor(n: int, k: int, N: int) -> ConfigDescriptor:
    r = n - k
    return ConfigDescriptor(
        "multijoint-grid",
        {"n": n, "k": k, "N": N},
        {"planes": N**r, "lines_per_family": N ** (n - 1), "multijoints": N**n},
    )


def check_multijoint_grid(n: int, k: int, N: int, field: Field = QQ):
    """Build the multijoint grid and verify its descriptor against find_multijoints."""
    planes, fams = multijoint_grid(n, k, N, field)
    desc = multijoint_descriptor(n, k, N)
    mj = find_multijoints(planes, fams)
    exp = desc.expected
    if len(planes) != exp["planes"] or any(len(f) != exp["lines_per_family"] for f in fams):
        raise SelfCheckError("multijoint grid has the wrong number of objects")
    if len(mj) != exp["multijoints"]:
        raise SelfCheckError(f"expected {exp['multijoints']} multijoints, found {len(mj)}")
    return planes, fams, mj, desc


BUILDERS = {
    "axis-grid": ("n", "N"),
    "bush": ("M", "coplanar", "add_transverse"),
    "ff-counterexample": ("p",),
    "random-lines": ("n", "count", "field", "seed"),
    "loomis-whitney": ("N",),
    "multijoint-grid": ("n", "k", "N"),
}
