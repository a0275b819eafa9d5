import random
from fractions import Fraction

import pytest
import sympy

from jointkit.affine import GeometryError, line, plane
from jointkit.field import QQ
from jointkit.generators import bush, loomis_whitney_grid
from jointkit.incidence import LineFamily, find_joints
from jointkit.mpoly import MultiPoly, PolyError
from jointkit.zeroset import (
    FactoredVariety,
    LineClass,
    PlanePartition,
    PointClass,
    classify_line,
    classify_point,
    factor_intersection_line,
    factor_plane,
    line_census,
    nearly_planar_verify,
    per_plane_kakeya_report,
    planar_structure_search,
    planar_structure_verify,
    square_free_part,
)
from oracles import sym_vars, to_sympy

F = QQ
x, y, z = MultiPoly.gens(F, 3)


def _random_planes(rng, m):
    out = []
    while len(out) < m:
        f = MultiPoly.linear_form(F, [rng.randint(-3, 3) for _ in range(3)], rng.randint(-3, 3))
        if f.degree == 1 and all(FactoredVariety([f]).factors[0][0] != FactoredVariety([g]).factors[0][0] for g in out):
            out.append(f)
    return out


def _sympy_grad_vanishes_on(p, l):
    xs, _ = sym_vars(3)
    t = sympy.Symbol("t")
    expr = to_sympy(p, xs)
    sub = {xs[i]: sympy.Rational(l.x0[i]) + t * sympy.Rational(l.direction[i]) for i in range(3)}
    return all(sympy.expand(sympy.diff(expr, v).subs(sub, simultaneous=True)) == 0 for v in xs)


def test_square_free_part_idempotent():
    V = FactoredVariety([(x - 1, 3), (y * z + 1, 2), (2 * x - 2, 1)])
    assert len(V.factors) == 2 and V.factors[0][1] == 4
    sf = square_free_part(V)
    assert square_free_part([sf]) == sf
    assert V.d == 8


def test_bad_factors():
    with pytest.raises(PolyError):
        FactoredVariety([MultiPoly.constant(F, 3, 2)])
    with pytest.raises(PolyError):
        FactoredVariety([])


def test_factor_plane_and_line():
    P = factor_plane(x + 2 * y - 3)
    assert P.contains((3, 0, 0)) and P.contains((1, 1, 5))
    l = factor_intersection_line(x - 1, y)
    assert l == line(F, [1, 0, 0], [0, 0, 1])
    assert factor_intersection_line(x, x + 1) is None


def test_point_classes():
    V = FactoredVariety([z, x])
    zl = line(F, [0, 0, 0], [0, 1, 0])
    assert classify_point(V, (0, 0, 0)) is PointClass.CRITICAL
    assert classify_point(V, (1, 2, 0)) is PointClass.REGULAR
    lines = [line(F, [1, 0, 0], d) for d in ([1, 0, 0], [0, 1, 0], [1, 1, 0])]
    c = classify_point(V, (1, 0, 0), lines)
    assert c is PointClass.FLAT and c.is_regular
    with pytest.raises(GeometryError):
        classify_point(V, (1, 1, 1))
    with pytest.raises(GeometryError):
        classify_point(V, (1, 0, 0), [line(F, [1, 0, 0], [0, 0, 1])])
    assert classify_point(V, (0, 5, 0), [zl]) is PointClass.CRITICAL


def test_critical_line_points_are_critical():
    rng = random.Random(2)
    planes = _random_planes(rng, 4)
    V = FactoredVariety(planes)
    for i in range(4):
        for j in range(i + 1, 4):
            l = factor_intersection_line(planes[i], planes[j])
            if l is None:
                continue
            assert classify_line(V, l) is LineClass.CRITICAL
            assert _sympy_grad_vanishes_on(V.p_sf, l)
            for t in range(-2, 3):
                assert classify_point(V, l.point_at([t])) is PointClass.CRITICAL


def test_generic_line_on_saddle():
    V = FactoredVariety([x * y - z])
    l = line(F, [0, 1, 0], [1, 0, 1])
    assert V.contains_line(l)
    assert classify_line(V, l) is LineClass.GENERIC
    assert not _sympy_grad_vanishes_on(V.p_sf, l)


def test_census_on_plane_products():
    rng = random.Random(5)
    for m in range(1, 6):
        planes = _random_planes(rng, m)
        V = FactoredVariety(planes)
        cands = [factor_intersection_line(f, g) for i, f in enumerate(planes) for g in planes[i + 1:]]
        cands = [l for l in cands if l is not None]
        rep = line_census(V, cands)
        assert rep.critical == len(set(cands))
        assert rep.ok and rep.critical_bound == m * m


def test_flat_line_threshold():
    # d = 2; a line in the plane z = 0 needs 3d - 3 = 3 flat witnesses
    V = FactoredVariety([z, x - 5])
    l = line(F, [0, 0, 0], [1, 0, 0])
    wits = [((t, 0, 0), [line(F, [t, 0, 0], d) for d in ([1, 0, 0], [0, 1, 0], [1, 1, 0])]) for t in range(3)]
    assert classify_line(V, l, wits[:2]) is LineClass.GENERIC
    assert classify_line(V, l, wits) is LineClass.FLAT


def test_loomis_whitney_structure():
    fam, hint = loomis_whitney_grid(3)
    J = find_joints(fam)
    part = PlanePartition.from_hint(hint)
    cert = planar_structure_verify(J, fam, part, Fraction(1, 2))
    assert cert.accepted
    assert cert.incidences_assigned == cert.incidences_by_plane == 2 * 27
    assert cert.incidences_total == 3 * 27
    assert not planar_structure_verify(J, fam, part, Fraction(1)).accepted
    res = planar_structure_search(J, fam, Fraction(1, 2))
    assert res.success and res.best_c1 == Fraction(2, 3)
    rep = per_plane_kakeya_report(cert, fam)
    assert rep["disjoint_ok"] and rep["sum_L_plane"] == 18


def test_shared_line_is_reported():
    lines = [
        line(F, [0, 0, 0], [1, 0, 0]),
        line(F, [0, 0, 0], [0, 1, 0]),
        line(F, [0, 0, 0], [0, 0, 1]),
        line(F, [1, 0, 0], [0, 0, 1]),
        line(F, [1, 0, 0], [0, 1, 0]),
    ]
    fam = LineFamily.from_lines(lines)
    J = find_joints(fam)
    assert [j.point for j in J] == [(0, 0, 0), (1, 0, 0)]
    P0 = plane(F, [0, 0, 0], [[1, 0, 0], [0, 1, 0]])
    P1 = plane(F, [0, 0, 0], [[1, 0, 0], [0, 0, 1]])
    cert = planar_structure_verify(J, fam, PlanePartition((P0, P1), {(0, 0, 0): 0, (1, 0, 0): 1}), Fraction(1, 2))
    assert [v["kind"] for v in cert.violations] == ["P2"]
    assert cert.violations[0]["line"] == 0


def test_non_coplanar_bush_has_no_structure():
    fam = bush(10, coplanar=False)
    res = planar_structure_search(find_joints(fam), fam, Fraction(1, 2))
    assert not res.success and res.best_c1 == Fraction(1, 5)


def test_nearly_planar():
    fam, hint = loomis_whitney_grid(2)
    J = find_joints(fam)
    part = PlanePartition.from_hint(hint)
    keep = {2: [j.point for j in J][:4]}
    cert = nearly_planar_verify(J, fam, keep, part, Fraction(1, 2), Fraction(1, 2))
    assert cert.accepted
    cert = nearly_planar_verify(J, fam, {2: keep[2][:3]}, part, Fraction(1, 2), Fraction(1, 2))
    assert [v["kind"] for v in cert.violations] == ["level"]
