import random

import pytest

from jointkit.affine import GeometryError, line, plane
from jointkit.caps import CapExceeded, caps_override
from jointkit.field import GF, QQ
from jointkit.generators import check_multijoint_grid
from jointkit.incidence import LineFamily, find_multijoints
from jointkit.mpoly import MultiPoly, hasse_value, multiplicity, random_poly
from jointkit.vanishing import (
    PlaneTransverse,
    PointOrder,
    VanishingError,
    VanishingSpec,
    build_conditions,
    exceptional_plane_direct,
    exceptional_plane_test,
    hyperplane_bound,
    line_root_accounting,
    min_degree_annihilator,
    minimal_line_derivative,
    multijoint_dichotomy,
    point_spec,
    verify_vanishing,
)


def test_collinear_points_give_a_line():
    D, p = min_degree_annihilator(point_spec(QQ, [(0, 0), (1, 1), (2, 2)]), 5)
    assert D == 1
    assert all(p.evaluate(x) == 0 for x in [(0, 0), (1, 1), (2, 2)])


def test_degree_is_minimal_and_kernel_vector_works():
    rng = random.Random(0)
    F = GF(101)
    pts = {(rng.randrange(101), rng.randrange(101)) for _ in range(10)}
    spec = point_spec(F, pts)
    D, p = min_degree_annihilator(spec, 8)
    assert verify_vanishing(p, spec).ok
    assert p.degree <= D
    # 10 generic points in the plane: degree 3 has 10 monomials, so D is 3 or 4
    assert D in (3, 4)
    cm = build_conditions(spec, D - 1)
    from jointkit import linalg

    assert linalg.rank(cm.rows, F) == len(cm.columns)


def test_point_order_rows():
    spec = VanishingSpec(QQ, 2, (PointOrder((1, 2), 2),))
    cm = build_conditions(spec, 3)
    assert cm.shape == (3, 10)
    D, p = min_degree_annihilator(spec, 4)
    assert D == 2 and multiplicity(p, (1, 2)) >= 2


def test_empty_spec():
    D, p = min_degree_annihilator(VanishingSpec(QQ, 3, ()), 3)
    assert D == 0 and p == 1


def test_spec_json_round_trip():
    F = GF(11)
    P = plane(F, [0, 0, 0], [[1, 0, 0], [0, 1, 0]])
    H = line(F, [0, 0, 0], [1, 1, 0])
    spec = VanishingSpec(F, 3, (PointOrder((1, 2, 3), 2), PlaneTransverse(H, P, ((0, 0, 1),), 1)))
    assert VanishingSpec.from_json(spec.to_json()) == spec


def test_plane_constraint_validation():
    F = QQ
    P = plane(F, [0, 0, 0], [[1, 0, 0], [0, 1, 0]])
    with pytest.raises(GeometryError):
        PlaneTransverse(line(F, [0, 0, 1], [1, 0, 0]), P, ((0, 0, 1),), 0)
    with pytest.raises(GeometryError):
        PlaneTransverse(line(F, [0, 0, 0], [1, 0, 0]), P, ((1, 1, 0),), 0)


def test_plane_constraint_satisfied_identically():
    F = GF(101)
    P = plane(F, [0, 0, 0], [[1, 0, 0], [0, 1, 0]])
    H = line(F, [0, 0, 0], [1, 2, 0])
    spec = VanishingSpec(F, 3, (PlaneTransverse(H, P, ((0, 0, 1),), 1),))
    D, p = min_degree_annihilator(spec, 6)
    assert verify_vanishing(p, spec).ok
    # independently: p and its first z-derivative vanish along the whole line
    for t in range(20):
        x = H.point_at([t])
        assert p.evaluate(x) == 0
        assert hasse_value(p, (0, 0, 1), x) == 0


def test_small_field_and_cap():
    spec = point_spec(GF(3), [(0, 0)])
    P = plane(GF(3), [0, 0, 0], [[1, 0, 0], [0, 1, 0]])
    spec2 = VanishingSpec(GF(3), 3, (PlaneTransverse(line(GF(3), [0, 0, 0], [1, 0, 0]), P, ((0, 0, 1),), 0),))
    with pytest.raises(VanishingError):
        build_conditions(spec2, 3)
    with caps_override(max_degree=2):
        with pytest.raises(CapExceeded):
            build_conditions(spec, 3)


def test_budget_exhausted():
    pts = [(a, b) for a in range(4) for b in range(4)]
    with pytest.raises(VanishingError):
        min_degree_annihilator(point_spec(QQ, pts), 2)


def test_minimal_line_derivative():
    F = QQ
    x, y, z = MultiPoly.gens(F, 3)
    zline = line(F, [0, 0, 0], [0, 0, 1])
    xline = line(F, [0, 0, 0], [1, 0, 0])
    assert minimal_line_derivative(z, xline)[0] == 1
    assert minimal_line_derivative(z**2 + z * x, xline)[0] == 1
    assert minimal_line_derivative(z**2, xline)[0] == 2
    assert minimal_line_derivative(x, zline)[0] == 1
    assert minimal_line_derivative(x + z, zline)[0] == 0


def test_line_root_accounting():
    F = QQ
    x, y, z = MultiPoly.gens(F, 3)
    p = z * (z - 1) * (z - 2)
    l = line(F, [0, 0, 0], [0, 0, 1])
    acc = line_root_accounting(p, l, [((0, 0, 0), 1), ((0, 0, 1), 1)])
    assert acc.ok and acc.total == 2 and acc.deg_q == 3
    bad = line_root_accounting(p, l, [((0, 0, 0), 2)])
    assert not bad.ok


def test_exceptional_routes_agree():
    rng = random.Random(3)
    F = GF(101)
    P = plane(F, [1, 0, 0], [[1, 1, 0], [0, 1, 1]])
    nu = ((0, 0, 1),)
    for _ in range(30):
        p = random_poly(F, 3, 4, 6, rng)
        h = MultiPoly.linear_form(F, [1, -1, 1], -1)  # vanishes on P
        p = p * h ** rng.randint(0, 3)
        for A in range(4):
            assert exceptional_plane_test(p, P, nu, A) == exceptional_plane_direct(p, P, nu, A)


def test_hyperplane_bound():
    F = QQ
    x, y, z = MultiPoly.gens(F, 3)
    p = z * (z - 1) * (x + y)
    hs = [plane(F, [0, 0, c], [[1, 0, 0], [0, 1, 0]]) for c in range(4)]
    hs.append(plane(F, [0, 0, 0], [[1, -1, 0], [0, 0, 1]]))
    rep = hyperplane_bound(p, hs)
    assert rep["count"] == 3 and rep["ok"]


def test_dichotomy_on_grids():
    for n, N, A in [(3, 2, 0), (3, 2, 1), (4, 2, 0)]:
        planes, fams, mj, _ = check_multijoint_grid(n, 2, N, GF(10007))
        rep = multijoint_dichotomy(planes, fams, mj, A)
        assert rep.unclassified == 0 and not rep.violations
        assert rep.type1 + rep.exceptional == len(mj)


def _random_config(rng, F):
    planes, lines = [], []
    for _ in range(rng.randint(1, 3)):
        try:
            P = plane(F, [rng.randrange(5) for _ in range(3)], [[rng.randrange(-2, 3) for _ in range(3)] for _ in range(2)])
        except GeometryError:
            continue
        planes.append(P)
        for _ in range(rng.randint(1, 3)):
            try:
                lines.append(line(F, P.point_at([rng.randrange(5), rng.randrange(5)]), [rng.randrange(-2, 3) for _ in range(3)]))
            except GeometryError:
                pass
    return list(dict.fromkeys(planes)), list(dict.fromkeys(lines))


def test_dichotomy_reaches_both_branches():
    F = GF(101)
    rng = random.Random(0)
    seen_type1 = seen_exc = 0
    for _ in range(70):
        planes, lines = _random_config(rng, F)
        if not planes or not lines:
            continue
        fam = LineFamily.from_lines(lines, field=F, n=3)
        mj = find_multijoints(planes, [fam])
        if not mj:
            continue
        A, B = rng.randint(0, 1), rng.randint(1, 2)
        rep = multijoint_dichotomy(planes, [fam], mj, A, B)
        assert rep.unclassified == 0 and not rep.violations
        assert rep.type1 + rep.exceptional == len(mj)
        assert all(e["ok"] for e in rep.line_accounting + rep.plane_accounting)
        seen_type1 += rep.type1
        seen_exc += rep.exceptional
    assert seen_type1 and seen_exc
