import itertools
import random
from fractions import Fraction

import pytest

from jointkit import linalg
from jointkit.affine import GeometryError, line, plane
from jointkit.caps import CapExceeded, caps_override
from jointkit.field import GF, QQ
from jointkit.generators import axis_grid, bush, random_lines
from jointkit.incidence import (
    LineFamily,
    classify_levels,
    dyadic_level,
    dyadic_levels,
    find_joints,
    find_multijoints,
    incidence_count,
    joints_report,
    kakeya_sum,
    st_incidences,
)
from oracles import brute_joints


def _ordered_spanning_tuples(family, x):
    F, n = family.field, family.n
    dirs = [l.direction for _, l in family if l.contains(x)]
    return sum(1 for t in itertools.permutations(dirs, n) if linalg.rank([list(d) for d in t], F) == n)


def test_joints_match_brute_force_scan():
    F = GF(5)
    for seed in range(12):
        fam = random_lines(3, 4 + seed % 9, F, seed)
        found = {j.point: j.m for j in find_joints(fam)}
        assert found == brute_joints(fam)


def test_joints_on_planted_config_match_brute_force():
    F = GF(5)
    fam = LineFamily.from_lines(list(axis_grid(3, 3, F).lines) + list(bush(4, (4, 4, 4), field=F, add_transverse=True).lines))
    found = {j.point: j.m for j in find_joints(fam)}
    assert found == brute_joints(fam)
    assert len(found) == 28


def test_tuple_multiplicity_matches_enumeration():
    fam = LineFamily.from_lines(list(bush(5, coplanar=True, add_transverse=True).lines))
    (j,) = find_joints(fam)
    assert j.N == _ordered_spanning_tuples(fam, j.point) == 60
    for jr in find_joints(axis_grid(3, 2)):
        assert jr.N == 6


def test_permutation_invariance():
    F = GF(7)
    fam = random_lines(3, 30, F, 3)
    base = [(j.point, j.m, j.N) for j in find_joints(fam)]
    lines = [l for _, l in fam]
    rng = random.Random(1)
    for _ in range(3):
        rng.shuffle(lines)
        again = [(j.point, j.m, j.N) for j in find_joints(LineFamily.from_lines(lines))]
        assert again == base


def test_tuple_cap_raises():
    fam = bush(10, coplanar=False)
    with pytest.raises(CapExceeded):
        find_joints(fam, max_tuples=5)


def test_line_cap_and_duplicates():
    l = line(QQ, [0, 0, 0], [1, 0, 0])
    with pytest.raises(GeometryError):
        LineFamily.from_lines([l, line(QQ, [5, 0, 0], [2, 0, 0])])
    with caps_override(max_lines=3):
        with pytest.raises(CapExceeded):
            axis_grid(3, 2)


def test_no_joints_in_a_plane():
    fam = bush(6, coplanar=True)
    assert find_joints(fam) == []


def test_kakeya_sum_exponent_one_is_incidences():
    fam = axis_grid(3, 3)
    J = find_joints(fam)
    ks = kakeya_sum(J, 1, len(fam))
    assert ks.total == incidence_count(J) == 81
    with pytest.raises(ValueError):
        kakeya_sum(J, 0, len(fam))


def test_axis_grid_kakeya_ratio_is_one():
    for N in range(1, 5):
        fam = axis_grid(3, N)
        assert kakeya_sum(find_joints(fam), Fraction(3, 2), len(fam)).ratio == pytest.approx(1.0)


def test_tuple_bound():
    fam = random_lines(3, 25, GF(3), 4)
    for j in find_joints(fam):
        assert 1 <= j.N <= j.m**3


def test_levels_partition_joints():
    fam = LineFamily.from_lines(list(axis_grid(3, 2).lines) + list(bush(9, (7, 7, 7), coplanar=False).lines))
    J = find_joints(fam)
    table = dyadic_levels(J)
    assert sum(len(v) for v in table.values()) == len(J)
    for k, js in table.items():
        assert all(k <= j.m < 2 * k for j in js)
    assert [dyadic_level(m) for m in (1, 2, 3, 4, 7, 8)] == [1, 2, 2, 4, 4, 8]


def test_classify_levels_exact_boundary():
    # |J_k| k^{15/8} = C L^{3/2} exactly: 1 * 16^{15/8} = 2^{15/2}; L = 32 gives 2^{15/2}
    verdicts = classify_levels({16: 1}, 32, eps=Fraction(1, 4), C=1, c=1)
    assert verdicts[16].good
    verdicts = classify_levels({16: 2}, 32, eps=Fraction(1, 4), C=1, c=1)
    assert not verdicts[16].good
    assert classify_levels({4: 1}, 16, c=1)[4].large is False
    assert classify_levels({8: 1}, 16, c=1)[8].large is True
    with pytest.raises(ValueError):
        classify_levels({1: 1}, 4, eps=Fraction(1, 2))


def test_st_incidences():
    F = QQ
    P = plane(F, [0, 0, 0], [[1, 0, 0], [0, 1, 0]])
    lines = [line(F, [0, c, 0], [1, 0, 0]) for c in range(3)] + [line(F, [c, 0, 0], [0, 1, 0]) for c in range(3)]
    pts = [(a, b, 0) for a in range(3) for b in range(3)]
    rep = st_incidences(P, pts, lines)
    assert rep.incidences == 18 and rep.levels == {2: 9}
    with pytest.raises(GeometryError):
        st_incidences(P, [(0, 0, 1)], lines)


def test_multijoints_simple():
    F = QQ
    P = plane(F, [0, 0, 0], [[1, 0, 0], [0, 1, 0]])
    z = LineFamily.from_lines([line(F, [0, 0, 0], [0, 0, 1]), line(F, [1, 0, 0], [1, 0, 0])])
    mj = find_multijoints([P], [z])
    assert [r.point for r in mj] == [(0, 0, 0)]


def test_report_shape():
    fam = axis_grid(3, 2)
    rep = joints_report(fam, find_joints(fam))
    assert rep["L"] == 12 and len(rep["joints"]) == 8 and rep["levels"] == {"2": 8}
    assert rep["kakeya"]["s"] == "3/2"
