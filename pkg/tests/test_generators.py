import pytest

from jointkit.field import GF, QQ, FieldError
from jointkit.generators import (
    axis_grid,
    axis_grid_descriptor,
    bush,
    bush_descriptor,
    check_multijoint_grid,
    ff_descriptor,
    ff_kakeya_ratio,
    finite_field_counterexample,
    loomis_whitney_grid,
    random_lines,
    self_check,
)
from jointkit.incidence import find_joints, kakeya_sum
from oracles import brute_joints


@pytest.mark.parametrize("n,N", [(2, 3), (3, 1), (3, 4), (4, 2)])
def test_axis_grid_counts(n, N):
    fam = axis_grid(n, N)
    self_check(axis_grid_descriptor(n, N), fam)


@pytest.mark.parametrize("M,cop,tr", [(4, True, False), (5, True, True), (6, False, False), (6, False, True)])
def test_bush_counts(M, cop, tr):
    self_check(bush_descriptor(M, cop, tr), bush(M, coplanar=cop, add_transverse=tr))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_ff_counterexample_against_scan(p):
    fam = finite_field_counterexample(p)
    self_check(ff_descriptor(p), fam)
    scan = brute_joints(fam)
    assert len(scan) == p * p and set(scan.values()) == {p + 2}


def test_ff_ratio_closed_form():
    for p in (3, 5, 7):
        fam = finite_field_counterexample(p)
        r = kakeya_sum(find_joints(fam, with_multiplicity=False), "3/2", len(fam)).ratio
        assert r == pytest.approx(ff_kakeya_ratio(p))
    assert ff_kakeya_ratio(11) > ff_kakeya_ratio(7)
    with pytest.raises(FieldError):
        finite_field_counterexample(9)


def test_loomis_whitney_hint_covers_everything():
    fam, hint = loomis_whitney_grid(3)
    assert len(hint.planes) == 3
    assert sorted(x for js in hint.joints for x in js) == sorted(j.point for j in find_joints(fam))
    for P, ids in zip(hint.planes, hint.lines):
        assert len(ids) == 6 and all(P.contains(fam.by_id(i).x0) for i in ids)


def test_random_lines_deterministic():
    a = random_lines(3, 20, GF(7), 42)
    b = random_lines(3, 20, GF(7), 42)
    assert list(a) == list(b)
    assert list(random_lines(3, 20, QQ, 1)) != list(random_lines(3, 20, QQ, 2))
    with pytest.raises(FieldError):
        random_lines(2, 100, GF(2), 0)


def test_multijoint_grid():
    planes, fams, mj, desc = check_multijoint_grid(4, 2, 2, GF(5))
    assert len(mj) == 16 and all(r.N == 1 for r in mj)


def test_field_too_small():
    with pytest.raises(FieldError):
        axis_grid(3, 4, GF(3))
    with pytest.raises(FieldError):
        bush(6, field=GF(5))
