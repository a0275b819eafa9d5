# joints, levels and Kakeya-type ratios on the standard configurations
from fractions import Fraction

from jointkit.field import GF
from jointkit.generators import axis_grid, bush, ff_kakeya_ratio, finite_field_counterexample
from jointkit.incidence import dyadic_levels, find_joints, good_set_ratio, kakeya_sum

# axis grid: N^3 joints, each on 3 lines, ratio exactly 1
for N in range(2, 6):
    fam = axis_grid(3, N)
    J = find_joints(fam)
    print("grid", N, len(fam), len(J), kakeya_sum(J, Fraction(3, 2), len(fam)).ratio)

# a bush: many lines through one point, one of them off the plane
fam = bush(6, add_transverse=True)
(j,) = find_joints(fam)
print("bush", j.point, j.m, j.N)  # N counts ordered spanning triples

# over F_p the ratio keeps growing with p
for p in (3, 5, 7, 11):
    fam = finite_field_counterexample(p)
    J = find_joints(fam, with_multiplicity=False)
    r = kakeya_sum(J, "3/2", len(fam)).ratio
    print("F_%d" % p, len(fam), len(J), J[0].m, round(r, 4), round(ff_kakeya_ratio(p), 4))

# dyadic levels and the good-level sum
fam = finite_field_counterexample(7)
J = find_joints(fam)
print({k: len(v) for k, v in dyadic_levels(J).items()}, good_set_ratio(J, len(fam)))

# the same grid over a small prime field
print(len(find_joints(axis_grid(3, 4, GF(5)))))
