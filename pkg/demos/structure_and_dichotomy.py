# planar structure certificates, zero-set censuses and the multijoint dichotomy
from fractions import Fraction

from jointkit.field import GF, QQ
from jointkit.generators import bush, check_multijoint_grid, loomis_whitney_grid
from jointkit.incidence import find_joints
from jointkit.mpoly import MultiPoly
from jointkit.vanishing import min_degree_annihilator, multijoint_dichotomy, point_spec
from jointkit.zeroset import (
    FactoredVariety,
    PlanePartition,
    factor_intersection_line,
    line_census,
    per_plane_kakeya_report,
    planar_structure_search,
    planar_structure_verify,
)

half = Fraction(1, 2)

# the 3D grid split into horizontal planes has planar structure
fam, hint = loomis_whitney_grid(3)
J = find_joints(fam)
cert = planar_structure_verify(J, fam, PlanePartition.from_hint(hint), half)
print(cert.accepted, cert.incidences_total, cert.incidences_assigned)
print(per_plane_kakeya_report(cert, fam)["planes"][0])

# the search finds it too, but not for a bush in general position
print(planar_structure_search(J, fam, half).best_c1)
b = bush(10, coplanar=False)
res = planar_structure_search(find_joints(b), b, half)
print(res.success, res.best_c1, res.blocking[:1])

# lowest degree polynomial through some points
D, p = min_degree_annihilator(point_spec(GF(101), [(1, 2), (3, 4), (5, 7), (9, 1), (4, 4)]), 5)
print(D, p)

# a product of planes: every pairwise intersection line is critical
x, y, z = MultiPoly.gens(QQ, 3)
forms = [x, y, z, x + y + z - 1]
V = FactoredVariety(forms)
lines = [factor_intersection_line(f, g) for i, f in enumerate(forms) for g in forms[i + 1:]]
rep = line_census(V, lines)
print(rep.critical, rep.critical_bound, rep.ok)

# every multijoint of a grid is type 1 or sits on an exceptional plane
planes, fams, mj, _ = check_multijoint_grid(3, 2, 3, GF(10007))
r = multijoint_dichotomy(planes, fams, mj, A=1)
print(len(mj), r.D, r.type1, r.exceptional, r.unclassified)
