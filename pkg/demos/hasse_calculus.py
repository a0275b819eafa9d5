# Hasse derivatives, directional derivatives and multiplicities
from jointkit.field import GF, QQ
from jointkit.mpoly import (
    MultiPoly,
    directional_hasse,
    expansion_weights,
    hasse_derivative,
    minimal_transverse_derivative,
    multiplicity,
    restrict_to_plane,
)

# in characteristic 5 the ordinary 5th derivative of x^5 is 0, the Hasse one is 1
F5 = GF(5)
x = MultiPoly.variable(F5, 1, 0)
print(hasse_derivative(x**5, [5]), hasse_derivative(x**7, [5]))

# directional derivative along a non-orthogonal basis
x1, x2 = MultiPoly.gens(QQ, 2)
basis = [[1, 0], [1, 1]]
print(directional_hasse(x1**2, basis, [1, 1], route="both"))  # 2, both routes agree
print(expansion_weights(QQ, basis, [1, 1]))  # the multinomial weight on D^(2,0) is 2

# multiplicity does not depend on coordinates
p = (x1 - 1) ** 2 * (x2 + x1) + (x1 - 1) ** 3
print(multiplicity(p, [1, -1]), multiplicity(p, [1, 0]))

# restrict to a plane, then look for the lowest transverse derivative alive on it
x, y, z = MultiPoly.gens(QQ, 3)
q = z**2 * (x + y) + z**3
P = ([0, 0, 0], [[1, 0, 0], [0, 1, 0]])
print(restrict_to_plane(q, P))  # 0: q vanishes on z = 0
lam, g = minimal_transverse_derivative(q, P)
print(lam, g)
