"""An odd cycle maps into a pinch even though it is not 2-colourable.

The map sends each vertex z to the class of (kappa(z), beta(z), alpha(z)),
where kappa measures the distance from x, alpha colours the cycle with x
removed and beta colours it with y removed.
"""

from pinchlab import n_pinch
from pinchlab.catalog import K2, symmetric_cycle
from pinchlab.duality import kappa_map, obstruction_to_pinch_hom
from pinchlab.solver import csp_member

c = symmetric_cycle(9)
x, y = 0, 4


def colouring_without(omit):
    order = [(omit + k) % c.size for k in range(1, c.size)]
    return {z: k % 2 for k, z in enumerate(order)}


alpha, beta = colouring_without(x), colouring_without(y)
h = obstruction_to_pinch_hom(c, x, y, alpha, beta, K2)
p = n_pinch(K2, 2)
print("kappa:", kappa_map(c, x, 2))
for z in range(c.size):
    print(f"  {z} -> {h.map[z]:2d}  {p.label(h.map[z])}")
print("valid on all", len(c.table("E")), "tuples:", h.is_valid())
print("C9 -> P_2(K2):", csp_member(c, p.underlying), "  C9 -> K2:", csp_member(c, K2))
