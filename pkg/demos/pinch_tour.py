"""Build a few pinches and watch the duality search succeed or fail.

Run with ``python3 demos/pinch_tour.py``.
"""

from pinchlab import b_left, b_right, n_pinch, pinch_projection_hom
from pinchlab.catalog import K2, LOOP, PT
from pinchlab.duality import duality_upto
from pinchlab.solver import find_hom

for n in range(1, 6):
    p = n_pinch(K2, n)
    r, l = b_right(p), b_left(p)
    print(f"P_{n}(K2): {p.size} elements, B_R {r.structure.size}, B_L {l.structure.size}")

p = n_pinch(K2, 3)
print("\nclass labels of P_3(K2), left end first:")
for e in sorted(range(p.size), key=lambda e: (p.iota[e], str(p.label(e)))):
    print(" ", e, p.label(e))

# both sides fold back onto the template, the whole pinch does not
for side in "RL":
    h = pinch_projection_hom(p, side)
    print(f"B_{side} -> K2 valid: {h.is_valid()}")
print("P_3(K2) -> K2:", find_hom(p.underlying, K2))

print()
for tpl in (LOOP, PT, K2):
    print(f"{tpl.name:>4}: {duality_upto(tpl, 8)}")
