"""Reference-cell structure theory: boundary map, bubbles, decomposition.

Every divergence-free member of the cellwise vector families splits uniquely
into a zero-trace bubble, one trace mode per (edge, Legendre order 1..k), and
a flat part fixed by the mean edge fluxes.  The splitting below is computed
and re-assembled exactly.

Run:  python3 demos/04_reference_decomposition.py
"""

import random

from derham import (
    RefCell,
    boundary_curl_map,
    bubble_basis,
    decompose_divfree,
    random_divfree,
)

for ref, family in ((RefCell.TRIANGLE, "vec_p"), (RefCell.SQUARE, "vec_qdiv")):
    print(f"-- {ref.name.lower()} cell, family {family}")
    for k in range(4):
        bm = boundary_curl_map(ref, k)
        bub = bubble_basis(family, k)
        print(f"   k={k}: boundary map rank {bm.rank}, kernel {len(bm.kernel)},"
              f" bubbles {bub.dim}")
    print()

rng = random.Random(2024)
u = random_divfree("vec_qdiv", 2, rng)
d = decompose_divfree(u, "vec_qdiv", 2)
print("random div-free field on the square at k=2:")
print(f"  bubble part zero:  {d.bubble.is_zero}")
print(f"  flat coefficients: {d.flat_coeffs}")
nonzero = [(m.edge, m.order, m.coefficient) for m in d.modes if m.coefficient]
print(f"  active edge modes: {len(nonzero)} of {len(d.modes)}")
print(f"  exact reconstruction: {(d.reconstruct() - u).is_zero}")
print(f"  residual zero: {d.residual.is_zero}")
