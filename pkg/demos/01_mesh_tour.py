"""Tour of the periodic meshes: entity counts, charts, face orientation.

Run:  python3 demos/01_mesh_tour.py
"""

from fractions import Fraction

from derham import MeshKind, build_mesh

for kind in (MeshKind.TRIANGULAR, MeshKind.CARTESIAN):
    mesh = build_mesh(kind, 3, 2, lx=Fraction(3, 2), ly=Fraction(1))
    print(f"-- {kind.value} 3x2 torus, lx=3/2 ly=1")
    print(f"   cells={mesh.num_cells} faces={mesh.num_faces} points={mesh.num_points}"
          f" euler={mesh.euler_characteristic}")

    # every face stores an unnormalized normal: the +90 degree rotation of
    # its chord, so |normal|^2 equals the squared face length and jump terms
    # against it reproduce arc-length integrals with rational numbers only
    by_kind = {}
    for face in mesh.faces:
        by_kind.setdefault(face.kind, face)
    for label, face in sorted(by_kind.items()):
        print(f"   {label:4s} face: chord={face.chord} normal={face.normal}")

    total = sum(c.measure for c in mesh.cells)
    print(f"   sum of cell measures = {total} (torus area {Fraction(3, 2) * 1})")
    print()

# grids must wrap around in both directions, so 2 cells per direction minimum
try:
    build_mesh(MeshKind.CARTESIAN, 1, 3)
except ValueError as exc:
    print(f"1x3 grid rejected: {exc}")
