"""Periodic mesh combinatorics and orientation conventions."""

from fractions import Fraction

import pytest

from derham.mesh import MeshKind, build_mesh, entity_counts

F = Fraction

FROZEN_COUNTS = [
    (MeshKind.TRIANGULAR, 2, 2, (8, 12, 4)),
    (MeshKind.TRIANGULAR, 3, 2, (12, 18, 6)),
    (MeshKind.CARTESIAN, 2, 2, (4, 8, 4)),
    (MeshKind.CARTESIAN, 3, 2, (6, 12, 6)),
    (MeshKind.CARTESIAN, 5, 4, (20, 40, 20)),
]


@pytest.mark.parametrize("kind,nx,ny,expected", FROZEN_COUNTS)
def test_frozen_entity_counts(kind, nx, ny, expected):
    mesh = build_mesh(kind, nx, ny)
    assert (mesh.num_cells, mesh.num_faces, mesh.num_points) == expected
    assert entity_counts(kind, nx, ny) == expected


@pytest.mark.parametrize("kind", [MeshKind.TRIANGULAR, MeshKind.CARTESIAN])
@pytest.mark.parametrize("nx", range(2, 6))
@pytest.mark.parametrize("ny", range(2, 6))
def test_counts_match_closed_forms(kind, nx, ny):
    mesh = build_mesh(kind, nx, ny)
    base = nx * ny
    if kind is MeshKind.TRIANGULAR:
        expected = (2 * base, 3 * base, base)
    else:
        expected = (base, 2 * base, base)
    assert (mesh.num_cells, mesh.num_faces, mesh.num_points) == expected
    assert mesh.euler_characteristic == 0


@pytest.mark.parametrize("bad", [(0, 2), (1, 3), (2, 1), (-2, 2)])
def test_grid_count_validation(bad):
    with pytest.raises(ValueError):
        build_mesh(MeshKind.CARTESIAN, *bad)


def test_grid_counts_must_be_integers():
    with pytest.raises(TypeError):
        build_mesh(MeshKind.TRIANGULAR, 2.5, 2)


@pytest.mark.parametrize("kind", [MeshKind.TRIANGULAR, MeshKind.CARTESIAN])
def test_face_normals_are_rotated_chords(kind):
    mesh = build_mesh(kind, 3, 2, F(3, 2), F(5, 7))
    hx, hy = F(3, 2) / 3, F(5, 7) / 2
    for face in mesh.faces:
        d, n = face.chord, face.normal
        assert n == (-d[1], d[0])
        assert n[0] * d[0] + n[1] * d[1] == 0
        assert n[0] ** 2 + n[1] ** 2 == face.length_sq
        if face.kind == "x":
            assert n == (hy, 0)
        elif face.kind == "y":
            assert n == (0, hx)
        else:
            assert n == (-hy, hx)


@pytest.mark.parametrize("kind", [MeshKind.TRIANGULAR, MeshKind.CARTESIAN])
def test_faces_lie_on_reference_edges(kind):
    # both charts must carry the face onto one full edge of their reference
    # cell; the trace machinery relies on this.
    mesh = build_mesh(kind, 2, 3, F(2), F(1, 3))
    for face in mesh.faces:
        for side in ("left", "right"):
            cell = mesh.cells[face.cell_on(side)]
            a = cell.to_ref_point(face.start_in_chart(side))
            d = cell.to_ref_vector(face.chord)
            b = (a[0] + d[0], a[1] + d[1])
            matched = [
                edge for edge in cell.ref.edges
                if {edge.start, edge.end} == {a, b}
            ]
            assert len(matched) == 1


@pytest.mark.parametrize("kind", [MeshKind.TRIANGULAR, MeshKind.CARTESIAN])
def test_each_cell_bounded_by_expected_faces(kind):
    mesh = build_mesh(kind, 4, 3)
    incidence = {c.index: 0 for c in mesh.cells}
    for face in mesh.faces:
        assert face.left != face.right  # periodic seams still separate cells
        incidence[face.left] += 1
        incidence[face.right] += 1
    per_cell = 3 if kind is MeshKind.TRIANGULAR else 4
    assert all(count == per_cell for count in incidence.values())


def test_cell_charts_have_positive_orientation():
    for kind in (MeshKind.TRIANGULAR, MeshKind.CARTESIAN):
        mesh = build_mesh(kind, 2, 2, F(5, 3), F(7, 11))
        total = sum(c.measure for c in mesh.cells)
        assert all(c.jac > 0 for c in mesh.cells)
        assert total == F(5, 3) * F(7, 11)


def test_wrap_point():
    mesh = build_mesh(MeshKind.CARTESIAN, 2, 2, F(2), F(3))
    assert mesh.wrap_point((F(5, 2), F(-1))) == (F(1, 2), F(2))
    assert mesh.wrap_point((F(2), F(3))) == (F(0), F(0))


def test_summary_schema():
    info = build_mesh(MeshKind.TRIANGULAR, 2, 2).summary()
    assert info["schema"] == 1
    assert info["kind"] == "triangular"
    for key in ("nx", "ny", "cells", "faces", "points", "euler_characteristic"):
        assert key in info
