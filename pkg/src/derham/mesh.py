"""Periodic structured meshes of the 2-torus [0,Lx) x [0,Ly).

Two kinds: a Cartesian grid of axis-aligned rectangles, and its triangulation
where every grid cell is split along the low-left -> up-right diagonal.  All
geometry is exact rational.  Entity numbering is a pure function of
(kind, nx, ny): cells row-major (triangles: lower then upper within a grid
cell), faces x-normal block, then y-normal block, then diagonals, points
row-major on the grid lattice.

Face orientation: the stored unnormalized normal is the +90 degree rotation
of P->Q and has the same length as the face, so line integrals of normal
components reduce to exact integrals in the chord parameter t.  The right
cell of a face is the one the normal points into.  Faces on the periodic seam
carry per-side chart offsets so each incident cell sees the face inside its
own coordinate chart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable

from .poly import AffineMap, RefCell

__all__ = ["MeshKind", "Cell", "Face", "Mesh", "build_mesh", "entity_counts"]


class MeshKind(Enum):
    TRIANGULAR = "triangular"
    CARTESIAN = "cartesian"


def entity_counts(kind: MeshKind, nx: int, ny: int) -> tuple[int, int, int]:
    """Closed-form (cells, faces, points) for a periodic mesh."""
    if kind is MeshKind.TRIANGULAR:
        n = 2 * nx * ny
        return n, 3 * n // 2, n // 2
    n = nx * ny
    return n, 2 * n, n


@dataclass(frozen=True)
class Cell:
    """Mesh cell: reference kind plus the affine chart map F(ref) = physical."""

    index: int
    ref: RefCell
    fmap: AffineMap
    inv: AffineMap = field(repr=False)

    @property
    def jac(self) -> Fraction:
        return abs(self.fmap.det())

    @property
    def measure(self) -> Fraction:
        area = Fraction(1, 2) if self.ref is RefCell.TRIANGLE else Fraction(1)
        return self.jac * area

    @property
    def m_inv(self):
        return self.inv.m

    def to_ref_point(self, pt):
        return self.inv.apply(pt)

    def to_ref_vector(self, vec):
        return self.inv.apply_vector(vec)


@dataclass(frozen=True)
class Face:
    """Oriented mesh face between a left and a right cell.

    ``p`` and ``q`` are the canonical endpoints (in the left cell's chart);
    ``normal`` is the +90 degree rotation of q - p, unnormalized.  The
    ``offset_*`` vectors translate p, q into each incident cell's chart
    (nonzero only across the periodic seam).
    """

    index: int
    kind: str  # "x", "y" or "diag"
    p: tuple[Fraction, Fraction]
    q: tuple[Fraction, Fraction]
    left: int
    right: int
    offset_left: tuple[Fraction, Fraction]
    offset_right: tuple[Fraction, Fraction]

    @property
    def chord(self) -> tuple[Fraction, Fraction]:
        return (self.q[0] - self.p[0], self.q[1] - self.p[1])

    @property
    def normal(self) -> tuple[Fraction, Fraction]:
        d = self.chord
        return (-d[1], d[0])

    @property
    def length_sq(self) -> Fraction:
        d = self.chord
        return d[0] * d[0] + d[1] * d[1]

    def start_in_chart(self, side: str) -> tuple[Fraction, Fraction]:
        off = self.offset_left if side == "left" else self.offset_right
        return (self.p[0] + off[0], self.p[1] + off[1])

    def cell_on(self, side: str) -> int:
        return self.left if side == "left" else self.right


class Mesh:
    """Periodic mesh with exact rational geometry."""

    def __init__(self, kind: MeshKind, nx: int, ny: int, lx: Fraction, ly: Fraction,
                 cells: list[Cell], faces: list[Face], points: list[tuple[Fraction, Fraction]]):
        self.kind = kind
        self.nx = nx
        self.ny = ny
        self.lx = lx
        self.ly = ly
        self.cells = cells
        self.faces = faces
        self.points = points

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def num_points(self) -> int:
        return len(self.points)

    @property
    def euler_characteristic(self) -> int:
        return self.num_points - self.num_faces + self.num_cells

    def wrap_point(self, pt) -> tuple[Fraction, Fraction]:
        """Reduce a point into [0,lx) x [0,ly), exactly."""
        x, y = Fraction(pt[0]), Fraction(pt[1])
        return (x - (x // self.lx) * self.lx, y - (y // self.ly) * self.ly)

    def summary(self) -> dict:
        return {
            "schema": 1,
            "kind": self.kind.value,
            "nx": self.nx,
            "ny": self.ny,
            "lx": str(self.lx),
            "ly": str(self.ly),
            "cells": self.num_cells,
            "faces": self.num_faces,
            "points": self.num_points,
            "euler_characteristic": self.euler_characteristic,
        }

    def __repr__(self) -> str:
        return f"Mesh({self.kind.value}, {self.nx}x{self.ny}, cells={self.num_cells})"


def _cell(index: int, ref: RefCell, m, o) -> Cell:
    fmap = AffineMap.make(m, o)
    return Cell(index, ref, fmap, fmap.inverse())


def build_mesh(kind: MeshKind, nx: int, ny: int, lx=1, ly=1) -> Mesh:
    """Build a periodic mesh; requires nx, ny >= 2 so no face is self-adjacent."""
    if not isinstance(nx, int) or not isinstance(ny, int):
        raise TypeError("nx and ny must be integers")
    if nx < 2 or ny < 2:
        raise ValueError("periodic meshes need nx >= 2 and ny >= 2")
    lx = Fraction(lx)
    ly = Fraction(ly)
    if lx <= 0 or ly <= 0:
        raise ValueError("periods must be positive")
    hx = lx / nx
    hy = ly / ny

    points = [(i * hx, j * hy) for j in range(ny) for i in range(nx)]

    if kind is MeshKind.CARTESIAN:
        cells = [
            _cell(j * nx + i, RefCell.SQUARE, ((hx, 0), (0, hy)), (i * hx, j * hy))
            for j in range(ny)
            for i in range(nx)
        ]
        grid = lambda i, j: j * nx + i  # noqa: E731
        west_of_face = grid
        east_of_face = lambda i, j: grid((i + 1) % nx, j)  # noqa: E731
        south_of_face = grid
        north_of_face = lambda i, j: grid(i, (j + 1) % ny)  # noqa: E731
    elif kind is MeshKind.TRIANGULAR:
        cells = []
        for j in range(ny):
            for i in range(nx):
                base = 2 * (j * nx + i)
                o = (i * hx, j * hy)
                # lower: (i,j) -> (i+1,j) -> (i+1,j+1); upper: (i,j) -> (i+1,j+1) -> (i,j+1)
                cells.append(_cell(base, RefCell.TRIANGLE, ((hx, hx), (0, hy)), o))
                cells.append(_cell(base + 1, RefCell.TRIANGLE, ((hx, 0), (hy, hy)), o))
        lower = lambda i, j: 2 * (j * nx + i)  # noqa: E731
        upper = lambda i, j: 2 * (j * nx + i) + 1  # noqa: E731
        west_of_face = lower
        east_of_face = lambda i, j: upper((i + 1) % nx, j)  # noqa: E731
        south_of_face = upper
        north_of_face = lambda i, j: lower(i, (j + 1) % ny)  # noqa: E731
    else:
        raise ValueError(f"unknown mesh kind: {kind!r}")

    faces: list[Face] = []
    zero = (Fraction(0), Fraction(0))
    # x-normal faces: east face of grid cell (i,j); P->Q points down so the
    # +90 degree rotation gives normal (+hy, 0)
    for j in range(ny):
        for i in range(nx):
            x = (i + 1) * hx
            p, q = (x, (j + 1) * hy), (x, j * hy)
            off_right = (-lx, Fraction(0)) if i == nx - 1 else zero
            faces.append(Face(len(faces), "x", p, q, west_of_face(i, j),
                              east_of_face(i, j), zero, off_right))
    # y-normal faces: north face of grid cell (i,j); P->Q points in +x
    for j in range(ny):
        for i in range(nx):
            y = (j + 1) * hy
            p, q = (i * hx, y), ((i + 1) * hx, y)
            off_right = (Fraction(0), -ly) if j == ny - 1 else zero
            faces.append(Face(len(faces), "y", p, q, south_of_face(i, j),
                              north_of_face(i, j), zero, off_right))
    # diagonal faces, triangulation only: low-left -> up-right inside each
    # grid cell; normal (-hy, hx) points into the upper triangle
    if kind is MeshKind.TRIANGULAR:
        for j in range(ny):
            for i in range(nx):
                p = (i * hx, j * hy)
                q = ((i + 1) * hx, (j + 1) * hy)
                faces.append(Face(len(faces), "diag", p, q,
                                  lower(i, j), upper(i, j), zero, zero))

    mesh = Mesh(kind, nx, ny, lx, ly, cells, faces, points)
    expected = entity_counts(kind, nx, ny)
    got = (mesh.num_cells, mesh.num_faces, mesh.num_points)
    if got != expected:
        raise AssertionError(f"entity counts {got} != closed form {expected}")
    return mesh
