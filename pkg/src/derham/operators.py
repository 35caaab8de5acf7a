"""Assembly of the discrete differential operators as exact matrices.

First operators (cell-local): rotated gradient and gradient of a continuous
scalar space, expanded in a discontinuous vector space.  Second operators
(distributional): cellwise divergence/curl into the codomain's cell factor
plus inter-cell jumps of normal/tangential traces into the face factor.

Face rows hold shifted-Legendre expansion coefficients of the jump of
``u . n_f`` (respectively ``u . t_f``) taken against the *unnormalized*
normal ``n_f = rot90(Q - P)`` (tangent ``t_f = rot90(n_f)``), as functions of
the chord parameter t.  Because ``|n_f|`` equals the face length, pairing
these rows against face polynomials with the plain ``dt`` measure reproduces
the arc-length pairing exactly; no irrational lengths ever appear.

Any polynomial that fails to lie in the target space stops the assembly with
``MembershipError`` naming the offending entity; nothing is projected.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Sequence

from .exactla import solve_square
from .fespace import (
    CodomainSpace,
    ContinuousScalarSpace,
    DGVectorSpace,
    SpanError,
)
from .mesh import Face
from .poly import curl2d, divergence, grad, grad_perp, restrict_to_segment

__all__ = [
    "MembershipError",
    "OpMatrix",
    "GramMatrix",
    "assemble_grad_perp",
    "assemble_grad",
    "assemble_div_distributional",
    "assemble_curl_distributional",
    "assemble_gram",
    "adjoint",
    "load_matrix",
]

_ZERO = Fraction(0)


class MembershipError(ValueError):
    """A function left the space the diagram claims it lies in."""


class OpMatrix:
    """Sparse exact matrix with domain/codomain tags."""

    def __init__(self, nrows: int, ncols: int, domain: str = "", codomain: str = ""):
        self.nrows = nrows
        self.ncols = ncols
        self.domain = domain
        self.codomain = codomain
        self.entries: dict[tuple[int, int], Fraction] = {}

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def add(self, r: int, c: int, v: Fraction) -> None:
        if not v:
            return
        key = (r, c)
        w = self.entries.get(key, _ZERO) + v
        if w:
            self.entries[key] = w
        else:
            del self.entries[key]

    def dense_rows(self) -> list[list[Fraction]]:
        rows = [[_ZERO] * self.ncols for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def columns(self) -> list[list[Fraction]]:
        cols = [[_ZERO] * self.nrows for _ in range(self.ncols)]
        for (r, c), v in self.entries.items():
            cols[c][r] = v
        return cols

    def column(self, j: int) -> list[Fraction]:
        col = [_ZERO] * self.nrows
        for (r, c), v in self.entries.items():
            if c == j:
                col[r] = v
        return col

    def matvec(self, v: Sequence[Fraction]) -> list[Fraction]:
        out = [_ZERO] * self.nrows
        for (r, c), a in self.entries.items():
            x = v[c]
            if x:
                out[r] += a * x
        return out

    def rmatvec(self, v: Sequence[Fraction]) -> list[Fraction]:
        """Transpose times vector."""
        out = [_ZERO] * self.ncols
        for (r, c), a in self.entries.items():
            x = v[r]
            if x:
                out[c] += a * x
        return out

    def compose(self, other: "OpMatrix") -> "OpMatrix":
        """Matrix product self @ other, exact and sparse."""
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in compose")
        by_row: dict[int, list[tuple[int, Fraction]]] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out = OpMatrix(self.nrows, other.ncols, other.domain, self.codomain)
        for (r, k), a in self.entries.items():
            for c, b in by_row.get(k, ()):
                out.add(r, c, a * b)
        return out

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def export(self, path: str, meta: dict | None = None) -> None:
        """Write a MatrixMarket-style file with exact ``p/q`` entries."""
        header = {
            "schema": 1,
            "domain": self.domain,
            "codomain": self.codomain,
            "nrows": self.nrows,
            "ncols": self.ncols,
            "nnz": self.nnz,
        }
        if meta:
            header.update(meta)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("%%MatrixMarket matrix coordinate rational general\n")
            fh.write("%json " + json.dumps(header, sort_keys=True) + "\n")
            fh.write(f"{self.nrows} {self.ncols} {self.nnz}\n")
            for (r, c) in sorted(self.entries):
                v = self.entries[(r, c)]
                fh.write(f"{r + 1} {c + 1} {v.numerator}/{v.denominator}\n")

    def __repr__(self) -> str:
        return f"OpMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


def load_matrix(path: str) -> OpMatrix:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    meta = {}
    body = []
    for line in lines:
        if line.startswith("%json "):
            meta = json.loads(line[len("%json "):])
        elif line.startswith("%"):
            continue
        elif line.strip():
            body.append(line)
    nrows, ncols, nnz = (int(tok) for tok in body[0].split())
    out = OpMatrix(nrows, ncols, meta.get("domain", ""), meta.get("codomain", ""))
    for line in body[1:]:
        r, c, val = line.split()
        num, den = val.split("/")
        out.add(int(r) - 1, int(c) - 1, Fraction(int(num), int(den)))
    if out.nnz != nnz:
        raise ValueError(f"nnz mismatch reading {path}")
    return out


class GramMatrix:
    """Block-diagonal SPD Gram matrix with exact block solves."""

    def __init__(self, dim: int, space_tag: str = ""):
        self.dim = dim
        self.space_tag = space_tag
        self.blocks: list[tuple[int, list[list[Fraction]]]] = []

    def add_block(self, offset: int, rows: list[list[Fraction]]) -> None:
        self.blocks.append((offset, rows))

    def matvec(self, v: Sequence[Fraction]) -> list[Fraction]:
        out = [_ZERO] * self.dim
        for off, rows in self.blocks:
            n = len(rows)
            seg = v[off:off + n]
            for i, row in enumerate(rows):
                s = _ZERO
                for a, x in zip(row, seg):
                    if a and x:
                        s += a * x
                out[off + i] = s
        return out

    def inner(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
        gv = self.matvec(v)
        s = _ZERO
        for a, b in zip(u, gv):
            if a and b:
                s += a * b
        return s

    def solve_columns(self, cols: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
        """Solve G X = cols exactly, block by block."""
        outs = [[_ZERO] * self.dim for _ in cols]
        for off, rows in self.blocks:
            n = len(rows)
            rhs = [[col[off + i] for i in range(n)] for col in cols]
            sols = solve_square(rows, rhs)
            for j, sol in enumerate(sols):
                for i, v in enumerate(sol):
                    outs[j][off + i] = v
        return outs

    def dense_rows(self) -> list[list[Fraction]]:
        rows = [[_ZERO] * self.dim for _ in range(self.dim)]
        for off, block in self.blocks:
            for i, brow in enumerate(block):
                for j, v in enumerate(brow):
                    if v:
                        rows[off + i][off + j] = v
        return rows


def assemble_gram(space) -> GramMatrix:
    """Exact Gram matrix of a space under its L2-style inner product."""
    if isinstance(space, DGVectorSpace):
        g = GramMatrix(space.dim, space.family)
        for cell in space.mesh.cells:
            ref_gram = space.local(cell).gram_ref()
            jac = cell.jac
            g.add_block(space.offset(cell.index), [[v * jac for v in row] for row in ref_gram])
        return g
    if isinstance(space, CodomainSpace):
        g = GramMatrix(space.dim, "codomain")
        if space.cell_dim:
            for cell in space.mesh.cells:
                ref_gram = space.cell_local.gram_ref()
                jac = cell.jac
                g.add_block(space.cell_offset(cell.index), [[v * jac for v in row] for row in ref_gram])
        leg = space.legendre
        fg = [[_ZERO] * space.face_dim for _ in range(space.face_dim)]
        for i in range(space.face_dim):
            fg[i][i] = (leg[i] * leg[i]).integrate01()
        for face in space.mesh.faces:
            g.add_block(space.face_offset(face.index), fg)
        return g
    if isinstance(space, ContinuousScalarSpace):
        rows = [[_ZERO] * space.dim for _ in range(space.dim)]
        ref_gram = space.local.gram_ref()
        for cell in space.mesh.cells:
            dofs = space.cell_dofs[cell.index]
            jac = cell.jac
            for i, gi in enumerate(dofs):
                for j, gj in enumerate(dofs):
                    v = ref_gram[i][j]
                    if v:
                        rows[gi][gj] += v * jac
        g = GramMatrix(space.dim, "continuous_scalar")
        g.add_block(0, rows)
        return g
    raise TypeError(f"no Gram assembly for {type(space).__name__}")


def _assemble_first(a_space: ContinuousScalarSpace, b_space: DGVectorSpace,
                    op: Callable, name: str) -> OpMatrix:
    if a_space.mesh is not b_space.mesh:
        raise ValueError("spaces live on different meshes")
    out = OpMatrix(b_space.dim, a_space.dim, domain=f"scalar_deg{a_space.degree}",
                   codomain=f"{b_space.family}_k{b_space.k}")
    cache: dict = {}
    for cell in a_space.mesh.cells:
        key = cell.fmap.m
        if key not in cache:
            local = b_space.local(cell)
            coeffs = []
            for shape in a_space.local.elements:
                v = op(shape, cell.m_inv)
                try:
                    coeffs.append(local.expand(v))
                except SpanError as exc:
                    raise MembershipError(f"{name} on cell {cell.index}: {exc}") from exc
            cache[key] = coeffs
        base = b_space.offset(cell.index)
        for j, gidx in enumerate(a_space.cell_dofs[cell.index]):
            for i, v in enumerate(cache[key][j]):
                if v:
                    out.add(base + i, gidx, v)
    return out


def assemble_grad_perp(a_space: ContinuousScalarSpace, b_space: DGVectorSpace) -> OpMatrix:
    """Matrix of the rotated gradient (-d/dy, d/dx): scalar -> vector."""
    return _assemble_first(a_space, b_space, grad_perp, "grad_perp")


def assemble_grad(a_space: ContinuousScalarSpace, b_space: DGVectorSpace) -> OpMatrix:
    return _assemble_first(a_space, b_space, grad, "grad")


def _face_vector(face: Face, tangential: bool) -> tuple[Fraction, Fraction]:
    n = face.normal
    if tangential:
        return (-n[1], n[0])  # rot90 of the normal: reversed chord
    return n


def _assemble_second(b_space: DGVectorSpace, c_space: CodomainSpace,
                     cell_op: Callable, tangential: bool, name: str) -> OpMatrix:
    mesh = b_space.mesh
    if mesh is not c_space.mesh:
        raise ValueError("spaces live on different meshes")
    out = OpMatrix(c_space.dim, b_space.dim, domain=f"{b_space.family}_k{b_space.k}",
                   codomain=f"codomain_f{c_space.face_degree}")
    kdeg = c_space.face_degree
    leg = c_space.legendre
    leg_scale = [Fraction(2 * i + 1) for i in range(kdeg + 1)]

    cell_cache: dict = {}
    for cell in mesh.cells:
        key = cell.fmap.m
        if key not in cell_cache:
            local = b_space.local(cell)
            rows = []
            for u in local.elements:
                p = cell_op(u, cell.m_inv)
                if c_space.cell_dim:
                    try:
                        rows.append(c_space.cell_local.expand(p))
                    except SpanError as exc:
                        raise MembershipError(f"{name} cell part, cell {cell.index}: {exc}") from exc
                else:
                    if not p.is_zero:
                        raise MembershipError(
                            f"{name} cell part, cell {cell.index}: nonzero result but empty cell factor")
                    rows.append([])
            cell_cache[key] = rows
        if c_space.cell_dim:
            cbase = c_space.cell_offset(cell.index)
            bbase = b_space.offset(cell.index)
            for i, row in enumerate(cell_cache[key]):
                for m, v in enumerate(row):
                    if v:
                        out.add(cbase + m, bbase + i, v)

    trace_cache: dict = {}
    for face in mesh.faces:
        vec = _face_vector(face, tangential)
        frow = c_space.face_offset(face.index)
        for side, sign in (("left", -1), ("right", 1)):
            cell = mesh.cells[face.cell_on(side)]
            start = cell.to_ref_point(face.start_in_chart(side))
            direction = cell.to_ref_vector(face.chord)
            key = (cell.fmap.m, start, direction, vec)
            if key not in trace_cache:
                local = b_space.local(cell)
                mat = []
                for u in local.elements:
                    tr = (restrict_to_segment(u.x, start, direction) * vec[0]
                          + restrict_to_segment(u.y, start, direction) * vec[1])
                    if tr.degree() > kdeg:
                        raise MembershipError(
                            f"{name} trace on face {face.index} ({face.kind}, {side}): "
                            f"degree {tr.degree()} exceeds face degree {kdeg}")
                    mat.append([(tr * leg[ell]).integrate01() * leg_scale[ell]
                                for ell in range(kdeg + 1)])
                trace_cache[key] = mat
            bbase = b_space.offset(cell.index)
            for i, coeffs in enumerate(trace_cache[key]):
                for ell, v in enumerate(coeffs):
                    if v:
                        out.add(frow + ell, bbase + i, sign * v)
    return out


def assemble_div_distributional(b_space: DGVectorSpace, c_space: CodomainSpace) -> OpMatrix:
    """Distributional divergence: cellwise div plus normal-trace jumps."""
    return _assemble_second(b_space, c_space, divergence, tangential=False, name="div")


def assemble_curl_distributional(b_space: DGVectorSpace, c_space: CodomainSpace) -> OpMatrix:
    """Distributional scalar curl: cellwise curl plus tangential-trace jumps."""
    return _assemble_second(b_space, c_space, curl2d, tangential=True, name="curl")


def adjoint(op: OpMatrix, gram_domain: GramMatrix, gram_codomain: GramMatrix) -> OpMatrix:
    """Exact adjoint G_dom^-1 op^T G_cod of op: dom -> cod."""
    if op.ncols != gram_domain.dim or op.nrows != gram_codomain.dim:
        raise ValueError("gram dimensions do not match the operator")
    cols = []
    for j in range(gram_codomain.dim):
        ej = [_ZERO] * gram_codomain.dim
        ej[j] = Fraction(1)
        cols.append(op.rmatvec(gram_codomain.matvec(ej)))
    sols = gram_domain.solve_columns(cols)
    out = OpMatrix(op.ncols, op.nrows, domain=op.codomain, codomain=op.domain)
    for j, col in enumerate(sols):
        for i, v in enumerate(col):
            if v:
                out.add(i, j, v)
    return out
