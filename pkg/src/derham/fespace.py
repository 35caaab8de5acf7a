"""Discrete function spaces on periodic meshes.

Every space stores, per cell, its basis as pullbacks to the reference cell
(plain composition with the inverse chart map; components are physical).
Scalar and vector monomial families keep the same span under the structured
chart maps; the two exceptions are handled explicitly:

* the enriched quad families' spanning vector pulls back to
  ``(-hx * x^(k+1) y^k, hy * x^k y^(k+1))`` on a cell of size hx x hy;
* intrinsic triangle RT/Nedelec bases pull back to
  ``P_k^2 + (M x_hat) * homogeneous_k`` with M the chart's linear part
  (for Nedelec, M rotated by +90 degrees), which keeps normal respectively
  tangential face traces at degree <= k on sheared cells.

Local bases verify their own linear independence and cardinality against the
per-cell dimension formulas on construction.  DOF layouts are deterministic:
discontinuous spaces are cell-blocked in mesh order with graded-lex local
ordering, codomain spaces put all cell blocks before all face blocks, and
continuous scalar spaces number Lagrange nodes in first-encounter order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exactla import ExactSolveError, LinearExpander, solve_square
from .mesh import Cell, Mesh, MeshKind
from .poly import IDENTITY2, Poly, RefCell, VecPoly, legendre_basis

__all__ = [
    "SpanError",
    "LocalScalarBasis",
    "LocalVectorBasis",
    "scalar_local_basis",
    "vector_local_basis",
    "lagrange_basis",
    "local_dim",
    "VECTOR_FAMILIES",
    "SCALAR_FAMILIES",
    "DGVectorSpace",
    "ContinuousScalarSpace",
    "CodomainSpace",
    "audit_dimensions",
    "dimension_formula",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)

VECTOR_FAMILIES = {
    "vec_p": MeshKind.TRIANGULAR,      # discontinuous P_k^2
    "vec_q": MeshKind.CARTESIAN,       # discontinuous Q_k^2 (the naive choice)
    "vec_qdiv": MeshKind.CARTESIAN,    # enriched quad family with degree-k normal traces
    "vec_qcurl": MeshKind.CARTESIAN,   # its +90 degree rotation
    "rt_tri": MeshKind.TRIANGULAR,
    "ned_tri": MeshKind.TRIANGULAR,
    "rt_quad": MeshKind.CARTESIAN,
    "ned_quad": MeshKind.CARTESIAN,
}

SCALAR_FAMILIES = ("p", "q", "qhat")


class SpanError(ValueError):
    """A polynomial fell outside the span it was required to lie in."""


def _graded(monos: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    return sorted(set(monos), key=lambda ab: (ab[0] + ab[1], ab[1], ab[0]))


def p_monomials(d: int) -> list[tuple[int, int]]:
    return _graded((a, b) for a in range(d + 1) for b in range(d + 1 - a))


def q_monomials(dx: int, dy: int) -> list[tuple[int, int]]:
    if dx < 0 or dy < 0:
        return []
    return _graded((a, b) for a in range(dx + 1) for b in range(dy + 1))


def homogeneous_monomials(d: int) -> list[tuple[int, int]]:
    return [(d - b, b) for b in range(d + 1)]


def local_dim(family: str, k: int) -> int:
    """Per-cell dimension of a vector family at level k."""
    return {
        "vec_p": (k + 1) * (k + 2),
        "vec_q": 2 * (k + 1) ** 2,
        "vec_qdiv": 2 * (k + 1) ** 2 + 2 * k + 1,
        "vec_qcurl": 2 * (k + 1) ** 2 + 2 * k + 1,
        "rt_tri": (k + 1) * (k + 3),
        "ned_tri": (k + 1) * (k + 3),
        "rt_quad": 2 * (k + 1) * (k + 2),
        "ned_quad": 2 * (k + 1) * (k + 2),
    }[family]


class LocalScalarBasis:
    """Independent scalar polynomials on a reference cell, with exact expansion."""

    def __init__(self, ref: RefCell, elements: Sequence[Poly], tag: str):
        self.ref = ref
        self.tag = tag
        self.elements = list(elements)
        self.monos = _graded(ab for p in self.elements for ab, _ in p.terms())
        self._idx = {ab: i for i, ab in enumerate(self.monos)}
        cols = [self.encode(p) for p in self.elements]
        try:
            self.expander = LinearExpander(cols) if cols else None
        except ExactSolveError as exc:
            raise AssertionError(f"dependent local basis for {tag}") from exc

    @property
    def dim(self) -> int:
        return len(self.elements)

    def encode(self, p: Poly) -> list[Fraction]:
        v = [_ZERO] * len(self.monos)
        for ab, c in p.terms():
            i = self._idx.get(ab)
            if i is None:
                raise SpanError(f"monomial x^{ab[0]} y^{ab[1]} outside {self.tag}")
            v[i] = c
        return v

    def expand(self, p: Poly) -> list[Fraction]:
        """Coefficients of ``p`` in this basis; SpanError if outside."""
        if p.is_zero:
            return [_ZERO] * self.dim
        if self.expander is None:
            raise SpanError(f"nonzero polynomial in empty space {self.tag}")
        try:
            return self.expander.expand(self.encode(p))
        except ExactSolveError as exc:
            raise SpanError(f"{exc} ({self.tag})") from exc

    def gram_ref(self) -> list[list[Fraction]]:
        if not hasattr(self, "_gram"):
            n = self.dim
            g = [[_ZERO] * n for _ in range(n)]
            for i in range(n):
                for j in range(i + 1):
                    v = self.ref.integrate(self.elements[i] * self.elements[j])
                    g[i][j] = g[j][i] = v
            self._gram = g
        return self._gram


class LocalVectorBasis:
    """Independent vector polynomials on a reference cell (physical components)."""

    def __init__(self, ref: RefCell, elements: Sequence[VecPoly], tag: str, expected_dim: int | None = None):
        self.ref = ref
        self.tag = tag
        self.elements = list(elements)
        if expected_dim is not None and len(self.elements) != expected_dim:
            raise AssertionError(f"{tag}: cardinality {len(self.elements)} != formula {expected_dim}")
        self.monos_x = _graded(ab for u in self.elements for ab, _ in u.x.terms())
        self.monos_y = _graded(ab for u in self.elements for ab, _ in u.y.terms())
        self._ix = {ab: i for i, ab in enumerate(self.monos_x)}
        self._iy = {ab: i for i, ab in enumerate(self.monos_y)}
        cols = [self.encode(u) for u in self.elements]
        try:
            self.expander = LinearExpander(cols)
        except ExactSolveError as exc:
            raise AssertionError(f"dependent local basis for {tag}") from exc

    @property
    def dim(self) -> int:
        return len(self.elements)

    def encode(self, u: VecPoly) -> list[Fraction]:
        v = [_ZERO] * (len(self.monos_x) + len(self.monos_y))
        for ab, c in u.x.terms():
            i = self._ix.get(ab)
            if i is None:
                raise SpanError(f"x-monomial x^{ab[0]} y^{ab[1]} outside {self.tag}")
            v[i] = c
        off = len(self.monos_x)
        for ab, c in u.y.terms():
            i = self._iy.get(ab)
            if i is None:
                raise SpanError(f"y-monomial x^{ab[0]} y^{ab[1]} outside {self.tag}")
            v[off + i] = c
        return v

    def expand(self, u: VecPoly) -> list[Fraction]:
        try:
            return self.expander.expand(self.encode(u))
        except ExactSolveError as exc:
            raise SpanError(f"{exc} ({self.tag})") from exc

    def gram_ref(self) -> list[list[Fraction]]:
        if not hasattr(self, "_gram"):
            n = self.dim
            g = [[_ZERO] * n for _ in range(n)]
            for i in range(n):
                ui = self.elements[i]
                for j in range(i + 1):
                    uj = self.elements[j]
                    v = self.ref.integrate(ui.x * uj.x + ui.y * uj.y)
                    g[i][j] = g[j][i] = v
            self._gram = g
        return self._gram


_scalar_cache: dict = {}
_vector_cache: dict = {}
_lagrange_cache: dict = {}


def scalar_local_basis(ref: RefCell, family: str, param: int) -> LocalScalarBasis:
    """Monomial scalar basis: family "p" (total degree), "q" (per-variable
    degree) or "qhat" (level-k reduced quad space Q_{k,k-1} + Q_{k-1,k})."""
    key = (ref, family, param)
    if key not in _scalar_cache:
        if family == "p":
            monos = p_monomials(param) if param >= 0 else []
        elif family == "q":
            monos = q_monomials(param, param) if param >= 0 else []
        elif family == "qhat":
            monos = _graded(q_monomials(param, param - 1) + q_monomials(param - 1, param))
        else:
            raise ValueError(f"unknown scalar family {family!r}")
        elems = [Poly.monomial(a, b) for a, b in monos]
        _scalar_cache[key] = LocalScalarBasis(ref, elems, f"{family}({param}) on {ref.value}")
    return _scalar_cache[key]


def _vec_of(monos, comp: int) -> list[VecPoly]:
    zero = Poly.zero()
    if comp == 0:
        return [VecPoly(Poly.monomial(a, b), zero) for a, b in monos]
    return [VecPoly(zero, Poly.monomial(a, b)) for a, b in monos]


def make_vector_basis(family: str, k: int, ref: RefCell, mlin=IDENTITY2) -> LocalVectorBasis:
    """Construct the pulled-back local basis of a vector family.

    ``mlin`` is the cell chart's linear part; the identity gives the space on
    the reference cell itself.
    """
    if k < 0:
        raise ValueError("level k must be >= 0")
    hx, hy = mlin[0][0], mlin[1][1]  # quad charts are diagonal; only they use these
    if family == "vec_p":
        elems = _vec_of(p_monomials(k), 0) + _vec_of(p_monomials(k), 1)
    elif family == "vec_q":
        elems = _vec_of(q_monomials(k, k), 0) + _vec_of(q_monomials(k, k), 1)
    elif family in ("vec_qdiv", "vec_qcurl"):
        if family == "vec_qdiv":
            mx = _graded(q_monomials(k, k) + q_monomials(k + 1, k - 1))
            my = _graded(q_monomials(k, k) + q_monomials(k - 1, k + 1))
            span = VecPoly(Poly.monomial(k + 1, k, -hx), Poly.monomial(k, k + 1, hy))
        else:
            mx = _graded(q_monomials(k, k) + q_monomials(k - 1, k + 1))
            my = _graded(q_monomials(k, k) + q_monomials(k + 1, k - 1))
            span = VecPoly(Poly.monomial(k, k + 1, hy), Poly.monomial(k + 1, k, hx))
        elems = _vec_of(mx, 0) + _vec_of(my, 1) + [span]
    elif family in ("rt_tri", "ned_tri"):
        m = mlin
        if family == "ned_tri":
            m = ((-m[1][0], -m[1][1]), (m[0][0], m[0][1]))  # +90 degree rotation of the columns' image
        wx = Poly({(1, 0): m[0][0], (0, 1): m[0][1]})
        wy = Poly({(1, 0): m[1][0], (0, 1): m[1][1]})
        extras = [VecPoly(wx * Poly.monomial(a, b), wy * Poly.monomial(a, b))
                  for a, b in homogeneous_monomials(k)]
        elems = _vec_of(p_monomials(k), 0) + _vec_of(p_monomials(k), 1) + extras
    elif family == "rt_quad":
        elems = _vec_of(q_monomials(k + 1, k), 0) + _vec_of(q_monomials(k, k + 1), 1)
    elif family == "ned_quad":
        elems = _vec_of(q_monomials(k, k + 1), 0) + _vec_of(q_monomials(k + 1, k), 1)
    else:
        raise ValueError(f"unknown vector family {family!r}")
    return LocalVectorBasis(ref, elems, f"{family}(k={k})", expected_dim=local_dim(family, k))


def vector_local_basis(family: str, k: int, cell: Cell) -> LocalVectorBasis:
    key = (family, k, cell.ref, cell.fmap.m)
    if key not in _vector_cache:
        _vector_cache[key] = make_vector_basis(family, k, cell.ref, cell.fmap.m)
    return _vector_cache[key]


def lagrange_nodes(ref: RefCell, degree: int) -> list[tuple[Fraction, Fraction]]:
    d = degree
    if d < 1:
        raise ValueError("continuous spaces need degree >= 1")
    if ref is RefCell.TRIANGLE:
        return [(Fraction(a, d), Fraction(b, d))
                for b in range(d + 1) for a in range(d + 1 - b)]
    return [(Fraction(a, d), Fraction(b, d))
            for b in range(d + 1) for a in range(d + 1)]


def lagrange_basis(ref: RefCell, degree: int) -> tuple[list[tuple[Fraction, Fraction]], LocalScalarBasis]:
    """Nodal (Lagrange) basis on the reference lattice of the given degree."""
    key = (ref, degree)
    if key not in _lagrange_cache:
        nodes = lagrange_nodes(ref, degree)
        monos = p_monomials(degree) if ref is RefCell.TRIANGLE else q_monomials(degree, degree)
        n = len(nodes)
        if len(monos) != n:
            raise AssertionError("node lattice does not match monomial count")
        vand = [[Fraction(x) ** a * Fraction(y) ** b for a, b in monos] for x, y in nodes]
        eye = [[_ONE if i == j else _ZERO for i in range(n)] for j in range(n)]
        coeffs = solve_square(vand, eye)
        elems = [Poly({ab: c for ab, c in zip(monos, col) if c}) for col in coeffs]
        _lagrange_cache[key] = (nodes, LocalScalarBasis(ref, elems, f"lagrange({degree}) on {ref.value}"))
    return _lagrange_cache[key]


class DGVectorSpace:
    """Discontinuous vector space: one local basis block per cell."""

    def __init__(self, mesh: Mesh, family: str, k: int):
        want = VECTOR_FAMILIES.get(family)
        if want is None:
            raise ValueError(f"unknown vector family {family!r}")
        if mesh.kind is not want:
            raise ValueError(f"family {family!r} lives on {want.value} meshes")
        self.mesh = mesh
        self.family = family
        self.k = k
        self.local_dim = local_dim(family, k)
        self.dim = self.local_dim * mesh.num_cells

    def local(self, cell: Cell) -> LocalVectorBasis:
        return vector_local_basis(self.family, self.k, cell)

    def offset(self, cell_index: int) -> int:
        return cell_index * self.local_dim

    def constant_vector(self, cx, cy) -> list[Fraction]:
        """Global coefficient vector of the constant field (cx, cy)."""
        const = VecPoly.constant(cx, cy)
        out = [_ZERO] * self.dim
        for cell in self.mesh.cells:
            coeffs = self.local(cell).expand(const)
            base = self.offset(cell.index)
            for i, v in enumerate(coeffs):
                out[base + i] = v
        return out

    def descriptor(self) -> dict:
        return {
            "schema": 1,
            "space": "dg_vector",
            "family": self.family,
            "k": self.k,
            "mesh": self.mesh.summary(),
            "dim": self.dim,
            "local_dim": self.local_dim,
        }


class ContinuousScalarSpace:
    """Periodic continuous Lagrange space (P_d on triangles, Q_d on quads)."""

    def __init__(self, mesh: Mesh, degree: int):
        self.mesh = mesh
        self.degree = degree
        ref = RefCell.TRIANGLE if mesh.kind is MeshKind.TRIANGULAR else RefCell.SQUARE
        self.ref = ref
        self.nodes, self.local = lagrange_basis(ref, degree)
        table: dict = {}
        self.cell_dofs: list[list[int]] = []
        for cell in mesh.cells:
            dofs = []
            for node in self.nodes:
                key = mesh.wrap_point(cell.fmap.apply(node))
                if key not in table:
                    table[key] = len(table)
                dofs.append(table[key])
            if len(set(dofs)) != len(dofs):
                raise AssertionError("periodic identification collapsed nodes inside one cell")
            self.cell_dofs.append(dofs)
        self.dim = len(table)

    def shape_functions(self, cell: Cell) -> list[tuple[int, Poly]]:
        return list(zip(self.cell_dofs[cell.index], self.local.elements))

    def constant_vector(self, value=1) -> list[Fraction]:
        return [Fraction(value)] * self.dim

    def descriptor(self) -> dict:
        return {
            "schema": 1,
            "space": "continuous_scalar",
            "degree": self.degree,
            "mesh": self.mesh.summary(),
            "dim": self.dim,
        }


class CodomainSpace:
    """Product target space: scalar polynomials per cell and per face.

    Layout: all cell blocks first (mesh order), then all face blocks (mesh
    order, shifted Legendre coefficients 0..face_degree).  Face components are
    polynomials in the face's chord parameter t; paired with jumps taken
    against the unnormalized face normal this realizes the true arc-length
    pairing exactly.
    """

    def __init__(self, mesh: Mesh, face_degree: int, cell_family: str | None, cell_param: int):
        self.mesh = mesh
        self.face_degree = face_degree
        self.cell_family = cell_family
        self.cell_param = cell_param
        ref = RefCell.TRIANGLE if mesh.kind is MeshKind.TRIANGULAR else RefCell.SQUARE
        if cell_family is None or (cell_family in ("p", "q") and cell_param < 0):
            self.cell_local = None
            self.cell_dim = 0
        else:
            self.cell_local = scalar_local_basis(ref, cell_family, cell_param)
            self.cell_dim = self.cell_local.dim
        self.face_dim = face_degree + 1
        self.legendre = legendre_basis(face_degree)
        self._face_base = self.cell_dim * mesh.num_cells
        self.dim = self._face_base + self.face_dim * mesh.num_faces

    def cell_offset(self, cell_index: int) -> int:
        return cell_index * self.cell_dim

    def face_offset(self, face_index: int) -> int:
        return self._face_base + face_index * self.face_dim

    def uniform_vector(self, value=1) -> list[Fraction]:
        """The element equal to ``value`` on every cell and every face."""
        v = [_ZERO] * self.dim
        value = Fraction(value)
        const = Poly.const(value)
        for cell in self.mesh.cells:
            if self.cell_dim:
                coeffs = self.cell_local.expand(const)
                base = self.cell_offset(cell.index)
                for i, c in enumerate(coeffs):
                    v[base + i] = c
        for face in self.mesh.faces:
            v[self.face_offset(face.index)] = value  # Legendre L_0 = 1
        return v

    def descriptor(self) -> dict:
        return {
            "schema": 1,
            "space": "codomain",
            "face_degree": self.face_degree,
            "cell_family": self.cell_family,
            "cell_param": self.cell_param,
            "mesh": self.mesh.summary(),
            "dim": self.dim,
            "cell_dim": self.cell_dim,
            "face_dim": self.face_dim,
        }


def dimension_formula(kind: MeshKind, name: str, k: int, n: int) -> int:
    """Closed-form global dimensions used by the audit."""
    if kind is MeshKind.TRIANGULAR:
        table = {
            "scalar_continuous": n * (k + 1) ** 2 // 2,
            "vec_p": n * (k + 1) * (k + 2),
            "rt_tri": n * (k + 1) * (k + 3),
            "ned_tri": n * (k + 1) * (k + 3),
            "codomain_low": n * (k + 1) * (k + 3) // 2,
            "codomain_full": n * (k + 1) * (k + 5) // 2,
        }
    else:
        table = {
            "scalar_continuous": n * (k + 1) ** 2,
            "vec_qdiv": n * (2 * (k + 1) ** 2 + 2 * k + 1),
            "vec_qcurl": n * (2 * (k + 1) ** 2 + 2 * k + 1),
            "rt_quad": 2 * n * (k + 1) * (k + 2),
            "ned_quad": 2 * n * (k + 1) * (k + 2),
            "codomain_low": n * (k * k + 4 * k + 2),
            "codomain_full": n * (k + 1) * (k + 3),
        }
    return table[name]


def audit_dimensions(mesh: Mesh, k_max: int) -> list[dict]:
    """Compare constructed space dimensions against the closed forms, k = 0..k_max."""
    rows: list[dict] = []
    n = mesh.num_cells
    tri = mesh.kind is MeshKind.TRIANGULAR

    def add(name: str, k: int, computed: int):
        expected = dimension_formula(mesh.kind, name, k, n)
        rows.append({
            "family": name,
            "k": k,
            "computed": computed,
            "expected": expected,
            "ok": computed == expected,
        })

    for k in range(k_max + 1):
        add("scalar_continuous", k, ContinuousScalarSpace(mesh, k + 1).dim)
        if tri:
            add("vec_p", k, DGVectorSpace(mesh, "vec_p", k).dim)
            add("rt_tri", k, DGVectorSpace(mesh, "rt_tri", k).dim)
            add("ned_tri", k, DGVectorSpace(mesh, "ned_tri", k).dim)
            add("codomain_low", k, CodomainSpace(mesh, k, "p", k - 1).dim)
            add("codomain_full", k, CodomainSpace(mesh, k, "p", k).dim)
        else:
            add("vec_qdiv", k, DGVectorSpace(mesh, "vec_qdiv", k).dim)
            add("vec_qcurl", k, DGVectorSpace(mesh, "vec_qcurl", k).dim)
            add("rt_quad", k, DGVectorSpace(mesh, "rt_quad", k).dim)
            add("ned_quad", k, DGVectorSpace(mesh, "ned_quad", k).dim)
            add("codomain_low", k, CodomainSpace(mesh, k, "qhat", k).dim)
            add("codomain_full", k, CodomainSpace(mesh, k, "q", k).dim)
    return rows
