"""Reference-cell analysis of vector families and boundary trace maps.

Three related objects live here, all in exact arithmetic:

* ``BoundaryCurlMap``: scalar polynomials of degree k+1 mapped to the
  Legendre coefficients of the outward normal traces of their rotated
  gradients, edge by edge.  Along an edge that trace equals d/dt of the
  scalar restricted to the edge, so it always has degree <= k.
* ``bubble_basis``: the members of a vector family that are divergence-free
  with identically zero normal trace on every edge.
* ``decompose_divfree``: splits a divergence-free family member into a
  bubble, one reproducing mode per (edge, Legendre index >= 1), and a
  remainder with edgewise-constant normal traces, then certifies the split
  by exact reconstruction.  ``uniqueness_probe`` certifies that those three
  ingredients form a basis of the divergence-free subspace.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactla import (
    RankResult,
    mat_vec,
    rank_nullspace,
    rank_of_columns,
    solve_any,
    solve_square,
    span_compare,
    transpose,
)
from .fespace import VECTOR_FAMILIES, LocalVectorBasis, make_vector_basis, scalar_local_basis
from .mesh import MeshKind
from .poly import Poly, RefCell, VecPoly, divergence, grad_perp, legendre_basis
from .report import Report

__all__ = [
    "DECOMPOSABLE_FAMILIES",
    "BoundaryCurlMap",
    "boundary_curl_map",
    "BubbleBasis",
    "bubble_basis",
    "EdgeMode",
    "edge_modes",
    "DivFreeDecomposition",
    "decompose_divfree",
    "UniquenessProbe",
    "uniqueness_probe",
    "flat_trace_basis",
    "trace_coefficients",
    "divfree_coefficients",
    "random_divfree",
    "family_ref",
    "reference_basis",
    "refcheck_report",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)

# families whose normal traces stay at degree <= k, where the decomposition
# into bubbles + edge modes + flat-trace fields applies
DECOMPOSABLE_FAMILIES = ("vec_p", "vec_qdiv")


def family_ref(family: str) -> RefCell:
    kind = VECTOR_FAMILIES[family]
    return RefCell.TRIANGLE if kind is MeshKind.TRIANGULAR else RefCell.SQUARE


@lru_cache(maxsize=None)
def reference_basis(family: str, k: int) -> LocalVectorBasis:
    """The family's local basis on its own reference cell (identity chart)."""
    return make_vector_basis(family, k, family_ref(family))


def _combine(elements, coeffs) -> VecPoly:
    out = VecPoly.zero()
    for c, u in zip(coeffs, elements):
        if c:
            out = out + u.scale(c)
    return out


def _combine_scalar(elements, coeffs) -> Poly:
    out = Poly.zero()
    for c, p in zip(coeffs, elements):
        if c:
            out = out + p.scale(c)
    return out


def trace_coefficients(ref: RefCell, u: VecPoly, k: int) -> list[Fraction]:
    """Edge-major vector of Legendre coefficients (orders 0..k) of the
    outward normal traces of ``u``; exact, raises if a trace exceeds degree k."""
    leg = legendre_basis(k)
    out: list[Fraction] = []
    for edge in ref.edges:
        tr = edge.normal_trace(u)
        if tr.degree() > k:
            raise ValueError(f"normal trace has degree {tr.degree()} > {k}")
        out.extend((tr * ell).integrate01() * (2 * i + 1) for i, ell in enumerate(leg))
    return out


class BoundaryCurlMap:
    """Boundary-trace matrix of the rotated gradient on one reference cell.

    Columns are the scalar monomials of degree k+1 (total degree on the
    triangle, per-variable degree on the square); rows are the Legendre
    coefficients of the outward normal traces of the rotated gradient,
    edge-major with k+1 coefficients per edge.
    """

    def __init__(self, ref: RefCell, k: int):
        if k < 0:
            raise ValueError("level k must be >= 0")
        self.ref = ref
        self.k = k
        fam = "p" if ref is RefCell.TRIANGLE else "q"
        self.scalar = scalar_local_basis(ref, fam, k + 1)
        self.num_edges = ref.num_edges
        self.boundary_dim = self.num_edges * (k + 1)
        rows = [[_ZERO] * self.scalar.dim for _ in range(self.boundary_dim)]
        for j, psi in enumerate(self.scalar.elements):
            coeffs = trace_coefficients(ref, grad_perp(psi), k)
            for r, c in enumerate(coeffs):
                if c:
                    rows[r][j] = c
        self.rows = rows
        self._analysis: RankResult | None = None

    @property
    def analysis(self) -> RankResult:
        if self._analysis is None:
            self._analysis = rank_nullspace(self.rows, ncols=self.scalar.dim)
        return self._analysis

    @property
    def rank(self) -> int:
        return self.analysis.rank

    @property
    def kernel(self) -> list[list[Fraction]]:
        """Scalar coefficient vectors whose rotated gradient has zero trace."""
        return self.analysis.nullspace

    def kernel_polys(self) -> list[Poly]:
        return [_combine_scalar(self.scalar.elements, v) for v in self.kernel]

    def apply(self, scalar_coeffs) -> list[Fraction]:
        return mat_vec(self.rows, scalar_coeffs)

    def solve(self, boundary_target) -> list[Fraction] | None:
        """One scalar preimage of a boundary coefficient vector, or None."""
        return solve_any(self.rows, boundary_target)

    def range_orthogonal_to_constants(self) -> bool:
        """Every column has edge-integrals summing to zero, exactly.

        The order-0 coefficient of a trace is its mean, so this is the exact
        statement that the range is orthogonal to the constant boundary
        function in the weighted Legendre inner product.
        """
        step = self.k + 1
        return all(
            not sum((self.rows[e * step][j] for e in range(self.num_edges)), _ZERO)
            for j in range(self.scalar.dim)
        )


@lru_cache(maxsize=None)
def boundary_curl_map(ref: RefCell, k: int) -> BoundaryCurlMap:
    return BoundaryCurlMap(ref, k)


def _divergence_rows(basis: LocalVectorBasis) -> list[list[Fraction]]:
    divs = [divergence(u) for u in basis.elements]
    monos = sorted({ab for d in divs for ab, _ in d.terms()})
    return [[d.coeff(*ab) for d in divs] for ab in monos]


def _trace_rows(basis: LocalVectorBasis) -> list[list[Fraction]]:
    rows: list[list[Fraction]] = []
    for edge in basis.ref.edges:
        traces = [edge.normal_trace(u) for u in basis.elements]
        deg = max((t.degree() for t in traces), default=-1)
        rows.extend([t.coeff(p) for t in traces] for p in range(deg + 1))
    return rows


@lru_cache(maxsize=None)
def divfree_coefficients(family: str, k: int) -> tuple[tuple[Fraction, ...], ...]:
    """Coefficient basis of all divergence-free members of the family."""
    basis = reference_basis(family, k)
    res = rank_nullspace(_divergence_rows(basis), ncols=basis.dim)
    return tuple(tuple(v) for v in res.nullspace)


class BubbleBasis:
    """Divergence-free family members with zero normal trace on every edge."""

    def __init__(self, family: str, k: int):
        self.family = family
        self.k = k
        self.ref = family_ref(family)
        self.basis = reference_basis(family, k)
        rows = _divergence_rows(self.basis) + _trace_rows(self.basis)
        res = rank_nullspace(rows, ncols=self.basis.dim)
        self.vectors = res.nullspace
        self.elements = [_combine(self.basis.elements, v) for v in self.vectors]
        self._gram: list[list[Fraction]] | None = None

    @property
    def dim(self) -> int:
        return len(self.elements)

    def project(self, v: VecPoly) -> VecPoly:
        """Exact L2-orthogonal projection onto the bubble span."""
        if not self.elements:
            return VecPoly.zero()
        if self._gram is None:
            n = self.dim
            g = [[_ZERO] * n for _ in range(n)]
            for i in range(n):
                ei = self.elements[i]
                for j in range(i + 1):
                    ej = self.elements[j]
                    g[i][j] = g[j][i] = self.ref.integrate(ei.x * ej.x + ei.y * ej.y)
            self._gram = g
        rhs = [self.ref.integrate(e.x * v.x + e.y * v.y) for e in self.elements]
        coeffs = solve_square(self._gram, [rhs])[0]
        return _combine(self.elements, coeffs)


@lru_cache(maxsize=None)
def bubble_basis(family: str, k: int) -> BubbleBasis:
    return BubbleBasis(family, k)


def flat_trace_basis(ref: RefCell) -> list[VecPoly]:
    """Divergence-free fields with edgewise-constant normal traces that
    complement bubbles and edge modes: the two constants, plus on the square
    the field (1-2x, 2y-1) whose traces alternate sign around the boundary."""
    out = [VecPoly.constant(1, 0), VecPoly.constant(0, 1)]
    if ref is RefCell.SQUARE:
        out.append(VecPoly(Poly({(0, 0): 1, (1, 0): -2}), Poly({(0, 0): -1, (0, 1): 2})))
    return out


@lru_cache(maxsize=None)
def edge_modes(family: str, k: int) -> tuple[tuple[int, int, VecPoly], ...]:
    """One mode per (edge, Legendre order 1..k): a rotated gradient whose
    boundary coefficients hit exactly that unit target, minus its bubble
    projection.  Triples are (edge index, Legendre order, field)."""
    ref = family_ref(family)
    bcm = boundary_curl_map(ref, k)
    bubbles = bubble_basis(family, k)
    out = []
    for e in range(ref.num_edges):
        for i in range(1, k + 1):
            target = [_ZERO] * bcm.boundary_dim
            target[e * (k + 1) + i] = _ONE
            psi = bcm.solve(target)
            if psi is None:
                raise AssertionError("boundary target unexpectedly outside the range")
            w = grad_perp(_combine_scalar(bcm.scalar.elements, psi))
            out.append((e, i, w - bubbles.project(w)))
    return tuple(out)


@dataclass
class EdgeMode:
    edge: int
    order: int
    coefficient: Fraction
    element: VecPoly


@dataclass
class DivFreeDecomposition:
    family: str
    k: int
    input: VecPoly
    bubble: VecPoly
    modes: list[EdgeMode]
    flat: VecPoly
    flat_coeffs: list[Fraction]
    exact: bool
    residual: VecPoly

    def reconstruct(self) -> VecPoly:
        out = self.bubble + self.flat
        for m in self.modes:
            if m.coefficient:
                out = out + m.element.scale(m.coefficient)
        return out


def decompose_divfree(u: VecPoly, family: str, k: int) -> DivFreeDecomposition:
    """Split a divergence-free family member into bubble + edge modes + flat.

    The mode coefficients are read directly off the input's trace Legendre
    coefficients, so exact reconstruction certifies that those functionals,
    together with the bubble and flat pieces, control the whole field.
    """
    if family not in DECOMPOSABLE_FAMILIES:
        raise ValueError(f"decomposition applies to {DECOMPOSABLE_FAMILIES}, not {family!r}")
    ref = family_ref(family)
    basis = reference_basis(family, k)
    basis.expand(u)  # membership check; SpanError if outside
    if not divergence(u).is_zero:
        raise ValueError("input field is not divergence-free")

    bubble = bubble_basis(family, k).project(u)
    acc = bubble
    tc = trace_coefficients(ref, u, k)
    modes = []
    for e, i, elem in edge_modes(family, k):
        lam = tc[e * (k + 1) + i]
        modes.append(EdgeMode(e, i, lam, elem))
        if lam:
            acc = acc + elem.scale(lam)
    rem = u - acc

    flats = flat_trace_basis(ref)
    cols = [basis.expand(w) for w in flats]
    sol = solve_any(transpose(cols), basis.expand(rem))
    if sol is None:
        return DivFreeDecomposition(family, k, u, bubble, modes, VecPoly.zero(), [], False, rem)
    flat = _combine(flats, sol)
    return DivFreeDecomposition(family, k, u, bubble, modes, flat, sol, True, rem - flat)


@dataclass
class UniquenessProbe:
    family: str
    k: int
    bubble_dim: int
    flat_count: int
    mode_count: int
    rank: int
    divfree_dim: int
    independent: bool
    spans_divfree: bool


def uniqueness_probe(family: str, k: int) -> UniquenessProbe:
    """Certify that bubbles, flat-trace fields and edge modes are jointly
    independent and span exactly the divergence-free subspace, which makes
    the decomposition unique."""
    basis = reference_basis(family, k)
    bubbles = bubble_basis(family, k)
    flats = [basis.expand(w) for w in flat_trace_basis(family_ref(family))]
    modes = [basis.expand(elem) for _, _, elem in edge_modes(family, k)]
    cols = [list(v) for v in bubbles.vectors] + flats + modes
    divfree = [list(v) for v in divfree_coefficients(family, k)]
    cert = span_compare(cols, divfree, want_witness=False)
    return UniquenessProbe(
        family,
        k,
        bubbles.dim,
        len(flats),
        len(modes),
        cert.rank_left,
        len(divfree),
        cert.rank_left == len(cols),
        cert.equal,
    )


def random_divfree(family: str, k: int, rng: random.Random) -> VecPoly:
    """Rotated gradient of a random rational scalar of degree k+1.

    For the decomposable families this construction reaches every
    divergence-free member: the rotated-gradient image has the same dimension
    as the divergence-free subspace.
    """
    ref = family_ref(family)
    fam = "p" if ref is RefCell.TRIANGLE else "q"
    scalar = scalar_local_basis(ref, fam, k + 1)
    for _ in range(64):
        coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in scalar.elements]
        u = grad_perp(_combine_scalar(scalar.elements, coeffs))
        if not u.is_zero:
            return u
    raise AssertionError("random scalar degenerated 64 times in a row")


def refcheck_report(cell: str, k: int, samples: int = 5, seed: int = 0) -> Report:
    """Run every reference-cell check for one cell shape and level."""
    names = {"triangle": RefCell.TRIANGLE, "tri": RefCell.TRIANGLE,
             "square": RefCell.SQUARE, "quad": RefCell.SQUARE}
    if cell not in names:
        raise ValueError(f"cell must be one of {sorted(names)}, got {cell!r}")
    ref = names[cell]
    tri = ref is RefCell.TRIANGLE
    family = "vec_p" if tri else "vec_qdiv"
    rep = Report("reference-cell checks",
                 params={"cell": ref.value, "k": k, "family": family,
                         "samples": samples, "seed": seed})

    bcm = boundary_curl_map(ref, k)
    rep.check("boundary_map_rank", 3 * k + 2 if tri else 4 * k + 3, bcm.rank)
    rep.check("boundary_map_kernel_dim",
              1 + k * (k - 1) // 2 if tri else 1 + k * k,
              bcm.analysis.nullity)
    rep.check("range_plus_constants_fills_boundary", bcm.boundary_dim, bcm.rank + 1)
    rep.check("range_orthogonal_to_constants", True, bcm.range_orthogonal_to_constants())

    bubbles = bubble_basis(family, k)
    rep.check("bubble_dim", k * (k - 1) // 2 if tri else k * k, bubbles.dim)

    probe = uniqueness_probe(family, k)
    rep.check("divfree_dim", (k + 1) * (k + 4) // 2 if tri else (k + 1) * (k + 3),
              probe.divfree_dim)
    rep.check("pieces_independent", True, probe.independent)
    rep.check("pieces_span_divfree", True, probe.spans_divfree)

    modes_ok = True
    for e, i, elem in edge_modes(family, k):
        got = trace_coefficients(ref, elem, k)
        want = [_ONE if r == e * (k + 1) + i else _ZERO for r in range(bcm.boundary_dim)]
        if got != want:
            modes_ok = False
    rep.check("edge_mode_traces_exact", True, modes_ok)

    rng = random.Random(seed)
    good = 0
    for _ in range(samples):
        u = random_divfree(family, k, rng)
        d = decompose_divfree(u, family, k)
        if d.exact and d.residual.is_zero and (d.reconstruct() - u).is_zero:
            good += 1
    rep.check("random_decompositions_exact", samples, good)
    return rep.finish()
