"""Acceptance matrix.

One test per advertised criterion, each printing a single pass/fail line.
Everything below runs in exact rational arithmetic unless a check is
explicitly labeled float; float results never feed exact assertions.
"""

import random
from fractions import Fraction

import pytest

from derham.complexcheck import (
    appendix_report,
    naive_quad_report,
    verify_diagram,
)
from derham.fespace import audit_dimensions, local_dim
from derham.hodge import hodge_report
from derham.mesh import MeshKind, build_mesh
from derham.poly import RefCell
from derham.refcheck import (
    boundary_curl_map,
    bubble_basis,
    decompose_divfree,
    flat_trace_basis,
    random_divfree,
    uniqueness_probe,
)

F = Fraction


def record(label: str, ok: bool) -> None:
    print(f"criterion {label}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {label} failed"


def value(report, name):
    return next(c.computed for c in report.checks if c.name == name)


# -- shared verification campaigns (reused by criterion 12) ------------------

@pytest.fixture(scope="session")
def tri_diagram_reports():
    return [verify_diagram(name, nx, ny, k, float_check=True)
            for name in ("tri-dp", "tri-dp-curl")
            for nx, ny in ((2, 2), (3, 2))
            for k in range(3)]


@pytest.fixture(scope="session")
def quad_diagram_reports():
    return [verify_diagram(name, nx, ny, k, float_check=True)
            for name in ("quad-enriched", "quad-enriched-curl")
            for nx, ny in ((2, 2), (3, 2))
            for k in range(3)]


@pytest.fixture(scope="session")
def naive_reports():
    return [naive_quad_report(nx, ny, float_check=True)
            for nx, ny in ((2, 2), (3, 4), (4, 3))]


@pytest.fixture(scope="session")
def lifted_reports():
    return [verify_diagram(name, 2, 2, k, float_check=True)
            for name in ("tri-drt", "tri-dn", "quad-drt", "quad-dn")
            for k in range(2)]


# -- criteria -----------------------------------------------------------------

def test_criterion_01_entity_counts():
    ok = True
    for kind in (MeshKind.TRIANGULAR, MeshKind.CARTESIAN):
        for nx in range(2, 6):
            for ny in range(2, 6):
                mesh = build_mesh(kind, nx, ny)
                base = nx * ny
                if kind is MeshKind.TRIANGULAR:
                    want = (2 * base, 3 * base, base)
                else:
                    want = (base, 2 * base, base)
                ok &= (mesh.num_cells, mesh.num_faces, mesh.num_points) == want
                ok &= mesh.euler_characteristic == 0
    record("01 entity counts, both kinds, 2..5 grids, exact", ok)


def test_criterion_02_dimension_audit():
    ok = True
    for kind in (MeshKind.TRIANGULAR, MeshKind.CARTESIAN):
        records = audit_dimensions(build_mesh(kind, 2, 2), 3)
        ok &= bool(records) and all(r["ok"] for r in records)
    record("02 dimension audit k=0..3, all closed forms, exact", ok)


def test_criterion_03_triangular_diagrams(tri_diagram_reports):
    ok = all(rep.passed for rep in tri_diagram_reports)
    for rep in tri_diagram_reports:
        n = 2 * rep.params["nx"] * rep.params["ny"]
        k = rep.params["k"]
        ok &= value(rep, "first_rank") == n * (k + 1) ** 2 // 2 - 1
        ok &= value(rep, "first_kernel_dim") == 1
    record("03 triangular diagram + curl twin, k=0..2, two meshes, exact", ok)


def test_criterion_04_enriched_quad_diagrams(quad_diagram_reports):
    ok = all(rep.passed for rep in quad_diagram_reports)
    for rep in quad_diagram_reports:
        n = rep.params["nx"] * rep.params["ny"]
        k = rep.params["k"]
        ok &= value(rep, "second_kernel_dim") == n * (k + 1) ** 2 + 1
    record("04 enriched quad diagram + curl twin, k=0..2, two meshes, exact", ok)


def test_criterion_05_naive_quad_deficit(naive_reports):
    ok = all(rep.passed for rep in naive_reports)
    for rep in naive_reports:
        nx, ny = rep.params["nx"], rep.params["ny"]
        ok &= value(rep, "rank") == 2 * nx * ny - nx - ny
        ok &= value(rep, "harmonic_excess") == nx + ny - 1
    record("05 naive quad rank 2N-Nx-Ny and harmonic excess, exact", ok)


def test_criterion_06_reference_boundary_map():
    ok = True
    for k in range(5):
        tri = boundary_curl_map(RefCell.TRIANGLE, k)
        quad = boundary_curl_map(RefCell.SQUARE, k)
        ok &= tri.rank == 3 * k + 2
        ok &= quad.rank == 4 * k + 3
        ok &= tri.range_orthogonal_to_constants()
        ok &= quad.range_orthogonal_to_constants()
        ok &= tri.rank + 1 == 3 * (k + 1)
        ok &= quad.rank + 1 == 4 * (k + 1)
        ok &= bubble_basis("vec_p", k).dim == k * (k - 1) // 2
    record("06 boundary map ranks 3k+2/4k+3 and bubble dims, k=0..4, exact", ok)


def test_criterion_07_divfree_roundtrip():
    ok = True
    for family in ("vec_p", "vec_qdiv"):
        for k in range(4):
            probe = uniqueness_probe(family, k)
            ok &= probe.independent and probe.spans_divfree
            rng = random.Random(1000 + k)
            for _ in range(50):
                u = random_divfree(family, k, rng)
                d = decompose_divfree(u, family, k)
                ok &= d.exact and d.residual.is_zero
                ok &= (d.reconstruct() - u).is_zero
    # quad flat part from constant edge traces alone
    rng = random.Random(7)
    flats = flat_trace_basis(RefCell.SQUARE)
    for k in range(4):
        for _ in range(10):
            u = flats[0].scale(F(rng.randint(-9, 9), rng.randint(1, 5)))
            u = u + flats[1].scale(F(rng.randint(-9, 9), rng.randint(1, 5)))
            u = u + flats[2].scale(F(rng.randint(-9, 9), rng.randint(1, 5)))
            for w in bubble_basis("vec_qdiv", k).elements:
                u = u + w.scale(F(rng.randint(-9, 9), rng.randint(1, 5)))
            b = [e.normal_trace(u).coeff(0) for e in RefCell.SQUARE.edges]
            d = decompose_divfree(u, "vec_qdiv", k)
            ok &= d.flat_coeffs == [(b[1] - b[3]) / 2, (b[2] - b[0]) / 2, (b[0] + b[2]) / 2]
    record("07 50-field div-free round-trip per (cell, k<=3) + closed form, exact", ok)


def test_criterion_08_jump_constraint_nullity():
    ok = True
    for nx, ny, nullity in ((2, 2, 5), (3, 3, 10), (2, 4, 9)):
        rep = appendix_report(nx, ny)
        ok &= rep.passed
        ok &= value(rep, "nullity") == nullity
        ok &= value(rep, "gamma_row_and_column_sums_zero") is True
    record("08 jump-constraint nullity N+1 and coefficient sums, exact", ok)


def test_criterion_09_lifted_diagrams(lifted_reports):
    ok = all(rep.passed for rep in lifted_reports)
    for rep in lifted_reports:
        ok &= value(rep, "betti_numbers") == [1, 2, 1]
        ok &= value(rep, "first_kernel_dim") == 1
        ok &= value(rep, "second_range_plus_uniform_fills_codomain") == value(rep, "dim_C")
    record("09 lifted-family diagrams, harmonic dims (1,2,1), k=0..1, exact", ok)


def test_criterion_10_hodge_splitting():
    ok = True
    configs = [("tri-dp", 1), ("tri-dp-curl", 1),
               ("quad-enriched", 1), ("quad-enriched-curl", 1)]
    configs += [(name, k) for name in ("tri-drt", "tri-dn", "quad-drt", "quad-dn")
                for k in range(2)]
    for name, k in configs:
        rep = hodge_report(name, 2, 2, k, fields=20, seed=0)
        ok &= rep.passed
        ok &= value(rep, "parts_pairwise_orthogonal") == 20
        ok &= value(rep, "parts_sum_to_input") == 20
        ok &= next(c.passed for c in rep.checks if c.name == "rank_identity")
    record("10 hodge: 20 seeded fields per diagram, exact orthogonal sum", ok)


def test_criterion_11_dof_comparison():
    ok = True
    for k in range(5):
        ok &= local_dim("rt_quad", k) - local_dim("vec_qdiv", k) == 1
        ok &= local_dim("rt_tri", k) - local_dim("vec_p", k) == k + 1
    record("11 per-cell dof gaps: quad lift +1, triangle lift +(k+1)", ok)


def test_criterion_12_float_cross_check(tri_diagram_reports, quad_diagram_reports,
                                        naive_reports, lifted_reports):
    reports = (tri_diagram_reports + quad_diagram_reports
               + naive_reports + lifted_reports)
    float_checks = [c for rep in reports for c in rep.checks if c.backend == "float"]
    ok = bool(float_checks) and all(c.passed for c in float_checks)
    ok &= len(float_checks) == 2 * (12 + 12 + 8) + 3
    record("12 float ranks at 1e-10 match exact on criteria 3-5, 9 matrices", ok)
