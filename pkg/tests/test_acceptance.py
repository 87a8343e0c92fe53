"""Acceptance criteria 1-11. Each test records one PASS/FAIL line, printed at the end of the run."""
import itertools
import math

import numpy as np
import pytest

from cayleygraph import catalog
from cayleygraph.calibration import COMPLEX_ORDER, calibration_defect, omega_triangle
from cayleygraph.curvature import curvature_package, second_fundamental_form
from cayleygraph.fields import (ROUNDING_FLOOR, codifferential_2form, cos2_at, exterior_derivative,
                                pde_residual, pullback_form_at, richardson, transgression_residual)
from cayleygraph.geometry import PointClass, angle_coefficients, kahler_cosines, point_geometry
from cayleygraph.jets import random_polynomial_spec

from conftest import record_criterion, sample_points

GRID9 = np.linspace(-1.0, 1.0, 9)
CALIBRATED = ("cayley-sin-sinh", "j-plus-quadratic-1", "j-plus-quadratic-2")


def _grid_packages(entry_id):
    spec = catalog.build(entry_id)
    out = []
    for p in itertools.product(GRID9, repeat=4):
        p = np.array(p)
        out.append((p, curvature_package(spec, p, with_eta=False)))
    return out


@pytest.fixture(scope="module")
def cayley_grid():
    return _grid_packages("cayley-sin-sinh")


def test_criterion_01_linear_angle_law():
    worst = 0.0
    for a in (0.0, 0.25, 0.5, 1.0, 2.0, -1.5):
        g = point_geometry(catalog.build("linear-a-Jw", a=a), [0.3, -0.7, 0.2, 0.9])
        expect = 2 * abs(a) / (1 + a * a)
        worst = max(worst, abs(g.angles[0] - expect), abs(g.angles[1] - expect))
    ok = worst <= 1e-12
    record_criterion(1, ok, f"max |cos - 2|a|/(1+a^2)| = {worst:.2e} over 6 values of a")
    assert ok


def test_criterion_02_closed_form_on_grid(cayley_grid):
    entry = catalog.get_entry("cayley-sin-sinh")
    worst = 0.0
    for p, k in cayley_grid:
        expect = entry.expected(p, {})
        worst = max(worst, abs(k.geom.angles[0] - expect), abs(k.geom.angles[1] - expect))
    origin = point_geometry(entry.build(), np.zeros(4)).angles[0]
    ok = worst <= 1e-10 and abs(origin - 2 / math.sqrt(5)) <= 1e-12
    record_criterion(2, ok, f"9^4 nodes, max deviation {worst:.2e}, cos(0) = {origin:.15f}")
    assert ok


def test_criterion_03_minimality(cayley_grid):
    worst = {"cayley-sin-sinh": max(k.H_norm for _, k in cayley_grid)}
    for entry_id in ("lagrangian-sin-sinh", "hopf-cone"):
        spec = catalog.build(entry_id)
        w = 0.0
        for p in itertools.product(GRID9, repeat=4):
            p = np.array(p)
            if entry_id == "hopf-cone" and np.linalg.norm(p) < 0.2:
                continue
            geom = point_geometry(spec, p)
            w = max(w, float(np.linalg.norm(np.einsum("aac->c", second_fundamental_form(geom)) / 4.0)))
        worst[entry_id] = w
    ok = max(worst.values()) <= 1e-9
    record_criterion(3, ok, "max |H|: " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))
    assert ok


def test_criterion_04_quadratic_roots_vs_eigensolve():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(1000):
        spec = random_polynomial_spec(rng)
        jet = point_geometry(spec, rng.uniform(-1, 1, 4)).jet
        df = jet.jacobian
        c1, c2 = kahler_cosines(df - df.T, np.eye(4) + df.T @ df)
        mu = angle_coefficients(jet).roots()
        worst = max(worst, abs(mu[0] - c1 * c1), abs(mu[1] - c2 * c2))
    ok = worst <= 1e-9
    record_criterion(4, ok, f"1000 random polynomials, max |root - cos^2| = {worst:.2e}")
    assert ok


def test_criterion_05_calibration(cayley_grid):
    spec = catalog.build("cayley-sin-sinh")
    worst, count = 0.0, 0
    for p, k in cayley_grid:
        if k.geom.classification is PointClass.LAGRANGIAN:
            continue
        worst = max(worst, abs(calibration_defect(spec, p, "Omega", geom=k.geom)))
        count += 1
    ok = worst <= 1e-9 and count > 0
    record_criterion(5, ok, f"Omega, {count} non-Lagrangian nodes, max defect {worst:.2e}")
    assert ok


def test_criterion_06_omega_triangle_isometry():
    rng = np.random.default_rng(6)
    worst_orth, worst_det, n = 0.0, 0.0, 0
    while n < 100:
        entry_id = CALIBRATED[n % 3]
        spec = catalog.build(entry_id)
        p = sample_points(entry_id, rng, 1)[0]
        g = point_geometry(spec, p)
        if g.classification in (PointClass.COMPLEX, PointClass.LAGRANGIAN):
            continue
        M = omega_triangle(spec, p, geom=g)
        worst_orth = max(worst_orth, float(np.abs(M @ M.T - np.eye(3)).max()))
        worst_det = max(worst_det, abs(np.linalg.det(M) + 1.0))
        n += 1
    ok = worst_orth <= 1e-9 and worst_det <= 1e-9
    record_criterion(6, ok, f"100 points, max |M M^T - I| {worst_orth:.1e}, max |det + 1| {worst_det:.1e}")
    assert ok


def test_criterion_07_selfdual_p1(cayley_grid):
    rows = {"cayley-sin-sinh": cayley_grid, "j-plus-quadratic-1": _grid_packages("j-plus-quadratic-1")}
    worst, count = 0.0, 0
    for packages in rows.values():
        for _, k in packages:
            if k.geom.classification is PointClass.COMPLEX:
                continue
            d = k.densities
            a, b = d["p1_L2plus_TM"], d["p1_L2plus_NM"]
            worst = max(worst, abs(a - b) / (1.0 + abs(a)))
            count += 1
    ok = worst <= 1e-8
    record_criterion(7, ok, f"{count} non-degenerate nodes, max relative gap {worst:.2e}")
    assert ok


def test_criterion_08_transgression_order():
    """On j-plus-quadratic-1 eta vanishes identically, so both residuals sit at rounding level
    and no order can be observed; the identity is then exact. The convergence machinery is
    exercised on data where eta is nonzero: the hopf cone and a random polynomial (trace form).
    """
    spec = catalog.build("j-plus-quadratic-1")
    rng = np.random.default_rng(8)
    points = [p for p in sample_points("j-plus-quadratic-1", rng, 200, box=1.5) if np.linalg.norm(p) >= 0.5][:20]
    orders, degenerate, worst = [], 0, 0.0
    for p in points:
        r = richardson(lambda h: transgression_residual(spec, p, h), 1e-2)
        worst = max(worst, r.coarse, r.fine)
        if r.order is None:
            degenerate += 1
        else:
            orders.append(r.order)
    main_ok = len(points) == 20 and all(o >= 1.8 for o in orders)
    hopf = richardson(lambda h: transgression_residual(catalog.build("hopf-cone"), [0.5, 0.3, -0.2, 0.1], h), 1e-2)
    rand_spec = random_polynomial_spec(np.random.default_rng(3), degree=3, scale=0.5)
    rand = richardson(lambda h: transgression_residual(rand_spec, [0.2, -0.1, 0.3, 0.15], h, form="trace"), 1e-2)
    side_ok = hopf.order >= 1.8 and rand.order >= 1.8
    ok = main_ok and side_ok
    record_criterion(8, ok, f"j-plus-quadratic-1: {degenerate}/20 at rounding floor {ROUNDING_FLOOR:g} "
                            f"(max residual {worst:.1e}), {len(orders)} with order >= 1.8; "
                            f"nontrivial orders hopf {hopf.order:.2f}, random/trace {rand.order:.2f}")
    assert ok


def test_criterion_09_pde_order():
    """The Laplacian nests two central differences, so rounding grows like eps / h^2; the step
    pair 8e-3, 4e-3 keeps truncation dominant even where its coefficient is ~1e-9."""
    spec = catalog.build("cayley-sin-sinh")
    rng = np.random.default_rng(9)
    orders = []
    while len(orders) < 20:
        p = rng.uniform(-1, 1, 4)
        if cos2_at(spec, p) < 0.05:
            continue
        orders.append(richardson(lambda h: pde_residual(spec, p, h), 8e-3).order)
    ok = min(orders) >= 1.8
    record_criterion(9, ok, f"20 points with cos^2 >= 0.05, observed order {min(orders):.2f} to {max(orders):.2f}")
    assert ok


def _wedge12(a, b):
    out = np.zeros((4, 4, 4))
    for i, j, k in itertools.product(range(4), repeat=3):
        out[i, j, k] = a[i] * b[j, k] - a[j] * b[i, k] + a[k] * b[i, j]
    return out


def _converges(residual, step=2e-3):
    """A difference identity holds when its residual is negligible or shrinks at second order."""
    r = richardson(residual, step)
    return r.fine <= 1e-6 or (r.order is not None and r.order >= 1.8)


def _property_failures(spec, p):
    """Names of the properties that fail at p (empty when all pass)."""
    k = curvature_package(spec, p, with_eta=False)
    g = k.geom
    bad = []
    if g.classification is PointClass.EQUAL:
        if np.abs(g.xi @ g.phi + g.sin2 * np.eye(4)).max() > 1e-10:
            bad.append("xi-phi")
        J = g.J_omega_frame
        e = np.eye(4)
        rest = e - np.outer(e[:, 0], e[:, 0]) - np.outer(J[:, 0], J[:, 0])
        X2 = rest[:, np.argmax(np.linalg.norm(rest, axis=0))]
        X2 = X2 / np.linalg.norm(X2)
        T = np.column_stack([e[:, 0], J[:, 0], X2, J @ X2])
        vol = np.linalg.det(np.hstack([g.tangent @ T, g.normal @ g.phi @ T])[COMPLEX_ORDER])
        if abs(vol - g.sin2 ** 2) > 1e-9 or vol <= 0:
            bad.append("positivity")
        lhs = np.einsum("xyij,ik,jk->xy", k.Rperp, g.phi, g.phi @ J)
        if np.abs(lhs - g.sin2 * np.einsum("xyij,ji->xy", k.RM, J)).max() > 1e-10:
            bad.append("trace")
    if not np.allclose(-np.einsum("aca->c", k.nabla_phi), -4 * g.omega_perp @ k.H, atol=1e-10):
        bad.append("delta-phi")
    W = lambda q: pullback_form_at(spec, q)
    if not _converges(lambda h: np.abs(codifferential_2form(spec, W, p, h)).max()):
        bad.append("coclosed")
    if g.cos2 >= 0.05 and g.classification is PointClass.EQUAL:
        om = lambda q: pullback_form_at(spec, q) / math.sqrt(cos2_at(spec, q))

        def conformal_defect(h):
            dlog = exterior_derivative(lambda q: 0.5 * math.log(cos2_at(spec, q)), p, h)
            return np.abs(exterior_derivative(om, p, h) + _wedge12(dlog, om(p))).max()

        if not _converges(conformal_defect):
            bad.append("conformal-closed")
    R = k.RM
    sym = max(np.abs(R + R.transpose(1, 0, 2, 3)).max(), np.abs(R - R.transpose(2, 3, 0, 1)).max(),
              np.abs(R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)).max(),
              np.abs(k.Rperp + k.Rperp.transpose(0, 1, 3, 2)).max())
    if sym > 1e-12:
        bad.append("symmetries")
    d = k.densities
    for b in ("TM", "NM"):
        if (abs(d[f"p1_L2plus_{b}"] - d[f"p1_{b}"] - 2 * d[f"chi_{b}"]) > 1e-12
                or abs(d[f"p1_L2minus_{b}"] - d[f"p1_{b}"] + 2 * d[f"chi_{b}"]) > 1e-12):
            bad.append("lambda2-split")
    return bad


def test_criterion_10_property_suites():
    rng = np.random.default_rng(10)
    failures, total = {}, 0
    examples = CALIBRATED + ("hopf-cone",)
    for entry_id in examples:
        spec = catalog.build(entry_id)
        for p in sample_points(entry_id, rng, 200):
            total += 1
            for name in _property_failures(spec, p):
                failures[name] = failures.get(name, 0) + 1
    ok = not failures
    detail = f"{total} points over {len(examples)} examples" + (f", failures {failures}" if failures else ", all pass")
    record_criterion(10, ok, detail)
    assert ok


def test_criterion_11_complex_point_detection():
    spec = catalog.build("j-plus-quadratic-1")
    complex_nodes, near = [], []
    for p in itertools.product(GRID9, repeat=4):
        g = point_geometry(spec, p)
        if g.classification is PointClass.COMPLEX:
            complex_nodes.append(tuple(float(x) for x in p))
        elif g.sin2 <= 1e-10:
            near.append(p)
    ok = complex_nodes == [(0.0, 0.0, 0.0, 0.0)] and not near
    record_criterion(11, ok, f"9^4 grid: complex nodes {complex_nodes}, other nodes with sin^2 <= 1e-10: {len(near)}")
    assert ok
