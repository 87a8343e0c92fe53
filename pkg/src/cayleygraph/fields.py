"""Grid scans and finite-difference calculus on the graph metric.

The pointwise quantities come from `geometry`, `calibration` and `curvature`,
which are exact in the jet. Everything that needs a derivative of a pointwise
field (Laplacians, exterior derivatives, the transgression identity, tube
integrals) lives here and uses central differences or Gauss-Legendre quadrature.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .calibration import CayleyVariant, calibration_defect, omega_triangle
from .curvature import DENSITY_NAMES, TRIPLES, curvature_package, transgression_trace_form
from .errors import (CayleyGraphError, ComplexPoint, NearComplex, NearLagrangian,
                     QuadratureNonConvergent, StencilOutOfDomain)
from .geometry import J0, PointClass, kahler_cosines, point_geometry
from .jets import ImmersionSpec, as_point, evaluate_jet
from .tolerances import DEFAULT_TOL, Tolerances

Sampler = Callable[[np.ndarray], "float | np.ndarray"]

# below this a residual is indistinguishable from rounding and carries no order information
ROUNDING_FLOOR = 1e-12


def default_step(domain_scale: float) -> float:
    return max(1e-4, 1e-3 * domain_scale)


# ---------------------------------------------------------------- grids


@dataclass(frozen=True)
class GridRequest:
    lower: tuple[float, float, float, float]
    upper: tuple[float, float, float, float]
    resolution: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.lower) != 4 or len(self.upper) != 4 or len(self.resolution) != 4:
            raise ValueError("grid needs 4 intervals and 4 resolutions")
        for a, b, n in zip(self.lower, self.upper, self.resolution):
            if int(n) < 1:
                raise ValueError("resolution must be positive")
            if n > 1 and not b > a:
                raise ValueError("each interval needs lower < upper")

    @classmethod
    def cube(cls, lo: float, hi: float, n: int) -> "GridRequest":
        return cls((lo,) * 4, (hi,) * 4, (n,) * 4)

    @property
    def steps(self) -> tuple[float, ...]:
        return tuple((b - a) / (n - 1) if n > 1 else 0.0
                     for a, b, n in zip(self.lower, self.upper, self.resolution))

    @property
    def scale(self) -> float:
        return max(b - a for a, b in zip(self.lower, self.upper))

    def axis(self, i: int) -> np.ndarray:
        n = self.resolution[i]
        if n == 1:
            return np.array([0.5 * (self.lower[i] + self.upper[i])])
        return np.linspace(self.lower[i], self.upper[i], n)

    def nodes(self) -> np.ndarray:
        """All nodes in row-major order (last axis fastest)."""
        axes = [self.axis(i) for i in range(4)]
        return np.array(list(itertools.product(*axes)), dtype=float)

    def require_differentiable(self, axes: Sequence[int] = range(4)) -> None:
        for i in axes:
            if self.resolution[i] < 5:
                raise ValueError(f"axis {i} needs at least 5 nodes for central stencils")


@dataclass
class FieldGrid:
    request: GridRequest
    fields: tuple[str, ...]
    samples: list = field(default_factory=list)

    def column(self, name: str) -> list:
        return [s.get(name) for s in self.samples]

    def ok(self) -> list:
        return [s for s in self.samples if s["status"] == "ok"]


SCAN_FIELDS = ("angles", "mean_curvature", "scalar", "calibration", "omega_triangle", "densities", "eta")


def _node_record(spec: ImmersionSpec, p: np.ndarray, fields: Sequence[str], tol: Tolerances,
                 mask_radius: float) -> dict:
    rec: dict = {"x": p[0], "y": p[1], "z": p[2], "w": p[3], "status": "ok"}
    if spec.distance_to_singular(p) <= mask_radius:
        rec["status"] = "skipped:singular"
        return rec
    try:
        geom = point_geometry(spec, p, tol)
        if "angles" in fields:
            rec["cos1"], rec["cos2"] = geom.angles
            rec["sin2"] = geom.sin2
            rec["classification"] = geom.classification.value
        if "calibration" in fields:
            rec["defect_Omega"] = calibration_defect(spec, p, CayleyVariant.OMEGA, tol, geom)
            rec["defect_OmegaPrime"] = calibration_defect(spec, p, CayleyVariant.OMEGA_PRIME, tol, geom)
        if "omega_triangle" in fields and geom.classification is not PointClass.COMPLEX:
            M = omega_triangle(spec, p, CayleyVariant.OMEGA, tol, geom)
            rec["triangle_orth_err"] = float(np.abs(M @ M.T - np.eye(3)).max())
            rec["triangle_det"] = float(np.linalg.det(M))
        if {"mean_curvature", "scalar", "densities", "eta"} & set(fields):
            pkg = curvature_package(spec, p, tol, geom, with_eta="eta" in fields)
            if "mean_curvature" in fields:
                rec["H_norm"] = pkg.H_norm
            if "scalar" in fields:
                rec["scalar"] = pkg.scalar
            if "densities" in fields:
                for name in DENSITY_NAMES:
                    rec[name] = pkg.densities[name]
            if "eta" in fields:
                if pkg.eta is None or geom.sin2 < tol.guard_sin2:
                    rec["status"] = "skipped:near_complex"
                else:
                    for t, v in zip(TRIPLES, pkg.eta_components):
                        rec["eta_" + "".join(str(i) for i in t)] = v
    except CayleyGraphError as exc:
        rec["status"] = f"error:{exc.code}"
    return rec


def resolve_threads(threads: int) -> int:
    if threads < 0:
        raise ValueError("threads must be >= 0")
    return threads or (os.cpu_count() or 1)


def parallel_map(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """Ordered map; results come back in input order whatever the worker count."""
    n = resolve_threads(threads)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def scan(spec: ImmersionSpec, grid: GridRequest, fields: Sequence[str] = ("angles",),
         tol: Tolerances = DEFAULT_TOL, threads: int = 1, mask_radius: float = 0.0) -> FieldGrid:
    """Evaluate pointwise fields at every node. Failures become per-node markers."""
    unknown = set(fields) - set(SCAN_FIELDS)
    if unknown:
        raise ValueError(f"unknown scan fields {sorted(unknown)}")
    nodes = grid.nodes()
    records = parallel_map(lambda p: _node_record(spec, p, tuple(fields), tol, mask_radius),
                           list(nodes), threads)
    return FieldGrid(grid, tuple(fields), records)


# ---------------------------------------------------------------- samplers


def metric_at(spec: ImmersionSpec, q) -> np.ndarray:
    df = evaluate_jet(spec, q, order=1).jacobian
    return np.eye(4) + df.T @ df


def pullback_form_at(spec: ImmersionSpec, q) -> np.ndarray:
    df = evaluate_jet(spec, q, order=1).jacobian
    return df - df.T


def cos2_at(spec: ImmersionSpec, q) -> float:
    df = evaluate_jet(spec, q, order=1).jacobian
    c1, c2 = kahler_cosines(df - df.T, np.eye(4) + df.T @ df)
    return 0.5 * (c1 * c1 + c2 * c2)


def log_cos2_sampler(spec: ImmersionSpec) -> Sampler:
    def h(q):
        c2 = cos2_at(spec, q)
        if c2 <= 0.0:
            raise NearLagrangian(f"cos^2 theta = 0 at {np.asarray(q).tolist()}")
        return math.log(c2)
    return h


def eta_chart_sampler(spec: ImmersionSpec, tol: Tolerances = DEFAULT_TOL, form: str = "expanded") -> Sampler:
    """eta(d_i, d_j, d_k) in chart coordinates.

    form="expanded" uses the expanded formula (valid at equal-angle points),
    form="trace" the general transgression that holds for any invertible Phi.
    """
    if form not in ("expanded", "trace"):
        raise ValueError("form must be 'expanded' or 'trace'")

    def sample(q):
        pkg = curvature_package(spec, q, tol, with_eta=(form == "expanded"))
        if pkg.geom.sin2 < tol.guard_sin2:
            raise NearComplex(f"sin^2 theta = {pkg.geom.sin2:.3e} at {np.asarray(q).tolist()}")
        if form == "expanded":
            return pkg.eta_chart()
        eta = transgression_trace_form(pkg.geom.phi, pkg.nabla_phi, pkg.RM, pkg.Rperp)
        E = pkg.geom.chart_inverse
        return np.einsum("abc,ai,bj,ck->ijk", eta, E, E, E)
    return sample


# ---------------------------------------------------------------- difference operators


def _check_stencil(spec: ImmersionSpec, p: np.ndarray, reach: float) -> None:
    if spec.distance_to_singular(p) <= reach:
        raise StencilOutOfDomain(f"stencil of radius {reach:g} at {p.tolist()} meets a singular point")


def fd_partials(sampler: Sampler, p, step: float) -> np.ndarray:
    """Central differences d_i s(p), stacked along a new leading axis."""
    p = as_point(p)
    out = []
    for i in range(4):
        e = np.zeros(4)
        e[i] = step
        out.append((np.asarray(sampler(p + e)) - np.asarray(sampler(p - e))) / (2.0 * step))
    return np.array(out)


def exterior_derivative(sampler: Sampler, p, step: float) -> np.ndarray:
    """d of a k-form given as a full antisymmetric chart array (k = 0 for scalars)."""
    D = fd_partials(sampler, p, step)  # D[j, i1..ik] = d_j alpha_{i1..ik}
    k = D.ndim - 1
    out = np.zeros((4,) * (k + 1))
    for idx in itertools.product(range(4), repeat=k + 1):
        if len(set(idx)) < k + 1:
            continue
        out[idx] = sum((-1) ** j * D[(idx[j],) + idx[:j] + idx[j + 1:]] for j in range(k + 1))
    return out


def laplace_beltrami(spec: ImmersionSpec, sampler: Sampler, p, step: float) -> float:
    """(1/sqrt g) d_i (sqrt g g^ij d_j h), both derivative layers by central differences.

    The metric is evaluated exactly at the four-point flux nodes p +- step e_i.
    """
    p = as_point(p)
    _check_stencil(spec, p, 2.0 * step)
    E = np.eye(4) * step

    def flux(q, i):
        grad = fd_partials(sampler, q, step)
        G = metric_at(spec, q)
        return math.sqrt(np.linalg.det(G)) * np.linalg.solve(G, grad)[i]

    div = sum((flux(p + E[i], i) - flux(p - E[i], i)) / (2.0 * step) for i in range(4))
    return float(div / math.sqrt(np.linalg.det(metric_at(spec, p))))


def codifferential_2form(spec: ImmersionSpec, sampler: Sampler, p, step: float) -> np.ndarray:
    """(delta alpha)_j = -g_jk (1/sqrt g) d_i (sqrt g alpha^ik) for a chart 2-form sampler."""
    p = as_point(p)
    _check_stencil(spec, p, step)

    def raised(q):
        G = metric_at(spec, q)
        Ginv = np.linalg.inv(G)
        return math.sqrt(np.linalg.det(G)) * Ginv @ np.asarray(sampler(q)) @ Ginv

    D = fd_partials(raised, p, step)  # D[m, i, k]
    G = metric_at(spec, p)
    div = np.einsum("iik->k", D) / math.sqrt(np.linalg.det(G))
    return -G @ div


# ---------------------------------------------------------------- residuals


@dataclass(frozen=True)
class Richardson:
    step: float
    coarse: float
    fine: float

    @property
    def order(self) -> float | None:
        """log2 of the residual ratio; None when both residuals sit at rounding level."""
        if self.coarse <= ROUNDING_FLOOR and self.fine <= ROUNDING_FLOOR:
            return None
        if self.fine <= 0.0:
            return math.inf
        return math.log2(self.coarse / self.fine)


def richardson(residual: Callable[[float], float], step: float) -> Richardson:
    return Richardson(step, residual(step), residual(step / 2.0))


def pde_residual(spec: ImmersionSpec, p, step: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """|Laplace-Beltrami of log cos^2 theta - s^M| at p."""
    p = as_point(p)
    geom = point_geometry(spec, p, tol)
    if geom.cos2 < tol.guard_cos2:
        raise NearLagrangian(f"cos^2 theta = {geom.cos2:.3e} is inside the guard band")
    lap = laplace_beltrami(spec, log_cos2_sampler(spec), p, step)
    return abs(lap - curvature_package(spec, p, tol, geom, with_eta=False).scalar)


def transgression_defect(spec: ImmersionSpec, p, step: float, tol: Tolerances = DEFAULT_TOL,
                         form: str = "expanded") -> tuple[float, float]:
    """(density side, (1/pi^2) d eta) as dx^1234 coefficients.

    The density side is p1(L2- NM) - p1(L2- TM) for the expanded form and
    2 (p1(NM) - p1(TM)) for the trace form; the two agree on Cayley graphs.
    """
    p = as_point(p)
    _check_stencil(spec, p, step)
    pkg = curvature_package(spec, p, tol, with_eta=False)
    if form == "expanded":
        lhs = pkg.density_chart("p1_L2minus_NM") - pkg.density_chart("p1_L2minus_TM")
    else:
        lhs = 2.0 * (pkg.density_chart("p1_NM") - pkg.density_chart("p1_TM"))
    d_eta = exterior_derivative(eta_chart_sampler(spec, tol, form), p, step)
    return float(lhs), float(d_eta[0, 1, 2, 3] / math.pi ** 2)


def transgression_residual(spec: ImmersionSpec, p, step: float, tol: Tolerances = DEFAULT_TOL,
                         form: str = "expanded") -> float:
    lhs, rhs = transgression_defect(spec, p, step, tol, form)
    return abs(lhs - rhs)


# ---------------------------------------------------------------- sphere and shell quadrature


def _sphere_nodes(n: int):
    """Gauss-Legendre product rule on (psi, theta, phi) in [0,pi]^2 x [0,2pi]."""
    t, w = np.polynomial.legendre.leggauss(n)
    a = 0.5 * math.pi * (t + 1.0)
    wa = 0.5 * math.pi * w
    t2, w2 = np.polynomial.legendre.leggauss(2 * n)
    b = math.pi * (t2 + 1.0)
    wb = math.pi * w2
    for (psi, wp), (th, wt), (ph, wf) in itertools.product(zip(a, wa), zip(a, wa), zip(b, wb)):
        yield psi, th, ph, wp * wt * wf


def _sphere_frame(psi: float, th: float, ph: float):
    sp, cp, st, ct, sf, cf = math.sin(psi), math.cos(psi), math.sin(th), math.cos(th), math.sin(ph), math.cos(ph)
    n = np.array([cp, sp * ct, sp * st * cf, sp * st * sf])
    d_psi = np.array([-sp, cp * ct, cp * st * cf, cp * st * sf])
    d_th = np.array([0.0, -sp * st, sp * ct * cf, sp * ct * sf])
    d_ph = np.array([0.0, 0.0, -sp * st * sf, sp * st * cf])
    return n, d_psi, d_th, d_ph


def _sphere_integral(spec, center, radius, n, tol, form, threads) -> float:
    sample = eta_chart_sampler(spec, tol, form)

    def one(node):
        psi, th, ph, w = node
        nrm, a, b, c = _sphere_frame(psi, th, ph)
        a, b, c = radius * a, radius * b, radius * c
        eta = sample(center + radius * nrm)
        orient = np.sign(np.linalg.det(np.column_stack([nrm, a, b, c])))
        return w * orient * float(np.einsum("ijk,i,j,k->", eta, a, b, c))

    return math.fsum(parallel_map(one, list(_sphere_nodes(n)), threads))


def tube_integral_eta(spec: ImmersionSpec, center, radius: float, order: int = 6,
                      tol: Tolerances = DEFAULT_TOL, form: str = "expanded", check: bool = True,
                      quad_tol: float = 1e-6, threads: int = 1) -> float:
    """Integral of eta over the coordinate 3-sphere |x - center| = radius, outward oriented.

    eta is a 3-form, so its pullback carries the volume factor; no metric
    weight is added. With check=True the rule is repeated at order + 2 and the
    finer value is returned if the two agree to quad_tol (relative to 1 + |value|).
    """
    center = as_point(center)
    if radius <= 0:
        raise ValueError("radius must be positive")
    for sing in spec.singular_points():
        if abs(np.linalg.norm(sing - center) - radius) <= 1e-9 * radius:
            raise StencilOutOfDomain("sphere passes through a singular point")
    try:
        coarse = _sphere_integral(spec, center, radius, order, tol, form, threads)
        if not check:
            return coarse
        fine = _sphere_integral(spec, center, radius, order + 2, tol, form, threads)
    except (ComplexPoint, NearComplex) as exc:
        raise NearComplex(f"radius {radius:g} too small: {exc}") from None
    if abs(fine - coarse) > quad_tol * (1.0 + abs(fine)):
        raise QuadratureNonConvergent(f"orders {order} and {order + 2} give {coarse!r} and {fine!r}")
    return fine


def shell_integral_d_eta(spec: ImmersionSpec, center, r1: float, r2: float, order: int = 6,
                         tol: Tolerances = DEFAULT_TOL, form: str = "expanded", threads: int = 1) -> float:
    """pi^2 times the density side of the transgression identity, integrated over r1 < |x - c| < r2.

    By Stokes this equals tube(r2) - tube(r1), which makes a self-consistency oracle.
    """
    center = as_point(center)
    t, w = np.polynomial.legendre.leggauss(order)
    rho = r1 + 0.5 * (r2 - r1) * (t + 1.0)
    wr = 0.5 * (r2 - r1) * w

    def density(x):
        pkg = curvature_package(spec, x, tol, with_eta=False)
        if form == "expanded":
            return pkg.density_chart("p1_L2minus_NM") - pkg.density_chart("p1_L2minus_TM")
        return 2.0 * (pkg.density_chart("p1_NM") - pkg.density_chart("p1_TM"))

    nodes = [(r, wrr, node) for r, wrr in zip(rho, wr) for node in _sphere_nodes(order)]

    def one(item):
        r, wrr, (psi, th, ph, wa) = item
        nrm = _sphere_frame(psi, th, ph)[0]
        jac = r ** 3 * math.sin(psi) ** 2 * math.sin(th)
        return wrr * wa * jac * density(center + r * nrm)

    return math.pi ** 2 * math.fsum(parallel_map(one, nodes, threads))


# ---------------------------------------------------------------- finite-difference oracles


def christoffel(spec: ImmersionSpec, q) -> np.ndarray:
    """Gamma^k_ij of the graph metric, from exact jets: g^kl sum_a f^a_ij f^a_l."""
    jet = evaluate_jet(spec, q, order=2)
    G = np.eye(4) + jet.jacobian.T @ jet.jacobian
    low = np.einsum("aij,al->lij", jet.hessian, jet.jacobian)
    return np.linalg.solve(G, low.reshape(4, 16)).reshape(4, 4, 4)


def fd_intrinsic_curvature(spec: ImmersionSpec, p, step: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """R^M in the orthonormal tangent frame, from differenced Christoffel symbols.

    Uses the same sign convention as the Gauss-equation path:
    R(a, b, c, d) = g(R_std(e_b, e_a) e_c, e_d) with R_std the usual
    nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y].
    """
    p = as_point(p)
    dG = fd_partials(lambda q: christoffel(spec, q), p, step)  # [m, l, i, k]
    Gam = christoffel(spec, p)
    # R^l_{ijk} = d_i Gam^l_jk - d_j Gam^l_ik + Gam^l_im Gam^m_jk - Gam^l_jm Gam^m_ik
    R = (np.einsum("iljk->lijk", dG) - np.einsum("jlik->lijk", dG)
         + np.einsum("lim,mjk->lijk", Gam, Gam) - np.einsum("ljm,mik->lijk", Gam, Gam))
    geom = point_geometry(spec, p, tol)
    low = np.einsum("lm,mijk->ijkl", geom.metric, R)  # g(R(d_i, d_j) d_k, d_l)
    swapped = low.transpose(1, 0, 2, 3)
    C = geom.chart
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", swapped, C, C, C, C)


def fd_nabla_phi(spec: ImmersionSpec, p, step: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """(nabla Phi) in frames, array [a, c, b], from (d_i[(J0 dF_j)^perp])^perp - Phi((d_i d_j F)^T)."""
    p = as_point(p)
    geom = point_geometry(spec, p, tol)

    def phi_fields(q):
        df = evaluate_jet(spec, q, order=1).jacobian
        dF = np.vstack([np.eye(4), df])
        Nraw = np.vstack([-df.T, np.eye(4)])
        Pperp = Nraw @ np.linalg.solve(Nraw.T @ Nraw, Nraw.T)
        return Pperp @ J0 @ dF  # column j: Phi(d_j) as an ambient vector

    D = fd_partials(phi_fields, p, step)  # [i, :, j]
    first = np.einsum("sc,isj->icj", geom.normal, D)
    hessF = np.concatenate([np.zeros((4, 4, 4)), geom.jet.hessian], axis=0)  # [:, i, j]
    tang = np.einsum("sa,sij->aij", geom.tangent, hessF)  # frame components of the tangential part
    second = np.einsum("ca,aij->icj", geom.phi, tang)
    chart_version = first - second  # [i, c, j] in chart derivative indices
    C = geom.chart
    return np.einsum("icj,ia,jb->acb", chart_version, C, C)
