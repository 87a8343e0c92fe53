"""Extrinsic and intrinsic curvature of a graph 4-fold in flat R^8.

Everything here is algebraic in the 3-jet. Tensors live in the oriented
orthonormal frames of `PointGeometry`: tangent indices a, b, ... and normal
indices c, d, ... both run over 0..3.

Curvature sign convention: R(X, Y, X, Y) is the sectional curvature, so in
flat space the Gauss and Ricci equations read
    R^M(X, Y, Z, W) = <II(Z, X), II(W, Y)> - <II(Z, Y), II(W, X)>
    R^perp(X, Y, U, V) = <A^U X, A^V Y> - <A^U Y, A^V X>.
As endomorphisms, R(X, Y) has matrix entries [j, i] = R(X, Y, e_i, e_j).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ComplexPoint
from .geometry import PointGeometry, point_geometry
from .jets import ImmersionSpec
from .tolerances import DEFAULT_TOL, Tolerances

FOUR_PI2 = 4.0 * math.pi ** 2

DENSITY_NAMES = ("p1_TM", "p1_NM", "chi_TM", "chi_NM",
                 "p1_L2plus_TM", "p1_L2minus_TM", "p1_L2plus_NM", "p1_L2minus_NM")

# index triples of a 3-form on a 4-space, in the order used for component vectors
TRIPLES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))


def wedge22(alpha: np.ndarray, beta: np.ndarray):
    """(alpha ^ beta)(e0, e1, e2, e3) for 2-forms given as skew 4x4 arrays (real or complex)."""
    return (alpha[0, 1] * beta[2, 3] - alpha[0, 2] * beta[1, 3] + alpha[0, 3] * beta[1, 2]
            + alpha[1, 2] * beta[0, 3] - alpha[1, 3] * beta[0, 2] + alpha[2, 3] * beta[0, 1])


def second_fundamental_form(geom: PointGeometry) -> np.ndarray:
    """II[a, b, c] = <nu_c, (0, Hess f(u_a, u_b))>."""
    hess = np.einsum("kij,ia,jb->abk", geom.jet.hessian, geom.chart, geom.chart)
    return np.einsum("abk,kc->abc", hess, geom.normal[4:, :])


def gauss_curvature(II: np.ndarray) -> np.ndarray:
    return np.einsum("cak,dbk->abcd", II, II) - np.einsum("cbk,dak->abcd", II, II)


def ricci_normal_curvature(II: np.ndarray) -> np.ndarray:
    return np.einsum("aec,bed->abcd", II, II) - np.einsum("bec,aed->abcd", II, II)


def scalar_curvature(RM: np.ndarray) -> float:
    return float(np.einsum("abab->", RM))


def as_endomorphisms(R: np.ndarray) -> np.ndarray:
    """End[x, y] with End[x, y][j, i] = R(x, y, e_i, e_j)."""
    return R.transpose(0, 1, 3, 2)


def _bundle_forms(R: np.ndarray) -> np.ndarray:
    """Curvature 2-forms R_ij(X, Y) = R(X, Y, E_i, E_j) as array [i, j, x, y]."""
    return R.transpose(2, 3, 0, 1)


def p1_density(R: np.ndarray) -> float:
    F = _bundle_forms(R)
    return float(sum(wedge22(F[i, j], F[i, j]) for i, j in itertools.combinations(range(4), 2)) / FOUR_PI2)


def euler_density(R: np.ndarray) -> float:
    F = _bundle_forms(R)
    return float((wedge22(F[0, 1], F[2, 3]) - wedge22(F[0, 2], F[1, 3]) + wedge22(F[0, 3], F[1, 2]))
                 / FOUR_PI2)


def complex_frame_densities(R: np.ndarray) -> dict:
    """p1, chi, p1(L2+), p1(L2-) from components in w1 = (E1 - iE2)/2, w2 = (E3 - iE4)/2."""
    w = np.zeros((4, 4), dtype=complex)  # rows: w1, w1bar, w2, w2bar
    w[0, 0], w[0, 1] = 0.5, -0.5j
    w[1, 0], w[1, 1] = 0.5, 0.5j
    w[2, 2], w[2, 3] = 0.5, -0.5j
    w[3, 2], w[3, 3] = 0.5, 0.5j
    Rc = np.einsum("xyij,Ai,Bj->ABxy", R.astype(complex), w, w)
    one, onebar, two, twobar = 0, 1, 2, 3
    R11, R22 = Rc[one, onebar], Rc[two, twobar]
    R12, Rb12 = Rc[one, two], Rc[onebar, twobar]
    R1b2, R2b1 = Rc[one, twobar], Rc[two, onebar]
    pi2 = math.pi ** 2
    chi = (wedge22(R12, Rb12) - wedge22(R11, R22) + wedge22(R1b2, R2b1)) / pi2
    p1 = (-wedge22(R11, R11) - wedge22(R22, R22) + 2 * wedge22(R12, Rb12) - 2 * wedge22(R1b2, R2b1)) / pi2
    plus = -(wedge22(R11 + R22, R11 + R22) - 4 * wedge22(R12, Rb12)) / pi2
    minus = -(wedge22(R11 - R22, R11 - R22) + 4 * wedge22(R1b2, R2b1)) / pi2
    return {"p1": p1.real, "chi": chi.real, "p1_plus": plus.real, "p1_minus": minus.real,
            "imag": max(abs(p1.imag), abs(chi.imag), abs(plus.imag), abs(minus.imag))}


# orthonormal bases of self-dual / anti-self-dual bivectors as skew matrices
def _bivector(pairs) -> np.ndarray:
    B = np.zeros((4, 4))
    for i, j, c in pairs:
        B[i, j] += c
        B[j, i] -= c
    return B / math.sqrt(2.0)


LAMBDA_PLUS = tuple(_bivector(p) for p in (((0, 1, 1), (2, 3, 1)), ((0, 2, 1), (1, 3, -1)), ((0, 3, 1), (1, 2, 1))))
LAMBDA_MINUS = tuple(_bivector(p) for p in (((0, 1, 1), (2, 3, -1)), ((0, 2, 1), (1, 3, 1)), ((0, 3, 1), (1, 2, -1))))


def lambda2_p1_density(R: np.ndarray, sign: int) -> float:
    """p1 of the induced connection on self-dual (sign +1) or anti-self-dual 2-vectors."""
    basis = LAMBDA_PLUS if sign > 0 else LAMBDA_MINUS
    End = as_endomorphisms(R)  # [x, y, j, i]
    # induced action B -> rho B + B rho^T; pairing <A, B> = tr(A^T B) / 2
    M = np.zeros((3, 3, 4, 4))
    for a, A in enumerate(basis):
        for b, B in enumerate(basis):
            act = np.einsum("xyjk,kl->xyjl", End, B) + np.einsum("jk,xylk->xyjl", B, End)
            M[a, b] = 0.5 * np.einsum("jl,xyjl->xy", A, act)
    return float(sum(wedge22(M[a, b], M[a, b]) for a, b in itertools.combinations(range(3), 2)) / FOUR_PI2)


def nabla_phi_from_II(geom: PointGeometry, II: np.ndarray) -> np.ndarray:
    """(nabla_{u_a} Phi)(u_b) in the normal frame, as array [a, c, b].

    (nabla_X Phi)(Y) = omega_perp(II(X, Y)) - II(X, (F*omega)^# Y).
    """
    Q = geom.omega_perp
    P = geom.sharp
    return np.einsum("cd,abd->acb", Q, II) - np.einsum("aec,eb->acb", II, P)


def nabla_phi(spec: ImmersionSpec, p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    geom = point_geometry(spec, p, tol)
    return nabla_phi_from_II(geom, second_fundamental_form(geom))


def eta_from_parts(Phi: np.ndarray, nphi: np.ndarray, RM: np.ndarray, Rperp: np.ndarray) -> np.ndarray:
    """Full antisymmetric array eta[x, y, z] in the tangent frame.

    With S_X = Phi^-1 nabla_X Phi, Rt(Y, Z) = Phi^-1 R^perp(Y, Z) Phi and
    <A, B> = tr(A^T B):
        eta = -cyc_{XYZ} [ 1/4 <Rt(Y,Z) + R^M(Y,Z), S_X> + 1/12 <S_X, [S_Y, S_Z]> ].
    The sign and scale were fixed by the finite-difference check of
    d eta = pi^2 (p1(L2- NM) - p1(L2- TM)).
    """
    Pinv = np.linalg.inv(Phi)
    S = np.einsum("ij,ajk->aik", Pinv, nphi)
    EM = as_endomorphisms(RM)
    EP = np.einsum("ij,xyjk,kl->xyil", Pinv, as_endomorphisms(Rperp), Phi)
    curv = EM + EP
    eta = np.zeros((4, 4, 4))
    for x, y, z in TRIPLES:
        val = 0.0
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            val += 0.25 * np.sum(curv[b, c] * S[a])
            val += np.sum(S[a] * (S[b] @ S[c] - S[c] @ S[b])) / 12.0
        _fill_antisymmetric(eta, (x, y, z), -val)
    return eta


def transgression_trace_form(Phi: np.ndarray, nphi: np.ndarray, RM: np.ndarray,
                             Rperp: np.ndarray) -> np.ndarray:
    """Chern-Weil transgression between the Levi-Civita connection and Phi^* nabla^perp.

    eta = 1/4 cyc tr(S_X C(Y, Z)) + 1/4 tr(S_X [S_Y, S_Z]) with C = R^M + Phi^-1 R^perp Phi.
    Valid for any invertible Phi; agrees with `eta_from_parts` when Phi is conformal.
    """
    Pinv = np.linalg.inv(Phi)
    S = np.einsum("ij,ajk->aik", Pinv, nphi)
    curv = as_endomorphisms(RM) + np.einsum("ij,xyjk,kl->xyil", Pinv, as_endomorphisms(Rperp), Phi)
    eta = np.zeros((4, 4, 4))
    for x, y, z in TRIPLES:
        val = 0.25 * np.trace(S[x] @ (S[y] @ S[z] - S[z] @ S[y]))
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            val += 0.25 * np.trace(S[a] @ curv[b, c])
        _fill_antisymmetric(eta, (x, y, z), val)
    return eta


def _fill_antisymmetric(eta: np.ndarray, xyz, val: float) -> None:
    for perm in itertools.permutations(range(3)):
        idx = tuple(xyz[i] for i in perm)
        inv = sum(1 for i, j in itertools.combinations(perm, 2) if i > j)
        eta[idx] = -val if inv % 2 else val


@dataclass(frozen=True)
class CurvaturePackage:
    geom: PointGeometry
    II: np.ndarray
    H: np.ndarray
    RM: np.ndarray
    Rperp: np.ndarray
    scalar: float
    densities: dict
    nabla_phi: np.ndarray
    eta: np.ndarray | None  # full antisymmetric [x, y, z] array in the tangent frame

    @property
    def H_norm(self) -> float:
        return float(np.linalg.norm(self.H))

    @property
    def eta_components(self) -> np.ndarray | None:
        if self.eta is None:
            return None
        return np.array([self.eta[t] for t in TRIPLES])

    def eta_chart(self) -> np.ndarray | None:
        """eta(d_i, d_j, d_k) in chart coordinates."""
        if self.eta is None:
            return None
        E = self.geom.chart_inverse
        return np.einsum("abc,ai,bj,ck->ijk", self.eta, E, E, E)

    def density_chart(self, name: str) -> float:
        """Coefficient of dx^1234 for a density 4-form."""
        return self.densities[name] * float(np.linalg.det(self.geom.chart_inverse))


def curvature_package(spec: ImmersionSpec, p, tol: Tolerances = DEFAULT_TOL,
                      geom: PointGeometry | None = None, with_eta: bool = True) -> CurvaturePackage:
    geom = geom or point_geometry(spec, p, tol)
    II = second_fundamental_form(geom)
    H = np.einsum("aac->c", II) / 4.0
    RM = gauss_curvature(II)
    Rperp = ricci_normal_curvature(II)
    tm = complex_frame_densities(RM)
    nm = complex_frame_densities(Rperp)
    densities = {
        "p1_TM": tm["p1"], "p1_NM": nm["p1"], "chi_TM": tm["chi"], "chi_NM": nm["chi"],
        "p1_L2plus_TM": tm["p1_plus"], "p1_L2minus_TM": tm["p1_minus"],
        "p1_L2plus_NM": nm["p1_plus"], "p1_L2minus_NM": nm["p1_minus"],
    }
    nphi = nabla_phi_from_II(geom, II)
    eta = None
    if with_eta and geom.sin2 > tol.eta_sin2:
        eta = eta_from_parts(geom.phi, nphi, RM, Rperp)
    return CurvaturePackage(geom, II, H, RM, Rperp, scalar_curvature(RM), densities, nphi, eta)


def eta_form(spec: ImmersionSpec, p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """The 3-form as its four frame components (012, 013, 023, 123)."""
    pkg = curvature_package(spec, p, tol)
    if pkg.eta is None:
        raise ComplexPoint(f"sin^2 theta = {pkg.geom.sin2:.3e} too small for Phi^-1")
    return pkg.eta_components


# ---------------------------------------------------------------- identities used by tests


def rbar_phi(RM: np.ndarray, Rperp: np.ndarray, Phi: np.ndarray) -> np.ndarray:
    """(Rbar(X, Y) Phi)(Z) = R^perp(X, Y) Phi Z - Phi(R^M(X, Y) Z), array [x, y, c, z]."""
    return (np.einsum("xydc,cz->xydz", as_endomorphisms(Rperp), Phi)
            - np.einsum("dj,xyjz->xydz", Phi, as_endomorphisms(RM)))


def weitzenbock_pairing(RM: np.ndarray, K: np.ndarray) -> float:
    """<S phi, phi> for the Weitzenbock operator on 2-forms, phi given by K[a, b] = phi(e_a, e_b).

    (Rbar(X, Y) phi)(u, v) = -phi(R(X, Y) u, v) - phi(u, R(X, Y) v)
    S phi(X, Y) = sum_i -(Rbar(e_i, X) phi)(e_i, Y) + (Rbar(e_i, Y) phi)(e_i, X)
    Pairing of 2-forms: sum over a < b.
    """
    End = as_endomorphisms(RM)  # [x, y, j, i]
    # Rbar[x, y, u, v] = -sum_j End[x,y,j,u] K[j,v] - sum_j K[u,j] End[x,y,j,v]
    Rbar = -np.einsum("xyju,jv->xyuv", End, K) - np.einsum("uj,xyjv->xyuv", K, End)
    Sphi = -np.einsum("iXiY->XY", Rbar) + np.einsum("iYiX->XY", Rbar)
    return float(0.5 * np.sum(Sphi * K))


def nabla_pullback_form(II: np.ndarray, Phi: np.ndarray) -> np.ndarray:
    """(nabla_Z F*omega)(X, Y) = -<II(Z, X), Phi Y> + <II(Z, Y), Phi X>, array [z, x, y]."""
    A = np.einsum("zxc,cy->zxy", II, Phi)
    return -A + A.transpose(0, 2, 1)
