"""Pointwise linear algebra of a graph 4-fold in R^8 = R^4 x R^4.

Ambient coordinates are (x1..x4, y1..y4) with J0(X, Y) = (-Y, X) and
omega0(A, B) = <J0 A, B>. Frames are stored as 8 x 4 arrays whose columns are
g0-orthonormal; `chart` holds the same tangent vectors in chart coordinates,
so that u = dF @ chart.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import EigensolveFailure
from .jets import ImmersionSpec, Jet3, evaluate_jet
from .tolerances import DEFAULT_TOL, Tolerances

I4 = np.eye(4)
J0 = np.block([[np.zeros((4, 4)), -I4], [I4, np.zeros((4, 4))]])
OMEGA0 = J0.T.copy()  # omega0(A, B) = A^T OMEGA0 B

# i on R^4: (x, y, z, w) -> (-y, x, -w, z)
I_R4 = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
HK_I = np.block([[I_R4, np.zeros((4, 4))], [np.zeros((4, 4)), -I_R4]])
HK_TRIPLE = (J0, HK_I, J0 @ HK_I)

# row order putting R^8 into complex-oriented order (x1, y1, x2, y2, ...)
COMPLEX_ORDER = np.array([0, 4, 1, 5, 2, 6, 3, 7])


class PointClass(str, enum.Enum):
    COMPLEX = "Complex"
    LAGRANGIAN = "Lagrangian"
    EQUAL = "EqualAngles"
    GENERIC = "Generic"


def pfaffian(K: np.ndarray) -> float:
    return float(K[0, 1] * K[2, 3] - K[0, 2] * K[1, 3] + K[0, 3] * K[1, 2])


def hodge_star2(K: np.ndarray) -> np.ndarray:
    """Hodge star of a 2-form given by its skew matrix in an oriented orthonormal frame."""
    S = np.zeros((4, 4))
    S[0, 1], S[0, 2], S[0, 3] = K[2, 3], -K[1, 3], K[1, 2]
    S[1, 2], S[1, 3], S[2, 3] = K[0, 3], -K[0, 2], K[0, 1]
    return S - S.T


def gram_schmidt(V: np.ndarray) -> np.ndarray:
    """Classical Gram-Schmidt with one re-orthogonalisation pass, fixed column order."""
    Q = np.zeros_like(V, dtype=float)
    for j in range(V.shape[1]):
        v = V[:, j].astype(float).copy()
        for _ in range(2):
            v -= Q[:, :j] @ (Q[:, :j].T @ v)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            raise EigensolveFailure("degenerate spanning set")
        Q[:, j] = v / nv
    return Q


def classify_point(angles, tol: Tolerances = DEFAULT_TOL) -> PointClass:
    c1, c2 = angles
    if 1.0 - c1 * c1 < tol.complex:
        return PointClass.COMPLEX
    if c1 * c1 < tol.lagrangian:
        return PointClass.LAGRANGIAN
    if abs(c1 - c2) < tol.equal:
        return PointClass.EQUAL
    return PointClass.GENERIC


def kahler_cosines(W: np.ndarray, G: np.ndarray) -> tuple[float, float]:
    """cos(theta_1) >= cos(theta_2) from the pencil (W, G), W skew, G SPD."""
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - G = I + df^T df is SPD
        raise EigensolveFailure(str(exc)) from exc
    Li = np.linalg.solve(L, I4)
    S = Li @ W @ Li.T
    try:
        sv = np.linalg.svd(S, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigensolveFailure(str(exc)) from exc
    # singular values of a real skew 4x4 come in equal pairs
    c1 = min(1.0, 0.5 * (sv[0] + sv[1]))
    c2 = min(1.0, 0.5 * (sv[2] + sv[3]))
    return c1, c2


@dataclass(frozen=True)
class PointGeometry:
    p: np.ndarray
    jet: Jet3
    metric: np.ndarray  # g_M in chart coordinates
    pullback_form: np.ndarray  # F*omega0 in chart coordinates, W[a, b] = F*omega(e_a, e_b)
    dF: np.ndarray  # 8 x 4 raw tangent frame
    tangent: np.ndarray  # 8 x 4 oriented orthonormal tangent frame
    chart: np.ndarray  # 4 x 4, chart coordinates of the tangent frame
    normal: np.ndarray  # 8 x 4 oriented orthonormal normal frame
    angles: tuple[float, float]
    J_omega: np.ndarray  # chart coordinates
    classification: PointClass
    orientation: int  # +1 if the tangent frame is chart-positive
    swapped: bool  # whether the last two tangent vectors were exchanged

    # matrices in the orthonormal frames
    @property
    def K(self) -> np.ndarray:
        """F*omega(u_a, u_b)."""
        return self.tangent.T @ OMEGA0 @ self.tangent

    @property
    def sharp(self) -> np.ndarray:
        """(F*omega)^# as an endomorphism in the tangent frame: column a is (J0 u_a)^T."""
        return self.tangent.T @ J0 @ self.tangent

    @property
    def phi(self) -> np.ndarray:
        return phi_map(self)

    @property
    def xi(self) -> np.ndarray:
        return xi_map(self)

    @property
    def omega_perp(self) -> np.ndarray:
        """Normal part of J0 on NM, in the normal frame."""
        return self.normal.T @ J0 @ self.normal

    @property
    def J_omega_frame(self) -> np.ndarray:
        return _partial_isometry(self.sharp, math.sqrt(DEFAULT_TOL.lagrangian))

    @property
    def cos2(self) -> float:
        return 0.5 * (self.angles[0] ** 2 + self.angles[1] ** 2)

    @property
    def sin2(self) -> float:
        return 1.0 - self.cos2

    @property
    def chart_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.chart)

    @property
    def volume_element(self) -> float:
        return math.sqrt(np.linalg.det(self.metric))


def _partial_isometry(P: np.ndarray, cutoff: float) -> np.ndarray:
    U, s, Vt = np.linalg.svd(P)
    keep = s > cutoff
    return U[:, keep] @ Vt[keep, :]


def point_geometry(spec: ImmersionSpec, p, tol: Tolerances = DEFAULT_TOL,
                   jet: Jet3 | None = None) -> PointGeometry:
    if jet is None:
        jet = evaluate_jet(spec, p, order=2)
    df = jet.jacobian
    G = I4 + df.T @ df
    W = df - df.T
    dF = np.vstack([I4, df])
    angles = kahler_cosines(W, G)

    tangent = gram_schmidt(dF)
    # chart coordinates of orthonormal vectors: dF @ C = tangent, and dF has I4 on top
    chart = tangent[:4, :].copy()
    K = tangent.T @ OMEGA0 @ tangent
    swapped = pfaffian(K) < -tol.lagrangian
    if swapped:
        tangent = tangent[:, [0, 1, 3, 2]]
        chart = chart[:, [0, 1, 3, 2]]
    orientation = 1 if np.linalg.det(chart) > 0 else -1

    normal = gram_schmidt(np.vstack([-df.T, I4]))
    full = np.hstack([tangent, normal])[COMPLEX_ORDER, :]
    if np.linalg.det(full) < 0:
        normal = normal[:, [0, 1, 3, 2]]

    Jf = _partial_isometry(tangent.T @ J0 @ tangent, math.sqrt(tol.lagrangian))
    J_chart = chart @ Jf @ np.linalg.inv(chart)
    return PointGeometry(
        p=np.asarray(p, dtype=float), jet=jet, metric=G, pullback_form=W, dF=dF,
        tangent=tangent, chart=chart, normal=normal, angles=angles, J_omega=J_chart,
        classification=classify_point(angles, tol), orientation=orientation, swapped=bool(swapped),
    )


def phi_map(geom: PointGeometry) -> np.ndarray:
    """Phi(X) = (J0 X)^perp; entry [b, a] = <nu_b, J0 u_a>."""
    return geom.normal.T @ J0 @ geom.tangent


def xi_map(geom: PointGeometry) -> np.ndarray:
    """Xi(U) = (J0 U)^T; entry [a, b] = <u_a, J0 nu_b>."""
    return geom.tangent.T @ J0 @ geom.normal


# ---------------------------------------------------------------- explicit coefficients


@dataclass(frozen=True)
class AngleCoefficients:
    A: float
    B: float
    C: float
    D: float
    E: float
    F: float
    l: float
    m: float
    p: float
    q: float
    r: float
    k: float
    h: float
    o: float
    d: float
    n: float
    calA: float
    calB: float
    calD: float

    def roots(self) -> tuple[float, float]:
        """mu = cos^2 solving mu^2 calA - mu calB + calD = 0, larger root first."""
        disc = max(self.calB ** 2 - 4.0 * self.calA * self.calD, 0.0)
        s = math.sqrt(disc)
        # stable pairing: mu1 * mu2 = calD / calA
        big = (self.calB + s) / (2.0 * self.calA)
        small = self.calD / (self.calA * big) if big > 0 else 0.0
        return big, small


def angle_coefficients(jet: Jet3) -> AngleCoefficients:
    df = jet.jacobian
    (ux, uy, uz, uw), (vx, vy, vz, vw), (sx, sy, sz, sw), (tx, ty, tz, tw) = df
    A, B, C = -uy + vx, sx - uz, tx - uw
    D, E, F = sy - vz, ty - vw, tz - sw
    fx, fy, fz, fw = df.T
    l, m, p, q, r, k = fy @ fw, fz @ fw, fx @ fy, fx @ fz, fx @ fw, fy @ fz
    h, o, d, n = 1 + fx @ fx, 1 + fy @ fy, 1 + fz @ fz, 1 + fw @ fw
    calA = (2 * h * l * k * m + h * o * d * n - h * (d * l * l + o * m * m + n * k * k)
            + p * p * (-d * n + m * m) + q * q * (l * l - n * o) + r * r * (-o * d + k * k)
            + 2 * q * m * (-l * p + o * r) + 2 * p * r * (-m * k + d * l) + 2 * q * k * (p * n - r * l))
    # two misprints corrected against the expanded determinant: the C^2 k^2 term,
    # and qk (not qr) inside the CE coefficient
    calB = (2 * D * E * (q * r - h * m) + 2 * B * E * (-r * k + p * m) + 2 * B * D * (l * r - n * p)
            + 2 * C * E * (-d * p + q * k) + 2 * A * E * (d * r - q * m) + 2 * C * F * (-o * q + p * k)
            + 2 * C * B * (-o * m + k * l) + 2 * D * F * (-r * p + h * l) + 2 * A * F * (-r * k + q * l)
            + 2 * A * D * (-r * m + n * q) + 2 * A * C * (-d * l + m * k) + 2 * A * B * (m * l - n * k)
            + 2 * C * D * (-q * l + m * p) + 2 * F * E * (q * p - k * h) + 2 * F * B * (o * r - p * l)
            + E * E * (d * h - q * q) + B * B * (n * o - l * l) + o * (h * F * F + d * C * C)
            + n * (h * D * D + d * A * A) - C * C * k * k - r * r * D * D - m * m * A * A - p * p * F * F)
    calD = (A * F - B * E + C * D) ** 2
    return AngleCoefficients(A, B, C, D, E, F, l, m, p, q, r, k, h, o, d, n, calA, calB, calD)


def anti_i_holomorphic_defect(jet: Jet3) -> float:
    """Max violation of u_x = -v_y, u_y = v_x, u_z = -v_w, u_w = v_z and the same for (s, t)."""
    df = jet.jacobian
    worst = 0.0
    for a, b in ((0, 1), (2, 3)):
        f, g = df[a], df[b]
        worst = max(worst, abs(f[0] + g[1]), abs(f[1] - g[0]), abs(f[2] + g[3]), abs(f[3] - g[2]))
    return float(worst)


def derivative_chain_defect(jet: Jet3) -> float:
    """Max pairwise violation inside the chains u_x = -v_y = u_z = -v_w and v_x = u_y = v_z = u_w
    (and the same for (s, t))."""
    df = jet.jacobian
    worst = 0.0
    for a, b in ((0, 1), (2, 3)):
        f, g = df[a], df[b]
        for chain in ((f[0], -g[1], f[2], -g[3]), (g[0], f[1], g[2], f[3])):
            worst = max(worst, max(chain) - min(chain))
    return float(worst)


def is_complex_by_square(jet: Jet3, atol: float = 1e-10) -> bool:
    """A graph point is J0-complex exactly when df^2 = -Id."""
    df = jet.jacobian
    return bool(np.max(np.abs(df @ df + I4)) < atol)
