"""Cayley 4-forms on R^8 and calibration checks on graph tangent planes.

Forms are stored in the labelling e_1..e_8 = (x1, y1, x2, y2, x3, y3, x4, y4),
in which the Kahler form is dx12 + dx34 + dx56 + dx78. Ambient vectors in graph
coordinates (x1..x4, y1..y4) are converted with `to_label`.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import FrameDegenerate
from .geometry import COMPLEX_ORDER, PointClass, PointGeometry, point_geometry
from .jets import ImmersionSpec
from .tolerances import DEFAULT_TOL, Tolerances


class CayleyVariant(str, enum.Enum):
    OMEGA = "Omega"
    OMEGA_PRIME = "OmegaPrime"


@dataclass(frozen=True)
class FourForm8:
    coefficients: dict  # sorted 1-based 4-tuples -> coefficient

    def __call__(self, *vectors) -> float:
        return evaluate_form(self, *vectors)

    def nonzero(self) -> dict:
        return {k: v for k, v in self.coefficients.items() if v != 0}


def _wedge(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            idx = ka + kb
            if len(set(idx)) < len(idx):
                continue
            inversions = sum(1 for x, y in itertools.combinations(idx, 2) if x > y)
            sign = -1 if inversions % 2 else 1
            key = tuple(sorted(idx))
            out[key] = out.get(key, 0.0) + sign * va * vb
    return out


def _two(*terms) -> dict:
    return {(i, j): float(c) for c, i, j in terms}


def _add(*forms) -> dict:
    out: dict = {}
    for f in forms:
        for k, v in f.items():
            out[k] = out.get(k, 0.0) + v
    return out


def build_cayley_form(variant: CayleyVariant | str = CayleyVariant.OMEGA) -> FourForm8:
    variant = CayleyVariant(variant)
    s = 1 if variant is CayleyVariant.OMEGA else -1
    pieces = [{(1, 2, 3, 4): 1.0}, {(5, 6, 7, 8): 1.0}]
    if s == 1:
        pieces.append(_wedge(_two((1, 1, 2), (1, 3, 4)), _two((1, 5, 6), (1, 7, 8))))
        pieces.append(_wedge(_two((1, 1, 3), (-1, 2, 4)), _two((1, 5, 7), (-1, 6, 8))))
        pieces.append({k: -v for k, v in
                       _wedge(_two((1, 1, 4), (1, 2, 3)), _two((1, 5, 8), (1, 6, 7))).items()})
    else:
        pieces.append(_wedge(_two((1, 1, 2), (-1, 3, 4)), _two((1, 5, 6), (-1, 7, 8))))
        pieces.append(_wedge(_two((1, 1, 3), (1, 2, 4)), _two((1, 5, 7), (1, 6, 8))))
        pieces.append(_wedge(_two((1, 1, 4), (-1, 2, 3)), _two((1, 5, 8), (-1, 6, 7))))
    coeffs = {k: v for k, v in _add(*pieces).items() if v != 0.0}
    return FourForm8(coeffs)


OMEGA = build_cayley_form(CayleyVariant.OMEGA)
OMEGA_PRIME = build_cayley_form(CayleyVariant.OMEGA_PRIME)


def to_label(v: np.ndarray) -> np.ndarray:
    """Graph-ordered ambient vector(s) (rows x1..x4, y1..y4) to the e_1..e_8 labelling."""
    return np.asarray(v)[COMPLEX_ORDER, ...]


def evaluate_form(form: FourForm8, *vectors) -> float:
    if len(vectors) != 4:
        raise ValueError("a 4-form takes four vectors")
    V = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
    total = 0.0
    for key, c in form.coefficients.items():
        rows = [k - 1 for k in key]
        total += c * np.linalg.det(V[rows, :])
    return float(total)


def _form_tensor(form: FourForm8) -> np.ndarray:
    T = np.zeros((8,) * 4)
    for key, c in form.coefficients.items():
        base = [k - 1 for k in key]
        for perm in itertools.permutations(range(4)):
            inversions = sum(1 for x, y in itertools.combinations(perm, 2) if x > y)
            T[tuple(base[i] for i in perm)] = -c if inversions % 2 else c
    return T


_TENSORS: dict = {}


def form_tensor(form: FourForm8) -> np.ndarray:
    key = id(form)
    if key not in _TENSORS:
        _TENSORS[key] = _form_tensor(form)
    return _TENSORS[key]


def tangent_value(geom: PointGeometry, form: FourForm8 = OMEGA) -> float:
    U = to_label(geom.tangent)
    return evaluate_form(form, *U.T)


def calibration_defect(spec: ImmersionSpec, p, variant: CayleyVariant | str = CayleyVariant.OMEGA,
                       tol: Tolerances = DEFAULT_TOL, geom: PointGeometry | None = None) -> float:
    """1 - form(u1, u2, u3, u4) on the oriented orthonormal tangent frame."""
    geom = geom or point_geometry(spec, p, tol)
    form = OMEGA if CayleyVariant(variant) is CayleyVariant.OMEGA else OMEGA_PRIME
    return 1.0 - tangent_value(geom, form)


# bivector bases J1 = e12 + e34, J2 = e13 - e24, J3 = e14 + e23 (0-based pairs)
_SD_BASIS = (
    ((0, 1, 1.0), (2, 3, 1.0)),
    ((0, 2, 1.0), (1, 3, -1.0)),
    ((0, 3, 1.0), (1, 2, 1.0)),
)
_ASD_BASIS = (
    ((0, 1, 1.0), (2, 3, -1.0)),
    ((0, 2, 1.0), (1, 3, 1.0)),
    ((0, 3, 1.0), (1, 2, -1.0)),
)
# The raw pairing of two basis bivectors (squared norm 2 each) is twice an
# isometry, so the matrix is divided by 4.
PAIRING_SCALE = 4.0


def omega_triangle(spec: ImmersionSpec, p, variant: CayleyVariant | str = CayleyVariant.OMEGA,
                   tol: Tolerances = DEFAULT_TOL, geom: PointGeometry | None = None) -> np.ndarray:
    """Matrix of the pairing (xi, eta) -> form(xi ^ eta) between 2-vector bases of TM and NM.

    For Omega the self-dual bases are used, for Omega' the anti-self-dual ones.
    """
    geom = geom or point_geometry(spec, p, tol)
    if geom.classification is PointClass.COMPLEX:
        raise FrameDegenerate("omega_triangle is not defined at a complex point")
    return omega_triangle_frames(to_label(geom.tangent), to_label(geom.normal), variant)


def omega_triangle_frames(U: np.ndarray, N: np.ndarray,
                          variant: CayleyVariant | str = CayleyVariant.OMEGA) -> np.ndarray:
    """Same pairing for explicit 8 x 4 frames given in the e_1..e_8 labelling."""
    variant = CayleyVariant(variant)
    form = OMEGA if variant is CayleyVariant.OMEGA else OMEGA_PRIME
    basis = _SD_BASIS if variant is CayleyVariant.OMEGA else _ASD_BASIS
    T = form_tensor(form)
    # T restricted to (tangent, tangent, normal, normal)
    R = np.einsum("abcd,ai,bj,ck,dl->ijkl", T, U, U, N, N, optimize=True)
    M = np.zeros((3, 3))
    for a, Ja in enumerate(basis):
        for b, Jb in enumerate(basis):
            M[a, b] = sum(ca * cb * R[i, j, k, l] for i, j, ca in Ja for k, l, cb in Jb)
    return M / PAIRING_SCALE
