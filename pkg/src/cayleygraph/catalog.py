"""Registered example immersions with exact jets and declared special loci."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .jets import HopfConeTerm, ImmersionSpec, PolynomialTerm, SeparableTerm, polynomial_spec

# ---------------------------------------------------------------- quaternions
# stored as arrays (scalar, i, j, k)


def qmul(p, q) -> np.ndarray:
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ])


def qconj(q) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]], dtype=float)


def qnorm(q) -> float:
    return float(np.linalg.norm(q))


def hopf_quadratic(eps) -> np.ndarray:
    """Symmetric matrices Q_a with (x-bar eps x)_a = x^T Q_a x."""
    eps = np.asarray(eps, dtype=float)
    E = np.eye(4)
    B = np.zeros((4, 4, 4))
    for i in range(4):
        for j in range(4):
            B[:, i, j] = qmul(qmul(qconj(E[i]), eps), E[j])
    return 0.5 * (B + B.transpose(0, 2, 1))


# ---------------------------------------------------------------- entries


@dataclass(frozen=True)
class Locus:
    kind: str  # Complex | Lagrangian | Singular
    description: str
    distance: Callable[[np.ndarray, Mapping[str, float]], float]


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    description: str
    defaults: Mapping[str, float]
    codomain_dim: int
    builder: Callable[[Mapping[str, float]], ImmersionSpec]
    declared_loci: tuple[Locus, ...] = ()
    expected: Callable[[np.ndarray, Mapping[str, float]], float] | None = None
    bound: Callable[[Mapping[str, float]], float] | None = None
    tags: frozenset = field(default_factory=frozenset)

    def build(self, **params) -> ImmersionSpec:
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ValueError(f"{self.id}: unknown parameters {sorted(unknown)}")
        merged = {**self.defaults, **{k: float(v) for k, v in params.items()}}
        spec = self.builder(merged)
        return ImmersionSpec(
            kind="catalog", name=self.id, terms=spec.terms, codomain_dim=self.codomain_dim,
            params=tuple(sorted(merged.items())), singular=spec.singular,
        )

    def near_locus(self, p, params: Mapping[str, float] | None = None, kind: str | None = None,
                   radius: float = 0.0) -> bool:
        params = {**self.defaults, **(params or {})}
        x = np.asarray(p, dtype=float)
        return any(
            loc.distance(x, params) <= radius
            for loc in self.declared_loci
            if kind is None or loc.kind == kind
        )


def _poly(recs, name="poly") -> ImmersionSpec:
    return polynomial_spec([{"target": t, "exponents": e, "coefficient": c} for t, e, c in recs], name=name)


X, Y, Z, W = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)
SUM_XZ = (1.0, 0.0, 1.0, 0.0)
SUM_YW = (0.0, 1.0, 0.0, 1.0)


def _sin_sinh(signs: tuple[int, int]) -> ImmersionSpec:
    """(u, v, s1*u, s2*v) with u = sin(x+z)cosh(y+w), v = -cos(x+z)sinh(y+w)."""
    terms = []
    for slot, c in ((0, 1.0), (2, float(signs[0]))):
        terms.append(SeparableTerm(slot, c, "sin", SUM_XZ, "cosh", SUM_YW))
    for slot, c in ((1, -1.0), (3, -float(signs[1]))):
        terms.append(SeparableTerm(slot, c, "cos", SUM_XZ, "sinh", SUM_YW))
    return ImmersionSpec(kind="catalog", name="sin-sinh", terms=tuple(terms))


def _linear_jw(P) -> ImmersionSpec:
    a = P["a"]
    # a * i with i(x, y, z, w) = (-y, x, -w, z)
    return _poly([(0, Y, -a), (1, X, a), (2, W, -a), (3, Z, a)], "linear-a-Jw")


J_RECS = [(0, Z, -1.0), (1, W, 1.0), (2, X, 1.0), (3, Y, -1.0)]
J_MATRIX = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)


def _j_quadratic_1(P) -> ImmersionSpec:
    return _poly(J_RECS + [
        (0, (2, 0, 0, 0), 1.0), (0, (0, 2, 0, 0), -1.0), (1, (1, 1, 0, 0), -2.0),
        (2, (0, 0, 2, 0), 1.0), (2, (0, 0, 0, 2), -1.0), (3, (0, 0, 1, 1), -2.0),
    ])


def _j_quadratic_2(P) -> ImmersionSpec:
    return _poly(J_RECS + [
        (0, (2, 0, 0, 0), 1.0), (0, (0, 2, 0, 0), -1.0), (1, (1, 1, 0, 0), -2.0),
    ])


def _u0v0_recs(alpha: float, beta: float):
    recs = []
    # u0 = x+y+z+w, v0 = x-y+z-w
    for slot, c in ((0, alpha), (2, beta)):
        recs += [(slot, e, c) for e in (X, Y, Z, W)]
    for slot, c in ((1, alpha), (3, beta)):
        recs += [(slot, X, c), (slot, Y, -c), (slot, Z, c), (slot, W, -c)]
    return recs


def _alpha_beta(P) -> ImmersionSpec:
    return _poly(_u0v0_recs(P["alpha"], P["beta"]), "alpha-beta-u0v0")


def _sin_sinh_plus_alpha_beta(P) -> ImmersionSpec:
    return _sin_sinh((1, 1)) + _alpha_beta(P)


def _hopf(P) -> ImmersionSpec:
    eps = np.array([0.0, P["e1"], P["e2"], P["e3"]])
    n = np.linalg.norm(eps)
    if n == 0:
        raise ValueError("hopf-cone needs a nonzero imaginary unit eps")
    eps = eps / n
    term = HopfConeTerm(Q=hopf_quadratic(eps), scale=math.sqrt(5.0) / 2.0)
    return ImmersionSpec(kind="catalog", name="hopf-cone", terms=(term,), codomain_dim=3,
                         singular=((0.0, 0.0, 0.0, 0.0),))


def _zero(P) -> ImmersionSpec:
    return ImmersionSpec(kind="catalog", name="zero",
                         terms=(PolynomialTerm(np.zeros(0, int), np.zeros((0, 4), int), np.zeros(0)),))


def _cayley_cos(p, P) -> float:
    c = math.cos(p[0] + p[2]) ** 2 + math.sinh(p[1] + p[3]) ** 2
    return 2.0 * math.sqrt(c / (1.0 + 4.0 * c))


def _cayley_lagrangian_distance(p, P) -> float:
    # cos(x+z) = 0 and y+w = 0 (a union of affine 2-planes)
    a = p[0] + p[2] - math.pi / 2
    a = a - math.pi * round(a / math.pi)
    return math.hypot(a, p[1] + p[3]) / math.sqrt(2.0)


def _origin_distance(p, P) -> float:
    return float(np.linalg.norm(p))


def _alpha_beta_cos(p, P) -> float:
    a, b = P["alpha"], P["beta"]
    return math.sqrt(2.0 * (a - b) ** 2 / (1.0 + 4.0 * (a * a + b * b)))


def _alpha_beta_bound(P) -> float:
    s = P["alpha"] ** 2 + P["beta"] ** 2
    return 2.0 * s / (1.0 + 2.0 * s)


_ENTRIES = [
    CatalogEntry("zero", "f = 0, the coordinate plane R^4 x {0}", {}, 4, _zero,
                 expected=lambda p, P: 0.0),
    CatalogEntry("linear-a-Jw", "f = a*i with i(x,y,z,w) = (-y,x,-w,z)", {"a": 1.0}, 4,
                 _linear_jw, expected=lambda p, P: 2 * abs(P["a"]) / (1 + P["a"] ** 2)),
    CatalogEntry("lagrangian-sin-sinh", "f = (u,v,u,v), u = sin(x+z)cosh(y+w), v = -cos(x+z)sinh(y+w)",
                 {}, 4, lambda P: _sin_sinh((1, 1)), expected=lambda p, P: 0.0,
                 tags=frozenset({"minimal"})),
    CatalogEntry("cayley-sin-sinh", "f = (u,v,-u,-v) with the same u, v", {}, 4,
                 lambda P: _sin_sinh((-1, -1)),
                 declared_loci=(Locus("Lagrangian", "cos(x+z) = 0 and y+w = 0", _cayley_lagrangian_distance),),
                 expected=_cayley_cos, tags=frozenset({"minimal", "cayley", "i-complex"})),
    CatalogEntry("j-plus-quadratic-1", "f = j + (x^2-y^2, -2xy, z^2-w^2, -2zw), j = (-z,w,x,-y)",
                 {}, 4, _j_quadratic_1,
                 declared_loci=(Locus("Complex", "the origin", _origin_distance),),
                 tags=frozenset({"minimal", "cayley", "i-complex"})),
    CatalogEntry("j-plus-quadratic-2", "f = j + (x^2-y^2, -2xy, 0, 0)", {}, 4, _j_quadratic_2,
                 declared_loci=(Locus("Complex", "the plane x = y = 0",
                                      lambda p, P: math.hypot(p[0], p[1])),),
                 tags=frozenset({"minimal", "cayley", "i-complex"})),
    CatalogEntry("alpha-beta-u0v0", "f = (alpha*(u0,v0), beta*(u0,v0)), u0 = x+y+z+w, v0 = x-y+z-w",
                 {"alpha": 0.5, "beta": 0.5}, 4, _alpha_beta,
                 expected=_alpha_beta_cos, bound=_alpha_beta_bound,
                 tags=frozenset({"minimal", "cayley"})),
    CatalogEntry("sin-sinh-plus-alpha-beta", "lagrangian-sin-sinh plus alpha-beta-u0v0",
                 {"alpha": 0.5, "beta": 0.5}, 4, _sin_sinh_plus_alpha_beta, bound=_alpha_beta_bound,
                 tags=frozenset({"minimal", "cayley"})),
    CatalogEntry("hopf-cone", "f = (0, sqrt5/(2|x|) x-bar eps x), coassociative cone",
                 {"e1": 1.0, "e2": 0.0, "e3": 0.0}, 3, _hopf,
                 declared_loci=(Locus("Singular", "the origin", _origin_distance),),
                 tags=frozenset({"minimal"})),
]

CATALOG: dict[str, CatalogEntry] = {e.id: e for e in _ENTRIES}


def catalog_entries() -> list[CatalogEntry]:
    return list(_ENTRIES)


def get_entry(entry_id: str) -> CatalogEntry:
    try:
        return CATALOG[entry_id]
    except KeyError:
        raise KeyError(f"unknown catalog id {entry_id!r}; known: {', '.join(CATALOG)}") from None


def build(entry_id: str, **params) -> ImmersionSpec:
    return get_entry(entry_id).build(**params)
