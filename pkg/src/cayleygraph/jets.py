"""Immersions F(x) = (x, f(x)) of R^4 into R^8 and their exact 3-jets.

An `ImmersionSpec` is a sum of terms. Each term knows how to produce the
partial derivative of f along a sorted multi-index; `evaluate_jet` calls it
once per sorted multi-index and scatters the result to every permutation, so
the Hessian and third-derivative blocks are symmetric bit for bit.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import DegreeCapExceeded, SingularPoint

DEFAULT_DEGREE_CAP = 8


def as_point(p: Sequence[float]) -> np.ndarray:
    x = np.asarray(p, dtype=float).reshape(-1)
    if x.shape != (4,):
        raise ValueError(f"chart point needs 4 coordinates, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("chart point has non-finite coordinates")
    return x


@dataclass(frozen=True)
class Jet3:
    value: np.ndarray  # (4,)
    jacobian: np.ndarray  # (4, 4) df[a, i] = d f^a / d x_i
    hessian: np.ndarray  # (4, 4, 4)
    third: np.ndarray  # (4, 4, 4, 4)
    order: int = 3


# ---------------------------------------------------------------- terms


class Term:
    """One additive piece of f. Subclasses implement `partial`."""

    def partial(self, p: np.ndarray, idx: tuple[int, ...]) -> np.ndarray:
        raise NotImplementedError

    def singular_points(self) -> tuple[tuple[float, ...], ...]:
        return ()


@dataclass(frozen=True)
class PolynomialTerm(Term):
    targets: np.ndarray  # (M,) int
    exponents: np.ndarray  # (M, 4) int
    coefficients: np.ndarray  # (M,)

    @property
    def degree(self) -> int:
        return int(self.exponents.sum(axis=1).max()) if len(self.coefficients) else 0

    def partial(self, p, idx):
        k = np.bincount(np.asarray(idx, dtype=int), minlength=4)
        e = self.exponents
        fac = np.ones(len(self.coefficients))
        for axis in range(4):
            for j in range(k[axis]):
                fac = fac * (e[:, axis] - j)
        keep = fac != 0
        if not np.any(keep):
            return np.zeros(4)
        rest = e[keep] - k
        mono = np.prod(np.power(p, rest), axis=1)
        w = self.coefficients[keep] * fac[keep] * mono
        return np.bincount(self.targets[keep], weights=w, minlength=4)


# derivative closures: d^n g, cycling with period 4 or 2
_CYCLES: dict[str, tuple[Callable[[float], float], ...]] = {
    "sin": (math.sin, math.cos, lambda t: -math.sin(t), lambda t: -math.cos(t)),
    "cos": (math.cos, lambda t: -math.sin(t), lambda t: -math.cos(t), math.sin),
    "sinh": (math.sinh, math.cosh),
    "cosh": (math.cosh, math.sinh),
}


def _dn(name: str, n: int, t: float) -> float:
    cyc = _CYCLES[name]
    return cyc[n % len(cyc)](t)


@dataclass(frozen=True)
class SeparableTerm(Term):
    """f^target += c * g(a.x) * h(b.x) with g, h elementary functions."""

    target: int
    coefficient: float
    g: str
    a: tuple[float, float, float, float]
    h: str
    b: tuple[float, float, float, float]

    def partial(self, p, idx):
        A = float(np.dot(self.a, p))
        B = float(np.dot(self.b, p))
        total = 0.0
        # every index differentiates either the g factor or the h factor
        for mask in itertools.product((0, 1), repeat=len(idx)):
            w = 1.0
            for i, which in zip(idx, mask):
                w *= self.b[i] if which else self.a[i]
            if w == 0.0:
                continue
            nb = sum(mask)
            total += w * _dn(self.g, len(idx) - nb, A) * _dn(self.h, nb, B)
        out = np.zeros(4)
        out[self.target] = self.coefficient * total
        return out


def _inv_r_partial(x: np.ndarray, idx: tuple[int, ...]) -> float:
    r2 = float(x @ x)
    r = math.sqrt(r2)
    n = len(idx)
    if n == 0:
        return 1.0 / r
    if n == 1:
        return -x[idx[0]] / r**3
    if n == 2:
        i, j = idx
        return -(i == j) / r**3 + 3.0 * x[i] * x[j] / r**5
    i, j, k = idx
    return (3.0 * ((i == j) * x[k] + (i == k) * x[j] + (j == k) * x[i]) / r**5
            - 15.0 * x[i] * x[j] * x[k] / r**7)


@dataclass(frozen=True)
class HopfConeTerm(Term):
    """f(x) = scale * (x-bar eps x) / |x|, an Im H valued map placed in slots 1..3.

    q(x) = x-bar eps x is quadratic, q^a(x) = x^T Q_a x; the 1/|x| factor is
    differentiated in closed form and combined by the Leibniz rule.
    """

    Q: np.ndarray  # (4, 4, 4) symmetric bilinear forms, slot 0 identically zero
    scale: float

    def partial(self, p, idx):
        if float(p @ p) == 0.0:
            raise SingularPoint("hopf cone is singular at the origin")
        out = np.zeros(4)
        n = len(idx)
        for mask in itertools.product((0, 1), repeat=n):
            t_idx = tuple(i for i, m in zip(idx, mask) if m == 0)
            s_idx = tuple(i for i, m in zip(idx, mask) if m == 1)
            phi = _inv_r_partial(p, t_idx)
            if len(s_idx) == 0:
                dq = np.einsum("aij,i,j->a", self.Q, p, p)
            elif len(s_idx) == 1:
                dq = 2.0 * self.Q[:, s_idx[0], :] @ p
            elif len(s_idx) == 2:
                dq = 2.0 * self.Q[:, s_idx[0], s_idx[1]]
            else:
                continue
            out += phi * dq
        return self.scale * out

    def singular_points(self):
        return ((0.0, 0.0, 0.0, 0.0),)


# ---------------------------------------------------------------- spec


@dataclass(frozen=True)
class ImmersionSpec:
    kind: str  # "catalog" or "polynomial"
    name: str
    terms: tuple[Term, ...]
    codomain_dim: int = 4
    params: tuple[tuple[str, float], ...] = ()
    singular: tuple[tuple[float, ...], ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("catalog", "polynomial"):
            raise ValueError(f"unknown immersion kind {self.kind!r}")
        if self.codomain_dim not in (3, 4):
            raise ValueError("codomain_dim must be 3 or 4")

    @property
    def param_dict(self) -> dict[str, float]:
        return dict(self.params)

    def singular_points(self) -> list[np.ndarray]:
        pts = [np.asarray(s, dtype=float) for s in self.singular]
        for t in self.terms:
            pts.extend(np.asarray(s, dtype=float) for s in t.singular_points())
        return pts

    def distance_to_singular(self, p: np.ndarray) -> float:
        pts = self.singular_points()
        if not pts:
            return math.inf
        return min(float(np.linalg.norm(p - s)) for s in pts)

    def __add__(self, other: "ImmersionSpec") -> "ImmersionSpec":
        return ImmersionSpec(
            kind="catalog" if "catalog" in (self.kind, other.kind) else "polynomial",
            name=f"{self.name}+{other.name}",
            terms=self.terms + other.terms,
            codomain_dim=max(self.codomain_dim, other.codomain_dim),
            params=self.params + other.params,
            singular=self.singular + other.singular,
        )


def polynomial_spec(
    monomials: Iterable[Mapping],
    name: str = "polynomial",
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> ImmersionSpec:
    """Build a polynomial immersion from {target, exponents, coefficient} records."""
    tg, ex, cf = [], [], []
    for rec in monomials:
        t = int(rec["target"])
        e = [int(v) for v in rec["exponents"]]
        if not 0 <= t <= 3:
            raise ValueError(f"monomial target {t} outside 0..3")
        if len(e) != 4 or min(e) < 0:
            raise ValueError(f"bad exponent list {e}")
        c = float(rec["coefficient"])
        if not math.isfinite(c):
            raise ValueError("non-finite coefficient")
        tg.append(t)
        ex.append(e)
        cf.append(c)
    term = PolynomialTerm(
        targets=np.asarray(tg, dtype=int).reshape(-1),
        exponents=np.asarray(ex, dtype=int).reshape(-1, 4),
        coefficients=np.asarray(cf, dtype=float).reshape(-1),
    )
    if term.degree > degree_cap:
        raise DegreeCapExceeded(f"total degree {term.degree} exceeds cap {degree_cap}")
    return ImmersionSpec(kind="polynomial", name=name, terms=(term,))


def random_polynomial_spec(rng: np.random.Generator, degree: int = 3, scale: float = 0.5,
                           density: float = 0.5) -> ImmersionSpec:
    """Random polynomial map with monomials up to `degree` (used by property tests)."""
    recs = []
    for e in itertools.product(range(degree + 1), repeat=4):
        if 0 < sum(e) <= degree:
            for t in range(4):
                if rng.random() < density:
                    recs.append({"target": t, "exponents": e,
                                 "coefficient": scale * rng.normal() / math.factorial(sum(e))})
    return polynomial_spec(recs, name="random-polynomial")


# ---------------------------------------------------------------- jets


def _sorted_indices(order: int):
    return itertools.combinations_with_replacement(range(4), order)


def evaluate_jet(spec: ImmersionSpec, p: Sequence[float], order: int = 3) -> Jet3:
    if not 0 <= order <= 3:
        raise ValueError("jet order must be in 0..3")
    x = as_point(p)
    if spec.distance_to_singular(x) == 0.0:
        raise SingularPoint(f"{spec.name} is singular at {x.tolist()}")

    def d(idx):
        out = np.zeros(4)
        for t in spec.terms:
            out = out + t.partial(x, idx)
        return out

    value = d(())
    jac = np.zeros((4, 4))
    hess = np.zeros((4, 4, 4))
    third = np.zeros((4, 4, 4, 4))
    if order >= 1:
        for (i,) in _sorted_indices(1):
            jac[:, i] = d((i,))
    if order >= 2:
        for idx in _sorted_indices(2):
            v = d(idx)
            for i, j in set(itertools.permutations(idx)):
                hess[:, i, j] = v
    if order >= 3:
        for idx in _sorted_indices(3):
            v = d(idx)
            for i, j, k in set(itertools.permutations(idx)):
                third[:, i, j, k] = v
    return Jet3(value, jac, hess, third, order)


def finite_difference_jet(spec: ImmersionSpec, p: Sequence[float], step: float = 1e-4) -> Jet3:
    """Central-difference jet built from values of f only. Test oracle."""
    if step <= 0:
        raise ValueError("step must be positive")
    x = as_point(p)
    if spec.distance_to_singular(x) <= 4.0 * step:
        raise SingularPoint("finite-difference stencil reaches a singular point")

    def f(y):
        return evaluate_jet(spec, y, order=0).value

    h = step
    eye = np.eye(4)

    def hess_at(y):
        H = np.zeros((4, 4, 4))
        fy = f(y)
        for i in range(4):
            H[:, i, i] = (f(y + h * eye[i]) - 2 * fy + f(y - h * eye[i])) / h**2
            for j in range(i + 1, 4):
                v = (f(y + h * eye[i] + h * eye[j]) - f(y + h * eye[i] - h * eye[j])
                     - f(y - h * eye[i] + h * eye[j]) + f(y - h * eye[i] - h * eye[j])) / (4 * h * h)
                H[:, i, j] = H[:, j, i] = v
        return H

    jac = np.stack([(f(x + h * eye[i]) - f(x - h * eye[i])) / (2 * h) for i in range(4)], axis=1)
    hess = hess_at(x)
    third = np.zeros((4, 4, 4, 4))
    for k in range(4):
        dk = (hess_at(x + h * eye[k]) - hess_at(x - h * eye[k])) / (2 * h)
        third[:, :, :, k] = dk
    third = sum(third.transpose((0,) + tuple(1 + np.array(perm)))
                for perm in itertools.permutations(range(3))) / 6.0
    return Jet3(f(x), jac, hess, third, 3)
