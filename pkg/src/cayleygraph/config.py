"""Run configuration: JSON text validated into a `RunConfig` before any computation."""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .catalog import get_entry
from .errors import ConfigError, DegreeCapExceeded
from .fields import GridRequest
from .jets import DEFAULT_DEGREE_CAP, ImmersionSpec, polynomial_spec, random_polynomial_spec
from .tolerances import Tolerances

FORMATS = ("csv", "json")
ETA_FORMS = ("expanded", "trace")
CHECKS = ("pde", "transgression")
CURVATURE_FIELDS = ("angles", "mean_curvature", "scalar", "densities", "eta")


@dataclass(frozen=True)
class SampleRequest:
    """Random interior points drawn from the domain box, with acceptance filters."""

    count: int = 20
    min_cos2: float = 0.0
    min_sin2: float = 0.0
    min_norm: float = 0.0


@dataclass(frozen=True)
class RunConfig:
    immersion: dict
    grid: GridRequest
    fields: tuple[str, ...] = CURVATURE_FIELDS
    tolerances: Tolerances = Tolerances()
    fd_step: float | None = None
    mask_radius: float = 0.0
    sample: SampleRequest | None = None
    checks: tuple[str, ...] = CHECKS
    eta_form: str = "expanded"
    min_order: float = 1.8
    max_defect: float = 1e-9
    variant: str = "Omega"
    center: tuple[float, ...] = (0.0, 0.0, 0.0, 0.0)
    radii: tuple[float, ...] = (0.4, 0.2)
    quadrature_order: int = 6
    quadrature_tol: float = 1e-6
    output_path: str | None = None
    output_format: str = "csv"
    extra: dict = field(default_factory=dict)

    @property
    def step(self) -> float:
        return self.fd_step if self.fd_step is not None else max(1e-4, 1e-3 * self.grid.scale)

    @property
    def nested_step(self) -> float:
        """Default for stencils that difference twice (rounding grows like eps / h^2)."""
        return self.fd_step if self.fd_step is not None else max(4e-4, 4e-3 * self.grid.scale)

    def build_immersion(self, seed: int = 0) -> ImmersionSpec:
        return build_immersion(self.immersion, seed)


def _fail(path: str, msg: str) -> ConfigError:
    return ConfigError(f"config field '{path}': {msg}")


def _number(v: Any, path: str, positive: bool = False, nonneg: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise _fail(path, f"expected a number, got {type(v).__name__}")
    v = float(v)
    if not math.isfinite(v):
        raise _fail(path, "must be finite")
    if positive and v <= 0:
        raise _fail(path, "must be > 0")
    if nonneg and v < 0:
        raise _fail(path, "must be >= 0")
    return v


def _integer(v: Any, path: str, minimum: int = 1) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise _fail(path, f"expected an integer, got {type(v).__name__}")
    if v < minimum:
        raise _fail(path, f"must be >= {minimum}")
    return v


def _vector4(v: Any, path: str) -> tuple[float, ...]:
    if not isinstance(v, list) or len(v) != 4:
        raise _fail(path, "expected a list of 4 numbers")
    return tuple(_number(x, f"{path}[{i}]") for i, x in enumerate(v))


def _choice(v: Any, path: str, options) -> str:
    if v not in options:
        raise _fail(path, f"expected one of {', '.join(options)}, got {v!r}")
    return v


def _string_list(v: Any, path: str, options) -> tuple[str, ...]:
    if not isinstance(v, list) or not v:
        raise _fail(path, "expected a non-empty list")
    return tuple(_choice(x, f"{path}[{i}]", options) for i, x in enumerate(v))


def _check_keys(d: dict, path: str, allowed) -> None:
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise _fail(f"{path}.{extra[0]}" if path else extra[0], "unknown key")


def _immersion(v: Any) -> dict:
    if not isinstance(v, dict):
        raise _fail("immersion", "expected an object")
    kinds = [k for k in ("catalog", "polynomial", "random_polynomial") if k in v]
    if len(kinds) != 1:
        raise _fail("immersion", "give exactly one of catalog, polynomial, random_polynomial")
    kind = kinds[0]
    if kind == "catalog":
        _check_keys(v, "immersion", ("catalog", "params"))
        try:
            entry = get_entry(v["catalog"])
        except KeyError as exc:
            raise _fail("immersion.catalog", exc.args[0]) from None
        params = v.get("params", {})
        if not isinstance(params, dict):
            raise _fail("immersion.params", "expected an object")
        for k, x in params.items():
            if k not in entry.defaults:
                raise _fail(f"immersion.params.{k}", f"unknown parameter for {entry.id}")
            _number(x, f"immersion.params.{k}")
        return {"catalog": entry.id, "params": dict(params)}
    if kind == "polynomial":
        _check_keys(v, "immersion", ("polynomial", "degree_cap"))
        mons = v["polynomial"]
        if not isinstance(mons, list) or not mons:
            raise _fail("immersion.polynomial", "expected a non-empty list of monomials")
        for i, m in enumerate(mons):
            p = f"immersion.polynomial[{i}]"
            if not isinstance(m, dict):
                raise _fail(p, "expected an object")
            _check_keys(m, p, ("target", "exponents", "coefficient"))
            for key in ("target", "exponents", "coefficient"):
                if key not in m:
                    raise _fail(f"{p}.{key}", "missing")
            _integer(m["target"], f"{p}.target", 0)
            if m["target"] > 3:
                raise _fail(f"{p}.target", "must be in 0..3")
            if not isinstance(m["exponents"], list) or len(m["exponents"]) != 4:
                raise _fail(f"{p}.exponents", "expected 4 non-negative integers")
            for j, e in enumerate(m["exponents"]):
                _integer(e, f"{p}.exponents[{j}]", 0)
            _number(m["coefficient"], f"{p}.coefficient")
        cap = _integer(v.get("degree_cap", DEFAULT_DEGREE_CAP), "immersion.degree_cap")
        try:
            polynomial_spec(mons, degree_cap=cap)
        except DegreeCapExceeded as exc:
            raise _fail("immersion.polynomial", str(exc)) from None
        return {"polynomial": mons, "degree_cap": cap}
    _check_keys(v, "immersion", ("random_polynomial",))
    r = v["random_polynomial"]
    if not isinstance(r, dict):
        raise _fail("immersion.random_polynomial", "expected an object")
    _check_keys(r, "immersion.random_polynomial", ("degree", "scale", "density"))
    return {"random_polynomial": {
        "degree": _integer(r.get("degree", 3), "immersion.random_polynomial.degree"),
        "scale": _number(r.get("scale", 0.5), "immersion.random_polynomial.scale", positive=True),
        "density": _number(r.get("density", 0.5), "immersion.random_polynomial.density", positive=True),
    }}


def build_immersion(desc: dict, seed: int = 0) -> ImmersionSpec:
    if "catalog" in desc:
        return get_entry(desc["catalog"]).build(**desc.get("params", {}))
    if "polynomial" in desc:
        return polynomial_spec(desc["polynomial"], degree_cap=desc.get("degree_cap", DEFAULT_DEGREE_CAP))
    r = desc["random_polynomial"]
    return random_polynomial_spec(np.random.default_rng(seed), r["degree"], r["scale"], r["density"])


def _grid(d: dict) -> GridRequest:
    dom = d.get("domain", [-1.0, 1.0])
    if isinstance(dom, list) and len(dom) == 2:
        lo, hi = _number(dom[0], "domain[0]"), _number(dom[1], "domain[1]")
        lower, upper = (lo,) * 4, (hi,) * 4
    elif isinstance(dom, dict):
        _check_keys(dom, "domain", ("lower", "upper"))
        lower = _vector4(dom.get("lower"), "domain.lower")
        upper = _vector4(dom.get("upper"), "domain.upper")
    else:
        raise _fail("domain", "expected [lo, hi] or {lower: [...], upper: [...]}")
    res = d.get("resolution", 5)
    if isinstance(res, list):
        if len(res) != 4:
            raise _fail("resolution", "expected an integer or a list of 4 integers")
        res = tuple(_integer(r, f"resolution[{i}]") for i, r in enumerate(res))
    else:
        res = (_integer(res, "resolution"),) * 4
    for i, (a, b, n) in enumerate(zip(lower, upper, res)):
        if n > 1 and not b > a:
            raise _fail("domain", f"axis {i} needs lower < upper")
    return GridRequest(lower, upper, res)


_TOP_KEYS = ("immersion", "domain", "resolution", "fields", "tolerances", "fd_step", "mask_radius",
             "sample", "checks", "eta_form", "min_order", "max_defect", "variant", "center", "radii",
             "quadrature_order", "quadrature_tol", "output", "comment")


def parse_config(data: Any) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(data, "", _TOP_KEYS)
    if "immersion" not in data:
        raise _fail("immersion", "missing")
    kw: dict = {"immersion": _immersion(data["immersion"]), "grid": _grid(data)}
    if "fields" in data:
        kw["fields"] = _string_list(data["fields"], "fields", CURVATURE_FIELDS)
    if "tolerances" in data:
        t = data["tolerances"]
        if not isinstance(t, dict):
            raise _fail("tolerances", "expected an object")
        names = [f.name for f in dataclasses.fields(Tolerances)]
        _check_keys(t, "tolerances", names)
        kw["tolerances"] = Tolerances(**{k: _number(v, f"tolerances.{k}", positive=True) for k, v in t.items()})
    if data.get("fd_step") is not None:
        kw["fd_step"] = _number(data["fd_step"], "fd_step", positive=True)
    if "mask_radius" in data:
        kw["mask_radius"] = _number(data["mask_radius"], "mask_radius", nonneg=True)
    if data.get("sample") is not None:
        s = data["sample"]
        if not isinstance(s, dict):
            raise _fail("sample", "expected an object")
        _check_keys(s, "sample", ("count", "min_cos2", "min_sin2", "min_norm"))
        kw["sample"] = SampleRequest(
            _integer(s.get("count", 20), "sample.count"),
            _number(s.get("min_cos2", 0.0), "sample.min_cos2", nonneg=True),
            _number(s.get("min_sin2", 0.0), "sample.min_sin2", nonneg=True),
            _number(s.get("min_norm", 0.0), "sample.min_norm", nonneg=True),
        )
    if "checks" in data:
        kw["checks"] = _string_list(data["checks"], "checks", CHECKS)
    if "eta_form" in data:
        kw["eta_form"] = _choice(data["eta_form"], "eta_form", ETA_FORMS)
    for key in ("min_order", "max_defect", "quadrature_tol"):
        if key in data:
            kw[key] = _number(data[key], key, positive=True)
    if "variant" in data:
        kw["variant"] = _choice(data["variant"], "variant", ("Omega", "OmegaPrime"))
    if "center" in data:
        kw["center"] = _vector4(data["center"], "center")
    if "radii" in data:
        r = data["radii"]
        if not isinstance(r, list) or not r:
            raise _fail("radii", "expected a non-empty list of positive numbers")
        kw["radii"] = tuple(_number(x, f"radii[{i}]", positive=True) for i, x in enumerate(r))
    if "quadrature_order" in data:
        kw["quadrature_order"] = _integer(data["quadrature_order"], "quadrature_order", 2)
    if "output" in data:
        o = data["output"]
        if not isinstance(o, dict):
            raise _fail("output", "expected an object")
        _check_keys(o, "output", ("path", "format"))
        if "path" in o:
            if not isinstance(o["path"], str):
                raise _fail("output.path", "expected a string")
            kw["output_path"] = o["path"]
        if "format" in o:
            kw["output_format"] = _choice(o["format"], "output.format", FORMATS)
    return RunConfig(**kw)


def parse_config_text(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(data)


def load_config(path: str) -> RunConfig:
    """Read and validate a config file. OSError propagates (an I/O failure, not a config error)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config_text(text)
