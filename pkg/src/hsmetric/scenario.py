"""Scenario files: JSON description of an initial state plus run settings.

Eulerian scenarios::

    {
      "name": "tent",
      "coordinates": "eulerian",
      "u": {"x": [0, 1, 2], "values": [0, 1, 0]},
      "mu": {"density": "u_x^2", "atoms": [[1.0, 0.5]]},
      "nu": {"density": {"breaks": [0, 2], "values": [1.0]}, "atoms": [[1.0, 0.5]]},
      "alpha": {"kind": "constant", "value": 0.5},
      "horizon": 3,
      "sample_times": [0, 1, 2, 3]
    }

``nu`` may be omitted (then ``nu = mu``).  ``alpha`` has kind ``one``,
``constant`` (with ``value``) or ``pw`` (with ``x``, ``values`` and an optional
``lipschitz``).  Optional keys: ``nu_candidates`` (list of measures) and
``allow_invalid_alpha``.

Lagrangian scenarios use ``"coordinates": "lagrangian"`` and give ``xi``
together with the full values of ``y``, ``U``, ``H`` and ``V`` at ``xi``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import golden
from .eulerian import AlphaFn, EulerianY, ValidationReport, energy_density, validate_eulerian
from .lagrangian import LagrangianX, validate_lagrangian
from .piecewise import TOL_V, Measure, PiecewiseError, PwConstant, PwLinear
from .transform import to_lagrangian


class ScenarioError(ValueError):
    """Malformed scenario file (as opposed to a well-formed but invalid state)."""


@dataclass
class Scenario:
    name: str
    state: EulerianY | LagrangianX
    horizon: float = 0.0
    sample_times: list = field(default_factory=list)
    nu_candidates: list = field(default_factory=list)
    allow_invalid_alpha: bool = False

    @property
    def coordinates(self) -> str:
        return "eulerian" if isinstance(self.state, EulerianY) else "lagrangian"

    @property
    def alpha(self) -> AlphaFn:
        return self.state.alpha

    def validate(self, tol: float = TOL_V) -> ValidationReport:
        if isinstance(self.state, EulerianY):
            rep = validate_eulerian(self.state, tol)
        else:
            rep = validate_lagrangian(self.state, tol)
        if self.allow_invalid_alpha:
            alpha_names = self.alpha.problems().names()
            kept = ValidationReport()
            for v in rep.violations:
                if v.name not in alpha_names:
                    kept.add(v.name, v.location, v.magnitude)
                else:
                    kept.warn(v.name, v.location, v.magnitude)
            for w in rep.warnings:
                kept.warn(w.name, w.location, w.magnitude)
            rep = kept
        return rep

    def lagrangian(self) -> LagrangianX:
        if isinstance(self.state, LagrangianX):
            return self.state
        return to_lagrangian(self.state, validate=False)

    def times(self) -> list:
        return list(self.sample_times) or [self.horizon]


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------


def _floats(obj, key, where):
    try:
        arr = np.asarray(obj[key], dtype=float)
    except KeyError:
        raise ScenarioError(f"{where}: missing '{key}'") from None
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: '{key}' must be a list of numbers ({exc})") from None
    if arr.ndim != 1:
        raise ScenarioError(f"{where}: '{key}' must be a flat list")
    return arr


def _measure(obj, u: PwLinear | None, where: str) -> Measure:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object")
    dens = obj.get("density", None)
    if dens is None:
        density = PwConstant.zero()
    elif dens == "u_x^2":
        if u is None:
            raise ScenarioError(f"{where}: 'u_x^2' needs u")
        density = energy_density(u)
    elif isinstance(dens, dict):
        b = _floats(dens, "breaks", where + ".density")
        v = _floats(dens, "values", where + ".density")
        if b.size and v.size != b.size - 1:
            raise ScenarioError(f"{where}.density: need one value per cell ({b.size - 1}), got {v.size}")
        density = PwConstant.from_interior(b, v) if b.size > 1 else PwConstant.zero()
    else:
        raise ScenarioError(f"{where}.density: expected 'u_x^2' or an object")
    atoms = obj.get("atoms", [])
    try:
        ax = [float(a[0]) for a in atoms]
        am = [float(a[1]) for a in atoms]
    except (TypeError, ValueError, IndexError):
        raise ScenarioError(f"{where}.atoms: expected [[x, mass], ...]") from None
    return Measure(density, ax, am)


def _alpha(obj) -> AlphaFn:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ScenarioError("alpha: expected an object with 'kind'")
    kind = obj["kind"]
    if kind == "one":
        return AlphaFn.one()
    if kind == "constant":
        try:
            return AlphaFn.constant(float(obj["value"]))
        except (KeyError, TypeError, ValueError):
            raise ScenarioError("alpha: constant needs a numeric 'value'") from None
    if kind == "pw":
        x = _floats(obj, "x", "alpha")
        v = _floats(obj, "values", "alpha")
        if x.size != v.size or x.size == 0:
            raise ScenarioError("alpha: 'x' and 'values' must have the same nonzero length")
        lip = obj.get("lipschitz")
        return AlphaFn.pw(x, v, None if lip is None else float(lip))
    raise ScenarioError(f"alpha: unknown kind {kind!r}")


def from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict):
        raise ScenarioError("scenario must be a JSON object")
    try:
        alpha = _alpha(d.get("alpha", {"kind": "one"}))
        coords = d.get("coordinates", "eulerian")
        if coords == "eulerian":
            if "u" not in d or "mu" not in d:
                raise ScenarioError("eulerian scenario needs 'u' and 'mu'")
            u = PwLinear(_floats(d["u"], "x", "u"), _floats(d["u"], "values", "u"))
            mu = _measure(d["mu"], u, "mu")
            nu = mu if d.get("nu") in (None, "mu") else _measure(d["nu"], u, "nu")
            state = EulerianY(u, mu, nu, alpha)
            cands = [_measure(c, u, f"nu_candidates[{i}]") for i, c in enumerate(d.get("nu_candidates", []))]
        elif coords == "lagrangian":
            xi = _floats(d, "xi", "lagrangian")
            parts = [_floats(d, k, "lagrangian") for k in ("y", "U", "H", "V")]
            if any(p.size != xi.size for p in parts):
                raise ScenarioError("lagrangian: y, U, H, V need one value per xi")
            state = LagrangianX.from_arrays(xi, *parts, alpha)
            cands = []
        else:
            raise ScenarioError(f"unknown coordinates {coords!r}")
        times = [float(t) for t in d.get("sample_times", [])]
        horizon = float(d.get("horizon", max(times, default=0.0)))
    except PiecewiseError as exc:
        raise ScenarioError(str(exc)) from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(str(exc)) from None
    return Scenario(
        str(d.get("name", "")),
        state,
        horizon,
        times,
        cands,
        bool(d.get("allow_invalid_alpha", False)),
    )


def load(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from None
    return from_dict(data)


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------


def _list(a) -> list:
    return [float(v) for v in np.asarray(a, dtype=float)]


def measure_to_dict(m: Measure) -> dict:
    k = m.density.knots
    out = {}
    if k.size > 1:
        out["density"] = {"breaks": _list(k), "values": _list(m.density.interior)}
    out["atoms"] = [[float(x), float(w)] for x, w in m.atoms]
    return out


def alpha_to_dict(a: AlphaFn) -> dict:
    if a.kind == "one":
        return {"kind": "one"}
    if a.kind == "constant":
        return {"kind": "constant", "value": float(a.value)}
    return {"kind": "pw", "x": _list(a.f.knots), "values": _list(a.f.values), "lipschitz": float(a.lipschitz)}


def state_to_dict(state, name: str = "") -> dict:
    d = {"name": name}
    if isinstance(state, EulerianY):
        d["coordinates"] = "eulerian"
        d["u"] = {"x": _list(state.u.knots), "values": _list(state.u.values)}
        d["mu"] = measure_to_dict(state.mu)
        d["nu"] = measure_to_dict(state.nu)
    else:
        d["coordinates"] = "lagrangian"
        d["xi"] = _list(state.grid)
        d["y"] = _list(state.y.full_values)
        for k in ("U", "H", "V"):
            d[k] = _list(getattr(state, k).values)
    d["alpha"] = alpha_to_dict(state.alpha)
    return d


def to_dict(sc: Scenario) -> dict:
    d = state_to_dict(sc.state, sc.name)
    d["horizon"] = float(sc.horizon)
    d["sample_times"] = _list(sc.sample_times)
    if sc.nu_candidates:
        d["nu_candidates"] = [measure_to_dict(m) for m in sc.nu_candidates]
    if sc.allow_invalid_alpha:
        d["allow_invalid_alpha"] = True
    return d


def dump(sc: Scenario, path) -> None:
    Path(path).write_text(json.dumps(to_dict(sc), indent=2) + "\n")


# ---------------------------------------------------------------------------
# built-in scenarios
# ---------------------------------------------------------------------------


def builtin(name: str) -> list[Scenario]:
    """The worked examples as scenarios (two for the paired ones)."""
    if name == "exmp1":
        return [Scenario("exmp1", golden.exmp1_state(), 3.0, [0.0, 1.0, 2.0, 3.0])]
    if name == "adiss":
        return [
            Scenario("adiss-const", golden.adiss_state(golden.ADISS_ALPHA_A), 3.0, [0.0, 1.0, 2.0, 3.0]),
            Scenario("adiss-pw", golden.adiss_state(golden.ADISS_ALPHA_B), 3.0, [0.0, 1.0, 2.0, 3.0]),
        ]
    if name == "alphfn1":
        return [Scenario("alphfn1", golden.alphfn1_state(), 3.0, [0.0, 1.0, 2.0, 3.0], allow_invalid_alpha=True)]
    if name == "nu-invariance":
        A, B = golden.nu_invariance_states()
        return [
            Scenario("nu-invariance-A", A, 3.0, [0.0, 1.0, 2.0, 3.0], [B.nu]),
            Scenario("nu-invariance-B", B, 3.0, [0.0, 1.0, 2.0, 3.0]),
        ]
    raise KeyError(name)
