"""Command-line interface: ``hs validate | solve | distance | lipschitz | example``.

Exit codes: 0 success, 1 invalid state or failed check, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import golden
from .eulerian import EulerianY, alpha_sup_diff
from .lagrangian import LagrangianX
from .metric import (
    Budget,
    J_bracket,
    dhat_bracket,
    euler_distance,
    euler_quotient_bracket,
    lipschitz_constants,
    semi_metric_D,
)
from .metric.distance import CONSTANT_ALPHA_RATE
from .piecewise import cumulative_sup_diff, sup_norm_diff
from .scenario import Scenario, ScenarioError, builtin, dump, load, state_to_dict
from .solver import evolve, max_collapse_spread
from .transform import InvalidState, relabelling_report, to_eulerian, to_lagrangian

log = logging.getLogger("hs")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CHECK_SLACK = 1e-8
N_UNIFORM = 256


class UsageError(Exception):
    pass


def _times(text: str | None, sc: Scenario | None = None) -> list[float]:
    if text is None:
        return sc.times() if sc is not None else [0.0]
    try:
        out = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad --times value {text!r}") from None
    if not out or any(not math.isfinite(t) or t < 0 for t in out):
        raise UsageError("--times needs nonnegative finite numbers")
    return out


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, default=float))
    else:
        print("\n".join(lines))


def _checked(sc: Scenario, tol: float) -> LagrangianX:
    rep = sc.validate(tol)
    if not rep.ok:
        raise InvalidState(rep)
    return sc.lagrangian()


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    sc = load(args.scenario)
    rep = sc.validate(args.tol)
    lines = [f"{sc.name or args.scenario}: {'valid' if rep.ok else 'INVALID'}"]
    if rep.violations or rep.warnings:
        lines += ["  " + s for s in rep.lines()]
    _emit(
        args,
        {
            "scenario": sc.name,
            "ok": rep.ok,
            "violations": [vars(v) for v in rep.violations],
            "warnings": [vars(w) for w in rep.warnings],
        },
        lines,
    )
    return EXIT_OK if rep.ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def sample_points(Y: EulerianY, n: int = N_UNIFORM) -> np.ndarray:
    """Breakpoints together with ``n`` uniform points over the hull widened by one."""
    bp = Y.breakpoints()
    lo, hi = float(bp.min()) - 1.0, float(bp.max()) + 1.0
    return np.union1d(bp, np.linspace(lo, hi, n))


def write_snapshot(Y: EulerianY, out: Path, tag: str) -> dict:
    x = sample_points(Y)
    files = {}
    p = out / f"u_{tag}.csv"
    with p.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "u"])
        w.writerows(zip(map(repr, x.tolist()), map(repr, np.asarray(Y.u(x), dtype=float).tolist())))
    files["u"] = str(p)
    p = out / f"measures_{tag}.csv"
    Fmu = np.asarray(Y.mu.cumulative(x, closed=True), dtype=float)
    Fnu = np.asarray(Y.nu.cumulative(x, closed=True), dtype=float)
    with p.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "F_mu", "F_nu"])
        w.writerows(zip(map(repr, x.tolist()), map(repr, Fmu.tolist()), map(repr, Fnu.tolist())))
    files["measures"] = str(p)
    p = out / f"atoms_{tag}.json"
    p.write_text(json.dumps([{"x": a, "mass": m} for a, m in Y.mu.atoms], indent=2) + "\n")
    files["atoms"] = str(p)
    p = out / f"snapshot_{tag}.json"
    p.write_text(json.dumps(state_to_dict(Y, tag), indent=2) + "\n")
    files["snapshot"] = str(p)
    return files


def cmd_solve(args) -> int:
    sc = load(args.scenario)
    X0 = _checked(sc, args.tol)
    times = _times(args.times, sc)
    traj = evolve(X0, max(times))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, lines = [], [f"{sc.name}: {len(traj.event_times)} breaking time(s) up to t={max(times):g}"]
    for c in traj.collapses:
        lines.append(f"  event t={c.time:.12g} at x={c.x:.12g}, alpha={c.alpha:.6g}")
    for t in times:
        Y = to_eulerian(traj.state_at(t))
        files = write_snapshot(Y, out, f"t{t:g}")
        mass = Y.mu.total_mass()
        rows.append({"t": t, "mu_total": mass, "atoms": Y.mu.atoms, "files": files})
        lines.append(f"  t={t:g}: mu(R)={mass:.12g}, atoms={Y.mu.atoms}")
    _emit(
        args,
        {
            "scenario": sc.name,
            "events": [vars(c) for c in traj.collapses],
            "max_collapse_spread": max_collapse_spread(traj),
            "snapshots": rows,
        },
        lines,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# distance and lipschitz
# ---------------------------------------------------------------------------


def _pair(args):
    A, B = load(args.a), load(args.b)
    XA, XB = _checked(A, args.tol), _checked(B, args.tol)
    times = _times(args.times, A)
    T = max(times)
    return A, B, evolve(XA, T), evolve(XB, T), times


def _budget(args) -> Budget:
    return Budget(maxfev=args.maxfev)


def cmd_distance(args) -> int:
    A, B, tA, tB, times = _pair(args)
    alpha_term = args.alpha_term == "on"
    rows, lines = [], [f"{'t':>6} {'level':>6} {'lower':>14} {'upper':>14}"]
    for t in times:
        XA, XB = tA.state_at(t), tB.state_at(t)
        row = {"t": t, "level": args.level}
        if args.level == "D":
            r = semi_metric_D(XA, XB, t, args.variant, alpha_term, M=max(tA.initial.V_inf, tB.initial.V_inf))
            row.update(lower=r.total, upper=r.total, terms=r.terms)
        else:
            if args.level == "J":
                b = J_bracket(XA, XB, t, _budget(args), args.variant, alpha_term)
            elif args.level == "dhat":
                b = dhat_bracket(XA, XB, t, _budget(args), args.variant, alpha_term)
            elif args.level == "euler":
                b = euler_distance(to_eulerian(XA), to_eulerian(XB), _budget(args), alpha_term)
            else:  # jhat: quotient over nu candidates, initial data only
                if t != 0.0:
                    raise UsageError("--level jhat is defined on initial data only (use --times 0)")
                if not (isinstance(A.state, EulerianY) and isinstance(B.state, EulerianY)):
                    raise UsageError("--level jhat needs Eulerian scenarios")
                b = euler_quotient_bracket(
                    A.state.z, B.state.z, A.nu_candidates, B.nu_candidates, _budget(args), args.w1inf, alpha_term
                )
            row.update(lower=b.lower, upper=b.upper, witness=b.witness)
        row["ordered"] = row["lower"] <= row["upper"] + 1e-7
        rows.append(row)
        lines.append(f"{t:6g} {args.level:>6} {row['lower']:14.8g} {row['upper']:14.8g}")
        if "terms" in row:
            lines.append("       " + "  ".join(f"{k}={v:.6g}" for k, v in row["terms"].items()))
    _emit(args, {"a": A.name, "b": B.name, "rows": rows}, lines)
    return EXIT_OK if all(r["ordered"] for r in rows) else EXIT_FAIL


def lipschitz_rows(tA, tB, times, level="D", variant="general", alpha_term=True, budget=None) -> list[dict]:
    """Rows ``(t, lhs, rhs, margin, verdict)`` for the growth bounds of the distance."""
    X0A, X0B = tA.initial, tB.initial
    M = max(X0A.V_inf, X0B.V_inf)
    rows = []
    if level == "D":
        r0 = semi_metric_D(X0A, X0B, 0.0, variant, alpha_term, M=M)
        rate = r0.rate()
        base = r0.total
        name = "3/2" if variant == "constant_alpha" else "C"
    else:
        L = max(X0A.alpha.slope_sup(), X0B.alpha.slope_sup())
        _, R = lipschitz_constants(M, L)
        rate = CONSTANT_ALPHA_RATE if variant == "constant_alpha" else R
        base = dhat_bracket(X0A, X0B, 0.0, budget, variant, alpha_term).upper
        name = "3/2" if variant == "constant_alpha" else "R"
    for t in times:
        XA, XB = tA.state_at(t), tB.state_at(t)
        if level == "D":
            lhs = semi_metric_D(XA, XB, t, variant, alpha_term, M=M).total
        else:
            lhs = dhat_bracket(XA, XB, t, Budget(maxfev=0), variant, alpha_term).lower
        rhs = math.exp(rate * t) * base
        margin = rhs + CHECK_SLACK - lhs
        rows.append({"t": t, "lhs": lhs, "rhs": rhs, "rate": rate, "rate_name": name, "margin": margin, "verdict": "PASS" if margin >= 0 else "FAIL"})
    return rows


def cmd_lipschitz(args) -> int:
    A, B, tA, tB, times = _pair(args)
    rows = lipschitz_rows(tA, tB, times, args.level, args.variant, args.alpha_term == "on", _budget(args))
    lines = [f"{'t':>6} {'lhs':>14} {'bound':>14} {'margin':>12} verdict  (rate {rows[0]['rate_name']}={rows[0]['rate']:.6g})" if rows else ""]
    for r in rows:
        lines.append(f"{r['t']:6g} {r['lhs']:14.8g} {r['rhs']:14.8g} {r['margin']:12.4g} {r['verdict']}")
    _emit(args, {"a": A.name, "b": B.name, "level": args.level, "rows": rows}, lines)
    return EXIT_OK if all(r["verdict"] == "PASS" for r in rows) else EXIT_FAIL


# ---------------------------------------------------------------------------
# examples
# ---------------------------------------------------------------------------


def _check(name, err, tol):
    return {"check": name, "error": float(err), "tol": tol, "ok": bool(err <= tol)}


def _grid_err(f, g, x):
    return float(np.max(np.abs(np.asarray(f(x), dtype=float) - np.asarray(g(x), dtype=float))))


def example_checks(name: str) -> list[dict]:
    tol = 1e-10
    out = []
    if name == "exmp1":
        X0 = to_lagrangian(golden.exmp1_state())
        traj = evolve(X0, 3.0)
        x = np.linspace(-2.0, 6.0, 512)
        for t in (0.0, 1.0, 2.0, 3.0):
            Y = to_eulerian(traj.state_at(t))
            out.append(_check(f"u(x,{t:g}) closed form", _grid_err(Y.u, lambda z: golden.exmp1_u(z, t), x), tol))
        atoms = to_eulerian(traj.state_at(2.0)).mu.atoms
        err = abs(atoms[0][0] - 2.0) + abs(atoms[0][1] - 0.5) if len(atoms) == 1 else math.inf
        out.append(_check("single atom of mass 1/2 at x=2 when t=2", err, tol))
    elif name == "adiss":
        XA = to_lagrangian(golden.adiss_state(golden.ADISS_ALPHA_A))
        XB = to_lagrangian(golden.adiss_state(golden.ADISS_ALPHA_B))
        tA, tB = evolve(XA, 3.0), evolve(XB, 3.0)
        xi = np.linspace(-4.0, 6.0, 401)
        for t in (1.0, 3.0):
            X = tA.state_at(t)
            for comp, fn in (("y", golden.adiss_y), ("U", golden.adiss_U), ("V", golden.adiss_V)):
                out.append(_check(f"{comp}(xi,{t:g}) closed form", _grid_err(getattr(X, comp), lambda z: fn(z, t), xi), tol))
        out.append(_check("V_inf drops from 2 to 4/3", abs(tA.V_inf(0.0) - 2.0) + abs(tA.V_inf(3.0) - 4.0 / 3.0), tol))
        for t in (1.0, 2.0, 3.0):
            YA, YB = to_eulerian(tA.state_at(t)), to_eulerian(tB.state_at(t))
            err = sup_norm_diff(YA.u, YB.u) + cumulative_sup_diff(YA.mu, YB.mu)
            out.append(_check(f"(u, mu) independent of alpha at t={t:g}", err, tol))
            D = semi_metric_D(tA.state_at(t), tB.state_at(t), t).total
            da = alpha_sup_diff(XA.alpha, XB.alpha)
            out.append(_check(f"D >= sup|alpha_A - alpha_B| > 0 at t={t:g}", max(0.0, da - D) if da > 0 else math.inf, 0.0))
    elif name == "alphfn1":
        X0 = to_lagrangian(golden.alphfn1_state(), validate=False)
        traj = evolve(X0, 3.0)
        ev = traj.event_times
        err = abs(ev[0] - 1.0) + abs(ev[1] - 2.0) if ev.size == 2 else math.inf
        out.append(_check("events at t=1 and t=2", err, tol))
        alph = [c.alpha for c in traj.collapses]
        out.append(_check("full then half dissipation", abs(alph[0] - 1.0) + abs(alph[1] - 0.5) if len(alph) == 2 else math.inf, tol))
        out.append(_check("V(inf, t>=2) = 1/4", abs(traj.V_inf(2.5) - 0.25), tol))
        X2 = traj.state_at(2.0)
        back = to_lagrangian(to_eulerian(X2), validate=False)
        f, msg, mism = relabelling_report(back, X2)
        c = _check("no relabelling maps the round trip onto X(2)", 0.0 if f is None else 1.0, 0.0)
        c["message"] = msg
        c["mismatch"] = mism
        out.append(c)
    elif name == "nu-invariance":
        YA, YB = golden.nu_invariance_states()
        tA, tB = evolve(to_lagrangian(YA), 3.0), evolve(to_lagrangian(YB), 3.0)
        for t in (1.0, 2.0, 3.0):
            EA, EB = to_eulerian(tA.state_at(t)), to_eulerian(tB.state_at(t))
            out.append(_check(f"u_A = u_B at t={t:g}", sup_norm_diff(EA.u, EB.u), tol))
            out.append(_check(f"F_mu_A = F_mu_B at t={t:g}", cumulative_sup_diff(EA.mu, EB.mu), tol))
        xi = np.linspace(-3.0, 11.0, 561)
        for t in (2.0, 3.0):
            out.append(_check(f"V_A closed form t={t:g}", _grid_err(tA.state_at(t).V, lambda z: golden.nu_V_A(z, t), xi), tol))
            out.append(_check(f"V_B closed form t={t:g}", _grid_err(tB.state_at(t).V, lambda z: golden.nu_V_B(z, t), xi), tol))
    else:
        raise UsageError(f"unknown example {name!r}; choose from {', '.join(golden.EXAMPLES)}")
    return out


def cmd_example(args) -> int:
    if args.name not in golden.EXAMPLES:
        raise UsageError(f"unknown example {args.name!r}; choose from {', '.join(golden.EXAMPLES)}")
    if args.dump:
        d = Path(args.dump)
        d.mkdir(parents=True, exist_ok=True)
        for sc in builtin(args.name):
            dump(sc, d / f"{sc.name}.json")
    checks = example_checks(args.name)
    lines = [f"example {args.name}"]
    for c in checks:
        lines.append(f"  {'ok  ' if c['ok'] else 'FAIL'} {c['check']}: error {c['error']:.3g} (tol {c['tol']:g})")
        if "message" in c:
            lines.append(f"       {c['message']}")
    _emit(args, {"example": args.name, "checks": checks}, lines)
    return EXIT_OK if all(c["ok"] for c in checks) else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common(suppress: bool) -> argparse.ArgumentParser:
    # the subcommand copy must not reset values given before the subcommand
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=dflt(1e-10), help="validation tolerance")
    common.add_argument("--alpha-term", choices=("on", "off"), default=dflt("on"), help="include sup|alpha_A-alpha_B| in D")
    common.add_argument("--w1inf", choices=("max", "sum"), default=dflt("max"), help="W^{1,inf} norm used by the bounded-Lipschitz norm")
    common.add_argument("--json", action="store_true", default=dflt(False), help="machine-readable output")
    common.add_argument("-v", "--verbose", action="store_true", default=dflt(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    p = argparse.ArgumentParser(prog="hs", description="Exact alpha-dissipative solutions and their distances.", parents=[_common(suppress=False)])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a scenario file")
    s.add_argument("scenario")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("solve", parents=[common], help="evolve a scenario and write CSV/JSON snapshots")
    s.add_argument("scenario")
    s.add_argument("--times", help="comma separated sample times (default: from the scenario)")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_solve)

    for name, fn, levels, default in (
        ("distance", cmd_distance, ("D", "J", "dhat", "euler", "jhat"), "D"),
        ("lipschitz", cmd_lipschitz, ("D", "dhat"), "D"),
    ):
        s = sub.add_parser(name, parents=[common], help=f"{name} between two scenarios")
        s.add_argument("a")
        s.add_argument("b")
        s.add_argument("--level", choices=levels, default=default)
        s.add_argument("--times", help="comma separated times (default: from the first scenario)")
        s.add_argument("--variant", choices=("general", "constant_alpha"), default="general")
        s.add_argument("--maxfev", type=int, default=200, help="optimizer evaluations per relabelling search")
        s.set_defaults(func=fn)

    s = sub.add_parser("example", parents=[common], help="reproduce a worked example")
    s.add_argument("name", help=", ".join(golden.EXAMPLES))
    s.add_argument("--dump", metavar="DIR", help="also write the example scenario files to DIR")
    s.set_defaults(func=cmd_example)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits with 2 on usage errors
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidState as exc:
        print("invalid state:", file=sys.stderr)
        for line in exc.report.lines():
            print("  " + line, file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
