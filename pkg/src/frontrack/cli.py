"""Command-line driver: ``frontrack {simulate,analyze,pvar,young,check}``.

Exit codes: 0 on success, 1 when a check or decay monitor reports a
failure, 2 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, FrontrackError, InvalidInputError
from .functionals import build_horizon, check_H, default_curves, monitor_decay, new_wave_production
from .pvar import max_p_sum, vector_p_variation
from .tracking import (SCENARIOS, load_trace, run_config, save_trace, scenario_config, snapshot_rows,
                       time_regularity, write_snapshot_csv)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def load_config(path) -> dict:
    """Read a JSON run configuration, reporting syntax errors with line numbers."""
    text = Path(path).read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}:1:1: configuration must be a JSON object")
    return cfg


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=1))


def cmd_simulate(args) -> int:
    if args.config and args.scenario:
        raise ConfigError("give either --config or --scenario, not both")
    cfg = load_config(args.config) if args.config else scenario_config(args.scenario or "psystem-small")
    for key in ("nu", "p", "horizon"):
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    trace = run_config(cfg)
    out = _out_dir(args.out)
    save_trace(trace, out / "trace.json")
    write_snapshot_csv(trace, out / "snapshots.csv")
    rows = snapshot_rows(trace)
    p = trace.config.get("p", 1.25)
    summary = {"fronts": len(trace.fronts), "events": len(trace.events), "final_time": trace.final_time,
               "Vp_initial": vector_p_variation(trace.initial, p, trace.model),
               "Vp_max": max((r[2] for r in rows), default=0.0), "warnings": trace.warnings}
    if trace.events:
        end = trace.events[-1].time
        pairs = [(0.0, end / 4), (end / 4, end / 2), (end / 2, end)]
        summary["time_regularity"] = [[s, t, time_regularity(trace, s, t, p) / (t - s)] for s, t in pairs if t > s]
    (out / "summary.json").write_text(json.dumps(summary, sort_keys=True, indent=1))
    _emit(summary)
    return EXIT_OK


def cmd_analyze(args) -> int:
    if not args.trace:
        raise ConfigError("analyze needs --trace")
    trace = load_trace(args.trace)
    T = trace.final_time if args.horizon is None else args.horizon
    if T > trace.final_time:
        raise InvalidInputError(f"horizon {T} beyond the trace final time {trace.final_time}")
    view = build_horizon(trace, T, args.p)
    curves = default_curves(view, exhaustive=args.exhaustive)
    rep = monitor_decay(view, args.c1, args.c2, curves)
    h = check_H(view, T, curves)
    out = _out_dir(args.out)
    rep.write_csv(out / "functionals.csv")
    with open(out / "curves.csv", "w") as fh:
        fh.write("curve,time,V_Gamma,M_Gamma\n")
        for name, series in rep.curves.items():
            for t, _, v, m in series:
                fh.write(f"{name},{t!r},{v!r},{m!r}\n")
    doc = json.loads(rep.to_json())
    doc.update({"horizon": T, "C1": args.c1, "C2": args.c2, "new_wave_total": new_wave_production(trace),
                "H": {"holds": h.holds, "bound": h.bound, "max_vp_tilde": h.max_vp_tilde,
                      "max_curve_vp": h.max_curve_vp, "violations": [list(v) for v in h.violations]}})
    (out / "functionals.json").write_text(json.dumps(doc, sort_keys=True, indent=1))
    print(f"events analysed: {len(view.events)}, curves: {len(curves)}")
    print(f"decay violations: {len(rep.violations)}")
    for t, name, jump in rep.violations[:10]:
        print(f"  t={t:.6g} {name} increased by {jump:.3e}")
    print(f"H(tau): {'holds' if h.holds else 'violated'} (bound {h.bound:.4g})")
    print(f"new-wave total: {doc['new_wave_total']:.4e}")
    return EXIT_FAIL if rep.violations or not h.holds else EXIT_OK


def cmd_pvar(args) -> int:
    values = [float(v) for v in args.values]
    if args.variation:
        values = [b - a for a, b in zip(values, values[1:])]
    print(f"{max_p_sum(values, args.p):.12g}")
    return EXIT_OK


def cmd_young(args) -> int:
    from .young import YoungPattern, period_table, vp_growth_report

    rows = period_table(YoungPattern.build(alpha=args.alpha, beta=args.beta), args.k, args.p)
    lines = ["j,alpha_j,beta_j,vp_j"] + [f"{j},{a!r},{b!r},{v!r}" for j, a, b, v in rows]
    if args.out:
        (_out_dir(args.out) / "young.csv").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    rep = vp_growth_report(args.epsilon, args.n, args.p)
    print(f"growth: epsilon={rep.epsilon} n={rep.n} p={rep.p} Vp(initial)={rep.vp_initial:.6g} "
          f"Vp(t=2, unit window)={rep.vp_final_unit:.6g} lower bound={rep.lower_bound:.6g} "
          f"exceeds={rep.exceeds_bound}")
    return EXIT_OK


def cmd_check(args) -> int:
    from .acceptance import run_all

    select = None
    if args.only:
        select = [int(x) for x in args.only.split(",")]
        if any(i not in range(1, 15) for i in select):
            raise ConfigError("criteria are numbered 1 to 14")
    results = run_all(select)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frontrack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run front tracking and write a trace")
    sim.add_argument("--config", help="JSON run configuration")
    sim.add_argument("--scenario", choices=sorted(SCENARIOS), help="shipped scenario name")
    sim.add_argument("--nu", type=float)
    sim.add_argument("--p", type=float)
    sim.add_argument("--horizon", type=float, help="stop the run at this time")
    sim.add_argument("--out", default="out")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="evaluate the Glimm functionals on a trace")
    ana.add_argument("--trace", help="trace JSON written by simulate")
    ana.add_argument("--horizon", type=float)
    ana.add_argument("--p", type=float)
    ana.add_argument("--c1", type=float, default=8.0)
    ana.add_argument("--c2", type=float, default=8.0)
    ana.add_argument("--exhaustive", action="store_true", help="a measure curve along every front line")
    ana.add_argument("--out", default="out")
    ana.set_defaults(func=cmd_analyze)

    pv = sub.add_parser("pvar", help="maximal p-sum of a sequence")
    pv.add_argument("values", nargs="+", help="numbers (a single quoted string is split on spaces)")
    pv.add_argument("--p", type=float, default=2.0)
    pv.add_argument("--variation", action="store_true", help="treat values as a path and use its increments")
    pv.set_defaults(func=cmd_pvar)

    yo = sub.add_parser("young", help="growth table of the linearly degenerate example")
    yo.add_argument("--alpha", type=float, default=0.1)
    yo.add_argument("--beta", type=float, default=0.2)
    yo.add_argument("--k", type=int, default=5)
    yo.add_argument("--p", type=float, default=1.25)
    yo.add_argument("--epsilon", type=float, default=0.1)
    yo.add_argument("--n", type=int, default=16)
    yo.add_argument("--out")
    yo.set_defaults(func=cmd_young)

    ck = sub.add_parser("check", help="run the acceptance suite")
    ck.add_argument("--only", help="comma-separated criterion numbers")
    ck.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "values", None):
        args.values = [tok for v in args.values for tok in v.split()]
    try:
        return args.func(args)
    except (ConfigError, InvalidInputError, FileNotFoundError, KeyError, TypeError, ValueError) as exc:
        print(f"frontrack: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FrontrackError as exc:
        print(f"frontrack: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
