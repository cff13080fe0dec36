"""Track the small-data p-system scenario and print how its functionals evolve.

Usage: python demos/psystem_run.py [output_dir]
"""
import sys
from pathlib import Path

import numpy as np

from frontrack.functionals import build_horizon, check_H, monitor_decay
from frontrack.tracking import run_scenario, save_trace


def main(out=None):
    trace = run_scenario("psystem-small")
    print(f"fronts={len(trace.fronts)} events={len(trace.events)} final_time={trace.final_time:.4g}")
    view = build_horizon(trace)
    rep = monitor_decay(view)
    ups, vp, vpt = rep.column("Upsilon"), rep.column("Vp"), rep.column("Vp_tilde")
    print(f"Upsilon: start={ups[0]:.6e} end={ups[-1]:.6e} max rise={np.max(np.diff(ups), initial=0):.3e}")
    print(f"Vp: start={vp[0]:.6e} max={vp.max():.6e}   modified Vp max={vpt.max():.6e}")
    print(f"decay violations: {len(rep.violations)}")
    for t, name, jump in rep.violations[:5]:
        print(f"  t={t:.6g} {name} rose by {jump:.3e}")
    h = check_H(view)
    print(f"uniform bound holds: {h.holds} (max modified Vp {h.max_vp_tilde:.4e} <= {h.bound:.4e})")
    if out:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        save_trace(trace, out / "trace.json")
        rep.write_csv(out / "functionals.csv")
        print(f"wrote {out / 'trace.json'} and {out / 'functionals.csv'}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
