"""Command line entry point ``maxhyp``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .config import ParsedConfig, ScenarioSpec, build_config, parse_config, parse_sections
from .errors import MaxhypError
from .material import ElasticParams, MaxwellParams
from .scenarios import EXIT_ERROR, closed_form_spectrum, run_scenario
from .symmetrizer import max_speed_closed_form, wave_speeds
from .system import SYSTEMS, check_admissible

log = logging.getLogger("maxhyp")


def _load(path, out) -> ParsedConfig:
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text, out)


def _report(result) -> int:
    m = result.manifest
    for name, g in sorted(m.get("gates", {}).items()):
        status = "PASS" if g["passed"] else "FAIL"
        print(f"{status} {name}: {g['value']!r} {g['rule']} {g['limit']!r}")
    if m.get("error"):
        print(f"ERROR {m['error']}", file=sys.stderr)
    print(f"content_hash {m['content_hash']}")
    return result.exit_code


def cmd_run(args) -> int:
    return _report(run_scenario(_load(args.config, args.out)))


def cmd_converge(args) -> int:
    pc = _load(args.config, args.out)
    if pc.scenario.id != "converge":
        opts = {k: v for k, v in pc.scenario.options.items()}
        opts["target"] = pc.scenario.id
        pc.scenario = ScenarioSpec("converge", opts)
    res = run_scenario(pc, levels=args.levels)
    for row in res.tables.get("converge.csv", ((), ()))[1]:
        print("n=%d h=%.6g value=%.6e order=%s" % (row[1], row[2], row[3],
                                                   "-" if math.isnan(row[4]) else f"{row[4]:.3f}"))
    return _report(res)


def cmd_sweep(args) -> int:
    sections = parse_sections(Path(args.config).read_text(encoding="utf-8"))
    sections.setdefault("run", {})["scenario"] = "limit_sweep"
    pc = build_config(sections, args.out)
    lams = tuple(float(x) for x in args.lambdas.split(",")) if args.lambdas else None
    res = run_scenario(pc, lambdas=lams)
    for row in res.tables.get("sweep.csv", ((), ()))[1]:
        print("lambda=%-8g dist_newtonian=%.4e dist_elastic=%.4e" % (row[0], row[2], row[3]))
    return _report(res)


def cmd_audit(args) -> int:
    sections = {"run": {"system": args.system, "scenario": "audit_symmetry", "seed": args.seed},
                "scenario": {"samples": args.samples}}
    pc = build_config(sections, args.out)
    return _report(run_scenario(pc, out_dir=args.out if args.out else False))


def _parse_state(text: str) -> np.ndarray:
    p = Path(text)
    if p.exists():
        text = p.read_text(encoding="utf-8")
    vals = [float(t) for t in text.replace("\n", ",").split(",") if t.strip()]
    return np.array(vals)


def cmd_speeds(args) -> int:
    U = _parse_state(args.state)
    if U.shape[0] not in SYSTEMS.values():
        raise MaxhypError(f"state must have 7 or 10 components, got {U.shape[0]}")
    check_admissible(U)
    nu = np.array([float(t) for t in args.nu.split(",")])
    if nu.shape != (2,) or not np.linalg.norm(nu) > 0:
        raise MaxhypError("--nu expects two numbers a,b")
    nu = tuple(nu / np.linalg.norm(nu))
    params = MaxwellParams(ElasticParams(args.c1_sq, args.d1_sq, args.gamma))
    numeric = [float(s) for s in wave_speeds(U, nu, params)]
    out = {"nu": list(nu), "speeds": numeric,
           "closed_form": [float(s) for s in closed_form_spectrum(U, nu, params)],
           "max_speed_closed_form": max_speed_closed_form(U, nu, params)}
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maxhyp", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory (overrides [output] dir)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("audit-symmetry", help="symmetry certificate over random states")
    p.add_argument("--system", required=True, choices=sorted(SYSTEMS))
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("speeds", help="characteristic speeds of one state")
    p.add_argument("--state", required=True, help="comma-separated components or a file")
    p.add_argument("--nu", required=True, help="direction a,b (normalized)")
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--c1-sq", type=float, default=1.0)
    p.add_argument("--d1-sq", type=float, default=1.0)
    p.set_defaults(func=cmd_speeds)

    p = sub.add_parser("converge", help="refinement study")
    p.add_argument("--config", required=True)
    p.add_argument("--levels", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("sweep", help="relaxation-time sweep of the shear model")
    p.add_argument("--config", required=True)
    p.add_argument("--lambdas", help="comma-separated list")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    kernels.configure_threads()
    try:
        return args.func(args)
    except (MaxhypError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
