"""``ermlab`` command line: run a campaign from a config and write its reports.

Exit codes: 0 all checks pass, 1 a check failed (or a campaign crashed),
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
import warnings

from . import __version__, bounds, constants, experiments
from .config import load_config, scenario_for
from .errors import ConfigError, InputError
from .models import GaussianIdentity, scenario_to_dict


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


class Run:
    """Output directory bookkeeping: the manifest lists every file written."""

    def __init__(self, args, cfg, files):
        self.out = args.out
        self.files = list(files)
        self.manifest = {
            "config_path": args.config,
            "preset": args.preset,
            "resolved_config": cfg,
            "master_seed": cfg["run"]["master_seed"],
            "output_dir": os.path.abspath(args.out),
            "tool_version": __version__,
            "command": args.command,
            "files": self.files,
            "start": _now(),
            "end": None,
        }
        os.makedirs(self.out, exist_ok=True)
        self._write_manifest()

    def _write_manifest(self):
        with open(os.path.join(self.out, "manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_finite(self.manifest), fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")

    def path(self, name):
        if name not in self.files:
            raise RuntimeError(f"{name} was not declared in the manifest")
        return os.path.join(self.out, name)

    def csv(self, name, rows):
        experiments.write_campaign_csv(self.path(name), rows)

    def long_csv(self, name, rows):
        experiments.write_long_csv(self.path(name), rows)

    def json(self, name, obj):
        with open(self.path(name), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_finite(obj), fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")

    def finish(self, passed):
        self.manifest["end"] = _now()
        self.manifest["passed"] = bool(passed)
        self._write_manifest()


def _json_default(o):
    if hasattr(o, "item"):
        return _finite(o.item())
    if hasattr(o, "tolist"):
        return _finite(o.tolist())
    raise TypeError(f"cannot serialize {type(o)}")


def _finite(o):
    """Replace non-finite floats by strings so the JSON stays standard."""
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, dict):
        return {k: _finite(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_finite(v) for v in o]
    return o


def _base(cfg, args):
    seed = cfg["run"]["master_seed"] if args.seed is None else args.seed
    cfg["run"]["master_seed"] = seed
    workers = cfg["run"]["workers"] if args.workers is None else args.workers
    cfg["run"]["workers"] = workers
    return seed, workers


def cmd_rate(cfg, args):
    seed, workers = _base(cfg, args)
    trials = cfg["run"]["trials"]
    if trials < 30:
        raise ConfigError(f"[run] trials: rate fits need >= 30 trials, got {trials}", field="run.trials")
    r = cfg["rate"]
    if len(r["N_grid"]) < 4 or len(r["M_grid"]) < 4:
        raise ConfigError("[rate] N_grid/M_grid: rate fits need >= 4 grid points", field="rate.N_grid")
    run = Run(args, cfg, ["manifest.json", "rate_N.csv", "rate_M.csv", "coverage.csv", "rate_long.csv",
                          "summary.json"])
    scn = scenario_for(cfg)
    by_n = experiments.rate_in_N(scn, [int(n) for n in r["N_grid"]], trials, seed, workers=workers)
    by_m = experiments.rate_in_M(lambda M: scenario_for(cfg, M), [int(m) for m in r["M_grid"]],
                                 int(r["M_fixed_N"]), trials, seed, workers=workers)
    kappa0 = cfg["constants"]["kappa0"]
    sb = constants.estimate_small_ball(scn, kappa0, cfg["constants"]["n_directions"],
                                       cfg["constants"]["n_samples"],
                                       experiments.stream_seed(seed, tag="small-ball-constant"))
    cov = experiments.theorem_A_coverage(scn, int(r["coverage_N"]), r["x_grid"], trials, seed,
                                         sb.beta0_hat, kappa0, workers=workers)
    for q in (by_n, by_m):
        q.quantiles = tuple(r["quantiles"])
    run.csv("rate_N.csv", by_n.rows())
    run.csv("rate_M.csv", by_m.rows())
    run.csv("coverage.csv", cov.rows())
    run.long_csv("rate_long.csv", by_n.long_rows() + by_m.long_rows())
    passed = by_n.passed and by_m.passed and all(cov.passes)
    run.json("summary.json", {"config": cfg, "rate_N": by_n.summary(), "rate_M": by_m.summary(),
                              "coverage": cov.summary(), "beta0_hat": sb.beta0_hat, "pass": passed})
    run.finish(passed)
    return passed


def cmd_constants(cfg, args):
    seed, _ = _base(cfg, args)
    run = Run(args, cfg, ["manifest.json", "constants.csv", "summary.json"])
    c = cfg["constants"]
    scn = scenario_for(cfg)
    rep = constants.constants_report(scn, c["kappa0"], c["n_directions"], c["n_samples"], seed)
    d = rep.as_dict()
    rows = [("constants", k, v) for k, v in d.items() if k != "notes"]
    rows += [("constants", "note", n) for n in rep.notes]
    passed = True
    if rep.B_exact is not None:
        passed = rep.B_exact >= constants.effective_dimension(scn.design) - 1e-8
        rows.append(("constants", "B_ge_M", int(passed)))
    run.csv("constants.csv", rows)
    run.json("summary.json", {"config": cfg, "scenario": scenario_to_dict(scn), "report": d,
                              "pass": passed})
    run.finish(passed)
    return passed


def cmd_lower_bounds(cfg, args):
    seed, workers = _base(cfg, args)
    run = Run(args, cfg, ["manifest.json", "prop3_tail.csv", "prop4.csv", "lemma41.csv",
                          "lower_bounds_long.csv", "summary.json"])
    p3 = cfg["prop3"]
    tail = experiments.tail_probability(int(p3["N"]), int(p3["M"]), p3["x_grid"], None, int(p3["trials"]),
                                        seed, c0=p3["c0"], workers=workers)
    p4 = cfg["prop4"]
    rep = experiments.prop4_campaign(int(p4["M"]), int(p4["N"]), float(p4["eta"]), p4["xi_grid"],
                                     int(p4["trials"]), seed, workers=workers)
    l41 = []
    for x in p3["x_grid"]:
        v = bounds.lemma41_tail(x, int(p3["N"]))
        l41 += [(f"x={x:g}", "exact_tail", v), (f"x={x:g}", "floor_(1-1/e)/x", (1 - math.exp(-1)) / x),
                (f"x={x:g}", "pass", int(v >= (1 - math.exp(-1)) / x))]
    run.csv("prop3_tail.csv", tail.rows())
    run.csv("prop4.csv", rep.rows())
    run.csv("lemma41.csv", l41)
    run.long_csv("lower_bounds_long.csv", tail.long_rows())
    passed = tail.passed and rep.passed
    run.json("summary.json", {"config": cfg, "prop3": tail.summary(), "prop4": rep.summary(), "pass": passed})
    run.finish(passed)
    return passed


def cmd_small_ball(cfg, args):
    seed, workers = _base(cfg, args)
    run = Run(args, cfg, ["manifest.json", "small_ball.csv", "summary.json"])
    s = cfg["small_ball"]
    scn = scenario_for(cfg)
    beta0 = None
    if not isinstance(scn.design, GaussianIdentity):
        beta0 = constants.estimate_small_ball(scn, s["kappa0"], s["n_directions"], 100_000,
                                              experiments.stream_seed(seed, tag="beta0")).beta0_hat
    camp = experiments.small_ball_campaign(scn, int(s["N"]), s["kappa0"], int(s["n_directions"]),
                                           int(s["seeds"]), seed, beta0, workers)
    run.csv("small_ball.csv", camp.rows())
    run.json("summary.json", {"config": cfg, "small_ball": camp.summary(), "pass": camp.passed})
    run.finish(camp.passed)
    return camp.passed


def cmd_multiplier(cfg, args):
    seed, workers = _base(cfg, args)
    run = Run(args, cfg, ["manifest.json", "multiplier.csv", "summary.json"])
    s = cfg["multiplier"]
    camp = experiments.multiplier_campaign(scenario_for(cfg), int(s["N"]), float(s["x"]), int(s["seeds"]),
                                           seed, workers)
    run.csv("multiplier.csv", camp.rows())
    run.json("summary.json", {"config": cfg, "multiplier": camp.summary(), "pass": camp.passed})
    run.finish(camp.passed)
    return camp.passed


def cmd_bounds(args, stdout=None):
    stdout = stdout or sys.stdout
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a = bounds.bound_theorem_A(args.beta0, args.kappa0, args.sigma, args.M, args.N, args.x)
        c = bounds.bound_catoni(args.B, args.m4, args.M, args.N, args.x)
        t = bounds.bound_theorem_2(args.theta0, args.sigma4, args.M, args.N, args.x)
    for name, b in (("theorem_A", a), ("catoni", c), ("theorem_2", t)):
        rows.append((name, args.M, args.N, args.x, b.value, b.probability, int(b.valid), b.condition_detail))
    text = experiments.csv_text(("bound", "M", "N", "x", "value", "probability", "valid", "detail"), rows)
    stdout.write(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "bounds.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return True


COMMANDS = {
    "rate": cmd_rate,
    "constants": cmd_constants,
    "lower-bounds": cmd_lower_bounds,
    "small-ball": cmd_small_ball,
    "multiplier": cmd_multiplier,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="ermlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None)
        sp.add_argument("--out", default=os.path.join("runs", name))
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--workers", type=int, default=None, help="0 = one per CPU")
        sp.add_argument("--preset", choices=sorted(("ci", "desk")), default="ci")
    b = sub.add_parser("bounds")
    b.add_argument("--out", default=None)
    for flag, default in (("beta0", 1.0), ("kappa0", 1.0), ("sigma", 1.0), ("M", 1), ("N", 160000),
                          ("x", 1.0), ("B", 1.0), ("m4", 1.0), ("theta0", 1.0), ("sigma4", 1.0)):
        b.add_argument(f"--{flag}", type=type(default), default=default)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "bounds" and args.seed is not None and not 0 <= args.seed < 2**64:
        print("ermlab: error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    try:
        if args.command == "bounds":
            ok = cmd_bounds(args)
        else:
            cfg = load_config(args.config, args.preset)
            ok = COMMANDS[args.command](cfg, args)
    except (ConfigError, InputError) as exc:
        print(f"ermlab: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ermlab: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 -- campaign crash maps to exit 1
        print(f"ermlab: campaign failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
