"""Command line front end: ``burgers-spde {simulate,converge,verify-bounds,selftest}``.

Exit codes: 0 success, 1 selftest failure, 2 configuration error, 3 I/O error.
"""

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, config as cfgmod
from .analysis import UndefinedRate, apriori_check, run_coupled
from .noise import NoiseHierarchy, fine_convolution
from .scheme import simulate_path

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _json_float(x):
    return None if not math.isfinite(x) else float(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(out, cfg, command, outputs, timings, started):
    manifest = {
        "command": command,
        "version": __version__,
        "seed": str(cfg["monte_carlo"]["seed"]),
        "path_seeds": [str(s) for s in cfgmod.path_seeds(cfg)] if command != "simulate" else [],
        "config": cfgmod.to_jsonable(cfg),
        "started_utc": started,
        "wall_clock_s": timings.pop("total"),
        "timings_s": {str(k): v for k, v in timings.items()},
        "checksums_sha256": {Path(p).name: _sha256(p) for p in outputs},
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def _trajectory_rows(rec):
    ind = np.append(rec.indicator, False).astype(int)
    for m in range(rec.times.size):
        yield (rec.times[m], rec.norm_X_H[m], rec.norm_X_rho[m], rec.norm_Psi_rho[m], int(ind[m]))


TRAJ_HEADER = ["t", "norm_H", "norm_Hrho", "psi_norm_Hrho", "indicator"]


def cmd_simulate(cfg, out, threads=1):
    """One path per configured level; ``trajectory.csv`` holds the finest level."""
    p = cfgmod.model_params(cfg)
    levels = cfg["discretization"]["levels"]
    noise = NoiseHierarchy(cfg["monte_carlo"]["seed"], cfg["discretization"]["n_max"],
                           enabled=bool(cfg["model"]["noise"]))
    fine = fine_convolution(noise, noise.max_modes, p.spec, p.T)
    timings, outputs = {}, []
    for lv in levels if cfg["output"]["emit_trajectories"] else levels[-1:]:
        t0 = time.perf_counter()
        rec = simulate_path(p, noise, lv, fine=fine)
        timings[lv] = time.perf_counter() - t0
        if lv == levels[-1]:
            path = out / "trajectory.csv"
            _write_csv(path, TRAJ_HEADER, _trajectory_rows(rec))
            outputs.append(path)
        if cfg["output"]["emit_trajectories"]:
            path = out / f"coefficients_level{lv}.csv"
            header = ["t"] + [f"x{k}" for k in range(1, rec.X.shape[1] + 1)]
            _write_csv(path, header, ([t, *x] for t, x in zip(rec.times, rec.X)))
            outputs.append(path)
    return outputs, timings, f"simulated levels up to {levels[-1]}"


ERR_HEADER = ["level", "N", "h", "q", "strong_error", "std_err",
              "pathwise_p50", "pathwise_p90", "pathwise_max"]


def cmd_converge(cfg, out, threads=1):
    levels = cfg["discretization"]["levels"]
    if len(levels) < 3:
        raise cfgmod.ConfigError("converge needs at least 3 levels (rate undefined otherwise)")
    if cfg["monte_carlo"]["paths"] < 8:
        raise cfgmod.ConfigError("converge needs at least 8 paths")
    p = cfgmod.model_params(cfg)
    rep = run_coupled(p, cfgmod.path_seeds(cfg), levels, cfg["discretization"]["n_max"],
                      q=p.q_moment, threads=threads, noise=bool(cfg["model"]["noise"]))
    errors = out / "errors.csv"
    _write_csv(errors, ERR_HEADER, (
        (r.level, r.n_modes, r.h, r.q, r.strong_error, r.std_err,
         r.pathwise_p50, r.pathwise_p90, r.pathwise_max) for r in rep.rows))
    se = rep.strong_errors
    rates = {
        "rate": _json_float(rep.rate),
        "intercept": _json_float(rep.intercept),
        "r_squared": _json_float(rep.r_squared),
        "rate_defined": math.isfinite(rep.rate),
        "levels": levels,
        "reference_level": rep.n_max,
        "paths": rep.paths,
        "q": p.q_moment,
        "strictly_decreasing": bool(np.all(np.diff(se) < 0)),
        "ratio_last_first": _json_float(float(se[-1] / se[0])) if se[0] > 0 else None,
        "pathwise_monotone_fraction": rep.monotone_fraction,
        "indicator_on_fraction": {str(k): v for k, v in rep.indicator_on_fraction.items()},
    }
    rates_path = out / "rates.json"
    with open(rates_path, "w") as fh:
        json.dump(rates, fh, indent=2, sort_keys=True)
        fh.write("\n")
    msg = (f"rate {rep.rate:.4f} (R^2 {rep.r_squared:.4f}); "
           f"strictly decreasing: {rates['strictly_decreasing']}")
    return [errors, rates_path], dict(rep.timings), msg


BOUND_HEADER = ["path", "seed", "level", "lhs_max", "rhs", "log10_rhs", "margin", "holds", "overflow"]


def cmd_verify_bounds(cfg, out, threads=1):
    p = cfgmod.model_params(cfg)
    bc = cfgmod.bound_constants(cfg)
    levels = cfg["discretization"]["levels"]
    n_noise = cfg["discretization"]["n_max"]
    timings = {lv: 0.0 for lv in levels}
    rows = []
    for i, seed in enumerate(cfgmod.path_seeds(cfg)):
        noise = NoiseHierarchy(seed, n_noise, enabled=bool(cfg["model"]["noise"]))
        fine = fine_convolution(noise, noise.max_modes, p.spec, p.T)
        for lv in levels:
            t0 = time.perf_counter()
            rec = simulate_path(p, noise, lv, eta=bc.eta, fine=fine)
            r = apriori_check(rec, rec.processes, bc, p)
            timings[lv] += time.perf_counter() - t0
            rows.append((i, str(seed), lv, r.lhs_max, r.rhs, r.log10_rhs, r.margin, r.holds, r.overflow))
    min_margin = min(r[6] for r in rows)
    all_hold = all(r[7] for r in rows)
    summary = ("min", "", "", max(r[3] for r in rows), min(r[4] for r in rows),
               min(r[5] for r in rows), min_margin, all_hold, any(r[8] for r in rows))
    path = out / "bounds.csv"
    _write_csv(path, BOUND_HEADER, rows + [summary])
    return [path], timings, f"all rows hold: {all_hold}; minimum margin {min_margin:.6g}"


def cmd_selftest():
    from .selftest import run_all

    results = run_all()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    failed = [n for n, ok, _ in results if not ok]
    if failed:
        print("failing properties: " + ", ".join(failed), file=sys.stderr)
        return EXIT_SELFTEST
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "converge": cmd_converge, "verify-bounds": cmd_verify_bounds}


def build_parser():
    ap = argparse.ArgumentParser(prog="burgers-spde", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in [*COMMANDS, "selftest"]:
        sp = sub.add_parser(name)
        if name == "selftest":
            continue
        sp.add_argument("--config", type=Path, help="TOML config or a previous manifest.json")
        sp.add_argument("--seed", help="master seed, decimal or 0x-hex (overrides config)")
        sp.add_argument("--paths", type=int, help="number of Monte Carlo paths (overrides config)")
        sp.add_argument("--out", type=Path, help=f"output directory (default ${cfgmod.OUT_ENV} or ./out)")
        sp.add_argument("--threads", type=int, default=1, help="worker threads")
    return ap


def _resolve_config(args):
    if args.config is None:
        cfg = cfgmod.normalise(cfgmod._merge({}))
    else:
        cfg = cfgmod.load_config(args.config)
    if args.seed is not None:
        cfg["monte_carlo"]["seed"] = args.seed
    if args.paths is not None:
        cfg["monte_carlo"]["paths"] = args.paths
    return cfgmod.normalise(cfg)


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return cmd_selftest()
    try:
        cfg = _resolve_config(args)
        if args.threads < 1:
            raise cfgmod.ConfigError("--threads must be >= 1")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except (cfgmod.ConfigError, ValueError) as exc:
        errs = getattr(exc, "errors", [str(exc)])
        for e in errs:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    out = cfgmod.output_dir(cfg, args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        outputs, timings, msg = COMMANDS[args.command](cfg, out, threads=args.threads)
        timings["total"] = time.perf_counter() - t0
        _write_manifest(out, cfg, args.command, outputs, timings, started)
    except cfgmod.ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except UndefinedRate as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{args.command}: {msg}; outputs in {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
