"""Batch front end: classification, integrability tests, witness runs,
pasting verification, parameter sweeps and group self-checks.

Config files are JSON or TOML.  Exit codes: 0 success, 1 a verification
failed, 2 usage or config error.  CSV output uses round-trip float
formatting and no timestamps, so a fixed seed reproduces byte-identical
files.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import os
import pathlib
import sys

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import plots
from .groups import (ball_volume_estimate, group_from_json, make_euclidean,
                     make_heisenberg, selfcheck)
from .keller_osserman import ko_test, mean_curvature_family, power_triple
from .profiles import profile_from_descriptor
from .ranges import (ParamSet, classify_main, classify_main2,
                     classify_superlevel, h_constant)
from .weakform import build_glue_demo, calibrate_tolerance, paste_verify
from .witnesses import (ode_nonexistence_probe, verify_exponent_counterexample,
                        verify_growth_sharpness, verify_radial_lower_bound)

log = logging.getLogger("carnot_verif")

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2

CHECKPOINT_EVERY = 10_000
MAX_ROWS = 1_000_000


class ConfigError(Exception):
    pass


def load_config(path: str) -> dict:
    p = pathlib.Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    text = p.read_text()
    if p.suffix in (".toml", ".tml"):
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"TOML parse error in {path}: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"could not parse {path} as JSON or TOML: {e}")


def _grid_axis(spec):
    if isinstance(spec, list):
        return [float(v) for v in spec]
    if isinstance(spec, dict):
        if "num" in spec:
            return np.linspace(float(spec["start"]), float(spec["stop"]),
                               int(spec["num"])).tolist()
        step = float(spec["step"])
        return np.arange(float(spec["start"]),
                         float(spec["stop"]) + 0.5 * step, step).tolist()
    raise ConfigError(f"bad grid axis spec: {spec!r}")


def expand_grid(grid: dict):
    keys = sorted(grid)
    axes = [_grid_axis(grid[k]) for k in keys]
    total = int(np.prod([len(a) for a in axes])) if axes else 1
    if total > MAX_ROWS:
        raise ConfigError(f"grid has {total} rows, cap is {MAX_ROWS}")
    for combo in itertools.product(*axes):
        yield dict(zip(keys, combo))


def write_rows(rows, header, out, fmt: str):
    if fmt == "json":
        payload = json.dumps([dict(zip(header, r)) for r in rows], indent=2)
        if out:
            pathlib.Path(out).write_text(payload + "\n")
        else:
            print(payload)
        return
    sink = open(out, "w", newline="") if out else sys.stdout
    try:
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    finally:
        if out:
            sink.close()


def _param_set(doc: dict) -> ParamSet:
    try:
        return ParamSet(
            p=float(doc["p"]), chi=float(doc["chi"]), mu=float(doc["mu"]),
            Q=int(doc.get("Q", 2)),
            omega=float(doc["omega"]) if "omega" in doc else None,
            sigma=float(doc["sigma"]) if "sigma" in doc else None,
            l_positive_at_zero=bool(doc.get("l_positive_at_zero", False)),
            symmetric_f=bool(doc.get("symmetric_f", False)))
    except (KeyError, ValueError, TypeError) as e:
        raise ConfigError(f"bad parameter set: {e}")


def classify_point(task: str, doc: dict):
    ps = _param_set(doc)
    if task == "main":
        return classify_main(ps)
    if task == "main2":
        return classify_main2(ps, little_o=bool(doc.get("little_o", True)))
    if task == "superlevel":
        return classify_superlevel(ps)
    if task == "h_constant":
        return h_constant(ps.sigma, ps.chi, ps.p, ps.mu, ps.Q)
    raise ConfigError(f"unknown classify task {task!r}")


def cmd_classify(cfg: dict, args) -> int:
    task = cfg.get("task", "main")
    base = dict(cfg.get("params", {}))
    grid = cfg.get("grid")
    header = None
    rows = []
    points = expand_grid(grid) if grid else [{}]
    for point in points:
        doc = {**base, **point}
        v = classify_point(task, doc)
        keys = sorted(point)
        if header is None:
            header = keys + ["tag", "conclusion", "H", "boundary"]
        rows.append([point[k] for k in keys]
                    + [v.tag, v.conclusion,
                       v.H if v.H is not None else "",
                       ";".join(v.boundary)])
    write_rows(rows, header, args.out, args.format)
    return EXIT_OK


def _build_triple(doc: dict):
    fam = doc.get("family", "power")
    if fam == "power":
        return power_triple(float(doc.get("mu", 0.0)), float(doc["omega"]),
                            float(doc.get("chi", 0.0)))
    if fam == "mean_curvature":
        return mean_curvature_family(float(doc.get("chi", 0.0)),
                                     float(doc["omega"]),
                                     float(doc.get("mu", 0.0)))
    raise ConfigError(f"unknown nonlinearity family {fam!r}")


def cmd_ko(cfg: dict, args) -> int:
    try:
        profile = profile_from_descriptor(cfg["profile"])
    except (KeyError, ValueError) as e:
        raise ConfigError(f"bad profile: {e}")
    base = dict(cfg.get("triple", {}))
    variant = cfg.get("variant", "modified")
    grid = cfg.get("grid")
    header = None
    rows = []
    for point in (expand_grid(grid) if grid else [{}]):
        doc = {**base, **point}
        triple = _build_triple(doc)
        report = ko_test(profile, triple, variant=variant,
                         delta_band=float(cfg.get("delta_band", 0.05)))
        keys = sorted(point)
        if header is None:
            header = keys + report.csv_header()
        rows.append([point[k] for k in keys] + report.csv_row())
    write_rows(rows, header, args.out, args.format)
    return EXIT_OK


def _witness_report(cfg: dict):
    op = cfg.get("op", "counterexample")
    if op == "lower_bound":
        return verify_radial_lower_bound(float(cfg["sigma"]), int(cfg["Q"]))
    if op == "sharpness":
        return verify_growth_sharpness(float(cfg["chi"]), float(cfg["mu"]),
                                       float(cfg["sigma"]), int(cfg["Q"]))
    if op == "counterexample":
        return verify_exponent_counterexample(
            int(cfg.get("case", 1)), float(cfg["chi"]), float(cfg["mu"]),
            float(cfg["omega"]), int(cfg.get("Q", 3)),
            sigma=float(cfg["sigma"]) if "sigma" in cfg else None)
    raise ConfigError(f"unknown witness op {op!r}")


def cmd_witness(cfg: dict, args) -> int:
    try:
        report = _witness_report(cfg)
    except (KeyError, TypeError) as e:
        raise ConfigError(f"bad witness config: {e}")
    except ValueError as e:
        print(f"witness rejected: {e}", file=sys.stderr)
        return EXIT_VERIFICATION
    out = pathlib.Path(args.out) if args.out else pathlib.Path("witness")
    rows = [(r, a, b, m) for r, a, b, m in report.rows()]
    write_rows(rows, ["r", "lhs", "rhs_shape", "margin"],
               str(out.with_suffix(".csv")), "csv")
    out.with_suffix(".json").write_text(report.to_json() + "\n")
    fig = plots.render_margin_figure(report, out.with_suffix(".png"))
    log.info("wrote %s, %s, %s", out.with_suffix(".csv"),
             out.with_suffix(".json"), fig)
    print(f"verdict: {report.verdict} (C* = {report.C_star!r})")
    return EXIT_OK if report.certified else EXIT_VERIFICATION


def cmd_paste(cfg: dict, args) -> int:
    demo = build_glue_demo(
        Q=int(cfg.get("Q", 3)), chi=float(cfg.get("chi", 0.5)),
        mu=float(cfg.get("mu", 0.0)), omega_exp=float(cfg.get("omega", 0.25)),
        sigma=float(cfg.get("sigma", 6.0)), gamma=float(cfg.get("gamma", 1.0)),
        n=int(cfg.get("n", 64)), half=float(cfg.get("half", 2.0)),
        seed=args.seed)
    rho = float(cfg.get("rho", 0.3))
    probe = [demo.interface_points[0], np.zeros(demo.group.topological_dim)]
    from .weakform import BumpTestFunction
    bumps = [BumpTestFunction(demo.group, c, rho) for c in probe]
    tol = calibrate_tolerance(demo.group, demo.profile, demo.lattice,
                              demo.calibration_cases, bumps)
    report = paste_verify(demo.group, demo.u_const, demo.u_witness,
                          demo.omega, demo.profile, demo.B, demo.lattice,
                          n_bumps=int(cfg.get("n_bumps", 50)),
                          n_straddle=int(cfg.get("n_straddle", 10)),
                          rho=rho, tol=tol,
                          interface_points=demo.interface_points,
                          seed=args.seed)
    payload = report.to_json()
    if args.out:
        pathlib.Path(args.out).write_text(payload + "\n")
    else:
        print(payload)
    return EXIT_OK if report.passed else EXIT_VERIFICATION


def _group_from_cfg(cfg: dict):
    doc = cfg.get("group", {"kind": "heisenberg", "m": 1})
    try:
        return group_from_json(doc)
    except ValueError as e:
        raise ConfigError(str(e))


def cmd_selfcheck(cfg: dict, args) -> int:
    g = _group_from_cfg(cfg)
    rng = np.random.default_rng(args.seed)
    results = selfcheck(g, rng=rng)
    # volume scaling across dilations
    n = int(cfg.get("volume_samples", 200_000))
    est = {R: ball_volume_estimate(g, R, n, rng=rng) for R in (1.0, 2.0)}
    ratio = est[2.0].value / est[1.0].value
    expected = 2.0 ** g.homogeneous_dim
    err = ratio * np.hypot(est[1.0].relative_error, est[2.0].relative_error)
    results.append({"name": "volume_scaling", "residual": abs(ratio - expected),
                    "tol": 3.0 * err, "pass": abs(ratio - expected) <= 3.0 * err})
    ok = all(r["pass"] for r in results)
    payload = json.dumps(results, indent=2, default=float)
    if args.out:
        pathlib.Path(args.out).write_text(payload + "\n")
    else:
        print(payload)
    return EXIT_OK if ok else EXIT_VERIFICATION


def _sweep_eval(job):
    kind, fixed, point = job
    if kind == "classify":
        v = classify_point(fixed["task"], {**fixed["params"], **point})
        return [point[k] for k in sorted(point)] \
            + [v.tag, v.conclusion, v.H if v.H is not None else ""]
    if kind == "ko":
        profile = profile_from_descriptor(fixed["profile"])
        triple = _build_triple({**fixed["triple"], **point})
        rep = ko_test(profile, triple, variant=fixed.get("variant", "modified"))
        return [point[k] for k in sorted(point)] + rep.csv_row()
    raise ConfigError(f"unknown sweep task {kind!r}")


def cmd_sweep(cfg: dict, args) -> int:
    kind = cfg.get("task", "classify")
    grid = cfg.get("grid")
    if not grid:
        raise ConfigError("sweep needs a grid")
    fixed = {"task": cfg.get("classify_task", "main"),
             "params": cfg.get("params", {}),
             "profile": cfg.get("profile"),
             "triple": cfg.get("triple", {}),
             "variant": cfg.get("variant", "modified")}
    points = list(expand_grid(grid))
    keys = sorted(points[0]) if points else []
    if kind == "classify":
        header = keys + ["tag", "conclusion", "H"]
    else:
        from .keller_osserman import KOReport
        header = keys + KOReport.csv_header()

    jobs = [(kind, fixed, p) for p in points]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(_sweep_eval, jobs, chunksize=64))
    else:
        rows = []
        ckpt = pathlib.Path(args.out).with_suffix(".ckpt") if args.out else None
        for i, job in enumerate(jobs):
            rows.append(_sweep_eval(job))
            if ckpt and (i + 1) % CHECKPOINT_EVERY == 0:
                write_rows(rows, header, str(ckpt), "csv")
                log.info("checkpoint at %d rows", i + 1)
    write_rows(rows, header, args.out, args.format)
    if args.out and args.format == "csv" and len(keys) >= 2:
        try:
            dicts = [dict(zip(header, r)) for r in rows]
            val = "tag" if kind == "classify" else "verdict"
            plots.render_sweep_figure(dicts, keys[0], keys[1], val,
                                      pathlib.Path(args.out).with_suffix(".png"))
        except Exception as e:   # figure is best-effort next to the data
            log.warning("sweep figure not rendered: %s", e)
    return EXIT_OK


def cmd_ode(cfg: dict, args) -> int:
    report = ode_nonexistence_probe(
        float(cfg.get("mu", 0.0)), T=float(cfg.get("T", 1.0)),
        slopes=tuple(cfg.get("slopes", (0.1, 1.0, 10.0))))
    payload = report.to_json()
    if args.out:
        pathlib.Path(args.out).write_text(payload + "\n")
    else:
        print(payload)
    return EXIT_OK if report.all_blew_up else EXIT_VERIFICATION


COMMANDS = {
    "classify": cmd_classify,
    "ko": cmd_ko,
    "witness": cmd_witness,
    "paste": cmd_paste,
    "sweep": cmd_sweep,
    "selfcheck": cmd_selfcheck,
    "ode": cmd_ode,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="carnot-verif",
        description="verification runs for quasilinear inequalities on "
                    "Carnot groups")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=False, help="JSON or TOML config")
    ap.add_argument("--out", default=None, help="output path")
    ap.add_argument("--format", choices=("json", "csv"), default="csv")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    return ap


def main(argv=None) -> int:
    level = os.environ.get("CARNOT_VERIF_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        cfg = load_config(args.config) if args.config else {}
        return COMMANDS[args.command](cfg, args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        log.exception("command failed")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
