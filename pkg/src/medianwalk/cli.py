"""Command-line interface.

Exit codes: 0 all checks passed; 1 a verification counterexample or
acceptance failure (artifacts contain the witnesses); 2 config error;
3 unexpected internal failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback

from .config import config_hash, load_config, output_dir, validate_config
from .errors import ConfigError, MedianwalkError


def _load_or_default(args, kind, overrides):
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.config:
        config = load_config(args.config, kind=kind)
        config.update(overrides)
        return config
    return validate_config(kind, overrides)


def cmd_complex_gen(args):
    from .complexes import complex_to_json
    from .families import generate_family
    from .reports import emit_json

    config = _load_or_default(
        args, "complex-gen",
        {"family": json.loads(args.family) if args.family else None, "out": args.out},
    )
    c = generate_family(config["family"], budget=config["budget"])
    out = output_dir(config)
    path = emit_json(complex_to_json(c), os.path.join(out, "complex.json"))
    print(f"wrote {path}: {c.n} vertices, {c.num_walls} walls "
          f"(median check: {c.meta['median_check']['mode']})")
    return 0


def cmd_complex_verify(args):
    from .complexes import complex_hash, load_complex
    from .lemmas import remark_ss_report, verify_box_lemma, verify_projection_lemma
    from .reports import emit_json

    config = _load_or_default(args, "complex-verify", {"path": args.path, "out": args.out})
    c = load_complex(config["path"])
    mode = config["box_mode"]
    if mode == "auto":
        mode = "exhaustive" if c.n <= 64 else "sampled"
    reports = [
        remark_ss_report(c),
        verify_box_lemma(c, mode=mode, quadruples=config["box_quadruples"], seed=config["seed"]),
        verify_projection_lemma(c, trials=config["projection_trials"], seed=config["seed"]),
    ]
    violations = sum(r.violations for r in reports)
    out = output_dir(config)
    emit_json(
        {"complex_hash": complex_hash(c), "reports": [r.to_json() for r in reports]},
        os.path.join(out, "complex_verify.json"),
    )
    for r in reports:
        print(f"{r.lemma}: {r.cases_checked} cases, {r.violations} violations")
    return 0 if violations == 0 else 1


def cmd_raag_check(args):
    from .suites import run_raag_consistency

    config = _load_or_default(
        args, "raag-check",
        {"group": args.group, "seed": args.seed, "out": args.out,
         "radius": args.radius},
    )
    return run_raag_consistency(config)


def cmd_walk_run(args):
    from .config import resolve_group
    from .reports import append_manifest, emit_json, emit_walk_csv, start_manifest, utcnow
    from .suites import _registry, measure_from_config
    from .estimators import s_growth
    from .walk import clt_stat, drift_estimate, simulate

    config = _load_or_default(
        args, "walk",
        {"group": args.group, "seed": args.seed, "n": args.n,
         "trials": args.trials, "out": args.out, "radius": args.radius},
    )
    out = output_dir(config)
    manifest = start_manifest(config_hash(config), config["seed"])
    dg = resolve_group(config["group"])
    measure = measure_from_config(dg, config["measure"])
    run = simulate(dg, measure, seed=config["seed"], n=config["n"], trials=config["trials"])
    lam = drift_estimate(run)
    slope = s_growth(run, radius=config["radius"], window=config["window"])
    samples = clt_stat(run, lam.value)
    doc = {
        "suite": "walk",
        "group": dg.to_json(),
        "seed": run.seed,
        "n": run.n,
        "trials": run.trials,
        "lambda_hat": lam.to_json(),
        "s_slope": slope.to_json(),
        "prng": run.meta["prng"],
    }
    artifacts = [
        emit_json(doc, os.path.join(out, "walk_report.json")),
        emit_walk_csv(run, samples, os.path.join(out, "walk_samples.csv")),
    ]
    manifest.finished = utcnow()
    manifest.outcome = "pass"
    manifest.artifacts = artifacts
    append_manifest(manifest, _registry(out))
    print(f"lambda_hat = {lam.value:.6f} [{lam.ci_low:.6f}, {lam.ci_high:.6f}], "
          f"s_slope = {slope.value:.6f}")
    return 0


def cmd_clt_run(args):
    from .suites import run_clt

    config = _load_or_default(
        args, "clt",
        {"group": args.group, "seed": args.seed, "n": args.n,
         "trials": args.trials, "out": args.out, "radius": args.radius},
    )
    return run_clt(config)


def cmd_report_show(args):
    from .figures import clt_histogram, drift_curves

    if not os.path.exists(args.path):
        raise ConfigError(f"report file {args.path} does not exist")
    with open(args.path) as fh:
        doc = json.load(fh)
    print(json.dumps(doc, indent=2, sort_keys=True))
    if args.figures:
        import numpy as np

        out = os.path.join(os.path.dirname(os.path.abspath(args.path)), "figures")
        csv_path = os.path.join(os.path.dirname(os.path.abspath(args.path)), "clt_samples.csv")
        if os.path.exists(csv_path):
            rows = np.genfromtxt(csv_path, delimiter=",", names=True)
            variance = (doc.get("sigma2_direct") or {}).get("value")
            path = clt_histogram(np.atleast_1d(rows["clt_stat"]), variance, out)
            print(f"figures: {path}")
    return 0


def cmd_suite(args):
    from .suites import run_suite

    config = {}
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    if args.out:
        config["out"] = args.out
    if args.seed is not None:
        config["seed"] = args.seed
    return run_suite(args.name, config)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="medianwalk",
        description="Exact cube-complex median geometry and a random-walk laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_walk=False):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output directory (MEDIANWALK_OUT overrides)")
        p.add_argument("--seed", type=int)
        p.add_argument("--radius", type=int, help="certificate search radius")
        if with_walk:
            p.add_argument("--trials", type=int)
            p.add_argument("--n", type=int, help="walk horizon")
            p.add_argument("--group", help="F2 | Z2 | C5 | path to defining graph JSON")

    p_complex = sub.add_parser("complex", help="finite complex tools")
    complex_sub = p_complex.add_subparsers(dest="subcommand", required=True)
    p_gen = complex_sub.add_parser("gen", help="generate a family complex")
    p_gen.add_argument("--family", help="family spec as inline JSON")
    common(p_gen)
    p_gen.set_defaults(func=cmd_complex_gen)
    p_verify = complex_sub.add_parser("verify", help="verify lemmas on a complex file")
    p_verify.add_argument("--path", help="complex JSON file")
    common(p_verify)
    p_verify.set_defaults(func=cmd_complex_verify)

    p_raag = sub.add_parser("raag", help="group-engine tools")
    raag_sub = p_raag.add_subparsers(dest="subcommand", required=True)
    p_check = raag_sub.add_parser("check", help="consistency against finite hulls")
    p_check.add_argument("--group")
    common(p_check)
    p_check.set_defaults(func=cmd_raag_check)

    p_walk = sub.add_parser("walk", help="random walk runs")
    walk_sub = p_walk.add_subparsers(dest="subcommand", required=True)
    p_wrun = walk_sub.add_parser("run", help="simulate and estimate drift")
    common(p_wrun, with_walk=True)
    p_wrun.set_defaults(func=cmd_walk_run)

    p_clt = sub.add_parser("clt", help="central limit theorem pipeline")
    clt_sub = p_clt.add_subparsers(dest="subcommand", required=True)
    p_crun = clt_sub.add_parser("run", help="full CLT report with figures")
    common(p_crun, with_walk=True)
    p_crun.set_defaults(func=cmd_clt_run)

    p_report = sub.add_parser("report", help="inspect saved reports")
    report_sub = p_report.add_subparsers(dest="subcommand", required=True)
    p_show = report_sub.add_parser("show", help="pretty-print a report JSON")
    p_show.add_argument("path")
    p_show.add_argument("--figures", action="store_true", help="render figures next to the report")
    p_show.set_defaults(func=cmd_report_show)

    p_suite = sub.add_parser("suite", help="named verification suites")
    p_suite.add_argument("name", choices=["lemmas", "raag-consistency", "clt", "s-growth", "full"])
    p_suite.add_argument("--config")
    p_suite.add_argument("--out")
    p_suite.add_argument("--seed", type=int)
    p_suite.set_defaults(func=cmd_suite)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MedianwalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
