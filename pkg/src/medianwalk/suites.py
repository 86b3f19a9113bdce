"""Verification and experiment suites behind the CLI.

Each suite validates its config, runs, writes artifacts (JSON reports,
CSV samples, figures), appends a manifest to the registry, and returns a
process exit code: 0 all checks passed, 1 a verification or acceptance
check failed, 2 config error (raised as ConfigError before we get here).
"""

from __future__ import annotations

import os

import numpy as np

from .complexes import complex_hash, save_complex
from .config import config_hash, output_dir, resolve_group, validate_config
from .errors import MedianwalkError
from .estimators import CLTReport, psi_sigma_estimate, s_growth
from .families import generate_family
from .figures import render_clt_figures
from .lemmas import (
    remark_ss_report,
    verify_box_lemma,
    verify_chain_gromov,
    verify_projection_lemma,
)
from .raag import dist, identity, median_raag, nf
from .raagwalls import (
    hull_materialize,
    max_certified_ss_chain,
    pieces,
    ss_pieces,
    transverse_pieces,
    wall_in_hull,
)
from .reports import append_manifest, emit_json, emit_walk_csv, start_manifest, utcnow
from .walk import (
    clt_stat,
    cocycle_check,
    drift_estimate,
    ks_normal_test,
    sigma2_direct_estimate,
    simulate,
    srw_measure,
    validate_measure,
)
from .wallgeom import WallRelation, wall_pairs, wall_relation

DEFAULT_LEMMA_FAMILIES = [
    {"family": "tree", "seed": 0, "size": 24},
    {"family": "tree", "seed": 1, "size": 63},
    {"family": "tree", "seed": 2, "size": 200},
    {"family": "grid", "p": 3, "q": 3},
    {"family": "grid", "p": 4, "q": 6},
    {"family": "grid", "p": 8, "q": 10},
    {"family": "hypercube", "dim": 3},
    {"family": "hypercube", "dim": 4},
    {"family": "hypercube", "dim": 6},
    {"family": "product", "factors": [
        {"family": "tree", "seed": 3, "size": 5},
        {"family": "tree", "seed": 4, "size": 5},
    ]},
    {"family": "median_closure", "seed": 5, "dim": 6, "points": 9},
    {"family": "median_closure", "seed": 6, "dim": 7, "points": 11},
]

EXHAUSTIVE_BOX_LIMIT = 64


def _registry(out):
    return os.path.join(out, "registry.jsonl")


def _finish(manifest, outcome, artifacts, out):
    manifest.finished = utcnow()
    manifest.outcome = outcome
    manifest.artifacts = artifacts
    append_manifest(manifest, _registry(out))


def measure_from_config(dg, spec):
    if spec == "srw" or spec is None:
        return srw_measure(dg)
    return validate_measure(dg, [(w, p) for w, p in spec["support"]])


def _tree_chain(c, length):
    """A nested strongly separated half-space chain along a tree path."""
    ends = np.unravel_index(np.argmax(c.dist), c.dist.shape)
    x, y = int(ends[0]), int(ends[1])
    walls = c.separating_walls(x, y)
    M = c.side_one
    oriented = []
    for w in walls:
        orientation = 1 if M[w, y] else 0
        side = M[w] if orientation else ~M[w]
        oriented.append((int(side.sum()), w, orientation))
    oriented.sort(reverse=True)
    return [(w, o) for _, w, o in oriented[:length]]


def run_lemmas(config):
    """Remark 3.3, projection lemma, chain bounds, and the box lemma over
    the configured family set."""
    config = validate_config("lemmas", {k: v for k, v in config.items() if k != "kind"})
    out = output_dir(config)
    manifest = start_manifest(config_hash(config), config["seed"])
    families = config["families"] or DEFAULT_LEMMA_FAMILIES
    artifacts = []
    reports = []
    violations = 0
    for spec in families:
        c = generate_family(spec)
        rep = remark_ss_report(c)
        reports.append(("remark_ss", spec, rep))
        box_mode = "exhaustive" if c.n <= EXHAUSTIVE_BOX_LIMIT else "sampled"
        rep_box = verify_box_lemma(
            c, mode=box_mode, quadruples=config["box_quadruples"], seed=config["seed"]
        )
        reports.append(("box", spec, rep_box))
        rep_proj = verify_projection_lemma(
            c, trials=config["projection_trials"], A=3, seed=config["seed"]
        )
        reports.append(("projection", spec, rep_proj))
        if spec["family"] == "tree":
            chain = _tree_chain(c, 12)
            if len(chain) >= 2:
                reports.append(("chain_gromov", spec, verify_chain_gromov(c, chain)))
    doc = {"suite": "lemmas", "results": []}
    for name, spec, rep in reports:
        violations += rep.violations
        doc["results"].append({"check": name, "family": spec, "report": rep.to_json()})
    doc["total_violations"] = violations
    path = emit_json(doc, os.path.join(out, "lemmas_report.json"))
    artifacts.append(path)
    code = 0 if violations == 0 else 1
    _finish(manifest, "pass" if code == 0 else "fail", artifacts, out)
    return code


def _consistency_instances(dg, rng, instances, radius):
    """Algebraic values vs the finite hull oracle; returns failure count."""
    failures = 0
    checked = {"median": 0, "dist": 0, "gromov": 0, "transversality": 0, "certificates": 0}
    e = identity(dg)
    for _ in range(instances):
        words = [
            [(int(rng.integers(0, dg.num_generators)), int(rng.choice([1, -1])))
             for _ in range(int(rng.integers(0, 5)))]
            for _ in range(3)
        ]
        pts = [nf(dg, w) for w in words]
        c, index = hull_materialize(pts + [e], budget=4000)
        ex = index[e]
        ids = [index[p] for p in pts]
        m = median_raag(*pts)
        checked["median"] += 1
        if index[m] != c.median(*ids):
            failures += 1
        for a, b in ((0, 1), (1, 2), (0, 2)):
            checked["dist"] += 1
            if dist(pts[a], pts[b]) != c.d(ids[a], ids[b]):
                failures += 1
        checked["gromov"] += 1
        two = dist(pts[0], e) + dist(pts[1], e) - dist(pts[0], pts[1])
        if two != 2 * c.gromov_product(ids[0], ids[1], ex):
            failures += 1
        g = pts[0]
        ps = pieces(g)
        if len(ps) >= 2:
            i, j = sorted(rng.choice(len(ps), size=2, replace=False))
            cc, idx2 = hull_materialize([e, g], budget=4000)
            wi = wall_in_hull(cc, idx2, ps[i].base, ps[i].gen)
            wj = wall_in_hull(cc, idx2, ps[j].base, ps[j].gen)
            rel = wall_relation(cc, wi, wj)
            checked["transversality"] += 1
            if transverse_pieces(g, ps[int(i)], ps[int(j)]) != (rel == WallRelation.TRANSVERSE):
                failures += 1
            if rel != WallRelation.TRANSVERSE:
                cert = ss_pieces(g, ps[int(i)], ps[int(j)], radius=radius)
                checked["certificates"] += 1
                if cert.is_no:
                    w = cert.witness
                    u = dg.index[w["label"]]
                    base = w["base"]
                    pts3 = [e, g, base, base * nf(dg, [(u, 1)])]
                    c3, idx3 = hull_materialize(pts3, budget=4000)
                    wt = wall_in_hull(c3, idx3, base, u)
                    w1 = wall_in_hull(c3, idx3, ps[int(i)].base, ps[int(i)].gen)
                    w2 = wall_in_hull(c3, idx3, ps[int(j)].base, ps[int(j)].gen)
                    for wall_id in (w1, w2):
                        if wall_id is not None and wt is not None:
                            if wall_relation(c3, wt, wall_id) != WallRelation.TRANSVERSE:
                                failures += 1
                elif cert.is_yes and cert.reason == "disjoint-links":
                    if dg.adj[ps[int(i)].gen] & dg.adj[ps[int(j)].gen]:
                        failures += 1
    return failures, checked


def run_raag_consistency(config):
    config = validate_config("raag-check", {k: v for k, v in config.items() if k != "kind"})
    out = output_dir(config)
    manifest = start_manifest(config_hash(config), config["seed"])
    dg = resolve_group(config["group"])
    rng = np.random.default_rng(config["seed"])
    failures, checked = _consistency_instances(dg, rng, config["instances"], config["radius"])
    cocycle = cocycle_check(dg, samples=2000, seed=config["seed"])
    doc = {
        "suite": "raag-consistency",
        "group": dg.to_json(),
        "instances": config["instances"],
        "checked": checked,
        "failures": failures,
        "cocycle_violations": cocycle,
    }
    path = emit_json(doc, os.path.join(out, "raag_consistency_report.json"))
    code = 0 if failures == 0 and cocycle == 0 else 1
    _finish(manifest, "pass" if code == 0 else "fail", [path], out)
    return code


def run_clt(config):
    """Drift, CLT statistic, KS normality, both variance estimators, and
    the S(n) slope, emitted as a CLTReport with CSV and figures."""
    config = validate_config("clt", {k: v for k, v in config.items() if k != "kind"})
    out = output_dir(config)
    manifest = start_manifest(config_hash(config), config["seed"])
    dg = resolve_group(config["group"])
    measure = measure_from_config(dg, config["measure"])
    run = simulate(dg, measure, seed=config["seed"], n=config["n"], trials=config["trials"])
    expect_positive = bool(config["expect_positive"]) and dg.is_join() is None
    lam = drift_estimate(run, expect_positive=expect_positive)
    samples = clt_stat(run, lam.value)
    sigma2_direct = sigma2_direct_estimate(samples)
    failures = []
    ks_statistic = float("nan")
    normality = False
    if run.trials >= 500:
        variance = config["variance_oracle"] or sigma2_direct.value
        ks_statistic, normality = ks_normal_test(samples, variance)
        if not normality:
            failures.append("ks")
    psi = psi_sigma_estimate(
        dg,
        measure,
        seed=config["seed"] + 1,
        T=config["psi_horizon"],
        trials=config["psi_trials"],
        lambda_hat=lam.value,
        pool_size=config["psi_pool"],
    )
    sg_trials = config["s_growth_trials"] or run.trials
    sub = run if sg_trials >= run.trials else _subrun(run, sg_trials)
    slope = s_growth(sub, radius=config["radius"], window=config["window"])
    if expect_positive and slope.ci_low <= 0:
        failures.append("s_growth")
    nondegenerate = sigma2_direct.ci_low > 0
    if expect_positive and not nondegenerate:
        failures.append("nondegenerate")
    report = CLTReport(
        lambda_hat=lam,
        sigma2_direct=sigma2_direct,
        sigma2_formula=psi.sigma2_formula,
        ks_statistic=ks_statistic,
        normality_pass=normality,
        s_slope=slope,
        nondegenerate=nondegenerate,
        seed=run.seed,
        n=run.n,
        trials=run.trials,
        extras={
            "group": dg.to_json(),
            "measure": measure.to_json(),
            "prng": run.meta["prng"],
            "psi_pool": psi.pool_size,
            "psi_horizon": psi.horizon,
            "s_growth_trials": sub.trials,
        },
    )
    doc = report.to_json()
    artifacts = [emit_json(doc, os.path.join(out, "clt_report.json"))]
    if sub is not run:
        padded = np.full(run.trials, -1, dtype=np.int64)
        padded[: sub.trials] = sub.s_lower
        run.s_lower = padded
    artifacts.append(emit_walk_csv(run, samples, os.path.join(out, "clt_samples.csv")))
    if config["figures"]:
        artifacts += render_clt_figures(
            doc, run.distances[: sub.trials], samples[: sub.trials], sub.s_lower,
            os.path.join(out, "figures"),
        )
    code = 0 if not failures else 1
    doc["failures"] = failures
    _finish(manifest, "pass" if code == 0 else "fail", artifacts, out)
    return code


def _subrun(run, trials):
    from .walk import WalkRun

    return WalkRun(
        dg=run.dg,
        measure=run.measure,
        seed=run.seed,
        n=run.n,
        trials=trials,
        distances=run.distances[:trials],
        endpoints=run.endpoints[:trials],
        checkpoints={k: v[:trials] for k, v in run.checkpoints.items()},
        meta=dict(run.meta),
    )


def run_s_growth(config):
    config = validate_config("s-growth", {k: v for k, v in config.items() if k != "kind"})
    out = output_dir(config)
    manifest = start_manifest(config_hash(config), config["seed"])
    groups = config["groups"] or ["F2", "C5", "Z2"]
    results = []
    failures = 0
    for name in groups:
        dg = resolve_group(name)
        run = simulate(dg, srw_measure(dg), seed=config["seed"], n=config["n"], trials=config["trials"])
        irreducible = dg.is_join() is None
        slope = s_growth(run, radius=config["radius"], window=config["window"])
        if irreducible and slope.ci_low <= 0:
            failures += 1
        results.append({
            "group": name if isinstance(name, str) else dg.to_json(),
            "irreducible": irreducible,
            "slope": slope.to_json(),
            "asserted_positive": irreducible,
        })
    doc = {"suite": "s-growth", "n": config["n"], "trials": config["trials"], "results": results}
    path = emit_json(doc, os.path.join(out, "s_growth_report.json"))
    code = 0 if failures == 0 else 1
    _finish(manifest, "pass" if code == 0 else "fail", [path], out)
    return code


DEFAULT_FULL_CLT = {
    "group": "F2",
    "seed": 2024,
    "n": 2000,
    "trials": 600,
    "variance_oracle": 0.75,
    "psi_horizon": 200,
    "psi_trials": 300,
    "psi_pool": 96,
}


def run_suite(name, config):
    """Dispatch a named suite; exit code contract is documented on each."""
    if name == "lemmas":
        return run_lemmas(config)
    if name == "raag-consistency":
        return run_raag_consistency(config)
    if name == "clt":
        return run_clt(config)
    if name == "s-growth":
        return run_s_growth(config)
    if name == "full":
        codes = [
            run_lemmas({"seed": 0, "out": config.get("out"),
                        "box_quadruples": 20_000, "projection_trials": 100}),
            run_raag_consistency({"group": "C5", "instances": 60, "out": config.get("out")}),
            run_clt({**DEFAULT_FULL_CLT, "out": config.get("out")}),
            run_s_growth({"seed": 3, "n": 1000, "trials": 24, "out": config.get("out")}),
        ]
        return 0 if all(c == 0 for c in codes) else 1
    raise MedianwalkError(f"unknown suite {name!r}")
