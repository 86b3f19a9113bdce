"""S(n) growth, the psi/variance formula, and the box-lemma monitor."""

import numpy as np
import pytest

from medianwalk.errors import TooFewTrials
from medianwalk.estimators import (
    boite_monitor,
    boite_threshold,
    psi_sigma_estimate,
    s_growth,
)
from medianwalk.raag import DefiningGraph, nf
from medianwalk.walk import drift_estimate, simulate, srw_measure, validate_measure


def f2():
    return DefiningGraph(["a", "b"])


def z2():
    return DefiningGraph(["a", "b"], [("a", "b")])


def c5():
    names = [f"v{i}" for i in range(5)]
    return DefiningGraph(names, [(names[i], names[(i + 1) % 5]) for i in range(5)])


def test_s_growth_f2_equals_drift():
    dg = f2()
    run = simulate(dg, srw_measure(dg), seed=3, n=600, trials=30)
    drift = drift_estimate(run)
    slope = s_growth(run, expect_positive=True)
    # in a tree every wall pair is strongly separated: S_lower(n) = d(Z_n o, o)
    assert np.array_equal(run.s_lower, run.final_distances)
    assert slope.value == pytest.approx(drift.value)


def test_s_growth_z2_slope_vanishes():
    dg = z2()
    run = simulate(dg, srw_measure(dg), seed=4, n=600, trials=20)
    slope = s_growth(run)
    assert (run.s_lower <= 1).all()
    assert slope.value < 0.01


def test_s_growth_c5_positive():
    dg = c5()
    run = simulate(dg, srw_measure(dg), seed=5, n=500, trials=20)
    slope = s_growth(run, expect_positive=True)
    assert slope.ci_low > 0.05


def test_psi_sigma_degenerate_point_mass():
    dg = f2()
    m = validate_measure(dg, [("a", 1.0)], override=True)
    res = psi_sigma_estimate(dg, m, seed=6, T=120, trials=50, lambda_hat=1.0, pool_size=32)
    # deterministic walk: h is identically the drift and psi differences vanish
    assert res.sigma2_formula.value == pytest.approx(0.0, abs=1e-9)


def test_psi_sigma_f2_near_oracle():
    dg = f2()
    m = srw_measure(dg)
    res = psi_sigma_estimate(dg, m, seed=7, T=200, trials=400, lambda_hat=0.5, pool_size=128)
    assert abs(res.sigma2_formula.value - 0.75) < 0.2 * 0.75
    assert res.sigma2_formula.ci_low < res.sigma2_formula.value < res.sigma2_formula.ci_high


def test_psi_sigma_requires_scale():
    dg = f2()
    with pytest.raises(TooFewTrials):
        psi_sigma_estimate(dg, srw_measure(dg), seed=8, T=50, trials=50, lambda_hat=0.5)


def test_psi_values_are_tabulated_only_where_needed():
    dg = f2()
    res = psi_sigma_estimate(dg, srw_measure(dg), seed=9, T=120, trials=40, lambda_hat=0.5, pool_size=32)
    assert 0 < len(res.psi_values) <= 2 * 40


def test_boite_threshold():
    n0 = boite_threshold(0.4, 0.1, 10_000)
    assert n0 == 23
    import math
    assert math.floor(0.4 * n0) > 0.3 * n0 + 2
    assert all(not (math.floor(0.4 * k) > 0.3 * k + 2) for k in range(1, n0))
    assert boite_threshold(1.0, 0.0, 10_000) == 3
    assert boite_threshold(0.001, 0.0, 100) is None


def test_boite_monitor_f2():
    dg = f2()
    run = simulate(dg, srw_measure(dg), seed=10, n=800, trials=12)
    lam = drift_estimate(run).value
    probe = nf(dg, "a b") ** 800
    report = boite_monitor(run, lam, eps=0.1, A=0.4, probe_x=probe, probe_y=probe.inv())
    assert report["n0"] == 23
    evaluated = [e for e in report["checkpoints"] if e["hypotheses"]]
    assert evaluated, "hypotheses never held; probe or scales are off"
    assert report["violations_conclusion3"] == 0


def test_boite_monitor_skips_when_hypotheses_fail():
    dg = z2()
    run = simulate(dg, srw_measure(dg), seed=11, n=400, trials=6)
    probe = nf(dg, "a") ** 1600
    # drift of the Z^2 control is near 0, so |d - 0.5 n| <= 0.01 n never holds
    report = boite_monitor(run, 0.5, eps=0.01, A=0.9, probe_x=probe, probe_y=probe.inv())
    assert report["skipped"] == sum(len(v) for v in run.checkpoints.values())
    assert report["violations_conclusion3"] == 0
