"""Estimators for the limit-theorem pipeline: strongly separated chain
growth, the psi correction, the variance formula, and the box-lemma
monitor.  Boundary measures never appear as objects; deep orbit points
stand in for boundary points throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import IntegrityFailure, TooFewTrials
from .raag import NormalForm, Piler, dist, identity
from .raagwalls import max_certified_ss_chain
from .walk import (
    CI_Z,
    Estimate,
    StepMeasure,
    WalkRun,
    gromov_orbit,
    mean_estimate,
    trial_rng,
)


# --- strongly separated chain growth -------------------------------------------


def s_growth(run: WalkRun, radius=8, window=24, expect_positive=False):
    """Certified lower-bound slope for S(n): mean over trials of
    max_certified_ss_chain(Z_n)/n, with CI.  Fills run.s_lower."""
    values = np.array(
        [max_certified_ss_chain(z, radius=radius, window=window) for z in run.endpoints],
        dtype=np.int32,
    )
    run.s_lower = values
    est = mean_estimate(values / run.n)
    if expect_positive and est.ci_low <= 0:
        raise IntegrityFailure("S(n) slope CI touches zero for an irreducible config")
    return est


# --- psi and the variance formula -----------------------------------------------


def _walk_endpoint(dg, words, cum, rng, steps):
    piler = Piler(dg)
    draws = np.searchsorted(cum, rng.random(steps), side="right")
    for k in range(steps):
        for g, s in words[draws[k]]:
            piler.push(g, s)
    return NormalForm(dg, piler.depile(), _canonical=True)


class PsiTable:
    """psi estimated against a fixed pool of backward-walk proxies, cached
    at the finitely many points where it is queried."""

    def __init__(self, pool):
        self.pool = pool
        self.cache = {}

    def __call__(self, x: NormalForm):
        got = self.cache.get(x)
        if got is None:
            total = 0
            for y in self.pool:
                total += gromov_orbit(x, y)
            got = -2.0 * total / len(self.pool)
            self.cache[x] = got
        return got


@dataclass
class PsiSigmaResult:
    sigma2_formula: Estimate
    psi_values: dict
    pool_size: int
    horizon: int
    terms: np.ndarray


def psi_sigma_estimate(
    dg,
    measure: StepMeasure,
    seed,
    T,
    trials,
    lambda_hat,
    pool_size=192,
    bootstrap=200,
):
    """Monte Carlo of the variance formula.

    psi_hat(x) = -2 * mean over backward endpoints Y of (x | Y)_o; boundary
    points are proxied by independent forward endpoints Z_T; the returned
    estimate is the mean of (h_xi(g^-1 o) - psi(xi) + psi(g xi) - lambda)^2
    with a 200-resample bootstrap CI.
    """
    if T < 100:
        raise TooFewTrials("T must be at least 100 for boundary proxies")
    if trials < 2:
        raise TooFewTrials("need at least two trials")
    lam = float(lambda_hat)
    words = [w.letters for w in measure.words]
    inv_words = [tuple((g, -s) for g, s in reversed(w)) for w in words]
    cum = np.cumsum(measure.probs)
    cum[-1] = 1.0
    rng_pool = trial_rng(seed, 0x706F6F6C)
    pool = [_walk_endpoint(dg, inv_words, cum, rng_pool, T) for _ in range(pool_size)]
    psi = PsiTable(pool)
    terms = np.empty(trials, dtype=float)
    rng_steps = trial_rng(seed, 0x73746570)
    for i in range(trials):
        rng = trial_rng(seed, i + 1)
        xi = _walk_endpoint(dg, words, cum, rng, T)
        g = measure.words[int(np.searchsorted(cum, rng_steps.random(), side="right"))]
        h = dist(xi, g.inv()) - len(xi)          # h_xi(g^-1 o), exact
        term = h - psi(xi) + psi(g * xi) - lam
        terms[i] = term * term
    boot_rng = trial_rng(seed, 0x626F6F74)
    means = np.empty(bootstrap, dtype=float)
    for b in range(bootstrap):
        idx = boot_rng.integers(0, trials, size=trials)
        means[b] = terms[idx].mean()
    lo, hi = (float(v) for v in np.percentile(means, [0.5, 99.5]))
    est = Estimate(float(terms.mean()), lo, hi, float(means.std(ddof=1)))
    return PsiSigmaResult(
        sigma2_formula=est,
        psi_values={x: v for x, v in psi.cache.items()},
        pool_size=pool_size,
        horizon=T,
        terms=terms,
    )


# --- box lemma monitor ------------------------------------------------------------


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


def boite_threshold(A, eps, n_limit):
    """Smallest n with floor(A n) > 3 eps n + 2, or None below n_limit."""
    A, eps = _as_fraction(A), _as_fraction(eps)
    for n in range(1, n_limit + 1):
        if math.floor(A * n) > 3 * eps * n + 2:
            return n
    return None


def boite_monitor(run: WalkRun, lambda_hat, eps, A, probe_x, probe_y, radius=8, window=24):
    """At each checkpoint where the four hypotheses hold (with S replaced
    by its certified lower bound), check the conclusions:

    (1) (Z_n o | y)_o <= eps n and (2) (o | x)_{Z_n^-1 o} >= (lambda-eps) n
    are arithmetic consequences and are asserted; (3) (Z_n x | y)_o <= eps n
    only counts as a failure from the reported threshold n0 on, and only
    when A > 3 eps.
    """
    lam = _as_fraction(lambda_hat)
    eps = _as_fraction(eps)
    A = _as_fraction(A)
    n0 = boite_threshold(A, eps, run.n) if A > 3 * eps else None
    report = {
        "n0": n0,
        "checkpoints": [],
        "violations_conclusion3": 0,
        "skipped": 0,
    }
    e = identity(run.dg)
    for k in sorted(run.checkpoints):
        for z in run.checkpoints[k]:
            s_lower = max_certified_ss_chain(z, radius=radius, window=window)
            d_n = len(z)
            h_x = dist(probe_x, z.inv()) - len(probe_x)   # h_x(Z_n^-1 o)
            h_y = dist(probe_y, z) - len(probe_y)         # h_y(Z_n o)
            hyp = (
                s_lower >= A * k
                and abs(h_x - k * lam) <= eps * k
                and abs(d_n - k * lam) <= eps * k
                and abs(h_y - k * lam) <= eps * k
            )
            entry = {"n": k, "hypotheses": bool(hyp)}
            if not hyp:
                report["skipped"] += 1
                report["checkpoints"].append(entry)
                continue
            two_c1 = 2 * gromov_orbit(z, probe_y)
            if two_c1 > 2 * eps * k:
                raise IntegrityFailure("box conclusion (1) failed under its hypotheses")
            # (o | x)_{Z_n^-1 o} = (d(Z_n o, o) + h_x(Z_n^-1 o)) / 2
            two_c2 = d_n + h_x
            if two_c2 < 2 * (lam - eps) * k:
                raise IntegrityFailure("box conclusion (2) failed under its hypotheses")
            two_c3 = 2 * gromov_orbit(z * probe_x, probe_y)
            c3_ok = two_c3 <= 2 * eps * k
            entry.update({"c1_2x": int(two_c1), "c2_2x": int(two_c2), "c3_2x": int(two_c3), "c3_ok": c3_ok})
            if not c3_ok and n0 is not None and k >= n0:
                report["violations_conclusion3"] += 1
            report["checkpoints"].append(entry)
    return report


# --- full report -------------------------------------------------------------------


@dataclass
class CLTReport:
    lambda_hat: Estimate
    sigma2_direct: Estimate
    sigma2_formula: Estimate | None
    ks_statistic: float
    normality_pass: bool
    s_slope: Estimate | None
    nondegenerate: bool
    seed: int
    n: int
    trials: int
    extras: dict = field(default_factory=dict)

    def to_json(self):
        doc = {
            "lambda_hat": self.lambda_hat.to_json(),
            "sigma2_direct": self.sigma2_direct.to_json(),
            "sigma2_formula": None if self.sigma2_formula is None else self.sigma2_formula.to_json(),
            "ks_statistic": self.ks_statistic,
            "normality_pass": self.normality_pass,
            "s_slope": None if self.s_slope is None else self.s_slope.to_json(),
            "nondegenerate": self.nondegenerate,
            "seed": self.seed,
            "n": self.n,
            "trials": self.trials,
        }
        doc.update(self.extras)
        return doc
