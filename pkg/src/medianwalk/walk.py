"""Seeded random walks on RAAG orbits.

A walk run draws i.i.d. increments from a validated step measure, one
independent substream per trial, and tracks the exact orbit distance
d(Z_k o, o) after every step through an incremental piling state.  All
randomness flows through numpy PCG64 generators seeded with
master_seed XOR splitmix64(trial_index), which is what makes runs
bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    IntegrityFailure,
    NotGenerating,
    ProbSumInvalid,
    TooFewTrials,
)
from .raag import DefiningGraph, NormalForm, Piler, dist, identity, nf

PRNG_NAME = "numpy-PCG64"
PROB_SUM_TOL = 1e-12
KS_CRITICAL_001 = 1.628  # asymptotic alpha=0.01 one-sample KS constant
CI_Z = 2.576             # two-sided 99% normal quantile


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def trial_rng(seed, trial):
    return np.random.Generator(np.random.PCG64(seed ^ splitmix64(trial)))


@dataclass(frozen=True)
class StepMeasure:
    dg: DefiningGraph
    words: tuple          # NormalForm per support point
    probs: tuple          # floats, summing to 1

    @property
    def max_step(self):
        return max((len(w) for w in self.words), default=0)

    def to_json(self):
        return {
            "support": [[self.dg.format_word(w.letters), p] for w, p in zip(self.words, self.probs)]
        }


def uniform_measure(dg, words):
    pairs = [(w, 1.0 / len(words)) for w in words]
    return validate_measure(dg, pairs)


def srw_measure(dg):
    """Uniform measure on all generators and inverses."""
    words = []
    for g in range(dg.num_generators):
        words.append([(g, 1)])
        words.append([(g, -1)])
    return uniform_measure(dg, words)


def validate_measure(dg, support, radius=6, override=False):
    """Normalization and semigroup-generation check.

    ``support`` is a list of (word, probability); words may be strings in
    the case-encoded syntax or letter lists.  ``override`` skips the
    generation check for deliberately degenerate control measures.
    """
    if not support:
        raise ProbSumInvalid("empty support")
    words, probs = [], []
    for word, p in support:
        if p <= 0:
            raise ProbSumInvalid(f"probability {p} not positive")
        words.append(nf(dg, word) if not isinstance(word, NormalForm) else word)
        probs.append(float(p))
    total = math.fsum(probs)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ProbSumInvalid(f"probabilities sum to {total!r}")
    measure = StepMeasure(dg=dg, words=tuple(words), probs=tuple(probs))
    if not override:
        reached = {identity(dg)}
        frontier = [identity(dg)]
        for _ in range(radius):
            nxt = []
            for el in frontier:
                for w in measure.words:
                    prod = el * w
                    if prod not in reached:
                        reached.add(prod)
                        nxt.append(prod)
            frontier = nxt
        for g in range(dg.num_generators):
            for s in (1, -1):
                target = nf(dg, [(g, s)])
                if target not in reached:
                    name = dg.names[g] if s > 0 else dg.names[g].upper()
                    raise NotGenerating(
                        f"support does not reach {name} within radius {radius}",
                        generator=name,
                    )
    return measure


@dataclass
class WalkRun:
    """One simulated batch: everything downstream estimators need."""

    dg: DefiningGraph
    measure: StepMeasure
    seed: int
    n: int
    trials: int
    distances: np.ndarray          # (trials, n+1) int32, d(Z_k o, o)
    endpoints: list                # NormalForm per trial
    checkpoints: dict              # step -> list of NormalForm per trial
    s_lower: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def final_distances(self):
        return self.distances[:, self.n]


def checkpoint_steps(n):
    return sorted({max(1, n // 4), max(1, n // 2), n})


def simulate(dg, measure: StepMeasure, seed, n, trials, keep_checkpoints=True):
    """Run ``trials`` independent walks of length ``n``; exact distances
    at every step via incremental piling."""
    cum = np.cumsum(measure.probs)
    cum[-1] = 1.0
    word_letters = [w.letters for w in measure.words]
    steps_at = checkpoint_steps(n) if keep_checkpoints else [n]
    distances = np.zeros((trials, n + 1), dtype=np.int32)
    endpoints = []
    checkpoints = {k: [] for k in steps_at}
    for t in range(trials):
        rng = trial_rng(seed, t)
        draws = np.searchsorted(cum, rng.random(n), side="right")
        piler = Piler(dg)
        row = distances[t]
        push = piler.push
        for k in range(n):
            for g, s in word_letters[draws[k]]:
                push(g, s)
            row[k + 1] = piler.count
            if k + 1 in checkpoints:
                checkpoints[k + 1].append(NormalForm(dg, piler.letters(), _canonical=True))
        endpoints.append(NormalForm(dg, piler.letters(), _canonical=True))
    max_step = measure.max_step
    jumps = np.abs(np.diff(distances.astype(np.int64), axis=1))
    if jumps.size and int(jumps.max()) > max_step:
        raise IntegrityFailure("distance increment exceeded the longest support word")
    if n in checkpoints:
        checkpoints[n] = endpoints
    return WalkRun(
        dg=dg,
        measure=measure,
        seed=int(seed),
        n=int(n),
        trials=int(trials),
        distances=distances,
        endpoints=endpoints,
        checkpoints=checkpoints,
        meta={"prng": PRNG_NAME, "substream": "seed XOR splitmix64(trial)"},
    )


# --- estimates ----------------------------------------------------------------


@dataclass
class Estimate:
    value: float
    ci_low: float
    ci_high: float
    stderr: float

    def excludes_zero(self):
        return self.ci_low > 0 or self.ci_high < 0

    def to_json(self):
        return {
            "value": self.value,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "stderr": self.stderr,
        }


def mean_estimate(values):
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        raise TooFewTrials("need at least two trials")
    m = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(len(values)))
    return Estimate(m, m - CI_Z * se, m + CI_Z * se, se)


def drift_estimate(run: WalkRun, expect_positive=False):
    """Mean of d(Z_n o, o)/n with a normal-approximation CI."""
    est = mean_estimate(run.final_distances / run.n)
    if expect_positive and est.ci_low <= 0:
        raise IntegrityFailure("drift CI touches zero for a config expected nonelementary")
    return est


def exact_drift_fraction(run: WalkRun) -> Fraction:
    """lambda_hat as an exact rational, for exact cocycle arithmetic."""
    return Fraction(int(run.final_distances.sum()), run.trials * run.n)


def clt_stat(run: WalkRun, lam):
    """Per-trial samples (d(Z_n o,o) - n*lambda) / sqrt(n)."""
    lam = float(lam)
    return (run.final_distances.astype(float) - run.n * lam) / math.sqrt(run.n)


def normal_cdf(x, variance):
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0 * variance)))


def ks_normal_test(samples, variance, min_trials=500):
    """One-sample KS against the centered Gaussian of the given variance;
    pass at alpha = 0.01 via the asymptotic critical value."""
    samples = np.sort(np.asarray(samples, dtype=float))
    t = len(samples)
    if t < min_trials:
        raise TooFewTrials(f"KS test needs >= {min_trials} samples, got {t}")
    if variance <= 0:
        raise ValueError("variance must be positive")
    cdf = np.array([normal_cdf(x, variance) for x in samples])
    upper = np.abs(np.arange(1, t + 1) / t - cdf)
    lower = np.abs(np.arange(0, t) / t - cdf)
    stat = float(max(upper.max(), lower.max()))
    return stat, stat < KS_CRITICAL_001 / math.sqrt(t)


def sigma2_direct_estimate(samples):
    """Sample variance of the CLT statistic with a normal-approximation CI."""
    samples = np.asarray(samples, dtype=float)
    t = len(samples)
    if t < 2:
        raise TooFewTrials("need at least two samples")
    s2 = float(samples.var(ddof=1))
    half = CI_Z * s2 * math.sqrt(2.0 / (t - 1))
    return Estimate(s2, s2 - half, s2 + half, s2 * math.sqrt(2.0 / (t - 1)))


# --- deviation profiles and exact identities -----------------------------------


def gromov_orbit(x: NormalForm, y: NormalForm):
    """(x|y)_o at the origin, exact integer."""
    two = len(x) + len(y) - dist(x, y)
    if two < 0 or two % 2:
        raise IntegrityFailure("invalid doubled Gromov product on orbit points")
    return two // 2


def deviation_profile(run: WalkRun, lam, epsilons, a_values, probe: NormalForm):
    """Empirical deviation and Gromov-tail frequencies at the checkpoints.

    Nothing is asserted; the table is for summability eyeballing, with a
    monotone-trend flag per epsilon.
    """
    lam = float(lam)
    steps = sorted(run.checkpoints)
    table = {"steps": steps, "deviation": {}, "gromov_tail": {}, "monotone": {}}
    for eps in epsilons:
        freqs = []
        for k in steps:
            dev = np.abs(run.distances[:, k].astype(float) - k * lam) >= eps * k
            freqs.append(float(dev.mean()))
        table["deviation"][str(eps)] = freqs
        table["monotone"][str(eps)] = all(a >= b for a, b in zip(freqs, freqs[1:]))
    products = {
        k: [gromov_orbit(z, probe) for z in run.checkpoints[k]] for k in steps
    }
    for a in a_values:
        table["gromov_tail"][str(a)] = [
            float(np.mean([p >= a * k for p in products[k]])) for k in steps
        ]
    return table


def cocycle_check(dg, samples, seed=0, max_len=8):
    """sigma(g, x) = d(x o, g^-1 o) - d(x o, o) must satisfy the cocycle
    identity exactly; returns the violation count (always 0)."""
    rng = np.random.default_rng(seed)
    violations = 0
    e = identity(dg)

    def rand_el():
        length = int(rng.integers(0, max_len + 1))
        letters = [
            (int(rng.integers(0, dg.num_generators)), int(rng.choice([1, -1])))
            for _ in range(length)
        ]
        return NormalForm(dg, tuple(letters))

    def sigma(g, x):
        return dist(x, g.inv()) - dist(x, e)

    for _ in range(samples):
        g, gp, x = rand_el(), rand_el(), rand_el()
        if sigma(g * gp, x) != sigma(g, gp * x) + sigma(gp, x):
            violations += 1
    return violations
