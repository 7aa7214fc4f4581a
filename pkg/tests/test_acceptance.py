"""Acceptance criteria 1-10 at their stated tolerances and runtime budgets.

Each test records one PASS/FAIL line, repeated in the terminal summary.
"""

from __future__ import annotations

import math
import time
import warnings
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from rrgcouple.coupling.dout import dout_gnp_embed
from rrgcouple.coupling.flow import build_optimal_coupling, deficiency_bruteforce, inequality, strassen_deficiency
from rrgcouple.coupling.rejection import rejection_embed, rejection_table
from rrgcouple.coupling.thresholds import ThresholdFunctions, f1, lambertw_lower
from rrgcouple.distributions import FiniteDistribution
from rrgcouple.enumeration.counting import (
    count_perfect_matchings,
    double_factorial,
    enumerate_simple_graphs,
    exact_bipartite_count,
)
from rrgcouple.enumeration.laws import enumerate_pairings, exact_model_distribution
from rrgcouple.enumeration.mckay import BipartiteDegreePair, mckay_bipartite_estimate
from rrgcouple.graphs import complete_graph, contains
from rrgcouple.models import ModelSpec, sample_grd
from rrgcouple.rng import rng_stream
from rrgcouple.stats import concentration_report, empirical_summary, tv_distance

# single constant for the bipartite estimate, frozen from the sweep below (worst observed 0.0704)
C_BIPARTITE = 0.08


def test_c01_exact_count_identities(acceptance):
    t0 = time.perf_counter()
    km = {n: count_perfect_matchings(complete_graph(n)) for n in range(2, 15, 2)}
    ok_k = all(km[n] == double_factorial(n - 1) for n in km)
    npair = sum(1 for _ in enumerate_pairings(4, 2))
    bip = exact_bipartite_count((1, 1), (1, 1))
    ok = ok_k and npair == 105 and bip == 2
    acceptance("C1", ok, f"K_n matchings = (n-1)!! for n<=14: {ok_k}; |P(4,2)| = {npair}; bip((1,1),(1,1)) = {bip}",
               time.perf_counter() - t0, 60)


def test_c02_grd_uniformity(acceptance):
    t0 = time.perf_counter()
    support = set(enumerate_simple_graphs([3] * 6))
    trials = 7 * 10**4
    gen = rng_stream(1002, 0).generator
    counts = Counter(sample_grd(6, 3, gen) for _ in range(trials))
    same_support = set(counts) == support
    pv = stats.chisquare([counts.get(g, 0) for g in support]).pvalue
    ok = len(support) == 70 and same_support and pv > 1e-3
    acceptance("C2", ok, f"support {len(counts)}/{len(support)} equal={same_support}; chi-square p = {pv:.4g}",
               time.perf_counter() - t0, 300)


def test_c03_moment_gates(acceptance):
    t0 = time.perf_counter()
    s = empirical_summary(ModelSpec("loopless-pairing", 5000, 4), ["doubles", "triangles"], 2000, rng=1003)
    mx, mw = s.stat("doubles")["mean"], s.stat("triangles")["mean"]
    rx, rw = abs(mx / 2.25 - 1), abs(mw / 4.5 - 1)
    ok = rx <= 0.05 and rw <= 0.07
    acceptance("C3", ok, f"mean X = {mx:.4f} ({rx:.2%} off 2.25); mean W = {mw:.4f} ({rw:.2%} off 4.5)",
               time.perf_counter() - t0, 600)


def test_c04_mckay_evaluators(acceptance):
    t0 = time.perf_counter()
    worst, n_inst, deg1_ok = 0.0, 0, True
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for a in (1, 2, 3):
            for b in (1, 2, 3):
                for M in range(1, 41):
                    if M % a or M % b:
                        continue
                    s, t = (a,) * (M // a), (b,) * (M // b)
                    exact = exact_bipartite_count(s, t)
                    if exact == 0:
                        continue
                    est = mckay_bipartite_estimate(BipartiteDegreePair(s, t))
                    n_inst += 1
                    worst = max(worst, abs(math.log(exact) - est.log_value) / est.remainder_arg)
                    if a == b == 1:
                        deg1_ok &= exact == math.factorial(M) and est.log_value == pytest.approx(math.lgamma(M + 1))
    ok = worst <= C_BIPARTITE <= 3 and deg1_ok
    acceptance("C4", ok, f"{n_inst} instances, worst |log ratio|/(D^4/M) = {worst:.4f} <= C = {C_BIPARTITE}; "
               f"degree-1 exact: {deg1_ok}", time.perf_counter() - t0, 600)


def _random_law(gen, size: int, prefix: str) -> FiniteDistribution:
    w = gen.integers(1, 20, size=size)
    return FiniteDistribution.from_weights({f"{prefix}{i}": Fraction(int(x), int(w.sum())) for i, x in enumerate(w)})


def test_c05_strassen_engine(acceptance):
    t0 = time.perf_counter()
    gen = rng_stream(1005, 0).generator
    bad_cases = []
    for k in range(200):
        X = _random_law(gen, int(gen.integers(1, 9)), "x")
        Y = _random_law(gen, int(gen.integers(1, 9)), "y")
        B = gen.random((len(X), len(Y))) < gen.uniform(0.1, 0.9)
        ix = {o: i for i, o in enumerate(X.outcomes)}
        iy = {o: j for j, o in enumerate(Y.outcomes)}

        def bad(x, y):
            return bool(B[ix[x], iy[y]])

        flow = strassen_deficiency(X, Y, bad).value
        brute = deficiency_bruteforce(X, Y, bad)
        brute = brute.value if hasattr(brute, "value") else brute
        J = build_optimal_coupling(X, Y, bad)
        if abs(float(flow) - float(brute)) > 1e-9 or not J.check_marginals(X, Y) \
                or abs(float(J.failure_mass) - float(flow)) > 1e-9:
            bad_cases.append(k)
    ok = not bad_cases
    acceptance("C5", ok, f"200 instances, mismatches: {bad_cases[:5]}", time.perf_counter() - t0, 120)


def test_c06_rejection_embedding(acceptance):
    t0 = time.perf_counter()
    n, d, tau, fn, trials = 4, 3, 30, 5.0, 10**4
    table = rejection_table(n, d, "loopless-pairing", fn)
    empty, contained = 0, 0
    outs = Counter()
    for i in range(trials):
        rep = rejection_embed(n, d, tau, fn, rng_stream(1006, i))
        if rep.empty:
            empty += 1
            continue
        outs[rep.inner] += 1
        contained += contains(rep.inner, rep.outer, "sub-multigraph")
    nonempty = trials - empty
    se = math.sqrt((1 / fn) * (1 - 1 / fn) / trials)
    # accepted outputs follow the exact law of P*(4,3) restricted to Omega_f (here all of its support)
    law = exact_model_distribution("loopless-pairing", n, d).condition(lambda g: g in table.weights)
    observed = [outs.get(g, 0) for g in law.outcomes]
    pv = stats.chisquare(observed, [float(p) * nonempty for p in law.probs]).pvalue
    ok = empty / trials <= 1 / fn + 3 * se and pv > 1e-3 and contained == nonempty and set(outs) <= set(law.outcomes)
    acceptance("C6", ok, f"empty rate {empty / trials:.4f} <= {1 / fn + 3 * se:.4f}; law chi-square p = {pv:.4g} "
               f"over {len(law)} outcomes; containment {contained}/{nonempty}", time.perf_counter() - t0, 600)


def test_c07_dout_embedding(acceptance):
    t0 = time.perf_counter()
    n, p, d, trials = 200, 0.2, 3, 10**4
    edge, deg_ok = 0, True
    for i in range(trials):
        rep = dout_gnp_embed(n, p, d, rng_stream(1007, i))
        deg_ok &= bool(np.all(rep.inner.out_degrees() == d))
        edge += rep.outer.multiplicity(1, 2) > 0
    freq = edge / trials
    se = math.sqrt(p * (1 - p) / trials)
    big_n, x, big_d, big_trials = 10**5, 4.0, 2, 50
    pb = x * math.log(big_n) / big_n
    hits = 0
    for i in range(big_trials):
        rep = dout_gnp_embed(big_n, pb, big_d, rng_stream(1017, i))
        deg_ok &= bool(np.all(rep.inner.out_degrees() == big_d))
        hits += rep.contained and not rep.decoupled
    ok = abs(freq - p) <= 3 * se and deg_ok and hits >= 0.95 * big_trials
    acceptance("C7", ok, f"edge freq {freq:.4f} vs p = {p} (3 se = {3 * se:.4f}); out-degrees exact: {deg_ok}; "
               f"n=1e5 containment {hits}/{big_trials}", time.perf_counter() - t0, 1800)


def test_c08_micro_coupling_study(acceptance):
    t0 = time.perf_counter()
    A = exact_model_distribution("pairing-plus-matchings(2,1)", 4)
    B = exact_model_distribution("loopless-pairing", 4, 3)
    fail = strassen_deficiency(A, B, inequality).value
    tv = tv_distance(A, B).value
    ok = abs(float(fail) - float(tv)) <= 1e-9
    acceptance("C8", ok, f"min equality failure {fail} = {float(fail):.10f}; TV = {float(tv):.10f}",
               time.perf_counter() - t0, 300)


def test_c09_matching_count_oracle(acceptance):
    t0 = time.perf_counter()
    rep = concentration_report(ModelSpec("loopless-pairing", 6, 3), 10**4, rng=1009)
    ok = rep.exact_EY is not None and abs(rep.mean_Y - rep.exact_EY) <= 3 * rep.se_Y
    acceptance("C9", ok, f"mean Y = {rep.mean_Y:.4f}, oracle E Y = {rep.exact_EY:.4f}, se = {rep.se_Y:.4f}, "
               f"z = {rep.z_Y:.2f}", time.perf_counter() - t0, 600)


def test_c10_threshold_functions(acceptance):
    t0 = time.perf_counter()
    tf = ThresholdFunctions()
    xs = np.linspace(1, 50, 1000)
    fv = np.array([tf.f(x) for x in xs])
    f2v = np.array([tf.f2(x) for x in xs])
    zs = -np.exp(-1) * np.linspace(1e-9, 1, 1000)
    resid = max(abs(w * math.exp(w) - z) for z in zs for w in [lambertw_lower(z)])
    ok = (f1(1) == 0 and abs(f1(2) - 0.18664) <= 1e-4 and bool(np.all(np.diff(fv) > 0))
          and bool(np.all(fv[1:] < f2v[1:])) and resid <= 1e-12)
    acceptance("C10", ok, f"f1(1) = {f1(1)}, f1(2) = {f1(2):.6f}; f increasing and below f2 on 1000 points; "
               f"max Lambert residual {resid:.2e}", time.perf_counter() - t0, 1)
