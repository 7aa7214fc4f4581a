from __future__ import annotations

import math
import random
import warnings
from fractions import Fraction
from itertools import permutations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rrgcouple.enumeration.counting import (
    InstanceTooLarge,
    all_perfect_matchings,
    count_bipartite_constrained,
    count_perfect_matchings,
    count_perfect_matchings_bitmask,
    double_factorial,
    enumerate_perfect_matchings,
    enumerate_simple_graphs,
    exact_avoiding_count,
    exact_bipartite_count,
    exact_bipartite_count_dp,
    expected_loopless_matching_count,
    matching_pair_count,
    matching_pair_count_closed,
    num_loopless_pairings,
    num_pairings,
    pairings_of_multigraph,
)
from rrgcouple.enumeration.laws import (
    SpaceTooLarge,
    enumerate_pairings,
    exact_model_distribution,
    regular_multigraphs,
)
from rrgcouple.enumeration.mckay import (
    AvoidanceInstance,
    BipartiteDegreePair,
    conditional_edge_probability,
    mckay_avoiding_estimate,
    mckay_bipartite_estimate,
)
from rrgcouple.graphs import Multigraph, complete_graph, cycle_graph, petersen_graph

# Largest |log(estimate / exact)| / (Delta^4 / M) over all semiregular bipartite
# instances with M <= 40 and Delta <= 3 (observed 0.0704, see the acceptance suite).
C_BIPARTITE = 0.08


# -- bipartite counts ----------------------------------------------------------


def test_bipartite_small_cases():
    assert exact_bipartite_count((1, 1), (1, 1)) == 2
    assert exact_bipartite_count((2, 2), (2, 2)) == 1
    assert exact_bipartite_count((3, 1), (2, 2)) == 0  # a degree-3 vertex with only 2 partners


def test_bipartite_dual_oracles_agree():
    s, t = (3, 3, 3, 3), (2, 2, 2, 2, 2, 2)
    assert exact_bipartite_count(s, t) == exact_bipartite_count_dp(s, t) == 1860


def test_bipartite_matches_networkx_free_bruteforce():
    # third oracle: scan every 0/1 matrix of a 3x3 instance
    s, t = (2, 1, 1), (1, 2, 1)
    count = 0
    for bits in range(1 << 9):
        A = np.array([(bits >> k) & 1 for k in range(9)]).reshape(3, 3)
        count += A.sum(1).tolist() == list(s) and A.sum(0).tolist() == list(t)
    assert exact_bipartite_count(s, t) == count


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=5), st.randoms())
def test_bipartite_permutation_invariance_and_dual_agreement(s, rnd):
    total = sum(s)
    # spread the same total over a random-length t with entries <= len(s)
    k = rnd.randint(1, 5)
    t = [0] * k
    for _ in range(total):
        choices = [i for i in range(k) if t[i] < len(s)]
        if not choices:
            return
        t[rnd.choice(choices)] += 1
    a = exact_bipartite_count(s, t)
    s2, t2 = list(s), list(t)
    rnd.shuffle(s2)
    rnd.shuffle(t2)
    assert exact_bipartite_count(s2, t2) == a == exact_bipartite_count_dp(s, t)


def test_bipartite_size_cap():
    with pytest.raises(InstanceTooLarge):
        exact_bipartite_count((5,) * 20, (5,) * 20)


def test_constrained_bipartite_count():
    assert count_bipartite_constrained((1, 1), (1, 1), forced=[(1, 1)]) == 1
    assert count_bipartite_constrained((1, 1), (1, 1), forbidden=[(1, 1)]) == 1
    assert count_bipartite_constrained((2, 2), (2, 2), forbidden=[(1, 1)]) == 0


# -- McKay bipartite -------------------------------------------------------------


@pytest.mark.filterwarnings("ignore:Delta")
def test_mckay_degree_one_is_factorial():
    for m in range(1, 12):
        e = mckay_bipartite_estimate(BipartiteDegreePair((1,) * m, (1,) * m))
        assert e.log_value == pytest.approx(math.lgamma(m + 1), abs=1e-9)
        assert round(e.value) == exact_bipartite_count((1,) * m, (1,) * m)


def test_mckay_k22():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        e = mckay_bipartite_estimate(BipartiteDegreePair((2, 2), (2, 2)))
    assert any("hypothesis" in str(x.message) for x in w)
    assert not e.in_regime
    assert e.value == pytest.approx(24 / 16 * math.exp(-0.5), rel=1e-12)
    assert abs(math.log(e.value / 1)) <= C_BIPARTITE * e.remainder_arg


def test_mckay_two_regular_length_10():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        e = mckay_bipartite_estimate(BipartiteDegreePair((2,) * 10, (2,) * 10))
    exact = exact_bipartite_count((2,) * 10, (2,) * 10)
    assert abs(e.value / exact - 1) < 0.10


def test_degree_pair_fields():
    dp = BipartiteDegreePair((1, 3, 2), (2, 2, 2))
    assert dp.s == (3, 2, 1) and dp.M == 6 and dp.Delta == 3
    assert dp.J == sum(dp.t[:3]) + sum(dp.s[:2])
    with pytest.raises(ValueError):
        BipartiteDegreePair((1,), (2,))


# -- avoidance counts ----------------------------------------------------------------


def test_avoiding_counts():
    assert exact_avoiding_count((1, 1)) == 1
    assert exact_avoiding_count((1, 1), [(1, 2)]) == 0
    assert exact_avoiding_count((2, 2, 2, 2)) == 3


def test_avoiding_matches_networkx_enumeration():
    # oracle: filter all edge subsets of K_5 by degree sequence
    g = (2, 2, 2, 1, 1)
    X = [(1, 2)]
    pairs = [(a, b) for a in range(1, 6) for b in range(a + 1, 6) if (a, b) not in X]
    count = 0
    for bits in range(1 << len(pairs)):
        deg = [0] * 5
        for k, (a, b) in enumerate(pairs):
            if bits >> k & 1:
                deg[a - 1] += 1
                deg[b - 1] += 1
        count += tuple(deg) == g
    assert exact_avoiding_count(g, X) == count == len(enumerate_simple_graphs(g, X))


def test_mckay_avoiding_examples():
    for n in (2, 4, 6, 8, 10):
        e = mckay_avoiding_estimate(AvoidanceInstance((1,) * n, frozenset()))
        assert e.value == pytest.approx(double_factorial(n - 1), rel=1e-12)
        assert e.diagnostics["lambda"] == 0 and e.diagnostics["mu"] == 0
    e = mckay_avoiding_estimate(AvoidanceInstance((2, 2, 2, 2), frozenset()))
    assert abs(e.value / 3 - 1) <= 0.35
    e = mckay_avoiding_estimate(AvoidanceInstance((2,) * 10, frozenset({(1, 2)})))
    assert e.diagnostics["mu"] == pytest.approx(0.2)
    assert e.diagnostics["Delta_hat"] == 6


# -- conditional edge probability ---------------------------------------------------------


@pytest.mark.filterwarnings("ignore:xi")
def test_conditional_edge_probability_examples():
    ex = conditional_edge_probability((1, 1), (1, 1), [], [], (1, 1), "exact")
    est = conditional_edge_probability((1, 1), (1, 1), [], [], (1, 1), "estimate")
    assert ex.probability == Fraction(1, 2) and est.probability == pytest.approx(0.5)
    forced = conditional_edge_probability((1, 1, 1), (1, 1, 1), [], [(1, 2), (1, 3)], (1, 1), "exact")
    assert forced.probability == 1


def test_conditional_edge_probability_222():
    ex = conditional_edge_probability((2, 2, 2), (2, 2, 2), [], [], (1, 1), "exact")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        est = conditional_edge_probability((2, 2, 2), (2, 2, 2), [], [], (1, 1), "estimate")
    assert ex.probability == Fraction(2, 3)
    assert est.probability == pytest.approx(4 / 6)
    assert abs(est.probability - float(ex.probability)) <= est.xi * est.probability
    assert est.flagged


def test_conditional_edge_probability_errors():
    with pytest.raises(ValueError):
        conditional_edge_probability((1, 1), (1, 1), [(1, 1)], [(1, 1)], (2, 2), "exact")
    with pytest.raises(ValueError):
        conditional_edge_probability((1, 1), (1, 1), [(1, 1)], [], (1, 1), "exact")


# -- perfect matchings -------------------------------------------------------------------


def test_perfect_matching_examples():
    assert count_perfect_matchings(complete_graph(4)) == 3
    assert count_perfect_matchings(cycle_graph(6)) == 2
    assert count_perfect_matchings(petersen_graph()) == 6 == count_perfect_matchings_bitmask(petersen_graph())


def test_complete_graph_double_factorial():
    for n in range(2, 15, 2):
        assert count_perfect_matchings(complete_graph(n)) == double_factorial(n - 1)


def test_odd_n_warns_zero():
    with pytest.warns(UserWarning):
        assert count_perfect_matchings(complete_graph(5)) == 0


def test_multiplicity_flag_and_constraints():
    G = Multigraph(4, {(1, 2): 2, (3, 4): 1, (1, 3): 1, (2, 4): 3})
    assert count_perfect_matchings(G, multiplicity=True) == 2 + 3
    assert count_perfect_matchings(G, multiplicity=False) == 2
    assert count_perfect_matchings(G, forbidden=[(1, 2)]) == 3
    assert count_perfect_matchings(G, must_cover=[(1, 2)]) == 2


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.lists(st.tuples(st.integers(1, 10), st.integers(1, 10), st.integers(1, 3)), max_size=30))
def test_matching_counters_agree(h, raw):
    n = 2 * h
    edges = {}
    for u, v, m in raw:
        u, v = min(u, n), min(v, n)
        if u != v:
            edges[(min(u, v), max(u, v))] = m
    G = Multigraph(n, edges)
    for mult in (True, False):
        assert count_perfect_matchings(G, multiplicity=mult) == count_perfect_matchings_bitmask(G, multiplicity=mult)
    plain = len(enumerate_perfect_matchings(G))
    assert plain == count_perfect_matchings(G, multiplicity=False)
    nxg = nx.Graph(list(edges))
    if plain and nxg.number_of_nodes() == n:
        assert len(nx.max_weight_matching(nxg, maxcardinality=True)) == h


def test_all_perfect_matchings_count():
    assert len(all_perfect_matchings(8)) == 105


# -- matching pairs ----------------------------------------------------------------------


def test_matching_pair_examples():
    assert matching_pair_count(6, 3) == 15
    brute = sum(len(set(a) & set(b)) == 0 for a in all_perfect_matchings(6) for b in all_perfect_matchings(6))
    assert matching_pair_count(6, 0) == brute
    for n in (4, 6, 8, 10):
        for k in range(n // 2 + 1):
            for lv in ("vertex", "pairing"):
                assert matching_pair_count(n, k, level=lv) == matching_pair_count_closed(n, k, lv)
    with pytest.raises(ValueError):
        matching_pair_count(6, 4)


def test_matching_pair_formula_ratio_pairing_level():
    ratio = matching_pair_count(12, 1, "formula") / matching_pair_count(12, 1, level="pairing")
    assert abs(ratio - 1) < 0.25


# -- pairing spaces and laws -------------------------------------------------------------


def test_pairing_space_cardinalities():
    assert sum(1 for _ in enumerate_pairings(4, 2)) == 105 == num_pairings(4, 2)
    assert sum(1 for _ in enumerate_pairings(4, 3, loopless=True)) == num_loopless_pairings(4, 3) == 3348
    assert num_loopless_pairings(4, 2) == 60 and num_loopless_pairings(3, 2) == 8


def test_pairings_of_multigraph_sum():
    total = sum(pairings_of_multigraph(G, 3) for G in regular_multigraphs(4, 3))
    assert total == num_pairings(4, 3)


def test_exact_laws_examples():
    from rrgcouple.graphs import Multigraph as MG

    law = exact_model_distribution("pairing", 2, 2)
    assert law.as_dict() == {MG(2, {(1, 1): 1, (2, 2): 1}): Fraction(1, 3), MG(2, {(1, 2): 2}): Fraction(2, 3)}
    assert exact_model_distribution("loopless-pairing", 2, 2).as_dict() == {MG(2, {(1, 2): 2}): 1}
    sup = exact_model_distribution("matching-superpose(2)", 4)
    assert len(sup) == 6 and sum(sup.probs) == 1
    assert sup[MG(4, {(1, 2): 2, (3, 4): 2})] == Fraction(1, 9)


def test_brute_and_grouped_laws_agree():
    for n, d, name in ((4, 2, "pairing"), (4, 3, "loopless-pairing"), (3, 2, "loopless-pairing")):
        a = exact_model_distribution(name, n, d, method="brute")
        b = exact_model_distribution(name, n, d)
        assert a == b and sum(b.probs) == 1


def test_law_space_cap():
    with pytest.raises(SpaceTooLarge):
        exact_model_distribution("pairing", 10, 3, cap=1000)


def test_expected_matching_count_oracle():
    # E Y summed over matchings H of P(H in P*) against a direct law average
    for n, d in ((4, 3), (4, 2), (6, 3)):
        law = exact_model_distribution("loopless-pairing", n, d, cap=10**8)
        direct = sum(p * count_perfect_matchings(G) for G, p in zip(law.outcomes, law.probs))
        assert expected_loopless_matching_count(n, d) == direct
    assert expected_loopless_matching_count(4, 3) == Fraction(135, 31)
