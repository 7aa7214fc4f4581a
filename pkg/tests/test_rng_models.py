from __future__ import annotations

from collections import Counter

import numpy as np
import pytest
from scipy import stats

from conftest import three_se
from rrgcouple.distributions import FiniteDistribution
from rrgcouple.enumeration.counting import all_perfect_matchings
from rrgcouple.enumeration.laws import exact_model_distribution, regular_multigraphs
from rrgcouple.graphs import Digraph, Multigraph, complete_graph
from rrgcouple.models import (
    ModelSpec,
    RejectionCapExceeded,
    has_disjoint_doubles,
    sample_dout,
    sample_gnp,
    sample_grd,
    sample_matching_model,
    sample_pairing,
    sample_perfect_matching,
)
from rrgcouple.rng import RngStream, rng_stream
from rrgcouple.stats import multigraph_census, tv_distance


# -- streams ---------------------------------------------------------------


def test_same_stream_same_draws():
    a = rng_stream(99, 3).generator.random(10**4)
    b = rng_stream(99, 3).generator.random(10**4)
    assert np.array_equal(a, b)


def test_distinct_indices_differ_and_decorrelate():
    a = rng_stream(99, 0).generator.random(10**6)
    b = rng_stream(99, 1).generator.random(10**6)
    assert not np.array_equal(a[:100], b[:100])
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.01


def test_stream_uniformity_ks():
    x = rng_stream(12345, 0).generator.random(10**5)
    assert stats.kstest(x, "uniform").pvalue > 1e-3


def test_stream_independent_of_creation_order():
    first = rng_stream(5, 7).generator.random(5)
    for k in range(7):
        rng_stream(5, k).generator.random(1000)
    assert np.array_equal(first, RngStream(5, 7).generator.random(5))
    with pytest.raises(ValueError):
        RngStream(5, -1)


# -- G(n, p) ---------------------------------------------------------------


def test_gnp_extremes():
    assert sample_gnp(3, 0.0, rng=1).num_pairs == 0
    assert sample_gnp(3, 1.0, rng=1) == complete_graph(3)
    D = sample_gnp(4, 1.0, directed=True, rng=1)
    assert isinstance(D, Digraph) and D.num_arcs == 12
    with pytest.raises(ValueError):
        sample_gnp(3, 1.5)


def test_gnp_mean_edges():
    trials = 10**4
    counts = np.array([sample_gnp(100, 0.3, rng=rng_stream(3, i)).num_pairs for i in range(trials)])
    mean = 0.3 * 4950
    se = np.sqrt(4950 * 0.3 * 0.7 / trials)
    assert abs(counts.mean() - mean) <= 3 * se


# -- matchings ---------------------------------------------------------------


def test_matching_n2():
    assert sample_perfect_matching(2, 0).key() == ((1, 2),)
    with pytest.raises(ValueError):
        sample_perfect_matching(5)


def test_matching_n4_frequencies(gen):
    trials = 30000
    c = Counter(sample_perfect_matching(4, gen).key() for _ in range(trials))
    assert len(c) == 3
    for v in c.values():
        assert abs(v / trials - 1 / 3) <= three_se(1 / 3, trials)


def test_matching_n6_uniform(gen):
    trials = 150000
    c = Counter(sample_perfect_matching(6, gen).key() for _ in range(trials))
    assert set(c) == set(all_perfect_matchings(6))
    assert stats.chisquare(list(c.values())).pvalue > 1e-3


def test_matching_model_n2():
    assert sample_matching_model(2, 3, "superpose", 0).edges == {(1, 2): 3}
    assert sample_matching_model(2, 3, "union", 0).edges == {(1, 2): 1}


def test_union_is_capped_superposition():
    for i in range(50):
        a = sample_matching_model(10, 3, "superpose", rng_stream(8, i))
        b = sample_matching_model(10, 3, "union", rng_stream(8, i))
        assert a.support() == b


def test_simple_conditioned_is_simple_and_cap():
    for i in range(20):
        assert sample_matching_model(8, 2, "simple-conditioned", rng_stream(4, i)).is_simple()
    with pytest.raises(RejectionCapExceeded):
        sample_matching_model(2, 2, "simple-conditioned", 0, max_tries=5)


def test_superpose_law_matches_enumeration(gen):
    exact = exact_model_distribution("matching-superpose(2)", 4)
    samples = [sample_matching_model(4, 2, "superpose", gen) for _ in range(10**5)]
    assert tv_distance(exact.to_float(), FiniteDistribution.from_samples(samples).to_float()).value < 0.02


# -- pairings ----------------------------------------------------------------


def test_pairing_n4_d2_uniform(gen):
    trials = 10**6
    c = Counter(sample_pairing(4, 2, "none", gen).as_tuples().__repr__() for _ in range(trials))
    assert len(c) == 105
    assert stats.chisquare(list(c.values())).pvalue > 1e-3


def test_loopless_n2_d2_is_double_edge():
    for i in range(20):
        assert sample_pairing(2, 2, "loopless", rng_stream(1, i)).project().edges == {(1, 2): 2}


def test_disjoint_doubles_census():
    for i in range(10**4):
        G = sample_pairing(6, 3, "disjoint-doubles(1)", rng_stream(2, i)).project()
        c = multigraph_census(G)
        assert (c.doubles, c.multi, c.higher, c.loops) == (1, 1, 0, 0)
        assert has_disjoint_doubles(G, 1)


def test_pairing_projection_degrees():
    for i in range(200):
        P = sample_pairing(6, 3, "none", rng_stream(6, i))
        G = P.project()
        assert G.degrees().tolist() == [3] * 6 and G.degrees().sum() == 18
        assert sample_pairing(7, 2, "loopless", rng_stream(6, i)).project().without_loops().num_edges == 7


def test_pairing_errors():
    with pytest.raises(ValueError):
        sample_pairing(3, 3)
    with pytest.raises(ValueError):
        sample_pairing(4, 2, "sometimes")
    with pytest.raises(RejectionCapExceeded):
        sample_pairing(4, 3, "disjoint-doubles(3)", 0, max_tries=200)


# -- G(n, d) -------------------------------------------------------------------


def test_grd_examples():
    assert sample_grd(4, 3, 0) == complete_graph(4)
    trials = 9000
    c = Counter(sample_grd(4, 1, rng_stream(9, i)).key() for i in range(trials))
    assert len(c) == 3
    for v in c.values():
        assert abs(v / trials - 1 / 3) <= three_se(1 / 3, trials)
    with pytest.raises(ValueError):
        sample_grd(5, 3)
    with pytest.raises(ValueError):
        sample_grd(4, 4)


def test_grd_support_matches_filtered_enumeration():
    simple = {g for g in regular_multigraphs(6, 3, loops=False) if g.is_simple()}
    assert len(simple) == 70
    seen = {sample_grd(6, 3, rng_stream(10, i)) for i in range(3000)}
    assert seen == simple


# -- d-out -----------------------------------------------------------------------


def test_dout_examples():
    D = sample_dout(2, 1, True, 0)
    assert D.arcs.tolist() == [[1, 2], [2, 1]]
    assert sample_dout(2, 1, False, 0).edges == {(1, 2): 1}
    assert sample_dout(5, 4, False, 0) == complete_graph(5)
    with pytest.raises(ValueError):
        sample_dout(4, 4)


def test_dout_arc_marginal():
    trials = 10**4
    hits = sum(sample_dout(50, 2, True, rng_stream(11, i)).has_arc(1, 2) for i in range(trials))
    assert abs(hits / trials - 2 / 49) <= three_se(2 / 49, trials)
    D = sample_dout(50, 2, True, 0)
    assert D.out_degrees().tolist() == [2] * 50


# -- determinism -----------------------------------------------------------------


@pytest.mark.parametrize("spec", [
    ModelSpec("pairing", 8, 3),
    ModelSpec("loopless-pairing", 8, 3),
    ModelSpec("disjoint-doubles", 8, 3, doubles=1),
    ModelSpec("grd", 8, 3),
    ModelSpec("gnp", 20, p=0.2),
    ModelSpec("matching-superpose", 8, 3),
    ModelSpec("matching-union", 8, 3),
    ModelSpec("matching-simple", 8, 2),
    ModelSpec("dout", 8, 2),
])
def test_samplers_deterministic(spec):
    a = spec.sample(rng_stream(77, 4))
    b = spec.sample(rng_stream(77, 4))
    assert isinstance(a, Multigraph) and a == b


def test_modelspec_validation():
    with pytest.raises(ValueError):
        ModelSpec("nonsense", 4, 2)
    with pytest.raises(ValueError):
        ModelSpec("gnp", 4)
