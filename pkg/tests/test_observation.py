import itertools

import numpy as np
import pytest

from paircomp import (
    ObservationSample,
    adjacency_matrix,
    assign_random,
    empirical_scores,
    identity_permutation,
    make_noisy_sorting,
    make_topology,
    observe,
    sample_from_text,
    sample_matrix,
    sample_to_text,
    scores,
)


def test_assign_random_determinism_and_trivial_case():
    g = make_topology("path", 9)
    a = assign_random(g, np.random.default_rng(42))
    b = assign_random(g, np.random.default_rng(42))
    assert np.array_equal(a, b)
    g1 = make_topology("path", 2)
    # n=1 graphs are not constructible; n=2 smallest: still a permutation
    assert sorted(assign_random(g1, np.random.default_rng(0)).tolist()) == [0, 1]


def test_assign_random_is_uniform_at_n4():
    g = make_topology("complete", 4)
    rng = np.random.default_rng(7)
    counts = {p: 0 for p in itertools.permutations(range(4))}
    draws = 100_000
    for _ in range(draws):
        counts[tuple(assign_random(g, rng).tolist())] += 1
    for c in counts.values():
        assert abs(c / draws - 1 / 24) < 0.005


def test_observe_expectation_example():
    g = make_topology("complete", 3)
    m = make_noisy_sorting(identity_permutation(3), 0.4)
    s = observe(m, g, identity_permutation(3), "expectation")
    assert s.pairs.tolist() == [[0, 1], [0, 2], [1, 2]]
    assert np.allclose(s.values, [0.9, 0.9, 0.9], atol=0)


def test_observe_bernoulli_values_are_binary():
    g = make_topology("two_cliques", 10)
    m = make_noisy_sorting(identity_permutation(10), 0.3)
    s = observe(m, g, identity_permutation(10), "bernoulli", np.random.default_rng(1))
    assert set(np.unique(s.values)).issubset({0.0, 1.0})
    assert s.num_pairs == 20


def test_observed_pairs_follow_assignment():
    g = make_topology("star", 6)
    m = make_noisy_sorting(identity_permutation(6), 0.2)
    rng = np.random.default_rng(5)
    sigma = assign_random(g, rng)
    s = observe(m, g, sigma, "expectation")
    assert s.num_pairs == g.num_edges
    a = adjacency_matrix(g)
    expected = {
        (min(i, j), max(i, j))
        for i in range(6)
        for j in range(6)
        if i < j and a[sigma[i], sigma[j]]
    }
    assert {tuple(p) for p in s.pairs} == expected


def test_observe_validates_inputs():
    g = make_topology("path", 4)
    m = make_noisy_sorting(identity_permutation(5), 0.1)
    with pytest.raises(ValueError):
        observe(m, g, identity_permutation(4), "expectation")
    m4 = make_noisy_sorting(identity_permutation(4), 0.1)
    with pytest.raises(ValueError):
        observe(m4, g, identity_permutation(4), "bernoulli")  # rng required
    with pytest.raises(ValueError):
        observe(m4, g, identity_permutation(4), "nonsense")


def test_empirical_scores_expectation_equals_true_scores():
    g = make_topology("complete", 12)
    m = make_noisy_sorting(identity_permutation(12), 0.35)
    s = observe(m, g, identity_permutation(12), "expectation")
    assert np.allclose(empirical_scores(s), scores(m), atol=1e-15)


def test_empirical_scores_single_win_and_pairing_identity():
    # star with identity assignment: each leaf has exactly one comparison
    g = make_topology("star", 5)
    m = make_noisy_sorting(np.array([4, 0, 1, 2, 3]), 0.5)  # hub ranked last
    s = observe(m, g, identity_permutation(5), "expectation")
    tau = empirical_scores(s)
    assert np.allclose(tau[1:], 1.0)  # leaves won their single comparison
    counts = np.bincount(s.pairs.ravel(), minlength=5)
    assert np.isclose((counts * tau).sum(), s.num_pairs)


def test_empirical_scores_rejects_unobserved_item():
    s = ObservationSample(
        n=3,
        pairs=np.array([[0, 1]]),
        values=np.array([1.0]),
        assignment=identity_permutation(3),
    )
    with pytest.raises(ValueError, match="item 2"):
        empirical_scores(s)


def test_score_concentration_improves_with_n():
    lam = 0.25
    means = []
    for n in (50, 100, 200, 400):
        g = make_topology("complete", n)
        m = make_noisy_sorting(identity_permutation(n), lam)
        tau_star = scores(m)
        rng = np.random.default_rng(1000 + n)
        vals = []
        for _ in range(20):
            s = observe(m, g, assign_random(g, rng), "bernoulli", rng)
            vals.append(np.abs(empirical_scores(s) - tau_star).sum() / n)
        means.append(np.mean(vals))
    assert all(a >= b for a, b in zip(means, means[1:]))


def test_sample_matrix_view():
    g = make_topology("path", 4)
    m = make_noisy_sorting(identity_permutation(4), 0.1)
    s = observe(m, g, identity_permutation(4), "expectation")
    y, observed = sample_matrix(s)
    assert np.array_equal(observed, adjacency_matrix(g))
    assert np.allclose(y + y.T, 1.0)
    assert np.all(y[~observed] == 0.5)


def test_sample_text_round_trip():
    g = make_topology("two_cliques", 8)
    m = make_noisy_sorting(identity_permutation(8), 0.2)
    rng = np.random.default_rng(3)
    s = observe(m, g, assign_random(g, rng), "bernoulli", rng)
    t = sample_to_text(s)
    s2 = sample_from_text(t)
    assert s2.n == s.n
    assert np.array_equal(s2.pairs, s.pairs)
    assert np.array_equal(s2.values, s.values)
    assert np.array_equal(s2.assignment, s.assignment)
