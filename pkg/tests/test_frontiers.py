"""Tests for permissible sets, frontier supports and frontier membership."""
from fractions import Fraction as F
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from data import instances
from lp.kernel import LinearSystem, enumerate_vertices
from signals.beliefs import BeliefDistribution, Posterior
from signals.blackwell import Relation, ScalarDistribution, compare, garble
from signals.errors import InfeasibleError, InputError
from signals.frontiers import (
    ExPost,
    Inferential,
    PosteriorMean,
    SingleBound,
    canonical_frontier,
    dichotomy_point,
    expost_frontier_support,
    frontier_distribution,
    inferential_counterexample,
    inferential_frontier_membership,
    inferential_frontier_support,
    inferential_split,
    kappa_of,
    on_frontier,
    permissible,
    posterior_mean_frontier_construct,
    spread_to_extreme_points,
)

seeds = st.integers(min_value=0, max_value=10_000)

UNIFORM2 = Posterior.of("1/2", "1/2")
UNIFORM3 = Posterior.of("1/3", "1/3", "1/3")


# -- single bound ----------------------------------------------------------


def test_single_bound_permits_garblings_only(c1_spec, c1_gamma):
    silent = BeliefDistribution.delta(UNIFORM2)
    assert permissible(silent, c1_spec)
    assert permissible(c1_gamma, c1_spec)
    assert not permissible(BeliefDistribution.from_atoms([(Posterior.of(1, 0), "1/2"), (Posterior.of(0, 1), "1/2")]), c1_spec)
    assert on_frontier(c1_gamma, c1_spec)
    assert not on_frontier(silent, c1_spec)


def test_single_bound_must_be_plausible():
    with pytest.raises(InputError):
        SingleBound(UNIFORM2, BeliefDistribution.delta(Posterior.of("3/4", "1/4")))


# -- ex post ---------------------------------------------------------------


def test_expost_interval_frontier():
    spec = instances.expost_interval_spec()
    support = expost_frontier_support(spec)
    assert support == [Posterior.of("1/3", "2/3"), Posterior.of("2/3", "1/3")]
    support, gamma = canonical_frontier(spec)
    assert gamma.probs == (F(1, 2), F(1, 2))
    assert spec.on_frontier(gamma)
    silent = BeliefDistribution.delta(UNIFORM2)
    assert spec.permits(silent)
    assert not spec.on_frontier(silent)
    assert spread_to_extreme_points(silent, spec) == gamma
    assert not spec.admits(Posterior.of("3/4", "1/4"))


def test_expost_region_must_contain_prior():
    with pytest.raises(InputError):
        ExPost(UNIFORM2, LinearSystem.build(2, ineq=[([1, 0], "1/4")]))


def test_frontier_distribution_rejects_unrepresentable_prior():
    with pytest.raises(InfeasibleError):
        frontier_distribution([Posterior.of("3/4", "1/4"), Posterior.of(1, 0)], UNIFORM2)


@settings(max_examples=50)
@given(seed=seeds, k=st.integers(min_value=2, max_value=3))
def test_random_polytopes_spread_to_their_vertices(seed, k):
    rng = np.random.default_rng(seed)
    prior = Posterior(instances.random_simplex_point(rng, k))
    spec = instances.random_polytope_spec(rng, prior)
    support, gamma = canonical_frontier(spec)
    assert gamma.mean() == prior
    assert spec.on_frontier(gamma)
    assert set(gamma.posteriors) <= set(support)
    silent = BeliefDistribution.delta(prior)
    spread = spread_to_extreme_points(silent, spec)
    assert spec.on_frontier(spread)
    assert compare(spread, silent).relation in (Relation.DOMINATES, Relation.EQUIVALENT)


# -- inferential -----------------------------------------------------------


def test_inferential_ratio_test(c2_spec):
    assert c2_spec.admits(Posterior.of("2/3", "1/3"))
    assert not c2_spec.admits(Posterior.of("3/4", "1/4"))
    assert c2_spec.ratios(Posterior.of("2/3", "1/3")) == (F(4, 3), F(2, 3))
    with pytest.raises(InputError):
        Inferential(UNIFORM2, F(1, 2))


def test_c2_frontier(c2_spec):
    points = inferential_frontier_support(c2_spec.prior_theta, 2)
    assert [p.subset_E for p in points] == [(0,), (1,)]
    assert [p.posterior for p in points] == [Posterior.of("2/3", "1/3"), Posterior.of("1/3", "2/3")]
    _, gamma = canonical_frontier(c2_spec)
    assert gamma == instances.c2_frontier_gamma()
    assert c2_spec.on_frontier(gamma)
    assert not c2_spec.on_frontier(BeliefDistribution.delta(UNIFORM2))


def test_ternary_dichotomy_points():
    assert dichotomy_point(UNIFORM3, 2, [0]) == Posterior.of("1/2", "1/4", "1/4")
    assert dichotomy_point(UNIFORM3, 2, [0, 1]) == Posterior.of("2/5", "2/5", "1/5")
    points = inferential_frontier_support(UNIFORM3, 2)
    assert [p.subset_E for p in points] == [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]


@given(seed=seeds)
def test_dichotomy_points_are_the_vertices_of_the_ratio_polytope(seed):
    rng = np.random.default_rng(seed)
    prior = Posterior(instances.random_simplex_point(rng, 3))
    spec = Inferential(prior, instances.random_lambda(rng))
    points = [p.posterior for p in inferential_frontier_support(prior, spec.lam)]
    assert set(points) == {Posterior(v) for v in enumerate_vertices(spec.region())}
    for nu in points:
        r = spec.ratios(nu)
        assert max(r) == spec.lam * min(r)


def test_lambda_one_frontier_is_the_prior():
    spec = Inferential(UNIFORM2, F(1))
    assert inferential_frontier_membership(BeliefDistribution.delta(UNIFORM2), UNIFORM2, 1)
    assert canonical_frontier(spec)[1] == BeliefDistribution.delta(UNIFORM2)
    assert inferential_counterexample(BeliefDistribution.delta(UNIFORM2), spec) is None
    with pytest.raises(InputError):
        inferential_frontier_support(UNIFORM2, 1)


def test_single_privacy_value_frontier_is_the_prior():
    only = Posterior.of(1)
    spec = Inferential(only, F(2))
    delta = BeliefDistribution.delta(only)
    assert inferential_frontier_support(only, 2) == []
    assert canonical_frontier(spec) == ([only], delta)
    assert spec.on_frontier(delta)
    assert inferential_frontier_membership(delta, only, 2)
    assert inferential_counterexample(delta, spec) is None


def test_split_of_the_prior(c2_spec):
    (nu1, p1), (nu2, p2) = inferential_split(UNIFORM2, [0], "1/2")
    assert (nu1, p1) == (Posterior.of("3/5", "2/5"), F(5, 8))
    assert (nu2, p2) == (Posterior.of("1/3", "2/3"), F(3, 8))
    better = inferential_counterexample(BeliefDistribution.delta(UNIFORM2), c2_spec)
    assert better == BeliefDistribution.from_atoms([(nu1, p1), (nu2, p2)])
    assert c2_spec.permits(better)


@pytest.mark.parametrize("subset, delta", [([0, 1, 2], "1/2"), ([], "1/2"), ([0], 1), ([0], 0)])
def test_split_rejects_degenerate_arguments(subset, delta):
    with pytest.raises(InputError):
        inferential_split(UNIFORM3, subset, delta)


@given(
    seed=seeds,
    delta=st.fractions(min_value=F(1, 100), max_value=F(99, 100)),
)
def test_splits_average_back_for_every_event(seed, delta):
    rng = np.random.default_rng(seed)
    nu = Posterior(instances.random_simplex_point(rng, 4))
    for size in range(1, 4):
        for subset in combinations(range(4), size):
            (nu1, p1), (nu2, p2) = inferential_split(nu, subset, delta)
            assert p1 + p2 == 1
            assert tuple(p1 * a + p2 * b for a, b in zip(nu1.weights, nu2.weights)) == nu.weights


def test_counterexample_needs_a_permissible_gamma(c2_spec):
    violation = BeliefDistribution.from_atoms([(Posterior.of("3/4", "1/4"), "1/2"), (Posterior.of("1/4", "3/4"), "1/2")])
    with pytest.raises(InputError):
        inferential_counterexample(violation, c2_spec)
    assert inferential_counterexample(instances.c2_frontier_gamma(), c2_spec) is None


@pytest.mark.slow
@given(seed=seeds)
def test_off_frontier_gammas_are_strictly_improved(seed):
    rng = np.random.default_rng(seed)
    prior = Posterior(instances.random_simplex_point(rng, 3))
    spec = Inferential(prior, instances.random_lambda(rng))
    _, frontier = canonical_frontier(spec)
    gamma = garble(frontier, instances.random_merge_map(rng, len(frontier)))
    assert spec.permits(gamma)
    better = inferential_counterexample(gamma, spec)
    if spec.on_frontier(gamma):
        assert better is None
    else:
        assert better is not None
        assert spec.permits(better)
        assert compare(better, gamma).relation == Relation.DOMINATES


# -- posterior mean --------------------------------------------------------


def test_c3_frontier():
    spec = instances.c3_spec()
    gamma = posterior_mean_frontier_construct(spec)
    assert gamma == instances.c3_frontier_gamma()
    assert kappa_of(gamma, spec.f_values) == spec.kappa_bar
    assert spec.on_frontier(gamma)
    assert spec.permits(BeliefDistribution.delta(UNIFORM2))
    assert not spec.on_frontier(BeliefDistribution.delta(UNIFORM2))
    full = BeliefDistribution.from_atoms([(Posterior.of(1, 0), "1/2"), (Posterior.of(0, 1), "1/2")])
    assert not spec.permits(full)


def test_ternary_frontier():
    spec = instances.ternary_spec()
    gamma = posterior_mean_frontier_construct(spec)
    assert gamma.atoms == (
        (Posterior.of(0, "1/2", "1/2"), F(1, 2)),
        (Posterior.of("1/2", "1/2", 0), F(1, 6)),
        (Posterior.of("3/4", 0, "1/4"), F(1, 3)),
    )
    assert spec.on_frontier(gamma)
    assert not spec.on_frontier(BeliefDistribution.delta(UNIFORM3))


def test_kappa_bar_must_be_a_contraction_of_full_information():
    too_wide = ScalarDistribution.from_atoms([(-1, "1/2"), (2, "1/2")])
    with pytest.raises(InputError):
        PosteriorMean(UNIFORM2, (F(0), F(1)), too_wide)


@pytest.mark.parametrize("spec_factory", [
    instances.c1_spec,
    instances.c2_spec,
    instances.c3_spec,
    instances.ternary_spec,
    instances.expost_interval_spec,
])
@settings(max_examples=100)
@given(seed=seeds)
def test_permissible_sets_are_closed_under_garbling(spec_factory, seed):
    spec = spec_factory()
    rng = np.random.default_rng(seed)
    _, frontier = canonical_frontier(spec)
    gamma = garble(frontier, instances.random_merge_map(rng, len(frontier)))
    assert spec.permits(frontier)
    assert spec.permits(gamma)


@settings(max_examples=50)
@given(seed=seeds, k=st.integers(min_value=2, max_value=4))
def test_frontier_atoms_cannot_be_split_admissibly(seed, k):
    rng = np.random.default_rng(seed)
    prior = Posterior(instances.random_simplex_point(rng, k))
    spec = Inferential(prior, instances.random_lambda(rng))
    for point in inferential_frontier_support(prior, spec.lam):
        assert spec.admits(point.posterior)
        for size in range(1, k):
            for subset in combinations(range(k), size):
                for step in range(1, 11):
                    (nu1, _), (nu2, _) = inferential_split(point.posterior, subset, F(step, 11))
                    assert not (spec.admits(nu1) and spec.admits(nu2))
