"""Tests for minimum-informative extensions."""
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from data import instances
from signals.beliefs import BeliefDistribution, Posterior, StateSpace, marginal_theta_belief
from signals.blackwell import Relation, compare
from signals.errors import InputError, NotBayesPlausibleError
from signals.extension import (
    MinExtension,
    build_extension_system,
    enumerate_min_extensions,
    solve_min_extension,
    split_atom,
    verify_min_extension,
)

seeds = st.integers(min_value=0, max_value=10_000)

THIRD = F(1, 3)


def test_c1_system_clears_denominators(c1_space, c1_gamma):
    system = build_extension_system(c1_gamma, c1_space)
    assert system.num_vars == 8
    # x1_t1 row: atom (1/4, 3/4) carries 1/8, atom (3/4, 1/4) carries 3/8, prior 1/4
    assert system.eq_rows[0] == ((1, 0, 0, 0, 3, 0, 0, 0), 2)
    assert system.eq_rows[2] == ((0, 0, 3, 0, 0, 0, 1, 0), 2)


def test_c1_lexmin_extension(c1_space, c1_gamma):
    ext = solve_min_extension(c1_gamma, c1_space)
    assert ext.cond == ((0, 1, THIRD, 2 * THIRD), (2 * THIRD, THIRD, 1, 0))
    assert ext.tau == BeliefDistribution.from_atoms([
        (Posterior.of("0", "1/4", "1/4", "1/2"), "1/2"),
        (Posterior.of("1/2", "1/4", "1/4", "0"), "1/2"),
    ])
    assert all(ext.invariant_report().values())
    assert ext.conditional(0, 2, 1) == THIRD
    assert ext.conditional(0, 2, 0) == 0


def test_c1_vertex_extensions(c1_space, c1_gamma):
    vertices = enumerate_min_extensions(c1_gamma, c1_space)
    assert [(e.cond[0][0], e.cond[0][2]) for e in vertices] == [
        (0, THIRD), (0, 2 * THIRD), (1, THIRD), (1, 2 * THIRD)
    ]
    assert vertices[0] == solve_min_extension(c1_gamma, c1_space)
    for ext in vertices:
        assert all(r == 0 for r in ext.residuals())
        assert verify_min_extension(ext.tau, c1_gamma, c1_space)


def test_symmetric_extension_is_valid_but_interior(c1_space, c1_gamma):
    ext = instances.c1_symmetric_extension()
    assert all(ext.invariant_report().values())
    assert ext not in enumerate_min_extensions(c1_gamma, c1_space)


def test_point_mass_atoms_prune_unreached_blocks(c1_space):
    gamma = BeliefDistribution.from_atoms([(Posterior.of(1, 0), "1/2"), (Posterior.of(0, 1), "1/2")])
    assert build_extension_system(gamma, c1_space).num_vars == 4
    ext = solve_min_extension(gamma, c1_space)
    assert ext.tau.posteriors == (Posterior.of(0, 0, "1/2", "1/2"), Posterior.of("1/2", "1/2", 0, 0))
    assert ext.cond == ((F(1, 2),) * 4, (F(1, 2),) * 4)


def test_not_plausible_gamma_has_no_extension(c1_space):
    gamma = BeliefDistribution.from_atoms([
        (Posterior.of("3/4", "1/4"), "1/2"), (Posterior.of("1/2", "1/2"), "1/2")
    ])
    with pytest.raises(NotBayesPlausibleError):
        solve_min_extension(gamma, c1_space)
    with pytest.raises(InputError):
        build_extension_system(gamma, c1_space)


def test_conditionals_must_be_probability_vectors(c1_space, c1_gamma):
    with pytest.raises(InputError):
        MinExtension.from_conditionals(c1_gamma, c1_space, [["1/2", "1/3", "1/2", "1/2"], ["1/2"] * 4])
    with pytest.raises(InputError):
        MinExtension.from_conditionals(c1_gamma, c1_space, [["1/2"] * 4])


def test_prior_only_gamma_extends_to_the_prior(c1_space):
    gamma = BeliefDistribution.delta(c1_space.prior_theta())
    ext = solve_min_extension(gamma, c1_space)
    assert ext.tau == BeliefDistribution.delta(c1_space.prior_posterior())


def test_identity_privacy_map_extends_to_gamma_itself():
    space = StateSpace.theta_only(["a", "b", "c"], ["1/2", "1/4", "1/4"])
    gamma = BeliefDistribution.from_atoms([
        (Posterior.of("3/4", "1/8", "1/8"), "1/2"), (Posterior.of("1/4", "3/8", "3/8"), "1/2")
    ])
    assert solve_min_extension(gamma, space).tau == gamma


def test_split_atom_breaks_minimality(c1_space, c1_gamma):
    tau = solve_min_extension(c1_gamma, c1_space).tau
    finer = split_atom(tau, c1_space)
    assert finer is not None
    assert marginal_theta_belief(finer, c1_space) == c1_gamma
    assert not verify_min_extension(finer, c1_gamma, c1_space)
    assert compare(finer, tau).relation == Relation.DOMINATES


def test_split_atom_needs_two_states_in_a_block():
    space = StateSpace.theta_only(["a", "b"], ["1/2", "1/2"])
    assert split_atom(BeliefDistribution.delta(space.prior_posterior()), space) is None


@settings(max_examples=200)
@given(seed=seeds)
def test_random_extensions_satisfy_every_invariant(seed):
    rng = np.random.default_rng(seed)
    space = instances.random_space(rng, max_types=3, max_states=5)
    gamma = instances.random_plausible_gamma(rng, space.prior_theta(), max_atoms=3)
    ext = solve_min_extension(gamma, space)
    assert all(ext.invariant_report().values())
    assert verify_min_extension(ext.tau, gamma, space)
    finer = split_atom(ext.tau, space)
    if finer is not None:
        assert marginal_theta_belief(finer, space) == gamma
        assert not verify_min_extension(finer, gamma, space)


def test_vertex_extensions_satisfy_the_two_atom_closed_form(c1_space, c1_gamma):
    (nu1, alpha), (nu2, _) = c1_gamma.atoms
    for ext in enumerate_min_extensions(c1_gamma, c1_space):
        for j, (x1, _) in enumerate([c1_space.block(0), c1_space.block(1)]):
            prior_cond = c1_space.prior_conditional(x1)
            slope = alpha * nu1[j] / ((1 - alpha) * nu2[j])
            assert ext.cond[1][x1] == prior_cond + slope * (prior_cond - ext.cond[0][x1])


def test_splitting_any_vertex_extension_is_strictly_more_informative(c1_space, c1_gamma):
    for ext in enumerate_min_extensions(c1_gamma, c1_space):
        finer = split_atom(ext.tau, c1_space)
        assert not verify_min_extension(finer, c1_gamma, c1_space)
        assert compare(ext.tau, finer).relation == Relation.DOMINATED
