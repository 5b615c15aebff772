"""Canonical desk instances and seeded random corpora.

The random generators draw integers from a numpy Generator and build every
probability as an exact Fraction, so a seed fixes the instance exactly.
"""
from fractions import Fraction
from typing import List, Optional

import numpy as np

from lp.kernel import ONE, ZERO, LinearSystem, Vector
from signals.beliefs import BeliefDistribution, Posterior, StateSpace
from signals.blackwell import ScalarDistribution
from signals.extension import MinExtension
from signals.frontiers import ExPost, Inferential, PosteriorMean, SingleBound

HALF = Fraction(1, 2)


# -- desk instances --------------------------------------------------------


def c1_space() -> StateSpace:
    """Ω = X × Θ with X = {x1, x2}, Θ = {t1, t2} and a uniform prior."""
    return StateSpace.from_labels(
        ["x1_t1", "x2_t1", "x1_t2", "x2_t2"],
        ["t1", "t2"],
        {"x1_t1": "t1", "x2_t1": "t1", "x1_t2": "t2", "x2_t2": "t2"},
        ["1/4"] * 4,
    )


def c1_gamma_bar() -> BeliefDistribution:
    return BeliefDistribution.from_atoms([
        (Posterior.of("3/4", "1/4"), HALF),
        (Posterior.of("1/4", "3/4"), HALF),
    ])


def c1_spec() -> SingleBound:
    return SingleBound(c1_space().prior_theta(), c1_gamma_bar())


def c1_symmetric_extension() -> MinExtension:
    """Every conditional equal to 1/2."""
    return MinExtension.from_conditionals(c1_gamma_bar(), c1_space(), [[HALF] * 4, [HALF] * 4])


def c2_space() -> StateSpace:
    return StateSpace.theta_only(["t1", "t2"], [HALF, HALF])


def c2_spec() -> Inferential:
    return Inferential(c2_space().prior_theta(), Fraction(2))


def c2_frontier_gamma() -> BeliefDistribution:
    return BeliefDistribution.from_atoms([
        (Posterior.of("2/3", "1/3"), HALF),
        (Posterior.of("1/3", "2/3"), HALF),
    ])


def c3_space() -> StateSpace:
    return StateSpace.theta_only(["0", "1"], [HALF, HALF])


def c3_spec() -> PosteriorMean:
    kappa_bar = ScalarDistribution.from_atoms([("1/4", HALF), ("3/4", HALF)])
    return PosteriorMean(c3_space().prior_theta(), (ZERO, ONE), kappa_bar)


def c3_frontier_gamma() -> BeliefDistribution:
    return BeliefDistribution.from_atoms([
        (Posterior.of("3/4", "1/4"), HALF),
        (Posterior.of("1/4", "3/4"), HALF),
    ])


def ternary_space() -> StateSpace:
    return StateSpace.theta_only(["0", "1", "2"], ["1/3"] * 3)


def ternary_spec() -> PosteriorMean:
    kappa_bar = ScalarDistribution.from_atoms([("1/2", HALF), ("3/2", HALF)])
    return PosteriorMean(ternary_space().prior_theta(), (ZERO, ONE, Fraction(2)), kappa_bar)


def expost_interval_spec() -> ExPost:
    """M = {ν : 1/3 <= ν(t1) <= 2/3} on a binary Θ with a uniform prior."""
    rows = LinearSystem.build(2, ineq=[([1, 0], "2/3"), ([-1, 0], "-1/3")])
    return ExPost(c2_space().prior_theta(), rows)


# -- random corpora --------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_simplex_point(rng: np.random.Generator, k: int, max_weight: int = 6) -> Vector:
    """An interior rational point of the k-simplex."""
    draws = [int(v) for v in rng.integers(1, max_weight + 1, size=k)]
    total = sum(draws)
    return tuple(Fraction(v, total) for v in draws)


def random_space(rng, max_types: int = 3, max_states: int = 6) -> StateSpace:
    rng = _rng(rng)
    k = int(rng.integers(1, max_types + 1))
    n = int(rng.integers(max(k, 2), max_states + 1))
    theta_map = list(range(k)) + [int(v) for v in rng.integers(0, k, size=n - k)]
    omega = [f"w{i}" for i in range(n)]
    theta = [f"t{j}" for j in range(k)]
    return StateSpace.from_labels(
        omega, theta, {w: theta[j] for w, j in zip(omega, theta_map)}, random_simplex_point(rng, n)
    )


def random_plausible_gamma(rng, prior: Posterior, max_atoms: int = 4) -> BeliefDistribution:
    """Split atoms of δ_prior along random integer directions until `max_atoms` is reached.

    Each split of ν with weight p in {1/4, 1/2, 3/4} moves to ν + (1-p)s·d and
    ν - p s·d, so the barycenter never changes.
    """
    rng = _rng(rng)
    atoms = [(prior, ONE)]
    k = prior.dim
    target = int(rng.integers(1, max_atoms + 1))
    attempts = 0
    while len(atoms) < target and attempts < 4 * max_atoms and k > 1:
        attempts += 1
        idx = int(rng.integers(0, len(atoms)))
        nu, q = atoms[idx]
        d = [int(v) for v in rng.integers(-2, 3, size=k)]
        d[-1] = -sum(d[:-1])
        if not any(d):
            continue
        p = Fraction(int(rng.integers(1, 4)), 4)
        limits = []
        for w, di in zip(nu.weights, d):
            if di > 0:
                limits.append(w / (p * di))
            elif di < 0:
                limits.append(w / ((1 - p) * -di))
        s = min(limits) * Fraction(int(rng.integers(1, 3)), 2)
        if s == 0:
            continue
        up = Posterior(tuple(w + (1 - p) * s * di for w, di in zip(nu.weights, d)))
        down = Posterior(tuple(w - p * s * di for w, di in zip(nu.weights, d)))
        atoms[idx:idx + 1] = [(up, q * p), (down, q * (1 - p))]
    return BeliefDistribution.from_atoms(atoms)


def random_merge_map(rng, num_atoms: int, width: Optional[int] = None) -> List[List[Fraction]]:
    """A row-stochastic rational matrix, num_atoms x width."""
    rng = _rng(rng)
    width = width or int(rng.integers(1, num_atoms + 1))
    rows = []
    for _ in range(num_atoms):
        draws = [int(v) for v in rng.integers(0, 4, size=width)]
        if not any(draws):
            draws[int(rng.integers(0, width))] = 1
        total = sum(draws)
        rows.append([Fraction(v, total) for v in draws])
    return rows


def random_polytope_spec(rng, prior: Posterior, num_rows: int = 3) -> ExPost:
    """Random half-spaces a·ν <= a·μ0 + slack, so μ0 stays inside."""
    rng = _rng(rng)
    k = prior.dim
    ineq = []
    for _ in range(num_rows):
        a = [Fraction(int(v)) for v in rng.integers(-3, 4, size=k)]
        slack = Fraction(int(rng.integers(0, 4)), 8)
        rhs = sum((ai * w for ai, w in zip(a, prior.weights)), ZERO) + slack
        ineq.append((a, rhs))
    return ExPost(prior, LinearSystem.build(k, ineq=ineq))


def random_scalar(rng, max_atoms: int = 5, spread: int = 5) -> ScalarDistribution:
    rng = _rng(rng)
    size = int(rng.integers(1, max_atoms + 1))
    values = [int(v) for v in rng.integers(-spread, spread + 1, size=size)]
    return ScalarDistribution.from_atoms(zip(values, random_simplex_point(rng, size)))


def random_lambda(rng) -> Fraction:
    """A rational λ in (1, 4)."""
    rng = _rng(rng)
    return Fraction(int(rng.integers(11, 40)), 10)


def garbled_scalar(rng, dist: ScalarDistribution) -> ScalarDistribution:
    """Pool random groups of atoms at their conditional means (a contraction of `dist`)."""
    rng = _rng(rng)
    groups = [int(v) for v in rng.integers(0, len(dist.atoms), size=len(dist.atoms))]
    pooled = []
    for g in sorted(set(groups)):
        members = [(v, q) for (v, q), h in zip(dist.atoms, groups) if h == g]
        mass = sum(q for _, q in members)
        pooled.append((sum(v * q for v, q in members) / mass, mass))
    return ScalarDistribution.from_atoms(pooled)
