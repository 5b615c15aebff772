"""Minimum-informative extensions of a distribution of posteriors about privacy.

An extension assigns, to every atom ν_n of γ, a conditional μ_n(ω | θ) on
each privacy block; the full-state posterior is then
μ_n(ω) = ν_n(θ̃(ω)) · μ_n(ω | θ̃(ω)). The conditionals are constrained so that
the weighted conditionals average back to the prior conditional, and every
conditional is a non-negative probability vector on its block.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from lp.kernel import ONE, ZERO, LinearSystem, RationalLike, Vector, as_vector, enumerate_vertices, feasible_point
from signals.beliefs import (
    BeliefDistribution,
    Posterior,
    StateSpace,
    bayes_plausible,
    marginal_theta,
    marginal_theta_belief,
)
from signals.errors import InfeasibleError, InputError, NotBayesPlausibleError

logger = logging.getLogger(__name__)


def _check_gamma(gamma: BeliefDistribution, space: StateSpace):
    if gamma.dim != space.num_types:
        raise InputError(f"gamma lives on {gamma.dim} privacy values, space has {space.num_types}")
    if not bayes_plausible(gamma, space.prior_theta()):
        raise NotBayesPlausibleError(
            f"gamma averages to {gamma.mean()}, not the prior {space.prior_theta()}; no extension exists"
        )


def _variables(gamma: BeliefDistribution, space: StateSpace) -> List[Tuple[int, int]]:
    """(atom, state) pairs whose conditional matters: ν_n(θ̃(ω_i)) > 0."""
    return [
        (n, i)
        for n, nu in enumerate(gamma.posteriors)
        for i in range(space.num_states)
        if nu[space.theta_map[i]] > 0
    ]


def _clear_denominators(coeffs: Sequence[Fraction], rhs: Fraction) -> Tuple[List[Fraction], Fraction]:
    """Scale a row to coprime integer coefficients."""
    scale = 1
    for v in list(coeffs) + [rhs]:
        scale = scale * v.denominator // gcd(scale, v.denominator)
    ints = [int(v * scale) for v in coeffs] + [int(rhs * scale)]
    common = 0
    for v in ints:
        common = gcd(common, abs(v))
    common = common or 1
    return [Fraction(v, common) for v in ints[:-1]], Fraction(ints[-1], common)


def build_extension_system(gamma: BeliefDistribution, space: StateSpace) -> LinearSystem:
    """The extension polytope over the conditionals μ_n(ω_i | θ̃(ω_i)).

    Variables are ordered atom-major, then by state index; conditionals on
    blocks the atom does not reach are eliminated.
    """
    _check_gamma(gamma, space)
    variables = _variables(gamma, space)
    index = {v: k for k, v in enumerate(variables)}
    num_vars = len(variables)
    eq = []
    for i in range(space.num_states):
        j = space.theta_map[i]
        row = [ZERO] * num_vars
        for n, (nu, q) in enumerate(gamma):
            if (n, i) in index:
                row[index[(n, i)]] = q * nu[j]
        eq.append(_clear_denominators(row, space.prior[i]))
    for n, nu in enumerate(gamma.posteriors):
        for j in range(space.num_types):
            if nu[j] == 0:
                continue
            row = [ZERO] * num_vars
            for i in space.block(j):
                row[index[(n, i)]] = ONE
            eq.append((row, ONE))
    logger.debug("extension system: %d atoms, %d variables, %d rows", len(gamma), num_vars, len(eq))
    return LinearSystem.nonnegative(num_vars, eq=eq)


@dataclass(frozen=True)
class MinExtension:
    """τ_γ: one full-state posterior per atom of γ, in γ's atom order.

    cond[n][i] is μ_n(ω_i | θ̃(ω_i)); blocks an atom does not reach carry the
    prior conditional.
    """

    gamma: BeliefDistribution
    space: StateSpace
    cond: Tuple[Vector, ...]
    extended_atoms: Tuple[Posterior, ...]

    @classmethod
    def from_conditionals(
        cls,
        gamma: BeliefDistribution,
        space: StateSpace,
        cond: Sequence[Sequence[RationalLike]],
    ) -> "MinExtension":
        """Build the extended atoms from a conditional table after checking it is stochastic."""
        if gamma.dim != space.num_types:
            raise InputError("gamma and space disagree on the number of privacy values")
        table = tuple(as_vector(row) for row in cond)
        if len(table) != len(gamma) or any(len(row) != space.num_states for row in table):
            raise InputError("conditional table must have one row per atom and one entry per state")
        for n, row in enumerate(table):
            if any(v < 0 for v in row):
                raise InputError(f"negative conditional in atom {n}")
            for j in range(space.num_types):
                if sum(row[i] for i in space.block(j)) != ONE:
                    raise InputError(f"conditionals of atom {n} on {space.theta_labels[j]} do not sum to 1")
        atoms = tuple(
            Posterior(tuple(nu[space.theta_map[i]] * row[i] for i in range(space.num_states)))
            for nu, row in zip(gamma.posteriors, table)
        )
        return cls(gamma, space, table, atoms)

    def conditional(self, n: int, i: int, j: int) -> Fraction:
        """μ_n(ω_i | θ_j); zero off the block of θ̃(ω_i)."""
        return self.cond[n][i] if self.space.theta_map[i] == j else ZERO

    @property
    def tau(self) -> BeliefDistribution:
        return BeliefDistribution.from_atoms(zip(self.extended_atoms, self.gamma.probs))

    def residuals(self) -> List[Fraction]:
        """Prior-recovery residual per state: Σ_n γ_n ν_n(θ̃(ω_i)) μ_n(ω_i|θ̃(ω_i)) - μ0(ω_i)."""
        out = []
        for i in range(self.space.num_states):
            j = self.space.theta_map[i]
            total = sum(
                (q * nu[j] * self.cond[n][i] for n, (nu, q) in enumerate(self.gamma)),
                ZERO,
            )
            out.append(total - self.space.prior[i])
        return out

    def invariant_report(self) -> Dict[str, bool]:
        marginals = [marginal_theta(mu, self.space) for mu in self.extended_atoms]
        return {
            "atoms_match_conditionals": all(
                mu[i] == nu[self.space.theta_map[i]] * self.cond[n][i]
                for n, (mu, nu) in enumerate(zip(self.extended_atoms, self.gamma.posteriors))
                for i in range(self.space.num_states)
            ),
            "prior_recovered": all(r == 0 for r in self.residuals()),
            "conditionals_sum_to_one": all(
                sum(row[i] for i in self.space.block(j)) == ONE
                for row in self.cond
                for j in range(self.space.num_types)
            ),
            "nonnegative": all(v >= 0 for row in self.cond for v in row),
            "theta_marginals_match": marginals == list(self.gamma.posteriors),
            "injective": len(set(self.extended_atoms)) == len(self.extended_atoms),
        }


def _from_point(gamma: BeliefDistribution, space: StateSpace, point: Sequence[Fraction]) -> MinExtension:
    values = dict(zip(_variables(gamma, space), point))
    cond = [
        [values.get((n, i), space.prior_conditional(i)) for i in range(space.num_states)]
        for n in range(len(gamma))
    ]
    return MinExtension.from_conditionals(gamma, space, cond)


def solve_min_extension(gamma: BeliefDistribution, space: StateSpace) -> MinExtension:
    """The lexicographically least extension."""
    system = build_extension_system(gamma, space)
    point = feasible_point(system)
    if point is None:
        raise InfeasibleError("no minimum-informative extension exists")
    return _from_point(gamma, space, point)


def enumerate_min_extensions(gamma: BeliefDistribution, space: StateSpace) -> List[MinExtension]:
    """Every vertex of the extension polytope, in lexicographic order of the conditionals.

    Interior extensions are convex combinations of these and are not listed.
    """
    system = build_extension_system(gamma, space)
    vertices = enumerate_vertices(system)
    if not vertices:
        raise InfeasibleError("no minimum-informative extension exists")
    logger.debug("extension polytope has %d vertices", len(vertices))
    return [_from_point(gamma, space, v) for v in vertices]


def verify_min_extension(tau: BeliefDistribution, gamma: BeliefDistribution, space: StateSpace) -> bool:
    """τ^θ = γ and no two atoms of τ share a θ-marginal."""
    if tau.dim != space.num_states:
        raise InputError(f"tau lives on {tau.dim} states, space has {space.num_states}")
    if marginal_theta_belief(tau, space) != gamma:
        return False
    marginals = [marginal_theta(mu, space) for mu in tau.posteriors]
    return len(set(marginals)) == len(marginals)


def split_atom(
    tau: BeliefDistribution, space: StateSpace, index: Optional[int] = None
) -> Optional[BeliefDistribution]:
    """Spread one atom into two posteriors with the same θ-marginal.

    The split moves mass between the first two positive-mass states of one
    privacy block, half of the atom's probability on each side. Returns None
    when no atom (or the requested atom) has such a pair.
    """
    candidates = range(len(tau)) if index is None else [index]
    for n in candidates:
        mu, q = tau.atoms[n]
        for j in range(space.num_types):
            active = [i for i in space.block(j) if mu[i] > 0]
            if len(active) < 2:
                continue
            a, b = active[0], active[1]
            t = min(mu[a], mu[b]) / 2
            up = list(mu.weights)
            down = list(mu.weights)
            up[a] += t
            up[b] -= t
            down[a] -= t
            down[b] += t
            pairs = [atom for k, atom in enumerate(tau.atoms) if k != n]
            pairs += [(Posterior(tuple(up)), q / 2), (Posterior(tuple(down)), q / 2)]
            return BeliefDistribution.from_atoms(pairs)
    return None
