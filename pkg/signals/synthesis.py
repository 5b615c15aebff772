"""Undominated privacy-constrained signals: a minimum-informative extension of a
frontier γ joined with conditionally revealing quantile signals.

Realizations of the second stage live on [0, 1]. A QuantileSignal stores, per
state, a piecewise-constant density on a shared rational grid; every integral
is an exact finite sum.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from lp.kernel import ONE, ZERO, RationalLike, Vector, as_rational, as_vector
from signals.beliefs import (
    BeliefDistribution,
    Posterior,
    SignalKernel,
    StateSpace,
    marginal_theta,
    marginal_theta_belief,
)
from signals.errors import InputError, RefusedError
from signals.extension import MinExtension, enumerate_min_extensions, verify_min_extension
from signals.frontiers import PrivacySpec

logger = logging.getLogger(__name__)

Interval = Tuple[Fraction, Fraction]
Assignment = Mapping[int, Sequence[Tuple[RationalLike, RationalLike]]]


@dataclass(frozen=True)
class QuantileSignal:
    """density[i][k] is the conditional density of the realization on cell k given ω_i."""

    space: StateSpace
    breakpoints: Vector
    density: Tuple[Vector, ...]

    def __post_init__(self):
        b = self.breakpoints
        if len(b) < 2 or b[0] != ZERO or b[-1] != ONE:
            raise InputError("breakpoints must run from 0 to 1")
        if any(x >= y for x, y in zip(b, b[1:])):
            raise InputError("breakpoints must be strictly increasing")
        if len(self.density) != self.space.num_states:
            raise InputError(f"density has {len(self.density)} rows, space has {self.space.num_states} states")
        for row in self.density:
            if len(row) != self.num_cells:
                raise InputError("every density row needs one entry per cell")
            if any(v < 0 for v in row):
                raise InputError("densities must be non-negative")

    @classmethod
    def build(
        cls,
        space: StateSpace,
        breakpoints: Sequence[RationalLike],
        density: Sequence[Sequence[RationalLike]],
    ) -> "QuantileSignal":
        return cls(space, as_vector(breakpoints), tuple(as_vector(row) for row in density))

    @property
    def num_cells(self) -> int:
        return len(self.breakpoints) - 1

    def lengths(self) -> Vector:
        return tuple(y - x for x, y in zip(self.breakpoints, self.breakpoints[1:]))

    def cell_of(self, start: Fraction, end: Fraction) -> int:
        """Index of the grid cell containing [start, end]."""
        for k in range(self.num_cells):
            if self.breakpoints[k] <= start and end <= self.breakpoints[k + 1]:
                return k
        raise InputError(f"[{start}, {end}] does not lie inside one cell")

    def marginal_density(self, mu: Posterior, theta: int) -> Vector:
        """Density of the realization given θ, per cell."""
        nu = marginal_theta(mu, self.space)
        block = self.space.block(theta)
        return tuple(
            sum((mu[i] / nu[theta] * self.density[i][k] for i in block), ZERO)
            for k in range(self.num_cells)
        )


def _check_space(q: QuantileSignal, mu: Posterior):
    if mu.dim != q.space.num_states:
        raise InputError(f"posterior has {mu.dim} coordinates, signal has {q.space.num_states} states")


def _active_types(q: QuantileSignal, mu: Posterior) -> List[int]:
    nu = marginal_theta(mu, q.space)
    return [j for j in range(q.space.num_types) if nu[j] > 0]


def quantile_signal(mu: Posterior, space: StateSpace) -> QuantileSignal:
    """Lay the states of every θ-block out as consecutive intervals of length μ(ω|θ)."""
    if mu.dim != space.num_states:
        raise InputError(f"posterior has {mu.dim} coordinates, space has {space.num_states} states")
    nu = marginal_theta(mu, space)
    intervals: Dict[int, Interval] = {}
    cuts = {ZERO, ONE}
    for j in range(space.num_types):
        if nu[j] == 0:
            continue
        start = ZERO
        for i in space.block(j):
            if mu[i] == 0:
                continue
            end = start + mu[i] / nu[j]
            intervals[i] = (start, end)
            cuts.add(end)
            start = end
    breakpoints = tuple(sorted(cuts))
    density = []
    for i in range(space.num_states):
        row = [ZERO] * (len(breakpoints) - 1)
        if i in intervals:
            start, end = intervals[i]
            height = ONE / (end - start)
            for k, (x, y) in enumerate(zip(breakpoints, breakpoints[1:])):
                if start <= x and y <= end:
                    row[k] = height
        density.append(tuple(row))
    return QuantileSignal(space, breakpoints, tuple(density))


def uninformative_signal(space: StateSpace) -> QuantileSignal:
    """Realization uniform on [0, 1] whatever the state."""
    return QuantileSignal(space, (ZERO, ONE), tuple((ONE,) for _ in range(space.num_states)))


def reorder(q: QuantileSignal, mu: Posterior, assignment: Assignment) -> QuantileSignal:
    """Move states to new interval sets within their θ-blocks.

    `assignment` maps a state index to the intervals it now occupies; states
    not mentioned keep their current cells. For every θ with positive mass the
    positive-mass states must tile [0, 1] and each must receive total length
    μ(ω|θ).
    """
    _check_space(q, mu)
    space = q.space
    nu = marginal_theta(mu, space)
    moved: Dict[int, List[Interval]] = {}
    for i, spans in assignment.items():
        if not 0 <= i < space.num_states:
            raise InputError(f"assignment names unknown state index {i}")
        rows = []
        for start, end in spans:
            start, end = as_rational(start), as_rational(end)
            if not ZERO <= start < end <= ONE:
                raise InputError(f"interval [{start}, {end}] is not a nonempty subinterval of [0, 1]")
            rows.append((start, end))
        length = sum((end - start for start, end in rows), ZERO)
        j = space.theta_map[i]
        expected = mu[i] / nu[j] if nu[j] > 0 else ZERO
        if length != expected:
            raise InputError(
                f"state {space.omega_labels[i]} gets length {length}, expected {expected}"
            )
        moved[i] = rows
    cuts = set(q.breakpoints)
    for rows in moved.values():
        for start, end in rows:
            cuts.update((start, end))
    grid = tuple(sorted(cuts))
    cells = list(zip(grid, grid[1:]))
    density = []
    for i in range(space.num_states):
        if i in moved:
            j = space.theta_map[i]
            height = nu[j] / mu[i] if mu[i] > 0 else ZERO
            row = tuple(
                height if any(s <= x and y <= e for s, e in moved[i]) else ZERO for x, y in cells
            )
        else:
            row = tuple(q.density[i][q.cell_of(x, y)] for x, y in cells)
        density.append(row)
    result = QuantileSignal(space, grid, tuple(density))
    for j in _active_types(result, mu):
        for k in range(result.num_cells):
            owners = [i for i in space.block(j) if mu[i] > 0 and result.density[i][k] > 0]
            if len(owners) != 1:
                raise InputError(
                    f"intervals of {space.theta_labels[j]} do not tile [0, 1] near {grid[k]}"
                )
    logger.debug("reordered %d states onto a %d-cell grid", len(moved), result.num_cells)
    return result


def normalization_check(q: QuantileSignal, mu: Posterior) -> bool:
    """Every positive-mass state's density integrates to one."""
    _check_space(q, mu)
    lengths = q.lengths()
    return all(
        sum((d * h for d, h in zip(q.density[i], lengths)), ZERO) == ONE
        for i in range(q.space.num_states)
        if mu[i] > 0
    )


def uniform_marginal_check(q: QuantileSignal, mu: Posterior) -> bool:
    """Given every positive-mass θ, the realization is uniform on [0, 1]."""
    _check_space(q, mu)
    return all(
        all(v == ONE for v in q.marginal_density(mu, j)) for j in _active_types(q, mu)
    )


def conditional_privacy_check(q: QuantileSignal, mu: Posterior) -> bool:
    """The marginal density given θ is the same for every positive-mass θ on every cell."""
    _check_space(q, mu)
    marginals = {q.marginal_density(mu, j) for j in _active_types(q, mu)}
    return len(marginals) <= 1


def conditionally_revealing_check(q: QuantileSignal, mu: Posterior) -> bool:
    """On every cell, θ and the realization together pin down ω."""
    _check_space(q, mu)
    for j in _active_types(q, mu):
        for k in range(q.num_cells):
            owners = [i for i in q.space.block(j) if mu[i] > 0 and q.density[i][k] > 0]
            if len(owners) > 1:
                return False
    return True


@dataclass(frozen=True)
class CompositeSignal:
    """Stage one reveals the extension atom n; stage two draws from branch n."""

    extension: MinExtension
    branch_signals: Tuple[QuantileSignal, ...]

    def __post_init__(self):
        if len(self.branch_signals) != len(self.extension.extended_atoms):
            raise InputError("composite needs one branch per extended atom")
        if any(q.space != self.extension.space for q in self.branch_signals):
            raise InputError("branches must share the extension's state space")

    @property
    def space(self) -> StateSpace:
        return self.extension.space

    def first_stage_kernel(self) -> SignalKernel:
        """p(n | ω) = τ_γ(n) μ_n(ω) / μ0(ω)."""
        space = self.space
        probs = self.extension.gamma.probs
        atoms = self.extension.extended_atoms
        rows = [
            [q * mu[i] / space.prior[i] for mu, q in zip(atoms, probs)]
            for i in range(space.num_states)
        ]
        return SignalKernel.build([f"n{n}" for n in range(len(atoms))], rows)


def synthesize(
    gamma_frontier: BeliefDistribution,
    spec: PrivacySpec,
    space: StateSpace,
    extension_choice: int = 0,
    reorderings: Optional[Mapping[int, Assignment]] = None,
) -> CompositeSignal:
    """Build the composite signal for a frontier γ.

    Raises RefusedError naming the failing check when γ is not permissible or
    not on the spec's frontier.
    """
    if not spec.permits(gamma_frontier):
        raise RefusedError("gamma is not privacy-permissible", check="permissible")
    if not spec.on_frontier(gamma_frontier):
        raise RefusedError("gamma is not on the privacy frontier", check="frontier_membership")
    extensions = enumerate_min_extensions(gamma_frontier, space)
    if not 0 <= extension_choice < len(extensions):
        raise InputError(
            f"extension index {extension_choice} out of range; {len(extensions)} vertex extensions exist"
        )
    extension = extensions[extension_choice]
    reorderings = reorderings or {}
    unknown = [n for n in reorderings if not 0 <= n < len(extension.extended_atoms)]
    if unknown:
        raise InputError(f"reorderings name unknown branches {unknown}")
    branches = []
    for n, mu in enumerate(extension.extended_atoms):
        q = quantile_signal(mu, space)
        if n in reorderings:
            q = reorder(q, mu, reorderings[n])
        branches.append(q)
    logger.info("synthesized %d branches from extension %d of %d", len(branches), extension_choice, len(extensions))
    return CompositeSignal(extension, tuple(branches))


def branch_cell_posteriors(c: CompositeSignal) -> List[Tuple[int, int, Posterior, Fraction]]:
    """(branch, cell, posterior over Ω, probability) for every cell the branch can produce."""
    out = []
    ext = c.extension
    for n, (mu, prob, q) in enumerate(zip(ext.extended_atoms, ext.gamma.probs, c.branch_signals)):
        for k, length in enumerate(q.lengths()):
            joint = [mu[i] * q.density[i][k] for i in range(c.space.num_states)]
            total = sum(joint, ZERO)
            if total == 0:
                continue
            out.append((n, k, Posterior(tuple(v / total for v in joint)), prob * length * total))
    return out


def composite_belief_distribution(c: CompositeSignal) -> BeliefDistribution:
    return BeliefDistribution.from_atoms((mu, p) for _, _, mu, p in branch_cell_posteriors(c))


def undominated_report(c: CompositeSignal, spec: PrivacySpec) -> Dict[str, bool]:
    """Named checks behind verify_undominated, in evaluation order."""
    ext = c.extension
    report: Dict[str, bool] = {
        "extension_is_minimal": verify_min_extension(ext.tau, ext.gamma, c.space),
    }
    try:
        c.first_stage_kernel()
        report["first_stage_stochastic"] = True
    except InputError:
        report["first_stage_stochastic"] = False
    for n, (mu, q) in enumerate(zip(ext.extended_atoms, c.branch_signals)):
        report[f"branch_{n}_normalized"] = normalization_check(q, mu)
        report[f"branch_{n}_uniform_marginal"] = uniform_marginal_check(q, mu)
        report[f"branch_{n}_conditionally_private"] = conditional_privacy_check(q, mu)
        report[f"branch_{n}_conditionally_revealing"] = conditionally_revealing_check(q, mu)
    if all(report.values()):
        cells = branch_cell_posteriors(c)
        report["cell_posteriors_keep_branch_marginal"] = all(
            marginal_theta(mu, c.space) == ext.gamma.posteriors[n] for n, _, mu, _ in cells
        )
        gamma_out = marginal_theta_belief(composite_belief_distribution(c), c.space)
        report["composite_reproduces_gamma"] = gamma_out == ext.gamma
        report["frontier_membership"] = spec.on_frontier(gamma_out)
    else:
        report["cell_posteriors_keep_branch_marginal"] = False
        report["composite_reproduces_gamma"] = False
        report["frontier_membership"] = False
    return report


def verify_undominated(c: CompositeSignal, spec: PrivacySpec) -> bool:
    return all(undominated_report(c, spec).values())
