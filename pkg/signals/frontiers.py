"""Privacy-permissible sets and their Blackwell frontiers.

Four families of constraints on the distribution γ of posteriors about θ:

* SingleBound: γ must be a garbling of a fixed bound γ̄.
* ExPost: every posterior about θ lies in a polytope M ∋ μ0^θ.
* Inferential: every posterior moves the likelihood of any privacy event by a
  factor of at most λ = e^ε relative to the prior.
* PosteriorMean: the distribution of E_ν[f] must be a mean-preserving
  contraction of a cap κ̄.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

from config import AppConfig
from lp.kernel import (
    ONE,
    ZERO,
    LinearSystem,
    RationalLike,
    Vector,
    as_rational,
    as_vector,
    enumerate_vertices,
    feasible_point,
    is_extreme_point,
)
from signals.beliefs import BeliefDistribution, Posterior, bayes_plausible
from signals.blackwell import ScalarDistribution, check_mps, mps_1d_check
from signals.errors import InfeasibleError, InputError

logger = logging.getLogger(__name__)


def _check_dim(gamma: BeliefDistribution, prior_theta: Posterior):
    if gamma.dim != prior_theta.dim:
        raise InputError(f"gamma lives on {gamma.dim} privacy values, the prior on {prior_theta.dim}")


@dataclass(frozen=True)
class SingleBound:
    prior_theta: Posterior
    bound: BeliefDistribution

    def __post_init__(self):
        _check_dim(self.bound, self.prior_theta)
        if not bayes_plausible(self.bound, self.prior_theta):
            raise InputError("single bound must average to the prior over privacy values")

    def permits(self, gamma: BeliefDistribution) -> bool:
        _check_dim(gamma, self.prior_theta)
        return check_mps(self.bound, gamma, lexicographic=False) is not None

    def on_frontier(self, gamma: BeliefDistribution) -> bool:
        # mutual spreads of finite distributions coincide
        return gamma == self.bound


@dataclass(frozen=True)
class ExPost:
    """`constraints` are rows over Θ-coordinates; the simplex rows are added by `region()`."""

    prior_theta: Posterior
    constraints: LinearSystem

    def __post_init__(self):
        if self.constraints.num_vars != self.prior_theta.dim:
            raise InputError(
                f"ex-post rows have {self.constraints.num_vars} coefficients, "
                f"expected {self.prior_theta.dim}"
            )
        if not self.region().satisfied_by(self.prior_theta.weights):
            raise InputError("ex-post region must contain the prior over privacy values")

    def region(self) -> LinearSystem:
        c = self.constraints
        lower = tuple(ZERO if lo is None or lo < 0 else lo for lo in c.lower)
        simplex = ((tuple(ONE for _ in range(c.num_vars)), ONE),)
        return LinearSystem(c.num_vars, c.eq_rows + simplex, c.ineq_rows, lower, c.upper)

    def admits(self, nu: Posterior) -> bool:
        return self.region().satisfied_by(nu.weights)

    def permits(self, gamma: BeliefDistribution) -> bool:
        _check_dim(gamma, self.prior_theta)
        region = self.region()
        return all(region.satisfied_by(nu.weights) for nu in gamma.posteriors)

    def on_frontier(self, gamma: BeliefDistribution) -> bool:
        if not self.permits(gamma):
            return False
        region = self.region()
        return all(is_extreme_point(region, nu.weights) for nu in gamma.posteriors)


@dataclass(frozen=True)
class Inferential:
    """ε-inferential privacy with λ = e^ε supplied as an exact rational."""

    prior_theta: Posterior
    lam: Fraction

    def __post_init__(self):
        if any(p <= 0 for p in self.prior_theta.weights):
            raise InputError("inferential privacy needs an interior prior over privacy values")
        if self.lam < 1:
            raise InputError(f"lambda must be at least 1, got {self.lam}")

    def ratios(self, nu: Posterior) -> Vector:
        """r(θ) = ν(θ) / μ0^θ(θ)."""
        return tuple(v / p for v, p in zip(nu.weights, self.prior_theta.weights))

    def admits(self, nu: Posterior) -> bool:
        r = self.ratios(nu)
        return max(r) <= self.lam * min(r)

    def permits(self, gamma: BeliefDistribution) -> bool:
        _check_dim(gamma, self.prior_theta)
        return all(self.admits(nu) for nu in gamma.posteriors)

    def region(self) -> LinearSystem:
        """The admissible posteriors as a polytope: r(a) <= λ r(b) for every ordered pair."""
        k = self.prior_theta.dim
        ineq = []
        for a in range(k):
            for b in range(k):
                if a == b:
                    continue
                row = [ZERO] * k
                row[a] = ONE / self.prior_theta[a]
                row[b] = -self.lam / self.prior_theta[b]
                ineq.append((row, ZERO))
        return LinearSystem.build(k, eq=[([1] * k, 1)], ineq=ineq, lower=[0] * k)

    def on_frontier(self, gamma: BeliefDistribution) -> bool:
        return inferential_frontier_membership(gamma, self.prior_theta, self.lam)


@dataclass(frozen=True)
class PosteriorMean:
    prior_theta: Posterior
    f_values: Vector
    kappa_bar: ScalarDistribution

    def __post_init__(self):
        if len(self.f_values) != self.prior_theta.dim:
            raise InputError(f"f has {len(self.f_values)} values, expected {self.prior_theta.dim}")
        if not mps_1d_check(self.full_information(), self.kappa_bar):
            raise InputError("kappa_bar must be a mean-preserving contraction of the full-information mean")

    def full_information(self) -> ScalarDistribution:
        """ν0^f: the distribution of f(θ) under the prior."""
        return ScalarDistribution.from_atoms(zip(self.f_values, self.prior_theta.weights))

    def permits(self, gamma: BeliefDistribution) -> bool:
        _check_dim(gamma, self.prior_theta)
        return mps_1d_check(self.kappa_bar, kappa_of(gamma, self.f_values))

    def on_frontier(self, gamma: BeliefDistribution) -> bool:
        return posterior_mean_frontier_check(gamma, self)


PrivacySpec = Union[SingleBound, ExPost, Inferential, PosteriorMean]


def permissible(gamma: BeliefDistribution, spec: PrivacySpec) -> bool:
    return spec.permits(gamma)


def on_frontier(gamma: BeliefDistribution, spec: PrivacySpec) -> bool:
    """Frontier membership under the spec's own characterization."""
    return spec.on_frontier(gamma)


def kappa_of(gamma: BeliefDistribution, f_values: Sequence[RationalLike]) -> ScalarDistribution:
    """κ_γ: the distribution of posterior means of f."""
    f = as_vector(f_values)
    if len(f) != gamma.dim:
        raise InputError(f"f has {len(f)} values, gamma lives on {gamma.dim}")
    return ScalarDistribution.from_atoms(
        (sum((v * w for v, w in zip(f, nu.weights)), ZERO), q) for nu, q in gamma
    )


# -- ex-post ---------------------------------------------------------------


def expost_frontier_support(spec: ExPost) -> List[Posterior]:
    """ext M, in lexicographic order."""
    vertices = enumerate_vertices(spec.region())
    if not vertices:
        raise InputError("ex-post region is empty")
    return [Posterior(v) for v in vertices]


def frontier_distribution(support: Sequence[Posterior], prior_theta: Posterior) -> BeliefDistribution:
    """A Bayes-plausible γ on `support` with lexicographically least weights."""
    if not support:
        raise InputError("frontier support is empty")
    if any(nu.dim != prior_theta.dim for nu in support):
        raise InputError("support points and prior live on different simplices")
    n = len(support)
    eq = [([ONE] * n, ONE)]
    for j in range(prior_theta.dim):
        eq.append(([nu[j] for nu in support], prior_theta[j]))
    weights = feasible_point(LinearSystem.nonnegative(n, eq=eq))
    if weights is None:
        raise InfeasibleError("prior is not representable as a mixture of the frontier support")
    return BeliefDistribution.from_atoms(zip(support, weights))


def spread_to_extreme_points(gamma: BeliefDistribution, spec: ExPost) -> BeliefDistribution:
    """Replace every non-extreme atom by a mixture of vertices of M averaging to it."""
    if not spec.permits(gamma):
        raise InputError("gamma has an atom outside the ex-post region")
    region = spec.region()
    vertices = None
    pairs: List[Tuple[Posterior, Fraction]] = []
    for nu, q in gamma:
        if is_extreme_point(region, nu.weights):
            pairs.append((nu, q))
            continue
        if vertices is None:
            vertices = expost_frontier_support(spec)
        for vertex, w in frontier_distribution(vertices, nu):
            pairs.append((vertex, q * w))
    return BeliefDistribution.from_atoms(pairs)


# -- inferential -----------------------------------------------------------


@dataclass(frozen=True)
class InferentialExtremePoint:
    subset_E: Tuple[int, ...]
    posterior: Posterior


def dichotomy_point(prior_theta: Posterior, lam: RationalLike, subset: Sequence[int]) -> Posterior:
    """ν(θ) = λ^[θ∈E] μ0^θ(θ) / (λ μ0^θ(E) + 1 - μ0^θ(E))."""
    lam = as_rational(lam)
    members = set(subset)
    mass = sum((prior_theta[j] for j in members), ZERO)
    denom = lam * mass + 1 - mass
    return Posterior(tuple(
        (lam if j in members else ONE) * p / denom for j, p in enumerate(prior_theta.weights)
    ))


def inferential_frontier_support(prior_theta: Posterior, lam: RationalLike) -> List[InferentialExtremePoint]:
    """One dichotomy point per proper nonempty E ⊂ Θ, by subset size then index order."""
    lam = as_rational(lam)
    if lam <= 1:
        raise InputError(f"inferential frontier needs lambda > 1, got {lam}")
    k = prior_theta.dim
    points = []
    for size in range(1, k):
        for subset in combinations(range(k), size):
            mass = sum((prior_theta[j] for j in subset), ZERO)
            if 0 < mass < 1:
                points.append(InferentialExtremePoint(subset, dichotomy_point(prior_theta, lam, subset)))
    logger.debug("inferential frontier: %d dichotomy points for lambda=%s", len(points), lam)
    return points


def inferential_frontier_membership(gamma: BeliefDistribution, prior_theta: Posterior, lam: RationalLike) -> bool:
    """True iff every atom of γ is a dichotomy point (or γ = δ_prior when none exist)."""
    lam = as_rational(lam)
    _check_dim(gamma, prior_theta)
    if lam == 1:
        return gamma == BeliefDistribution.delta(prior_theta)
    points = {p.posterior for p in inferential_frontier_support(prior_theta, lam)}
    if not points:
        # a single privacy value has no proper event to tilt
        return gamma == BeliefDistribution.delta(prior_theta)
    return all(nu in points for nu in gamma.posteriors)


def inferential_split(
    nu: Posterior, subset_F: Sequence[int], delta: RationalLike
) -> Tuple[Tuple[Posterior, Fraction], Tuple[Posterior, Fraction]]:
    """Split ν by tilting the mass of F up and down by a factor 1 ± δ.

    Returns (ν1, ½(1 + δν(F))) and (ν2, ½(1 - δν(F))); the pair averages back to ν.
    """
    delta = as_rational(delta)
    members = set(subset_F)
    mass = sum((nu[j] for j in members), ZERO)
    if not 0 < mass < 1:
        raise InputError("split set must carry mass strictly between 0 and 1")
    if not 0 < delta < 1:
        raise InputError("split size must lie in (0, 1)")
    halves = []
    for sign in (ONE, -ONE):
        tilt = 1 + sign * delta
        denom = 1 + sign * delta * mass
        weights = tuple((tilt if j in members else ONE) * w / denom for j, w in enumerate(nu.weights))
        halves.append((Posterior(weights), denom / 2))
    return halves[0], halves[1]


def _split_set(spec: Inferential, nu: Posterior) -> Tuple[int, ...]:
    r = spec.ratios(nu)
    levels = sorted(set(r))
    if len(levels) == 1:
        return (0,)
    if len(levels) == 2:
        return tuple(j for j, v in enumerate(r) if v == levels[-1])
    return tuple(j for j, v in enumerate(r) if levels[0] < v < levels[-1])


def inferential_counterexample(gamma: BeliefDistribution, spec: Inferential) -> Optional[BeliefDistribution]:
    """A permissible γ' strictly dominating γ, or None when γ is on the frontier.

    The first atom that is not a dichotomy point is split; the split size is
    halved from 1/2 until both halves are admissible.
    """
    if not spec.permits(gamma):
        raise InputError("counterexample search needs a permissible gamma")
    if spec.lam == 1:
        return None
    frontier = {p.posterior for p in inferential_frontier_support(spec.prior_theta, spec.lam)}
    if not frontier:
        return None
    for n, (nu, q) in enumerate(gamma):
        if nu in frontier:
            continue
        subset = _split_set(spec, nu)
        delta = Fraction(1, 2)
        for _ in range(AppConfig.SPLIT_HALVINGS):
            (nu1, p1), (nu2, p2) = inferential_split(nu, subset, delta)
            if spec.admits(nu1) and spec.admits(nu2):
                logger.debug("split atom %d on %s with delta=%s", n, subset, delta)
                rest = [atom for k, atom in enumerate(gamma.atoms) if k != n]
                return BeliefDistribution.from_atoms(rest + [(nu1, q * p1), (nu2, q * p2)])
            delta /= 2
        logger.warning("no admissible split of atom %d within %d halvings", n, AppConfig.SPLIT_HALVINGS)
    return None


# -- posterior mean --------------------------------------------------------


def posterior_mean_frontier_check(gamma: BeliefDistribution, spec: PosteriorMean) -> bool:
    _check_dim(gamma, spec.prior_theta)
    for nu in gamma.posteriors:
        support = nu.support()
        if len(support) > 2:
            return False
        if len(support) == 2 and spec.f_values[support[0]] == spec.f_values[support[1]]:
            return False
    return kappa_of(gamma, spec.f_values) == spec.kappa_bar


def _two_point_menu(spec: PosteriorMean, y: Fraction) -> List[Posterior]:
    """Point masses with f(θ) = y, then every bracketing pair mixed to mean y."""
    f = spec.f_values
    k = len(f)
    menu = [Posterior.point_mass(k, j) for j in range(k) if f[j] == y]
    for a, b in combinations(range(k), 2):
        lo, hi = (a, b) if f[a] < f[b] else (b, a)
        if not f[lo] < y < f[hi]:
            continue
        alpha = (f[hi] - y) / (f[hi] - f[lo])
        weights = [ZERO] * k
        weights[lo] = alpha
        weights[hi] = 1 - alpha
        menu.append(Posterior(tuple(weights)))
    return menu


def posterior_mean_frontier_construct(spec: PosteriorMean) -> BeliefDistribution:
    """The lexicographically least γ built from the two-point menu with κ_γ = κ̄."""
    menus = [(y, q, _two_point_menu(spec, y)) for y, q in spec.kappa_bar.atoms]
    for y, _, menu in menus:
        if not menu:
            raise InfeasibleError(f"frontier not attainable with two-point menu: no posterior has mean {y}")
    columns = [(block, nu) for block, (_, _, menu) in enumerate(menus) for nu in menu]
    n = len(columns)
    eq = []
    for block, (_, q, _) in enumerate(menus):
        eq.append(([ONE if b == block else ZERO for b, _ in columns], q))
    for j in range(spec.prior_theta.dim):
        eq.append(([nu[j] for _, nu in columns], spec.prior_theta[j]))
    weights = feasible_point(LinearSystem.nonnegative(n, eq=eq))
    if weights is None:
        raise InfeasibleError("frontier not attainable with two-point menu")
    logger.debug("posterior-mean menu: %d columns over %d atoms of kappa_bar", n, len(menus))
    return BeliefDistribution.from_atoms((nu, w) for (_, nu), w in zip(columns, weights))


# -- dispatch --------------------------------------------------------------


def canonical_frontier(spec: PrivacySpec) -> Tuple[List[Posterior], BeliefDistribution]:
    """Frontier support points and one deterministic frontier γ for the spec."""
    if isinstance(spec, SingleBound):
        return list(spec.bound.posteriors), spec.bound
    if isinstance(spec, ExPost):
        support = expost_frontier_support(spec)
        return support, frontier_distribution(support, spec.prior_theta)
    if isinstance(spec, Inferential):
        support = []
        if spec.lam > 1:
            support = [p.posterior for p in inferential_frontier_support(spec.prior_theta, spec.lam)]
        if not support:
            return [spec.prior_theta], BeliefDistribution.delta(spec.prior_theta)
        return support, frontier_distribution(support, spec.prior_theta)
    if isinstance(spec, PosteriorMean):
        gamma = posterior_mean_frontier_construct(spec)
        return list(gamma.posteriors), gamma
    raise InputError(f"unknown privacy spec {type(spec).__name__}")
