"""Blackwell comparisons between finite belief distributions.

Dominance is decided by dilation feasibility: τ ⪰ τ' iff a kernel K maps each
atom of τ' to a distribution over the atoms of τ whose barycenter is that atom
and whose mixture under τ' reproduces τ.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from config import AppConfig
from lp.kernel import ONE, ZERO, LinearSystem, RationalLike, as_rational, feasible_point
from signals.beliefs import BeliefDistribution, Posterior, barycenter
from signals.errors import InputError, InvariantBreach

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dilation:
    """rows[s] lists (target index, weight) pairs with positive weight, sorted by target."""

    rows: Tuple[Tuple[Tuple[int, Fraction], ...], ...]

    def __post_init__(self):
        for row in self.rows:
            if any(w < 0 for _, w in row):
                raise InputError("dilation weights must be non-negative")
            if sum(w for _, w in row) != ONE:
                raise InputError("every dilation row must sum to 1")

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[RationalLike]]) -> "Dilation":
        return cls(tuple(
            tuple((t, as_rational(w)) for t, w in enumerate(row) if as_rational(w) != 0)
            for row in matrix
        ))

    @classmethod
    def identity(cls, size: int) -> "Dilation":
        return cls(tuple(((s, ONE),) for s in range(size)))

    def weight(self, source: int, target: int) -> Fraction:
        return dict(self.rows[source]).get(target, ZERO)

    def then(self, other: "Dilation") -> "Dilation":
        """Compose: first self (X -> Y), then other (Y -> Z)."""
        composed = []
        for row in self.rows:
            acc: Dict[int, Fraction] = {}
            for mid, w in row:
                for target, v in other.rows[mid]:
                    acc[target] = acc.get(target, ZERO) + w * v
            composed.append(tuple(sorted((t, w) for t, w in acc.items() if w)))
        return Dilation(tuple(composed))

    def is_valid(self, spread: BeliefDistribution, contraction: BeliefDistribution) -> bool:
        """Exact re-verification: barycenters preserved and the mixture equals `spread`."""
        if len(self.rows) != len(contraction):
            return False
        targets = spread.posteriors
        if any(t >= len(targets) for row in self.rows for t, _ in row):
            return False
        for (source, _), row in zip(contraction, self.rows):
            if barycenter((targets[t], w) for t, w in row) != source.weights:
                return False
        mixture = [ZERO] * len(spread)
        for (_, q), row in zip(contraction, self.rows):
            for t, w in row:
                mixture[t] += q * w
        return tuple(mixture) == spread.probs


class Relation(str, Enum):
    DOMINATES = "dominates"
    DOMINATED = "dominated"
    EQUIVALENT = "equivalent"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class DominanceResult:
    """`witness_forward` spreads b into a (a ⪰ b); `witness_backward` spreads a into b."""

    relation: Relation
    witness_forward: Optional[Dilation] = None
    witness_backward: Optional[Dilation] = None


@dataclass(frozen=True)
class ScalarDistribution:
    """Finite distribution on the real line: strictly increasing values, positive probabilities."""

    atoms: Tuple[Tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if not self.atoms:
            raise InputError("a scalar distribution needs at least one atom")
        values = [v for v, _ in self.atoms]
        if any(a >= b for a, b in zip(values, values[1:])):
            raise InputError("scalar distribution values must be strictly increasing")
        if any(q <= 0 for _, q in self.atoms) or sum(q for _, q in self.atoms) != ONE:
            raise InputError("scalar distribution probabilities must be positive and sum to 1")

    @classmethod
    def from_atoms(cls, pairs: Iterable[Tuple[RationalLike, RationalLike]]) -> "ScalarDistribution":
        merged: Dict[Fraction, Fraction] = {}
        for value, prob in pairs:
            value, prob = as_rational(value), as_rational(prob)
            if prob < 0:
                raise InputError("probabilities must be non-negative")
            if prob:
                merged[value] = merged.get(value, ZERO) + prob
        return cls(tuple(sorted(merged.items())))

    @property
    def values(self) -> Tuple[Fraction, ...]:
        return tuple(v for v, _ in self.atoms)

    def mean(self) -> Fraction:
        return sum((v * q for v, q in self.atoms), ZERO)

    def integrated_cdf(self, x: Fraction) -> Fraction:
        """∫_{-∞}^{x} F(t) dt = E[(x - V)+]."""
        return sum((q * (x - v) for v, q in self.atoms if v < x), ZERO)


def _same_simplex(a: BeliefDistribution, b: BeliefDistribution):
    if a.dim != b.dim:
        raise InputError(f"distributions live on {a.dim} and {b.dim} coordinates")


def check_mps(
    spread: BeliefDistribution,
    contraction: BeliefDistribution,
    lexicographic: bool = True,
) -> Optional[Dilation]:
    """A dilation spreading `contraction` into `spread`, or None if none exists.

    Variables are K(t|s), laid out source-major. The returned witness is the
    lexicographically least feasible kernel.
    """
    _same_simplex(spread, contraction)
    targets, sources = spread.posteriors, contraction.posteriors
    nt, ns = len(targets), len(sources)
    num_vars = ns * nt
    eq = []
    for s, source in enumerate(sources):
        row = [ZERO] * num_vars
        for t in range(nt):
            row[s * nt + t] = ONE
        eq.append((row, ONE))
        # last coordinate is implied by the row sum
        for k in range(spread.dim - 1):
            row = [ZERO] * num_vars
            for t, target in enumerate(targets):
                row[s * nt + t] = target[k]
            eq.append((row, source[k]))
    for t, p in enumerate(spread.probs):
        row = [ZERO] * num_vars
        for s, q in enumerate(contraction.probs):
            row[s * nt + t] = q
        eq.append((row, p))
    system = LinearSystem.nonnegative(num_vars, eq=eq)
    point = feasible_point(system, lexicographic=lexicographic)
    logger.debug("check_mps: %d x %d kernel, feasible=%s", ns, nt, point is not None)
    if point is None:
        return None
    return Dilation(tuple(
        tuple((t, point[s * nt + t]) for t in range(nt) if point[s * nt + t])
        for s in range(ns)
    ))


def compare(a: BeliefDistribution, b: BeliefDistribution) -> DominanceResult:
    forward = check_mps(a, b)
    backward = check_mps(b, a)
    if forward is not None and backward is not None:
        relation = Relation.EQUIVALENT
    elif forward is not None:
        relation = Relation.DOMINATES
    elif backward is not None:
        relation = Relation.DOMINATED
    else:
        relation = Relation.INCOMPARABLE
    return DominanceResult(relation, forward, backward)


def garble(tau: BeliefDistribution, merge_map: Sequence[Sequence[RationalLike]]) -> BeliefDistribution:
    """Pool the atoms of `tau` through a stochastic map.

    merge_map[i][k] is the probability that atom i is reported as output cell k;
    each output atom is the barycenter of the mass routed to it.
    """
    if len(merge_map) != len(tau):
        raise InputError(f"merge map has {len(merge_map)} rows, distribution has {len(tau)} atoms")
    rows = [[as_rational(v) for v in row] for row in merge_map]
    width = len(rows[0]) if rows else 0
    for row in rows:
        if len(row) != width or any(v < 0 for v in row) or sum(row) != ONE:
            raise InputError("merge map rows must be probability vectors of equal length")
    pairs: List[Tuple[Posterior, Fraction]] = []
    for k in range(width):
        routed = [(mu, q * row[k]) for (mu, q), row in zip(tau, rows) if q * row[k]]
        mass = sum((w for _, w in routed), ZERO)
        if mass:
            pairs.append((Posterior(tuple(v / mass for v in barycenter(routed))), mass))
    result = BeliefDistribution.from_atoms(pairs)
    if AppConfig.DEBUG_CHECKS and check_mps(tau, result, lexicographic=False) is None:
        raise InvariantBreach("garbling is dominated by its input")
    return result


def mps_1d_check(spread: ScalarDistribution, contraction: ScalarDistribution) -> bool:
    """True iff `spread` is a mean-preserving spread of `contraction` (convex order).

    Both integrated CDFs are piecewise linear with kinks at atom values, so the
    comparison at every atom value is exact and complete.
    """
    if spread.mean() != contraction.mean():
        return False
    points = sorted(set(spread.values) | set(contraction.values))
    return all(spread.integrated_cdf(x) >= contraction.integrated_cdf(x) for x in points)


def scalar_embedding(dist: ScalarDistribution, low: Fraction, high: Fraction) -> BeliefDistribution:
    """Map value v in [low, high] to the posterior ((high - v)/(high - low), (v - low)/(high - low))."""
    if not low < high or dist.values[0] < low or dist.values[-1] > high:
        raise InputError("embedding interval must be nondegenerate and contain the support")
    width = high - low
    return BeliefDistribution.from_atoms(
        (Posterior(((high - v) / width, (v - low) / width)), q) for v, q in dist.atoms
    )
