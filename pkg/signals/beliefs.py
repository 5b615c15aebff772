"""Finite probability objects: state spaces, posteriors, belief distributions and signal kernels."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

from lp.kernel import ONE, ZERO, RationalLike, Vector, as_rational, as_vector
from signals.errors import InputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Posterior:
    """A probability vector over Ω or over Θ. Weights are exact and sum to one."""

    weights: Vector

    def __post_init__(self):
        if not self.weights:
            raise InputError("a posterior needs at least one coordinate")
        if any(w < 0 for w in self.weights):
            raise InputError(f"negative posterior weight in {_fmt(self.weights)}")
        if sum(self.weights) != ONE:
            raise InputError(f"posterior weights sum to {sum(self.weights)}, not 1")

    @classmethod
    def of(cls, *values: RationalLike) -> "Posterior":
        if len(values) == 1 and isinstance(values[0], (list, tuple)):
            values = tuple(values[0])
        return cls(as_vector(values))

    @classmethod
    def point_mass(cls, dim: int, index: int) -> "Posterior":
        return cls(tuple(ONE if k == index else ZERO for k in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.weights)

    def support(self) -> Tuple[int, ...]:
        return tuple(k for k, w in enumerate(self.weights) if w > 0)

    def __getitem__(self, index: int) -> Fraction:
        return self.weights[index]

    def __str__(self) -> str:
        return _fmt(self.weights)


def _fmt(values: Iterable[Fraction]) -> str:
    return "(" + ", ".join(str(v) for v in values) + ")"


def barycenter(pairs: Iterable[Tuple[Posterior, Fraction]]) -> Vector:
    """Σ prob·posterior, without normalization."""
    total = None
    for posterior, prob in pairs:
        scaled = [prob * w for w in posterior.weights]
        total = scaled if total is None else [a + b for a, b in zip(total, scaled)]
    if total is None:
        raise InputError("barycenter of an empty collection")
    return tuple(total)


@dataclass(frozen=True)
class BeliefDistribution:
    """Finite-support distribution over posteriors, kept canonical.

    Atoms are merged when their posteriors coincide, zero-probability atoms are
    dropped and the atoms are sorted lexicographically by weight vector.
    """

    atoms: Tuple[Tuple[Posterior, Fraction], ...]

    def __post_init__(self):
        if not self.atoms:
            raise InputError("a belief distribution needs at least one atom")
        dims = {p.dim for p, _ in self.atoms}
        if len(dims) != 1:
            raise InputError("belief distribution atoms live on different simplices")
        if any(q <= 0 for _, q in self.atoms):
            raise InputError("atom probabilities must be positive")
        if sum(q for _, q in self.atoms) != ONE:
            raise InputError("atom probabilities must sum to 1")
        posteriors = [p for p, _ in self.atoms]
        if len(set(posteriors)) != len(posteriors) or posteriors != sorted(posteriors):
            raise InputError("atoms are not canonical; build with BeliefDistribution.from_atoms")

    @classmethod
    def from_atoms(cls, pairs: Iterable[Tuple[Posterior, RationalLike]]) -> "BeliefDistribution":
        merged: Dict[Posterior, Fraction] = {}
        for posterior, prob in pairs:
            prob = as_rational(prob)
            if prob < 0:
                raise InputError("atom probabilities must be non-negative")
            if prob == 0:
                continue
            merged[posterior] = merged.get(posterior, ZERO) + prob
        return cls(tuple(sorted(merged.items())))

    @classmethod
    def delta(cls, posterior: Posterior) -> "BeliefDistribution":
        return cls(((posterior, ONE),))

    @property
    def dim(self) -> int:
        return self.atoms[0][0].dim

    @property
    def posteriors(self) -> Tuple[Posterior, ...]:
        return tuple(p for p, _ in self.atoms)

    @property
    def probs(self) -> Tuple[Fraction, ...]:
        return tuple(q for _, q in self.atoms)

    def mean(self) -> Posterior:
        return Posterior(barycenter(self.atoms))

    def prob_of(self, posterior: Posterior) -> Fraction:
        return dict(self.atoms).get(posterior, ZERO)

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator[Tuple[Posterior, Fraction]]:
        return iter(self.atoms)


@dataclass(frozen=True)
class StateSpace:
    """Finite Ω with the privacy map θ̃ : Ω -> Θ and an interior prior μ0 over Ω."""

    omega_labels: Tuple[str, ...]
    theta_labels: Tuple[str, ...]
    theta_map: Tuple[int, ...]
    prior: Vector

    def __post_init__(self):
        n, k = len(self.omega_labels), len(self.theta_labels)
        if n == 0 or k == 0:
            raise InputError("state space needs at least one state and one privacy value")
        if len(set(self.omega_labels)) != n or len(set(self.theta_labels)) != k:
            raise InputError("state and privacy labels must be unique")
        if len(self.theta_map) != n or any(not 0 <= j < k for j in self.theta_map):
            raise InputError("theta_map must send every state to a privacy value")
        if set(self.theta_map) != set(range(k)):
            raise InputError("theta_map must be surjective onto the privacy values")
        if len(self.prior) != n:
            raise InputError(f"prior has {len(self.prior)} entries, expected {n}")
        if any(p <= 0 for p in self.prior):
            raise InputError("prior must be interior (every entry positive)")
        if sum(self.prior) != ONE:
            raise InputError("prior must sum to 1")

    @classmethod
    def from_labels(
        cls,
        omega: Sequence[str],
        theta: Sequence[str],
        theta_map: Mapping[str, str],
        prior: Sequence[RationalLike],
    ) -> "StateSpace":
        index = {label: j for j, label in enumerate(theta)}
        missing = [w for w in omega if w not in theta_map]
        if missing:
            raise InputError(f"theta_map has no entry for {missing}")
        unknown = sorted(set(theta_map) - set(omega))
        if unknown:
            raise InputError(f"theta_map mentions unknown states {unknown}")
        try:
            mapped = tuple(index[theta_map[w]] for w in omega)
        except KeyError as exc:
            raise InputError(f"theta_map uses unknown privacy value {exc.args[0]!r}") from exc
        return cls(tuple(omega), tuple(theta), mapped, as_vector(prior))

    @classmethod
    def theta_only(cls, theta: Sequence[str], prior: Sequence[RationalLike]) -> "StateSpace":
        """Ω = Θ with the identity privacy map."""
        return cls(tuple(theta), tuple(theta), tuple(range(len(theta))), as_vector(prior))

    @property
    def num_states(self) -> int:
        return len(self.omega_labels)

    @property
    def num_types(self) -> int:
        return len(self.theta_labels)

    def block(self, theta_index: int) -> Tuple[int, ...]:
        """States mapped to `theta_index`, in declaration order."""
        return tuple(i for i, j in enumerate(self.theta_map) if j == theta_index)

    def prior_posterior(self) -> Posterior:
        return Posterior(self.prior)

    def prior_theta(self) -> Posterior:
        return marginal_theta(self.prior_posterior(), self)

    def prior_conditional(self, state: int) -> Fraction:
        """μ0(ω | θ̃(ω))."""
        return self.prior[state] / self.prior_theta()[self.theta_map[state]]


@dataclass(frozen=True)
class SignalKernel:
    """p(s | ω): one row per state, one column per realization."""

    realizations: Tuple[str, ...]
    cond: Tuple[Vector, ...]

    def __post_init__(self):
        for row in self.cond:
            if len(row) != len(self.realizations):
                raise InputError("kernel row length differs from the number of realizations")
            if any(v < 0 for v in row):
                raise InputError("kernel entries must be non-negative")
            if sum(row) != ONE:
                raise InputError("every kernel row must sum to 1")

    @classmethod
    def build(cls, realizations: Sequence[str], rows: Sequence[Sequence[RationalLike]]) -> "SignalKernel":
        return cls(tuple(realizations), tuple(as_vector(r) for r in rows))


def marginal_theta(mu: Posterior, space: StateSpace) -> Posterior:
    """ν(θ) = Σ_{ω: θ̃(ω) = θ} μ(ω)."""
    if mu.dim != space.num_states:
        raise InputError(f"posterior has {mu.dim} coordinates, space has {space.num_states} states")
    nu = [ZERO] * space.num_types
    for i, w in enumerate(mu.weights):
        nu[space.theta_map[i]] += w
    return Posterior(tuple(nu))


def marginal_theta_belief(tau: BeliefDistribution, space: StateSpace) -> BeliefDistribution:
    return BeliefDistribution.from_atoms((marginal_theta(mu, space), q) for mu, q in tau)


def bayes_plausible(gamma: BeliefDistribution, reference: Posterior) -> bool:
    if gamma.dim != reference.dim:
        raise InputError(f"distribution lives on {gamma.dim} coordinates, reference on {reference.dim}")
    return barycenter(gamma.atoms) == reference.weights


def induced_belief_distribution(kernel: SignalKernel, space: StateSpace) -> BeliefDistribution:
    """⟨π⟩: the distribution of posteriors over Ω induced by a signal kernel."""
    if len(kernel.cond) != space.num_states:
        raise InputError(f"kernel has {len(kernel.cond)} rows, space has {space.num_states} states")
    pairs: List[Tuple[Posterior, Fraction]] = []
    for s in range(len(kernel.realizations)):
        joint = [space.prior[i] * kernel.cond[i][s] for i in range(space.num_states)]
        total = sum(joint)
        if total == 0:
            continue
        pairs.append((Posterior(tuple(v / total for v in joint)), total))
    return BeliefDistribution.from_atoms(pairs)
