"""Problem-file schema (version 1) and decoding into domain objects.

A problem file is a single JSON document. Every rational is written as a
"p/q" or integer string; unknown fields are rejected at every level.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Tuple

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, ValidationError, model_validator

from lp.kernel import LinearSystem, as_rational, as_vector
from signals.beliefs import BeliefDistribution, Posterior, StateSpace
from signals.blackwell import Dilation, ScalarDistribution
from signals.errors import InputError
from signals.extension import MinExtension
from signals.frontiers import ExPost, Inferential, PosteriorMean, PrivacySpec, SingleBound
from signals.synthesis import Assignment, CompositeSignal, QuantileSignal

logger = logging.getLogger(__name__)


def _rational(value: str) -> str:
    as_rational(value)
    return value


Rational = Annotated[str, AfterValidator(_rational)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True, populate_by_name=True)


class AtomModel(_Strict):
    posterior: List[Rational]
    prob: Rational


class BeliefModel(_Strict):
    atoms: List[AtomModel] = Field(min_length=1)


class SpaceModel(_Strict):
    omega: List[str] = Field(min_length=1)
    theta: List[str] = Field(min_length=1)
    theta_map: Dict[str, str]
    prior: List[Rational]


class RowModel(_Strict):
    coeffs: List[Rational]
    sense: Literal["le", "ge", "eq"]
    rhs: Rational


class SingleBoundModel(_Strict):
    atoms: List[AtomModel] = Field(min_length=1)


class ExPostModel(_Strict):
    rows: List[RowModel]


class InferentialModel(_Strict):
    lam: Rational = Field(alias="lambda")


class ScalarAtomModel(_Strict):
    value: Rational
    prob: Rational


class PosteriorMeanModel(_Strict):
    f: Dict[str, Rational]
    kappa_bar: List[ScalarAtomModel] = Field(min_length=1)


class PrivacyModel(_Strict):
    single_bound: Optional[SingleBoundModel] = None
    ex_post: Optional[ExPostModel] = None
    inferential: Optional[InferentialModel] = None
    posterior_mean: Optional[PosteriorMeanModel] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        given = [name for name in type(self).model_fields if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"privacy must name exactly one constraint family, got {given or 'none'}")
        return self


class ExtensionModel(_Strict):
    gamma: BeliefModel
    cond: List[List[Rational]]


class BranchModel(_Strict):
    breakpoints: List[Rational] = Field(min_length=2)
    density: List[List[Rational]]


class CompositeModel(_Strict):
    extension: ExtensionModel
    branches: List[BranchModel]


class DilationEntryModel(_Strict):
    target: int
    weight: Rational


class DilationModel(_Strict):
    rows: List[List[DilationEntryModel]]


class ProblemFile(_Strict):
    version: Literal[1]
    space: SpaceModel
    privacy: PrivacyModel
    gamma: Optional[BeliefModel] = None
    gamma_b: Optional[BeliefModel] = None
    tau: Optional[BeliefModel] = None
    composite: Optional[CompositeModel] = None


class ReorderFile(_Strict):
    """branches[n][state label] lists the [start, end] intervals of that state in branch n."""

    branches: Dict[str, Dict[str, List[Tuple[Rational, Rational]]]]


@dataclass(frozen=True)
class Problem:
    """A decoded problem file."""

    space: StateSpace
    spec: PrivacySpec
    gamma: Optional[BeliefDistribution] = None
    gamma_b: Optional[BeliefDistribution] = None
    tau: Optional[BeliefDistribution] = None
    composite: Optional[CompositeSignal] = None

    def artifact(self, name: str):
        if name not in ("gamma", "gamma_b", "tau", "composite"):
            raise InputError(f"unknown artifact {name!r}")
        return getattr(self, name)


def decode_space(model: SpaceModel) -> StateSpace:
    return StateSpace.from_labels(model.omega, model.theta, model.theta_map, model.prior)


def decode_belief(model: BeliefModel, dim: int) -> BeliefDistribution:
    """Atoms must be distinct; duplicates are an input error, not merged."""
    atoms = [(Posterior.of(list(a.posterior)), as_rational(a.prob)) for a in model.atoms]
    if any(p.dim != dim for p, _ in atoms):
        raise InputError(f"belief atoms must have {dim} coordinates")
    posteriors = [p for p, _ in atoms]
    if len(set(posteriors)) != len(posteriors):
        raise InputError("belief distribution lists the same posterior twice; merge the atoms")
    return BeliefDistribution.from_atoms(atoms)


def decode_scalar(atoms: List[ScalarAtomModel]) -> ScalarDistribution:
    values = [as_rational(a.value) for a in atoms]
    if len(set(values)) != len(values):
        raise InputError("kappa_bar lists the same value twice")
    return ScalarDistribution.from_atoms((v, a.prob) for v, a in zip(values, atoms))


def decode_spec(model: PrivacyModel, space: StateSpace) -> PrivacySpec:
    prior_theta = space.prior_theta()
    k = space.num_types
    if model.single_bound is not None:
        bound = decode_belief(BeliefModel(atoms=model.single_bound.atoms), k)
        return SingleBound(prior_theta, bound)
    if model.ex_post is not None:
        eq, ineq = [], []
        for row in model.ex_post.rows:
            coeffs, rhs = as_vector(row.coeffs), as_rational(row.rhs)
            if row.sense == "eq":
                eq.append((coeffs, rhs))
            elif row.sense == "le":
                ineq.append((coeffs, rhs))
            else:
                ineq.append((tuple(-c for c in coeffs), -rhs))
        return ExPost(prior_theta, LinearSystem.build(k, eq=eq, ineq=ineq))
    if model.inferential is not None:
        return Inferential(prior_theta, as_rational(model.inferential.lam))
    pm = model.posterior_mean
    unknown = sorted(set(pm.f) ^ set(space.theta_labels))
    if unknown:
        raise InputError(f"f must assign a value to exactly the privacy values; mismatch on {unknown}")
    f_values = as_vector([pm.f[label] for label in space.theta_labels])
    return PosteriorMean(prior_theta, f_values, decode_scalar(pm.kappa_bar))


def decode_extension(model: ExtensionModel, space: StateSpace) -> MinExtension:
    """cond rows follow the file's atom order and are realigned to canonical order."""
    gamma = decode_belief(model.gamma, space.num_types)
    if len(model.cond) != len(model.gamma.atoms):
        raise InputError("extension needs one conditional row per gamma atom")
    by_atom = {
        Posterior.of(list(atom.posterior)): row for atom, row in zip(model.gamma.atoms, model.cond)
    }
    return MinExtension.from_conditionals(gamma, space, [by_atom[nu] for nu in gamma.posteriors])


def decode_composite(model: CompositeModel, space: StateSpace) -> CompositeSignal:
    extension = decode_extension(model.extension, space)
    branches = tuple(QuantileSignal.build(space, b.breakpoints, b.density) for b in model.branches)
    return CompositeSignal(extension, branches)


def decode_dilation(model: DilationModel) -> Dilation:
    return Dilation(tuple(
        tuple((entry.target, as_rational(entry.weight)) for entry in row) for row in model.rows
    ))


def decode_problem(model: ProblemFile) -> Problem:
    space = decode_space(model.space)
    spec = decode_spec(model.privacy, space)
    return Problem(
        space=space,
        spec=spec,
        gamma=decode_belief(model.gamma, space.num_types) if model.gamma else None,
        gamma_b=decode_belief(model.gamma_b, space.num_types) if model.gamma_b else None,
        tau=decode_belief(model.tau, space.num_states) if model.tau else None,
        composite=decode_composite(model.composite, space) if model.composite else None,
    )


def _read(path: Path, schema):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return schema.model_validate_json(text)
    except ValidationError as exc:
        raise InputError(f"{path} does not match the {schema.__name__} schema:\n{exc}") from exc


def load_problem(path: Path) -> Problem:
    """Parse and decode a problem file. Every failure is an InputError."""
    problem = decode_problem(_read(path, ProblemFile))
    logger.info("loaded %s: %d states, %d privacy values", path, problem.space.num_states, problem.space.num_types)
    return problem


def load_reorderings(path: Path, space: StateSpace) -> Dict[int, Assignment]:
    model = _read(path, ReorderFile)
    index = {label: i for i, label in enumerate(space.omega_labels)}
    out: Dict[int, Assignment] = {}
    for branch, states in model.branches.items():
        if not branch.isdigit():
            raise InputError(f"branch key must be a non-negative integer, got {branch!r}")
        unknown = sorted(set(states) - set(index))
        if unknown:
            raise InputError(f"reordering names unknown states {unknown}")
        out[int(branch)] = {index[label]: list(spans) for label, spans in states.items()}
    return out
