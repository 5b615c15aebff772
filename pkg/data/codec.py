"""Domain objects to JSON-ready payloads, result documents and plot frames.

Every encoder emits exactly the shape its schema model in `data.problem_file`
parses, so `decode_x(Model.model_validate(encode_x(x))) == x`.
"""
import decimal
import re
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, ConfigDict

from config import AppConfig
from lp.kernel import Vector
from signals.beliefs import BeliefDistribution, Posterior, StateSpace
from signals.blackwell import Dilation, DominanceResult, ScalarDistribution
from signals.extension import MinExtension
from signals.frontiers import ExPost, Inferential, InferentialExtremePoint, PosteriorMean, PrivacySpec, SingleBound
from signals.synthesis import CompositeSignal, QuantileSignal, branch_cell_posteriors

_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")

# payload keys whose contents are numbers; everything else (labels, names) is copied as is
_VALUE_KEYS = frozenset({
    "posterior", "prob", "value", "weight", "rhs", "coeffs", "cond", "breakpoints",
    "density", "residuals", "f", "lambda", "prior", "kappa", "kappa_bar",
})

Status = Literal["ok", "infeasible", "refused", "failed", "error", "breach"]


class ResultFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: str
    status: Status
    payload: Dict[str, Any] = {}
    decimal_payload: Optional[Dict[str, Any]] = None
    reason: Optional[str] = None

    def to_json(self) -> str:
        return self.model_dump_json(indent=AppConfig.JSON_INDENT or None, exclude_none=True) + "\n"


def encode_rational(value: Fraction) -> str:
    return str(value)


def encode_vector(values: Sequence[Fraction]) -> List[str]:
    return [encode_rational(v) for v in values]


def encode_posterior(posterior: Posterior) -> List[str]:
    return encode_vector(posterior.weights)


def encode_belief(dist: BeliefDistribution) -> Dict[str, Any]:
    return {"atoms": [{"posterior": encode_posterior(p), "prob": encode_rational(q)} for p, q in dist]}


def encode_space(space: StateSpace) -> Dict[str, Any]:
    return {
        "omega": list(space.omega_labels),
        "theta": list(space.theta_labels),
        "theta_map": {w: space.theta_labels[j] for w, j in zip(space.omega_labels, space.theta_map)},
        "prior": encode_vector(space.prior),
    }


def encode_scalar(dist: ScalarDistribution) -> List[Dict[str, str]]:
    return [{"value": encode_rational(v), "prob": encode_rational(q)} for v, q in dist.atoms]


def encode_spec(spec: PrivacySpec, space: StateSpace) -> Dict[str, Any]:
    if isinstance(spec, SingleBound):
        return {"single_bound": encode_belief(spec.bound)}
    if isinstance(spec, ExPost):
        c = spec.constraints
        rows = [{"coeffs": encode_vector(a), "sense": "eq", "rhs": encode_rational(b)} for a, b in c.eq_rows]
        rows += [{"coeffs": encode_vector(a), "sense": "le", "rhs": encode_rational(b)} for a, b in c.ineq_rows]
        return {"ex_post": {"rows": rows}}
    if isinstance(spec, Inferential):
        return {"inferential": {"lambda": encode_rational(spec.lam)}}
    if isinstance(spec, PosteriorMean):
        return {"posterior_mean": {
            "f": {label: encode_rational(v) for label, v in zip(space.theta_labels, spec.f_values)},
            "kappa_bar": encode_scalar(spec.kappa_bar),
        }}
    raise TypeError(f"unknown privacy spec {type(spec).__name__}")


def encode_extension(ext: MinExtension) -> Dict[str, Any]:
    return {"gamma": encode_belief(ext.gamma), "cond": [encode_vector(row) for row in ext.cond]}


def encode_quantile(q: QuantileSignal) -> Dict[str, Any]:
    return {"breakpoints": encode_vector(q.breakpoints), "density": [encode_vector(row) for row in q.density]}


def encode_composite(c: CompositeSignal) -> Dict[str, Any]:
    return {
        "extension": encode_extension(c.extension),
        "branches": [encode_quantile(q) for q in c.branch_signals],
    }


def encode_dilation(d: Dilation) -> Dict[str, Any]:
    return {"rows": [[{"target": t, "weight": encode_rational(w)} for t, w in row] for row in d.rows]}


def encode_dominance(result: DominanceResult) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"relation": result.relation.value}
    if result.witness_forward is not None:
        payload["witness_forward"] = encode_dilation(result.witness_forward)
    if result.witness_backward is not None:
        payload["witness_backward"] = encode_dilation(result.witness_backward)
    return payload


def encode_inferential_point(point: InferentialExtremePoint, space: StateSpace) -> Dict[str, Any]:
    return {
        "subset_E": [space.theta_labels[j] for j in point.subset_E],
        "posterior": encode_posterior(point.posterior),
    }


def to_decimal(value: str, digits: int) -> str:
    """Render a "p/q" literal with `digits` significant digits."""
    frac = Fraction(value)
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        return str(decimal.Decimal(frac.numerator) / decimal.Decimal(frac.denominator))


def decimal_view(payload: Any, digits: int, numeric: bool = False) -> Any:
    """A copy of `payload` with the rational literals under value keys rendered as decimals."""
    if isinstance(payload, dict):
        return {k: decimal_view(v, digits, numeric or k in _VALUE_KEYS) for k, v in payload.items()}
    if isinstance(payload, list):
        return [decimal_view(v, digits, numeric) for v in payload]
    if numeric and isinstance(payload, str) and _RATIONAL.match(payload):
        return to_decimal(payload, digits)
    return payload


# -- plot frames -----------------------------------------------------------


def belief_frame(dist: Optional[BeliefDistribution], labels: Sequence[str]) -> pd.DataFrame:
    """One row per atom: index, probability and one column per coordinate label."""
    columns = ["atom", "prob"] + list(labels)
    if dist is None:
        return pd.DataFrame(columns=columns)
    rows = [
        [n, encode_rational(q)] + encode_posterior(p)
        for n, (p, q) in enumerate(dist)
    ]
    return pd.DataFrame(rows, columns=columns)


def composite_frame(c: Optional[CompositeSignal], labels: Sequence[str]) -> pd.DataFrame:
    """One row per (branch, cell) with the cell's interval, probability and posterior."""
    columns = ["branch", "cell", "start", "end", "prob"] + list(labels)
    if c is None:
        return pd.DataFrame(columns=columns)
    rows = []
    for n, k, posterior, prob in branch_cell_posteriors(c):
        grid: Vector = c.branch_signals[n].breakpoints
        rows.append(
            [n, k, encode_rational(grid[k]), encode_rational(grid[k + 1]), encode_rational(prob)]
            + encode_posterior(posterior)
        )
    return pd.DataFrame(rows, columns=columns)


def with_decimal_columns(frame: pd.DataFrame, exact_columns: Sequence[str], digits: int) -> pd.DataFrame:
    """Append `<col>_decimal` next to the exact columns, never replacing them."""
    out = frame.copy()
    for col in exact_columns:
        out[f"{col}_decimal"] = out[col].map(lambda v: to_decimal(v, digits))
    return out


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n")
