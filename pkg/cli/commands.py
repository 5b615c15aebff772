"""The cmd_* verbs: load a problem file, run one operation, return a ResultFile.

No verb raises. Failures become a ResultFile whose status selects the exit code.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from pydantic import ValidationError

from data.codec import (
    ResultFile,
    belief_frame,
    composite_frame,
    decimal_view,
    encode_belief,
    encode_composite,
    encode_dominance,
    encode_extension,
    encode_inferential_point,
    encode_posterior,
    encode_rational,
    encode_scalar,
    frame_to_csv,
    with_decimal_columns,
)
from data.problem_file import Problem, load_problem, load_reorderings
from lp.kernel import ZERO
from signals.beliefs import BeliefDistribution, bayes_plausible, marginal_theta_belief
from signals.blackwell import compare
from signals.errors import (
    ContractViolation,
    InfeasibleError,
    InputError,
    InvariantBreach,
    NotBayesPlausibleError,
    RefusedError,
)
from signals.extension import MinExtension, enumerate_min_extensions, solve_min_extension, verify_min_extension
from signals.frontiers import (
    ExPost,
    Inferential,
    PosteriorMean,
    SingleBound,
    canonical_frontier,
    inferential_frontier_support,
    kappa_of,
)
from signals.synthesis import synthesize, undominated_report

logger = logging.getLogger(__name__)

EXIT_CODES = {"ok": 0, "error": 2, "infeasible": 3, "refused": 3, "failed": 3, "breach": 4}


@dataclass
class Outcome:
    status: str
    payload: Dict[str, Any] = field(default_factory=dict)
    reason: Optional[str] = None


def exit_code(result: ResultFile) -> int:
    return EXIT_CODES[result.status]


def _run(
    command: str,
    path: Path,
    body: Callable[[Problem], Outcome],
    decimals: Optional[int] = None,
    with_decimal_payload: bool = True,
) -> ResultFile:
    logger.info("%s %s", command, path)
    try:
        if decimals is not None and decimals < 1:
            raise InputError(f"decimals must be a positive digit count, got {decimals}")
        outcome = body(load_problem(path))
    except RefusedError as exc:
        logger.warning("%s refused: %s", command, exc)
        outcome = Outcome("refused", {"failed_check": exc.check}, str(exc))
    except InfeasibleError as exc:
        logger.warning("%s infeasible: %s", command, exc)
        outcome = Outcome("infeasible", reason=str(exc))
    except NotBayesPlausibleError as exc:
        logger.warning("%s infeasible: %s", command, exc)
        outcome = Outcome("infeasible", reason=str(exc))
    except (InputError, ValidationError) as exc:
        logger.warning("%s input error: %s", command, exc)
        outcome = Outcome("error", reason=str(exc))
    except InvariantBreach as exc:
        logger.error("%s invariant breach: %s", command, exc)
        outcome = Outcome("breach", {"invariant": exc.invariant}, str(exc))
    except ContractViolation as exc:
        logger.error("%s contract violation: %s", command, exc)
        outcome = Outcome("breach", reason=str(exc))
    except Exception as exc:
        logger.exception("%s failed unexpectedly", command)
        outcome = Outcome("breach", reason=f"unexpected {type(exc).__name__}: {exc}")
    result = ResultFile(command=command, status=outcome.status, payload=outcome.payload, reason=outcome.reason)
    if decimals is not None and outcome.payload and with_decimal_payload:
        result.decimal_payload = decimal_view(outcome.payload, decimals)
    logger.info("%s finished with status %s", command, result.status)
    return result


def _belief_artifact(problem: Problem, name: str) -> BeliefDistribution:
    value = problem.artifact(name)
    if value is None:
        raise InputError(f"problem file has no {name!r} payload")
    if not isinstance(value, BeliefDistribution):
        raise InputError(f"{name!r} is not a belief distribution")
    return value


def _spec_kind(problem: Problem) -> str:
    return {
        SingleBound: "single_bound",
        ExPost: "ex_post",
        Inferential: "inferential",
        PosteriorMean: "posterior_mean",
    }[type(problem.spec)]


def _extension_payload(ext: MinExtension) -> Dict[str, Any]:
    return {
        "extension": encode_extension(ext),
        "tau": encode_belief(ext.tau),
        "residuals": [encode_rational(r) for r in ext.residuals()],
        "checks": ext.invariant_report(),
    }


def cmd_check_dominance(
    path: Path, first: str = "gamma", second: str = "gamma_b", decimals: Optional[int] = None
) -> ResultFile:
    def body(problem: Problem) -> Outcome:
        result = compare(_belief_artifact(problem, first), _belief_artifact(problem, second))
        return Outcome("ok", {"first": first, "second": second, **encode_dominance(result)})

    return _run("check-dominance", path, body, decimals)


def cmd_min_extension(path: Path, mode: str = "one", decimals: Optional[int] = None) -> ResultFile:
    def body(problem: Problem) -> Outcome:
        gamma = _belief_artifact(problem, "gamma")
        try:
            if mode == "one":
                extensions = [solve_min_extension(gamma, problem.space)]
            elif mode == "vertices":
                extensions = enumerate_min_extensions(gamma, problem.space)
            else:
                raise InputError(f"unknown mode {mode!r}; expected 'one' or 'vertices'")
        except NotBayesPlausibleError as exc:
            return Outcome("infeasible", {"mode": mode}, str(exc))
        return Outcome("ok", {"mode": mode, "extensions": [_extension_payload(e) for e in extensions]})

    return _run("min-extension", path, body, decimals)


def cmd_frontier(path: Path, decimals: Optional[int] = None) -> ResultFile:
    def body(problem: Problem) -> Outcome:
        spec = problem.spec
        support, gamma = canonical_frontier(spec)
        payload: Dict[str, Any] = {"spec": _spec_kind(problem)}
        points = []
        if isinstance(spec, Inferential) and spec.lam > 1:
            points = inferential_frontier_support(spec.prior_theta, spec.lam)
        if points:
            payload["support"] = [encode_inferential_point(p, problem.space) for p in points]
        else:
            payload["support"] = [{"posterior": encode_posterior(p)} for p in support]
        payload["gamma"] = encode_belief(gamma)
        if isinstance(spec, PosteriorMean):
            payload["kappa"] = encode_scalar(kappa_of(gamma, spec.f_values))
        return Outcome("ok", payload)

    return _run("frontier", path, body, decimals)


def cmd_synthesize(
    path: Path,
    extension_index: int = 0,
    reorder_path: Optional[Path] = None,
    decimals: Optional[int] = None,
) -> ResultFile:
    def body(problem: Problem) -> Outcome:
        gamma = _belief_artifact(problem, "gamma")
        reorderings = load_reorderings(reorder_path, problem.space) if reorder_path else None
        composite = synthesize(gamma, problem.spec, problem.space, extension_index, reorderings)
        report = undominated_report(composite, problem.spec)
        verified = all(report.values())
        payload = {
            "extension_index": extension_index,
            "composite": encode_composite(composite),
            "checks": report,
            "verified": verified,
        }
        if verified:
            return Outcome("ok", payload)
        failed = [name for name, ok in report.items() if not ok]
        return Outcome("failed", payload, f"composite failed {', '.join(failed)}")

    return _run("synthesize", path, body, decimals)


def _verify_gamma(problem: Problem) -> Dict[str, Any]:
    gamma = _belief_artifact(problem, "gamma")
    spec = problem.spec
    checks = {
        "bayes_plausible": bayes_plausible(gamma, problem.space.prior_theta()),
        "permissible": spec.permits(gamma),
    }
    payload: Dict[str, Any] = {"checks": checks, "on_frontier": spec.on_frontier(gamma)}
    if isinstance(spec, (ExPost, Inferential)):
        payload["offending_atoms"] = [
            {"posterior": encode_posterior(nu), "prob": encode_rational(q)}
            for nu, q in gamma
            if not spec.admits(nu)
        ]
    return payload


def _verify_tau(problem: Problem) -> Dict[str, Any]:
    tau = _belief_artifact(problem, "tau")
    space = problem.space
    gamma_tau = marginal_theta_belief(tau, space)
    checks = {
        "bayes_plausible": bayes_plausible(tau, space.prior_posterior()),
        "permissible": problem.spec.permits(gamma_tau),
    }
    if problem.gamma is not None:
        checks["min_extension"] = verify_min_extension(tau, problem.gamma, space)
    return {"checks": checks, "theta_marginal": encode_belief(gamma_tau)}


def _verify_composite(problem: Problem) -> Dict[str, Any]:
    if problem.composite is None:
        raise InputError("problem file has no 'composite' payload")
    ext = problem.composite.extension
    checks = {"extension_prior_recovered": all(r == ZERO for r in ext.residuals())}
    checks.update(undominated_report(problem.composite, problem.spec))
    return {"checks": checks}


_VERIFIERS = {"gamma": _verify_gamma, "tau": _verify_tau, "composite": _verify_composite}


def cmd_verify(path: Path, artifact: str = "gamma", decimals: Optional[int] = None) -> ResultFile:
    def body(problem: Problem) -> Outcome:
        if artifact not in _VERIFIERS:
            raise InputError(f"cannot verify artifact {artifact!r}; expected one of {sorted(_VERIFIERS)}")
        payload = {"artifact": artifact, **_VERIFIERS[artifact](problem)}
        failed = [name for name, ok in payload["checks"].items() if not ok]
        if failed:
            return Outcome("failed", payload, f"failed checks: {', '.join(failed)}")
        return Outcome("ok", payload)

    return _run("verify", path, body, decimals)


def cmd_plot_data(path: Path, artifact: str = "gamma", decimals: Optional[int] = None) -> ResultFile:
    """The CSV text is carried in payload["csv"]."""
    def body(problem: Problem) -> Outcome:
        space = problem.space
        if artifact == "composite":
            labels = list(space.omega_labels)
            frame = composite_frame(problem.composite, labels)
            exact = ["start", "end", "prob"] + labels
        elif artifact in ("gamma", "gamma_b", "tau"):
            labels = list(space.omega_labels if artifact == "tau" else space.theta_labels)
            frame = belief_frame(problem.artifact(artifact), labels)
            exact = ["prob"] + labels
        else:
            raise InputError(f"cannot plot artifact {artifact!r}")
        if decimals is not None:
            frame = with_decimal_columns(frame, exact, decimals)
        return Outcome("ok", {"artifact": artifact, "rows": len(frame), "csv": frame_to_csv(frame)})

    return _run("plot-data", path, body, decimals, with_decimal_payload=False)
