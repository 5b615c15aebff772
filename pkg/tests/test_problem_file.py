"""Tests for the problem-file schema, decoding and result encoding."""
import json
from fractions import Fraction as F

import pytest

from data import instances
from data.codec import (
    ResultFile,
    belief_frame,
    composite_frame,
    decimal_view,
    encode_belief,
    encode_composite,
    encode_space,
    encode_spec,
    frame_to_csv,
    to_decimal,
    with_decimal_columns,
)
from data.problem_file import (
    BeliefModel,
    CompositeModel,
    PrivacyModel,
    SpaceModel,
    decode_belief,
    decode_composite,
    decode_space,
    decode_spec,
    load_problem,
    load_reorderings,
)
from signals.errors import InputError
from signals.frontiers import Inferential, SingleBound
from signals.synthesis import synthesize

BUNDLED = [
    "c1_single_bound.json",
    "c1_tampered_composite.json",
    "c1_privacy_preserving.json",
    "c1_not_plausible.json",
    "c2_inferential.json",
    "c2_ratio_violation.json",
    "c3_posterior_mean.json",
    "ternary_posterior_mean.json",
    "expost_interval.json",
]


def _write(tmp_path, document):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def _c2_document():
    return {
        "version": 1,
        "space": encode_space(instances.c2_space()),
        "privacy": {"inferential": {"lambda": "2"}},
        "gamma": encode_belief(instances.c2_frontier_gamma()),
    }


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_problems_load(problems_dir, name):
    problem = load_problem(problems_dir / name)
    assert problem.space.num_types >= 2


def test_c1_problem_decodes_to_the_desk_instance(problems_dir):
    problem = load_problem(problems_dir / "c1_single_bound.json")
    assert problem.space == instances.c1_space()
    assert problem.spec == instances.c1_spec()
    assert problem.gamma == instances.c1_gamma_bar()
    assert problem.composite.extension == instances.c1_symmetric_extension()
    assert problem.artifact("gamma_b").posteriors == (instances.c1_space().prior_theta(),)
    with pytest.raises(InputError):
        problem.artifact("kernel")


def test_written_problem_loads(tmp_path):
    problem = load_problem(_write(tmp_path, _c2_document()))
    assert isinstance(problem.spec, Inferential)
    assert problem.spec.lam == 2
    assert problem.tau is None


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(extra=1),
    lambda d: d.update(version=2),
    lambda d: d["privacy"].update(single_bound={"atoms": [{"posterior": ["1/2", "1/2"], "prob": "1"}]}),
    lambda d: d["privacy"].clear(),
    lambda d: d["privacy"]["inferential"].update({"lambda": "0.5"}),
    lambda d: d["privacy"]["inferential"].update({"lambda": 2}),
    lambda d: d["gamma"]["atoms"].append(d["gamma"]["atoms"][0]),
    lambda d: d["space"].update(prior=["1/2", "1/3"]),
    lambda d: d["gamma"]["atoms"][0].update(posterior=["1/3", "1/3", "1/3"]),
])
def test_malformed_documents_are_input_errors(tmp_path, mutate):
    document = _c2_document()
    mutate(document)
    with pytest.raises(InputError):
        load_problem(_write(tmp_path, document))


def test_unreadable_file_is_an_input_error(tmp_path):
    with pytest.raises(InputError):
        load_problem(tmp_path / "missing.json")
    (tmp_path / "broken.json").write_text("{", encoding="utf-8")
    with pytest.raises(InputError):
        load_problem(tmp_path / "broken.json")


def test_ge_rows_are_negated(problems_dir):
    spec = load_problem(problems_dir / "expost_interval.json").spec
    assert spec == instances.expost_interval_spec()


@pytest.mark.parametrize("spec_factory, space_factory", [
    (instances.c1_spec, instances.c1_space),
    (instances.c2_spec, instances.c2_space),
    (instances.c3_spec, instances.c3_space),
    (instances.ternary_spec, instances.ternary_space),
    (instances.expost_interval_spec, instances.c2_space),
])
def test_spec_encoding_decodes_back(spec_factory, space_factory):
    spec, space = spec_factory(), space_factory()
    model = PrivacyModel.model_validate_json(json.dumps(encode_spec(spec, space)))
    assert decode_spec(model, space) == spec


def test_space_belief_and_composite_decode_back(c1_space, c1_gamma, c1_spec):
    assert decode_space(SpaceModel.model_validate(encode_space(c1_space))) == c1_space
    assert decode_belief(BeliefModel.model_validate(encode_belief(c1_gamma)), 2) == c1_gamma
    composite = synthesize(c1_gamma, c1_spec, c1_space)
    model = CompositeModel.model_validate_json(json.dumps(encode_composite(composite)))
    assert decode_composite(model, c1_space) == composite


def test_reorderings_map_labels_to_indices(problems_dir, c1_space):
    reorderings = load_reorderings(problems_dir / "reorders" / "c1_swap_t1.json", c1_space)
    assert reorderings == {1: {0: [("1/3", "1")], 1: [("0", "1/3")]}}


def test_reorderings_reject_unknown_states(tmp_path, c1_space):
    path = tmp_path / "reorder.json"
    path.write_text(json.dumps({"branches": {"0": {"x9": [["0", "1"]]}}}), encoding="utf-8")
    with pytest.raises(InputError):
        load_reorderings(path, c1_space)


def test_decimal_view_renders_value_fields_only():
    payload = {
        "prob": "1/3",
        "atoms": [{"posterior": ["2", "-1/8"], "prob": "1/2"}],
        "subset_E": ["10", "20"],
        "first": "100",
        "rows": 3,
        "verified": True,
    }
    assert decimal_view(payload, 4) == {
        "prob": "0.3333",
        "atoms": [{"posterior": ["2", "-0.125"], "prob": "0.5"}],
        "subset_E": ["10", "20"],
        "first": "100",
        "rows": 3,
        "verified": True,
    }
    assert to_decimal("1/8", 3) == "0.125"


def test_result_file_json():
    result = ResultFile(command="frontier", status="ok", payload={"x": "1/2"})
    text = result.to_json()
    assert text.endswith("\n")
    assert "reason" not in json.loads(text)
    with pytest.raises(ValueError):
        ResultFile(command="frontier", status="unknown")


def test_belief_frame_and_csv(c1_gamma):
    frame = belief_frame(c1_gamma, ["t1", "t2"])
    assert frame_to_csv(frame) == "atom,prob,t1,t2\n0,1/2,1/4,3/4\n1,1/2,3/4,1/4\n"
    wide = with_decimal_columns(frame, ["prob"], 3)
    assert list(wide["prob_decimal"]) == ["0.5", "0.5"]
    assert list(wide["prob"]) == ["1/2", "1/2"]


def test_empty_frames_keep_their_header():
    assert frame_to_csv(belief_frame(None, ["t1", "t2"])) == "atom,prob,t1,t2\n"
    assert frame_to_csv(composite_frame(None, ["a"])) == "branch,cell,start,end,prob,a\n"


def test_single_bound_spec_type(problems_dir):
    assert isinstance(load_problem(problems_dir / "c1_privacy_preserving.json").spec, SingleBound)
    assert F(1) in load_problem(problems_dir / "c1_privacy_preserving.json").gamma.probs
