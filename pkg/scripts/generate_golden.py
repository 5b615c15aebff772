"""Regenerate golden result files for every bundled problem."""
from pathlib import Path
import sys
from typing import Dict, List, Optional, Tuple

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import AppConfig
from cli.commands import (
    cmd_check_dominance,
    cmd_frontier,
    cmd_min_extension,
    cmd_plot_data,
    cmd_synthesize,
    cmd_verify,
)

# (output name, verb, problem file, options)
CASES: List[Tuple[str, str, str, Dict]] = [
    ("c1_dominance", "check-dominance", "c1_single_bound.json", {}),
    ("c1_dominance_reversed", "check-dominance", "c1_single_bound.json", {"first": "gamma_b", "second": "gamma"}),
    ("c1_dominance_identical", "check-dominance", "c1_single_bound.json", {"first": "gamma", "second": "gamma"}),
    ("c1_extension_one", "min-extension", "c1_single_bound.json", {"mode": "one"}),
    ("c1_extension_vertices", "min-extension", "c1_single_bound.json", {"mode": "vertices"}),
    ("c1_privacy_preserving_extension", "min-extension", "c1_privacy_preserving.json", {"mode": "one"}),
    ("c1_not_plausible_extension", "min-extension", "c1_not_plausible.json", {"mode": "one"}),
    ("c2_frontier", "frontier", "c2_inferential.json", {}),
    ("expost_interval_frontier", "frontier", "expost_interval.json", {}),
    ("c3_frontier", "frontier", "c3_posterior_mean.json", {}),
    ("ternary_frontier", "frontier", "ternary_posterior_mean.json", {}),
    ("c1_synthesize", "synthesize", "c1_single_bound.json", {"extension_index": 0}),
    ("c1_synthesize_reordered", "synthesize", "c1_single_bound.json",
     {"extension_index": 0, "reorder": "reorders/c1_swap_t1.json"}),
    ("c1_privacy_preserving_synthesize", "synthesize", "c1_privacy_preserving.json", {}),
    ("c2_refused_synthesize", "synthesize", "c2_ratio_violation.json", {}),
    ("c1_verify_composite", "verify", "c1_single_bound.json", {"artifact": "composite"}),
    ("c1_verify_tampered", "verify", "c1_tampered_composite.json", {"artifact": "composite"}),
    ("c1_verify_tau", "verify", "c1_single_bound.json", {"artifact": "tau"}),
    ("c2_verify_violation", "verify", "c2_ratio_violation.json", {"artifact": "gamma"}),
    ("c1_plot_gamma", "plot-data", "c1_single_bound.json", {"artifact": "gamma"}),
    ("c1_plot_composite", "plot-data", "c1_single_bound.json", {"artifact": "composite"}),
    ("c3_plot_empty", "plot-data", "c3_posterior_mean.json", {"artifact": "gamma_b"}),
]


def run_case(verb: str, problem: Path, options: Dict, problems_dir: Path):
    if verb == "check-dominance":
        return cmd_check_dominance(problem, options.get("first", "gamma"), options.get("second", "gamma_b"))
    if verb == "min-extension":
        return cmd_min_extension(problem, options.get("mode", "one"))
    if verb == "frontier":
        return cmd_frontier(problem)
    if verb == "synthesize":
        reorder = options.get("reorder")
        return cmd_synthesize(
            problem, options.get("extension_index", 0), problems_dir / reorder if reorder else None
        )
    if verb == "verify":
        return cmd_verify(problem, options.get("artifact", "gamma"))
    return cmd_plot_data(problem, options.get("artifact", "gamma"))


def generate_golden(out_dir: Optional[Path] = None, problems_dir: Optional[Path] = None) -> Dict[str, str]:
    """Write one golden file per case; returns {file name: status}."""
    out_dir = Path(out_dir or AppConfig.GOLDEN_DIR)
    problems_dir = Path(problems_dir or AppConfig.PROBLEMS_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)

    print("\n" + "="*60)
    print("Generating golden result files")
    print("="*60)

    statuses = {}
    for name, verb, problem_name, options in CASES:
        problem = problems_dir / problem_name
        if not problem.exists():
            print(f"⚠ Problem file not found at {problem}; skipping {name}")
            continue
        result = run_case(verb, problem, options, problems_dir)
        if verb == "plot-data" and result.status == "ok":
            target = out_dir / f"{name}.csv"
            target.write_text(result.payload["csv"], encoding="utf-8")
        else:
            target = out_dir / f"{name}.json"
            target.write_text(result.to_json(), encoding="utf-8")
        statuses[target.name] = result.status
        mark = "✓" if result.status == "ok" else "✗"
        print(f"{mark} {target.name}: {result.status}")

    print("\n" + "="*60)
    print("Golden Summary")
    print("="*60)
    ok = sum(1 for s in statuses.values() if s == "ok")
    print(f"Written: {len(statuses)} files ({ok} ok, {len(statuses) - ok} with a non-ok status)")
    print(f"Directory: {out_dir}")
    print("="*60)
    return statuses


if __name__ == "__main__":
    generate_golden()
