"""
Command-line entry point.

    python -m lcmst gen --generator grid --size 9 --seed 7 --out corpus/
    python -m lcmst solve corpus/7-*.txt --algo all --audit full
    python -m lcmst solve --config experiment.yaml --out reports/
    python -m lcmst reduce gadget.txt --from gst --to lcmst --out gadget-lcmst.txt
    python -m lcmst solve-exact instance.txt
    python -m lcmst audit instance.txt

Exit codes: 0 success, 1 asserted invariant violations, 2 toolkit errors.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from lcmst.algorithms.oracle import solve_exact
from lcmst.api.reduce import parse_gst_normalized, run_reduction, write_bundle
from lcmst.api.schemas import (
    Algorithm,
    AuditLevel,
    BudgetKind,
    GeneratorKind,
    ParameterPreset,
    ProblemKind,
    SolveParams,
)
from lcmst.api.solve import exact_report, solve_instance
from lcmst.core.config import get_settings
from lcmst.core.exceptions import LcmstError
from lcmst.core.logger import get_logger, setup_logging
from lcmst.harness.audit import asserted
from lcmst.harness.experiment import run_experiment
from lcmst.harness.generators import generate_instance
from lcmst.utils.io import load_config, read_instance, write_hierarchy, write_instance, write_report

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_ERROR = 2


def _add_generator_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--generator", type=GeneratorKind, choices=list(GeneratorKind), help="Instance family")
    parser.add_argument("--size", type=int, help="Target vertex count")
    parser.add_argument("--seed", type=int, help="Base seed")
    parser.add_argument("--count", type=int, help="Number of seeds")
    parser.add_argument("--h-factor", type=float, help="h = ceil(h_factor * root eccentricity)")
    parser.add_argument("--infeasible", action="store_true", default=None, help="Set h below the eccentricity")
    parser.add_argument("--adversarial", action="store_true", default=None, help="Low weight on long edges")


def _add_solver_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--algo", type=Algorithm, choices=list(Algorithm), help="Algorithms to run")
    parser.add_argument("--alpha", type=float, help="Division factor")
    parser.add_argument("--beta", type=float, help="Piece and guess resolution")
    parser.add_argument("--delta", type=float, help="Recursive greedy exponent")
    parser.add_argument("--epsilon", type=float, help="Target slack for presets")
    parser.add_argument("--preset", type=ParameterPreset, choices=list(ParameterPreset), help="Parameter preset")
    parser.add_argument("--steiner", action="store_true", help="Terminal-weighted Steiner variant")
    parser.add_argument("--budget", type=BudgetKind, choices=list(BudgetKind), help="Shortcut budget provider")
    parser.add_argument("--budget-value", type=int, help="Budget for the user provider")
    parser.add_argument("--audit", type=AuditLevel, choices=list(AuditLevel), help="Audit level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcmst", description="Length-constrained spanning and Steiner trees")
    parser.add_argument("--log-level", default=None, help="Overrides LCMST_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate seeded instances")
    gen.add_argument("--config", type=Path, help="YAML experiment config")
    _add_generator_args(gen)
    gen.add_argument("--out", type=Path, default=Path("."), help="Output directory")

    solve = sub.add_parser("solve", help="Solve one instance, or run a seeded experiment")
    solve.add_argument("instance", type=Path, nargs="?", help="Instance file; omit to run an experiment")
    solve.add_argument("--config", type=Path, help="YAML experiment config")
    _add_generator_args(solve)
    _add_solver_args(solve)
    solve.add_argument("--out", type=Path, help="Report directory")
    solve.add_argument("--dump-hierarchy", action="store_true", help="Write hierarchy JSON and DOT next to reports")

    reduce = sub.add_parser("reduce", help="Transform an instance into another problem kind")
    reduce.add_argument("instance", type=Path)
    reduce.add_argument("--from", dest="source", type=ProblemKind, choices=list(ProblemKind))
    reduce.add_argument("--to", dest="target", type=ProblemKind, choices=list(ProblemKind), required=True)
    reduce.add_argument("--h", type=int, help="Length bound of the group Steiner gadget")
    reduce.add_argument("--normalize-groups", action="store_true", help="Make overlapping groups disjoint first")
    reduce.add_argument("--certify", action="store_true", help="Compare exact optima of both sides")
    reduce.add_argument("--out", type=Path, required=True, help="Target instance file")

    exact = sub.add_parser("solve-exact", help="Exact optimum of a tiny instance")
    exact.add_argument("instance", type=Path)

    audit = sub.add_parser("audit", help="Run every algorithm on an instance with the full audit")
    audit.add_argument("instance", type=Path)
    _add_solver_args(audit)
    return parser


def _params(args: argparse.Namespace) -> SolveParams:
    return SolveParams(
        alpha=args.alpha,
        beta=args.beta,
        delta=args.delta,
        epsilon=args.epsilon,
        preset=args.preset or ParameterPreset.EXPLICIT,
        steiner=args.steiner,
    )


def _params_override(args: argparse.Namespace) -> Optional[dict]:
    """Solver flags as a params dict, or None when no solver flag was given."""
    params = _params(args)
    if params == SolveParams():
        return None
    return params.model_dump()


def _config(args: argparse.Namespace, **extra):
    return load_config(
        getattr(args, "config", None),
        generator=args.generator,
        size=args.size,
        seed=args.seed,
        count=args.count,
        h_factor=args.h_factor,
        infeasible=args.infeasible,
        adversarial=args.adversarial,
        **extra,
    )


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def cmd_gen(args: argparse.Namespace) -> int:
    config = _config(args)
    for i in range(config.count):
        seed = config.seed + i
        instance = generate_instance(config, seed)
        path = write_instance(instance, args.out / f"{config.generator.value}-{seed}.txt")
        print(path)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    settings = get_settings()
    if args.instance is None:
        config = _config(
            args,
            algorithm=args.algo,
            params=_params_override(args),
            budget=args.budget,
            budget_value=args.budget_value,
            audit=args.audit,
            output_dir=str(args.out) if args.out else None,
        )
        result = run_experiment(config, settings)
        print(result.output_dir / "summary.csv")
        return EXIT_VIOLATIONS if result.failed else EXIT_OK

    instance = read_instance(args.instance)
    outcome = solve_instance(
        instance,
        args.algo or Algorithm.ALL,
        _params(args),
        args.audit or AuditLevel.BASIC,
        args.budget or BudgetKind.EXACT_OPT,
        args.budget_value,
        settings,
    )
    for report in outcome.reports:
        if args.out:
            write_report(report, args.out)
        _print_json(report.model_dump(mode="json"))
    if args.out and args.dump_hierarchy and outcome.main is not None:
        write_hierarchy(outcome.main.hierarchy, args.out, instance.instance_id)
    return EXIT_VIOLATIONS if asserted(outcome.violations) else EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    if args.normalize_groups:
        instance = parse_gst_normalized(args.instance.read_text(encoding="utf-8"))
    else:
        instance = read_instance(args.instance)
    bundle, violations = run_reduction(instance, args.source, args.target, h=args.h, check=args.certify)
    paths = write_bundle(bundle, args.out)
    _print_json(
        {
            "reduction": bundle.name,
            "instance": str(paths["instance"]),
            "sidecar": str(paths["sidecar"]),
            "source_opt": bundle.source_opt,
            "target_opt": bundle.target_opt,
            "violations": [v.model_dump() for v in violations],
        }
    )
    return EXIT_VIOLATIONS if asserted(violations) else EXIT_OK


def cmd_solve_exact(args: argparse.Namespace) -> int:
    instance = read_instance(args.instance)
    result = solve_exact(instance, get_settings())
    _print_json(exact_report(instance, result).model_dump(mode="json"))
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    instance = read_instance(args.instance)
    outcome = solve_instance(
        instance,
        args.algo or Algorithm.ALL,
        _params(args),
        args.audit or AuditLevel.FULL,
        args.budget or BudgetKind.EXACT_OPT,
        args.budget_value,
    )
    _print_json(
        {
            "instance_id": instance.instance_id,
            "violations": [v.model_dump() for v in outcome.violations],
            "asserted": len(asserted(outcome.violations)),
        }
    )
    return EXIT_VIOLATIONS if asserted(outcome.violations) else EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "reduce": cmd_reduce,
    "solve-exact": cmd_solve_exact,
    "audit": cmd_audit,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    setup_logging(args.log_level or settings.log_level)
    if getattr(args, "budget", None) == BudgetKind.USER and args.budget_value is None:
        parser.error("--budget user needs --budget-value")

    try:
        return COMMANDS[args.command](args)
    except LcmstError as e:
        logger.error("command_failed", command=args.command, error=type(e).__name__, detail=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
