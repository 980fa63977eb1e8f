"""Seeded experiment batches: generate, solve, audit, then write JSON reports and a CSV summary."""
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd
from joblib import Parallel, delayed

from lcmst.api.schemas import ExperimentConfig, SolveReport, Violation
from lcmst.api.solve import solve_instance
from lcmst.core.config import Settings, get_settings
from lcmst.core.exceptions import LcmstError
from lcmst.core.logger import get_logger
from lcmst.graph.instance import Instance
from lcmst.harness.audit import asserted
from lcmst.harness.generators import generate_instance
from lcmst.utils.io import write_instance, write_json, write_report

logger = get_logger(__name__)

SUMMARY_COLUMNS = [
    "seed",
    "instance_id",
    "variant",
    "vertices",
    "edges",
    "h",
    "weight",
    "opt_weight",
    "ratio",
    "slack",
    "depth",
    "guesses_evaluated",
    "lcst_calls",
    "wall_time_ms",
    "violations",
    "asserted_violations",
]

PIVOTS = {"main": "main", "lp": "lp-shortcuts"}


@dataclass
class ExperimentResult:
    reports: List[SolveReport]
    summary: pd.DataFrame
    output_dir: Path

    @property
    def violations(self) -> List[Violation]:
        return [v for r in self.reports for v in r.violations]

    @property
    def failed(self) -> bool:
        return bool(asserted(self.violations))


def _summary_row(seed: int, instance: Instance, report: SolveReport) -> Dict:
    return {
        "seed": seed,
        "instance_id": instance.instance_id,
        "variant": report.variant,
        "vertices": instance.vertex_count,
        "edges": len(instance.edges),
        "h": instance.h,
        "weight": report.weight,
        "opt_weight": report.opt_weight,
        "ratio": report.ratio,
        "slack": report.slack,
        "depth": report.depth,
        "guesses_evaluated": report.guesses_evaluated,
        "lcst_calls": report.lcst_calls,
        "wall_time_ms": report.wall_time_ms,
        "violations": len(report.violations),
        "asserted_violations": len(asserted(report.violations)),
    }


def run_seed(config: ExperimentConfig, seed: int, output_dir: Path, settings: Settings) -> List[SolveReport]:
    """One instance of the batch; its reports are written before returning."""
    instance = generate_instance(config, seed)
    write_instance(instance, output_dir / "instances" / f"{seed}-{instance.instance_id}.txt")
    try:
        outcome = solve_instance(
            instance,
            config.algorithm,
            config.params,
            config.audit,
            config.budget,
            config.budget_value,
            settings,
        )
    except LcmstError as e:
        dump = write_instance(instance, output_dir / "failures" / f"{seed}-{instance.instance_id}.txt")
        logger.error("experiment_instance_failed", seed=seed, instance_id=instance.instance_id, error=str(e), dump=str(dump))
        raise
    for report in outcome.reports:
        write_report(report, output_dir / "reports")
    return outcome.reports


def summarize(rows: List[Dict]) -> pd.DataFrame:
    """One row per instance and algorithm, plus ratio and slack pivot columns per instance."""
    frame = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
    if frame.empty:
        for name in PIVOTS:
            frame[f"ratio_{name}"] = pd.Series(dtype=float)
            frame[f"slack_{name}"] = pd.Series(dtype=float)
        return frame
    for name, variant in PIVOTS.items():
        picked = frame[frame["variant"].str.startswith(variant)].drop_duplicates("instance_id")
        picked = picked.set_index("instance_id")
        frame[f"ratio_{name}"] = frame["instance_id"].map(picked["ratio"])
        frame[f"slack_{name}"] = frame["instance_id"].map(picked["slack"])
    return frame.sort_values(["seed", "variant"]).reset_index(drop=True)


def run_experiment(config: ExperimentConfig, settings: Optional[Settings] = None) -> ExperimentResult:
    """Run every seed of the batch in parallel, then write ``summary.csv`` and ``config.json``."""
    settings = settings or get_settings()
    output_dir = Path(config.output_dir or settings.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    seeds = [config.seed + i for i in range(config.count)]

    logger.info(
        "experiment_started",
        generator=config.generator.value,
        size=config.size,
        seeds=len(seeds),
        algorithm=config.algorithm.value,
        workers=settings.max_workers,
    )
    batches = Parallel(n_jobs=settings.max_workers)(
        delayed(run_seed)(config, seed, output_dir, settings) for seed in seeds
    )

    reports, rows = [], []
    for seed, batch in zip(seeds, batches):
        instance = generate_instance(config, seed)
        for report in batch:
            reports.append(report)
            rows.append(_summary_row(seed, instance, report))
    summary = summarize(rows)
    summary.to_csv(output_dir / "summary.csv", index=False)
    write_json(config, output_dir / "config.json")

    result = ExperimentResult(reports=reports, summary=summary, output_dir=output_dir)
    logger.info(
        "experiment_finished",
        reports=len(reports),
        violations=len(result.violations),
        asserted=len(asserted(result.violations)),
        median_ratio_main=_median(summary, "ratio_main"),
    )
    return result


def _median(frame: pd.DataFrame, column: str) -> Optional[float]:
    if column not in frame or frame[column].dropna().empty:
        return None
    return float(frame[column].dropna().median())
