"""Instance files, JSON reports, hierarchy dumps and YAML experiment configs."""
import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from pydantic import BaseModel

from lcmst.api.schemas import ExperimentConfig, SolveReport
from lcmst.core.logger import get_logger
from lcmst.graph.instance import Instance, parse_instance, serialize_instance

logger = get_logger(__name__)

PathLike = Union[str, Path]

TIMING_FIELDS = ("wall_time_ms",)


def read_instance(path: PathLike) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def write_instance(instance: Instance, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_instance(instance), encoding="utf-8")
    return path


def write_json(payload: Union[BaseModel, Dict[str, Any], list], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def report_path(directory: PathLike, report: SolveReport) -> Path:
    return Path(directory) / f"{report.instance_id}-{report.variant}.json"


def write_report(report: SolveReport, directory: PathLike) -> Path:
    path = write_json(report, report_path(directory, report))
    logger.debug("report_written", path=str(path), variant=report.variant)
    return path


def without_timing(report: Dict[str, Any]) -> Dict[str, Any]:
    """Report dict with wall-clock fields removed, for reproducibility comparisons."""
    return {k: v for k, v in report.items() if k not in TIMING_FIELDS}


def write_hierarchy(hierarchy, directory: PathLike, stem: str) -> Dict[str, Path]:
    """Write ``<stem>.hierarchy.json`` and ``<stem>.hierarchy.dot``."""
    directory = Path(directory)
    paths = {
        "json": write_json(hierarchy.dump(), directory / f"{stem}.hierarchy.json"),
        "dot": directory / f"{stem}.hierarchy.dot",
    }
    paths["dot"].write_text(hierarchy.to_dot(), encoding="utf-8")
    return paths


def load_config(path: Optional[PathLike] = None, **overrides) -> ExperimentConfig:
    """Experiment config from a YAML file, with non-None keyword overrides applied on top."""
    data: Dict[str, Any] = {}
    if path is not None:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.model_validate(data)
