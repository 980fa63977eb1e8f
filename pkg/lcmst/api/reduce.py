"""Apply a reduction to an instance file and write the target instance with its sidecar tables."""
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from lcmst.algorithms.reductions import ReductionBundle, certify, normalize_groups, reduce_instance
from lcmst.api.schemas import ProblemKind, Violation
from lcmst.core.config import Settings, get_settings
from lcmst.core.exceptions import ReductionError
from lcmst.core.logger import get_logger
from lcmst.graph.instance import Instance, make_instance, parse_instance
from lcmst.harness.audit import audit_reduction
from lcmst.utils.io import write_instance, write_json

logger = get_logger(__name__)


def parse_gst_normalized(text: str) -> Instance:
    """
    Parse a GST instance whose groups may overlap.

    Group lines are read aside, the rest is parsed as usual, and the groups are
    made disjoint with :func:`normalize_groups` before validation.
    """
    kept, raw_groups = [], []
    for line in text.splitlines():
        fields = line.split("#", 1)[0].split()
        if fields and fields[0] == "g":
            raw_groups.append([int(x) for x in fields[1:]])
        else:
            kept.append(line)
    base = parse_instance("\n".join(kept))
    if base.kind != ProblemKind.GST:
        raise ReductionError(f"group normalization needs a gst instance, got {base.kind.value}")
    count, edges, groups = normalize_groups(base.vertex_count, [tuple(e) for e in base.edges], raw_groups)
    return make_instance(ProblemKind.GST, count, edges, base.root, base.h, groups=groups)


def run_reduction(
    instance: Instance,
    source: Optional[ProblemKind],
    target: ProblemKind,
    h: Optional[int] = None,
    check: bool = False,
    settings: Optional[Settings] = None,
) -> Tuple[ReductionBundle, List[Violation]]:
    settings = settings or get_settings()
    if source is not None and ProblemKind(source) != instance.kind:
        raise ReductionError(f"--from {ProblemKind(source).value} does not match the {instance.kind.value} instance")
    options: Dict[str, int] = {}
    if instance.kind == ProblemKind.GST and h is not None:
        options["h"] = h
    if instance.kind == ProblemKind.LCMST:
        options["layer_cap"] = settings.layer_cap
    bundle = reduce_instance(instance, ProblemKind(target), **options)
    violations: List[Violation] = []
    if check:
        bundle = certify(bundle, settings)
        violations = audit_reduction(bundle, settings)
    logger.info(
        "reduction_applied",
        reduction=bundle.name,
        source_vertices=instance.vertex_count,
        target_vertices=bundle.target.vertex_count,
        target_edges=len(bundle.target.edges),
        violations=len(violations),
    )
    return bundle, violations


def write_bundle(bundle: ReductionBundle, out: Path) -> Dict[str, Path]:
    """Target instance at ``out`` and the correspondence tables next to it as ``<out>.map.json``."""
    out = Path(out)
    return {
        "instance": write_instance(bundle.target, out),
        "sidecar": write_json(bundle.sidecar(), out.with_name(out.name + ".map.json")),
    }
