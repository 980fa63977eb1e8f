from typing import Iterable, Optional, Sequence

from lcmst.api.schemas import ProblemKind
from lcmst.core.exceptions import LcmstError
from lcmst.core.logger import get_logger

logger = get_logger(__name__)


class ValidationError(LcmstError, ValueError):
    """Instance format or invariant error; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def validate_instance(
    kind: ProblemKind,
    vertex_count: int,
    edges: Sequence[tuple[int, int, int, int]],
    root: int,
    h: int,
    terminals: Optional[Iterable[int]] = None,
    groups: Optional[Sequence[Iterable[int]]] = None,
) -> None:
    """
    Validate raw instance fields against the instance invariants.

    Raises ValidationError listing every problem found.
    """
    errors = []

    if vertex_count < 1:
        errors.append("vertex_count must be positive")
    if h < 0:
        errors.append("h must be nonnegative")
    if not 0 <= root < vertex_count:
        errors.append(f"root {root}: vertex id out of range")

    directed = kind == ProblemKind.DST
    seen = set()
    for u, v, length, weight in edges:
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            errors.append(f"edge ({u},{v}): vertex id out of range")
            continue
        if u == v:
            errors.append(f"edge ({u},{v}): self-loop")
        if length < 0 or weight < 0:
            errors.append(f"edge ({u},{v}): negative length or weight")
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            errors.append(f"edge ({u},{v}): duplicate edge")
        seen.add(key)

    if terminals is not None:
        if kind not in (ProblemKind.LCST, ProblemKind.DST):
            errors.append(f"terminals are not allowed for {kind.value}")
        for t in terminals:
            if not 0 <= t < vertex_count:
                errors.append(f"terminal {t}: vertex id out of range")

    if groups is not None:
        if kind != ProblemKind.GST:
            errors.append(f"groups are not allowed for {kind.value}")
        covered = set()
        for index, group in enumerate(groups):
            members = set(group)
            if not members:
                errors.append(f"group {index} is empty")
            for v in members:
                if not 0 <= v < vertex_count:
                    errors.append(f"group {index}: vertex {v} id out of range")
            if covered & members:
                errors.append(f"group {index} overlaps an earlier group")
            covered |= members

    if errors:
        error_msg = "; ".join(errors)
        logger.warning("validation_failed", errors=error_msg)
        raise ValidationError(error_msg)


def is_nonnegative_int(token: str) -> bool:
    """Check that a token is a base-10 integer >= 0."""
    return token.isdigit()
