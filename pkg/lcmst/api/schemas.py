from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator


class ProblemKind(str, Enum):
    """Problem families understood by the instance format."""
    LCMST = "lcmst"
    LCST = "lcst"
    DST = "dst"
    GST = "gst"


class Algorithm(str, Enum):
    """Solvers selectable from the CLI and the harness."""
    MAIN = "main"
    LP_SHORTCUTS = "lp-shortcuts"
    EXACT = "exact"
    ALL = "all"


class GeneratorKind(str, Enum):
    """Seeded planar instance families."""
    GRID = "grid"
    TRIANGULATED_RANDOM = "triangulated-random"
    STACKED_TRIANGULATION = "stacked-triangulation"
    GADGET_FIG1_ANALOG = "gadget-fig1-analog"
    GST_GADGET = "gst-gadget"


class AuditLevel(str, Enum):
    """How much of the invariant suite a run re-verifies."""
    NONE = "none"
    BASIC = "basic"
    FULL = "full"


class BudgetKind(str, Enum):
    """Sources of the per-region weight budget for shortcut paths."""
    EXACT_OPT = "exact-opt"
    DIAMETER_LOWER_BOUND = "diameter-lower-bound"
    USER = "user"


class ParameterPreset(str, Enum):
    """How (alpha, beta, delta) are chosen."""
    EXPLICIT = "explicit"
    EPSILON = "epsilon"
    QUASI_POLY = "quasi-poly"
    LP = "lp"


class SolveParams(BaseModel):
    """Algorithm parameters; ``None`` fields are filled from the preset or settings."""

    alpha: Optional[float] = Field(None, description="Division factor", ge=1)
    beta: Optional[float] = Field(None, description="Piece/guess resolution", gt=0)
    delta: Optional[float] = Field(None, description="Recursive greedy exponent", gt=0, le=1)
    epsilon: Optional[float] = Field(None, description="Target slack for presets", gt=0)
    preset: ParameterPreset = Field(ParameterPreset.EXPLICIT, description="Parameter preset")
    steiner: bool = Field(False, description="Use the terminal-weighted Steiner variant")

    class Config:
        json_schema_extra = {
            "example": {"alpha": 2, "beta": 3, "delta": 0.5, "preset": "explicit"}
        }


class Violation(BaseModel):
    """One audited inequality that did not hold."""

    check: str = Field(..., description="Invariant family and name")
    detail: str = Field(..., description="Offending values")
    mode: str = Field("asserted", description="asserted or measured")


class SolveReport(BaseModel):
    """Per-instance, per-algorithm run report."""

    instance_id: str
    variant: str
    params: Dict[str, Any] = Field(default_factory=dict)
    weight: Optional[int] = None
    opt_weight: Optional[int] = None
    ratio: Optional[float] = None
    max_root_distance: Optional[int] = None
    h: int
    slack: Optional[float] = None
    depth: int = 0
    guesses_evaluated: int = 0
    lcst_calls: int = 0
    wall_time_ms: float = 0.0
    edges: List[Tuple[int, int]] = Field(default_factory=list)
    stats: Dict[str, Any] = Field(default_factory=dict)
    violations: List[Violation] = Field(default_factory=list)


class ExperimentConfig(BaseModel):
    """Seeded experiment description."""

    generator: GeneratorKind = Field(GeneratorKind.GRID, description="Instance family")
    size: int = Field(9, description="Target vertex count", ge=1)
    seed: int = Field(0, description="Base seed")
    count: int = Field(1, description="Instances to generate (seeds seed..seed+count-1)", ge=1)
    h_factor: float = Field(1.2, description="h = ceil(h_factor * root eccentricity)", gt=0)
    infeasible: bool = Field(False, description="Generate h one below the eccentricity")
    adversarial: bool = Field(False, description="Correlate low weight with high length")
    length_range: Tuple[int, int] = Field((1, 5), description="Inclusive edge length range")
    weight_range: Tuple[int, int] = Field((1, 20), description="Inclusive edge weight range")
    algorithm: Algorithm = Field(Algorithm.ALL, description="Algorithms to run")
    params: SolveParams = Field(default_factory=SolveParams)
    budget: BudgetKind = Field(BudgetKind.EXACT_OPT, description="Shortcut budget provider")
    budget_value: Optional[int] = Field(None, description="Budget for the user provider", ge=0)
    audit: AuditLevel = Field(AuditLevel.BASIC, description="Audit level")
    output_dir: Optional[str] = Field(None, description="Report directory")

    @field_validator("length_range", "weight_range")
    @classmethod
    def ordered_range(cls, v):
        """Ranges are inclusive and nonnegative."""
        low, high = v
        if low < 0 or high < low:
            raise ValueError("range must satisfy 0 <= low <= high")
        return v


class RegionDump(BaseModel):
    """One hierarchy node as written to hierarchy dumps."""

    region_id: int
    parent: Optional[int]
    depth: int
    edges: List[Tuple[int, int]]
    boundary: List[Tuple[int, int]]
    boundary_length: int
    boundary_weight: int
    boundary_components: int
    pieces: List[List[int]] = Field(default_factory=list)
    children: List[int] = Field(default_factory=list)


class HierarchyDump(BaseModel):
    """Hierarchy tree with measured stats."""

    alpha: float
    h: int
    depth: int
    regions: List[RegionDump]

