"""
Pydantic Models
Data schemas for verdict reports and API requests and responses
"""

from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field


class VerdictReport(BaseModel):
    """Outcome of one query or ensemble check"""
    query_id: str = Field(..., description="Query or constraint id")
    query_text: str = Field(..., description="Query as written in the spec")
    kind: str = Field(..., description="hypothesis, estimate, compare, expect, simulate or ensemble")
    parameters: Dict[str, Any] = Field(default={}, description="Echo of every parameter used")
    decision: str = Field(..., description="accept, reject, inconclusive, holds, fails, estimated or simulated")
    satisfied: Optional[int] = Field(None, description="Runs satisfying the property (m)")
    runs: int = Field(..., ge=0, description="Runs consumed (k)")
    interval: Optional[Tuple[float, float]] = Field(None, description="Confidence interval of a probability")
    point_estimate: Optional[float] = Field(None, ge=0, le=1, description="m/k")
    mean: Optional[float] = Field(None, description="Expected-value mean")
    half_width: Optional[float] = Field(None, ge=0, description="Expected-value confidence half-width")
    ratio: Optional[float] = Field(None, description="Estimated Pr(phi1)/Pr(phi2)")
    relations: List[str] = Field(default=[], description="Per-relation ensemble verdicts")
    artifacts: List[str] = Field(default=[], description="Files written for this query")
    seed: Optional[int] = Field(None, description="Master seed of the run source")
    source: str = Field(..., description="Where the runs came from")
    wall_clock: float = Field(..., ge=0, description="Seconds spent")


class SpecRequest(BaseModel):
    """Spec text to validate or expand"""
    spec: str = Field(..., description="Spec file contents")
    wcet: Dict[str, int] = Field(default={}, description="Extra WCET entries")


class DiagnosticItem(BaseModel):
    """Single validation finding"""
    code: str = Field(..., description="Error class name")
    severity: str = Field(..., description="Severity: critical or major")
    message: str = Field(..., description="Description")
    subject: str = Field(default="", description="Name the finding is about")


class ValidationResponse(BaseModel):
    """Validation outcome"""
    valid: bool = Field(..., description="True when there are no diagnostics")
    diagnostics: List[DiagnosticItem] = Field(default=[], description="Findings")


class ExpandedConstraint(BaseModel):
    """One constraint and the relations it expands to"""
    name: Optional[str] = Field(None, description="Constraint id")
    relations: List[str] = Field(default=[], description="Relations in spec syntax")
    symbolic: List[str] = Field(default=[], description="Relations in symbolic notation")


class ExpandResponse(BaseModel):
    """Expansion of every constraint of a spec"""
    constraints: List[ExpandedConstraint] = Field(default=[], description="Expanded constraints")


class CheckRequest(BaseModel):
    """Query against the bundled model"""
    spec: Optional[str] = Field(None, description="Spec text; defaults to the bundled AV spec")
    model: Optional[Dict[str, Any]] = Field(None, description="Model JSON; defaults to the bundled AV model")
    query_id: str = Field(..., min_length=1, description="Query or constraint id")
    seed: Optional[int] = Field(None, description="Master seed")
    runs: Optional[int] = Field(None, ge=1, description="Run count for ensembles and fixed-size queries")
    alpha: Optional[float] = Field(None, gt=0, lt=0.5, description="False-positive strength")
    beta: Optional[float] = Field(None, gt=0, lt=0.5, description="False-negative strength")
    delta: Optional[float] = Field(None, gt=0, lt=0.5, description="Indifference half-width")
    epsilon: Optional[float] = Field(None, gt=0, lt=1, description="Estimation precision")
    max_runs: Optional[int] = Field(None, ge=1, le=20000, description="Cap for sequential tests")


class HealthStatus(BaseModel):
    """Health check response"""
    status: str = Field(..., description="Service status")
    constraints: int = Field(..., description="Constraints in the bundled spec")
    message: str = Field(default="", description="Additional information")
