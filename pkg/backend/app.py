"""
FastAPI Application
HTTP service for validating, expanding and checking PrCCSL specs against the bundled AV model
"""

import logging
import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from fastapi import FastAPI, HTTPException  # noqa: E402
from fastapi.middleware.cors import CORSMiddleware  # noqa: E402

from backend.avcase.bundle import build_av_bundle  # noqa: E402
from backend.config import get_settings  # noqa: E402
from backend.errors import DegenerateDenominator, InvalidModel, PrccslError, SpecSyntaxError  # noqa: E402
from backend.models.schemas import (  # noqa: E402
    CheckRequest,
    DiagnosticItem,
    ExpandedConstraint,
    ExpandResponse,
    HealthStatus,
    SpecRequest,
    ValidationResponse,
    VerdictReport,
)
from backend.simulator.model import parse_model  # noqa: E402
from backend.smc.runner import CheckOptions, QueryRunner, simulation_sources  # noqa: E402
from backend.speclang.parser import parse_spec  # noqa: E402
from backend.speclang.printer import format_query, format_relation, format_relation_symbolic  # noqa: E402
from backend.speclang.templates import expand_spec  # noqa: E402
from backend.speclang.validator import validate_spec  # noqa: E402

logger = logging.getLogger(__name__)

# Initialize FastAPI app
app = FastAPI(
    title="PrCCSL Toolkit",
    description="Probabilistic clock constraint checking by statistical model checking",
    version="1.0.0"
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.on_event("startup")
async def startup_event():
    """Load the AV bundle once so the first request does not pay for it"""
    try:
        bundle = build_av_bundle()
        logger.info("AV bundle ready: %d constraints, %d queries", len(bundle.spec.constraints), len(bundle.spec.queries))
    except (OSError, PrccslError) as e:
        logger.warning("AV bundle unavailable: %s", e)


def _parse(text: str):
    try:
        return parse_spec(text)
    except SpecSyntaxError as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.get("/", tags=["Health"])
async def root():
    """Root endpoint"""
    return {
        "message": "PrCCSL Toolkit API",
        "version": "1.0.0",
        "docs": "/docs"
    }


@app.get("/health", response_model=HealthStatus, tags=["Health"])
async def health_check():
    """Health check endpoint"""
    try:
        bundle = build_av_bundle()
    except (OSError, PrccslError) as e:
        raise HTTPException(status_code=503, detail=f"AV bundle unavailable: {e}")

    return HealthStatus(
        status="healthy",
        constraints=len(bundle.spec.constraints),
        message=f"AV model with {len(bundle.model.automata)} automata loaded"
    )


@app.post("/api/validate", response_model=ValidationResponse, tags=["Specs"])
async def validate(request: SpecRequest):
    """
    Parse and validate a spec

    Args:
        request: Spec text and optional WCET entries

    Returns:
        Diagnostics; empty when the spec is valid
    """
    spec = _parse(request.spec)
    diagnostics = validate_spec(spec, request.wcet or None)
    return ValidationResponse(
        valid=not diagnostics,
        diagnostics=[
            DiagnosticItem(code=d.code, severity=d.severity, message=d.message, subject=d.subject or "")
            for d in diagnostics
        ],
    )


@app.post("/api/expand", response_model=ExpandResponse, tags=["Specs"])
async def expand(request: SpecRequest):
    """Expand every constraint of a spec into relations"""
    spec = _parse(request.spec)
    try:
        expanded = expand_spec(spec, request.wcet)
    except PrccslError as e:
        raise HTTPException(status_code=400, detail=str(e))

    return ExpandResponse(constraints=[
        ExpandedConstraint(
            name=name,
            relations=[format_relation(r) for r in relations],
            symbolic=[format_relation_symbolic(r) for r in relations],
        )
        for name, relations in expanded
    ])


@app.get("/api/queries", tags=["Specs"])
async def list_queries():
    """Queries of the bundled AV spec"""
    bundle = build_av_bundle()
    return {"queries": [{"id": q.name, "text": format_query(q)} for q in bundle.spec.queries]}


@app.post("/api/check", response_model=VerdictReport, tags=["Checking"])
def check(request: CheckRequest):
    """
    Run a query or constraint check against the bundled AV model or a posted one

    Args:
        request: Query id, optional spec and model, parameter overrides

    Returns:
        Verdict report
    """
    bundle = build_av_bundle()
    spec = _parse(request.spec) if request.spec else bundle.spec
    try:
        model = parse_model(request.model) if request.model else bundle.model
    except InvalidModel as e:
        raise HTTPException(status_code=400, detail=f"Invalid model: {e}")
    seed = get_settings().seed if request.seed is None else request.seed
    options = CheckOptions(
        seed=seed,
        runs=request.runs,
        alpha=request.alpha,
        beta=request.beta,
        delta=request.delta,
        epsilon=request.epsilon,
        max_runs=request.max_runs,
    )
    runner = QueryRunner(spec, simulation_sources(model, seed), options, bundle.wcet)

    try:
        return runner.run(request.query_id)
    except DegenerateDenominator as e:
        raise HTTPException(status_code=422, detail=str(e))
    except PrccslError as e:
        raise HTTPException(status_code=400, detail=f"{type(e).__name__}: {e}")
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Error checking query: {str(e)}")


if __name__ == "__main__":
    import uvicorn

    settings = get_settings()
    uvicorn.run(
        "backend.app:app",
        host=settings.host,
        port=settings.port,
        reload=True
    )
