"""REST API endpoints for the SL(2) endoscopy workbench."""

from datetime import datetime

from fastapi import APIRouter

from src.sl2_endoscopy.api.dependencies import RequestIdDep, parse_error_response, resolve_ext
from src.sl2_endoscopy.arith.parsing import parse_field_spec
from src.sl2_endoscopy.checks.suite import CheckSuite
from src.sl2_endoscopy.config import settings
from src.sl2_endoscopy.matrices import TestFunction
from src.sl2_endoscopy.orbital import orbital
from src.sl2_endoscopy.quad_ext import ExtKind, KappaChar, canonical_ext, parse_ext_spec
from src.sl2_endoscopy.schemas import (
    ClassifyReport,
    EpsilonReport,
    EpsilonRequest,
    ExtRequest,
    FLCheckRequest,
    FLReportModel,
    HealthCheckResponse,
    OrbitalReportModel,
    OrbitalRequest,
    RunConfig,
    SuiteReportModel,
    VerifyRequest,
)
from src.sl2_endoscopy.services.report_service import ReportService
from src.sl2_endoscopy.transfer import fl_check
from src.sl2_endoscopy.utils.exceptions import ParseError
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)

router = APIRouter(tags=["API"])


def _config(command: str, **values) -> RunConfig:
    return RunConfig(command=command, seed=settings.DEFAULT_SEED, **values)


@router.post("/classify", response_model=ClassifyReport)
async def classify(request: ExtRequest, request_id: RequestIdDep) -> ClassifyReport:
    """
    Classify a quadratic extension.

    Args:
        request: Field and extension specs
        request_id: Request ID for correlation

    Returns:
        Kind, presentation data and eps(-1)
    """
    logger.info("Received classify request", extra={"request_id": request_id, "ext": request.ext})
    E = resolve_ext(request)
    return ReportService(_config("classify", field=request.field, ext=request.ext)).classify(E)


@router.post("/epsilon", response_model=EpsilonReport)
async def epsilon(request: EpsilonRequest, request_id: RequestIdDep) -> EpsilonReport:
    """Evaluate eps_{E/F} at an element of F."""
    logger.info("Received epsilon request", extra={"request_id": request_id, "ext": request.ext})
    E = resolve_ext(request)
    try:
        x = E.base.element(request.x)
    except ParseError as e:
        raise parse_error_response(e) from e
    config = _config("epsilon", field=request.field, ext=request.ext, x=request.x)
    return ReportService(config).epsilon(E, request.x, E.epsilon(x))


@router.post("/orbital", response_model=OrbitalReportModel)
async def orbital_integral(request: OrbitalRequest, request_id: RequestIdDep) -> OrbitalReportModel:
    """
    Orbital or kappa-orbital integral at t = a + b tau.

    Args:
        request: Field, extension, t, test function and optional kappa
        request_id: Request ID for correlation

    Returns:
        Exact value with its cell decomposition
    """
    logger.info("Received orbital request", extra={"request_id": request_id, "ext": request.ext})
    E = resolve_ext(request)
    try:
        t = E.element(request.a, request.b)
        f = TestFunction.parse(request.f)
        kappa = KappaChar(parse_ext_spec(E.base, request.kappa)) if request.kappa else KappaChar()
    except ParseError as e:
        raise parse_error_response(e) from e
    config = _config(
        "orbital", field=request.field, ext=request.ext, a=request.a, b=request.b, f=request.f, kappa=request.kappa
    )
    return ReportService(config).orbital(E, str(t), f.label, orbital(E, t, f, kappa))


@router.post("/fl-check", response_model=FLReportModel)
async def fundamental_lemma(request: FLCheckRequest, request_id: RequestIdDep) -> FLReportModel:
    """Check that the transfer of 1_K is the unit of the endoscopic torus."""
    logger.info("Received fl-check request", extra={"request_id": request_id, "ext": request.ext})
    E = resolve_ext(request)
    config = _config("fl-check", field=request.field, ext=request.ext, depth=request.depth, level=request.level)
    return ReportService(config).fl_check(fl_check(E, depth=request.depth, level=request.level))


@router.post("/verify", response_model=SuiteReportModel)
async def verify(request: VerifyRequest, request_id: RequestIdDep) -> SuiteReportModel:
    """
    Run the acceptance suite.

    Args:
        request: Suite options
        request_id: Request ID, reused as the run id

    Returns:
        Per-check verdicts with timings
    """
    logger.info(
        "Received verification request",
        extra={"request_id": request_id, "mode": request.orchestration_mode, "quick": request.quick},
    )
    suite = CheckSuite(mode=request.orchestration_mode, quick=request.quick, seed=request.seed, run_id=request_id)
    aggregated = await suite.execute()
    config = RunConfig(command="verify", quick=request.quick, seed=suite.context.seed)
    return ReportService(config).suite(aggregated, include_timings=True)


@router.get("/health", response_model=HealthCheckResponse)
async def health_check() -> HealthCheckResponse:
    """
    Health check endpoint.

    Runs a small exact computation to confirm the arithmetic stack loads.

    Returns:
        Health status
    """
    arithmetic_status = "healthy"
    try:
        E = canonical_ext(parse_field_spec("Qp:p=3,prec=4"), ExtKind.UNRAMIFIED)
        if E.epsilon(3) != -1:
            arithmetic_status = "unhealthy: eps(3) != -1 for the unramified extension of Q_3"
    except Exception as e:
        logger.error(f"Arithmetic health check failed: {str(e)}")
        arithmetic_status = f"unhealthy: {str(e)}"

    overall_status = "healthy" if arithmetic_status == "healthy" else "degraded"
    return HealthCheckResponse(
        status=overall_status,
        version=settings.APP_VERSION,
        arithmetic=arithmetic_status,
        timestamp=datetime.utcnow(),
    )
