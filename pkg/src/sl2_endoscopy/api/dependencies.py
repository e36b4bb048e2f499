"""FastAPI dependencies for request processing."""

from typing import Annotated
from uuid import uuid4

from fastapi import Depends, Header, HTTPException

from src.sl2_endoscopy.arith.local_field import LocalField
from src.sl2_endoscopy.arith.parsing import parse_field_spec
from src.sl2_endoscopy.quad_ext import QuadExt, parse_ext_spec
from src.sl2_endoscopy.schemas import ExtRequest
from src.sl2_endoscopy.utils.exceptions import ParseError
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)


async def get_request_id(
    x_request_id: str | None = Header(None, alias="X-Request-ID"),
) -> str:
    """
    Get or generate request ID for correlation tracking.

    Args:
        x_request_id: Request ID from header

    Returns:
        Request ID string
    """
    if x_request_id:
        return x_request_id
    return str(uuid4())


RequestIdDep = Annotated[str, Depends(get_request_id)]


def parse_error_response(e: ParseError) -> HTTPException:
    """400 with the positional diagnostic."""
    logger.warning(f"Rejected spec: {e.text!r}", extra={"position": e.position})
    return HTTPException(
        status_code=400,
        detail={"error": "ParseError", "message": str(e).splitlines()[0], "position": e.position},
    )


def resolve_field(spec: str) -> LocalField:
    try:
        return parse_field_spec(spec)
    except ParseError as e:
        raise parse_error_response(e) from e


def resolve_ext(request: ExtRequest) -> QuadExt:
    """Parse the field and extension named by a request body."""
    F = resolve_field(request.field)
    try:
        return parse_ext_spec(F, request.ext)
    except ParseError as e:
        raise parse_error_response(e) from e
