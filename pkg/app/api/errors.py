"""Translation of laboratory errors into HTTP errors."""
from fastapi import HTTPException, status

from app.core.exceptions import (
    FenSyntaxError,
    IllegalPositionError,
    LabError,
    VariantMismatchError,
)
from app.core.logging import get_logger

logger = get_logger(__name__)

# Input documents that cannot be read as a position at all.
_UNPROCESSABLE = (FenSyntaxError, IllegalPositionError, VariantMismatchError)


def http_error(exc: LabError) -> HTTPException:
    code = (
        status.HTTP_422_UNPROCESSABLE_ENTITY
        if isinstance(exc, _UNPROCESSABLE)
        else status.HTTP_400_BAD_REQUEST
    )
    logger.error("%s: %s", type(exc).__name__, exc)
    return HTTPException(status_code=code, detail=str(exc))
