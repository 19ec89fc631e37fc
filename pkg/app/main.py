from contextlib import asynccontextmanager
from typing import AsyncIterator

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from app import __version__
from app.api.v1.router import api_router
from app.config import settings
from app.core.logging import get_logger, setup_logging
from app.rules.types import VariantId

setup_logging(settings.log_level)
logger = get_logger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncIterator[None]:
    logger.info("variantlab API starting up...")
    logger.info("Documentation available at: /docs")
    yield
    logger.info("variantlab API shutting down...")


# Create FastAPI application instance
app = FastAPI(
    title="variantlab",
    description="Rules engine and statistics for chess variants",
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(api_router)


@app.get("/")
async def root():
    """Root endpoint - API information"""
    return {
        "message": "Welcome to the variantlab API",
        "version": __version__,
        "status": "running",
        "docs": "/docs",
        "redoc": "/redoc",
    }


# Health check endpoint
@app.get("/health")
async def health_check():
    """Health check endpoint for monitoring"""
    return JSONResponse(
        status_code=200,
        content={
            "status": "healthy",
            "service": "variantlab",
            "version": __version__,
            "variants": [v.value for v in VariantId],
            "services": {
                "rules": "/api/v1/rules",
                "stats": "/api/v1/stats",
            },
        },
    )


def main() -> None:
    import uvicorn

    uvicorn.run(
        "app.main:app",
        host="0.0.0.0",
        port=8000,
        log_level=settings.log_level.lower(),
    )


if __name__ == "__main__":
    main()
