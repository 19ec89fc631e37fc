from fastapi import APIRouter

from app.api.v1.endpoints import rules
from app.api.v1.endpoints import stats

api_router = APIRouter(prefix="/api/v1")

api_router.include_router(rules.router, prefix="/rules", tags=["rules"])
api_router.include_router(stats.router, prefix="/stats", tags=["stats"])
