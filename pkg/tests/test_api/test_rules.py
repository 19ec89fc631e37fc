from unittest.mock import patch

import pytest
from httpx import AsyncClient

from app.notation.fen import STANDARD_START

PERFT_URL = "/api/v1/rules/perft"
MOVES_URL = "/api/v1/rules/moves"
STATUS_URL = "/api/v1/rules/status"


# ---------------------------------------------------------------------------
# Happy path
# ---------------------------------------------------------------------------


@pytest.mark.asyncio
async def test_perft_from_start(client: AsyncClient) -> None:
    response = await client.post(PERFT_URL, json={"depth": 2})

    assert response.status_code == 200
    assert response.json() == {"variant": "classical", "depth": 2, "nodes": 400}


@pytest.mark.asyncio
async def test_perft_in_variant(client: AsyncClient) -> None:
    response = await client.post(PERFT_URL, json={"variant": "pawnonesquare", "depth": 1})

    assert response.status_code == 200
    assert response.json()["nodes"] == 12


@pytest.mark.asyncio
async def test_moves_carry_flags(client: AsyncClient) -> None:
    response = await client.post(MOVES_URL, json={"variant": "selfcapture"})

    assert response.status_code == 200
    body = response.json()
    assert body["count"] == 39 == len(body["moves"])
    flags = {m["lan"]: m["flags"] for m in body["moves"]}
    assert flags["b1d2"] == ["self_capture"]
    assert flags["e2e4"] == ["double_push"]


@pytest.mark.asyncio
async def test_status_stalemate_win(client: AsyncClient) -> None:
    response = await client.post(
        STATUS_URL,
        json={"fen": "4k3/4P3/4K3/8/8/8/8/8 b - - 0 1", "variant": "stalematewin"},
    )

    assert response.status_code == 200
    assert response.json() == {"state": "white_wins", "reason": "stalemate", "in_check": False}


@pytest.mark.asyncio
async def test_status_threefold_repetition(client: AsyncClient) -> None:
    response = await client.post(STATUS_URL, json={"history": [STANDARD_START, STANDARD_START]})

    assert response.status_code == 200
    assert response.json()["reason"] == "threefold_repetition"


@pytest.mark.asyncio
async def test_status_ongoing(client: AsyncClient) -> None:
    response = await client.post(STATUS_URL, json={})

    assert response.status_code == 200
    assert response.json() == {"state": "ongoing", "reason": "none", "in_check": False}


# ---------------------------------------------------------------------------
# Validation errors
# ---------------------------------------------------------------------------


@pytest.mark.asyncio
async def test_perft_depth_limited(client: AsyncClient) -> None:
    response = await client.post(PERFT_URL, json={"depth": 9})

    assert response.status_code == 422


@pytest.mark.asyncio
async def test_unknown_variant_rejected(client: AsyncClient) -> None:
    response = await client.post(MOVES_URL, json={"variant": "atomic"})

    assert response.status_code == 422


@pytest.mark.asyncio
async def test_bad_fen_rejected(client: AsyncClient) -> None:
    response = await client.post(MOVES_URL, json={"fen": "8/8/8 w - - 0 1"})

    assert response.status_code == 422
    assert "8 ranks" in response.json()["detail"]


@pytest.mark.asyncio
async def test_illegal_position_rejected(client: AsyncClient) -> None:
    response = await client.post(PERFT_URL, json={"fen": "8/8/8/8/8/8/8/8 w - - 0 1", "depth": 1})

    assert response.status_code == 422
    assert "kings" in response.json()["detail"]


@pytest.mark.asyncio
async def test_conflicting_variant_rejected(client: AsyncClient) -> None:
    response = await client.post(
        MOVES_URL,
        json={"fen": STANDARD_START + " variant=torpedo", "variant": "pawnback"},
    )

    assert response.status_code == 422


# ---------------------------------------------------------------------------
# Server errors
# ---------------------------------------------------------------------------


@pytest.mark.asyncio
async def test_status_unexpected_failure(client: AsyncClient) -> None:
    with patch("app.api.v1.endpoints.rules.status", side_effect=RuntimeError("boom")):
        response = await client.post(STATUS_URL, json={})

    assert response.status_code == 500
    assert "boom" in response.json()["detail"]
