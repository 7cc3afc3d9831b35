"""Thin HTTP client for a running service instance.

The CLI uses this when pointed at a server with ``--server``; tests drive it
against the ASGI app directly by passing a pre-built httpx client.
"""

from __future__ import annotations

import httpx

from . import schemas


class ServiceClient:
    """Typed wrapper over the service endpoints."""

    def __init__(self, base_url: str | None = None, client: httpx.Client | None = None):
        if client is not None:
            self._client = client
        elif base_url is not None:
            self._client = httpx.Client(base_url=base_url, timeout=600.0)
        else:
            raise ValueError("ServiceClient needs a base_url or an httpx client")

    def close(self) -> None:
        self._client.close()

    def _post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        if resp.status_code >= 400:
            detail = ""
            try:
                detail = resp.json().get("detail", "")
            except Exception:
                detail = resp.text
            raise RuntimeError(f"service error {resp.status_code} on {path}: {detail}")
        return resp.json()

    def bounds(self, req: schemas.BoundsRequest) -> schemas.BoundsResponse:
        return schemas.BoundsResponse.model_validate(self._post("/bounds", req.model_dump()))

    def loss(self, req: schemas.LossRequest) -> schemas.LossResponse:
        return schemas.LossResponse.model_validate(self._post("/loss", req.model_dump()))

    def sweep(self, req: schemas.SweepRequest) -> schemas.SweepResponse:
        return schemas.SweepResponse.model_validate(self._post("/sweep", req.model_dump()))

    def simulate(self, req: schemas.SimulateRequest) -> schemas.SimulateResponse:
        return schemas.SimulateResponse.model_validate(
            self._post("/simulate", req.model_dump())
        )

    def selftest(self) -> schemas.SelftestResponse:
        return schemas.SelftestResponse.model_validate(self._post("/selftest", {}))
