"""HTTP facade over the pipeline.

POST /analyze, /solve, /verify, /majorant take the same request body: the
input document (or a built-in example name) plus optional overrides that win
over the document's header.  Responses are the canonical JSON documents of
``pipeline`` rendered byte-identically; domain failures come back as
``{"error": {"kind", "message", ...}}`` with 400 for malformed input and 422
for equations the solver rejects.
"""

from __future__ import annotations

from typing import Dict, Optional

from fastapi import FastAPI, Request
from fastapi.responses import Response
from pydantic import BaseModel, Field

from . import pipeline
from .errors import (ConfigurationError, EquationSyntaxError, LogsingError,
                     ResonanceError)

BAD_REQUEST_KINDS = {"parse", "config"}
UNPROCESSABLE_KINDS = {"assumptions", "degenerate-root", "resonance",
                       "certification", "inconsistent-system"}


class RunRequest(BaseModel):
    input: Optional[str] = Field(
        default=None, description="input document: optional header lines "
                                  "then one equation line")
    example: Optional[str] = Field(
        default=None, description="name of a built-in example to run")
    order: Optional[int] = None
    max_deg: Optional[int] = None
    root_index: Optional[int] = None
    b: Optional[str] = None
    resonance_policy: Optional[str] = None
    n: Optional[int] = None
    mode: Optional[str] = None
    lead: Optional[str] = None
    resonance_data: Optional[Dict[str, str]] = None

    def text(self) -> str:
        if (self.input is None) == (self.example is None):
            raise ConfigurationError(
                "provide exactly one of 'input' or 'example'")
        if self.example is not None:
            return pipeline.example_input_text(self.example)
        return self.input

    def overrides(self) -> dict:
        return {
            "order": self.order,
            "max_deg": self.max_deg,
            "root_index": self.root_index,
            "b_source": self.b,
            "resonance_policy": self.resonance_policy,
            "n": self.n,
            "mode": self.mode,
            "lead": self.lead,
            "resonance_data": self.resonance_data,
        }


def error_envelope(exc: LogsingError) -> dict:
    body = {"kind": exc.kind, "message": str(exc)}
    if isinstance(exc, EquationSyntaxError):
        if exc.line is not None:
            body["line"] = exc.line
        if exc.col is not None:
            body["col"] = exc.col
    if isinstance(exc, ResonanceError) and exc.exponent is not None:
        from .scalar import frac_str
        body["exponent"] = frac_str(exc.exponent)
    return {"error": body}


def _status_for(exc: LogsingError) -> int:
    if exc.kind in BAD_REQUEST_KINDS:
        return 400
    if exc.kind in UNPROCESSABLE_KINDS:
        return 422
    return 500


def _json_response(doc: dict, status: int = 200) -> Response:
    return Response(content=pipeline.to_json(doc), status_code=status,
                    media_type="application/json")


def create_app() -> FastAPI:
    app = FastAPI(title="log-singular series solver", version=pipeline.VERSION)

    @app.exception_handler(LogsingError)
    async def _domain_error(_request: Request, exc: LogsingError):
        return _json_response(error_envelope(exc), status=_status_for(exc))

    @app.get("/health")
    def health():
        return _json_response({"status": "ok", "version": pipeline.VERSION})

    @app.get("/examples")
    def examples():
        return _json_response(pipeline.cmd_examples())

    @app.post("/analyze")
    def analyze(req: RunRequest):
        return _json_response(pipeline.cmd_analyze(req.text(), req.overrides()))

    @app.post("/solve")
    def solve(req: RunRequest):
        return _json_response(pipeline.cmd_solve(req.text(), req.overrides()))

    @app.post("/verify")
    def verify(req: RunRequest):
        return _json_response(pipeline.cmd_verify(req.text(), req.overrides()))

    @app.post("/majorant")
    def majorant(req: RunRequest):
        return _json_response(pipeline.cmd_majorant(req.text(), req.overrides()))

    return app


app = create_app()
