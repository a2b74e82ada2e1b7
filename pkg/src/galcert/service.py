"""HTTP facade over the pipeline, plus the in-process handlers behind it.

The handlers are plain dict-to-dict functions so the CLI can run them
without a server; the FastAPI app is a thin shell that validates request
bodies and maps handler errors to 400s. Requests carry either a builtin
form name or an inline coefficient document, never a server-side path.
"""

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .analysis import build_kl_profile, profile_to_dict
from .certify import (
    SetChoices,
    certify,
    default_choices,
    exceptional_set,
    scan,
)
from .lmfdb import fetch_lmfdb
from .newform import builtin_record, parse_coefficient_file, record_to_file
from .oracle import selftest

_BUILTINS = ("level27", "level160")


def resolve_record(spec):
    """NewformRecord from a form spec: builtin name or inline document."""
    builtin = spec.get("builtin")
    document = spec.get("document")
    precision = int(spec.get("precision") or 2000)
    validate = bool(spec.get("validate", True))
    if (builtin is None) == (document is None):
        raise ValueError("specify exactly one of 'builtin' and 'document'")
    if builtin is not None:
        if builtin not in _BUILTINS:
            raise ValueError("unknown builtin %r (have: %s)" % (builtin, ", ".join(_BUILTINS)))
        return builtin_record(builtin, B=precision, validate=validate)
    return parse_coefficient_file(document, validate=validate)


def _choices_from(params, rec, profile):
    raw = params.get("choices")
    if not raw:
        return default_choices(rec, profile)
    return SetChoices(
        tuple(int(q) for q in raw["q_primes"]),
        tuple(int(p) for p in raw["p_primes"]),
        int(raw["index_prime"]),
    )


def _profile_for(rec, params):
    bound = int(params.get("search_bound") or 2000)
    return build_kl_profile(rec, min(bound, rec.max_n))


def handle_coeffs(params):
    rec = resolve_record(
        {
            "builtin": params.get("builtin", "level27"),
            "precision": params.get("precision"),
            "validate": params.get("validate", True),
        }
    )
    return record_to_file(rec)


def handle_ingest(params):
    return fetch_lmfdb(
        params["label"],
        int(params.get("precision") or 2000),
        base_url=params.get("base_url"),
        offline=bool(params.get("offline", False)),
    )


def handle_analyze(params):
    rec = resolve_record(params)
    return profile_to_dict(_profile_for(rec, params))


def handle_exceptional_set(params):
    rec = resolve_record(params)
    profile = _profile_for(rec, params)
    choices = _choices_from(params, rec, profile)
    return exceptional_set(rec, profile, choices).to_dict()


def handle_certify(params):
    rec = resolve_record(params)
    profile = _profile_for(rec, params)
    choices = _choices_from(params, rec, profile)
    return certify(
        rec,
        profile,
        int(params["ell"]),
        choices=choices,
        search_bound=params.get("witness_bound"),
    )


def handle_scan(params):
    rec = resolve_record(params)
    profile = _profile_for(rec, params)
    choices = _choices_from(params, rec, profile)
    return scan(
        rec,
        profile,
        int(params["min"]),
        int(params["max"]),
        choices=choices,
        search_bound=params.get("witness_bound"),
    )


def handle_oracle(params):
    qs = params.get("qs") or (3, 5, 7, 9, 11)
    even = params.get("even_qs") or (2, 4, 8)
    return selftest(tuple(int(q) for q in qs), tuple(int(q) for q in even))


HANDLERS = {
    "coeffs": handle_coeffs,
    "ingest": handle_ingest,
    "analyze": handle_analyze,
    "exceptional-set": handle_exceptional_set,
    "certify": handle_certify,
    "scan": handle_scan,
    "oracle": handle_oracle,
}


class FormSpec(BaseModel):
    builtin: Optional[str] = None
    document: Optional[dict] = None
    precision: Optional[int] = Field(default=None, gt=0)
    validate_record: bool = Field(default=True, alias="validate")
    search_bound: Optional[int] = Field(default=None, gt=0)

    model_config = {"populate_by_name": True}

    def params(self):
        return {
            "builtin": self.builtin,
            "document": self.document,
            "precision": self.precision,
            "validate": self.validate_record,
            "search_bound": self.search_bound,
        }


class CoeffsRequest(BaseModel):
    builtin: str = "level27"
    precision: Optional[int] = Field(default=None, gt=0)
    validate_record: bool = Field(default=True, alias="validate")

    model_config = {"populate_by_name": True}


class IngestRequest(BaseModel):
    label: str
    precision: Optional[int] = Field(default=None, gt=0)
    base_url: Optional[str] = None
    offline: bool = False


class ChoicesSpec(BaseModel):
    q_primes: list[int]
    p_primes: list[int]
    index_prime: int


class ExceptionalSetRequest(FormSpec):
    choices: Optional[ChoicesSpec] = None


class CertifyRequest(FormSpec):
    ell: int = Field(gt=1)
    choices: Optional[ChoicesSpec] = None
    witness_bound: Optional[int] = Field(default=None, gt=0)


class ScanRequest(FormSpec):
    min: int = Field(gt=1)
    max: int = Field(gt=1)
    choices: Optional[ChoicesSpec] = None
    witness_bound: Optional[int] = Field(default=None, gt=0)


class OracleRequest(BaseModel):
    qs: Optional[list[int]] = None
    even_qs: Optional[list[int]] = None


def _run(handler, params):
    try:
        return handler(params)
    except (ValueError, RuntimeError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


def create_app():
    app = FastAPI(title="galcert", version=__version__)

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/coeffs")
    def coeffs(req: CoeffsRequest):
        return _run(
            handle_coeffs,
            {
                "builtin": req.builtin,
                "precision": req.precision,
                "validate": req.validate_record,
            },
        )

    @app.post("/v1/ingest")
    def ingest(req: IngestRequest):
        return _run(handle_ingest, req.model_dump())

    @app.post("/v1/analyze")
    def analyze(req: FormSpec):
        return _run(handle_analyze, req.params())

    @app.post("/v1/exceptional-set")
    def exceptional(req: ExceptionalSetRequest):
        params = req.params()
        if req.choices is not None:
            params["choices"] = req.choices.model_dump()
        return _run(handle_exceptional_set, params)

    @app.post("/v1/certify")
    def certify_route(req: CertifyRequest):
        params = req.params()
        params["ell"] = req.ell
        params["witness_bound"] = req.witness_bound
        if req.choices is not None:
            params["choices"] = req.choices.model_dump()
        return _run(handle_certify, params)

    @app.post("/v1/scan")
    def scan_route(req: ScanRequest):
        params = req.params()
        params["min"] = req.min
        params["max"] = req.max
        params["witness_bound"] = req.witness_bound
        if req.choices is not None:
            params["choices"] = req.choices.model_dump()
        return _run(handle_scan, params)

    @app.post("/v1/oracle")
    def oracle_route(req: OracleRequest):
        return _run(handle_oracle, req.model_dump())

    return app


app = create_app()
