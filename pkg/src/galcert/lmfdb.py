"""HTTP client for retrieving newform coefficient data.

The client speaks a small GET-only JSON interface (documented in the README)
and converts whatever basis the server uses to the power basis of the field
polynomial before returning a CoefficientFileV1 document. The committed
fixture is authoritative for tests; this client exists to regenerate it.
"""

import json
import os
import re
from fractions import Fraction

import httpx

from .newform import FORMAT_NAME, LEVEL160_FIXTURE

DEFAULT_BASE_URL = "https://www.lmfdb.org/api"
ENV_BASE_URL = "GALCERT_LMFDB_URL"

_LABEL_RE = re.compile(r"^[0-9]+\.[0-9]+\.[a-z]+\.[a-z]+$")


def _excerpt(text, limit=200):
    text = text if isinstance(text, str) else repr(text)
    return text[:limit] + ("..." if len(text) > limit else "")


def fetch_lmfdb(label, B, base_url=None, offline=False, timeout=30.0, transport=None):
    """CoefficientFileV1 document for a newform label, never truncating silently.

    The server may return fewer than B coefficients; the actual count is
    recorded in the document's source string and in the returned row count.
    """
    if not _LABEL_RE.match(label or ""):
        raise ValueError("malformed newform label %r" % (label,))
    if offline:
        raise RuntimeError(
            "offline mode: network disabled; use the committed fixture at %s"
            % LEVEL160_FIXTURE
        )
    base = base_url or os.environ.get(ENV_BASE_URL) or DEFAULT_BASE_URL
    url = "%s/newform/%s/coefficients" % (base.rstrip("/"), label)
    client = httpx.Client(timeout=timeout, transport=transport)
    try:
        resp = client.get(url, params={"count": B})
    except httpx.HTTPError as exc:
        raise RuntimeError("HTTP request failed: %s" % exc)
    finally:
        client.close()
    if resp.status_code != 200:
        raise RuntimeError(
            "HTTP %d from %s: %s" % (resp.status_code, url, _excerpt(resp.text))
        )
    try:
        payload = resp.json()
    except (json.JSONDecodeError, ValueError):
        raise RuntimeError("unparseable response from %s: %s" % (url, _excerpt(resp.text)))
    return _payload_to_file(payload, label, B)


def _payload_to_file(payload, label, requested):
    for key in ("level", "weight", "nebentypus_discriminant", "field_poly", "coefficients"):
        if key not in payload:
            raise RuntimeError(
                "response missing %r: %s" % (key, _excerpt(json.dumps(payload)))
            )
    field_poly = [int(c) for c in payload["field_poly"]]
    deg = len(field_poly) - 1
    basis = payload.get("basis", "power")
    rows = [[Fraction(str(c)) for c in row] for row in payload["coefficients"]]
    if basis == "power":
        converted = rows
    elif basis == "custom":
        matrix = payload.get("basis_matrix")
        if not matrix:
            raise RuntimeError("custom basis without basis_matrix")
        mat = [[Fraction(str(c)) for c in row] for row in matrix]
        if len(mat) != deg or any(len(r) != deg for r in mat):
            raise RuntimeError("basis_matrix must be %d x %d" % (deg, deg))
        converted = []
        for row in rows:
            if len(row) != deg:
                raise RuntimeError("coordinate vector of length %d, expected %d" % (len(row), deg))
            out = [Fraction(0)] * deg
            for i, c in enumerate(row):
                for j in range(deg):
                    out[j] += c * mat[i][j]
            converted.append(out)
    else:
        raise RuntimeError("unsupported basis %r" % (basis,))
    received = len(converted)
    if received == 0:
        raise RuntimeError("server returned no coefficients")

    def fmt(x):
        return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)

    return {
        "format": FORMAT_NAME,
        "level": int(payload["level"]),
        "weight": int(payload["weight"]),
        "nebentypus_discriminant": int(payload["nebentypus_discriminant"]),
        "field_poly": [str(c) for c in field_poly],
        "basis": "power",
        "coefficients": [[fmt(c) for c in row] for row in converted],
        "source": "lmfdb:%s (requested %d, received %d)" % (label, requested, received),
    }
