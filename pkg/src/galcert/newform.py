"""Newform records: validation, JSON serialization, builtin forms.

A record holds exact coefficients a_n as elements of the coefficient field E
on the power basis of its defining polynomial. Ingestion is strict: schema,
normalization, nebentypus conductor, Hecke structure, and integrality of the
twist invariants r_p are all enforced as errors.
"""

import json
import os
from fractions import Fraction

from .arith import NumberField, intfact, minpoly_over_Q, poly
from .characters import kronecker, quadchar_from_kronecker
from .qexp import GaussInt, build_level27_newform, hecke_validate

FORMAT_NAME = "coefficients-v1"
DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
LEVEL160_FIXTURE = os.path.join(DATA_DIR, "level160.json")


class NewformRecord:
    def __init__(self, level, weight, nebentypus_disc, coeff_field, coeffs, source):
        self.level = level
        self.weight = weight
        self.nebentypus_disc = nebentypus_disc
        self.coeff_field = coeff_field
        self.coeffs = dict(coeffs)
        self.source = source
        self.max_n = max(self.coeffs)

    def eps(self, n):
        return kronecker(self.nebentypus_disc, n)

    def coefficient(self, n):
        if n not in self.coeffs:
            raise KeyError("coefficient a_%d missing" % n)
        return self.coeffs[n]

    def __repr__(self):
        return "NewformRecord(level=%d, weight=%d, D=%d, deg E=%d, B=%d)" % (
            self.level,
            self.weight,
            self.nebentypus_disc,
            self.coeff_field.degree,
            self.max_n,
        )


def r_invariant(rec, p):
    """The twist invariant r_p = a_p^2 / eps(p), exact in E."""
    if rec.level % p == 0:
        raise ValueError("p divides the level")
    ap = rec.coefficient(p)
    e = rec.eps(p)
    if e not in (1, -1):
        raise ArithmeticError("nebentypus value must be a unit")
    return ap * ap * e


def validate_record(rec):
    """Enforce the record invariants; raises ValueError on any violation."""
    one = rec.coeff_field.one()
    if rec.coefficient(1) != one:
        raise ValueError("not normalized: a_1 != 1")
    D = rec.nebentypus_disc
    if D % 4 not in (0, 1):
        raise ValueError("nebentypus discriminant must be 0 or 1 mod 4")
    if D != 1:
        chi = quadchar_from_kronecker(D, abs(D))
        cond = chi.conductor()
        if rec.level % cond != 0:
            raise ValueError("nebentypus conductor %d does not divide level" % cond)
    dense = [rec.coefficient(n) for n in range(1, rec.max_n + 1)]
    report = hecke_validate(dense, rec.weight, rec.eps)
    if report != "pass":
        raise ValueError("Hecke structure violated: %s" % report)
    for p in intfact.primes_up_to(rec.max_n):
        if rec.level % p == 0:
            continue
        rp = r_invariant(rec, p)
        mp = minpoly_over_Q(rp)
        for c in mp:
            if c.denominator != 1:
                raise ValueError("r_%d is not an algebraic integer" % p)
    return rec


# ------------------------------------------------------------- serialization

def _frac_to_str(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def _frac_from_str(s):
    return Fraction(s)


def record_to_file(rec):
    """CoefficientFileV1 document (a plain dict) for a record."""
    coeff_rows = []
    for n in range(1, rec.max_n + 1):
        vec = rec.coefficient(n).coords_vector()
        coeff_rows.append([_frac_to_str(c) for c in vec])
    return {
        "format": FORMAT_NAME,
        "level": rec.level,
        "weight": rec.weight,
        "nebentypus_discriminant": rec.nebentypus_disc,
        "field_poly": [str(c) for c in rec.coeff_field.defining_poly],
        "basis": "power",
        "coefficients": coeff_rows,
        "source": rec.source,
    }


def parse_coefficient_file(doc, validate=True):
    """NewformRecord from a CoefficientFileV1 document."""
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise ValueError("unrecognized schema (expected %s)" % FORMAT_NAME)
    for key in ("level", "weight", "nebentypus_discriminant", "field_poly", "basis", "coefficients"):
        if key not in doc:
            raise ValueError("missing field %r" % key)
    if doc["basis"] != "power":
        raise ValueError("only the power basis is supported in files")
    field_poly = [int(c) for c in doc["field_poly"]]
    try:
        E = NumberField(field_poly)
    except ValueError as exc:
        raise ValueError("bad field polynomial: %s" % exc)
    deg = E.degree
    coeffs = {}
    for i, row in enumerate(doc["coefficients"]):
        if len(row) != deg:
            raise ValueError("coordinate vector length %d != %d at n=%d" % (len(row), deg, i + 1))
        coeffs[i + 1] = E.element([_frac_from_str(s) for s in row])
    if not coeffs:
        raise ValueError("no coefficients")
    rec = NewformRecord(
        level=int(doc["level"]),
        weight=int(doc["weight"]),
        nebentypus_disc=int(doc["nebentypus_discriminant"]),
        coeff_field=E,
        coeffs=coeffs,
        source=str(doc.get("source", "file")),
    )
    if validate:
        validate_record(rec)
    return rec


def load_file(path, validate=True):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return parse_coefficient_file(doc, validate=validate)


def save_file(rec, path):
    doc = record_to_file(rec)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


# ------------------------------------------------------------- builtin forms

def level27_record(B=2000, validate=True):
    """The level-27 weight-3 form, computed from the closed formula."""
    E = NumberField([1, 0, 1])  # Q(i)
    raw = build_level27_newform(B)
    coeffs = {}
    for n, c in enumerate(raw, start=1):
        coeffs[n] = E.element([c.re, c.im])
    rec = NewformRecord(
        level=27,
        weight=3,
        nebentypus_disc=-3,
        coeff_field=E,
        coeffs=coeffs,
        source="computed:eta-theta closed formula, B=%d" % B,
    )
    if validate:
        validate_record(rec)
    return rec


def level160_record(validate=True):
    """The level-160 weight-3 form, from the committed fixture file."""
    if not os.path.exists(LEVEL160_FIXTURE):
        raise FileNotFoundError(
            "level-160 fixture not found at %s (regenerate with scripts/make_level160_fixture.py)"
            % LEVEL160_FIXTURE
        )
    return load_file(LEVEL160_FIXTURE, validate=validate)


BUILTIN_NAMES = ("level27", "level160")


def builtin_record(name, B=2000, validate=True):
    if name == "level27":
        return level27_record(B=B, validate=validate)
    if name == "level160":
        return level160_record(validate=validate)
    raise ValueError("unknown builtin %r (have: %s)" % (name, ", ".join(BUILTIN_NAMES)))
