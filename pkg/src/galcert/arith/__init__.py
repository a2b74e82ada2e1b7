"""Exact arithmetic: polynomials, number fields, prime splitting, finite fields."""

from .finitefield import FFElem, FFField, is_square_ff, sqrt_ff
from .numberfield import (
    QQ,
    NFElement,
    NumberField,
    PrimeData,
    dedekind_ell_maximal,
    express_in_power_basis,
    is_square_in_field,
    minpoly_over_Q,
    nf_norm,
    primes_above,
    reduce_mod,
    roots_in_field,
    sqrt_in_field,
    valuation_and_square_in_completion,
)
from .poly import poly_discriminant

__all__ = [
    "FFElem",
    "FFField",
    "is_square_ff",
    "sqrt_ff",
    "QQ",
    "NFElement",
    "NumberField",
    "PrimeData",
    "dedekind_ell_maximal",
    "express_in_power_basis",
    "is_square_in_field",
    "minpoly_over_Q",
    "nf_norm",
    "primes_above",
    "reduce_mod",
    "roots_in_field",
    "sqrt_in_field",
    "valuation_and_square_in_completion",
    "poly_discriminant",
    "factor_mod_ell",
]


def factor_mod_ell(p, ell):
    """Factor an integer polynomial mod ell into monic irreducibles.

    Returns (leading unit, list of (factor, multiplicity)); raises if ell
    divides the leading coefficient.
    """
    from . import modpoly, poly

    return modpoly.factor(poly.to_int_coeffs(poly.normalize(list(p))), ell)
