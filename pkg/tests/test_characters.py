"""Character layer: Kronecker symbol, unit groups, character enumeration."""

from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galcert.arith.finitefield import FFField, _first_irreducible
from galcert.arith import intfact
from galcert.characters import (
    FFChar,
    QuadChar,
    char_value,
    enumerate_ff_chars,
    enumerate_quadratic_chars,
    kronecker,
    quadchar_from_kronecker,
    unit_group,
)


def test_kronecker_oracles():
    assert kronecker(-3, 7) == 1
    assert kronecker(-3, 2) == -1
    assert kronecker(-5, 3) == 1
    assert kronecker(-3, 5) == -1
    assert kronecker(5, 1) == 1
    assert kronecker(0, 9) == 0


def test_kronecker_undefined_pair():
    with pytest.raises(ValueError):
        kronecker(0, 0)


def test_kronecker_matches_euler_criterion():
    for p in intfact.primes_up_to(200):
        if p == 2:
            continue
        for a in range(-p, p + 1):
            if a % p == 0:
                expect = 0
            else:
                expect = 1 if pow(a % p, (p - 1) // 2, p) == 1 else -1
            assert kronecker(a, p) == expect


@settings(max_examples=120)
@given(st.integers(-300, 300), st.integers(-300, 300), st.integers(1, 200))
def test_kronecker_multiplicative_in_top(a, b, n):
    assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


def test_unit_group_structure_exhaustive():
    for m in (1, 2, 3, 4, 8, 16, 27, 40, 120, 160, 189, 1280, 9999):
        g = unit_group(m)
        phi = sum(1 for a in range(1, m + 1) if gcd(a, m) == 1)
        assert g.order() == max(phi, 1)
        seen = set()
        for a in range(1, m + 1):
            if gcd(a, m) == 1:
                vec = g.exponent_vector(a)
                assert vec not in seen
                seen.add(vec)
        # generator orders are exact
        for gen, d in zip(g.generators, g.orders):
            assert pow(gen, d, max(m, 2)) % max(m, 1) == 1 % max(m, 1)


def test_unit_group_rejects_non_unit():
    with pytest.raises(ValueError, match="non-unit"):
        unit_group(40).exponent_vector(5)


def test_quadratic_char_counts():
    assert len(enumerate_quadratic_chars(3)) == 1
    assert len(enumerate_quadratic_chars(40)) == 7
    assert len(enumerate_quadratic_chars(120)) == 15
    assert len(enumerate_quadratic_chars(1)) == 0
    assert len(enumerate_quadratic_chars(2)) == 0
    assert len(set(enumerate_quadratic_chars(120))) == 15


def test_quadratic_chars_mod_40_separate_generators():
    for chi in enumerate_quadratic_chars(40):
        assert any(chi.value(p) == -1 for p in (3, 7, 11))


def test_quad_char_values():
    eps = quadchar_from_kronecker(-3, 3)
    assert char_value(eps, 5) == -1
    assert char_value(eps, 1) == 1
    assert char_value(eps, 3) == 0
    eps20 = quadchar_from_kronecker(-20, 40)
    for a in range(1, 41):
        if gcd(a, 40) == 1:
            assert eps20.value(a) == kronecker(-20, a)


def test_quad_char_conductor():
    eps20 = quadchar_from_kronecker(-20, 40)
    assert eps20.conductor() == 20
    trivial = QuadChar(40, [1] * len(unit_group(40).generators))
    assert trivial.conductor() == 1
    assert quadchar_from_kronecker(-4, 4).conductor() == 4


def test_quadchar_from_kronecker_conductor_check():
    with pytest.raises(ValueError):
        quadchar_from_kronecker(-20, 8)  # conductor 20 does not divide 8


@settings(max_examples=60)
@given(st.sampled_from([3, 8, 40, 120, 189]), st.integers(1, 500), st.integers(1, 500))
def test_quad_chars_multiplicative(m, a, b):
    if gcd(a, m) != 1 or gcd(b, m) != 1:
        return
    for chi in enumerate_quadratic_chars(m):
        assert chi.value(a * b) == chi.value(a) * chi.value(b)


def _field(ell, f):
    return FFField(ell, _first_irreducible(ell, f) if f > 1 else [0, 1], check=False)


def test_ff_char_counts():
    F49 = _field(7, 2)
    assert len(list(enumerate_ff_chars(27, F49))) == 6
    F121 = _field(11, 2)
    assert len(list(enumerate_ff_chars(27, F121))) == 6
    assert len(list(enumerate_ff_chars(2, F49))) == 1
    trivial = next(iter(enumerate_ff_chars(2, F49)))
    assert trivial.is_trivial()


def test_ff_char_image_orders_divide():
    F49 = _field(7, 2)
    group = unit_group(27)
    for chi in enumerate_ff_chars(27, F49):
        for img, d in zip(chi.images, group.orders):
            assert img**d == F49.one()


def test_ff_char_rejects_non_unit():
    F49 = _field(7, 2)
    chi = next(iter(enumerate_ff_chars(27, F49)))
    with pytest.raises(ValueError, match="non-unit"):
        chi.value(6)


def test_ff_chars_multiplicative():
    F9 = _field(3, 2)
    units = [a for a in range(1, 40) if gcd(a, 40) == 1]
    for chi in enumerate_ff_chars(40, F9):
        for a in units:
            for b in units[:4]:
                assert chi.value(a * b) == chi.value(a) * chi.value(b)


def test_ff_chars_distinct():
    F49 = _field(7, 2)
    chars = list(enumerate_ff_chars(27, F49))
    assert len(set(chars)) == len(chars)
