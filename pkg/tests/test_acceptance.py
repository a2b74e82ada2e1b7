"""Acceptance gate: one timed pass/fail line per shipped claim.

Run with -s to see the lines. Every check is exact; criteria with a
runtime budget enforce it as an assertion.
"""

import time
from contextlib import contextmanager
from math import gcd, isqrt

import pytest

from galcert.analysis import build_kl_profile
from galcert.arith import express_in_power_basis, intfact, nf_norm, primes_above, roots_in_field
from galcert.certify import SetChoices, certify, exceptional_set, scan
from galcert.characters import enumerate_quadratic_chars, kronecker
from galcert.newform import level160_record, level27_record, r_invariant
from galcert.oracle import selftest
from galcert.qexp import GaussInt, build_level27_newform, hecke_validate

B = 2000


@contextmanager
def criterion(n, cap, tag):
    t0 = time.monotonic()
    ok = False
    try:
        yield
        dt = time.monotonic() - t0
        if cap is not None and dt >= cap:
            raise AssertionError("criterion %d blew its %.0fs budget (%.2fs)" % (n, cap, dt))
        ok = True
    finally:
        dt = time.monotonic() - t0
        print("criterion %d: %s (%.2fs) %s" % (n, "PASS" if ok else "FAIL", dt, tag), flush=True)


@pytest.fixture(scope="module")
def rec27():
    return level27_record(B=B, validate=False)


@pytest.fixture(scope="module")
def prof27(rec27):
    return build_kl_profile(rec27, B)


@pytest.fixture(scope="module")
def choices27():
    return SetChoices((109, 379), (5,), 5)


@pytest.fixture(scope="module")
def rec160():
    return level160_record(validate=False)


@pytest.fixture(scope="module")
def prof160(rec160):
    return build_kl_profile(rec160, B)


def test_criterion_1_level27_qexpansion():
    with criterion(1, 60.0, "level-27 q-expansion and Hecke structure to 2000"):
        coeffs = build_level27_newform(B)
        expect = {
            2: GaussInt(0, 3),
            4: GaussInt(-5),
            5: GaussInt(0, -3),
            7: GaussInt(5),
            8: GaussInt(0, -3),
            10: GaussInt(9),
            11: GaussInt(0, -15),
            13: GaussInt(-10),
        }
        for n, want in expect.items():
            assert coeffs[n - 1] == want, n
        assert hecke_validate(coeffs, 3, lambda p: kronecker(-3, p)) == "pass"


def test_criterion_2_twist_invariants(rec27):
    with criterion(2, None, "twist invariants are integer squares"):

        def r_int(p):
            x = r_invariant(rec27, p)
            assert x.is_rational(), p
            v = x.as_fraction()
            assert v.denominator == 1, p
            return v.numerator

        assert r_int(5) == 9
        assert r_int(109) == 164**2
        assert r_int(379) == 704**2
        for p in intfact.primes_up_to(B):
            if p == 3:
                continue
            v = r_int(p)
            assert isqrt(v) ** 2 == v, p


def test_criterion_3_exceptional_set_identities(rec27, prof27, choices27):
    with criterion(3, None, "level-27 exceptional set"):

        def shifted(q):
            x = r_invariant(rec27, q) - (1 + q**2) ** 2
            return x.as_fraction().numerator

        n1 = shifted(109)
        n2 = shifted(379)
        assert n1 == -(2**2 * 3**3 * 7 * 19 * 31 * 317)
        assert n2 == -(2**2 * 3**3 * 2647 * 72173)
        assert intfact.factor_int(n1) == [(2, 2), (3, 3), (7, 1), (19, 1), (31, 1), (317, 1)]
        assert intfact.factor_int(n2) == [(2, 2), (3, 3), (2647, 1), (72173, 1)]
        S = exceptional_set(rec27, prof27, choices27)
        assert S.ell_level == [2, 3, 5, 7, 11]
        assert S.lambda_level == []


def test_criterion_4_level27_certification(rec27, prof27, choices27):
    with criterion(4, 300.0, "level-27 scan over primes in [7, 200]"):
        out = scan(rec27, prof27, 7, 200, choices=choices27)
        assert out["all_large_image"] is True
        want = [p for p in intfact.primes_up_to(200) if p >= 7]
        assert sorted(int(e) for e in out["verdicts"]) == want
        for ell in want:
            assert out["verdicts"][str(ell)] == "PSL2(F_%d)" % ell, ell
        by_ell = {c["ell"]: c for c in out["certificates"]}
        for ell in (7, 11):
            entry = by_ell[ell]["lambdas"][0]
            assert entry["routes"]["direct"]["certifies_dichotomy"] is True, ell
        conds7 = by_ell[7]["lambdas"][0]["Lambda_blocks"][0]["conditions"]
        witnesses = {w["p"] for w in conds7["e"]["witnesses"]}
        assert witnesses and witnesses <= {13, 37, 41}


def test_criterion_5_level160_fixture(rec160, prof160):
    with criterion(5, None, "level-160 field, norms, square invariants"):
        E = rec160.coeff_field
        assert E.degree == 6
        assert len(roots_in_field(E, [1, -4, 1, 1])) == 3
        assert len(roots_in_field(E, [1, 0, 1])) == 2
        K = prof160.K
        gen = r_invariant(rec160, prof160.generator_prime)

        def in_K(p):
            coords = express_in_power_basis(r_invariant(rec160, p), gen, K.degree)
            assert coords is not None, p
            return K.element(coords)

        norms = {3: 2**6, 7: 2**6, 11: 2**12 * 5**4, 13: 2**12 * 13**2, 17: 2**18 * 5**2}
        for p, want in norms.items():
            assert nf_norm(in_K(p)) == want, p

        def q_norm(q):
            v = nf_norm(in_K(q) - (1 + q**2) ** 2)
            assert v.denominator == 1, q
            return v.numerator

        assert gcd(641 * q_norm(641), 1061 * q_norm(1061)) == 2**12
        for p in (3, 7, 11):
            rv = prof160.r_values[p]
            assert not rv.is_rational(), p
            w = prof160.square_witnesses[p]
            assert w is not None and w * w == rv, p


def test_criterion_6_level160_certification(rec160, prof160):
    with criterion(6, 120.0, "level-160 certificates at 3, 7, 11, 19, 29"):
        choices = SetChoices((641, 1601), (3, 7, 11), 3)
        S = exceptional_set(rec160, prof160, choices)
        K = prof160.K
        for ell in (3, 7, 11, 19, 29):
            assert ell % 13 in {2, 3, 4, 6, 7, 9, 10, 11}, ell
            lams = primes_above(K, ell)
            assert len(lams) == 1, ell
            assert lams[0].multiplicity == 1 and lams[0].residue_degree == 3, ell
            cert = certify(rec160, prof160, ell, choices=choices, exceptional=S)
            assert cert["verdict"] == "PSL2(F_%d)" % ell**3, ell
            entry = cert["lambdas"][0]
            assert entry["residue_degree"] == 3, ell
            if ell in (3, 7, 11):
                assert entry["routes"]["direct"]["certifies_dichotomy"] is True, ell
            else:
                assert entry["in_exceptional_set"] is False, ell
                assert entry["routes"]["membership"]["certifies_dichotomy"] is True, ell


def test_criterion_7_oracle_suites():
    with criterion(7, 30.0, "order-trace tables and Cartan facts by enumeration"):
        report = selftest()
        assert report["ok"] is True
        assert [e["q"] for e in report["lemma_table"]] == [3, 5, 7, 9, 11]
        for e in report["lemma_table"]:
            q = e["q"]
            assert e["group_order"] == (q * q - 1) * (q * q - q)
        for e in report["cartan"]:
            q = e["q"]
            assert e["N_order"] == 2 * e["C_order"]
            assert e["C_order"] == ((q - 1) ** 2 if e["split"] else q * q - 1)


def test_criterion_8_property_suites():
    with criterion(8, 30.0, "factorization, characters, Euler criterion"):
        checked = list(range(2, 3000))
        checked += [141155028, 705952800, 2**31 - 1, 104729 * 104723, 2**12 * 13**2]
        for n in checked:
            fs = intfact.factor_int(n)
            prod = 1
            for p, e in fs:
                assert intfact.is_prime(p), (n, p)
                prod *= p**e
            assert prod == n, n
        counts = {3: 1, 40: 7, 120: 15}
        for m, want in counts.items():
            chars = enumerate_quadratic_chars(m)
            assert len(chars) == want, m
            units = [a for a in range(1, m) if gcd(a, m) == 1]
            for chi in chars:
                assert any(chi.value(a) == -1 for a in units), m
                for a in units:
                    for b in units:
                        assert chi.value(a * b % m) == chi.value(a) * chi.value(b), (m, a, b)
        for p in intfact.primes_up_to(200):
            if p == 2:
                continue
            for a in range(1, p):
                e = pow(a, (p - 1) // 2, p)
                assert e in (1, p - 1), (a, p)
                assert kronecker(a, p) == (1 if e == 1 else -1), (a, p)
