"""Exceptional sets and certificates, pinned against worked values."""

import json
import os

import pytest

from galcert.analysis import build_kl_profile
from galcert.certify import (
    CERTIFICATE_FORMAT,
    SetChoices,
    certify,
    certify_k_lambda,
    default_choices,
    effective_exponents,
    exceptional_set,
    modulus_Mprime,
    modulus_calM,
    replay_certificate,
    scan,
    validate_choices,
)
from galcert.certify import _primes_above_checked
from galcert.newform import LEVEL160_FIXTURE, builtin_record, level27_record


@pytest.fixture(scope="module")
def rec27():
    return level27_record(B=500, validate=False)


@pytest.fixture(scope="module")
def prof27(rec27):
    return build_kl_profile(rec27, 500)


@pytest.fixture(scope="module")
def choices27():
    return SetChoices((109, 379), (5,), 5)


@pytest.fixture(scope="module")
def S27(rec27, prof27, choices27):
    return exceptional_set(rec27, prof27, choices27)


@pytest.fixture(scope="module")
def rec160():
    if not os.path.exists(LEVEL160_FIXTURE):
        pytest.skip("level-160 fixture not generated")
    return builtin_record("level160", validate=False)


@pytest.fixture(scope="module")
def prof160(rec160):
    return build_kl_profile(rec160, 2000)


@pytest.fixture(scope="module")
def choices160():
    return SetChoices((641, 1601), (3, 7, 11), 3)


@pytest.fixture(scope="module")
def S160(rec160, prof160, choices160):
    return exceptional_set(rec160, prof160, choices160)


def _conditions(cert, which=0, block=0):
    return cert["lambdas"][which]["Lambda_blocks"][block]["conditions"]


def test_effective_exponents_27(rec27):
    assert effective_exponents(rec27, 7) == (0, 0, 0)
    assert effective_exponents(rec27, 11) == (0, 0, 0)
    assert effective_exponents(rec27, 5) == (0, 0, 1)
    # 3 divides the level, and 3 < 2k
    assert effective_exponents(rec27, 3) == (1, 0, 1)


def test_effective_exponents_160(rec160):
    assert effective_exponents(rec160, 3) == (0, 1, 1)
    assert effective_exponents(rec160, 7) == (0, 1, 0)
    assert effective_exponents(rec160, 11) == (0, 1, 0)


def test_modulus_calM(rec27, rec160):
    assert modulus_calM(rec27, 7) == 3
    assert modulus_calM(rec27, 11) == 3
    assert modulus_calM(rec27, 5) == 15
    assert modulus_Mprime(rec27) == 3
    assert modulus_calM(rec160, 3) == 120
    assert modulus_calM(rec160, 7) == 40
    assert modulus_calM(rec160, 11) == 40
    assert modulus_Mprime(rec160) == 40


def test_default_choices_27(rec27, prof27):
    ch = default_choices(rec27, prof27)
    assert all(q % 27 == 1 for q in ch.q_primes)
    assert ch.q_primes == (109, 163)
    validate_choices(rec27, prof27, ch)


def test_default_choices_160(rec160, prof160):
    ch = default_choices(rec160, prof160)
    assert ch.q_primes == (641, 1601)
    assert ch.p_primes == (3, 7, 11)
    validate_choices(rec160, prof160, ch)


def test_validate_choices_rejects_bad_q(rec27, prof27):
    with pytest.raises(ValueError, match="not congruent"):
        validate_choices(rec27, prof27, SetChoices((7,), (5,), 5))
    with pytest.raises(ValueError, match="not prime"):
        validate_choices(rec27, prof27, SetChoices((55,), (5,), 5))


def test_validate_choices_rejects_bad_q_160(rec160, prof160):
    # congruent to 101, not 1, mod 160
    with pytest.raises(ValueError, match="not congruent"):
        validate_choices(rec160, prof160, SetChoices((641, 1061), (3, 7, 11), 3))


def test_validate_choices_rejects_uncovered_chars(rec160, prof160):
    # 3 and 7 leave one quadratic character mod 40 unhit
    with pytest.raises(ValueError, match="not covered"):
        validate_choices(rec160, prof160, SetChoices((641,), (3, 7), 3))


def test_validate_choices_rejects_level_divisor_p(rec27, prof27):
    with pytest.raises(ValueError, match="divides the level"):
        validate_choices(rec27, prof27, SetChoices((109,), (3,), 5))


def test_exceptional_set_27(S27):
    assert S27.ell_level == [2, 3, 5, 7, 11]
    assert S27.lambda_level == []
    per_q = S27.bullets["q_congruence"]["per_q"]
    assert per_q[0]["q"] == 109
    assert per_q[0]["norm"]["sign"] == -1
    assert per_q[0]["norm"]["factors"] == [[2, 2], [3, 3], [7, 1], [19, 1], [31, 1], [317, 1]]
    assert per_q[1]["q"] == 379
    assert per_q[1]["norm"]["sign"] == -1
    assert per_q[1]["norm"]["factors"] == [[2, 2], [3, 3], [2647, 1], [72173, 1]]
    assert S27.bullets["p_vanishing"]["per_p"][0]["norm"]["factors"] == [[3, 2]]
    assert S27.bullets["index"]["primes"] == [5]
    assert S27.contains_ell(11) and not S27.contains_ell(13)


def test_exceptional_set_160(S160):
    assert S160.ell_level == [2, 3, 5, 7, 11]
    # one ramified prime above 13 satisfies both q congruences
    assert [(l.ell, list(l.local_factor)) for l in S160.lambda_level] == [(13, [1, 1])]
    norms = {e["p"]: e["norm"]["factors"] for e in S160.bullets["p_vanishing"]["per_p"]}
    assert norms[3] == [[2, 6]]
    assert norms[7] == [[2, 6]]
    assert norms[11] == [[2, 12], [5, 4]]
    assert S160.bullets["q_congruence"]["gcd"]["factors"] == [[2, 12], [5, 2], [13, 1]]
    assert S160.bullets["index"]["primes"] == [2, 3, 5]
    obstructions = {e["ell"]: e["power_basis_maximal"] for e in S160.bullets["index"]["obstructions"]}
    assert obstructions == {2: False, 5: False, 13: True}


def test_exceptional_set_monotone_under_extra(rec27, prof27, choices27, S27):
    bigger = exceptional_set(rec27, prof27, choices27, index_extra=(17,))
    assert set(S27.ell_level) <= set(bigger.ell_level)
    assert 17 in bigger.ell_level


def test_certify_27_ell7(rec27, prof27, choices27, S27):
    cert = certify(rec27, prof27, 7, choices=choices27, exceptional=S27)
    assert cert["format"] == CERTIFICATE_FORMAT
    assert cert["verdict"] == "PSL2(F_7)"
    entry = cert["lambdas"][0]
    assert entry["in_exceptional_set"] is True
    assert entry["routes"]["direct"]["certifies_dichotomy"] is True
    assert entry["routes"]["membership"]["certifies_dichotomy"] is False
    assert entry["splits_in_L"]["splits"] is True
    conds = _conditions(cert)
    # 109 is 1 mod 27 but fails the root test at 7; 379 witnesses every character
    assert conds["a"]["status"] == "pass"
    assert {w["p"] for w in conds["a"]["witnesses"]} == {379}
    assert conds["b"]["status"] == "pass"
    assert conds["b"]["modulus"] == 3
    assert [w["p"] for w in conds["b"]["witnesses"]] == [5]
    assert conds["c"]["status"] == "pass"
    assert "mod 5" in conds["c"]["via"]
    assert conds["d"]["status"] == "vacuous"
    assert conds["d"]["k_size"] == 7
    assert conds["e"]["status"] == "pass"
    assert conds["e"]["modulus"] == 189
    assert [w["p"] for w in conds["e"]["witnesses"]] == [13, 37, 37]
    assert conds["k_lambda"]["certified"] and conds["k_lambda"]["size"] == 7


def test_certify_27_ell11(rec27, prof27, choices27, S27):
    cert = certify(rec27, prof27, 11, choices=choices27, exceptional=S27)
    assert cert["verdict"] == "PSL2(F_11)"
    conds = _conditions(cert)
    assert {w["p"] for w in conds["a"]["witnesses"]} == {109}
    assert conds["b"]["status"] == "pass"
    assert conds["c"]["status"] == "pass"
    assert conds["c"]["via"] == "witness"
    assert conds["c"]["p"] == 5 and conds["c"]["value"] == [3]
    assert conds["d"]["status"] == "pass"
    assert conds["e"]["status"] == "vacuous"


def test_certify_27_small_primes_inconclusive(rec27, prof27, choices27, S27):
    for ell in (2, 3, 5):
        cert = certify(rec27, prof27, ell, choices=choices27, exceptional=S27)
        assert cert["verdict"].startswith("Inconclusive"), ell
    cert2 = certify(rec27, prof27, 2, choices=choices27, exceptional=S27)
    # mod 2 the target set {0,1,2,4} is everything, so no witness can exist
    assert _conditions(cert2)["d"]["status"] == "fail"


def test_certify_27_ell13_both_routes(rec27, prof27, choices27, S27):
    cert = certify(rec27, prof27, 13, choices=choices27, exceptional=S27)
    assert cert["verdict"] == "PSL2(F_13)"
    entry = cert["lambdas"][0]
    assert entry["in_exceptional_set"] is False
    assert entry["routes"]["membership"]["certifies_dichotomy"] is True
    assert entry["routes"]["direct"]["certifies_dichotomy"] is True


def test_certify_is_pure(rec27, prof27, choices27, S27):
    a = certify(rec27, prof27, 7, choices=choices27, exceptional=S27)
    b = certify(rec27, prof27, 7, choices=choices27, exceptional=S27)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_certify_rejects_composite(rec27, prof27, choices27, S27):
    with pytest.raises(ValueError):
        certify(rec27, prof27, 6, choices=choices27, exceptional=S27)


def test_certify_160_direct(rec160, prof160, choices160, S160):
    for ell in (3, 7):
        cert = certify(rec160, prof160, ell, choices=choices160, exceptional=S160)
        assert cert["verdict"] == "PSL2(F_%d)" % ell**3, ell
        entry = cert["lambdas"][0]
        assert entry["in_exceptional_set"] is True
        assert entry["residue_degree"] == 3
        conds = _conditions(cert)
        for name in "abcd":
            assert conds[name]["status"] == "pass", (ell, name)
        assert conds["e"]["status"] == "vacuous"
        assert conds["k_lambda"]["f_lambda"] == 3


def test_certify_160_membership(rec160, prof160, choices160, S160):
    cert = certify(rec160, prof160, 19, choices=choices160, exceptional=S160)
    assert cert["verdict"] == "PSL2(F_6859)"
    entry = cert["lambdas"][0]
    assert entry["in_exceptional_set"] is False
    assert entry["routes"]["membership"]["certifies_dichotomy"] is True
    assert entry["lambda"]["local_factor"] is not None
    assert entry["residue_degree"] == 3


def test_k_lambda_certificate_160(rec160, prof160):
    Lam = _primes_above_checked(rec160.coeff_field, 3)[0]
    rep = certify_k_lambda(rec160, prof160, Lam)
    assert rep["certified"] and rep["size"] == 27 and rep["f_lambda"] == 3
    # r_3 reduces to zero mod 3, so the witness moves past the generator
    assert rep["witness"] == 7
    assert rep["f_lambda"] % rep["observed_degree"] == 0


def test_scan_small_range(rec27, prof27):
    out = scan(rec27, prof27, 7, 30)
    assert out["all_large_image"] is True
    assert sorted(int(e) for e in out["verdicts"]) == [7, 11, 13, 17, 19, 23, 29]
    assert all(v == "PSL2(F_%s)" % e for e, v in out["verdicts"].items())


def test_replay_roundtrip(rec27, prof27, choices27, S27):
    cert = certify(rec27, prof27, 7, choices=choices27, exceptional=S27)
    ok, mismatches = replay_certificate(rec27, prof27, cert)
    assert ok and mismatches == []


def test_replay_catches_tampering(rec27, prof27, choices27, S27):
    cert = certify(rec27, prof27, 7, choices=choices27, exceptional=S27)
    # 7 is 1 mod 3, so it cannot witness the character that wants -1
    cert["lambdas"][0]["Lambda_blocks"][0]["conditions"]["b"]["witnesses"][0]["p"] = 7
    ok, mismatches = replay_certificate(rec27, prof27, cert)
    assert not ok
    assert any("condition b" in m for m in mismatches)


def test_certificate_serializes(rec160, prof160, choices160, S160):
    cert = certify(rec160, prof160, 3, choices=choices160, exceptional=S160)
    blob = json.dumps(cert)
    assert json.loads(blob)["verdict"] == "PSL2(F_27)"
