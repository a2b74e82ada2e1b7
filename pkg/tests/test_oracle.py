"""Matrix-group oracle: orders, invariants, Cartans, small coincidences."""

import pytest

from galcert.oracle import (
    Mat2,
    cartan_and_normalizer,
    cartan_facts,
    gl2_elements,
    lemma_order_trace_table,
    pgl_order,
    psl2_classes,
    psl2_order,
    psl_pgl_coincide,
    trace_det_invariant,
    _field_of_size,
)


def test_pgl_order_examples():
    F5 = _field_of_size(5)
    F7 = _field_of_size(7)
    assert pgl_order(Mat2.identity(F5)) == 1
    assert pgl_order(Mat2.from_ints(F5, 1, 1, 0, 1)) == 5
    assert pgl_order(Mat2.from_ints(F7, 0, -1, 1, 0)) == 2


def test_pgl_order_rejects_singular():
    F5 = _field_of_size(5)
    with pytest.raises(ValueError):
        pgl_order(Mat2.from_ints(F5, 1, 2, 2, 4))


def test_trace_det_invariant_under_scaling_and_conjugacy():
    F7 = _field_of_size(7)
    A = Mat2.from_ints(F7, 2, 3, 1, 4)
    base = trace_det_invariant(A)
    for s in (2, 3, 6):
        S = Mat2.from_ints(F7, s, 0, 0, s)
        assert trace_det_invariant(S * A) == base
    for g in (Mat2.from_ints(F7, 1, 1, 0, 1), Mat2.from_ints(F7, 0, -1, 1, 2)):
        ginv_num = Mat2(F7, g.d, -g.b, -g.c, g.a)
        det = g.det()
        ginv = Mat2(F7, ginv_num.a / det, ginv_num.b / det, ginv_num.c / det, ginv_num.d / det)
        assert trace_det_invariant(ginv * A * g) == base


def test_gl2_count():
    F3 = _field_of_size(3)
    assert sum(1 for _ in gl2_elements(F3)) == (9 - 1) * (9 - 3)


def test_split_cartan_q5():
    C, N = cartan_and_normalizer(5, split=True)
    assert len(C) == 16 and len(N) == 32
    for g in N - C:
        assert g.trace().is_zero() and (g * g).is_scalar()


def test_nonsplit_cartan_q3():
    C, N = cartan_and_normalizer(3, split=False)
    assert len(C) == 8 and len(N) == 16


def test_nonsplit_cartan_q7_unique_involution():
    rep = cartan_facts(7, split=False)
    assert rep["unique_order2_is_minus_identity"] is True


def test_lemma_table_small():
    for q in (3, 5, 9):
        rep = lemma_order_trace_table(q)
        assert rep["group_order"] == (q * q - 1) * (q * q - q)
    # order 4 exists in PGL2(F_9) and carries invariant 2
    rep9 = lemma_order_trace_table(9)
    assert rep9["orders"][4] == [(2,)]


def test_psl_equals_pgl_even_char():
    for q in (2, 4):
        assert psl_pgl_coincide(q)
    assert not psl_pgl_coincide(5)


def test_psl2_orders():
    for q in (2, 3, 5, 7, 9):
        expected = q * (q * q - 1) // (2 if q % 2 == 1 else 1)
        assert psl2_order(q) == expected


def test_psl2_classes_are_projective():
    F3 = _field_of_size(3)
    classes = psl2_classes(F3)
    assert len(classes) == 12
    # -I and I collapse to the same class
    assert tuple(tuple(x.residue) for x in (F3.one(), F3.zero(), F3.zero(), F3.one())) in classes
