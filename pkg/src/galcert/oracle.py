"""Exhaustive checks of the small-group facts the certifier leans on.

Everything here is finite and checked by brute force over GL2 of small
fields: the order-versus-trace table behind the witness conditions, the
Cartan subgroups and their normalizers, and the PSL2 = PGL2 coincidence
in even characteristic. The checks exist to catch transcription errors
in the certifier's clauses, so they recompute everything from matrix
arithmetic alone.
"""

from .arith.finitefield import FFField, extension_with_embedding
from .arith import intfact


class Mat2:
    """2x2 matrix over a finite field."""

    __slots__ = ("field", "a", "b", "c", "d")

    def __init__(self, field, a, b, c, d):
        self.field = field
        self.a = a
        self.b = b
        self.c = c
        self.d = d

    @classmethod
    def from_ints(cls, field, a, b, c, d):
        e = field.element
        return cls(field, e([a]), e([b]), e([c]), e([d]))

    @classmethod
    def identity(cls, field):
        return cls(field, field.one(), field.zero(), field.zero(), field.one())

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def __mul__(self, other):
        return Mat2(
            self.field,
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def is_scalar(self):
        return self.b.is_zero() and self.c.is_zero() and self.a == self.d

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return (
            self.a == other.a
            and self.b == other.b
            and self.c == other.c
            and self.d == other.d
        )

    def __hash__(self):
        return hash((hash(self.a), hash(self.b), hash(self.c), hash(self.d)))

    def __repr__(self):
        return "Mat2(%r, %r; %r, %r)" % (self.a, self.b, self.c, self.d)


def gl2_elements(field):
    """All invertible 2x2 matrices, in deterministic lex order."""
    els = list(field)
    zero = field.zero()
    for a in els:
        for b in els:
            for c in els:
                for d in els:
                    if (a * d - b * c) != zero:
                        yield Mat2(field, a, b, c, d)


def sl2_elements(field):
    one = field.one()
    for A in gl2_elements(field):
        if A.det() == one:
            yield A


def pgl_order(A):
    """Least m >= 1 with A^m scalar."""
    if A.det().is_zero():
        raise ValueError("matrix is singular")
    m = 1
    P = A
    # orders in PGL2 divide q-1, q+1 or equal the characteristic, so the
    # walk is short; cap defensively anyway
    cap = A.field.q * (A.field.q + 1)
    while not P.is_scalar():
        P = P * A
        m += 1
        if m > cap:
            raise RuntimeError("projective order exceeded its bound")
    return m


def trace_det_invariant(A):
    """tr(A)^2 / det(A), a conjugation- and scaling-invariant of PGL2."""
    det = A.det()
    if det.is_zero():
        raise ValueError("matrix is singular")
    t = A.trace()
    return t * t / det


def projective_canonical(A):
    """Canonical representative of the scalar class, as residue tuples."""
    for lead in (A.a, A.b, A.c, A.d):
        if not lead.is_zero():
            inv = lead.inverse()
            return tuple(
                tuple((x * inv).residue) for x in (A.a, A.b, A.c, A.d)
            )
    raise ValueError("zero matrix has no scalar class")


def pgl2_classes(field):
    return {projective_canonical(A) for A in gl2_elements(field)}

def psl2_classes(field):
    return {projective_canonical(A) for A in sl2_elements(field)}


def _nonsquare(field):
    squares = {tuple((x * x).residue) for x in field}
    for x in field:
        if not x.is_zero() and tuple(x.residue) not in squares:
            return x
    raise ValueError("no non-square: field has even characteristic")


def cartan_and_normalizer(q, split):
    """The Cartan subgroup of GL2(F_q) and its normalizer, as sets.

    Split: diagonal matrices, order (q-1)^2, normalizer adds the coordinate
    swap. Non-split (odd q): multiplication by F_{q^2}^x on the basis
    (1, sqrt(d)) for a non-square d, generated by a deterministically chosen
    matrix of full order q^2 - 1; the normalizer adds the conjugation map.
    """
    field = _field_of_size(q)
    if split:
        C = set()
        for x in field:
            if x.is_zero():
                continue
            for y in field:
                if y.is_zero():
                    continue
                C.add(Mat2(field, x, field.zero(), field.zero(), y))
        w = Mat2.from_ints(field, 0, 1, 1, 0)
    else:
        d = _nonsquare(field)
        # multiplication by a + b*sqrt(d) has matrix [[a, d b], [b, a]]
        gen = None
        for a in field:
            if gen is not None:
                break
            for b in field:
                if a.is_zero() and b.is_zero():
                    continue
                M = Mat2(field, a, d * b, b, a)
                if _mult_order(M) == q * q - 1:
                    gen = M
                    break
        if gen is None:
            raise RuntimeError("no generator of the non-split Cartan found")
        C = set()
        P = Mat2.identity(field)
        for _ in range(q * q - 1):
            P = P * gen
            C.add(P)
        w = Mat2.from_ints(field, 1, 0, 0, -1)
    N = set(C) | {w * M for M in C}
    return C, N


def _mult_order(A):
    """Order of A in GL2, by walking powers; A must be invertible."""
    if A.det().is_zero():
        return 0
    I = Mat2.identity(A.field)
    m = 1
    P = A
    cap = A.field.q ** 2 * (A.field.q ** 2 - 1)
    while P != I:
        P = P * A
        m += 1
        if m > cap:
            raise RuntimeError("order exceeded the group bound")
    return m


def _field_of_size(q):
    fac = intfact.factor_int(q)
    if len(fac) != 1:
        raise ValueError("%d is not a prime power" % q)
    ell, r = fac[0]
    if r == 1:
        return FFField(ell)
    F, _ = extension_with_embedding(FFField(ell), r)
    return F


def lemma_order_trace_table(q):
    """Exhaustive order-versus-invariant audit of GL2(F_q).

    Returns a report with, per projective order m, the set of values
    tr^2/det takes; raises AssertionError when the table the certifier
    uses is violated anywhere.
    """
    field = _field_of_size(q)
    ell = field.ell
    table = {}
    fixed = {1: 4, 2: 0, 3: 1, 4: 2}
    count = 0
    for A in gl2_elements(field):
        count += 1
        m = pgl_order(A)
        u = trace_det_invariant(A)
        table.setdefault(m, set()).add(tuple(u.residue))
        if m % ell == 0:
            assert u == 4 % ell, (q, m, u)
        elif m in fixed:
            assert u == fixed[m] % ell, (q, m, u)
        elif m == 5:
            assert (u * u - 3 * u + 1).is_zero(), (q, m, u)
    # away from the characteristic the invariant is a function of m
    for m, vals in table.items():
        if m % ell != 0 and m in fixed:
            assert len(vals) == 1, (q, m, vals)
    return {
        "q": q,
        "group_order": count,
        "orders": {m: sorted(vals) for m, vals in sorted(table.items())},
    }


def cartan_facts(q, split):
    """Audit the Cartan subgroup facts for one q; returns a report."""
    C, N = cartan_and_normalizer(q, split)
    want = (q - 1) ** 2 if split else q * q - 1
    assert len(C) == want, (q, split, len(C))
    assert len(N) == 2 * len(C), (q, split)
    outer = N - C
    for g in outer:
        assert g.trace().is_zero(), (q, split)
        assert (g * g).is_scalar(), (q, split)
    report = {"q": q, "split": split, "C_order": len(C), "N_order": len(N)}
    if not split:
        field = next(iter(C)).field
        minus_I = Mat2.from_ints(field, -1, 0, 0, -1)
        order2 = [g for g in C if _mult_order(g) == 2]
        assert order2 == [minus_I], (q, "order-2 elements of the non-split Cartan")
        report["unique_order2_is_minus_identity"] = True
    return report


def psl_pgl_coincide(q):
    """True iff PSL2(F_q) = PGL2(F_q) inside PGL2, by enumeration."""
    field = _field_of_size(q)
    return psl2_classes(field) == pgl2_classes(field)


def psl2_order(q):
    field = _field_of_size(q)
    return len(psl2_classes(field))


def selftest(qs=(3, 5, 7, 9, 11), even_qs=(2, 4, 8)):
    """Run every oracle suite; returns the combined report."""
    report = {"lemma_table": [], "cartan": [], "psl_pgl": {}, "psl2_orders": {}}
    for q in qs:
        report["lemma_table"].append(lemma_order_trace_table(q))
        report["cartan"].append(cartan_facts(q, split=True))
        if q % 2 == 1:
            report["cartan"].append(cartan_facts(q, split=False))
    for q in even_qs:
        assert psl_pgl_coincide(q), q
        report["psl_pgl"][str(q)] = True
    for q in sorted(set(qs) | set(even_qs)):
        n = psl2_order(q)
        expected = q * (q * q - 1) // (2 if q % 2 == 1 else 1)
        assert n == expected, (q, n, expected)
        report["psl2_orders"][str(q)] = n
    report["ok"] = True
    return report
