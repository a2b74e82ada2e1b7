"""Finite fields F_{ell^f} as polynomial quotients over F_ell.

A field is (ell, modulus) with modulus a monic irreducible polynomial over
F_ell; elements are residues of degree < f. The prime field itself uses the
degree-1 modulus x.
"""

from . import modpoly


class FFField:
    def __init__(self, ell, modulus=None, check=True):
        self.ell = ell
        if modulus is None:
            modulus = [0, 1]
        self.modulus = modpoly.monic(modpoly.normalize(modulus, ell), ell)
        self.f = modpoly.degree(self.modulus)
        if self.f < 1:
            raise ValueError("modulus must have degree >= 1")
        if check and not modpoly.is_irreducible(self.modulus, ell):
            raise ValueError("modulus is reducible mod %d" % ell)
        self.q = ell**self.f

    def element(self, coeffs):
        if isinstance(coeffs, int):
            coeffs = [coeffs]
        return FFElem(self, modpoly.mod(modpoly.normalize(coeffs, self.ell), self.modulus, self.ell))

    def zero(self):
        return FFElem(self, [])

    def one(self):
        return FFElem(self, [1])

    def gen(self):
        return self.element([0, 1])

    def __iter__(self):
        """All q elements, in lexicographic coefficient order."""
        def rec(prefix, k):
            if k == self.f:
                yield FFElem(self, modpoly.normalize(prefix, self.ell))
                return
            for c in range(self.ell):
                yield from rec(prefix + [c], k + 1)

        yield from rec([], 0)

    def multiplicative_generator(self):
        """Smallest generator of F^x in iteration order."""
        target = self.q - 1
        for x in self:
            if not x.is_zero() and x.multiplicative_order() == target:
                return x
        raise ArithmeticError("no generator found")

    def __eq__(self, other):
        return (
            isinstance(other, FFField)
            and self.ell == other.ell
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.ell, tuple(self.modulus)))

    def __repr__(self):
        return "FFField(%d, %r)" % (self.ell, self.modulus)


class FFElem:
    __slots__ = ("field", "residue")

    def __init__(self, field, residue):
        self.field = field
        self.residue = list(residue)

    def _coerce(self, other):
        if isinstance(other, FFElem):
            if other.field != self.field:
                raise ValueError("mixed fields")
            return other
        if isinstance(other, int):
            return self.field.element([other])
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FFElem(self.field, modpoly.add(self.residue, o.residue, self.field.ell))

    __radd__ = __add__

    def __neg__(self):
        return FFElem(self.field, modpoly.scale(self.residue, -1, self.field.ell))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FFElem(self.field, modpoly.sub(self.residue, o.residue, self.field.ell))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prod = modpoly.mul(self.residue, o.residue, self.field.ell)
        return FFElem(self.field, modpoly.mod(prod, self.field.modulus, self.field.ell))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return FFElem(
            self.field,
            modpoly.powmod(self.residue, e, self.field.modulus, self.field.ell),
        )

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.residue == o.residue

    def __hash__(self):
        return hash((self.field, tuple(self.residue)))

    def is_zero(self):
        return not self.residue

    def multiplicative_order(self):
        if self.is_zero():
            raise ArithmeticError("zero has no multiplicative order")
        n = self.field.q - 1
        order = n
        for p in _prime_divisors(n):
            while order % p == 0 and (self ** (order // p)) == 1:
                order //= p
        return order

    def degree_over_prime_field(self):
        """Degree of the subfield F_ell(self), via Frobenius iteration."""
        x = self
        for d in range(1, self.field.f + 1):
            x = x**self.field.ell
            if x == self and self.field.f % d == 0:
                return d
        raise ArithmeticError("Frobenius orbit did not close")

    def __repr__(self):
        return "FFElem(%r, q=%d)" % (self.residue, self.field.q)


def is_square_ff(x):
    """True iff x is a square in its field; zero counts, char 2 always."""
    if x.is_zero():
        return True
    q = x.field.q
    if q % 2 == 0:
        return True
    return x ** ((q - 1) // 2) == 1


def sqrt_ff(x):
    """A square root of x, or None. Tonelli-Shanks in the cyclic group."""
    if x.is_zero():
        return x
    if not is_square_ff(x):
        return None
    q = x.field.q
    if q % 2 == 0:
        return x ** (q // 2)
    if q % 4 == 3:
        return x ** ((q + 1) // 4)
    g = x.field.multiplicative_generator()
    # write x = g^(2t), sqrt = g^t; discrete log by baby steps (fields are small)
    acc = x.field.one()
    for t in range(q - 1):
        if acc == x:
            return g ** (t // 2) if t % 2 == 0 else None
        acc = acc * g
    return None


def extension_with_embedding(base, degree):
    """Extension F of a finite field with [F : base] = degree.

    Returns (F, embed) where F is an FFField over the same prime field with
    modulus of degree base.f * degree, chosen deterministically, and embed
    maps base elements into F (the base generator goes to the first root of
    the base modulus found in F's iteration order).
    """
    ell = base.ell
    n = base.f * degree
    modulus = _first_irreducible(ell, n)
    big = FFField(ell, modulus, check=False)
    root = None
    for cand in big:
        if _eval_poly_ff(base.modulus, cand).is_zero():
            root = cand
            break
    if root is None:
        raise ArithmeticError("base modulus has no root in the extension")

    def embed(x):
        acc = big.zero()
        for c in reversed(x.residue):
            acc = acc * root + big.element([c])
        return acc

    return big, embed


def _eval_poly_ff(coeffs, x):
    acc = x.field.zero()
    for c in reversed(coeffs):
        acc = acc * x + x.field.element([c])
    return acc


def _first_irreducible(ell, n):
    """First monic degree-n irreducible over F_ell in lexicographic order."""
    def rec(prefix):
        if len(prefix) == n:
            cand = prefix + [1]
            if modpoly.is_irreducible(cand, ell):
                return cand
            return None
        for c in range(ell):
            got = rec(prefix + [c])
            if got:
                return got
        return None

    got = rec([])
    if not got:
        raise ArithmeticError("no irreducible of degree %d mod %d" % (n, ell))
    return got


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out
