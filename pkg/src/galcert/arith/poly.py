"""Dense univariate polynomial arithmetic over the rationals.

Polynomials are lists of Fraction (or int) coefficients in ascending degree
order with no trailing zeros; the zero polynomial is the empty list. All
arithmetic is exact. Degrees in play are small (field polynomials up to 6,
norm polynomials up to 12), so schoolbook algorithms are used throughout.
"""

from fractions import Fraction


def normalize(coeffs):
    """Strip trailing zeros and coerce coefficients to Fraction."""
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return c


def degree(p):
    """Degree of p, with deg(0) = -1."""
    return len(p) - 1


def leading(p):
    return p[-1] if p else Fraction(0)


def is_monic(p):
    return bool(p) and p[-1] == 1


def add(p, q):
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, a in enumerate(p):
        out[i] += a
    for i, b in enumerate(q):
        out[i] += b
    return normalize(out)


def neg(p):
    return [-a for a in p]


def sub(p, q):
    return add(p, neg(q))


def mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return normalize(out)


def scale(p, c):
    c = Fraction(c)
    if c == 0:
        return []
    return [a * c for a in p]


def divmod_poly(p, q):
    """Quotient and remainder of p by q over the rationals."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(x) for x in p]
    dq = degree(q)
    lq = q[-1]
    quot = [Fraction(0)] * max(0, len(r) - dq)
    while len(r) - 1 >= dq and any(a != 0 for a in r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < dq:
            break
        shift = len(r) - 1 - dq
        c = r[-1] / lq
        quot[shift] = c
        for i in range(dq + 1):
            r[shift + i] -= c * q[i]
        r.pop()
    return normalize(quot), normalize(r)


def mod(p, q):
    return divmod_poly(p, q)[1]


def monic(p):
    if not p:
        return []
    return [a / p[-1] for a in p]


def gcd(p, q):
    """Monic gcd over the rationals."""
    a, b = normalize(p), normalize(q)
    while b:
        a, b = b, mod(a, b)
    return monic(a)


def xgcd(p, q):
    """Extended gcd: returns (g, s, t) with s*p + t*q = g, g monic or zero."""
    a, b = normalize(p), normalize(q)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while b:
        quo, rem = divmod_poly(a, b)
        a, b = b, rem
        s0, s1 = s1, sub(s0, mul(quo, s1))
        t0, t1 = t1, sub(t0, mul(quo, t1))
    if not a:
        return [], [], []
    lc = a[-1]
    return monic(a), scale(s0, Fraction(1) / lc), scale(t0, Fraction(1) / lc)


def derivative(p):
    return normalize([i * a for i, a in enumerate(p)][1:])


def evaluate(p, x):
    """Evaluate p at x by Horner; x may be any ring element with + and *."""
    acc = 0
    for a in reversed(p):
        acc = acc * x + a
    return acc


def compose(p, q):
    """p(q(x))."""
    acc = []
    for a in reversed(p):
        acc = add(mul(acc, q), [Fraction(a)])
    return acc


def shift_arg(p, s):
    """p(x + s) for rational s."""
    return compose(p, [Fraction(s), Fraction(1)])


def resultant(p, q):
    """Resultant of p and q over the rationals, exact."""
    a, b = normalize(p), normalize(q)
    if not a or not b:
        return Fraction(0)
    res = Fraction(1)
    while True:
        da, db = degree(a), degree(b)
        if db == 0:
            return res * b[0] ** da
        r = mod(a, b)
        dr = degree(r)
        if not r:
            return Fraction(0)
        res *= Fraction(-1) ** (da * db) * b[-1] ** (da - dr)
        a, b = b, r


def discriminant(p):
    """Discriminant of p, as an exact rational (integer for monic integral p)."""
    d = degree(p)
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    sign = (-1) ** (d * (d - 1) // 2)
    return sign * resultant(p, derivative(p)) / p[-1]


def poly_discriminant(p):
    """Discriminant of a monic integral polynomial, as an int."""
    q = normalize(p)
    if not is_monic(q):
        raise ValueError("poly_discriminant expects a monic polynomial")
    d = discriminant(q)
    if d.denominator != 1:
        raise ValueError("non-integral discriminant for integral input")
    return int(d)


def content_primitive(p):
    """Content and primitive part of an integral polynomial (lc > 0)."""
    from math import gcd as igcd

    ints = []
    den = 1
    for a in p:
        f = Fraction(a)
        den = den * f.denominator // igcd(den, f.denominator)
    for a in p:
        f = Fraction(a) * den
        ints.append(int(f))
    g = 0
    for a in ints:
        g = igcd(g, abs(a))
    if g == 0:
        return Fraction(0), []
    if ints[-1] < 0:
        g = -g
    return Fraction(g, den), [a // g for a in ints]


def to_int_coeffs(p):
    """Coefficients as ints; raises if any coefficient is non-integral."""
    out = []
    for a in p:
        f = Fraction(a)
        if f.denominator != 1:
            raise ValueError("non-integral coefficient")
        out.append(int(f))
    return out
