"""Power series over Z[i] and the level-27 weight-3 newform.

The form is assembled from an eta product and three theta series of the
hexagonal lattice; every coefficient must land in Z[i] after the final
halving, which is asserted rather than carried as a rational.
"""

from .arith import intfact


class GaussInt:
    """Element a + bi of Z[i]."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re
        self.im = im

    def _coerce(self, other):
        if isinstance(other, GaussInt):
            return other
        if isinstance(other, int):
            return GaussInt(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussInt(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def conj(self):
        return GaussInt(self.re, -self.im)

    def norm(self):
        return self.re * self.re + self.im * self.im

    def is_real(self):
        return self.im == 0

    def __repr__(self):
        if self.im == 0:
            return "GaussInt(%d)" % self.re
        return "GaussInt(%d, %d)" % (self.re, self.im)


class QSeries:
    """Dense power series over Z[i] through q^precision."""

    __slots__ = ("re", "im", "precision")

    def __init__(self, re, im, precision):
        self.re = list(re) + [0] * (precision + 1 - len(re))
        self.im = list(im) + [0] * (precision + 1 - len(im))
        self.precision = precision

    @classmethod
    def from_coeffs(cls, coeffs, precision):
        re = [c.re if isinstance(c, GaussInt) else c for c in coeffs]
        im = [c.im if isinstance(c, GaussInt) else 0 for c in coeffs]
        return cls(re, im, precision)

    def coeff(self, n):
        if n > self.precision:
            raise IndexError("beyond series precision")
        return GaussInt(self.re[n], self.im[n])

    def __add__(self, other):
        b = min(self.precision, other.precision)
        return QSeries(
            [x + y for x, y in zip(self.re[: b + 1], other.re[: b + 1])],
            [x + y for x, y in zip(self.im[: b + 1], other.im[: b + 1])],
            b,
        )

    def __sub__(self, other):
        b = min(self.precision, other.precision)
        return QSeries(
            [x - y for x, y in zip(self.re[: b + 1], other.re[: b + 1])],
            [x - y for x, y in zip(self.im[: b + 1], other.im[: b + 1])],
            b,
        )

    def __mul__(self, other):
        b = min(self.precision, other.precision)
        rr = _convolve(self.re, other.re, b)
        out_re = rr
        if any(self.im) or any(other.im):
            ii = _convolve(self.im, other.im, b)
            out_re = [x - y for x, y in zip(rr, ii)]
            ri = _convolve(self.re, other.im, b)
            ir = _convolve(self.im, other.re, b)
            out_im = [x + y for x, y in zip(ri, ir)]
        else:
            out_im = [0] * (b + 1)
        return QSeries(out_re, out_im, b)

    def scale(self, c):
        c = GaussInt(c) if isinstance(c, int) else c
        return QSeries(
            [c.re * x - c.im * y for x, y in zip(self.re, self.im)],
            [c.re * y + c.im * x for x, y in zip(self.re, self.im)],
            self.precision,
        )


def _convolve(a, b, bound):
    out = [0] * (bound + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > bound:
            continue
        top = bound - i
        for j, bj in enumerate(b[: top + 1]):
            if bj:
                out[i + j] += ai * bj
    return out


def eta_product_g(B):
    """g = q * prod_{n>=1} (1 - q^(3n))^2 (1 - q^(9n))^2 through q^B."""
    if B < 1:
        raise ValueError("precision must be >= 1")
    coeffs = [0] * (B + 1)
    coeffs[1] = 1
    for step in (3, 9):
        for n in range(1, B // step + 1):
            m = step * n
            for _ in range(2):
                # multiply by (1 - q^m) in place, descending to reuse storage
                for idx in range(B, m - 1, -1):
                    coeffs[idx] -= coeffs[idx - m]
    return QSeries(coeffs, [], B)


def theta_j(j, B):
    """theta_j = sum over x, y in Z of q^(3^j (x^2 + xy + y^2)) through q^B."""
    if j not in (0, 1, 2):
        raise ValueError("j must be 0, 1, or 2")
    if B < 1:
        raise ValueError("precision must be >= 1")
    scale = 3**j
    coeffs = [0] * (B + 1)
    r = 1
    while r * r <= 2 * B:
        r += 1
    for x in range(-r, r + 1):
        for y in range(-r, r + 1):
            e = scale * (x * x + x * y + y * y)
            if e <= B:
                coeffs[e] += 1
    return QSeries(coeffs, [], B)


def build_level27_newform(B=2000):
    """Coefficients a_1..a_B of the level-27 weight-3 newform (index n-1 = a_n).

    f = (i/2) g theta_0 - ((1+i)/2) g theta_1 + (3/2) g theta_2, with the
    halving required to be exact in Z[i].
    """
    g = eta_product_g(B)
    t0 = (g * theta_j(0, B)).re
    t1 = (g * theta_j(1, B)).re
    t2 = (g * theta_j(2, B)).re
    out = []
    for n in range(1, B + 1):
        re2 = -t1[n] + 3 * t2[n]
        im2 = t0[n] - t1[n]
        if re2 % 2 != 0 or im2 % 2 != 0:
            raise ArithmeticError("non-integral coefficient at q^%d" % n)
        out.append(GaussInt(re2 // 2, im2 // 2))
    if out[0] != GaussInt(1, 0):
        raise ArithmeticError("leading coefficient is not 1")
    return out


def hecke_validate(a, k, eps):
    """Check Hecke eigenform structure of a_1..a_B (index n-1 = a_n).

    Verifies a_{mn} = a_m a_n for coprime m, n and the recursion
    a_{p^{r+1}} = a_p a_{p^r} - eps(p) p^{k-1} a_{p^{r-1}} for eps(p) != 0.
    Returns "pass" or a string describing the first violation.
    """
    B = len(a)
    if B < 50:
        raise ValueError("need at least 50 coefficients")

    def coeff(n):
        return a[n - 1]

    from math import gcd

    for m in range(2, B + 1):
        for n in range(2, B // m + 1):
            if gcd(m, n) == 1 and coeff(m * n) != coeff(m) * coeff(n):
                return "multiplicativity fails at (%d, %d)" % (m, n)
    for p in intfact.primes_up_to(B):
        e = eps(p)
        if e == 0:
            continue
        r = 1
        while p ** (r + 1) <= B:
            lhs = coeff(p ** (r + 1))
            rhs = coeff(p) * coeff(p**r) - e * p ** (k - 1) * coeff(p ** (r - 1))
            if lhs != rhs:
                return "prime power recursion fails at p=%d, r=%d" % (p, r)
            r += 1
    return "pass"
