"""Number fields Q[x]/(m) with prime splitting and residue maps.

Elements carry rational coordinates in the power basis of a monic integral
defining polynomial. Prime splitting works in the polynomial order Z[theta],
which is sound at ell when ell^2 does not divide disc(m), when the caller
asserts maximality, or when the Dedekind criterion certifies it.
"""

from fractions import Fraction
from math import gcd

from . import intfact, linalg, modpoly, poly, ratfact
from .finitefield import FFField, is_square_ff


class NumberField:
    def __init__(self, defining_poly, check_irreducible=True, assume_maximal=False):
        coeffs = poly.to_int_coeffs(poly.normalize(list(defining_poly)))
        if not coeffs or coeffs[-1] != 1:
            raise ValueError("defining polynomial must be monic and integral")
        self.defining_poly = coeffs
        self.degree = len(coeffs) - 1
        if self.degree < 1:
            raise ValueError("defining polynomial must have degree >= 1")
        if check_irreducible and self.degree > 1 and not ratfact.is_irreducible(coeffs):
            raise ValueError("defining polynomial is reducible over Q")
        # caller's assertion that Z[theta] is maximal at every prime
        self.assume_maximal = assume_maximal
        self._poly_q = [Fraction(c) for c in coeffs]
        self._disc = None

    def discriminant(self):
        if self._disc is None:
            self._disc = poly.poly_discriminant(self.defining_poly)
        return self._disc

    def element(self, value):
        if isinstance(value, NFElement):
            if value.parent != self:
                raise ValueError("element of a different field")
            return value
        if isinstance(value, (int, Fraction)):
            value = [value]
        coords = poly.mod(poly.normalize([Fraction(c) for c in value]), self._poly_q)
        return NFElement(self, coords)

    def zero(self):
        return NFElement(self, [])

    def one(self):
        return NFElement(self, [Fraction(1)])

    def gen(self):
        return self.element([0, 1])

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.defining_poly == other.defining_poly

    def __hash__(self):
        return hash(tuple(self.defining_poly))

    def __repr__(self):
        return "NumberField(%r)" % (self.defining_poly,)


# The rationals as the degree-1 field Q[x]/(x).
QQ = NumberField([0, 1], check_irreducible=False, assume_maximal=True)


class NFElement:
    __slots__ = ("parent", "coords")

    def __init__(self, parent, coords):
        self.parent = parent
        self.coords = list(coords)

    def coords_vector(self):
        """Coordinates padded to the field degree."""
        out = list(self.coords)
        out += [Fraction(0)] * (self.parent.degree - len(out))
        return out

    def _coerce(self, other):
        if isinstance(other, NFElement):
            if other.parent != self.parent:
                raise ValueError("mixed number fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.parent.element(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NFElement(self.parent, poly.add(self.coords, o.coords))

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.parent, poly.neg(self.coords))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NFElement(self.parent, poly.sub(self.coords, o.coords))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prod = poly.mul(self.coords, o.coords)
        return NFElement(self.parent, poly.mod(prod, self.parent._poly_q))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        g, s, _ = poly.xgcd(self.coords, self.parent._poly_q)
        if poly.degree(g) != 0:
            raise ArithmeticError("defining polynomial is not irreducible")
        return NFElement(self.parent, poly.mod(s, self.parent._poly_q))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.parent.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.coords == o.coords

    def __hash__(self):
        return hash((self.parent, tuple(self.coords)))

    def is_zero(self):
        return not self.coords

    def is_rational(self):
        return poly.degree(self.coords) <= 0

    def as_fraction(self):
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coords[0] if self.coords else Fraction(0)

    def __repr__(self):
        return "NFElement(%r)" % (self.coords,)


class PrimeData:
    """A prime above ell, given by an irreducible factor of m mod ell."""

    __slots__ = ("ell", "local_factor", "residue_degree", "multiplicity")

    def __init__(self, ell, local_factor, multiplicity=1):
        self.ell = ell
        self.local_factor = modpoly.monic(modpoly.normalize(local_factor, ell), ell)
        self.residue_degree = modpoly.degree(self.local_factor)
        self.multiplicity = multiplicity

    def residue_field(self):
        return FFField(self.ell, self.local_factor, check=False)

    def __eq__(self, other):
        return (
            isinstance(other, PrimeData)
            and self.ell == other.ell
            and self.local_factor == other.local_factor
        )

    def __hash__(self):
        return hash((self.ell, tuple(self.local_factor)))

    def __repr__(self):
        return "PrimeData(ell=%d, local_factor=%r, f=%d, e=%d)" % (
            self.ell,
            self.local_factor,
            self.residue_degree,
            self.multiplicity,
        )


def dedekind_ell_maximal(m, ell):
    """Dedekind criterion: True iff Z[x]/(m) is maximal at ell (m monic in Z[x])."""
    m_int = poly.to_int_coeffs(poly.normalize(list(m)))
    _, factors = modpoly.factor(m_int, ell)
    gbar = [1]
    for fac, _ in factors:
        gbar = modpoly.mul(gbar, fac, ell)
    mbar = modpoly.normalize(m_int, ell)
    hbar, rem = modpoly.divmod_poly(mbar, gbar, ell)
    if rem:
        raise ArithmeticError("radical does not divide m mod ell")
    g_lift = [Fraction(c) for c in gbar]
    h_lift = [Fraction(c) for c in hbar]
    prod = poly.mul(g_lift, h_lift)
    diff = poly.sub(prod, [Fraction(c) for c in m_int])
    f_poly = []
    for c in diff:
        if c.denominator != 1 or c.numerator % ell != 0:
            raise ArithmeticError("g*h - m not divisible by ell")
        f_poly.append(int(c) // ell)
    fbar = modpoly.normalize(f_poly, ell)
    g1 = modpoly.gcd(fbar, gbar, ell)
    g2 = modpoly.gcd(g1, hbar, ell)
    return modpoly.degree(g2) == 0


def primes_above(K, ell, assume_maximal=False):
    """Primes of O_K above ell, one per irreducible factor of m mod ell.

    Sound only when Z[theta] is maximal at ell; certified by ell^2 not
    dividing disc(m) or by an explicit assertion (constructor flag or the
    assume_maximal argument, e.g. backed by dedekind_ell_maximal).
    """
    if not intfact.is_prime(ell):
        raise ValueError("ell must be prime")
    certified = assume_maximal or K.assume_maximal
    if not certified and K.discriminant() % (ell * ell) == 0:
        raise ValueError("index-obstructed prime at %d" % ell)
    _, factors = modpoly.factor(K.defining_poly, ell)
    return [PrimeData(ell, fac, mult) for fac, mult in factors]


def reduce_mod(x, lam):
    """Image of x under O -> O/lambda, as an element of the residue field."""
    ell = lam.ell
    field = lam.residue_field()
    residues = []
    for c in x.coords:
        if c.denominator % ell == 0:
            raise ValueError("non-integral at lambda")
        residues.append(c.numerator * pow(c.denominator, -1, ell) % ell)
    return field.element(residues)


def nf_norm(x):
    """Norm from the parent field down to Q."""
    K = x.parent
    if x.is_zero():
        return Fraction(0)
    if poly.degree(x.coords) == 0:
        return x.coords[0] ** K.degree
    return poly.resultant(K._poly_q, x.coords)


def minpoly_over_Q(x):
    """Monic minimal polynomial of x over Q, ascending rational coefficients."""
    K = x.parent
    powers = [K.one().coords_vector()]
    acc = K.one()
    for _ in range(K.degree):
        acc = acc * x
        sol = linalg.solve_columns(powers, acc.coords_vector())
        if sol is not None:
            return poly.normalize([-c for c in sol] + [Fraction(1)])
        powers.append(acc.coords_vector())
    raise ArithmeticError("no linear dependency among powers")


def express_in_power_basis(x, gamma, d):
    """Rational coordinates of x in 1, gamma, ..., gamma^(d-1), or None."""
    K = x.parent
    cols = []
    acc = K.one()
    for _ in range(d):
        cols.append(acc.coords_vector())
        acc = acc * gamma
    return linalg.solve_columns(cols, x.coords_vector())


def _rat_valuation(q, ell):
    if q == 0:
        raise ValueError("valuation of zero")
    v = 0
    n = q.numerator
    while n % ell == 0:
        n //= ell
        v += 1
    d = q.denominator
    while d % ell == 0:
        d //= ell
        v -= 1
    return v


def _uniformizer(K, lam):
    """Element of valuation 1 at lam, for the unique prime above ell."""
    ell = lam.ell
    if lam.multiplicity == 1:
        return K.element(ell)
    f = lam.residue_degree
    g_theta = K.element([Fraction(c) for c in lam.local_factor])
    theta = K.gen()
    candidates = [g_theta, g_theta + ell, g_theta - ell, g_theta + ell * theta]
    for cand in candidates:
        norm = nf_norm(cand)
        if norm != 0 and _rat_valuation(norm, ell) == f:
            return cand
    raise ValueError("valuation unsupported")


def valuation_and_square_in_completion(x, lam):
    """(v_lambda(x), is x a square in the completion K_lambda).

    Valuation None encodes +infinity (x = 0). Supported cases: the field is
    Q, or lam is the unique prime above its residue characteristic; other
    splitting shapes raise "valuation unsupported". Odd ell only.
    """
    ell = lam.ell
    if ell == 2:
        raise ValueError("even-characteristic")
    K = x.parent
    if x.is_zero():
        return (None, True)
    if K.degree == 1:
        v = _rat_valuation(x.as_fraction(), ell)
        unit = x.as_fraction() / Fraction(ell) ** v
        field = FFField(ell)
        res = field.element(unit.numerator * pow(unit.denominator, -1, ell))
        return (v, v % 2 == 0 and is_square_ff(res))
    if lam.residue_degree * lam.multiplicity != K.degree:
        raise ValueError("valuation unsupported")
    norm = nf_norm(x)
    vnorm = _rat_valuation(norm, ell)
    if vnorm % lam.residue_degree != 0:
        raise ValueError("valuation unsupported")
    v = vnorm // lam.residue_degree
    if v % 2 != 0:
        return (v, False)
    pi = _uniformizer(K, lam)
    y = x * pi ** (-v) if v else x
    res = reduce_mod(y, lam)
    if res.is_zero():
        raise ArithmeticError("unit part reduced to zero")
    return (v, is_square_ff(res))


def _interp(points):
    """Lagrange interpolation through (x, y) rational pairs."""
    result = []
    for i, (xi, yi) in enumerate(points):
        term = [Fraction(yi)]
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            term = poly.mul(term, [Fraction(-xj, 1) / (xi - xj), Fraction(1, 1) / (xi - xj)])
        result = poly.add(result, term)
    return result


def _kpoly_normalize(p):
    while p and p[-1].is_zero():
        p.pop()
    return p


def _kpoly_monic(p):
    inv = p[-1].inverse()
    return [c * inv for c in p]


def _kpoly_mod(p, q):
    r = _kpoly_normalize(list(p))
    inv = q[-1].inverse()
    while len(r) >= len(q):
        c = r[-1] * inv
        shift = len(r) - len(q)
        for i, qc in enumerate(q):
            r[shift + i] = r[shift + i] - c * qc
        r.pop()
        r = _kpoly_normalize(r)
    return r


def _kpoly_gcd(p, q):
    a, b = _kpoly_normalize(list(p)), _kpoly_normalize(list(q))
    while b:
        a, b = b, _kpoly_mod(a, b)
    return _kpoly_monic(a) if a else a


def _kpoly_derivative(p):
    return _kpoly_normalize([i * c for i, c in enumerate(p)][1:])


def _kpoly_xshift(g_coeffs, shift, K):
    """g(x + shift) for rational-coefficient g and shift in K."""
    acc = []
    for a in reversed(g_coeffs):
        shifted = [K.zero()] + acc
        for i in range(len(acc)):
            shifted[i] = shifted[i] + acc[i] * shift
        acc = _kpoly_normalize(shifted)
        if acc:
            acc[0] = acc[0] + a
        else:
            acc = _kpoly_normalize([K.element(a)])
    return acc


def roots_in_field(K, f):
    """Roots in K of a monic polynomial f with coefficients in K (Trager).

    f is an ascending list of NFElements with last entry 1.
    """
    f = _kpoly_normalize([K.element(c) for c in f])
    if not f or f[-1] != K.one():
        raise ValueError("polynomial must be monic")
    d = len(f) - 1
    if d == 0:
        return []
    if d == 1:
        return [-f[0]]
    g = _kpoly_gcd(f, _kpoly_derivative(f))
    if len(g) > 1:
        # distinct roots survive in both parts
        quot = _kpoly_quotient(f, g)
        return sorted(
            set(roots_in_field(K, quot)) | set(roots_in_field(K, g)),
            key=lambda r: tuple(r.coords_vector()),
        )
    n = K.degree
    theta = K.gen()
    for s in range(50):
        dn = d * n
        pts = []
        for t in range(dn + 1):
            z = K.element(t) - s * theta
            val = K.zero()
            for c in reversed(f):
                val = val * z + c
            pts.append((Fraction(t), nf_norm(val)))
        norm_poly = _interp(pts)
        if poly.degree(poly.gcd(norm_poly, poly.derivative(norm_poly))) == 0:
            break
    else:
        raise ArithmeticError("no squarefree norm polynomial found")
    # clear denominators: factor den^dN * N(y/den), then map factors back
    den = 1
    for coeff in norm_poly:
        den = den * coeff.denominator // gcd(den, coeff.denominator)
    dn = poly.degree(norm_poly)
    scaled = [norm_poly[j] * den ** (dn - j) for j in range(dn + 1)]
    norm_int = poly.to_int_coeffs(scaled)
    roots = []
    for fac, _ in ratfact.factor_monic(norm_int):
        df = len(fac) - 1
        fac_q = [Fraction(fac[j], den ** (df - j)) for j in range(df + 1)]
        shifted = _kpoly_xshift(fac_q, s * theta, K)
        h = _kpoly_gcd(f, shifted)
        if len(h) == 2:
            roots.append(-h[0])
    return sorted(set(roots), key=lambda r: tuple(r.coords_vector()))


def _kpoly_quotient(p, q):
    K = q[-1].parent
    r = _kpoly_normalize(list(p))
    inv = q[-1].inverse()
    quot = [K.zero()] * max(len(r) - len(q) + 1, 0)
    while len(r) >= len(q):
        c = r[-1] * inv
        shift = len(r) - len(q)
        quot[shift] = c
        for i, qc in enumerate(q):
            r[shift + i] = r[shift + i] - c * qc
        r.pop()
        r = _kpoly_normalize(r)
    return _kpoly_normalize(quot)


def sqrt_in_field(x):
    """A canonical square root of x in its field, or None."""
    K = x.parent
    if x.is_zero():
        return K.zero()
    roots = roots_in_field(K, [-x, K.zero(), K.one()])
    if not roots:
        return None
    return roots[-1]


def is_square_in_field(x):
    return sqrt_in_field(x) is not None
