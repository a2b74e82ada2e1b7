"""Dirichlet characters: Kronecker symbols, quadratic characters mod m,
and characters with values in a finite field.

The unit group (Z/mZ)^x is decomposed by CRT into cyclic components with
explicit generators; characters are stored as generator-image vectors.
"""

from math import gcd

from .arith import intfact
from .arith.finitefield import FFField


def kronecker(a, n):
    """Kronecker symbol (a|n), completely multiplicative in both arguments."""
    if a == 0 and n == 0:
        raise ValueError("kronecker(0, 0) is undefined")
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    # Jacobi symbol for odd positive n
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _primitive_root_prime(p):
    if p == 2:
        return 1
    phi = p - 1
    factors = intfact.prime_divisors(phi)
    g = 2
    while True:
        if all(pow(g, phi // q, p) != 1 for q in factors):
            return g
        g += 1


def _primitive_root_prime_power(p, e):
    """Smallest primitive root mod p (adjusted by +p if needed) works for p^e."""
    g = _primitive_root_prime(p)
    if e == 1:
        return g
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _crt_lift(residue, q, m):
    """The unit mod m that is residue mod q and 1 mod m//q."""
    other = m // q
    inv = pow(other, -1, q)
    return (1 + other * ((residue - 1) * inv % q)) % m


class UnitGroupStructure:
    """CRT decomposition of (Z/mZ)^x into cyclic components.

    generators[i] has order orders[i] and the components are independent:
    every unit is (-1)^s 5^t on the 2-part (e >= 3) times powers of
    primitive roots on the odd parts. Discrete-log tables are built once.
    """

    def __init__(self, modulus):
        if modulus < 1:
            raise ValueError("modulus must be positive")
        self.modulus = modulus
        self.generators = []
        self.orders = []
        self._components = []  # (prime_power, kind, dlog table or None)
        for p, e in intfact.factor_int(modulus):
            q = p**e
            if p == 2:
                if e == 1:
                    continue
                self.generators.append(_crt_lift(q - 1, q, modulus))
                self.orders.append(2)
                self._components.append((q, "sign", None))
                if e >= 3:
                    self.generators.append(_crt_lift(5, q, modulus))
                    self.orders.append(2 ** (e - 2))
                    self._components.append((q, "five", _dlog_table(5, 2 ** (e - 2), q)))
            else:
                g = _primitive_root_prime_power(p, e)
                order = q // p * (p - 1)
                self.generators.append(_crt_lift(g, q, modulus))
                self.orders.append(order)
                self._components.append((q, "odd", _dlog_table(g, order, q)))

    def exponent_vector(self, a):
        if gcd(a, self.modulus) != 1:
            raise ValueError("non-unit argument")
        out = []
        for q, kind, table in self._components:
            r = a % q
            if kind == "sign":
                out.append(0 if r % 4 == 1 else 1)
            elif kind == "five":
                if r % 4 != 1:
                    r = (q - r) % q
                out.append(table[r])
            else:
                out.append(table[r])
        return tuple(out)

    def order(self):
        total = 1
        for d in self.orders:
            total *= d
        return total


def _dlog_table(gen, order, q):
    table = {}
    acc = 1
    for k in range(order):
        table[acc] = k
        acc = acc * gen % q
    return table


_GROUP_CACHE = {}


def unit_group(m):
    if m not in _GROUP_CACHE:
        _GROUP_CACHE[m] = UnitGroupStructure(m)
    return _GROUP_CACHE[m]


class QuadChar:
    """Character (Z/mZ)^x -> {+-1} given by signs on the group generators."""

    def __init__(self, modulus, signs):
        self.group = unit_group(modulus)
        self.modulus = modulus
        self.signs = tuple(signs)
        if len(self.signs) != len(self.group.generators):
            raise ValueError("sign vector length mismatch")
        for s, d in zip(self.signs, self.group.orders):
            if s not in (1, -1) or (s == -1 and d % 2 != 0):
                raise ValueError("invalid sign vector")

    def value(self, a):
        if gcd(a, self.modulus) != 1:
            return 0
        exps = self.group.exponent_vector(a)
        out = 1
        for s, e in zip(self.signs, exps):
            if s == -1 and e % 2 == 1:
                out = -out
        return out

    def is_trivial(self):
        return all(s == 1 for s in self.signs)

    def conductor(self):
        """Smallest d | m such that the character factors through (Z/dZ)^x."""
        m = self.modulus
        divisors = sorted(d for d in range(1, m + 1) if m % d == 0)
        for d in divisors:
            if all(self.value(a) == 1 for a in range(1, m + 1)
                   if gcd(a, m) == 1 and a % d == 1 % d):
                return d
        return m

    def __eq__(self, other):
        return (
            isinstance(other, QuadChar)
            and self.modulus == other.modulus
            and self.signs == other.signs
        )

    def __hash__(self):
        return hash((self.modulus, self.signs))

    def __repr__(self):
        return "QuadChar(mod %d, signs=%r)" % (self.modulus, self.signs)


def enumerate_quadratic_chars(m):
    """All nontrivial characters (Z/mZ)^x -> {+-1}; 2^t - 1 of them."""
    group = unit_group(m)
    even_positions = [i for i, d in enumerate(group.orders) if d % 2 == 0]
    out = []
    for mask in range(1, 2 ** len(even_positions)):
        signs = [1] * len(group.orders)
        for bit, pos in enumerate(even_positions):
            if (mask >> bit) & 1:
                signs[pos] = -1
        out.append(QuadChar(m, signs))
    return out


def quadchar_from_kronecker(disc, m):
    """The Kronecker character (disc|.) as a QuadChar mod m.

    Requires every unit class mod m to have a well-defined symbol, i.e. the
    conductor of (disc|.) divides m.
    """
    group = unit_group(m)
    signs = [kronecker(disc, g) for g in group.generators]
    if any(s == 0 for s in signs):
        raise ValueError("discriminant shares a factor with the modulus")
    chi = QuadChar(m, signs)
    for a in range(1, m + 1):
        if gcd(a, m) == 1 and chi.value(a) != kronecker(disc, a):
            raise ValueError("conductor of (%d|.) does not divide %d" % (disc, m))
    return chi


class FFChar:
    """Character (Z/NZ)^x -> F^x given by images of the group generators."""

    def __init__(self, modulus, field, images):
        self.group = unit_group(modulus)
        self.modulus = modulus
        self.field = field
        self.images = tuple(images)
        if len(self.images) != len(self.group.generators):
            raise ValueError("image vector length mismatch")

    def value(self, a):
        if gcd(a, self.modulus) != 1:
            raise ValueError("non-unit argument")
        exps = self.group.exponent_vector(a)
        out = self.field.one()
        for img, e in zip(self.images, exps):
            out = out * img**e
        return out

    def is_trivial(self):
        one = self.field.one()
        return all(img == one for img in self.images)

    def __eq__(self, other):
        return (
            isinstance(other, FFChar)
            and self.modulus == other.modulus
            and self.field == other.field
            and self.images == other.images
        )

    def __hash__(self):
        return hash((self.modulus, self.field, self.images))

    def __repr__(self):
        return "FFChar(mod %d, q=%d)" % (self.modulus, self.field.q)


def enumerate_ff_chars(N, field):
    """All homomorphisms (Z/NZ)^x -> F^x (the trivial one included)."""
    group = unit_group(N)
    z = field.multiplicative_generator()
    choices = []
    for d in group.orders:
        g = gcd(d, field.q - 1)
        step = (field.q - 1) // g
        choices.append([z ** (step * j) for j in range(g)])

    def rec(i, images):
        if i == len(choices):
            yield FFChar(N, field, images)
            return
        for img in choices[i]:
            yield from rec(i + 1, images + [img])

    yield from rec(0, [])


def char_value(chi, a):
    """Evaluate a QuadChar or FFChar at an integer."""
    return chi.value(a)
