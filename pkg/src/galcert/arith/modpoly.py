"""Polynomial arithmetic and factorization over prime fields F_ell.

Polynomials are lists of ints in [0, ell) in ascending degree order, no
trailing zeros. Factorization is squarefree decomposition, then
distinct-degree, then Cantor-Zassenhaus equal-degree splitting. The
randomness in equal-degree splitting is driven by a linear congruential
generator seeded from the input polynomial, so results are deterministic.
"""


def normalize(coeffs, ell):
    c = [x % ell for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return c


def degree(p):
    return len(p) - 1


def add(p, q, ell):
    n = max(len(p), len(q))
    out = [0] * n
    for i, a in enumerate(p):
        out[i] = a
    for i, b in enumerate(q):
        out[i] = (out[i] + b) % ell
    while out and out[-1] == 0:
        out.pop()
    return out


def sub(p, q, ell):
    n = max(len(p), len(q))
    out = [0] * n
    for i, a in enumerate(p):
        out[i] = a
    for i, b in enumerate(q):
        out[i] = (out[i] - b) % ell
    while out and out[-1] == 0:
        out.pop()
    return out


def mul(p, q, ell):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return normalize(out, ell)


def scale(p, c, ell):
    c %= ell
    if c == 0:
        return []
    return [(a * c) % ell for a in p]


def divmod_poly(p, q, ell):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq = degree(q)
    inv_lq = pow(q[-1], -1, ell)
    quot = [0] * max(0, len(r) - dq)
    for shift in range(len(r) - dq - 1, -1, -1):
        c = (r[shift + dq] * inv_lq) % ell
        if c:
            quot[shift] = c
            for i in range(dq + 1):
                r[shift + i] = (r[shift + i] - c * q[i]) % ell
    while r and r[-1] == 0:
        r.pop()
    return quot, r


def mod(p, q, ell):
    return divmod_poly(p, q, ell)[1]


def monic(p, ell):
    if not p:
        return []
    return scale(p, pow(p[-1], -1, ell), ell)


def gcd(p, q, ell):
    a, b = normalize(p, ell), normalize(q, ell)
    while b:
        a, b = b, mod(a, b, ell)
    return monic(a, ell)


def powmod(base, e, modulus, ell):
    """base^e mod modulus over F_ell."""
    result = [1]
    b = mod(base, modulus, ell)
    while e:
        if e & 1:
            result = mod(mul(result, b, ell), modulus, ell)
        b = mod(mul(b, b, ell), modulus, ell)
        e >>= 1
    return result


def derivative(p, ell):
    return normalize([(i * a) % ell for i, a in enumerate(p)][1:], ell)


def evaluate(p, x, ell):
    acc = 0
    for a in reversed(p):
        acc = (acc * x + a) % ell
    return acc


class _LCG:
    """Deterministic pseudo-random ints; explicitly not for security."""

    def __init__(self, seed):
        self.state = (seed ^ 0x9E3779B97F4A7C15) & (2**64 - 1)

    def next(self, bound):
        self.state = (self.state * 6364136223846793005 + 1442695040888963407) % 2**64
        return (self.state >> 17) % bound


def _seed_from(p, ell):
    s = ell
    for a in p:
        s = (s * 1000003 + a + 1) % 2**64
    return s


def squarefree_decomposition(p, ell):
    """List of (squarefree factor, multiplicity) with product = p (monic)."""
    p = monic(normalize(p, ell), ell)
    out = []

    def rec(f, base_mult):
        if degree(f) < 1:
            return
        df = derivative(f, ell)
        if not df:
            # f = g(x^ell) = (g-hat(x))^ell over the prime field
            g = [f[i] for i in range(0, len(f), ell)]
            rec(g, base_mult * ell)
            return
        c = gcd(f, df, ell)
        w = divmod_poly(f, c, ell)[0]
        mult = 1
        while degree(w) >= 1:
            y = gcd(w, c, ell)
            z = divmod_poly(w, y, ell)[0]
            if degree(z) >= 1:
                out.append((z, base_mult * mult))
            c = divmod_poly(c, y, ell)[0]
            w = y
            mult += 1
        if degree(c) >= 1:
            rec(c, base_mult)

    rec(p, 1)
    return out


def distinct_degree(p, ell):
    """List of (product of irreducible factors of degree d, d) for squarefree p."""
    f = monic(p, ell)
    out = []
    x = [0, 1]
    h = x
    d = 0
    while degree(f) >= 1:
        d += 1
        if 2 * d > degree(f):
            out.append((f, degree(f)))
            break
        h = powmod(h, ell, f, ell)
        g = gcd(sub(h, x, ell), f, ell)
        if degree(g) >= 1:
            out.append((g, d))
            f = divmod_poly(f, g, ell)[0]
            h = mod(h, f, ell)
    return out


def _random_poly(rng, deg_bound, ell):
    return normalize([rng.next(ell) for _ in range(deg_bound)], ell)


def equal_degree(p, d, ell, rng):
    """Split a squarefree product of degree-d irreducibles into irreducibles."""
    n = degree(p)
    if n == d:
        return [monic(p, ell)]
    while True:
        r = _random_poly(rng, n, ell)
        if degree(r) < 1:
            continue
        g = gcd(r, p, ell)
        if 0 < degree(g) < n:
            split = g
        else:
            if ell == 2:
                # trace map over F_{2^d}
                t = mod(r, p, ell)
                acc = t
                for _ in range(d - 1):
                    t = powmod(t, 2, p, ell)
                    acc = add(acc, t, ell)
                split = gcd(acc, p, ell)
            else:
                e = (ell**d - 1) // 2
                t = powmod(r, e, p, ell)
                split = gcd(sub(t, [1], ell), p, ell)
            if not (0 < degree(split) < n):
                continue
        rest = divmod_poly(p, split, ell)[0]
        return equal_degree(split, d, ell, rng) + equal_degree(rest, d, ell, rng)


def factor(p, ell):
    """Factor an integral polynomial mod ell.

    Returns (lead_unit, [(irreducible monic factor, multiplicity), ...]) with
    lead_unit * prod(factor^mult) = p mod ell. Raises if ell divides the
    leading coefficient.
    """
    if p and p[-1] % ell == 0:
        raise ValueError("leading coefficient divisible by %d" % ell)
    f = normalize(p, ell)
    if degree(f) < 1:
        return (f[0] if f else 0), []
    unit = f[-1]
    f = monic(f, ell)
    rng = _LCG(_seed_from(f, ell))
    out = []
    for sqf, mult in squarefree_decomposition(f, ell):
        for prod_d, d in distinct_degree(sqf, ell):
            for irr in equal_degree(prod_d, d, ell, rng):
                out.append((irr, mult))
    out.sort(key=lambda fm: (degree(fm[0]), fm[0]))
    return unit, out


def is_irreducible(p, ell):
    """Rabin irreducibility test over F_ell."""
    f = monic(normalize(p, ell), ell)
    n = degree(f)
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    h = powmod(x, ell**n, f, ell)
    if sub(h, x, ell):
        return False
    for q in _prime_divisors(n):
        h = powmod(x, ell ** (n // q), f, ell)
        if degree(gcd(sub(h, x, ell), f, ell)) >= 1:
            return False
    return True


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
