"""Factorization of integer polynomials over the rationals.

Zassenhaus: factor modulo a good prime, Hensel-lift to a modulus beyond the
Mignotte coefficient bound, then recombine modular factors by subset search.
Degrees in this artifact stay at or below 12 (norm polynomials of quadratics
over degree-6 fields), so the subset search is never large.
"""

from fractions import Fraction
from itertools import combinations
from math import isqrt

from . import modpoly
from . import poly as qpoly


def _mignotte_bound(f):
    # factors of f have coefficients bounded by 2^n * ||f||_2 * |lc|
    n = len(f) - 1
    norm2 = isqrt(sum(int(a) * int(a) for a in f)) + 1
    return 2**n * norm2 * abs(int(f[-1]))


def _centered(a, m):
    a %= m
    return a - m if 2 * a > m else a


def _hensel_lift(f, facs, p, target):
    """Lift monic factors of monic f from mod p to mod p^k >= target.

    Linear multi-factor lifting; returns (p^k, lifted monic factor list).
    """
    r = len(facs)
    if r == 1:
        return target, [list(f)]
    # Bezout data over F_p: s_i * prod_{j != i} g_j == 1 mod g_i
    inv = []
    for i in range(r):
        rest = [1]
        for j in range(r):
            if j != i:
                rest = modpoly.mul(rest, facs[j], p)
        g, s, _ = _xgcd_mod(rest, facs[i], p)
        if modpoly.degree(g) != 0:
            raise ArithmeticError("factors not coprime mod p")
        inv.append(modpoly.scale(s, pow(g[0], -1, p), p))

    lifted = [list(g) for g in facs]
    pk = p
    while pk < target:
        pk_next = pk * p
        prod = [1]
        for g in lifted:
            prod = _mul_int_mod(prod, g, pk_next)
        delta = [(int(a) - b) % pk_next for a, b in zip(_pad(f, len(prod)), _pad(prod, len(f)))]
        delta = [(d // pk) % p for d in delta]
        while delta and delta[-1] == 0:
            delta.pop()
        new = []
        for i in range(r):
            gi_modp = [c % p for c in lifted[i]]
            di = modpoly.mod(modpoly.mul(delta, inv[i], p), gi_modp, p)
            g = list(lifted[i])
            for idx, c in enumerate(di):
                g[idx] = (g[idx] + pk * c) % pk_next
            new.append(g)
        lifted = new
        pk = pk_next
    return pk, lifted


def _pad(v, n):
    return [int(a) for a in v] + [0] * max(0, n - len(v))


def _mul_int_mod(a, b, m):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % m
    while out and out[-1] == 0:
        out.pop()
    return out


def _xgcd_mod(a, b, p):
    a, b = modpoly.normalize(a, p), modpoly.normalize(b, p)
    s0, s1 = [1], []
    while b:
        q, r = modpoly.divmod_poly(a, b, p)
        a, b = b, r
        s0, s1 = s1, modpoly.sub(s0, modpoly.mul(q, s1, p), p)
    return a, s0, None


def _try_divide(f, g):
    """Exact division of integer polys; returns quotient or None."""
    q, r = qpoly.divmod_poly([Fraction(a) for a in f], [Fraction(b) for b in g])
    if r:
        return None
    try:
        return qpoly.to_int_coeffs(q)
    except ValueError:
        return None


def _factor_squarefree_monic(f):
    """Irreducible monic integer factors of a squarefree monic integer poly."""
    n = len(f) - 1
    if n <= 1:
        return [list(f)]
    disc = qpoly.poly_discriminant([Fraction(a) for a in f])
    best = None
    p = 2
    tried = 0
    while tried < 5:
        p = _next_prime(p)
        if disc % p == 0:
            continue
        tried += 1
        _, facs = modpoly.factor(f, p)
        if any(m > 1 for _, m in facs):
            continue
        if best is None or len(facs) < len(best[1]):
            best = (p, [g for g, _ in facs])
        if len(facs) == 1:
            break
    if best is None:
        raise ArithmeticError("no good prime found")
    p, facs = best
    if len(facs) == 1:
        return [list(f)]
    bound = 2 * _mignotte_bound(f) + 1
    pk, lifted = _hensel_lift(f, facs, p, bound)

    result = []
    remaining = list(f)
    idxs = list(range(len(lifted)))
    size = 1
    while 2 * size <= len(idxs):
        found = False
        for subset in combinations(idxs, size):
            cand = [1]
            for i in subset:
                cand = _mul_int_mod(cand, lifted[i], pk)
            cand = [_centered(c, pk) for c in cand]
            while cand and cand[-1] == 0:
                cand.pop()
            quo = _try_divide(remaining, cand)
            if quo is not None:
                result.append(cand)
                remaining = quo
                idxs = [i for i in idxs if i not in subset]
                found = True
                break
        if not found:
            size += 1
    if len(remaining) > 1:
        result.append(remaining)
    result.sort(key=lambda g: (len(g), g))
    return result


def _next_prime(n):
    n += 1
    while True:
        if n > 2 and n % 2 == 0:
            n += 1
            continue
        if all(n % d for d in range(3, isqrt(n) + 1, 2)) and n >= 2:
            return n
        n += 1


def factor_monic(f):
    """Factor a monic integer polynomial into monic irreducibles over Q.

    Returns a list of (factor coefficients, multiplicity), sorted.
    """
    f = qpoly.to_int_coeffs(qpoly.normalize(f))
    if not f or f[-1] != 1:
        raise ValueError("factor_monic expects a monic integral polynomial")
    if len(f) - 1 < 1:
        return []
    out = {}
    # squarefree decomposition over Q via repeated gcd with the derivative
    work = [Fraction(a) for a in f]
    mult = 0
    while qpoly.degree(work) >= 1:
        g = qpoly.gcd(work, qpoly.derivative(work))
        sqf = qpoly.divmod_poly(work, g)[0]
        mult += 1
        if qpoly.degree(sqf) >= 1:
            for irr in _factor_squarefree_monic(qpoly.to_int_coeffs(sqf)):
                key = tuple(irr)
                out[key] = out.get(key, 0)
        work = g
    # recover true multiplicities by exact division
    result = []
    rem = [Fraction(a) for a in f]
    for key in sorted(out, key=lambda k: (len(k), k)):
        fac = [Fraction(a) for a in key]
        m = 0
        while True:
            q, r = qpoly.divmod_poly(rem, fac)
            if r:
                break
            rem = q
            m += 1
        result.append((list(key), m))
    return result


def is_irreducible(f):
    """Irreducibility over Q of a monic integer polynomial.

    Cheap paths first: degree <= 1; an irreducible reduction at a witness
    prime; degree-pattern exclusion across two witnesses. Falls back to full
    factorization.
    """
    f = qpoly.to_int_coeffs(qpoly.normalize(f))
    n = len(f) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    if f[0] == 0:
        return False
    fq = [Fraction(a) for a in f]
    if qpoly.degree(qpoly.gcd(fq, qpoly.derivative(fq))) >= 1:
        return False
    # rational (integer) root screen settles degree <= 3
    if n <= 3:
        for d in _divisors(abs(f[0])):
            for root in (d, -d):
                if qpoly.evaluate(fq, Fraction(root)) == 0:
                    return False
        return True
    patterns = None
    p = 2
    checked = 0
    while checked < 2 and p < 500:
        p = _next_prime(p)
        if f[-1] % p == 0:
            continue
        _, facs = modpoly.factor(f, p)
        if any(m > 1 for _, m in facs):
            continue
        checked += 1
        degs = [modpoly.degree(g) for g, _ in facs]
        if len(degs) == 1:
            return True
        pats = _subset_sums(degs)
        patterns = pats if patterns is None else (patterns & pats)
        if patterns == {0, n}:
            return True
    facs = factor_monic(f)
    return len(facs) == 1 and facs[0][1] == 1


def _subset_sums(degs):
    sums = {0}
    for d in degs:
        sums |= {s + d for s in sums}
    return sums


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))
