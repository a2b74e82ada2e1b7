"""Twist-invariant fields K and L, and the PSL-vs-PGL decision.

K is the subfield of E generated by the invariants r_p (p coprime to the
level) and L is the extension of K generated by their square roots. Both
are pinned down by finitely many witnesses: a single prime q with
K = Q(r_q), certified by a degree argument, and primes p_1..p_m whose
residues generate (Z/MZ)^x with r_{p_i} nonzero, so that
L = K(sqrt(r_{p_1}), ..., sqrt(r_{p_m})). An odd prime lambda of K splits
completely in L exactly when every r_{p_i} is a square in the completion.
"""

from math import gcd, lcm

from .arith import (
    QQ,
    NumberField,
    express_in_power_basis,
    intfact,
    minpoly_over_Q,
    poly,
    sqrt_in_field,
    valuation_and_square_in_completion,
)
from .newform import _frac_to_str, r_invariant

PSL2 = "PSL2"
PGL2 = "PGL2"
UNDETERMINED = "Undetermined"


def modulus_M(level):
    """The twist-character conductor bound: N for odd N, else 4N."""
    return level if level % 2 == 1 else 4 * level


class KLProfile:
    """Certified description of K and of the generators of L/K.

    r_values maps each generating prime to r_p as an element of K;
    square_witnesses maps it to a square root in K, or None when r_p is
    not a square globally. L_equals_K holds iff every witness exists.
    """

    def __init__(
        self,
        level,
        weight,
        K,
        k_degree_exact,
        k_degree_note,
        generator_prime,
        M,
        generating_primes,
        r_values,
        square_witnesses,
    ):
        self.level = level
        self.weight = weight
        self.K = K
        self.k_degree = K.degree
        self.k_degree_exact = k_degree_exact
        self.k_degree_note = k_degree_note
        self.generator_prime = generator_prime
        self.M = M
        self.generating_primes = list(generating_primes)
        self.r_values = dict(r_values)
        self.square_witnesses = dict(square_witnesses)
        self.L_equals_K = all(
            self.square_witnesses[p] is not None for p in self.generating_primes
        )

    def __repr__(self):
        return "KLProfile(level=%d, [K:Q]=%d, M=%d, gens=%r, L=K: %s)" % (
            self.level,
            self.k_degree,
            self.M,
            self.generating_primes,
            self.L_equals_K,
        )


def profile_to_dict(profile):
    """JSON-ready dict with field elements as coordinate-vector strings."""

    def vec(x):
        if x is None:
            return None
        return [_frac_to_str(c) for c in x.coords_vector()]

    return {
        "level": profile.level,
        "weight": profile.weight,
        "k_minpoly": [str(c) for c in profile.K.defining_poly],
        "k_degree": profile.k_degree,
        "k_degree_exact": profile.k_degree_exact,
        "k_degree_note": profile.k_degree_note,
        "generator_prime": profile.generator_prime,
        "M": profile.M,
        "generating_primes": list(profile.generating_primes),
        "r_values": {str(p): vec(profile.r_values[p]) for p in profile.generating_primes},
        "square_witnesses": {
            str(p): vec(profile.square_witnesses[p]) for p in profile.generating_primes
        },
        "L_equals_K": profile.L_equals_K,
    }


def _sample_primes(rec, search_bound):
    if rec.max_n < search_bound:
        raise ValueError(
            "insufficient coefficients: record holds a_n for n <= %d, search bound %d"
            % (rec.max_n, search_bound)
        )
    return [p for p in intfact.primes_up_to(search_bound) if rec.level % p != 0]


def _degree_sample(rec, primes):
    """(q, minpoly of r_q, list of observed degrees), q the first argmax."""
    best_p = None
    best_mp = None
    degrees = []
    for p in primes:
        mp = minpoly_over_Q(r_invariant(rec, p))
        d = len(mp) - 1
        degrees.append(d)
        if best_p is None or d > len(best_mp) - 1:
            best_p, best_mp = p, mp
    if best_p is None:
        raise ValueError("insufficient coefficients: no sample primes below bound")
    return best_p, best_mp, degrees


def find_K(rec, search_bound=2000):
    """The first prime q maximizing [Q(r_q):Q] over the sample, and Q(r_q).

    The returned degree is a certified lower bound for [K:Q]; exactness is
    decided by build_kl_profile, which combines it with the divisor cap
    from [E:Q] and the inner-twist structure.
    """
    primes = _sample_primes(rec, search_bound)
    q, mp, _ = _degree_sample(rec, primes)
    if len(mp) - 1 == 1:
        return q, QQ
    return q, NumberField(poly.to_int_coeffs(mp))


def _conjugation_witness(rec, primes):
    # a prime p coprime to N with eps(p) = -1 and a_p != 0 certifies that
    # complex conjugation acts on E as a nontrivial automorphism fixing
    # every r_p, hence fixing K, so [E:K] >= 2
    for p in primes:
        if rec.eps(p) == -1 and not rec.coefficient(p).is_zero():
            return p
    return None


def _divisors(n):
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def _k_degree_candidates(rec, degrees, conj_witness):
    """Possible values of [K:Q] consistent with the sample and structure.

    [K:Q] is a common multiple of the observed degrees and divides [E:Q].
    The cofactor [E:K] is the order of the group of inner twists; with a
    quadratic nebentypus every twist character is quadratic, so that group
    is an elementary 2-group and the cofactor is a power of 2. A
    conjugation witness forces the cofactor to be at least 2.
    """
    e_deg = rec.coeff_field.degree
    low = lcm(*degrees) if degrees else 1
    cands = []
    for c in _divisors(e_deg):
        if c % low != 0:
            continue
        cof = e_deg // c
        if cof & (cof - 1) != 0:
            continue
        if conj_witness is not None and cof < 2:
            continue
        cands.append(c)
    return cands


def choose_generating_primes(rec, M):
    """Smallest primes, greedily, whose images generate (Z/MZ)^x with r_p != 0.

    A prime is added only when it enlarges the subgroup generated so far.
    Raises when the record's coefficients run out before the subgroup
    closes up.
    """
    if M < 1:
        raise ValueError("modulus must be positive")
    full = [a for a in range(1, M + 1) if gcd(a, M) == 1]
    subgroup = {1 % M}
    chosen = []
    for p in intfact.primes_up_to(rec.max_n):
        if len(subgroup) == len(full):
            break
        if gcd(p, M) != 1 or rec.level % p == 0:
            continue
        if p % M in subgroup:
            continue
        if r_invariant(rec, p).is_zero():
            continue
        chosen.append(p)
        subgroup = _closure(subgroup | {p % M}, M)
    if len(subgroup) != len(full):
        raise ValueError(
            "exhausted coefficient supply before generating (Z/%dZ)^x" % M
        )
    return chosen


def _closure(seed, M):
    out = set(seed)
    frontier = list(seed)
    while frontier:
        a = frontier.pop()
        for b in list(out):
            c = a * b % M
            if c not in out:
                out.add(c)
                frontier.append(c)
    return out


def build_kl_profile(rec, search_bound=2000):
    """Compute and certify the KLProfile of a record.

    Raises RuntimeError("inconclusive K: ...") when the sampled degrees do
    not pin [K:Q] down to the single observed value; in that case raising
    the search bound may help, but no guess is ever returned.
    """
    primes = _sample_primes(rec, search_bound)
    q, mp, degrees = _degree_sample(rec, primes)
    d = len(mp) - 1
    conj = _conjugation_witness(rec, primes)
    cands = _k_degree_candidates(rec, degrees, conj)
    if cands != [d]:
        raise RuntimeError(
            "inconclusive K: observed degree %d, [K:Q] could be any of %s "
            "(search bound %d)" % (d, cands, search_bound)
        )
    if d == 1:
        K = QQ
    else:
        K = NumberField(poly.to_int_coeffs(mp))
    note = (
        "[K:Q] is a multiple of every sampled [Q(r_p):Q] and divides [E:Q]=%d "
        "with a 2-power cofactor (inner twists by quadratic characters)"
        % rec.coeff_field.degree
    )
    if conj is not None:
        note += "; conjugation is a nontrivial twist (witness p=%d)" % conj
    M = modulus_M(rec.level)
    gens = choose_generating_primes(rec, M)
    r_q = r_invariant(rec, q)
    r_values = {}
    witnesses = {}
    for p in gens:
        coords = express_in_power_basis(r_invariant(rec, p), r_q, K.degree)
        if coords is None:
            raise RuntimeError(
                "inconclusive K: r_%d does not lie in Q(r_%d)" % (p, q)
            )
        rK = K.element(coords)
        r_values[p] = rK
        witnesses[p] = sqrt_in_field(rK)
    return KLProfile(
        level=rec.level,
        weight=rec.weight,
        K=K,
        k_degree_exact=True,
        k_degree_note=note,
        generator_prime=q,
        M=M,
        generating_primes=gens,
        r_values=r_values,
        square_witnesses=witnesses,
    )


def L_splitting_test(profile, lam):
    """True iff the odd prime lam of K splits completely in L.

    Short-circuits when L = K holds with global square witnesses; otherwise
    every generator's r_p must be a square in the completion K_lambda.
    """
    if lam.ell == 2:
        raise ValueError("even-characteristic")
    if profile.L_equals_K:
        return True
    for p in profile.generating_primes:
        _, sq = valuation_and_square_in_completion(profile.r_values[p], lam)
        if not sq:
            return False
    return True


def decide_psl_vs_pgl(k, N, ell, residue_degree, splits):
    """The projective image type, given the dichotomy already holds at lam.

    For odd weight, and for even weight with even residue degree, the image
    is PSL2 exactly when lam splits completely in L. Even weight with odd
    residue degree forces PGL2 away from the level; at a prime dividing the
    level the criterion is silent.
    """
    if k % 2 == 1 or residue_degree % 2 == 0:
        return PSL2 if splits else PGL2
    if N % ell != 0:
        return PGL2
    return UNDETERMINED
