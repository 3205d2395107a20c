"""Quadratic residue symbols over O_F, Jacobi symbols for odd ideals, and the
checked Hecke reciprocity identity that drives the congruence search.

The reciprocity law is implemented as a verified equation (both sides computed
independently), never as a computational shortcut inside the symbols.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from . import polys
from .errors import CeilingExceeded, HypothesisFailure
from .quadext import reduce_mod_ideal, residues_mod_ideal


def residue_symbol(alpha, prime):
    """(alpha / prime) in {-1, 0, +1} for an odd prime of F, by residue-field
    exponentiation alpha^((N-1)/2)."""
    if prime.p == 2:
        raise HypothesisFailure("residue symbol requires an odd prime")
    F = prime.field
    alpha = F.coerce(alpha)
    red = prime.reduce_element(alpha)
    if all(c == 0 for c in red):
        return 0
    p, f = prime.p, prime.f
    e = (p ** f - 1) // 2
    acc = _ff_pow(red, e, list(prime.gpoly), p)
    if acc == (1,) + (0,) * (f - 1):
        return 1
    minus_one = ((p - 1) % p,) + (0,) * (f - 1)
    if acc == minus_one:
        return -1
    raise ArithmeticError("residue-field exponentiation did not land in {+-1}")


def _ff_pow(x, e, modpoly, p):
    result = [1]
    base = list(x)
    while e:
        if e & 1:
            result = polys.poly_rem(polys.poly_mul(result, base), modpoly, p)
        base = polys.poly_rem(polys.poly_mul(base, base), modpoly, p)
        e >>= 1
    f = len(modpoly) - 1
    result = result + [0] * (f - len(result))
    return tuple(c % p for c in result[:f])


def ideal_factorization(ideal, *, trial_bound=10 ** 6):
    """Factor an integral ideal into primes with multiplicities via its norm."""
    F = ideal.field
    n = ideal.norm
    if n == 1:
        return {}
    fac = {}
    for p, _ in _factor_int(n, trial_bound).items():
        for pr in F.factor_rational_prime(p):
            v = pr.valuation(ideal)
            if v:
                fac[pr] = v
    check = 1
    for pr, v in fac.items():
        check *= pr.norm ** v
    if check != n:
        raise ArithmeticError("ideal factorization norm mismatch")
    return fac


def _factor_int(n, trial_bound=10 ** 6):
    n = abs(int(n))
    out = {}
    p = 2
    while p * p <= n and p <= trial_bound:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        if n > trial_bound * trial_bound:
            raise CeilingExceeded(f"cofactor {n} above trial-division ceiling")
        out[n] = out.get(n, 0) + 1
    return out


def jacobi_symbol(alpha, ideal):
    """Product of residue symbols over the prime factorization of an odd ideal."""
    F = ideal.field
    alpha = F.coerce(alpha)
    if ideal.norm % 2 == 0:
        raise HypothesisFailure("Jacobi symbol requires an odd ideal")
    if ideal.norm == 1:
        return 1
    out = 1
    for pr, v in ideal_factorization(ideal).items():
        s = residue_symbol(alpha, pr)
        if s == 0:
            return 0
        out *= s ** v
    return out


def even_odd_parts(ideal):
    """Split an ideal as m * n with m supported above 2 and n odd."""
    F = ideal.field
    m = F.unit_ideal()
    rest = ideal
    for pr in F.factor_rational_prime(2):
        v = pr.valuation(ideal)
        if v:
            m = m * pr ** v
    if m.norm > 1:
        # n = ideal / m: recover by matching valuations on the odd part
        nfac = {pr: v for pr, v in ideal_factorization(ideal).items() if pr.p != 2}
        n = F.unit_ideal()
        for pr, v in nfac.items():
            n = n * pr ** v
    else:
        n = ideal
    return m, n


def is_square_mod(alpha, modulus, *, factored=None, enumeration_cap=2 ** 15):
    """Squareness of alpha modulo an integral ideal, with witness.

    Odd prime powers go through the residue symbol plus Hensel lifting; the
    even part is settled by exhaustive squaring of O_F modulo p2^k (cached),
    or by a sampled witness search when the quotient is too large to
    enumerate (then only a positive answer is conclusive).
    Returns (True, witness) / (False, None); raises CeilingExceeded when the
    even part is indeterminate.
    """
    F = modulus.field
    alpha = F.coerce(alpha)
    if modulus.norm == 1:
        return True, F.zero()
    fac = factored if factored is not None else ideal_factorization(modulus)
    witnesses = []
    moduli = []
    for pr, k in fac.items():
        target = pr ** k
        if pr.p == 2:
            got = _square_witness_even(F, alpha, pr, k, enumeration_cap)
        else:
            got = _square_witness_odd(F, alpha, pr, k)
        if got is None:
            return False, None
        witnesses.append(got)
        moduli.append(target)
    m = _crt(F, witnesses, moduli)
    total = F.unit_ideal()
    for mod in moduli:
        total = total * mod
    assert total.contains(m * m - alpha)
    return True, reduce_mod_ideal(total, m)


def _square_witness_odd(F, alpha, prime, k):
    """Witness for alpha being a square mod prime^k (odd prime), or None."""
    v = prime.valuation(F.ideal([alpha])) if not alpha.is_zero() and prime.divides(F.ideal([alpha])) else 0
    if alpha.is_zero() or v >= k:
        return F.zero()
    if v:
        # alpha = pi^v * unit; squares need even v and a square unit part; for the
        # search pipeline alpha is coprime to the modulus, so keep this honest and simple
        if v % 2:
            return None
        raise CeilingExceeded("square test with positive even valuation not needed/implemented")
    if residue_symbol(alpha, prime) != 1:
        return None
    # sqrt in the residue field, then Hensel to prime^k
    root = _residue_sqrt(F, alpha, prime)
    m = root
    mod = prime
    j = 1
    while j < k:
        # Newton step: m <- m - (m^2 - alpha) / (2m)  computed modulo prime^(2j)
        j2 = min(2 * j, k)
        target = prime ** j2
        num = m * m - alpha
        den = 2 * m
        # solve den * t = num mod target by scanning residues of the small quotient
        t = _divide_mod(F, num, den, target)
        m = reduce_mod_ideal(target, m - t)
        j = j2
        mod = target
    assert (prime ** k).contains(m * m - alpha)
    return m


def _residue_sqrt(F, alpha, prime):
    from .quadext import _sqrt_mod_p, _lift_residue
    red = prime.reduce_element(alpha)
    p, f = prime.p, prime.f
    if f == 1:
        return F.coerce(_sqrt_mod_p(red[0], p))
    # brute force in tiny residue fields
    for coeffs in itertools.product(range(p), repeat=f):
        sq = _ff_pow(coeffs, 2, list(prime.gpoly), p)
        if sq == tuple(red):
            return _lift_residue(prime, coeffs)
    raise ArithmeticError("square root missing despite symbol +1")


def _divide_mod(F, num, den, ideal):
    """t with den * t = num modulo the ideal (den invertible mod ideal)."""
    t = num / den
    if t.den == 1:
        return t
    inv = inverse_mod_ideal(F, den, ideal)
    return reduce_mod_ideal(ideal, num * inv)


def inverse_mod_ideal(F, x, ideal):
    """z integral with x * z = 1 mod ideal, via an HNF transform on x*O_F + ideal."""
    n = F.degree
    rows = []
    for i in range(n):
        e = F.element([1 if k == i else 0 for k in range(n)])
        rows.append(list((x * e).num))
    rows += [list(r) for r in ideal.hnf]
    h, u = _hnf_with_transform(rows)
    if len(h) != n:
        raise ArithmeticError("x not invertible modulo ideal")
    one = F.one()
    if one.den != 1:
        raise ArithmeticError("unexpected non-integral 1")
    # coords of 1 in terms of HNF rows (HNF is upper triangular)
    coeffs = _express_in_hnf(h, list(one.num))
    if coeffs is None:
        raise ArithmeticError("x*O_F + ideal is not the unit ideal")
    combo = [0] * len(rows)
    for c, urow in zip(coeffs, u[: len(h)]):
        for j in range(len(rows)):
            combo[j] += c * urow[j]
    z = F.zero()
    for j in range(n):
        if combo[j]:
            e = F.element([1 if k == j else 0 for k in range(n)])
            z = z + combo[j] * e
    if not ideal.contains(x * z - F.one()):
        raise ArithmeticError("modular inverse verification failed")
    return z


def _express_in_hnf(h, v):
    """Coefficients c with sum c_i h_i = v for an upper-triangular HNF basis, or None."""
    v = list(v)
    n = len(v)
    coeffs = [0] * len(h)
    piv = {next(j for j, x in enumerate(row) if x != 0): i for i, row in enumerate(h)}
    for j in range(n - 1, -1, -1):
        if v[j] == 0:
            continue
        if j not in piv:
            return None
        i = piv[j]
        if v[j] % h[i][j]:
            return None
        q = v[j] // h[i][j]
        coeffs[i] = q
        v = [a - q * b for a, b in zip(v, h[i])]
    if any(v):
        return None
    return coeffs


def _square_witness_even(F, alpha, prime, k, cap):
    """Witness mod p2^k via exhaustive squaring (cached), or sampled search at scale."""
    modulus = prime ** k
    size = modulus.norm
    if size <= cap:
        key = ("sqwitness", prime.p, k)
        cache = F._square_mod_cache.get(key)
        if cache is None:
            cache = {}
            for r in residues_mod_ideal(F, modulus):
                keyv = tuple(reduce_mod_ideal(modulus, r * r).num)
                cache.setdefault(keyv, r)
            F._square_mod_cache[key] = cache
        return cache.get(tuple(reduce_mod_ideal(modulus, alpha).num))
    # sampled witness search (n in {5,7} at the 8-level): positive answers only
    import random
    rng = random.Random(0xC0FFEE ^ size)
    n = F.degree
    diag = [modulus.hnf[i][i] for i in range(n)]
    for _ in range(200000):
        r = F.element([rng.randrange(d) for d in diag])
        if modulus.contains(r * r - alpha):
            return r
    raise CeilingExceeded("even-part square test indeterminate at sampling ceiling")


def _crt(F, values, moduli):
    """x with x = values[i] mod moduli[i] (pairwise coprime ideals), via HNF transforms."""
    assert len(values) == len(moduli)
    x = values[0]
    mod = moduli[0]
    for v, m in zip(values[1:], moduli[1:]):
        # write 1 = a + b with a in mod, b in m
        rows = [list(r) for r in mod.hnf] + [list(r) for r in m.hnf]
        h, u = _hnf_with_transform(rows)
        coeffs = _express_in_hnf(h, list(F.one().num)) if len(h) == F.degree else None
        if coeffs is None:
            raise ArithmeticError("CRT: moduli are not coprime")
        combo = [0] * len(rows)
        for c, urow in zip(coeffs, u[: len(h)]):
            for j in range(len(rows)):
                combo[j] += c * urow[j]
        a = F.zero()
        for c, row in zip(combo[: len(mod.hnf)], mod.hnf):
            if c:
                a = a + c * F.element(row)
        b = F.zero()
        for c, row in zip(combo[len(mod.hnf):], m.hnf):
            if c:
                b = b + c * F.element(row)
        if not (a + b == F.one()):
            raise ArithmeticError("CRT: 1 = a + b decomposition failed")
        x = v * a + x * b
        x = reduce_mod_ideal(mod * m, x)
        mod = mod * m
    return x


def _hnf_with_transform(rows):
    from . import linalg
    h, u = linalg.hnf(rows, transform=True)
    return h, u


def sign_exponent(F, alpha, beta):
    """Sum over real places of ((sgn a - 1)/2) ((sgn b - 1)/2) mod 2."""
    sa = F.signs_at_real_places(alpha)
    sb = F.signs_at_real_places(beta)
    return sum(1 for x, y in zip(sa, sb) if x < 0 and y < 0) % 2


def reciprocity_check(F, alpha, beta):
    """Verify Hecke's quadratic reciprocity identity on a precondition-valid pair.

    alpha odd, coprime to beta, and a quadratic residue mod 4m where m is the
    even part of (beta).  Both sides are computed independently; returns a
    transcript dict with the verdict.
    """
    alpha = F.coerce(alpha)
    beta = F.coerce(beta)
    if alpha.is_zero() or beta.is_zero():
        raise HypothesisFailure("alpha, beta must be nonzero")
    ideal_a = F.ideal([alpha])
    ideal_b = F.ideal([beta])
    if ideal_a.norm % 2 == 0:
        raise HypothesisFailure("alpha must be odd")
    two_part, odd_part = even_odd_parts(ideal_b)
    if not _coprime_ideals(F, ideal_a, ideal_b):
        raise HypothesisFailure("alpha, beta must be coprime")
    four_m = F.ideal([F.coerce(4)]) * two_part
    ok, witness = is_square_mod(alpha, four_m)
    if not ok:
        raise HypothesisFailure("alpha is not a quadratic residue mod 4m")
    lhs = jacobi_symbol(beta, ideal_a) * jacobi_symbol(alpha, odd_part)
    rhs = (-1) ** sign_exponent(F, alpha, beta)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "equal": lhs == rhs,
        "witness": list(witness.num),
        "m_norm": two_part.norm,
        "n_norm": odd_part.norm,
    }


def _coprime_ideals(F, a, b):
    from . import linalg
    rows = [list(r) for r in a.hnf] + [list(r) for r in b.hnf]
    h = linalg.hnf_square(rows, F.degree)
    acc = 1
    for i in range(F.degree):
        acc *= h[i][i]
    return acc == 1
