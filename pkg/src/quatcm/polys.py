"""Integer/rational polynomial utilities: discriminants, Sturm sequences, mod-p factorization.

Polynomials are coefficient lists in ascending degree order; the mod-p code
keeps coefficients as plain ints reduced into [0, p).
"""

from __future__ import annotations

import random
from fractions import Fraction


def deg(f):
    d = len(f) - 1
    while d >= 0 and f[d] == 0:
        d -= 1
    return d


def trim(f):
    d = deg(f)
    return list(f[: d + 1]) if d >= 0 else []


def poly_add(f, g):
    n = max(len(f), len(g))
    return trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)])


def poly_neg(f):
    return [-c for c in f]


def poly_mul(f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return trim(out)


def poly_divmod_fraction(f, g):
    """Quotient and remainder of f by g over the rationals."""
    f = [Fraction(c) for c in trim(f)]
    g = [Fraction(c) for c in trim(g)]
    if not g:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(len(f) - len(g) + 1, 1)
    while f and len(f) >= len(g):
        c = f[-1] / g[-1]
        k = len(f) - len(g)
        q[k] = c
        for i in range(len(g)):
            f[k + i] -= c * g[i]
        f = trim(f)
    return trim(q), f


def poly_eval(f, x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def resultant(f, g):
    """Resultant of two integer polynomials via the subresultant-free Euclid over Q.

    Exact; fine at desk scale.
    """
    f = trim(f)
    g = trim(g)
    if not f or not g:
        return 0
    a = [Fraction(c) for c in f]
    b = [Fraction(c) for c in g]
    res = Fraction(1)
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            res *= b[0] ** da
            break
        _, r = poly_divmod_fraction(a, b)
        r = trim(r)
        if not r:
            return 0
        dr = len(r) - 1
        res *= (-1) ** (da * db) * b[-1] ** (da - dr)
        a, b = b, r
    num, den = res.numerator, res.denominator
    if den != 1:
        raise ArithmeticError("non-integer resultant of integer polynomials")
    return num


def discriminant(f):
    """Discriminant of an integer polynomial with leading coefficient 1 or -1."""
    f = trim(f)
    n = len(f) - 1
    df = trim([i * f[i] for i in range(1, len(f))])
    r = resultant(f, df)
    lead = f[-1]
    sign = (-1) ** (n * (n - 1) // 2)
    return sign * r // lead


def sturm_sequence(f):
    seq = [trim([Fraction(c) for c in f])]
    df = trim([i * f[i] for i in range(1, len(f))])
    seq.append([Fraction(c) for c in df])
    while deg(seq[-1]) > 0:
        _, r = poly_divmod_fraction(seq[-2], seq[-1])
        r = trim(r)
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(seq, x):
    signs = []
    for s in seq:
        v = poly_eval(s, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(f, lo=None, hi=None):
    """Number of distinct real roots of f in (lo, hi] by Sturm's theorem."""
    seq = sturm_sequence(f)
    if lo is None or hi is None:
        b = root_bound(f)
        lo = -b if lo is None else lo
        hi = b if hi is None else hi
    return _sign_changes(seq, Fraction(lo)) - _sign_changes(seq, Fraction(hi))


def root_bound(f):
    """Cauchy bound: all real roots lie in (-B, B)."""
    f = trim(f)
    lead = abs(f[-1])
    b = 1 + max(abs(Fraction(c, lead)) for c in f[:-1]) if len(f) > 1 else 1
    return Fraction(b)


def isolate_real_roots(f):
    """Disjoint rational intervals (lo, hi], one per distinct real root, by Sturm bisection."""
    seq = sturm_sequence(f)
    b = root_bound(f)

    def changes(x):
        return _sign_changes(seq, x)

    out = []
    stack = [(-b, b, changes(-b), changes(b))]
    while stack:
        lo, hi, clo, chi = stack.pop()
        k = clo - chi
        if k == 0:
            continue
        if k == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        cm = changes(mid)
        stack.append((lo, mid, clo, cm))
        stack.append((mid, hi, cm, chi))
    out.sort()
    return out


def refine_root(f, lo, hi, width):
    """Shrink an isolating interval for the unique root in (lo, hi] below width."""
    flo = poly_eval(f, lo)
    fhi = poly_eval(f, hi)
    if fhi == 0:
        # exact rational root endpoint; return the point interval
        return (hi, hi)
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = poly_eval(f, mid)
        if fm == 0:
            return (mid, mid)
        if (fm > 0) == (fhi > 0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return (lo, hi)


# --- arithmetic over F_p ---------------------------------------------------


def pmod(f, p):
    return trim([c % p for c in f])


def poly_mulmod(f, g, m, p):
    out = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return poly_rem(out, m, p)


def poly_rem(f, m, p):
    f = [c % p for c in f]
    dm = deg(m)
    inv = pow(m[dm], p - 2, p)
    while deg(f) >= dm:
        df = deg(f)
        c = f[df] * inv % p
        for i in range(dm + 1):
            f[df - dm + i] = (f[df - dm + i] - c * m[i]) % p
        f = trim(f)
    return trim(f)


def poly_gcd_p(f, g, p):
    a, b = pmod(f, p), pmod(g, p)
    while b:
        a, b = b, poly_rem(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def poly_powmod(f, e, m, p):
    result = [1]
    base = poly_rem(f, m, p)
    while e:
        if e & 1:
            result = poly_mulmod(result, base, m, p)
        base = poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def roots_mod_p(f, p, seed=0):
    """Distinct roots of f modulo an odd prime p (Cantor-Zassenhaus on the linear part)."""
    f = pmod(f, p)
    if p == 2:
        return [r for r in (0, 1) if poly_eval(f, r) % 2 == 0]
    xp = poly_powmod([0, 1], p, f, p)
    lin = poly_gcd_p(poly_add(xp, poly_neg([0, 1])), f, p)
    roots = []
    rng = random.Random((seed, p, tuple(f)).__hash__())
    stack = [lin]
    while stack:
        g = stack.pop()
        d = deg(g)
        if d <= 0:
            continue
        if d == 1:
            # g = c0 + c1 x
            roots.append((-g[0]) * pow(g[1], p - 2, p) % p)
            continue
        while True:
            a = rng.randrange(p)
            h = poly_powmod([a, 1], (p - 1) // 2, g, p)
            h = poly_add(h, [-1])
            h = poly_gcd_p(h, g, p)
            if 0 < deg(h) < d:
                q, r = _poly_div_p(g, h, p)
                assert not r
                stack.append(h)
                stack.append(q)
                break
    return sorted(roots)


def _poly_div_p(f, g, p):
    f = pmod(f, p)
    g = pmod(g, p)
    q = [0] * max(len(f) - len(g) + 1, 1)
    inv = pow(g[-1], p - 2, p)
    while f and len(f) >= len(g):
        c = f[-1] * inv % p
        k = len(f) - len(g)
        q[k] = c
        for i in range(len(g)):
            f[k + i] = (f[k + i] - c * g[i]) % p
        f = trim(f)
    return trim(q), f


def factor_mod_p(f, p, seed=0):
    """Full factorization of a squarefree-or-not monic f over F_p.

    Returns a list of (irreducible factor, multiplicity).  Degrees here are
    tiny (<= 7), so distinct-degree + equal-degree splitting is plenty.
    """
    f = pmod(f, p)
    inv = pow(f[-1], p - 2, p)
    f = [c * inv % p for c in f]
    factors = []
    # squarefree part handling: repeatedly strip gcd with derivative
    work = [(f, 1)]
    out = []
    while work:
        g, mult = work.pop()
        if deg(g) <= 0:
            continue
        dg = trim([(i * g[i]) % p for i in range(1, len(g))])
        if not dg:
            # g = h(x^p); over F_p this means g = h(x)^p
            h = trim([g[i] for i in range(0, len(g), p)])
            work.append((h, mult * p))
            continue
        sqf = poly_gcd_p(g, dg, p)
        if deg(sqf) > 0:
            q, r = _poly_div_p(g, sqf, p)
            assert not r
            work.append((sqf, mult))
            g = q
        out.append((g, mult))
    # merge parts with equal factors: factor each squarefree g
    rng = random.Random((seed, p, tuple(f)).__hash__() ^ 0x5EED)
    for g, mult in out:
        for h in _factor_squarefree_p(g, p, rng):
            factors.append((h, mult))
    merged = {}
    for h, m in factors:
        merged[tuple(h)] = merged.get(tuple(h), 0) + m
    return sorted(((list(h), m) for h, m in merged.items()), key=lambda t: (deg(t[0]), t[0]))


def _factor_squarefree_p(f, p, rng):
    """Irreducible factors of a squarefree monic f over F_p."""
    res = []
    # distinct degree
    d = 1
    g = f
    xq = poly_rem([0, 1], g, p)
    while deg(g) >= 2 * d:
        xq = poly_powmod(xq, p, g, p)
        part = poly_gcd_p(poly_add(xq, poly_neg([0, 1])), g, p)
        if deg(part) > 0:
            res.extend(_split_equal_degree(part, d, p, rng))
            g, r = _poly_div_p(g, part, p)
            assert not r
            xq = poly_rem(xq, g, p)
        d += 1
    if deg(g) > 0:
        res.append(g)
    return res


def _split_equal_degree(f, d, p, rng):
    n = deg(f)
    if n == d:
        return [f]
    while True:
        a = [rng.randrange(p) for _ in range(n)] + [1]
        if p == 2:
            # trace map splitting
            h = a
            acc = a
            for _ in range(d - 1):
                acc = poly_powmod(acc, 2, f, p)
                h = poly_add(h, acc)
            h = pmod(h, p)
        else:
            h = poly_powmod(a, (p ** d - 1) // 2, f, p)
            h = poly_add(h, [-1])
        g = poly_gcd_p(h, f, p)
        if 0 < deg(g) < n:
            q, r = _poly_div_p(f, g, p)
            assert not r
            return _split_equal_degree(g, d, p, rng) + _split_equal_degree(q, d, p, rng)
