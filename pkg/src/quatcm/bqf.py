"""Binary quadratic forms of negative discriminant: reduction, composition, class groups.

Independent oracle for class numbers of imaginary quadratic orders; kept free
of any number-field machinery on purpose so the two routes never share code.
"""

from __future__ import annotations

import math


def is_discriminant(d):
    return d < 0 and d % 4 in (0, 1)


def reduced_forms(d):
    """All reduced primitive forms (a, b, c) of discriminant d < 0."""
    if not is_discriminant(d):
        raise ValueError("not a negative discriminant")
    forms = []
    amax = math.isqrt(-d // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            forms.append((a, b, c))
    return sorted(forms)


def class_number(d):
    return len(reduced_forms(d))


def normalize(a, b, c):
    while not (-a < b <= a):
        r = (a - b) // (2 * a)
        b, c = b + 2 * r * a, a * r * r + b * r + c
    return a, b, c


def reduce_form(a, b, c):
    a, b, c = normalize(a, b, c)
    while a > c or (a == c and b < 0):
        a, b, c = c, -b, a
        a, b, c = normalize(a, b, c)
    return a, b, c


def _solve_linmod(a, b, m):
    """Solve a x = b (mod m); return (x0, step) parametrizing all solutions."""
    g = math.gcd(a, m)
    if b % g:
        raise ValueError("no solution")
    x0 = (b // g) * pow(a // g, -1, m // g) % m
    return x0, m // g


def compose(f1, f2):
    """Gaussian composition of primitive forms of the same discriminant."""
    a, b, c = f1
    alpha, beta, gamma = f2
    d = b * b - 4 * a * c
    assert beta * beta - 4 * alpha * gamma == d
    g = (b + beta) // 2
    h = -(b - beta) // 2
    w = math.gcd(math.gcd(a, alpha), g)
    j = w
    s = a // w
    t = alpha // w
    u = g // w
    mu, nu = _solve_linmod(t * u, h * u + s * c, s * t)
    lam = _solve_linmod(t * nu, h - t * mu, s)[0]
    k = mu + nu * lam
    ell = (k * t - h) // s
    m = (t * u * k - h * u - c * s) // (s * t)
    A = s * t
    B = j * u - (k * t + ell * s)
    C = k * ell - j * m
    return reduce_form(A, B, C)


def identity_form(d):
    if d % 4 == 1:
        return (1, 1, (1 - d) // 4)
    return (1, 0, -d // 4)


def class_group_table(d):
    """(forms, multiplication table) for the form class group of discriminant d."""
    forms = reduced_forms(d)
    index = {f: i for i, f in enumerate(forms)}
    table = [[index[compose(f, g)] for g in forms] for f in forms]
    return forms, table
