"""Exact integer/rational linear algebra: HNF, determinants, kernels, LLL, lattice enumeration.

Everything here is dimension <= ~14, so clarity beats asymptotics; all exact
routines use Python ints / Fractions and never round.
"""

from __future__ import annotations

import math
from fractions import Fraction


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, m, k = len(a), len(b[0]), len(b)
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def mat_vec(a, v):
    return [sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a))]


def transpose(a):
    return [list(col) for col in zip(*a)]


def det_bareiss(mat):
    """Exact determinant of a square integer matrix (fraction-free Bareiss)."""
    a = [row[:] for row in mat]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det_fraction(mat):
    """Exact determinant of a square matrix with Fraction/int entries."""
    a = [[Fraction(x) for x in row] for row in mat]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        piv = None
        for i in range(k, n):
            if a[i][k] != 0:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            if a[i][k] != 0:
                f = a[i][k] * inv
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return det


def solve_fraction(mat, rhs):
    """Solve mat * x = rhs exactly; entries coerced to Fraction.

    Returns None when the system is inconsistent; requires square full-rank mat.
    """
    n = len(mat)
    a = [[Fraction(mat[i][j]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for k in range(n):
        piv = None
        for i in range(k, n):
            if a[i][k] != 0:
                piv = i
                break
        if piv is None:
            raise ZeroDivisionError("singular matrix in solve_fraction")
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return [a[i][n] for i in range(n)]


def mat_inv_fraction(mat):
    n = len(mat)
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        cols.append(solve_fraction(mat, e))
    return transpose(cols)


def hnf(rows, transform=False):
    """Row-style upper-triangular Hermite normal form of an integer matrix.

    Returns the list of nonzero HNF rows (pivots positive, entries above a
    pivot reduced into [0, pivot)).  With transform=True also returns U with
    U * rows == hnf_rows padded by zero rows.
    """
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    ncols = len(a[0]) if m else 0
    u = identity_matrix(m) if transform else None
    row = 0
    for col in range(ncols):
        piv = None
        for i in range(row, m):
            if a[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        if transform:
            u[row], u[piv] = u[piv], u[row]
        # eliminate below via extended gcd steps
        for i in range(row + 1, m):
            while a[i][col] != 0:
                q = a[row][col] // a[i][col]
                a[row] = [x - q * y for x, y in zip(a[row], a[i])]
                if transform:
                    u[row] = [x - q * y for x, y in zip(u[row], u[i])]
                a[row], a[i] = a[i], a[row]
                if transform:
                    u[row], u[i] = u[i], u[row]
        if a[row][col] < 0:
            a[row] = [-x for x in a[row]]
            if transform:
                u[row] = [-x for x in u[row]]
        # reduce the entries above the pivot
        for i in range(row):
            q = a[i][col] // a[row][col]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[row])]
                if transform:
                    u[i] = [x - q * y for x, y in zip(u[i], u[row])]
        row += 1
        if row == m:
            break
    hrows = a[:row]
    if transform:
        return hrows, u
    return hrows


def hnf_square(rows, n=None):
    """HNF of a full-rank lattice given by generators; returns an n x n matrix."""
    h = hnf(rows)
    n = n if n is not None else (len(rows[0]) if rows else 0)
    if len(h) != n:
        raise ValueError("lattice generators do not have full rank %d" % n)
    return h


def lattice_contains(hnf_rows, vec):
    """Membership of an integer vector in the row lattice of an HNF basis."""
    v = list(map(int, vec))
    n = len(v)
    piv = {}
    for r in hnf_rows:
        for j, x in enumerate(r):
            if x != 0:
                piv[j] = r
                break
    for j in range(n):
        if v[j] == 0:
            continue
        r = piv.get(j)
        if r is None or v[j] % r[j] != 0:
            return False
        q = v[j] // r[j]
        v = [x - q * y for x, y in zip(v, r)]
    return all(x == 0 for x in v)


def kernel_int(mat):
    """Basis of the saturated integer kernel {v : v * mat = 0} (row vectors)."""
    m = len(mat)
    ncols = len(mat[0]) if m else 0
    aug = [list(mat[i]) + [1 if j == i else 0 for j in range(m)] for i in range(m)]
    h = hnf(aug)
    ker = []
    for r in h:
        if all(x == 0 for x in r[:ncols]):
            ker.append(r[ncols:])
    # rows of an HNF with zero data part are already a saturated kernel basis
    return ker


def gram_fraction(basis, bilinear):
    """Gram matrix [bilinear(b_i, b_j)] as Fractions."""
    n = len(basis)
    g = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = Fraction(bilinear(basis[i], basis[j]))
            g[i][j] = v
            g[j][i] = v
    return g


def lll_reduce(gram, delta=Fraction(99, 100)):
    """Exact LLL on a positive-definite Fraction Gram matrix.

    Returns the unimodular transform U (rows are coefficient vectors of the
    reduced basis in terms of the input basis).
    """
    n = len(gram)
    g = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    u = identity_matrix(n)

    def inner(i, j):
        return sum(u[i][a] * u[j][b] * g[a][b] for a in range(n) for b in range(n))

    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar = [Fraction(0)] * n

    def gso():
        for i in range(n):
            bstar[i] = inner(i, i)
            for j in range(i):
                mu[i][j] = inner(i, j)
                for k in range(j):
                    mu[i][j] -= mu[i][k] * mu[j][k] * bstar[k]
                mu[i][j] /= bstar[j]
                bstar[i] -= mu[i][j] ** 2 * bstar[j]

    def size_reduce(i, j):
        q = round(mu[i][j])
        if q:
            u[i] = [x - q * y for x, y in zip(u[i], u[j])]
            for k in range(j):
                mu[i][k] -= q * mu[j][k]
            mu[i][j] -= q

    gso()
    k = 1
    while k < n:
        size_reduce(k, k - 1)
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            for j in range(k - 2, -1, -1):
                size_reduce(k, j)
            k += 1
        else:
            u[k], u[k - 1] = u[k - 1], u[k]
            gso()
            k = max(k - 1, 1)
    return u


def cholesky_float(gram):
    """Float Cholesky of a positive-definite Gram; returns Q for Fincke-Pohst.

    q[i][i] > 0 and q[i][j] (j > i) such that the form is
    sum_i q[i][i] * (x_i + sum_{j>i} q[i][j] x_j)^2.
    """
    n = len(gram)
    q = [[float(gram[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            q[i][i] -= q[j][j] * q[j][i] ** 2
        if q[i][i] <= 0:
            raise ValueError("Gram matrix not positive definite at certified precision")
        for k in range(i + 1, n):
            for j in range(i):
                q[i][k] -= q[j][j] * q[j][i] * q[j][k]
            q[i][k] /= q[i][i]
    return q


def fincke_pohst(gram, radius, *, margin=1.01):
    """Yield nonzero integer vectors v with v^T G v <= radius (float bounds).

    The bounds use floats with a safety margin, so a few vectors slightly over
    radius may appear; callers must re-check exactly.  Only one of each +-v
    pair is produced (the first nonzero coordinate from the right is > 0).
    """
    n = len(gram)
    q = cholesky_float(gram)
    bound = float(radius) * margin
    x = [0] * n
    # iterative depth-first enumeration, dimension n-1 down to 0
    t = [0.0] * (n + 1)  # partial sums from the right
    center = [0.0] * n
    lo = [0] * n
    hi = [0] * n
    i = n - 1
    t[i + 1] = 0.0
    descend = True
    while True:
        if descend:
            c = 0.0
            for j in range(i + 1, n):
                c += q[i][j] * x[j]
            center[i] = c
            rem = bound - t[i + 1]
            if rem < 0:
                rem = 0.0
            r = math.sqrt(rem / q[i][i]) if q[i][i] > 0 else 0.0
            lo[i] = math.ceil(-c - r - 1e-9)
            hi[i] = math.floor(-c + r + 1e-9)
            x[i] = lo[i] - 1
        x[i] += 1
        if x[i] > hi[i]:
            i += 1
            if i >= n:
                return
            descend = False
            continue
        t[i] = t[i + 1] + q[i][i] * (x[i] + center[i]) ** 2
        if t[i] > bound * (1 + 1e-9) + 1e-9:
            continue
        if i == 0:
            v = x[:]
            for j in range(n - 1, -1, -1):
                if v[j] != 0:
                    if v[j] > 0:
                        yield v[:]
                    break
            descend = False
            continue
        i -= 1
        descend = True
