"""Exact arithmetic in totally real number fields of degree <= 7.

Elements are integer coordinate vectors over a fixed integral basis with a
common denominator; every predicate (signs, norms, ideal membership) is exact.
Real embeddings are tracked as refinable isolating intervals, so sign
determination is rigorous rather than floating-point.
"""

from __future__ import annotations

import math
from fractions import Fraction

from mpmath import iv

from . import linalg, polys
from .errors import CeilingExceeded, HypothesisFailure, IndeterminateSign
from .intervals import decide, iv_from_fraction


def _normalize(num, den):
    g = 0
    for c in num:
        g = math.gcd(g, c)
    g = math.gcd(g, den)
    if g > 1:
        num = tuple(c // g for c in num)
        den //= g
    if den < 0:
        num = tuple(-c for c in num)
        den = -den
    return tuple(num), den


class FieldElement:
    """Element of a NumberField: coords/den over the integral basis, exact."""

    __slots__ = ("field", "num", "den", "_pw")

    def __init__(self, field, num, den=1):
        if den == 0:
            raise ZeroDivisionError
        self.field = field
        self.num, self.den = _normalize(tuple(int(c) for c in num), int(den))
        self._pw = None

    # -- ring structure ------------------------------------------------

    def __add__(self, other):
        other = self.field.coerce(other)
        a, b = self, other
        den = a.den * b.den
        num = [x * b.den + y * a.den for x, y in zip(a.num, b.num)]
        return FieldElement(self.field, num, den)

    def __sub__(self, other):
        return self + (-self.field.coerce(other))

    def __rsub__(self, other):
        return self.field.coerce(other) - self

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-c for c in self.num), self.den)

    def __mul__(self, other):
        other = self.field.coerce(other)
        C = self.field._structure
        n = self.field.degree
        out = [0] * n
        for i, xi in enumerate(self.num):
            if xi == 0:
                continue
            for j, yj in enumerate(other.num):
                if yj == 0:
                    continue
                cij = C[i][j]
                w = xi * yj
                for k in range(n):
                    out[k] += w * cij[k]
        return FieldElement(self.field, out, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self.field.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError
        mat = other.mul_matrix()
        target = [Fraction(c, self.den) for c in self.num]
        sol = linalg.solve_fraction(linalg.transpose(mat), target)
        den = 1
        for s in sol:
            den = den * s.denominator // math.gcd(den, s.denominator)
        num = [int(s * den) for s in sol]
        return FieldElement(self.field, num, den)

    def __rtruediv__(self, other):
        return self.field.coerce(other) / self

    def __pow__(self, e):
        if e < 0:
            return 1 / (self ** (-e))
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        try:
            other = self.field.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"FieldElement({list(self.num)}, den={self.den})"

    # -- predicates and invariants --------------------------------------

    def is_zero(self):
        return all(c == 0 for c in self.num)

    def is_integral(self):
        return self.den == 1

    def is_rational(self):
        """Rational iff all non-constant power-basis coordinates vanish."""
        pw = self.power_coords()
        return all(c == 0 for c in pw[1:])

    def as_rational(self):
        pw = self.power_coords()
        if any(c != 0 for c in pw[1:]):
            raise ValueError("element is not rational")
        return pw[0]

    def mul_matrix(self):
        """Matrix of multiplication by self on the integral basis (rows = images), Fractions."""
        n = self.field.degree
        C = self.field._structure
        rows = []
        for i in range(n):
            row = [Fraction(0)] * n
            for j, yj in enumerate(self.num):
                if yj == 0:
                    continue
                for k in range(n):
                    row[k] += Fraction(yj * C[i][j][k], self.den)
            rows.append(row)
        return rows

    def trace(self):
        tr = Fraction(0)
        for i in range(self.field.degree):
            acc = 0
            C = self.field._structure
            for j, yj in enumerate(self.num):
                acc += yj * C[i][j][i]
            tr += Fraction(acc, self.den)
        return tr

    def norm(self):
        n = self.field.degree
        scaled = [[0] * n for _ in range(n)]
        C = self.field._structure
        for i in range(n):
            for j, yj in enumerate(self.num):
                if yj == 0:
                    continue
                cij = C[i][j]
                for k in range(n):
                    scaled[i][k] += yj * cij[k]
        return Fraction(linalg.det_bareiss(scaled), self.den ** n)

    def power_coords(self):
        """Coordinates over the power basis 1, theta, ..., theta^(n-1) (Fractions)."""
        if self._pw is not None:
            return self._pw
        B = self.field._basis_power
        n = self.field.degree
        self._pw = [
            sum(Fraction(self.num[i], self.den) * B[i][k] for i in range(n))
            for k in range(n)
        ]
        return self._pw

    def denominator_ideal_bound(self):
        return self.den

    # -- certified real data ---------------------------------------------

    def interval(self, place):
        """Interval containing the image at real place `place` (current iv.prec)."""
        return self.field.evaluate_interval(self, place)

    def signs(self):
        return self.field.signs_at_real_places(self)

    def is_totally_positive(self):
        return all(s > 0 for s in self.signs())


class Ideal:
    """Integral ideal as an upper-triangular HNF lattice basis over the integral basis."""

    __slots__ = ("field", "hnf", "_norm")

    def __init__(self, field, hnf_rows):
        self.field = field
        self.hnf = tuple(tuple(r) for r in hnf_rows)
        self._norm = None

    @property
    def norm(self):
        if self._norm is None:
            n = 1
            for i in range(len(self.hnf)):
                n *= self.hnf[i][i]
            self._norm = n
        return self._norm

    def basis_elements(self):
        return [FieldElement(self.field, row) for row in self.hnf]

    def contains(self, x):
        x = self.field.coerce(x)
        if x.den != 1:
            return False
        return linalg.lattice_contains([list(r) for r in self.hnf], x.num)

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.hnf == other.hnf and self.field is other.field

    def __hash__(self):
        return hash(self.hnf)

    def __mul__(self, other):
        if isinstance(other, FieldElement):
            other = self.field.ideal([other])
        rows = []
        a = self.basis_elements()
        b = other.basis_elements()
        for x in a:
            for y in b:
                rows.append((x * y).num)
        return Ideal(self.field, linalg.hnf_square(rows, self.field.degree))

    def __pow__(self, e):
        result = self.field.unit_ideal()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_unit_ideal(self):
        return self.norm == 1

    def divides(self, other):
        """self | other as ideals  <=>  other subset of self."""
        return all(self.contains(FieldElement(self.field, row)) for row in other.hnf)

    def __repr__(self):
        return f"Ideal(norm={self.norm})"


class PrimeIdeal(Ideal):
    __slots__ = ("p", "e", "f", "gpoly", "_siblings")

    def __init__(self, field, hnf_rows, p, e, f, gpoly):
        super().__init__(field, hnf_rows)
        self.p = p
        self.e = e
        self.f = f
        self.gpoly = tuple(gpoly)  # monic irreducible factor of the defining poly mod p
        self._siblings = None

    def residue_size(self):
        return self.p ** self.f

    def reduce_element(self, x):
        """Image of x in the residue field F_{p^f}, as a poly tuple over F_p."""
        x = self.field.coerce(x)
        p = self.p
        if x.den % p == 0:
            raise ZeroDivisionError("denominator not invertible at prime")
        deninv = pow(x.den % p, p - 2, p) if p > 1 else 0
        pw = x.power_coords()
        coeffs = []
        for c in pw:
            if c.denominator % p == 0:
                raise ZeroDivisionError("power-basis denominator not invertible at prime")
            coeffs.append(c.numerator * pow(c.denominator % p, p - 2, p) % p)
        red = polys.poly_rem(coeffs, list(self.gpoly), p)
        red = red + [0] * (self.f - len(red))
        return tuple(red[: self.f])

    def residue_nonzero(self, x):
        return any(c != 0 for c in self.reduce_element(x))

    def valuation(self, ideal_or_elt):
        """p-adic valuation of an integral ideal or integral element at this prime."""
        if isinstance(ideal_or_elt, FieldElement):
            ideal = self.field.ideal([ideal_or_elt])
        else:
            ideal = ideal_or_elt
        v = 0
        power = self
        while power.divides(ideal):
            v += 1
            power = power * self
            if v > 64:
                raise CeilingExceeded("valuation loop runaway")
        return v

    def __repr__(self):
        return f"PrimeIdeal(p={self.p}, e={self.e}, f={self.f})"


class NumberField:
    """Totally real number field Q[x]/(f) with an exact integral basis."""

    def __init__(self, poly, basis_power, disc, *, source_poly_disc=None):
        self.poly = tuple(int(c) for c in poly)
        self.degree = len(poly) - 1
        # rows = integral basis elements as Fractions over the power basis
        self._basis_power = [[Fraction(c) for c in row] for row in basis_power]
        self._power_basis = linalg.mat_inv_fraction(self._basis_power)
        self.disc = disc
        self.poly_disc = source_poly_disc if source_poly_disc is not None else disc
        self.index = _isqrt_exact(self.poly_disc // disc) if disc != 0 else 1
        self._structure = self._structure_constants()
        self._roots = polys.isolate_real_roots(list(self.poly))
        if len(self._roots) != self.degree:
            raise HypothesisFailure("defining polynomial is not totally real")
        self._root_cache = {}
        self.fundamental_units = None
        self.unit_search_bound = None
        self.unit_index_checked = ()
        self._class_data = None
        self._prime_cache = {}
        self._square_mod_cache = {}
        self._emb_cache = {}

    # -- construction helpers -------------------------------------------

    def _structure_constants(self):
        n = self.degree
        B = self._basis_power
        Binv = self._power_basis
        table = []
        for i in range(n):
            row_i = []
            for j in range(n):
                prod = polys.poly_mul([Fraction(c) for c in B[i]], [Fraction(c) for c in B[j]])
                _, rem = polys.poly_divmod_fraction(prod, list(self.poly))
                rem = rem + [Fraction(0)] * (n - len(rem))
                coords = [
                    sum(rem[k] * Binv[k][t] for k in range(n)) for t in range(n)
                ]
                ints = []
                for c in coords:
                    if c.denominator != 1:
                        raise ArithmeticError("integral basis not closed under multiplication")
                    ints.append(int(c))
                row_i.append(tuple(ints))
            table.append(row_i)
        return table

    def coerce(self, x):
        if isinstance(x, FieldElement):
            if x.field is not self:
                raise ValueError("element from a different field")
            return x
        if isinstance(x, int):
            one = self.one()
            return FieldElement(self, tuple(c * x for c in one.num), one.den)
        if isinstance(x, Fraction):
            one = self.one()
            return FieldElement(self, tuple(c * x.numerator for c in one.num), one.den * x.denominator)
        raise TypeError(f"cannot coerce {type(x)} into the field")

    def element(self, coords, den=1):
        coords = list(coords) + [0] * (self.degree - len(list(coords)))
        return FieldElement(self, coords, den)

    def zero(self):
        return FieldElement(self, (0,) * self.degree)

    def one(self):
        # coordinates of 1 over the integral basis
        target = [Fraction(1)] + [Fraction(0)] * (self.degree - 1)
        sol = linalg.solve_fraction(linalg.transpose(self._basis_power), target)
        den = 1
        for s in sol:
            den = den * s.denominator // math.gcd(den, s.denominator)
        return FieldElement(self, [int(s * den) for s in sol], den)

    def gen(self):
        """theta, the class of x, in integral-basis coordinates."""
        target = [Fraction(0), Fraction(1)] + [Fraction(0)] * (self.degree - 2)
        if self.degree == 1:
            target = [Fraction(0)]
        sol = linalg.solve_fraction(linalg.transpose(self._basis_power), target)
        den = 1
        for s in sol:
            den = den * s.denominator // math.gcd(den, s.denominator)
        return FieldElement(self, [int(s * den) for s in sol], den)

    def from_power_coords(self, coords):
        coords = [Fraction(c) for c in coords] + [Fraction(0)] * (self.degree - len(coords))
        Binv = self._power_basis
        n = self.degree
        sol = [sum(coords[k] * Binv[k][t] for k in range(n)) for t in range(n)]
        den = 1
        for s in sol:
            den = den * s.denominator // math.gcd(den, s.denominator)
        return FieldElement(self, [int(s * den) for s in sol], den)

    # -- real embeddings --------------------------------------------------

    def root_interval(self, place, width_bits):
        """Isolating interval of real root #place with width <= 2^-width_bits."""
        key = (place, width_bits)
        cached = self._root_cache.get(key)
        if cached is not None:
            return cached
        lo, hi = self._roots[place]
        lo, hi = polys.refine_root(list(self.poly), lo, hi, Fraction(1, 2 ** width_bits))
        self._root_cache[key] = (lo, hi)
        return lo, hi

    def evaluate_interval(self, x, place):
        """iv interval of the image of x at the given real place, at current iv.prec."""
        x = self.coerce(x)
        bits = iv.prec + 8
        lo, hi = self.root_interval(place, bits)
        t = iv_from_fraction(lo)
        if hi != lo:
            t = t + iv_from_fraction(hi - lo) * iv.mpf((0, 1))
        pw = x.power_coords()
        acc = iv.mpf(0)
        for c in reversed(pw):
            acc = acc * t + iv_from_fraction(c)
        return acc

    def embedding_matrix_iv(self, prec):
        """iv matrix emb[place][basis_index] of the integral basis, cached per precision."""
        cached = self._emb_cache.get(prec)
        if cached is not None:
            return cached
        saved = iv.prec
        iv.prec = prec
        try:
            n = self.degree
            emb = [[self.evaluate_interval(
                self.element([1 if k == i else 0 for k in range(n)]), j)
                for i in range(n)] for j in range(n)]
        finally:
            iv.prec = saved
        self._emb_cache[prec] = emb
        return emb

    def signs_at_real_places(self, x):
        """Rigorous sign vector of a nonzero element (exact zero detected algebraically)."""
        x = self.coerce(x)
        if x.is_zero():
            raise ValueError("sign of zero is undefined")
        out = []
        for place in range(self.degree):
            def compute(place=place):
                val = self.evaluate_interval(x, place)
                if val.a > 0:
                    return 1
                if val.b < 0:
                    return -1
                return None
            out.append(decide(compute, what=f"sign at place {place}"))
        return out

    # -- ideals -----------------------------------------------------------

    def ideal(self, gens):
        gens = [self.coerce(g) for g in gens]
        rows = []
        for g in gens:
            if g.den != 1:
                raise ValueError("ideal generators must be integral")
            for i in range(self.degree):
                e = FieldElement(self, tuple(1 if k == i else 0 for k in range(self.degree)))
                rows.append((g * e).num)
        return Ideal(self, linalg.hnf_square(rows, self.degree))

    def unit_ideal(self):
        return Ideal(self, linalg.identity_matrix(self.degree))

    def principal_ideal(self, x):
        return self.ideal([x])

    # -- prime factorization ----------------------------------------------

    def factor_rational_prime(self, p):
        """Prime ideals above p via the Dedekind criterion (errors on index divisors)."""
        if p in self._prime_cache:
            return self._prime_cache[p]
        if self.index % p == 0:
            raise HypothesisFailure(f"{p} divides the index [O_F : Z[theta]]")
        fac = polys.factor_mod_p(list(self.poly), p, seed=hash(self.poly) & 0xFFFF)
        if any(m > 1 for _, m in fac):
            self._dedekind_check(p, fac)
        theta = self.gen()
        primes = []
        for g, e in fac:
            glift = [int(c if c <= p // 2 else c - p) for c in g]
            gval = self._eval_poly_at_gen(glift, theta)
            rows = []
            pelt = self.coerce(p)
            for i in range(self.degree):
                basis_e = FieldElement(self, tuple(1 if k == i else 0 for k in range(self.degree)))
                rows.append((pelt * basis_e).num)
                rows.append((gval * basis_e).num)
            hnf_rows = linalg.hnf_square(rows, self.degree)
            prime = PrimeIdeal(self, hnf_rows, p, e, polys.deg(g), g)
            if prime.norm != p ** polys.deg(g):
                raise ArithmeticError("prime ideal norm mismatch (index divisor?)")
            primes.append(prime)
        if sum(pr.e * pr.f for pr in primes) != self.degree:
            raise ArithmeticError("sum e_i f_i != n")
        for pr in primes:
            pr._siblings = primes
        self._prime_cache[p] = primes
        return primes

    def _dedekind_check(self, p, fac):
        """Dedekind criterion: p is an index divisor iff gcd(T, gbar, hbar) != 1."""
        gbar = [1]
        hbar = [1]
        for g, e in fac:
            gbar = polys.pmod(polys.poly_mul(gbar, g), p)
            for _ in range(e - 1):
                hbar = polys.pmod(polys.poly_mul(hbar, g), p)
        glift = [int(c) for c in gbar]
        hlift = [int(c) for c in hbar]
        gh = polys.poly_mul(glift, hlift)
        diff = polys.poly_add(gh, polys.poly_neg(list(self.poly)))
        T = [(-c // p) % p for c in diff]
        d = polys.poly_gcd_p(polys.poly_gcd_p(T, gbar, p), hbar, p)
        if polys.deg(d) > 0:
            raise HypothesisFailure(f"{p} is an index divisor (Dedekind criterion)")

    def _eval_poly_at_gen(self, coeffs, theta):
        acc = self.zero()
        for c in reversed(coeffs):
            acc = acc * theta + self.coerce(int(c))
        return acc

    def inverse_class_rep(self, prime):
        """Integral ideal J with prime * J = (N(prime)) -- same ideal class as prime^-1."""
        sibs = prime._siblings or self.factor_rational_prime(prime.p)
        out = self.unit_ideal()
        for q in sibs:
            e = q.e - 1 if q is prime else q.e
            if e:
                out = out * q ** e
        return out * self.ideal([self.coerce(prime.p ** (prime.f - 1))])

    # -- class group --------------------------------------------------------

    def minkowski_bound(self):
        """Integer floor of the Minkowski bound (n!/n^n) sqrt|disc| for a totally real field."""
        n = self.degree
        bound_sq = Fraction(math.factorial(n) ** 2 * abs(self.disc), n ** (2 * n))
        return math.isqrt(bound_sq.numerator // bound_sq.denominator)

    def primes_up_to(self, bound):
        out = []
        p = 2
        while p <= bound:
            if _is_prime(p):
                if self.index % p == 0:
                    raise HypothesisFailure(f"index divisor {p} below enumeration bound")
                for pr in self.factor_rational_prime(p):
                    if pr.norm <= bound:
                        out.append(pr)
            p += 1
        return out

    def t2_gram(self, elements, prec=96):
        """Rational T2 Gram matrix of the given integral elements (midpoint rounding).

        Used to steer lattice enumeration; all results are verified exactly, so
        tiny rounding here cannot produce wrong answers, only wasted nodes.
        """
        n = len(elements)
        saved = iv.prec
        iv.prec = prec
        try:
            embs = []
            for x in elements:
                embs.append([self.evaluate_interval(x, i) for i in range(self.degree)])
            g = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    acc = iv.mpf(0)
                    for k in range(self.degree):
                        acc += embs[i][k] * embs[j][k]
                    val = iv_midpoint_fraction(acc)
                    g[i][j] = val
                    g[j][i] = val
            return g
        finally:
            iv.prec = saved

    def principal_element(self, ideal, *, max_blowup=2 ** 12):
        """Generator of the ideal if one is found: x with (x) = ideal, else None.

        Searches the ideal lattice for vectors of absolute norm N(ideal) under
        the Minkowski embedding, growing the T2 radius geometrically.  A hit is
        verified exactly; None means no generator within the radius schedule.
        """
        target = ideal.norm
        basis = ideal.basis_elements()
        gram = self.t2_gram(basis)
        u = linalg.lll_reduce(gram)
        red = [[sum(u[i][k] * basis[k].num[t] for k in range(len(basis)))
                for t in range(self.degree)] for i in range(len(basis))]
        red_elts = [FieldElement(self, row) for row in red]
        gram_red = [[sum(u[i][a] * u[j][b] * gram[a][b] for a in range(len(basis)) for b in range(len(basis)))
                     for j in range(len(basis))] for i in range(len(basis))]
        n = self.degree
        base_radius = n * float(target) ** (2.0 / n) + 1.0
        blow = 2
        while blow <= max_blowup:
            radius = base_radius * blow
            for v in linalg.fincke_pohst(gram_red, radius):
                x = self.zero()
                for c, b in zip(v, red_elts):
                    if c:
                        x = x + c * b
                if abs(x.norm()) == target:
                    return x
            blow *= 2
        return None

    def class_group(self, *, ceiling=Fraction(2000)):
        """Class-number computation by Minkowski-bound enumeration.

        Returns (h, reps) where reps are factored ideal class representatives.
        """
        if self._class_data is not None:
            return self._class_data
        bound = self.minkowski_bound()
        if bound > ceiling:
            raise CeilingExceeded(f"Minkowski bound {bound} exceeds ceiling {ceiling}")
        primes = self.primes_up_to(int(bound))
        # classes: list of (rep_ideal, factored dict prime->exp)
        classes = [(self.unit_ideal(), {})]

        def inv_rep_of(facdict):
            out = self.unit_ideal()
            for pr, e in facdict.items():
                out = out * self.inverse_class_rep(pr) ** e
            return out

        def classify(ideal, facdict):
            for idx, (rep, repfac) in enumerate(classes):
                probe = ideal * inv_rep_of(repfac)
                if self.principal_element(probe) is not None:
                    return idx
            classes.append((ideal, dict(facdict)))
            return len(classes) - 1

        index_of = {}
        for pr in primes:
            index_of[pr] = classify(pr, {pr: 1})
        # close under multiplication
        changed = True
        while changed:
            changed = False
            snapshot = list(classes)
            for i, (a, fa) in enumerate(snapshot):
                for j, (b, fb) in enumerate(snapshot):
                    fc = dict(fa)
                    for k, v in fb.items():
                        fc[k] = fc.get(k, 0) + v
                    before = len(classes)
                    classify(a * b, fc)
                    if len(classes) != before:
                        changed = True
        self._class_data = (len(classes), classes)
        return self._class_data

    def class_number(self, **kw):
        return self.class_group(**kw)[0]

    # -- units ---------------------------------------------------------------

    def _ensure_units(self):
        if self.fundamental_units is None:
            raise HypothesisFailure("no unit system attached; call make_field first")

    def unit_sign_matrix(self):
        """Rows: sign vectors over F_2 (1 = negative) of -1 and each unit."""
        self._ensure_units()
        rows = [[1] * self.degree]  # -1 is negative everywhere
        for u in self.fundamental_units:
            rows.append([1 if s < 0 else 0 for s in u.signs()])
        return rows

    def has_units_of_independent_signs(self):
        rows = self.unit_sign_matrix()
        return _f2_rank(rows) == self.degree

    def narrow_class_number(self):
        h = self.class_number()
        rank = _f2_rank(self.unit_sign_matrix())
        return h * 2 ** (self.degree - rank)

    def unit_with_signs(self, pattern):
        """Unit whose sign vector matches pattern (tuple of +-1); needs full sign rank."""
        self._ensure_units()
        target = [1 if s < 0 else 0 for s in pattern]
        rows = self.unit_sign_matrix()
        sol = _f2_solve(rows, target)
        if sol is None:
            raise HypothesisFailure("sign pattern not realizable by units")
        u = self.one()
        gens = [self.coerce(-1)] + list(self.fundamental_units)
        for c, g in zip(sol, gens):
            if c:
                u = u * g
        return u

    def epsilon_unit(self, place):
        """Unit negative exactly at the given real place (the paper's epsilon_i)."""
        pattern = [1] * self.degree
        pattern[place] = -1
        return self.unit_with_signs(pattern)


def iv_midpoint_fraction(x):
    """Exact rational midpoint of an iv interval."""
    from mpmath.libmp import to_rational
    lo, hi = x._mpi_
    pa, qa = to_rational(lo)
    pb, qb = to_rational(hi)
    return (Fraction(int(pa), int(qa)) + Fraction(int(pb), int(qb))) / 2


def _isqrt_exact(n):
    r = math.isqrt(int(n))
    if r * r != n:
        raise ArithmeticError(f"{n} is not a perfect square")
    return r


def _is_prime(n):
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _f2_rank(rows):
    m = [row[:] for row in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(m)):
            if m[i][col] & 1:
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] & 1:
                m[i] = [(a + b) & 1 for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def _f2_solve(rows, target):
    """Solve x * rows = target over F_2 (x indexes the generator rows)."""
    m = [row[:] + [1 if i == j else 0 for j in range(len(rows))] for i, row in enumerate(rows)]
    ncols = len(rows[0])
    t = target[:]
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(m)):
            if m[i][col] & 1:
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] & 1:
                m[i] = [(a + b) & 1 for a, b in zip(m[i], m[rank])]
        rank += 1
    # express target in terms of the reduced rows
    combo = [0] * len(rows)
    t = t[:]
    for r in range(rank):
        lead = next(j for j in range(ncols) if m[r][j] & 1)
        if t[lead] & 1:
            t = [(a + b) & 1 for a, b in zip(t, m[r][:ncols])]
            combo = [(a + b) & 1 for a, b in zip(combo, m[r][ncols:])]
    if any(t):
        return None
    return combo


# --- field construction ------------------------------------------------------


def make_field(poly, units=None, *, unit_blowup_cap=2 ** 10, index_bound_primes=(2, 3)):
    """Build a totally real NumberField from a monic integer polynomial.

    The integral basis comes from p-maximality saturation at every p with
    p^2 | disc(poly).  Units are accepted or searched by growing T2 radius;
    multiplicative independence is certified by interval arithmetic on the log
    embedding, and the system is saturated at the primes in
    index_bound_primes (q-th-power tests with exact verification).
    """
    poly = [int(c) for c in poly]
    poly = polys.trim(poly)
    n = len(poly) - 1
    if n < 1 or poly[-1] != 1:
        raise HypothesisFailure("defining polynomial must be monic of degree >= 1")
    if n == 1:
        field = NumberField(poly, [[Fraction(1)]], 1, source_poly_disc=1)
        field.fundamental_units = []
        field.unit_search_bound = 0
        return field
    d = polys.discriminant(poly)
    if d == 0:
        raise HypothesisFailure("defining polynomial is not squarefree")
    if polys.count_real_roots(poly) != n:
        raise HypothesisFailure("defining polynomial is not totally real (Sturm count)")
    _certify_irreducible(poly)
    basis, disc = _integral_basis(poly, d)
    field = NumberField(poly, basis, disc, source_poly_disc=d)
    if units is not None:
        ulist = [field.element(u) if not isinstance(u, FieldElement) else u for u in units]
        for u in ulist:
            if abs(u.norm()) != 1:
                raise HypothesisFailure("supplied unit has |norm| != 1")
        field.fundamental_units = ulist
        field.unit_search_bound = None
    else:
        field.fundamental_units = _search_units(field, unit_blowup_cap)
        field.unit_search_bound = unit_blowup_cap
    if len(field.fundamental_units) != n - 1:
        raise CeilingExceeded("unit search exhausted before finding n-1 independent units")
    _certify_independent(field)
    _saturate_units(field, index_bound_primes)
    field.unit_index_checked = tuple(index_bound_primes)
    return field


def _certify_irreducible(poly, prime_cap=300):
    """Certify irreducibility over Q: modular degree patterns, then a real-factor search."""
    n = len(poly) - 1
    possible = set(range(n + 1))
    p = 2
    while p <= prime_cap:
        if _is_prime(p) and poly[-1] % p != 0:
            dpoly = polys.pmod(poly, p)
            if polys.deg(dpoly) == n:
                fac = polys.factor_mod_p(poly, p)
                if all(m == 1 for _, m in fac):
                    degs = [polys.deg(g) for g, _ in fac]
                    sums = {0}
                    for dd in degs:
                        sums |= {s + dd for s in sums}
                    possible &= sums
                    if possible == {0, n}:
                        return
        p += 1
    # fall back: enumerate candidate monic factors with real-root coefficient bounds
    b = polys.root_bound(poly)
    for k in sorted(d for d in possible if 0 < d <= n // 2):
        for cand in _monic_int_polys(k, b):
            _, r = polys.poly_divmod_fraction(poly, cand)
            if not r:
                raise HypothesisFailure("defining polynomial is reducible")
    if possible != {0, n}:
        # all candidate factors ruled out by exhaustive division
        return


def _monic_int_polys(k, root_bound):
    """All monic integer polynomials of degree k whose roots could be real with |r| <= bound."""
    bounds = [int(math.comb(k, i) * float(root_bound) ** (k - i)) + 1 for i in range(k)]
    def rec(i, acc):
        if i == k:
            yield acc + [1]
            return
        for c in range(-bounds[i], bounds[i] + 1):
            yield from rec(i + 1, acc + [c])
    yield from rec(0, [])


def _integral_basis(poly, poly_disc):
    """Round-2-style p-maximality saturation at primes with p^2 | disc(poly)."""
    n = len(poly) - 1
    basis = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    disc = poly_disc
    d = abs(poly_disc)
    p = 2
    targets = []
    while p * p <= d:
        if d % (p * p) == 0:
            targets.append(p)
            while d % p == 0:
                d //= p
        elif d % p == 0:
            while d % p == 0:
                d //= p
        p += 1 if p == 2 else 2
    for p in targets:
        while True:
            newbasis, grew = _p_saturate(poly, basis, p)
            if not grew:
                break
            basis = newbasis
    # disc = poly_disc / index^2, with the index read off the basis determinant
    M = [[Fraction(x) for x in row] for row in basis]
    det = linalg.det_fraction(M)
    index = 1 / abs(det)
    disc = int(Fraction(poly_disc) / (index * index))
    return basis, disc


def _p_saturate(poly, basis, p):
    """One Pohst-Zassenhaus step: enlarge the order by the multiplier ring of its p-radical."""
    n = len(poly) - 1

    def mul(u, v):
        prod = polys.poly_mul(u, v)
        _, rem = polys.poly_divmod_fraction(prod, [Fraction(c) for c in poly])
        return rem + [Fraction(0)] * (n - len(rem))

    B = [[Fraction(c) for c in row] for row in basis]
    Binv = linalg.mat_inv_fraction(B)

    def to_coords(powvec):
        return [sum(Fraction(powvec[k]) * Binv[k][t] for k in range(n)) for t in range(n)]

    def basis_mul(i_coords, j_coords):
        pw_i = [sum(Fraction(i_coords[k]) * B[k][t] for k in range(n)) for t in range(n)]
        pw_j = [sum(Fraction(j_coords[k]) * B[k][t] for k in range(n)) for t in range(n)]
        return to_coords(mul(pw_i, pw_j))

    # frobenius power map x -> x^(p^k) on O/pO, k minimal with p^k >= n
    k = 1
    while p ** k < n:
        k += 1
    frob_rows = []
    for i in range(n):
        e = [Fraction(1 if t == i else 0) for t in range(n)]
        acc = e
        for _ in range(k):
            # acc <- acc^p via repeated squaring in coords
            result = to_coords([Fraction(1)] + [Fraction(0)] * (n - 1))
            base = acc
            ee = p
            while ee:
                if ee & 1:
                    result = basis_mul(result, base)
                base = basis_mul(base, base)
                ee >>= 1
            acc = result
        frob_rows.append([int(c) % p for c in acc])
    ker = _f2_kernel_mod_p(frob_rows, p)
    # radical lattice: spanned by p*e_i and kernel lifts (coords in the order basis)
    rad_rows = [[p if t == i else 0 for t in range(n)] for i in range(n)]
    rad_rows += [[int(c) for c in v] for v in ker]
    rad = linalg.hnf_square(rad_rows, n)
    rad_elems = rad
    # multiplier ring: y in O with y * rad subset p * rad
    rad_mat = [[Fraction(x) for x in row] for row in rad]
    rad_inv = linalg.mat_inv_fraction(rad_mat)
    big_rows = []
    for i in range(n):
        row_blocks = []
        e = [1 if t == i else 0 for t in range(n)]
        for r in rad_elems:
            prod = basis_mul(e, list(r))
            coords = [sum(Fraction(prod[a]) * rad_inv[a][t] for a in range(n)) for t in range(n)]
            for c in coords:
                if c.denominator != 1:
                    raise ArithmeticError("radical is not an ideal of the order")
            row_blocks.extend(int(c) % p for c in coords)
        big_rows.append(row_blocks)
    ker2 = _f2_kernel_mod_p(big_rows, p)
    if not ker2:
        return basis, False
    new_rows = [[p * Fraction(1 if t == i else 0) for t in range(n)] for i in range(n)]
    for v in ker2:
        new_rows.append([Fraction(int(c)) for c in v])
    # HNF over Z of the scaled lattice, then divide by p
    int_rows = [[int(x) for x in row] for row in new_rows]
    h = linalg.hnf_square(int_rows, n)
    if all(h[i][i] == p for i in range(n)):
        return basis, False
    new_basis = []
    for row in h:
        pw = [sum(Fraction(row[k], p) * B[k][t] for k in range(n)) for t in range(n)]
        new_basis.append(pw)
    return new_basis, True


def _f2_kernel_mod_p(rows, p):
    """Left kernel over F_p of the matrix given by rows (v * M = 0)."""
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    aug = [[rows[i][j] % p for j in range(ncols)] + [1 if t == i else 0 for t in range(m)]
           for i in range(m)]
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, m):
            if aug[i][col] % p:
                piv = i
                break
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = pow(aug[rank][col], p - 2, p)
        aug[rank] = [x * inv % p for x in aug[rank]]
        for i in range(m):
            if i != rank and aug[i][col] % p:
                f = aug[i][col]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[rank])]
        rank += 1
    return [row[ncols:] for row in aug[rank:]]


def _search_units(field, blowup_cap):
    """Find n-1 multiplicatively independent units by growing-radius T2 enumeration."""
    n = field.degree
    basis = [field.element([1 if k == i else 0 for k in range(n)]) for i in range(n)]
    gram = field.t2_gram(basis)
    u = linalg.lll_reduce(gram)
    red_elts = [FieldElement(field, [sum(u[i][k] * basis[k].num[t] for k in range(n))
                                     for t in range(n)]) for i in range(n)]
    gram_red = [[sum(u[i][a] * u[j][b] * gram[a][b] for a in range(n) for b in range(n))
                 for j in range(n)] for i in range(n)]
    found = []
    seen = set()
    blow = 4
    while blow <= blowup_cap:
        radius = float(n * blow)
        for v in linalg.fincke_pohst(gram_red, radius):
            x = field.zero()
            for c, b in zip(v, red_elts):
                if c:
                    x = x + c * b
            key = (x.num, x.den)
            if key in seen:
                continue
            seen.add(key)
            if abs(x.norm()) == 1 and not _is_torsion_unit(field, x):
                found.append(x)
        indep = _independent_subset(field, found, n - 1)
        if indep is not None:
            return indep
        blow *= 2
    raise CeilingExceeded("unit search ceiling reached")


def _is_torsion_unit(field, x):
    # in a totally real field the only torsion units are +-1
    return x == field.one() or x == -field.one()


def _certify_independent(field):
    units = field.fundamental_units
    if not _log_rank_at_least(field, units, len(units)):
        raise HypothesisFailure("unit system is not multiplicatively independent "
                                "(log-embedding rank could not be certified)")


def _log_matrix_interval(field, units, prec):
    saved = iv.prec
    iv.prec = prec
    try:
        return [[iv.log(abs(field.evaluate_interval(u, i))) for i in range(field.degree)]
                for u in units]
    finally:
        iv.prec = saved


def _independent_subset(field, candidates, need):
    """Greedy certified-rank selection of `need` multiplicatively independent units."""
    if need == 0:
        return []
    chosen = []
    for x in candidates:
        trial = chosen + [x]
        if _log_rank_at_least(field, trial, len(trial)):
            chosen = trial
            if len(chosen) == need:
                return chosen
    return None


def _log_rank_at_least(field, units, r):
    """Certify rank(log embedding matrix) >= r by finding a minor bounded away from 0."""
    import itertools
    if r == 0:
        return True
    for prec in (64, 128, 256, 512):
        logs = _log_matrix_interval(field, units, prec)
        cols = range(field.degree)
        for subset in itertools.combinations(cols, r):
            det = _iv_det([[logs[i][j] for j in subset] for i in range(r)])
            if det.a > 0 or det.b < 0:
                return True
    return False


def _iv_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    acc = iv.mpf(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _iv_det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def _saturate_units(field, primes):
    """Replace the unit system by q-th roots whenever a power-product is a q-th power.

    Exponent vectors are tried projectively (first nonzero exponent 1); for
    q = 2 the sign vectors rule out everything except products that are
    totally positive up to -1, computed over F_2 without interval work.
    """
    import itertools
    changed = True
    while changed:
        changed = False
        units = field.fundamental_units
        r = len(units)
        sign_rows = [[1 if s < 0 else 0 for s in u.signs()] for u in units]
        for q in primes:
            for exps in itertools.product(range(q), repeat=r):
                nz = next((i for i, e in enumerate(exps) if e), None)
                if nz is None or exps[nz] != 1:
                    continue
                if q == 2:
                    sign = [0] * field.degree
                    for e, row in zip(exps, sign_rows):
                        if e:
                            sign = [(a + b) & 1 for a, b in zip(sign, row)]
                    if any(sign) and not all(sign):
                        continue  # neither +-w can be totally positive
                w = field.one()
                for e, uu in zip(exps, units):
                    if e:
                        w = w * uu ** e
                signs_to_try = [w] if q % 2 == 1 else ([w] if not any(sign) else [-w])
                for cand in signs_to_try:
                    root = _nth_root_in_field(field, cand, q)
                    if root is not None and not _is_torsion_unit(field, root):
                        new_units = list(units)
                        new_units[nz] = root
                        if _log_rank_at_least(field, new_units, r):
                            field.fundamental_units = new_units
                            changed = True
                            break
                if changed:
                    break
            if changed:
                break


def _nth_root_in_field(field, w, q):
    """Exact q-th root of w in O_F if it exists (interval-guessed, exactly verified)."""
    n = field.degree
    signs = w.signs()
    if q % 2 == 0 and any(s < 0 for s in signs):
        return None
    import itertools
    if q % 2 == 1:
        patterns = [(1,) * n]
    else:
        patterns = list(itertools.product((1, -1), repeat=n))
    for prec in (96, 192, 384, 768):
        saved = iv.prec
        iv.prec = prec
        try:
            roots = []
            ok = True
            for i in range(n):
                val = field.evaluate_interval(w, i)
                if val.a <= 0 and q % 2 == 0:
                    ok = False
                    break
                mag = iv.mpf((abs(val).a, abs(val).b)) ** (iv.mpf(1) / q)
                sgn = 1 if val.a > 0 else -1
                roots.append((mag, sgn))
            if not ok:
                return None
            emb = field.embedding_matrix_iv(prec)
            for pattern in patterns:
                rhs = []
                valid = True
                for (mag, sgn), ps in zip(roots, pattern):
                    if q % 2 == 1:
                        rhs.append(mag if sgn > 0 else -mag)
                    else:
                        rhs.append(mag * ps)
                cand = _iv_solve_integer(emb, rhs)
                if cand is None:
                    continue
                x = field.element(cand)
                if x ** q == w:
                    return x
        finally:
            iv.prec = saved
    return None


def _iv_solve_integer(emb, rhs):
    """Solve emb * c = rhs for an integer vector via interval Gaussian elimination.

    Returns the unique integer candidate if every solved interval pins exactly
    one integer, else None.
    """
    n = len(rhs)
    a = [[emb[i][j] for j in range(n)] + [rhs[i]] for i in range(n)]
    for k in range(n):
        piv = None
        for i in range(k, n):
            if a[i][k].a > 0 or a[i][k].b < 0:
                piv = i
                break
        if piv is None:
            return None
        a[k], a[piv] = a[piv], a[k]
        for i in range(n):
            if i != k:
                f = a[i][k] / a[k][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    out = []
    for k in range(n):
        val = a[k][n] / a[k][k]
        if float(val.delta) > 0.9:
            return None  # too wide to pin an integer; caller refines precision
        out.append(round((float(val.a) + float(val.b)) / 2))
    return out
