import random
from fractions import Fraction

import pytest

from quatcm import linalg
from quatcm.errors import HypothesisFailure
from quatcm.fields import make_field

CUBIC_49 = [-1, -2, 1, 1]
CUBIC_169 = [-1, -4, -1, 1]
CUBIC_321 = [9, -5, -2, 1]


@pytest.fixture(scope="module")
def F49():
    return make_field(CUBIC_49)


@pytest.fixture(scope="module")
def Q():
    return make_field([0, 1])


def test_rational_base_case(Q):
    assert Q.degree == 1
    assert Q.disc == 1
    assert Q.class_number() == 1


def test_disc49_field(F49):
    assert F49.degree == 3
    assert F49.disc == 49
    # power basis is maximal: index 1
    assert F49.index == 1


def test_disc169_field():
    F = make_field(CUBIC_169)
    assert F.disc == 169
    assert F.degree == 3


def test_non_totally_real_rejected():
    with pytest.raises(HypothesisFailure):
        make_field([1, 0, 1])  # x^2 + 1


def test_reducible_rejected():
    with pytest.raises(HypothesisFailure):
        make_field([-1, 0, 1])  # x^2 - 1 = (x-1)(x+1)


def test_integral_basis_saturation():
    # x^2 - 5 has index 2; the maximal order is Z[(1+sqrt5)/2]
    F = make_field([-5, 0, 1])
    assert F.disc == 5
    assert F.index == 2


def test_factor_2_inert_disc49(F49):
    (pr,) = F49.factor_rational_prime(2)
    assert (pr.e, pr.f) == (1, 3)
    assert pr.norm == 8


def test_factor_7_ramified_disc49(F49):
    (pr,) = F49.factor_rational_prime(7)
    assert (pr.e, pr.f) == (3, 1)


def test_factor_2_in_Q(Q):
    (pr,) = Q.factor_rational_prime(2)
    assert (pr.e, pr.f) == (1, 1)
    assert pr.norm == 2


def test_sum_ef_and_product_of_primes(F49):
    for p in (2, 3, 5, 11, 13, 29, 41, 43, 97):
        primes = F49.factor_rational_prime(p)
        assert sum(pr.e * pr.f for pr in primes) == 3
        prod = F49.unit_ideal()
        for pr in primes:
            prod = prod * pr ** pr.e
        assert prod == F49.ideal([F49.coerce(p)])


def test_class_numbers():
    assert make_field([0, 1]).class_number() == 1
    assert make_field(CUBIC_49).class_number() == 1
    assert make_field(CUBIC_321).class_number() == 1


def test_narrow_class_number(F49, Q):
    assert Q.narrow_class_number() == 1
    assert F49.narrow_class_number() == 1
    assert F49.has_units_of_independent_signs()


def test_narrow_degenerate_when_units_positive():
    # h+ = h * 2^(n - rank); with only -1 in degree 1 the rank is full,
    # so fabricate the degenerate case by inspecting the formula pieces.
    F = make_field(CUBIC_49)
    rows = F.unit_sign_matrix()
    # removing all unit rows would leave rank 1 (just -1): h+ would be h * 2^(n-1)
    from quatcm.fields import _f2_rank
    assert _f2_rank([rows[0]]) == 1


def test_signs_trivial(F49):
    one = F49.one()
    assert one.signs() == [1, 1, 1]
    assert (-one).signs() == [-1, -1, -1]


def test_unit_has_mixed_signs(F49):
    for u in F49.fundamental_units:
        assert abs(u.norm()) == 1
    sign_vectors = {tuple(u.signs()) for u in F49.fundamental_units}
    assert any(sv != (1, 1, 1) and sv != (-1, -1, -1) for sv in sign_vectors)


def test_sign_stability_under_refinement(F49):
    u = F49.fundamental_units[0]
    from mpmath import iv
    from quatcm.intervals import interval_at
    s64 = [interval_at(lambda i=i: F49.evaluate_interval(u, i), 64) for i in range(3)]
    s256 = [interval_at(lambda i=i: F49.evaluate_interval(u, i), 256) for i in range(3)]
    for a, b in zip(s64, s256):
        # refined interval is contained in the coarse one and has the same sign
        assert a.a <= b.a and b.b <= a.b


def test_norm_trace_multiplicativity(F49):
    rng = random.Random(7)
    for _ in range(25):
        a = F49.element([rng.randint(-9, 9) for _ in range(3)])
        b = F49.element([rng.randint(-9, 9) for _ in range(3)])
        assert (a * b).norm() == a.norm() * b.norm()
        assert (a + b).trace() == a.trace() + b.trace()


def test_division_exact(F49):
    rng = random.Random(11)
    for _ in range(10):
        a = F49.element([rng.randint(-5, 5) for _ in range(3)])
        b = F49.element([rng.randint(-5, 5) for _ in range(3)])
        if b.is_zero():
            continue
        q = a / b
        assert q * b == a


def test_ideal_norm_multiplicative(F49):
    p3 = F49.factor_rational_prime(13)[0]
    p5 = F49.factor_rational_prime(29)[0]
    prod = p3 * p5
    assert prod.norm == p3.norm * p5.norm


def test_ideal_hnf_composition(F49):
    a = F49.ideal([F49.element([2, 1, 0])])
    b = F49.ideal([F49.element([1, 0, 1])])
    ab = a * b
    # (ab) contains all products of generators of a and b
    for x in a.basis_elements():
        for y in b.basis_elements():
            assert ab.contains(x * y)
    assert ab.norm == a.norm * b.norm


def test_brute_force_ideal_oracle(F49):
    """Independent oracle: enumerate ALL HNF sublattices of norm <= bound that are
    ideals, and check each is principal (h = 1 for the section-7 cubics)."""
    n = 3
    bound = 12
    basis_elems = [F49.element([1 if k == i else 0 for k in range(n)]) for i in range(n)]
    count_ideals = 0
    import itertools

    def hnf_candidates(norm):
        # upper triangular, positive diagonal, product of diagonal = norm
        for d0 in range(1, norm + 1):
            if norm % d0:
                continue
            rest = norm // d0
            for d1 in range(1, rest + 1):
                if rest % d1:
                    continue
                d2 = rest // d1
                for a01 in range(d1):
                    for a02 in range(d2):
                        for a12 in range(d2):
                            yield [[d0, a01, a02], [0, d1, a12], [0, 0, d2]]

    found_nontrivial = 0
    for norm in range(2, bound + 1):
        for rows in hnf_candidates(norm):
            lat = [list(r) for r in rows]
            ok = True
            for r in rows:
                x = F49.element(r)
                for b in basis_elems:
                    if not linalg.lattice_contains(lat, (x * b).num):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                count_ideals += 1
                from quatcm.fields import Ideal
                ideal = Ideal(F49, rows)
                gen = F49.principal_element(ideal)
                assert gen is not None, f"ideal of norm {norm} not principal"
                found_nontrivial += 1
    assert found_nontrivial > 0


def test_epsilon_units(F49):
    for i in range(3):
        eps = F49.epsilon_unit(i)
        signs = eps.signs()
        assert signs[i] == -1
        assert all(s == 1 for j, s in enumerate(signs) if j != i)
