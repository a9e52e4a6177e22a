from __future__ import annotations

from fractions import Fraction
from math import gcd

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import factorint

from starkit.cyclo.characters import DirichletChar, Subfield, dirichlet_characters, unit_group
from starkit.cyclo.field import CycloNumber, euler_phi
from starkit.cyclo.lfunctions import (
    bernoulli_b1,
    is_admissible_T,
    l_derivative_numeric,
    l_value_zero,
    roots_of_unity_order,
    stickelberger,
    stickelberger_character_sum,
)
from starkit.cyclo.units import cyclotomic_unit, rubin_stark_Q
from starkit.quadfield.forms import class_number, is_fundamental, regulator, roots_of_unity_count


def cyclo(m):
    deg = euler_phi(m)
    coeff = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 5))
    return st.lists(coeff, min_size=deg, max_size=deg).map(lambda c: CycloNumber(m, c))


# ---------------------------------------------------------------- CycloNumber


@given(st.sampled_from([3, 5, 8, 12]).flatmap(lambda m: st.tuples(cyclo(m), cyclo(m), cyclo(m))))
@settings(max_examples=40, deadline=None)
def test_ring_axioms(xyz):
    x, y, z = xyz
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x - x == CycloNumber.rational(0, x.m)


@given(st.sampled_from([5, 7, 9, 12]).flatmap(lambda m: st.tuples(st.just(m), cyclo(m), cyclo(m))))
@settings(max_examples=30, deadline=None)
def test_embedding_is_a_homomorphism(args):
    m, x, y = args
    with mpmath.workdps(30):
        for k in unit_group(m).residues:
            assert abs((x * y).embed(k, 30) - x.embed(k, 30) * y.embed(k, 30)) < mpmath.mpf(10) ** -25
            assert abs((x + y).embed(k, 30) - x.embed(k, 30) - y.embed(k, 30)) < mpmath.mpf(10) ** -25


@pytest.mark.parametrize("m", [1, 2, 3, 4, 6, 12, 15, 16, 30])
def test_zeta_relations(m):
    z = CycloNumber.zeta(m)
    assert z ** m == CycloNumber.rational(1, m)
    prim = sum((CycloNumber.zeta(m, k) for k in range(1, m + 1) if gcd(k, m) == 1), CycloNumber.rational(0, m))
    mu = {1: 1, 2: -1, 3: -1, 4: 0, 6: 1, 12: 0, 15: 1, 16: 0, 30: -1}[m]
    assert prim == CycloNumber.rational(mu, m)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_norm_of_one_minus_zeta(p):
    assert (1 - CycloNumber.zeta(p)).norm() == p


def test_lift_and_galois():
    z = CycloNumber.zeta(3)
    assert z.lift(12) == CycloNumber.zeta(12, 4)
    assert CycloNumber.zeta(12).galois(5) == CycloNumber.zeta(12, 5)


# ---------------------------------------------------------------- characters


@pytest.mark.parametrize("f", [1, 3, 4, 8, 12, 15, 16, 20, 24])
def test_character_basics(f):
    chars = dirichlet_characters(f)
    assert len(chars) == euler_phi(f)
    U = unit_group(f)
    for chi in chars:
        assert f % chi.conductor == 0
        for a in U.residues:
            for b in U.residues:
                assert chi(a * b) == chi(a) * chi(b)
        assert chi.value(f) == 0 or f == 1
        assert chi.primitive().is_primitive()


def test_quadratic_characters():
    assert DirichletChar.quadratic(-3).conductor == 3
    assert DirichletChar.quadratic(-4).value(3) == -1
    assert DirichletChar.quadratic(8).is_even
    assert not DirichletChar.quadratic(-8).is_even


def test_conductor_counts():
    # number of primitive characters mod f is the Dirichlet convolution of phi with mu
    counts = {9: 4, 15: 3, 16: 4, 12: 1, 6: 0}
    for f, n in counts.items():
        assert sum(c.is_primitive() for c in dirichlet_characters(f)) == n


# ---------------------------------------------------------------- L-values and Stickelberger


def test_bernoulli_examples():
    assert bernoulli_b1(DirichletChar.quadratic(-3)) == Fraction(-1, 3)
    assert bernoulli_b1(DirichletChar.quadratic(-4)) == Fraction(-1, 2)
    with pytest.raises(ValueError):
        bernoulli_b1(next(c for c in dirichlet_characters(6) if not c.is_primitive()))


def test_l_value_examples():
    chi = DirichletChar.quadratic(-3)
    assert l_value_zero(chi, [3]).value == Fraction(1, 3)
    assert l_value_zero(chi, [3], [5]).value == 2
    even = DirichletChar.quadratic(5)
    lv = l_value_zero(even, [5])
    assert lv.order >= 1 and lv.value == 0
    with pytest.raises(ValueError):
        l_value_zero(chi, [3, 5], [5])


@pytest.mark.parametrize("d", [d for d in range(-50, 0) if is_fundamental(d)])
def test_analytic_class_number_formula(d):
    chi = DirichletChar.quadratic(d)
    assert l_value_zero(chi).value == Fraction(2 * class_number(d), roots_of_unity_count(d))


def test_stickelberger_examples():
    th = stickelberger(3, "full", [3])
    assert th.coefficient_of(1) == Fraction(-1, 6) and th.coefficient_of(2) == Fraction(1, 6)
    th = stickelberger(3, "full", [3], [5])
    assert th.coefficient_of(1) == -1 and th.coefficient_of(2) == 1 and th.is_integral()
    th = stickelberger(4, "full", [2])
    assert th.coefficient_of(1) == Fraction(-1, 4) and th.coefficient_of(3) == Fraction(1, 4)


def _all_subfields(f):
    G = unit_group(f).group
    return [Subfield(f, H) for H in G.subgroups()]


@pytest.mark.parametrize("f", range(1, 25))
def test_fractional_part_matches_character_sum(f):
    S = sorted(factorint(f))
    for K in _all_subfields(f):
        a = stickelberger(f, K, S).element
        b = stickelberger_character_sum(f, K, S).element
        assert a == b


@pytest.mark.parametrize("f", [7, 12, 15])
def test_fractional_part_matches_with_extra_S_and_T(f):
    S = sorted(factorint(f)) + [11]
    for K in _all_subfields(f):
        assert stickelberger(f, K, S, [13]).element == stickelberger_character_sum(f, K, S, [13]).element


def _first_prime_not_dividing(n):
    p = 3
    while n % p == 0 or any(p % q == 0 for q in range(2, p)):
        p += 1
    return p


@pytest.mark.parametrize("f", range(3, 41))
def test_integrality_with_admissible_T(f):
    ell = _first_prime_not_dividing(2 * f)
    S = sorted(factorint(f))
    for K in _all_subfields(f):
        assert is_admissible_T(K, [ell])
        assert stickelberger(f, K, S, [ell]).is_integral()


def test_integrality_fails_without_T():
    assert not stickelberger(3, "full", [3]).is_integral()
    K = Subfield.full(3)
    assert not is_admissible_T(K, [])
    assert not is_admissible_T(K, [2])
    assert is_admissible_T(K, [7]) and is_admissible_T(K, [2, 7])


@pytest.mark.parametrize("f", [8, 12, 15, 20, 21, 24])
def test_deflation_compatibility(f):
    full = stickelberger(f, "full", sorted(factorint(f))).element
    for K in _all_subfields(f):
        c = K.conductor
        lhs = full.deflate(K.qmap)
        rhs = stickelberger(f, K, K.ramified_primes()).element
        for ell in sorted(factorint(f)):
            if c % ell == 0:
                continue
            b = next(b for b in range(ell, ell + c * f + 1, max(c, 1)) if gcd(b, f) == 1)
            rhs = rhs * (K.galois.one() - K.galois.ring_element(K.galois.neg(K.frobenius(b))))
        assert lhs == rhs


def test_roots_of_unity_order():
    assert roots_of_unity_order(Subfield.full(3)) == 6
    assert roots_of_unity_order(Subfield.full(8)) == 8
    assert roots_of_unity_order(Subfield.plus(8)) == 2


# ---------------------------------------------------------------- derivatives


REAL_DISCS = [d for d in range(5, 90) if is_fundamental(d)]


@pytest.mark.parametrize("d", REAL_DISCS)
def test_derivative_against_regulator(d):
    chi = DirichletChar.quadratic(d)
    val, bound = l_derivative_numeric(chi, [], [], precision=20)
    h = class_number(d)
    assert abs(val - h * regulator(d, 30)) < mpmath.mpf(10) ** -15


def test_derivative_golden_ratio():
    val, _ = l_derivative_numeric(DirichletChar.quadratic(5), [], [], precision=15)
    assert abs(val - mpmath.log((1 + mpmath.sqrt(5)) / 2)) < mpmath.mpf(10) ** -9


def test_derivative_conjugate_and_convergence():
    chi = DirichletChar.quadratic(13)
    assert l_derivative_numeric(chi)[0] == l_derivative_numeric(chi.inverse())[0]
    lo, blo = l_derivative_numeric(chi, [], [], precision=15)
    hi, bhi = l_derivative_numeric(chi, [], [], precision=30)
    assert bhi < blo and abs(lo - hi) < blo


def test_derivative_rejects_trivial_and_odd():
    with pytest.raises(ValueError):
        l_derivative_numeric(dirichlet_characters(5)[0])
    with pytest.raises(ValueError):
        l_derivative_numeric(DirichletChar.quadratic(-4))


# ---------------------------------------------------------------- cyclotomic units, Rubin-Stark


def test_cyclotomic_unit_exponent():
    eps = cyclotomic_unit(5, [3])
    # 1 - 3 sigma_3^{-1} = 1 - 3 sigma_2
    assert eps.factors() == [(1, 1), (2, -3)]
    assert cyclotomic_unit(7).factors() == [(1, 1)]


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_product_of_conjugates(p):
    eps = cyclotomic_unit(p)
    with mpmath.workdps(30):
        assert abs(mpmath.fsum(eps.conjugate_log_abs()) - mpmath.log(p)) < mpmath.mpf(10) ** -25


def test_eps_is_real_for_odd_T():
    for m, T in [(5, [3]), (7, [3]), (12, [5]), (9, [2, 5])]:
        v = cyclotomic_unit(m, T).value()
        assert abs(mpmath.im(v)) < mpmath.mpf(10) ** -20


def test_eps_with_T_two_is_imaginary():
    # (1 - zeta_7)^{1 - 2 sigma_2^{-1}} lies in i * Q(mu_7)^+; its absolute values still define lambda
    v = cyclotomic_unit(7, [2]).value()
    assert abs(mpmath.re(v)) < mpmath.mpf(10) ** -20


@pytest.mark.parametrize("m,T", [(5, [3]), (7, [2]), (7, [3]), (8, [3]), (9, [2, 5]), (12, [5]), (13, [3]),
                                 (15, [7]), (16, [3]), (20, [3]), (21, [5])])
def test_rubin_stark_recovery(m, T):
    r = rubin_stark_Q(m, T, dps=30)
    assert r.rank == len(r.coordinates_from_L)
    assert r.matches(mpmath.mpf(10) ** -20)
    assert r.max_imag_part < mpmath.mpf(10) ** -20


def test_rubin_stark_independent_of_w0():
    a = rubin_stark_Q(12, [5], v0=2)
    b = rubin_stark_Q(12, [5], v0=3)
    assert max(abs(x - y) for x, y in zip(a.coordinates_from_L, b.coordinates_from_L)) < mpmath.mpf(10) ** -20


def test_rubin_stark_negative_control():
    r = rubin_stark_Q(7, [3], compare_with=cyclotomic_unit(7, [5]))
    assert not r.matches(mpmath.mpf(10) ** -9)


def test_rubin_stark_rejects_bad_input():
    for m, T in [(6, [5]), (5, []), (5, [5])]:
        with pytest.raises(ValueError):
            rubin_stark_Q(m, T)
