"""Dirichlet L-values at s = 0 and Stickelberger elements over Q.

Sign convention for Stickelberger elements: `stickelberger` returns
sum_a (a/f - 1/2) sigma_a^{-1} times Euler factors and delta_T, which is
-sum_chi L_{S,T}(chi^{-1}, 0) e_chi.  L-values themselves carry the usual
sign (L(chi_{-3}, 0) = 1/3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import mpmath

from ..groupring import FiniteAbelianGroup, GroupRingElement
from .characters import DirichletChar, Subfield, unit_group
from .field import CycloNumber

SIGN_CONVENTION = "stickelberger = sum_a (a/f - 1/2) sigma_a^-1 = -sum_chi L_ST(chi^-1,0) e_chi"


def _as_set(xs: Iterable[int] | None) -> frozenset[int]:
    return frozenset(int(x) for x in (xs or ()))


def bernoulli_b1(chi: DirichletChar):
    """B_{1,chi} = (1/f) sum_{a=1}^{f} chi(a) a for primitive chi; B_1 = 1/2 for the trivial character."""
    if not chi.is_primitive():
        raise ValueError("bernoulli_b1 needs a primitive character")
    f = chi.modulus
    if f == 1:
        return Fraction(1, 2)
    total = CycloNumber.rational(0)
    for a in range(1, f + 1):
        v = chi.value(a)
        if v != 0:
            total = total + v * a
    total = total / f
    q = total.to_rational()
    return q if q is not None else total


@dataclass(frozen=True)
class LValueAtZero:
    """Order of vanishing r and the exact coefficient of s^0 (0 when r > 0)."""

    order: int
    value: object


def vanishing_order(chi: DirichletChar, S: Iterable[int] = ()) -> int:
    """r_{chi,S} for S = {infinity} plus the finite primes listed."""
    S = _as_set(S)
    if chi.is_trivial():
        return len(S)
    psi = chi.primitive()
    r = 1 if chi.is_even else 0
    for ell in S:
        if psi.conductor % ell and psi.value(ell) == 1:
            r += 1
    return r


def _euler_factor_exact(psi: DirichletChar, S, T):
    out = CycloNumber.rational(1)
    for ell in sorted(S):
        if psi.modulus % ell:
            out = out * (1 - psi.value(ell))
    for ell in sorted(T):
        out = out * (1 - psi.value(ell) * ell)
    return out


def _normalize(x):
    if isinstance(x, CycloNumber):
        q = x.to_rational()
        return q if q is not None else x
    return Fraction(x)


def l_value_zero(chi: DirichletChar, S: Iterable[int] = (), T: Iterable[int] = ()) -> LValueAtZero:
    """L_{S,T}(chi, 0) exactly, with S = {infinity} + S and the T-modification."""
    S, T = _as_set(S), _as_set(T)
    if S & T:
        raise ValueError("S and T must be disjoint")
    r = vanishing_order(chi, S)
    if r > 0:
        return LValueAtZero(r, Fraction(0))
    psi = chi.primitive()
    base = -bernoulli_b1(psi)
    return LValueAtZero(0, _normalize(_euler_factor_exact(psi, S, T) * base))


def l_derivative_primitive(chi: DirichletChar, dps: int = 30):
    """L'(chi, 0) = -(1/2) sum_{a=1}^{f} chi(a) log|1 - zeta_f^a| for primitive even nontrivial chi."""
    if chi.is_trivial():
        raise ValueError("trivial character not supported")
    if not chi.is_primitive():
        raise ValueError("primitive character required")
    if not chi.is_even:
        raise ValueError("even character required")
    f = chi.modulus
    with mpmath.workdps(dps + 10):
        total = mpmath.mpc(0)
        for a in range(1, f):
            v = chi.value(a)
            if v == 0:
                continue
            z = v.embed(1, dps + 10) if isinstance(v, CycloNumber) else mpmath.mpf(v)
            total += z * mpmath.log(abs(1 - mpmath.expjpi(mpmath.mpf(2 * a) / f)))
        return -total / 2


def leading_term_numeric(chi: DirichletChar, S: Iterable[int] = (), T: Iterable[int] = (), r: int | None = None,
                         dps: int = 30):
    """lim_{s->0} s^{-r} L_{S,T}(chi, s) numerically (r defaults to the vanishing order).

    Returns 0 when r is below the vanishing order; raises if r exceeds it.
    """
    S, T = _as_set(S), _as_set(T)
    if S & T:
        raise ValueError("S and T must be disjoint")
    r0 = vanishing_order(chi, S)
    if r is None:
        r = r0
    if r < r0:
        return mpmath.mpc(0)
    if r > r0:
        raise ValueError("s^-r L(s) has a pole at 0")
    with mpmath.workdps(dps + 10):
        if chi.is_trivial():
            val = mpmath.mpf(-1) / 2
            for ell in S:
                val *= mpmath.log(ell)
            for ell in T:
                val *= 1 - ell
            return mpmath.mpc(val)
        psi = chi.primitive()
        if psi.is_even:
            val = l_derivative_primitive(psi, dps)
        else:
            b = bernoulli_b1(psi)
            val = -(b.embed(1, dps + 10) if isinstance(b, CycloNumber) else mpmath.mpf(b))
        for ell in sorted(S):
            if psi.modulus % ell == 0:
                continue
            v = psi.value(ell)
            if v == 1:
                val *= mpmath.log(ell)
            else:
                val *= 1 - v.embed(1, dps + 10)
        for ell in sorted(T):
            v = psi.value(ell)
            vv = v.embed(1, dps + 10) if isinstance(v, CycloNumber) else mpmath.mpf(v)
            val *= 1 - vv * ell
        return mpmath.mpc(val)


def l_derivative_numeric(chi: DirichletChar, S: Iterable[int] = (), T: Iterable[int] = (), precision: int = 15):
    """lim s^{-1} L_{S,T}(chi, s) for even nontrivial chi, to about `precision` digits.

    Returns (value, error_bound).  The bound is a conservative rounding
    estimate for the f-term sum evaluated at precision + 10 digits.
    """
    if chi.is_trivial():
        raise ValueError("trivial character not supported")
    if not chi.is_even:
        raise ValueError("even character required")
    dps = precision + 10
    val = leading_term_numeric(chi, S, T, r=1, dps=dps) if vanishing_order(chi, S) <= 1 else mpmath.mpc(0)
    bound = mpmath.mpf(chi.modulus) * mpmath.mpf(10) ** (-(dps - 2))
    return val, bound


# ---------------------------------------------------------------- Stickelberger


@dataclass
class StickelbergerElement:
    element: GroupRingElement
    field: Subfield
    S: frozenset = field(default_factory=frozenset)
    T: frozenset = field(default_factory=frozenset)
    convention: str = SIGN_CONVENTION

    def is_integral(self) -> bool:
        return self.element.is_integral()

    def coefficient_of(self, a: int):
        """Coefficient of sigma_a (a a residue mod f)."""
        return self.element[self.field.frobenius(a)]


def _check_sets(K: Subfield, S, T):
    if S & T:
        raise ValueError("S and T must be disjoint")
    missing = set(K.ramified_primes()) - S
    if missing:
        raise ValueError(f"S must contain the ramified primes {sorted(missing)}")


def _transport(K0: Subfield, K: Subfield):
    """Gal(K0/Q) -> Gal(K/Q) for the same field at levels f0 | f."""
    out = {}
    for a in K0.units.residues:
        b = a
        while gcd(b, K.f) != 1:
            b += K0.f
        out[K0.frobenius(a)] = K.frobenius(b)
    return out


def _transport_element(x: GroupRingElement, mapping, target: FiniteAbelianGroup) -> GroupRingElement:
    out = {}
    for g, c in x.coeffs.items():
        h = mapping[g]
        out[h] = out.get(h, 0) + c
    return GroupRingElement(target, out)


def euler_factor_element(U, ell: int, scale: int = 1) -> GroupRingElement:
    """1 - scale * sigma_ell^{-1} in Q[(Z/f)^x]."""
    G = U.group
    return G.one() - G.ring_element(G.neg(U.log(ell)), scale)


def delta_T(U, T: Iterable[int]) -> GroupRingElement:
    """prod_{ell in T} (1 - ell sigma_ell^{-1})."""
    out = U.group.one()
    for ell in sorted(_as_set(T)):
        out = out * euler_factor_element(U, ell, ell)
    return out


def _fractional_part_theta(f0: int) -> GroupRingElement:
    U = unit_group(f0)
    G = U.group
    out = {}
    for a in range(1, f0 + 1):
        if gcd(a, f0) == 1:
            g = G.neg(U.log(a))
            out[g] = out.get(g, 0) + Fraction(a, f0) - Fraction(1, 2)
    return GroupRingElement(G, out)


def stickelberger(f: int, K=None, S: Iterable[int] = (), T: Iterable[int] = ()) -> StickelbergerElement:
    """Stickelberger element of K inside Q(mu_f) via the fractional-part formula.

    K is a Subfield or a selector accepted by Subfield.from_selector.  S lists
    the finite primes of S (infinity is implicit).
    """
    K = K if isinstance(K, Subfield) else Subfield.from_selector(f, K)
    S, T = _as_set(S), _as_set(T)
    _check_sets(K, S, T)
    f0 = K.conductor
    K0 = K.descend(f0)
    U0 = K0.units
    theta = _fractional_part_theta(f0)
    for ell in sorted(S):
        if f0 % ell:
            theta = theta * euler_factor_element(U0, ell)
    theta = theta * delta_T(U0, T)
    down = theta.deflate(K0.qmap)
    return StickelbergerElement(_transport_element(down, _transport(K0, K), K.galois), K, S, T)


def stickelberger_character_sum(f: int, K=None, S: Iterable[int] = (), T: Iterable[int] = ()) -> StickelbergerElement:
    """The same element as -sum_chi L_{S,T}(chi^{-1}, 0) e_chi, computed with cyclotomic coefficients."""
    K = K if isinstance(K, Subfield) else Subfield.from_selector(f, K)
    S, T = _as_set(S), _as_set(T)
    _check_sets(K, S, T)
    G = K.units.group
    total = G.zero()
    for chi in K.characters():
        lv = l_value_zero(chi.inverse(), S, T)
        if lv.order > 0 or lv.value == 0:
            continue
        total = total + chi.chi.idempotent() * (-lv.value)
    down = total.deflate(K.qmap)
    return StickelbergerElement(down, K, S, T)


def character_value_of_theta(theta: StickelbergerElement, chi: DirichletChar):
    """chi(theta) = sum_g theta_g chi(g), for chi a character of Gal(K/Q) given mod f."""
    K = theta.field
    total = CycloNumber.rational(0)
    # evaluate on Gal(K/Q) through lifts of its elements
    for tau, c in theta.element.coeffs.items():
        a = K.units.exp(K.qmap.lift(tau))
        total = total + chi.value(a) * c
    return _normalize(total)


def roots_of_unity_order(K: Subfield) -> int:
    """w_K = number of roots of unity in K."""
    best = 1
    for n in range(1, K.f + 1):
        if K.f % n == 0 and all(K.units.exp(h) % n == 1 % n for h in K.H.elements):
            best = n
    return best * 2 // gcd(best, 2)


def is_admissible_T(K: Subfield, T: Iterable[int]) -> bool:
    """O^x_{K,S,T} is torsion-free: T has two primes, or one prime not dividing w_K."""
    T = sorted(_as_set(T))
    if not T:
        return False
    if len(T) >= 2:
        return True
    return roots_of_unity_order(K) % T[0] != 0
