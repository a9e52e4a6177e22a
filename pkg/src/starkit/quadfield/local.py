"""Local symbols: quadratic Hilbert symbols and tame reciprocity at split primes.

Reciprocity normalization (used everywhere in the package): a unit u of
L_lambda = Q_ell maps to the automorphism zeta -> zeta^(u mod lambda)^(-1) of
Q(mu_ell), and a uniformizer ell maps to the trivial automorphism.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from sympy import legendre_symbol, primitive_root

from .forms import QuadNumber
from .rayclass import Prime

REC_NORMALIZATION = "rec(u) = [zeta -> zeta^(u mod lambda)^-1], rec(ell) = 1"

INF = "inf"


def _split_rational(x: Fraction, p: int) -> tuple[int, int]:
    """(v_p(x), u) with x = p^v * u and u an integer in the same square class as the unit part."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no Hilbert symbol")
    n, d = x.numerator, x.denominator
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v, n * d


def _hilbert_local(va: int, ua: int, vb: int, ub: int, p: int) -> int:
    """(p^va ua, p^vb ub)_p for p-adic units ua, ub given as integers."""
    if p == 2:
        def eps(u):
            return ((u - 1) // 2) % 2

        def omega(u):
            return ((u * u - 1) // 8) % 2

        e = eps(ua) * eps(ub) + va * omega(ub) + vb * omega(ua)
        return -1 if e % 2 else 1
    sign = -1 if (va * vb * ((p - 1) // 2)) % 2 else 1
    la = legendre_symbol(ua % p, p) if vb % 2 else 1
    lb = legendre_symbol(ub % p, p) if va % 2 else 1
    return sign * la * lb


def hilbert_symbol(a, b, p) -> int:
    """Quadratic Hilbert symbol (a, b)_p for nonzero rationals; p a prime or 'inf'."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("zero has no Hilbert symbol")
    if p == INF or p == 0:
        return -1 if a < 0 and b < 0 else 1
    va, ua = _split_rational(a, p)
    vb, ub = _split_rational(b, p)
    return _hilbert_local(va, ua, vb, ub, p)


def padic_embedding(x: QuadNumber, P: Prime, k: int) -> tuple[int, int]:
    """(v, u): x = p^v * u in L_P = Q_p, with u a unit known mod p^k (P of degree 1)."""
    if P.kind == "inert":
        raise ValueError("P must have residue degree 1")
    if P.kind == "ramified":
        raise ValueError("ramified completions are quadratic extensions of Q_p")
    p = P.p
    v = P.valuation(x)
    # x * p^{-v} is a P-unit; clear denominators prime to p
    y = x * QuadNumber(x.d, Fraction(1, p) ** v if v >= 0 else Fraction(p) ** (-v), 0)
    a, b = y.omega_coords()
    D = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
    A, B = int(a * D), int(b * D)
    e, D0 = 0, D
    while D0 % p == 0:
        D0 //= p
        e += 1
    mod = p ** (k + e)
    val = (A + B * P.hensel_root(k + e)) % mod
    if val % p**e:
        raise ValueError("internal: inexact division in p-adic embedding")  # pragma: no cover
    u = (val // p**e) * pow(D0, -1, p**k) % p**k
    if u % p == 0:
        raise ValueError("internal: unit part divisible by p")  # pragma: no cover
    return v, u


def local_hilbert_at_split(x: QuadNumber, b, P: Prime) -> int:
    """(iota_P(x), b)_p for P split, b a nonzero rational."""
    p = P.p
    v, u = padic_embedding(x, P, 3 if p == 2 else 1)
    vb, ub = _split_rational(Fraction(b), p)
    return _hilbert_local(v, u, vb, ub, p)


def local_hilbert_at_real(x: QuadNumber, b, sign: int) -> int:
    """(x, b) at the real place of L where sqrt d -> sign * |sqrt d|."""
    val = x.embed(sign, 30)
    return -1 if val < 0 and Fraction(b) < 0 else 1


@lru_cache(maxsize=None)
def _dlog_table(ell: int) -> tuple[int, dict[int, int]]:
    g = int(primitive_root(ell))
    table, x = {}, 1
    for k in range(ell - 1):
        table[x] = k
        x = x * g % ell
    return g, table


def cyclotomic_rec(u: QuadNumber, lam: Prime, order: int) -> int:
    """Image of rec_lambda(u) in the order-`order` quotient of Gal(Q(mu_ell)/Q).

    The quotient is identified with Z/order through sigma_g -> 1, g the least
    primitive root mod ell.  Requires ell split in L and u a lambda-unit.
    """
    if lam.kind != "split":
        raise ValueError("ell must split in L")
    ell = lam.p
    if (ell - 1) % order:
        raise ValueError("order must divide ell - 1")
    if lam.valuation(u) != 0:
        raise ValueError("u is not a unit at lambda")
    ubar = lam.residue(u)
    _, table = _dlog_table(ell)
    return (-table[ubar]) % order


def tame_rec(x: QuadNumber, lam: Prime, order: int) -> int:
    """rec_lambda on all of L_lambda^x: x = ell^v * w maps to rec(w) (ell -> 1)."""
    v, w = padic_embedding(x, lam, 1)
    _, table = _dlog_table(lam.p)
    return (-table[w % lam.p]) % order
