"""Exact arithmetic in cyclotomic fields Q(zeta_m).

Numbers are dense rational coefficient vectors modulo the m-th cyclotomic
polynomial, in the power basis 1, zeta, ..., zeta^(phi(m)-1).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational

import mpmath

MAX_MODULUS = 240


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        q = num[i + len(den) - 1] // den[-1]
        out[i] = q
        for j, c in enumerate(den):
            num[i + j] -= q * c
    assert not any(num), "inexact polynomial division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients (low degree first) of the m-th cyclotomic polynomial."""
    if m < 1:
        raise ValueError("m must be positive")
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Row k = coordinates of zeta^k for k in [0, 2*deg)."""
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(2 * deg):
        rows.append(tuple(cur))
        # multiply by zeta and reduce
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, phi[:-1])]
    return tuple(rows)


def _mobius(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


class CycloNumber:
    """An element of Q(zeta_m), immutable."""

    __slots__ = ("m", "coeffs", "_hash")

    def __init__(self, m: int, coeffs):
        if m > MAX_MODULUS:
            raise ValueError(f"cyclotomic modulus {m} exceeds cap {MAX_MODULUS}")
        deg = euler_phi(m)
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > deg:
            table = _power_table(m)
            red = [Fraction(0)] * deg
            for k, c in enumerate(coeffs):
                if c:
                    # zeta^k with k possibly >= 2*deg: reduce exponent mod m first
                    row = table[k] if k < len(table) else _zeta_coords(m, k)
                    for j, t in enumerate(row):
                        if t:
                            red[j] += c * t
            coeffs = red
        else:
            coeffs = coeffs + [Fraction(0)] * (deg - len(coeffs))
        self.m = m
        self.coeffs = tuple(coeffs)
        self._hash = None

    @classmethod
    def rational(cls, q, m: int = 1) -> "CycloNumber":
        return cls(m, [q])

    @classmethod
    def zeta(cls, m: int, k: int = 1) -> "CycloNumber":
        return cls(m, _zeta_coords(m, k))

    def lift(self, M: int) -> "CycloNumber":
        """Image in Q(zeta_M) for m | M."""
        if M == self.m:
            return self
        if M % self.m:
            raise ValueError(f"Q(zeta_{self.m}) does not embed in Q(zeta_{M})")
        step = M // self.m
        out = [Fraction(0)] * euler_phi(M)
        for k, c in enumerate(self.coeffs):
            if c:
                for j, t in enumerate(_zeta_coords(M, k * step)):
                    if t:
                        out[j] += c * t
        return CycloNumber(M, out)

    def _coerce(self, other) -> tuple["CycloNumber", "CycloNumber"]:
        if isinstance(other, CycloNumber):
            if other.m == self.m:
                return self, other
            M = self.m * other.m // gcd(self.m, other.m)
            return self.lift(M), other.lift(M)
        if isinstance(other, (int, Rational)):
            return self, CycloNumber(self.m, [other])
        return NotImplemented

    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        a, b = c
        return CycloNumber(a.m, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.m, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return CycloNumber(self.m, [x * other for x in self.coeffs])
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        a, b = c
        prod = [Fraction(0)] * (2 * len(a.coeffs) - 1 or 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return CycloNumber(a.m, prod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return CycloNumber(self.m, [x / other for x in self.coeffs])
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = CycloNumber(self.m, [1]), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def galois(self, a: int) -> "CycloNumber":
        """Apply the automorphism zeta -> zeta^a (gcd(a, m) = 1)."""
        if gcd(a, self.m) != 1:
            raise ValueError("exponent must be a unit mod m")
        out = CycloNumber(self.m, [0])
        for k, c in enumerate(self.coeffs):
            if c:
                out = out + CycloNumber.zeta(self.m, a * k) * c
        return out

    def conjugate(self) -> "CycloNumber":
        return self.galois(-1 % self.m if self.m > 1 else 1)

    def norm(self) -> Fraction:
        """Absolute norm to Q."""
        out = CycloNumber(self.m, [1])
        for a in range(1, self.m + 1):
            if gcd(a, self.m) == 1:
                out = out * self.galois(a)
        q = out.to_rational()
        assert q is not None
        return q

    def inverse(self) -> "CycloNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        # x^{-1} = (prod of other conjugates) / N(x)
        prod = CycloNumber(self.m, [1])
        for a in range(2, self.m + 1):
            if gcd(a, self.m) == 1 and a % self.m != 1:
                prod = prod * self.galois(a)
        return prod / self.norm() if self.m > 2 else CycloNumber(self.m, [1 / self.coeffs[0]])

    def normalized_trace(self) -> Fraction:
        return sum((c * _mobius(self.m // gcd(k, self.m)) / euler_phi(self.m // gcd(k, self.m))
                    for k, c in enumerate(self.coeffs) if c), Fraction(0))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_rational(self) -> Fraction | None:
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def embed(self, k: int = 1, dps: int = 30):
        """Complex value under zeta_m -> exp(2 pi i k / m)."""
        with mpmath.workdps(dps):
            z = mpmath.expjpi(mpmath.mpf(2 * k) / self.m)
            return mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * z**j
                               for j, c in enumerate(self.coeffs) if c)

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            q = self.to_rational()
            return q is not None and q == other
        if not isinstance(other, CycloNumber):
            return NotImplemented
        a, b = self._coerce(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        if self._hash is None:
            # trace / degree is invariant under lifting, so equal numbers in
            # different moduli hash alike; rationals hash like Fractions
            self._hash = hash(self.normalized_trace())
        return self._hash

    def __repr__(self):
        q = self.to_rational()
        if q is not None:
            return f"CycloNumber({self.m}, {q})"
        terms = [f"{c}*z^{k}" for k, c in enumerate(self.coeffs) if c]
        return f"CycloNumber({self.m}, {' + '.join(terms)})"


@lru_cache(maxsize=None)
def _zeta_coords(m: int, k: int) -> tuple[int, ...]:
    k %= m
    table = _power_table(m)
    if k < len(table):
        return table[k]
    # k in [2*deg, m): multiply lower powers
    half = k // 2
    a, b = _zeta_coords(m, half), _zeta_coords(m, k - half)
    deg = len(a)
    prod = [0] * (2 * deg - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    out = [0] * deg
    for i, c in enumerate(prod):
        if c:
            for j, t in enumerate(table[i]):
                if t:
                    out[j] += c * t
    return tuple(out)
