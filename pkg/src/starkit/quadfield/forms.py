"""Quadratic fields via binary quadratic forms: class groups and fundamental units."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, isqrt

import mpmath
from sympy import factorint, jacobi_symbol

from ..groupring import FiniteAbelianGroup


def is_fundamental(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return all(e == 1 for e in factorint(abs(d)).values())
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and all(e == 1 for e in factorint(abs(m)).values())
    return False


def _require_fundamental(d: int):
    if not is_fundamental(d):
        raise ValueError(f"{d} is not a fundamental discriminant")


def kronecker(d: int, n: int) -> int:
    """The Kronecker symbol (d/n) for n >= 1 (and n = -1 via the sign of d)."""
    if n == 0:
        return 1 if abs(d) == 1 else 0
    out = 1
    if n < 0:
        n = -n
        if d < 0:
            out = -out
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        if d % 8 in (3, 5):
            out = -out
    if n == 1:
        return out
    return out * jacobi_symbol(d % n, n)


# ---------------------------------------------------------------- numbers


@dataclass(frozen=True)
class QuadNumber:
    """x + y sqrt(d) with rational x, y."""

    d: int
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    @classmethod
    def from_omega(cls, d: int, a: int, b: int) -> "QuadNumber":
        """a + b*omega, omega = (s + sqrt d)/2 with s = d mod 2."""
        s = d % 2
        return cls(d, Fraction(2 * a + b * s, 2), Fraction(b, 2))

    def omega_coords(self) -> tuple[Fraction, Fraction]:
        s = self.d % 2
        b = 2 * self.y
        return self.x - b * s / 2, b

    def _check(self, o):
        if isinstance(o, QuadNumber):
            if o.d != self.d:
                raise ValueError("different fields")
            return o
        return QuadNumber(self.d, Fraction(o), 0)

    def __add__(self, o):
        o = self._check(o)
        return QuadNumber(self.d, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadNumber(self.d, -self.x, -self.y)

    def __sub__(self, o):
        return self + (-self._check(o))

    def __rsub__(self, o):
        return self._check(o) - self

    def __mul__(self, o):
        o = self._check(o)
        return QuadNumber(self.d, self.x * o.x + self.d * self.y * o.y, self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def conj(self) -> "QuadNumber":
        return QuadNumber(self.d, self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x - self.d * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x

    def inverse(self) -> "QuadNumber":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero element")
        c = self.conj()
        return QuadNumber(self.d, c.x / n, c.y / n)

    def __truediv__(self, o):
        return self * self._check(o).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = QuadNumber(self.d, 1, 0), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_integral(self) -> bool:
        a, b = self.omega_coords()
        return a.denominator == 1 and b.denominator == 1

    def embed(self, sign: int = 1, dps: int = 30):
        """Value with sqrt(d) -> sign*sqrt(d) (principal branch for d < 0)."""
        with mpmath.workdps(dps):
            r = mpmath.sqrt(mpmath.mpf(self.d)) if self.d > 0 else mpmath.sqrt(mpmath.mpc(self.d))
            return mpmath.mpf(self.x.numerator) / self.x.denominator + sign * r * (
                mpmath.mpf(self.y.numerator) / self.y.denominator)

    def __repr__(self):
        return f"({self.x}) + ({self.y})*sqrt({self.d})"


# ---------------------------------------------------------------- forms


Form = tuple[int, int, int]


def _disc(f: Form) -> int:
    a, b, c = f
    return b * b - 4 * a * c


def compose(f: Form, g: Form) -> Form:
    """Gauss composition of primitive forms of equal discriminant (unreduced result)."""
    if _disc(f) != _disc(g):
        raise ValueError("discriminant mismatch")
    if abs(f[0]) > abs(g[0]):
        f, g = g, f
    a1, b1, c1 = f
    a2, b2, c2 = g
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _v = _xgcd3_two(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd3_two(s, d)
        y2 = -y2
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return (a3, b3, c3)


def _xgcd3_two(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with g = gcd(a, b) = a x + b y, g >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def reduce_definite(f: Form) -> Form:
    """Reduced form equivalent to the positive definite f: |b| <= a <= c, b >= 0 on the boundary."""
    a, b, c = f
    if a < 0:
        raise ValueError("negative definite form")
    while True:
        if b > a or b <= -a:
            # normalize b into (-a, a]
            k = (a - b) // (2 * a)
            b, c = b + 2 * k * a, a * k * k + b * k + c
            continue
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return (a, b, c)


def _rho(f: Form, D: int) -> Form:
    """One step of the indefinite reduction operator."""
    a, b, c = f
    rD = isqrt(D)
    m = 2 * abs(c)
    if abs(c) > rD:
        # r = -b mod 2|c| in (-|c|, |c|]
        r = (-b) % m
        if r > abs(c):
            r -= m
    else:
        # r = -b mod 2|c| in (sqrt D - 2|c|, sqrt D)
        r = (-b) % m
        lo = rD - m  # sqrt D not an integer (D fundamental > 1 is not a square)
        r = r + m * ((lo - r) // m + 1)
    return (c, r, (r * r - D) // (4 * c))


def is_reduced_indefinite(f: Form, D: int) -> bool:
    a, b, c = f
    rD = mpmath.sqrt(D)
    return abs(rD - 2 * abs(a)) < b < rD


def reduce_indefinite(f: Form) -> Form:
    D = _disc(f)
    for _ in range(10_000):
        if is_reduced_indefinite(f, D):
            return f
        f = _rho(f, D)
    raise RuntimeError("indefinite reduction did not terminate")


def _group_structure(order: int, power_count) -> list[int]:
    """Invariant factors of an abelian group from counts of elements killed by p^k."""
    blocks: dict[int, list[int]] = {}
    for p, e in factorint(order).items():
        # r_k = #{x : p^k x = 0} = p^{sum_i min(k, e_i)}; recover the partition
        ranks = []
        k = 1
        total = 0
        prev = 0
        while total < e:
            cnt = power_count(p**k)
            s_k = round(mpmath.log(cnt, p)) if cnt > 1 else 0
            ranks.append(s_k - prev)
            total = s_k
            prev = s_k
            k += 1
        # ranks[k-1] = number of cyclic factors of order >= p^k
        exps = []
        for k in range(len(ranks), 0, -1):
            count_ge_k = ranks[k - 1]
            count_ge_k1 = ranks[k] if k < len(ranks) else 0
            exps.extend([k] * (count_ge_k - count_ge_k1))
        blocks[p] = sorted(exps, reverse=True)
    width = max((len(v) for v in blocks.values()), default=0)
    out = []
    for i in range(width):
        n = 1
        for p, exps in blocks.items():
            if i < len(exps):
                n *= p ** exps[i]
        out.append(n)
    return sorted(out)


class FormClassGroup:
    """The class group of a fundamental discriminant, realized on reduced forms.

    For d < 0 the elements are reduced positive definite forms.  For d > 0
    the narrow class group is realized on cycles of reduced indefinite forms
    (each class stored by the least form of its cycle), and `wide` gives the
    quotient by the class of the form representing -1.
    """

    def __init__(self, d: int):
        _require_fundamental(d)
        if abs(d) > 10**6:
            raise ValueError("|d| too large")
        self.d = d
        if d < 0:
            self.forms = self._reduced_definite()
            self._key = {f: f for f in self.forms}
        else:
            self._cycles = self._indefinite_cycles()
            self.forms = sorted(self._cycles)
            self._key = {g: f for f, cyc in self._cycles.items() for g in cyc}

    def _reduced_definite(self) -> list[Form]:
        D = -self.d
        out = []
        a = 1
        while 3 * a * a <= D:
            for b in range(-a + 1, a + 1):
                if (b * b + D) % (4 * a):
                    continue
                c = (b * b + D) // (4 * a)
                if c < a or (c == a and b < 0):
                    continue
                if gcd(gcd(a, abs(b)), c) != 1:
                    continue
                out.append((a, b, c))
            a += 1
        return sorted(out)

    def _indefinite_cycles(self) -> dict[Form, list[Form]]:
        D = self.d
        rD = isqrt(D)
        reduced = set()
        for b in range(1, rD + 1):
            if (b - D) % 2:
                continue
            ac = (b * b - D) // 4
            for a in range(1, abs(ac) + 1):
                if ac % a:
                    continue
                for sa in (a, -a):
                    f = (sa, b, ac // sa)
                    if gcd(gcd(a, b), abs(ac // sa)) == 1 and is_reduced_indefinite(f, D):
                        reduced.add(f)
        cycles: dict[Form, list[Form]] = {}
        seen = set()
        for f in sorted(reduced):
            if f in seen:
                continue
            cyc = [f]
            g = _rho(f, D)
            while g != f:
                cyc.append(g)
                g = _rho(g, D)
            seen.update(cyc)
            cycles[min(cyc)] = cyc
        return cycles

    def reduce(self, f: Form) -> Form:
        """Canonical representative of the (narrow) class of f."""
        if _disc(f) != self.d:
            raise ValueError("wrong discriminant")
        if self.d < 0:
            return reduce_definite(f)
        return self._key[reduce_indefinite(f)]

    @property
    def identity(self) -> Form:
        s = self.d % 2
        return self.reduce((1, s, (s - self.d) // 4))

    def mul(self, f: Form, g: Form) -> Form:
        return self.reduce(compose(f, g))

    def inverse(self, f: Form) -> Form:
        a, b, c = f
        return self.reduce((a, -b, c))

    def power(self, f: Form, n: int) -> Form:
        if n < 0:
            f, n = self.inverse(f), -n
        out, base = self.identity, self.reduce(f)
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    @property
    def order(self) -> int:
        return len(self.forms)

    def element_order(self, f: Form) -> int:
        k, g = 1, self.reduce(f)
        while g != self.identity:
            g = self.mul(g, f)
            k += 1
        return k

    @cached_property
    def invariants(self) -> list[int]:
        return [n for n in _group_structure(self.order, self._count_killed) if n > 1]

    def _count_killed(self, n: int) -> int:
        return sum(1 for f in self.forms if self.power(f, n) == self.identity)

    @cached_property
    def minus_one_class(self) -> Form | None:
        """For d > 0: the narrow class of the form representing -1."""
        if self.d < 0:
            return None
        s = self.d % 2
        return self.reduce((-1, s, (self.d - s) // 4))

    @cached_property
    def wide_order(self) -> int:
        if self.d < 0 or self.minus_one_class == self.identity:
            return self.order
        return self.order // 2

    def prime_form(self, p: int) -> Form | None:
        """A form (p, b, c) for p split or ramified (None if p is inert)."""
        D = self.d
        if kronecker(D, p) == -1:
            return None
        for b in range(0, 2 * p):
            if (b * b - D) % (4 * p) == 0:
                return (p, b, (b * b - D) // (4 * p))
        return None  # pragma: no cover


@lru_cache(maxsize=None)
def class_group(d: int) -> FormClassGroup:
    return FormClassGroup(d)


def class_number(d: int) -> int:
    """h(d): for d > 0 the wide class number."""
    return class_group(d).wide_order


def roots_of_unity_count(d: int) -> int:
    return {-3: 6, -4: 4}.get(d, 2)


def fundamental_unit(d: int) -> QuadNumber:
    """Smallest unit > 1 of the real quadratic order of discriminant d.

    Walks the continued fraction of omega = (s + sqrt d)/2 and returns the
    first convergent p/q with p - q*conj(omega) of norm +-1.
    """
    _require_fundamental(d)
    if d < 0:
        raise ValueError("real quadratic field required")
    s = d % 2
    # omega = (P + sqrt d)/Q with Q | d - P^2
    P, Q = s, 2
    p_prev, p = 1, None
    q_prev, q = 0, None
    rd = isqrt(d)
    for _ in range(100_000):
        a = (P + rd) // Q
        if p is None:
            p, q = a, 1
        else:
            p, p_prev = a * p + p_prev, p
            q, q_prev = a * q + q_prev, q
        eta = QuadNumber(d, Fraction(2 * p - q * s, 2), Fraction(q, 2))
        if abs(eta.norm()) == 1:
            return eta
        P = a * Q - P
        Q = (d - P * P) // Q
    raise RuntimeError("fundamental unit not found")  # pragma: no cover


def regulator(d: int, dps: int = 30):
    with mpmath.workdps(dps):
        return mpmath.log(fundamental_unit(d).embed(1, dps))
