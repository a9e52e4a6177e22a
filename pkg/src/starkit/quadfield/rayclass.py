"""Ideals, residue unit groups, S-units and ray class groups Cl^T of quadratic fields.

Integral elements are handled in the basis (1, omega), omega = (s + sqrt d)/2
with s = d mod 2.  Ray class groups are built from the exact sequence

    O^x -> (O / m_T)^x -> Cl^T -> Cl -> 1

as explicit abelian groups carrying the action of the non-trivial automorphism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, sqrt
from typing import Iterable, Sequence

from sympy import isprime, nextprime, primitive_root

from ..intmat import hnf, snf
from .forms import (
    Form,
    FormClassGroup,
    QuadNumber,
    class_group,
    fundamental_unit,
    is_fundamental,
    kronecker,
)

# ---------------------------------------------------------------- field and ideals


class QuadField:
    """Q(sqrt d) for a fundamental discriminant d."""

    def __init__(self, d: int):
        if not is_fundamental(d):
            raise ValueError(f"{d} is not a fundamental discriminant")
        self.d = d
        self.s = d % 2

    def __repr__(self):
        return f"QuadField({self.d})"

    def __eq__(self, other):
        return isinstance(other, QuadField) and other.d == self.d

    def __hash__(self):
        return hash(("QuadField", self.d))

    @property
    def is_real(self) -> bool:
        return self.d > 0

    def element(self, a, b=0) -> QuadNumber:
        """a + b*omega."""
        s = self.s
        return QuadNumber(self.d, Fraction(a) + Fraction(b) * s / 2, Fraction(b) / 2)

    def rational(self, q) -> QuadNumber:
        return QuadNumber(self.d, Fraction(q), 0)

    @property
    def omega(self) -> QuadNumber:
        return self.element(0, 1)

    @property
    def sqrt_d(self) -> QuadNumber:
        return QuadNumber(self.d, 0, 1)

    def chi(self, p: int) -> int:
        return kronecker(self.d, p)

    def splitting(self, p: int) -> str:
        c = self.chi(p)
        return {1: "split", -1: "inert", 0: "ramified"}[c]

    @cached_property
    def class_group(self) -> FormClassGroup:
        return class_group(self.d)

    @cached_property
    def roots_of_unity(self) -> tuple[QuadNumber, int]:
        """(generator, order) of the torsion of O^x."""
        if self.d == -3:
            return self.element(0, 1), 6  # omega = (1 + sqrt -3)/2 is a primitive 6th root
        if self.d == -4:
            return self.element(0, 1), 4
        return self.rational(-1), 2

    @cached_property
    def fundamental_unit(self) -> QuadNumber | None:
        return fundamental_unit(self.d) if self.d > 0 else None

    def unit_generators(self) -> list[QuadNumber]:
        z, _ = self.roots_of_unity
        return [z] + ([self.fundamental_unit] if self.d > 0 else [])

    def primes_above(self, p: int) -> list["Prime"]:
        return _primes_above(self.d, p)

    def ideal(self, gens: Iterable[QuadNumber]) -> "Ideal":
        return Ideal.from_generators(self, gens)

    def unit_ideal(self) -> "Ideal":
        return Ideal(self, hnf([[1, 0], [0, 1]], 2))


def _coords(x: QuadNumber) -> tuple[Fraction, Fraction]:
    return x.omega_coords()


def _int_coords(x: QuadNumber) -> tuple[int, int]:
    a, b = x.omega_coords()
    if a.denominator != 1 or b.denominator != 1:
        raise ValueError(f"{x} is not integral")
    return int(a), int(b)


class Ideal:
    """An integral ideal, stored as the HNF of its Z-basis in (1, omega)-coordinates."""

    def __init__(self, F: QuadField, lattice):
        self.F = F
        self.lattice = lattice
        if lattice.rank != 2:
            raise ValueError("an ideal must be a rank-2 lattice")

    @classmethod
    def from_generators(cls, F: QuadField, gens: Iterable[QuadNumber]) -> "Ideal":
        rows = []
        w = F.omega
        for g in gens:
            rows.append(list(_int_coords(g)))
            rows.append(list(_int_coords(g * w)))
        return cls(F, hnf(rows, 2))

    @property
    def basis(self) -> list[QuadNumber]:
        return [self.F.element(a, b) for a, b in self.lattice.basis]

    @property
    def norm(self) -> int:
        (a, b), (c, e) = self.lattice.basis
        return abs(a * e - b * c)

    def __contains__(self, x: QuadNumber) -> bool:
        a, b = x.omega_coords()
        if a.denominator != 1 or b.denominator != 1:
            return False
        return [int(a), int(b)] in self.lattice

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal.from_generators(self.F, [x * y for x in self.basis for y in other.basis])

    def __pow__(self, n: int) -> "Ideal":
        if n < 0:
            raise ValueError("negative powers of integral ideals are not integral")
        out = self.F.unit_ideal()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.F == other.F and self.lattice.basis == other.lattice.basis

    def __hash__(self):
        return hash(tuple(map(tuple, self.lattice.basis)))

    def conj(self) -> "Ideal":
        return Ideal.from_generators(self.F, [x.conj() for x in self.basis])

    def __repr__(self):
        return f"Ideal({self.F.d}, {self.lattice.basis})"


@dataclass(frozen=True)
class Prime:
    """A prime ideal of O_F above the rational prime p.

    For split and ramified primes, `form` is the binary quadratic form
    (p, b, c) attached to P = pZ + ((-b + sqrt d)/2)Z and `root` = (s + b)/2
    is the residue of omega mod P.
    """

    d: int
    p: int
    kind: str
    b: int | None = None

    @property
    def F(self) -> QuadField:
        return QuadField(self.d)

    @property
    def form(self) -> Form | None:
        if self.b is None:
            return None
        return (self.p, self.b, (self.b * self.b - self.d) // (4 * self.p))

    @property
    def residue_degree(self) -> int:
        return 2 if self.kind == "inert" else 1

    @property
    def norm(self) -> int:
        return self.p ** self.residue_degree

    @property
    def root(self) -> int | None:
        if self.b is None:
            return None
        return ((self.d % 2 + self.b) // 2) % self.p

    @cached_property
    def ideal(self) -> Ideal:
        F = self.F
        if self.kind == "inert":
            return F.ideal([F.rational(self.p)])
        gen = QuadNumber(self.d, Fraction(-self.b, 2), Fraction(1, 2))
        return F.ideal([F.rational(self.p), gen])

    def conj(self) -> "Prime":
        if self.kind != "split":
            return self
        return Prime(self.d, self.p, self.kind, (-self.b) % (2 * self.p))

    def hensel_root(self, k: int) -> int:
        """omega mod P^k as an integer mod p^k (split or ramified with k = 1)."""
        if self.kind == "inert":
            raise ValueError("inert primes have residue degree 2")
        s, d, p = self.d % 2, self.d, self.p
        c = (s * s - d) // 4
        r = self.root
        mod = p
        while mod < p**k:
            mod = min(mod * mod, p**k)
            fr = (r * r - s * r + c) % mod
            dfr = (2 * r - s) % mod
            if fr == 0:
                continue
            if gcd(dfr, p) != 1:
                raise ValueError("ramified prime: no Hensel lift")
            r = (r - fr * pow(dfr, -1, mod)) % mod
        return r % p**k

    def valuation(self, x: QuadNumber) -> int:
        """v_P(x) for nonzero x."""
        n = x.norm()
        if n == 0:
            raise ValueError("valuation of zero")
        vn = _vp(n.numerator, self.p) - _vp(n.denominator, self.p)
        if self.kind == "inert":
            return vn // 2
        if self.kind == "ramified":
            return vn
        # split: move to an integral element prime to p in the denominator
        a, b = x.omega_coords()
        den = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
        e = _vp(den, self.p)
        a, b = int(a * den), int(b * den)
        k = max(1, abs(vn) + 2 * e + 2)
        r = self.hensel_root(k)
        val = (a + b * r) % self.p**k
        v = 0
        while val % self.p == 0 and v < k:
            val //= self.p
            v += 1
        return v - e

    def residue(self, x: QuadNumber) -> int:
        """x mod P in F_p for x a P-unit (split or ramified primes)."""
        if self.kind == "inert":
            raise ValueError("inert residue fields are F_{p^2}; use ResidueUnits")
        a, b = x.omega_coords()
        p = self.p
        den = a.denominator * b.denominator
        if den % p == 0:
            raise ValueError("not integral at P")
        A = a.numerator * (den // a.denominator)
        B = b.numerator * (den // b.denominator)
        val = (A + B * self.root) * pow(den, -1, p) % p
        if val == 0:
            raise ValueError("not a unit at P")
        return val

    def __repr__(self):
        return f"Prime({self.d}, {self.p}, {self.kind}, b={self.b})"


def _vp(n: int, p: int) -> int:
    n = abs(n)
    if n == 0:
        raise ValueError("v_p(0)")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=None)
def _primes_above(d: int, p: int) -> list[Prime]:
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    kind = QuadField(d).splitting(p)
    if kind == "inert":
        return [Prime(d, p, "inert")]
    form = class_group(d).prime_form(p)
    P = Prime(d, p, kind, form[1])
    if kind == "ramified":
        return [P]
    return [P, P.conj()]


# ---------------------------------------------------------------- generators of principal ideals


class SearchBoundExceeded(ValueError):
    pass


def find_generator(I: Ideal, limit: int = 2_000_000) -> QuadNumber | None:
    """A generator of I, or None if I is not principal."""
    F, N = I.F, I.norm
    v1, v2 = I.basis
    if F.d < 0:
        # Lagrange reduction for the positive definite norm form
        def nrm(x):
            return x.norm()

        def inner(x, y):
            return (nrm(x + y) - nrm(x) - nrm(y)) / 2

        while True:
            if nrm(v2) < nrm(v1):
                v1, v2 = v2, v1
            q = round(inner(v1, v2) / nrm(v1))
            if q == 0:
                break
            v2 = v2 - v1 * q
        return v1 if nrm(v1) == N else None
    eps = float(F.fundamental_unit.embed(1, 20))
    R = sqrt(N) * eps * 1.0001 + 1
    e = [[float(v.embed(1, 20)), float(v.embed(-1, 20))] for v in (v1, v2)]
    det = e[0][0] * e[1][1] - e[1][0] * e[0][1]
    # (x, y) = (alpha, alpha') * inverse of [[v1, v1'], [v2, v2']]
    bx = (abs(e[1][1]) + abs(e[1][0])) * R / abs(det) + 1
    by = (abs(e[0][1]) + abs(e[0][0])) * R / abs(det) + 1
    if (2 * bx + 1) * (2 * by + 1) > limit:
        raise SearchBoundExceeded("class-group obstruction exceeding search bound")
    best = None
    for x in range(-int(bx), int(bx) + 1):
        for y in range(-int(by), int(by) + 1):
            if x == 0 and y == 0:
                continue
            a = v1 * x + v2 * y
            if abs(a.norm()) == N:
                val = abs(float(a.embed(1, 20)))
                if best is None or val < best[0]:
                    best = (val, a)
    return None if best is None else best[1]


# ---------------------------------------------------------------- residue unit groups (O / m_T)^x


class _Component:
    """(O / l O)^x for one unramified rational prime l."""

    def __init__(self, F: QuadField, ell: int):
        self.F, self.ell = F, ell
        self.kind = F.splitting(ell)
        if self.kind == "ramified":
            raise ValueError(f"T must avoid ramified primes ({ell} | {F.d})")
        s, d = F.s, F.d
        self.c = (s * s - d) // 4  # omega^2 = s*omega - c
        if self.kind == "split":
            P, Q = F.primes_above(ell)
            self.roots = (P.root, Q.root)
            g = int(primitive_root(ell)) if ell > 2 else 1
            self.orders = [ell - 1, ell - 1]
            self._log = {pow(g, k, ell): k for k in range(ell - 1)}
        else:
            q = ell * ell - 1
            gen = None
            for a in range(ell):
                for b in range(1, ell):
                    if self._order((a, b)) == q:
                        gen = (a, b)
                        break
                if gen:
                    break
            self.orders = [q]
            self._log = {}
            x = (1, 0)
            for k in range(q):
                self._log[x] = k
                x = self._mul(x, gen)

    def _mul(self, x, y):
        (a, b), (c, e), l = x, y, self.ell
        # (a + b w)(c + e w) with w^2 = s w - c0
        return ((a * c - b * e * self.c) % l, (a * e + b * c + b * e * self.F.s) % l)

    def _order(self, x):
        k, y = 1, x
        while y != (1, 0):
            y = self._mul(y, x)
            k += 1
            if k > self.ell**2:
                return 0
        return k

    def dlog(self, a: int, b: int) -> list[int]:
        l = self.ell
        if self.kind == "split":
            out = []
            for r in self.roots:
                v = (a + b * r) % l
                if v == 0:
                    raise ValueError("element not prime to T")
                out.append(self._log[v])
            return out
        key = (a % l, b % l)
        if key == (0, 0):
            raise ValueError("element not prime to T")
        return [self._log[key]]

    def conj_matrix(self) -> list[list[int]]:
        if self.kind == "split":
            return [[0, 1], [1, 0]]
        return [[self.ell % self.orders[0]]]


class ResidueUnits:
    """(O / m_T)^x as a product of cyclic groups, with discrete logs and conjugation."""

    def __init__(self, F: QuadField, T: Iterable[int]):
        self.F = F
        self.T = tuple(sorted(set(int(t) for t in T)))
        self.components = [_Component(F, ell) for ell in self.T]
        self.orders: list[int] = [n for c in self.components for n in c.orders]

    @property
    def order(self) -> int:
        out = 1
        for n in self.orders:
            out *= n
        return out

    @property
    def rank(self) -> int:
        return len(self.orders)

    def dlog(self, x: QuadNumber) -> list[int]:
        """Coordinates of x mod m_T (x integral at T and prime to T)."""
        a, b = x.omega_coords()
        den = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
        A, B = int(a * den), int(b * den)
        out = []
        for c in self.components:
            if den % c.ell == 0:
                raise ValueError("element not integral at T")
            inv = pow(den, -1, c.ell)
            out.extend(c.dlog(A * inv, B * inv))
        return [v % n for v, n in zip(out, self.orders)]

    def conj_matrix(self) -> list[list[int]]:
        """Row i = coordinates of the conjugate of the i-th cyclic generator."""
        n = self.rank
        M = [[0] * n for _ in range(n)]
        off = 0
        for c in self.components:
            blk = c.conj_matrix()
            for i, row in enumerate(blk):
                for j, v in enumerate(row):
                    M[off + i][off + j] = v
            off += len(blk)
        return M

    def subgroup_order(self, elements: Iterable[QuadNumber]) -> int:
        """Order of the subgroup generated by the images of `elements`."""
        rows = [self.dlog(x) for x in elements]
        return self.order // _quotient_order(rows, self.orders)


def _quotient_order(rows: Sequence[Sequence[int]], orders: Sequence[int]) -> int:
    n = len(orders)
    rel = [list(r) for r in rows] + [[orders[i] if j == i else 0 for j in range(n)] for i in range(n)]
    if n == 0:
        return 1
    diag = snf(rel).diagonal
    out = 1
    for x in diag[:n]:
        out *= abs(x)
    return out


# ---------------------------------------------------------------- class relations among primes


def _class_key(C: FormClassGroup, f: Form) -> Form:
    """Canonical key of the wide class of f."""
    g = C.reduce(f)
    m = C.minus_one_class
    if C.d > 0 and m is not None and m != C.identity:
        return min(g, C.mul(g, m))
    return g


def _wide_identity(C: FormClassGroup) -> Form:
    return _class_key(C, C.identity)


def prime_class_relations(F: QuadField, primes: Sequence[Prime]) -> list[list[int]]:
    """A basis (triangular) of {r in Z^k : prod P_j^{r_j} is principal}."""
    C = F.class_group
    one = _wide_identity(C)
    k = len(primes)
    table: dict[Form, tuple[int, ...]] = {one: (0,) * k}
    rels: list[list[int]] = []
    for j, P in enumerate(primes):
        g = C.reduce(P.form) if P.form is not None else C.identity
        x, e = g, 1
        while _class_key(C, x) not in table:
            x, e = C.mul(x, g), e + 1
        prev = table[_class_key(C, x)]
        r = [-c for c in prev]
        r[j] += e
        rels.append(r)
        new = {}
        for key, vec in table.items():
            y = key
            for t in range(e):
                kk = _class_key(C, y)
                if kk not in new:
                    v = list(vec)
                    v[j] += t
                    new[kk] = tuple(v)
                y = C.mul(y, g)
        table = new
    return rels


def principal_generator(F: QuadField, primes: Sequence[Prime], r: Sequence[int]) -> QuadNumber:
    """alpha with (alpha) = prod P_j^{r_j}; raises if not principal."""
    I = F.unit_ideal()
    scale = Fraction(1)
    for P, e in zip(primes, r):
        if e >= 0:
            I = I * P.ideal**e
        else:
            # P^{-1} = conj(P) / p  (for inert P = (p) the conjugate is P itself)
            Q = P.conj() if P.kind != "inert" else None
            if P.kind == "inert":
                scale /= Fraction(P.p) ** (-e)
            else:
                I = I * Q.ideal ** (-e)
                scale /= Fraction(P.p) ** (-e)
    g = find_generator(I)
    if g is None:
        raise ValueError("ideal product is not principal")
    return g * F.rational(scale)


# ---------------------------------------------------------------- S-units


@dataclass
class SUnitBasis:
    """Generators of O_{F,S}^x (or of O_{F,S,T}^x when T is given) modulo torsion.

    `valuations[i][j]` is v_{P_j}(generators[i]) for the primes P_j above S.
    """

    field: QuadField
    S: tuple[int, ...]
    T: tuple[int, ...]
    primes: list[Prime]
    torsion: tuple[QuadNumber, int]
    generators: list[QuadNumber]
    valuations: list[list[int]]
    index_in_S_units: int = 1

    @property
    def rank(self) -> int:
        return len(self.generators)

    def expected_rank(self) -> int:
        arch = 2 if self.field.d > 0 else 1
        return arch + len(self.primes) - 1

    def log_embedding(self, x: QuadNumber, dps: int = 30):
        """(log|x| at each archimedean place, -v_P(x) log NP at each P above S)."""
        import mpmath

        with mpmath.workdps(dps):
            arch = [mpmath.log(abs(x.embed(1, dps)))]
            if self.field.d > 0:
                arch.append(mpmath.log(abs(x.embed(-1, dps))))
            else:
                arch = [2 * arch[0]]
            fin = [-P.valuation(x) * mpmath.log(P.norm) for P in self.primes]
            return arch + fin


def s_units(F: QuadField, S: Iterable[int] = (), T: Iterable[int] = ()) -> SUnitBasis:
    """Basis of O_{F,S}^x / torsion, restricted to O_{F,S,T}^x when T is nonempty."""
    S = tuple(sorted(set(int(p) for p in S)))
    T = tuple(sorted(set(int(p) for p in T)))
    if set(S) & set(T):
        raise ValueError("S and T must be disjoint")
    primes = [P for p in S for P in F.primes_above(p)]
    gens: list[QuadNumber] = []
    if F.d > 0:
        gens.append(F.fundamental_unit)
    for r in prime_class_relations(F, primes):
        gens.append(principal_generator(F, primes, r))
    torsion = F.roots_of_unity
    index = 1
    if T:
        A = ResidueUnits(F, T)
        z, w = torsion
        rows = [A.dlog(z)] + [A.dlog(g) for g in gens]
        # kernel of Z^{1+k} -> A, with the torsion coordinate taken mod w
        k = len(gens)
        n = A.rank
        # residue coordinates first so that kernel vectors sit at the bottom of the HNF
        big = [list(r) + [int(i == j) for j in range(1 + k)] for i, r in enumerate(rows)]
        for i in range(n):
            big.append([A.orders[i] if j == i else 0 for j in range(n)] + [0] * (1 + k))
        big.append([0] * n + [w] + [0] * k)
        L = hnf(big, n + 1 + k)
        kernel = [list(row[n + 1:]) + [row[n]] for row in L.basis if not any(row[:n])]
        # torsion coordinate last: the rows with a nonzero free part form a basis mod torsion
        new = []
        for vec in hnf(kernel, 1 + k).basis:
            if not any(vec[:k]):
                continue
            x = z ** vec[k]
            for c, g in zip(vec[:k], gens):
                x = x * g**c
            new.append(x)
        index = A.subgroup_order(gens + [z])
        gens = new
    vals = [[P.valuation(g) for P in primes] for g in gens]
    return SUnitBasis(F, S, T, primes, torsion, gens, vals, index)


# ---------------------------------------------------------------- Cl^T as an abelian group with conjugation


@dataclass
class FiniteModule:
    """Z^n / relations with an endomorphism sigma, reduced to Smith form.

    `invariants` are the cyclic orders d_i > 1 of the canonical generators and
    `sigma` is the matrix (rows = images of generators) in those coordinates.
    """

    invariants: list[int]
    sigma: list[list[int]]
    labels: list[str] = field(default_factory=list)

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariants:
            out *= d
        return out

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % d for x, d in zip(v, self.invariants))

    def act(self, a: int, b: int) -> list[tuple[int, ...]]:
        """Images of the generators under a + b*sigma."""
        n = len(self.invariants)
        return [self.reduce([a * (i == j) + b * self.sigma[i][j] for j in range(n)]) for i in range(n)]

    def annihilated_by(self, a: int, b: int) -> bool:
        return all(not any(v) for v in self.act(a, b))


def _finite_module(rel_rows: list[list[int]], sigma_rows: list[list[int]], ncols: int) -> FiniteModule:
    res = snf(rel_rows + [[0] * ncols]) if rel_rows else None
    diag = list(res.diagonal) + [0] * ncols
    V = [list(r) for r in res.V]
    Vinv = _inverse_unimodular(V)
    keep = [i for i in range(ncols) if abs(diag[i]) != 1]
    if any(diag[i] == 0 for i in keep):
        raise ValueError("module is infinite")
    inv = [abs(diag[i]) for i in keep]
    # generator i of the new basis is row i of V^{-1}; coordinates of x are x * V
    sig = []
    for i in keep:
        g = Vinv[i]
        img = [sum(g[k] * sigma_rows[k][j] for k in range(ncols)) for j in range(ncols)]
        coords = [sum(img[k] * V[k][j] for k in range(ncols)) for j in range(ncols)]
        sig.append([coords[j] % abs(diag[j]) for j in keep])
    return FiniteModule(inv, sig)


def _inverse_unimodular(V: list[list[int]]) -> list[list[int]]:
    n = len(V)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(V)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    out = [[x for x in row[n:]] for row in A]
    assert all(x.denominator == 1 for row in out for x in row)
    return [[int(x) for x in row] for row in out]


@dataclass
class RayClassT:
    """Cl^T_S(F): ideals prime to T modulo principal ideals (alpha), alpha = 1 mod m_T,
    and modulo the primes above S.  The module carries the action of conjugation."""

    field: QuadField
    T: tuple[int, ...]
    S: tuple[int, ...]
    module: FiniteModule
    residue_order: int
    unit_image_order: int
    class_number: int
    prime_generators: list[Prime]
    gens_rows: int = 0
    cl_surjection_ok: bool = True

    @property
    def invariants(self) -> list[int]:
        return self.module.invariants

    @property
    def order(self) -> int:
        return self.module.order

    def expected_order(self) -> int:
        """h * |(O/m_T)^x| / |image of O^x| (only valid for S empty)."""
        return self.class_number * self.residue_order // self.unit_image_order

    def presentation(self, flip_sigma: bool = False):
        """Cl^T as a module over Z[Gal(F/Q)] = Z[<sigma>] (relations are columns).

        Generators are the Smith generators c_i; relations are d_i c_i and
        sigma c_i - sum_j M_ij c_j.  `flip_sigma` replaces M by -M (a negative control).
        """
        from ..fitting import PresentedModule
        from ..groupring import FiniteAbelianGroup

        G = FiniteAbelianGroup([2])
        mod = self.module
        t = len(mod.invariants)
        if t == 0:
            return PresentedModule.from_dense(G, [[(1, 0)]])
        cols = []
        for i, d in enumerate(mod.invariants):
            cols.append([(d, 0) if j == i else (0, 0) for j in range(t)])
        for i in range(t):
            row = mod.sigma[i]
            sign = -1 if flip_sigma else 1
            cols.append([(-sign * row[j], int(i == j)) for j in range(t)])
        dense = [[cols[c][r] for c in range(len(cols))] for r in range(t)]
        return PresentedModule.from_dense(G, dense)


def _class_generators(F: QuadField, T: Sequence[int], must: Sequence[Prime]) -> list[Prime]:
    """Primes prime to T whose classes generate Cl(F), starting with `must`."""
    C = F.class_group
    primes = list(must)
    target = C.wide_order if F.d > 0 else C.order

    def generated(ps):
        rels = prime_class_relations(F, ps) if ps else []
        size = 1
        for i, r in enumerate(rels):
            size *= r[i]
        return size

    p = 2
    while generated(primes) < target:
        if p not in T and F.splitting(p) != "inert":
            for P in F.primes_above(p)[:1]:
                if P not in primes:
                    primes.append(P)
        p = int(nextprime(p))
        if p > 10_000:
            raise ValueError("could not find class group generators")  # pragma: no cover
    return primes


def ray_class_T(F: QuadField, T: Iterable[int] = (), S: Iterable[int] = ()) -> RayClassT:
    """Cl^T (and Cl^T_S when S lists rational primes whose primes are killed)."""
    T = tuple(sorted(set(int(t) for t in T)))
    S = tuple(sorted(set(int(p) for p in S)))
    if set(S) & set(T):
        raise ValueError("S and T must be disjoint")
    A = ResidueUnits(F, T)
    s_primes = [P for p in S for P in F.primes_above(p)]
    primes = _class_generators(F, T, s_primes)
    nA, k = A.rank, len(primes)
    n = nA + k
    rows: list[list[int]] = []
    for i, o in enumerate(A.orders):
        rows.append([o if j == i else 0 for j in range(n)])
    for u in F.unit_generators():
        rows.append(A.dlog(u) + [0] * k)
    for r in prime_class_relations(F, primes):
        alpha = principal_generator(F, primes, r)
        rows.append([-x for x in A.dlog(alpha)] + list(r))
    # conjugation: on A by the residue action, on primes by P -> (p) P^{-1}
    sigma = [row + [0] * k for row in A.conj_matrix()]
    for j, P in enumerate(primes):
        if P.kind == "inert":
            sigma.append([0] * nA + [int(t == j) for t in range(k)])
        else:
            sigma.append(A.dlog(F.rational(P.p)) + [-int(t == j) for t in range(k)])
    # kill the primes above S (and their conjugates)
    for P in s_primes:
        j = primes.index(P)
        rows.append([int(t == nA + j) for t in range(n)])
        rows.append(sigma[nA + j])
    module = _finite_module(rows, sigma, n)
    C = F.class_group
    h = C.wide_order if F.d > 0 else C.order
    unit_img = A.subgroup_order(F.unit_generators()) if A.rank else 1
    return RayClassT(F, T, S, module, A.order, unit_img, h, primes)

