"""The groups (Z/f)^x = Gal(Q(mu_f)/Q), Dirichlet characters, and subfields of Q(mu_f)."""

from __future__ import annotations

from functools import cached_property, lru_cache
from math import gcd
from typing import Iterable, Sequence

from sympy import factorint, primitive_root

from ..groupring import CharacterOfG, FiniteAbelianGroup, GroupRingElement, QuotientMap, Subgroup
from .field import CycloNumber


def _crt(residues: Sequence[tuple[int, int]]) -> int:
    x, M = 0, 1
    for r, m in residues:
        # solve x + M*t = r (mod m)
        t = ((r - x) * pow(M, -1, m)) % m if m > 1 else 0
        x, M = x + M * t, M * m
    return x % M


class UnitGroup:
    """(Z/f)^x as a product of cyclic groups, with sigma_a : zeta_f -> zeta_f^a.

    Cyclic factors come from the CRT decomposition: one per odd prime power,
    and for 2^k either none (k = 1), <-1> (k = 2) or <-1> x <5> (k >= 3).
    """

    def __init__(self, f: int):
        if f < 1:
            raise ValueError("modulus must be positive")
        self.f = f
        fac = factorint(f)
        self.prime_powers = sorted((p, k) for p, k in fac.items())
        self._factors: list[tuple[int, int, int, int]] = []  # (p^k, generator mod p^k, order, prime)
        for p, k in self.prime_powers:
            q = p**k
            if p == 2:
                if k >= 2:
                    self._factors.append((q, q - 1, 2, 2))
                if k >= 3:
                    self._factors.append((q, 5, 2 ** (k - 2), 2))
            else:
                self._factors.append((q, int(primitive_root(q)), (p - 1) * p ** (k - 1), p))
        self.group = FiniteAbelianGroup([n for _, _, n, _ in self._factors])
        self._log: dict[int, tuple[int, ...]] = {}
        for g in self.group.elements:
            self._log[self._exp_uncached(g)] = g
        assert len(self._log) == self.group.order

    def _exp_uncached(self, g: Sequence[int]) -> int:
        comps: dict[int, int] = {p**k: 1 for p, k in self.prime_powers}
        for (q, gen, _n, _p), e in zip(self._factors, g):
            comps[q] = comps[q] * pow(gen, e, q) % q
        return _crt(sorted((r, q) for q, r in comps.items())) % self.f

    def exp(self, g: Sequence[int]) -> int:
        """The residue a in [0, f) of the group element g."""
        return self._exp_uncached(self.group.reduce(g))

    def log(self, a: int) -> tuple[int, ...]:
        """The group element sigma_a."""
        a %= self.f
        if self.f == 1:
            return self.group.identity
        if gcd(a, self.f) != 1:
            raise ValueError(f"{a} is not a unit mod {self.f}")
        return self._log[a]

    @cached_property
    def residues(self) -> list[int]:
        return sorted(self._log)

    def sigma(self, a: int, coeff=1) -> GroupRingElement:
        return self.group.ring_element(self.log(a), coeff)

    def subgroup_of(self, residues: Iterable[int]) -> Subgroup:
        return self.group.subgroup([self.log(a) for a in residues])

    def reduction_kernel(self, d: int) -> Subgroup:
        """Kernel of (Z/f)^x -> (Z/d)^x for d | f."""
        if self.f % d:
            raise ValueError("d must divide f")
        return self.subgroup_of(a for a in self.residues if a % d == 1 % d)

    def characters(self) -> list["DirichletChar"]:
        return [DirichletChar(self, chi) for chi in self.group.characters()]


@lru_cache(maxsize=None)
def unit_group(f: int) -> UnitGroup:
    return UnitGroup(f)


class DirichletChar:
    """A Dirichlet character mod f, i.e. a character of (Z/f)^x."""

    def __init__(self, units: UnitGroup, chi: CharacterOfG):
        if chi.group != units.group:
            raise ValueError("character of the wrong group")
        self.units = units
        self.chi = chi

    @classmethod
    def from_values(cls, f: int, values: dict[int, int], order: int) -> "DirichletChar":
        """The character with chi(a) = zeta_order^values[a] for the listed a (must generate)."""
        U = unit_group(f)
        for c in U.characters():
            ok = True
            for a, k in values.items():
                if c.value(a) != CycloNumber.zeta(order, k):
                    ok = False
                    break
            if ok:
                return c
        raise ValueError("no character with these values")

    @classmethod
    def quadratic(cls, d: int) -> "DirichletChar":
        """The Kronecker character of the fundamental discriminant d, modulo |d|."""
        from ..quadfield.forms import kronecker

        f = abs(d)
        U = unit_group(f)
        for c in U.characters():
            if c.order == 2 and all(c.value(a) == kronecker(d, a) for a in U.residues):
                return c
        raise ValueError(f"{d} is not a fundamental discriminant")

    @property
    def modulus(self) -> int:
        return self.units.f

    def __eq__(self, other):
        return isinstance(other, DirichletChar) and self.modulus == other.modulus and self.chi == other.chi

    def __hash__(self):
        return hash((self.modulus, self.chi))

    def __repr__(self):
        return f"DirichletChar(mod {self.modulus}, conductor {self.conductor}, exps {list(self.chi.exps)})"

    @property
    def order(self) -> int:
        return self.chi.order

    def is_trivial(self) -> bool:
        return self.chi.is_trivial()

    def exponent(self, a: int) -> int | None:
        """k with chi(a) = zeta_E^k (E the exponent of the unit group); None if gcd(a, f) > 1."""
        if gcd(a, self.modulus) != 1:
            return None
        return self.chi.exponent_of(self.units.log(a))

    def value(self, a: int):
        """chi(a) as a CycloNumber, or 0 when gcd(a, f) > 1."""
        if gcd(a, self.modulus) != 1:
            return 0
        return self.chi(self.units.log(a))

    def __call__(self, a: int):
        return self.value(a)

    def inverse(self) -> "DirichletChar":
        return DirichletChar(self.units, self.chi.inverse())

    @property
    def is_even(self) -> bool:
        return self.value(-1) == 1

    @property
    def parity(self) -> int:
        return 0 if self.is_even else 1

    def trivial_on(self, H: Subgroup) -> bool:
        return all(self.chi.exponent_of(h) == 0 for h in H.elements)

    @cached_property
    def conductor(self) -> int:
        f = self.modulus
        for d in sorted(x for x in range(1, f + 1) if f % x == 0):
            if self.trivial_on(self.units.reduction_kernel(d)):
                return d
        return f  # pragma: no cover

    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def primitive(self) -> "DirichletChar":
        """The primitive character inducing this one."""
        c = self.conductor
        if c == self.modulus:
            return self
        U = unit_group(c)
        for psi in U.characters():
            if all(psi.exponent_lifted(a, self) for a in U.residues):
                return psi
        raise AssertionError("no primitive character found")  # pragma: no cover

    def exponent_lifted(self, a: int, big: "DirichletChar") -> bool:
        # self(a) == big(a') for a lift a' of a coprime to big's modulus
        f = self.modulus
        a2 = a
        while gcd(a2, big.modulus) != 1:
            a2 += f
        return self.value(a) == big.value(a2)

    def primitive_value(self, n: int):
        """Value of the associated primitive character at any integer n."""
        return self.primitive().value(n)


def dirichlet_characters(f: int) -> list[DirichletChar]:
    return unit_group(f).characters()


class Subfield:
    """K inside Q(mu_f), given by the subgroup H of (Z/f)^x fixing it; Gal(K/Q) = (Z/f)^x / H."""

    def __init__(self, f: int, H: Subgroup | Iterable[int] | None = None):
        self.units = unit_group(f)
        if H is None:
            H = self.units.group.trivial_subgroup()
        elif not isinstance(H, Subgroup):
            H = self.units.subgroup_of(H)
        self.H = H
        self.qmap: QuotientMap = self.units.group.quotient(H)

    @classmethod
    def full(cls, f: int) -> "Subfield":
        return cls(f)

    @classmethod
    def plus(cls, f: int) -> "Subfield":
        """The maximal real subfield Q(mu_f)^+."""
        return cls(f, [-1 % f] if f > 2 else [])

    @classmethod
    def quadratic(cls, d: int, f: int | None = None) -> "Subfield":
        """Q(sqrt d) inside Q(mu_f), f a multiple of |d| (default |d|)."""
        f = abs(d) if f is None else f
        if f % abs(d):
            raise ValueError("|d| must divide f")
        chi = DirichletChar.quadratic(d)
        U = unit_group(f)
        return cls(f, [a for a in U.residues if chi.value(a % abs(d)) == 1])

    @classmethod
    def from_selector(cls, f: int, selector) -> "Subfield":
        """selector: 'full', 'plus', ('quadratic', d), or a list of residues generating H."""
        if selector in (None, "full"):
            return cls.full(f)
        if selector == "plus":
            return cls.plus(f)
        if isinstance(selector, (tuple, list)) and selector and selector[0] == "quadratic":
            return cls.quadratic(int(selector[1]), f)
        return cls(f, [int(a) for a in selector])

    @property
    def f(self) -> int:
        return self.units.f

    @property
    def galois(self) -> FiniteAbelianGroup:
        return self.qmap.target

    @property
    def degree(self) -> int:
        return self.galois.order

    def frobenius(self, a: int) -> tuple[int, ...]:
        """Image of sigma_a in Gal(K/Q)."""
        return self.qmap(self.units.log(a))

    def characters(self) -> list[DirichletChar]:
        """Dirichlet characters mod f trivial on H (the characters of Gal(K/Q))."""
        return [c for c in self.units.characters() if c.trivial_on(self.H)]

    @cached_property
    def conductor(self) -> int:
        f = self.f
        for d in sorted(x for x in range(1, f + 1) if f % x == 0):
            K = self.units.reduction_kernel(d)
            if all(k in self.H for k in K.elements):
                return d
        return f  # pragma: no cover

    def ramified_primes(self) -> list[int]:
        return sorted(factorint(self.conductor))

    def descend(self, f2: int) -> "Subfield":
        """The same field viewed inside Q(mu_f2), for conductor | f2 | f."""
        if self.f % f2 or f2 % self.conductor:
            raise ValueError("f2 must lie between the conductor and f")
        U2 = unit_group(f2)
        return Subfield(f2, [a for a in U2.residues if any(b % f2 == a and self.units.log(b) in self.H
                                                               for b in self.units.residues)])

    def is_real(self) -> bool:
        return self.f <= 2 or self.units.log(-1 % self.f) in self.H
