"""Finite abelian groups and their group rings R[G], R in {Z, Q, Q(zeta)}."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, prod
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .cyclo.field import CycloNumber
from .intmat import snf

Elem = tuple[int, ...]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class FiniteAbelianGroup:
    """G = Z/n_1 x ... x Z/n_k with elements as reduced exponent vectors."""

    def __init__(self, orders: Sequence[int]):
        orders = tuple(int(n) for n in orders)
        if any(n < 1 for n in orders):
            raise ValueError("cyclic orders must be >= 1")
        self.orders = orders

    def __repr__(self):
        return f"FiniteAbelianGroup({list(self.orders)})"

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.orders == other.orders

    def __hash__(self):
        return hash(("FAG", self.orders))

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        return prod(self.orders)

    @property
    def exponent(self) -> int:
        return reduce(_lcm, self.orders, 1)

    @property
    def identity(self) -> Elem:
        return (0,) * len(self.orders)

    @cached_property
    def elements(self) -> list[Elem]:
        return list(itertools.product(*(range(n) for n in self.orders)))

    @cached_property
    def index(self) -> dict[Elem, int]:
        return {g: i for i, g in enumerate(self.elements)}

    @cached_property
    def mul_table(self) -> list[list[int]]:
        """mul_table[i][j] = index of elements[i] + elements[j]."""
        return [[self.index[self.add(g, h)] for h in self.elements] for g in self.elements]

    @cached_property
    def inv_table(self) -> list[int]:
        return [self.index[self.neg(g)] for g in self.elements]

    def reduce(self, g: Sequence[int]) -> Elem:
        if len(g) != len(self.orders):
            raise ValueError(f"element {tuple(g)} has wrong length for {self}")
        return tuple(int(x) % n for x, n in zip(g, self.orders))

    def add(self, g: Elem, h: Elem) -> Elem:
        return tuple((a + b) % n for a, b, n in zip(g, h, self.orders))

    def neg(self, g: Elem) -> Elem:
        return tuple(-a % n for a, n in zip(g, self.orders))

    def scale(self, g: Elem, k: int) -> Elem:
        return tuple(a * k % n for a, n in zip(g, self.orders))

    def element_order(self, g: Elem) -> int:
        return reduce(_lcm, (n // gcd(a, n) for a, n in zip(g, self.orders)), 1)

    def generators(self) -> list[Elem]:
        return [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]

    def subgroup(self, gens: Iterable[Sequence[int]]) -> "Subgroup":
        gens = tuple(self.reduce(g) for g in gens)
        elems = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in elems:
                        elems.add(y)
                        nxt.append(y)
            frontier = nxt
        return Subgroup(self, gens, tuple(sorted(elems)))

    def trivial_subgroup(self) -> "Subgroup":
        return self.subgroup([])

    def whole(self) -> "Subgroup":
        return self.subgroup(self.generators())

    def subgroups(self) -> list["Subgroup"]:
        """All subgroups (by brute force; small groups only)."""
        seen = {}
        for a in self.elements:
            for b in self.elements:
                H = self.subgroup([a, b])
                seen.setdefault(H.elements, H)
        if self.rank > 2:
            for gens in itertools.combinations(self.elements, 3):
                H = self.subgroup(gens)
                seen.setdefault(H.elements, H)
        return sorted(seen.values(), key=lambda H: (H.order, H.elements))

    def quotient(self, H: "Subgroup") -> "QuotientMap":
        return QuotientMap(self, H)

    def characters(self) -> list["CharacterOfG"]:
        return [CharacterOfG(self, a) for a in self.elements]

    # group-ring constructors

    def ring_element(self, g: Sequence[int] | None = None, coeff=1) -> "GroupRingElement":
        g = self.identity if g is None else self.reduce(g)
        return GroupRingElement(self, {g: coeff})

    def one(self) -> "GroupRingElement":
        return self.ring_element()

    def zero(self) -> "GroupRingElement":
        return GroupRingElement(self, {})

    def norm_element(self, H: "Subgroup") -> "GroupRingElement":
        return norm_element(H)


@dataclass(frozen=True)
class Subgroup:
    group: FiniteAbelianGroup
    gens: tuple[Elem, ...]
    elements: tuple[Elem, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return tuple(g) in self.elements

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.group == other.group and self.elements == other.elements

    def __hash__(self):
        return hash((self.group, self.elements))

    def as_group(self) -> tuple[FiniteAbelianGroup, dict[Elem, Elem]]:
        """Abstract copy of H as a product of cyclic groups, with the embedding into G."""
        # H as Z^(#gens) / relations among the generators
        gens = list(self.gens) or [self.group.identity]
        k = len(gens)
        rels = []
        for coeffs in itertools.product(*(range(self.group.element_order(g)) for g in gens)):
            s = self.group.identity
            for c, g in zip(coeffs, gens):
                s = self.group.add(s, self.group.scale(g, c))
            if s == self.group.identity and any(coeffs):
                rels.append(list(coeffs))
        for i, g in enumerate(gens):
            rels.append([self.group.element_order(g) if j == i else 0 for j in range(k)])
        res = snf(rels)
        # new generators: columns of V^{-1} acting on old generators
        keep = [(i, d) for i, d in enumerate(res.diagonal) if d != 1]
        Vinv = _unimodular_inverse([list(r) for r in res.V])
        new_gens = []
        for i, _ in keep:
            s = self.group.identity
            for c, g in zip(Vinv[i], gens):
                s = self.group.add(s, self.group.scale(g, c))
            new_gens.append(s)
        Hgrp = FiniteAbelianGroup([d for _, d in keep])
        emb = {}
        for h in Hgrp.elements:
            s = self.group.identity
            for c, g in zip(h, new_gens):
                s = self.group.add(s, self.group.scale(g, c))
            emb[h] = s
        assert sorted(emb.values()) == list(self.elements)
        return Hgrp, emb


def _unimodular_inverse(V: list[list[int]]) -> list[list[int]]:
    n = len(V)
    A = [row[:] + [int(i == j) for j in range(n)] for i, row in enumerate(V)]
    for c in range(n):
        # Euclid down column c; det = +-1 keeps the pivot a unit
        while True:
            nz = [i for i in range(c, n) if A[i][c]]
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[c], A[p] = A[p], A[c]
            done = True
            for i in range(c + 1, n):
                if A[i][c]:
                    q = A[i][c] // A[c][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[c])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if A[c][c] < 0:
            A[c] = [-a for a in A[c]]
    for c in range(n - 1, -1, -1):
        assert A[c][c] == 1
        for i in range(c):
            if A[i][c]:
                q = A[i][c]
                A[i] = [a - q * b for a, b in zip(A[i], A[c])]
    return [row[n:] for row in A]


class QuotientMap:
    """The projection G -> G/H, with G/H realised as a product of cyclic groups."""

    def __init__(self, group: FiniteAbelianGroup, H: Subgroup):
        self.source = group
        self.subgroup = H
        k = group.rank
        rels = [[n if j == i else 0 for j in range(k)] for i, n in enumerate(group.orders)]
        rels += [list(h) for h in H.gens]
        if k == 0:
            self.target = FiniteAbelianGroup([])
            self._V, self._keep = [], []
        else:
            res = snf(rels)
            self._V = res.V
            self._keep = [(i, d) for i, d in enumerate(res.diagonal) if d != 1]
            self.target = FiniteAbelianGroup([d for _, d in self._keep])
        self._image = {g: self._project(g) for g in group.elements}
        lifts: dict[Elem, Elem] = {}
        for g in group.elements:
            lifts.setdefault(self._image[g], g)
        self._lifts = lifts
        assert len(lifts) * H.order == group.order

    def _project(self, g: Elem) -> Elem:
        xv = [sum(g[r] * self._V[r][c] for r in range(len(g))) for c in range(len(self._V))]
        return tuple(xv[i] % d for i, d in self._keep)

    def __call__(self, g: Sequence[int]) -> Elem:
        return self._image[self.source.reduce(g)]

    def lift(self, tau: Sequence[int]) -> Elem:
        """The smallest representative of the coset tau."""
        return self._lifts[self.target.reduce(tau)]

    def coset(self, tau: Sequence[int]) -> list[Elem]:
        t = self.target.reduce(tau)
        return [g for g in self.source.elements if self._image[g] == t]


def _normalize_coeff(c):
    if isinstance(c, CycloNumber):
        q = c.to_rational()
        if q is None:
            return c
        c = q
    if isinstance(c, bool):
        raise TypeError("boolean coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Rational):
        c = Fraction(c)
        return c.numerator if c.denominator == 1 else c
    raise TypeError(f"unsupported coefficient {c!r}")


class GroupRingElement:
    """Element of R[G] with a canonical sparse coefficient map (no zero entries)."""

    __slots__ = ("group", "coeffs", "_hash")

    def __init__(self, group: FiniteAbelianGroup, coeffs: Mapping[Sequence[int], object] | None = None):
        self.group = group
        clean: dict[Elem, object] = {}
        for g, c in (coeffs or {}).items():
            g = group.reduce(g)
            c = _normalize_coeff(c)
            if g in clean:
                c = _normalize_coeff(clean[g] + c)
            if c == 0:
                clean.pop(g, None)
            else:
                clean[g] = c
        self.coeffs = clean
        self._hash = None

    @classmethod
    def from_vector(cls, group: FiniteAbelianGroup, vec: Sequence) -> "GroupRingElement":
        return cls(group, {g: c for g, c in zip(group.elements, vec) if c})

    @property
    def ring(self) -> str:
        """Smallest of 'ZZ', 'QQ', 'cyclo' containing every coefficient."""
        tags = {type(c) for c in self.coeffs.values()}
        if CycloNumber in tags:
            return "cyclo"
        if Fraction in tags:
            return "QQ"
        return "ZZ"

    def is_integral(self) -> bool:
        return self.ring == "ZZ"

    def to_vector(self) -> list:
        return [self.coeffs.get(g, 0) for g in self.group.elements]

    def int_vector(self) -> list[int]:
        if not self.is_integral():
            raise ValueError("element has non-integral coefficients")
        return [self.coeffs.get(g, 0) for g in self.group.elements]

    def __getitem__(self, g) -> object:
        return self.coeffs.get(self.group.reduce(g), 0)

    def _check(self, other: "GroupRingElement"):
        if self.group != other.group:
            raise ValueError(f"group mismatch: {self.group} vs {other.group}")

    def _coerce(self, other):
        if isinstance(other, GroupRingElement):
            self._check(other)
            return other
        if isinstance(other, (int, Rational, CycloNumber)):
            return self.group.ring_element(coeff=other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out[g] + c if g in out else c
        return GroupRingElement(self.group, out)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement(self.group, {g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational, CycloNumber)):
            return GroupRingElement(self.group, {g: c * other for g, c in self.coeffs.items()})
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        self._check(other)
        G = self.group
        out: dict[Elem, object] = {}
        for g, a in self.coeffs.items():
            for h, b in other.coeffs.items():
                k = G.add(g, h)
                out[k] = out[k] + a * b if k in out else a * b
        return GroupRingElement(G, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        out = self.group.one()
        for _ in range(n):
            out = out * self
        return out

    def __truediv__(self, q):
        return self * (Fraction(1) / Fraction(q)) if not isinstance(q, CycloNumber) else self * q.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            other = self.group.ring_element(coeff=other)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.group == other.group and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.group, frozenset(self.coeffs.items())))
        return self._hash

    def is_zero(self) -> bool:
        return not self.coeffs

    def sharp(self) -> "GroupRingElement":
        """The involution induced by g -> g^{-1}."""
        G = self.group
        return GroupRingElement(G, {G.neg(g): c for g, c in self.coeffs.items()})

    def act(self, g: Sequence[int]) -> "GroupRingElement":
        """Multiplication by the group element g."""
        G = self.group
        g = G.reduce(g)
        return GroupRingElement(G, {G.add(g, h): c for h, c in self.coeffs.items()})

    def augmentation(self):
        return _normalize_coeff(sum(self.coeffs.values(), 0))

    def deflate(self, qmap: QuotientMap) -> "GroupRingElement":
        """Image under Z[G] -> Z[G/H]."""
        if qmap.source != self.group:
            raise ValueError("quotient map is for a different group")
        out: dict[Elem, object] = {}
        for g, c in self.coeffs.items():
            t = qmap(g)
            out[t] = out[t] + c if t in out else c
        return GroupRingElement(qmap.target, out)

    def map_coefficients(self, f) -> "GroupRingElement":
        return GroupRingElement(self.group, {g: f(c) for g, c in self.coeffs.items()})

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for g in sorted(self.coeffs):
            c = self.coeffs[g]
            label = "1" if not any(g) else "g" + str(list(g))
            terms.append(f"({c})*{label}")
        return " + ".join(terms)

    # serialization

    def to_json_obj(self) -> dict:
        terms = []
        for g in sorted(self.coeffs):
            c = self.coeffs[g]
            if isinstance(c, CycloNumber):
                raise ValueError("JSON form only covers rational coefficients")
            c = Fraction(c)
            terms.append({"g": list(g), "num": str(c.numerator), "den": str(c.denominator)})
        return {"group": list(self.group.orders), "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "GroupRingElement":
        G = FiniteAbelianGroup(obj["group"])
        return cls(G, {tuple(t["g"]): Fraction(int(t["num"]), int(t["den"])) for t in obj["terms"]})

    @classmethod
    def from_json(cls, text: str) -> "GroupRingElement":
        return cls.from_json_obj(json.loads(text))


def ring_mul(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    return x * y


def involution_sharp(x: GroupRingElement) -> GroupRingElement:
    return x.sharp()


def norm_element(H: Subgroup) -> GroupRingElement:
    """N_H = sum of the elements of H."""
    return GroupRingElement(H.group, {h: 1 for h in H.elements})


def deflate(x: GroupRingElement, H: Subgroup) -> GroupRingElement:
    return x.deflate(QuotientMap(x.group, H))


def augmentation_ideal_generators(H: Subgroup) -> list[GroupRingElement]:
    """h - 1 for h in the generators of H (generate I(H)Z[G] as an ideal)."""
    G = H.group
    return [G.ring_element(h) - 1 for h in (H.gens or [])]


class CharacterOfG:
    """chi(e_i) = zeta_{n_i}^{a_i} on the i-th cyclic factor."""

    __slots__ = ("group", "exps")

    def __init__(self, group: FiniteAbelianGroup, exps: Sequence[int]):
        self.group = group
        self.exps = group.reduce(exps)

    def __eq__(self, other):
        return isinstance(other, CharacterOfG) and self.group == other.group and self.exps == other.exps

    def __hash__(self):
        return hash((self.group, self.exps))

    def __repr__(self):
        return f"CharacterOfG({list(self.group.orders)}, {list(self.exps)})"

    def exponent_of(self, g: Sequence[int]) -> int:
        """k with chi(g) = zeta_E^k, E = exponent of G."""
        E = self.group.exponent
        return sum(a * x * (E // n) for a, x, n in zip(self.exps, g, self.group.orders)) % E

    def __call__(self, g: Sequence[int]) -> CycloNumber:
        E = self.group.exponent
        return CycloNumber.zeta(E, self.exponent_of(self.group.reduce(g)))

    def is_trivial(self) -> bool:
        return not any(self.exps)

    @property
    def order(self) -> int:
        return self.group.element_order(self.exps)

    def inverse(self) -> "CharacterOfG":
        return CharacterOfG(self.group, self.group.neg(self.exps))

    def __mul__(self, other: "CharacterOfG") -> "CharacterOfG":
        return CharacterOfG(self.group, self.group.add(self.exps, other.exps))

    def kernel(self) -> Subgroup:
        return self.group.subgroup([g for g in self.group.elements if self.exponent_of(g) == 0])

    def idempotent(self) -> GroupRingElement:
        """e_chi = |G|^{-1} sum_g chi(g) g^{-1}."""
        G = self.group
        n = G.order
        return GroupRingElement(G, {G.neg(g): self(g) / n for g in G.elements})


def character_apply(chi: CharacterOfG, x: GroupRingElement):
    """sum_g x_g chi(g), returned as a CycloNumber (or rational when it is one)."""
    if chi.group != x.group:
        raise ValueError("group mismatch")
    total = CycloNumber.rational(0, chi.group.exponent)
    for g, c in x.coeffs.items():
        total = total + chi(g) * c
    return _normalize_coeff(total) if total.to_rational() is not None else total
