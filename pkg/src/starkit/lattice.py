"""Integer lattices and ideals of Z[G] stored as G-stable lattices in Z^|G|."""

from __future__ import annotations

import json
from typing import Iterable, Sequence

from .groupring import FiniteAbelianGroup, GroupRingElement, Subgroup
from .intmat import HNFLattice, SNFResult, hnf, hnf_with_transform, invariant_factors, snf

__all__ = [
    "HNFLattice",
    "SNFResult",
    "GStableIdeal",
    "hnf",
    "hnf_with_transform",
    "snf",
    "invariant_factors",
    "ideal_from_generators",
    "ideal_sum",
    "ideal_product",
    "ideal_contains",
    "ideal_equal",
    "matrix_to_json",
    "matrix_from_json",
]


def _translates(G: FiniteAbelianGroup, vec: Sequence[int]) -> list[list[int]]:
    """Coordinates of g*x for every g in G, x given by its coefficient vector."""
    mt = G.mul_table
    n = G.order
    out = []
    for gi in range(n):
        row = [0] * n
        for hi, c in enumerate(vec):
            if c:
                row[mt[gi][hi]] = c
        out.append(row)
    return out


class GStableIdeal:
    """An ideal of Z[G], i.e. a G-stable sublattice of Z^|G| in canonical HNF."""

    __slots__ = ("group", "lattice")

    def __init__(self, group: FiniteAbelianGroup, lattice: HNFLattice, check: bool = True):
        if lattice.dim != group.order:
            raise ValueError("lattice dimension must equal |G|")
        self.group = group
        self.lattice = lattice
        if check:
            gens = group.generators()
            for b in lattice.basis:
                x = GroupRingElement.from_vector(group, b)
                for g in gens:
                    if x.act(g).int_vector() not in lattice:
                        raise ValueError("lattice is not G-stable")

    @classmethod
    def zero(cls, G: FiniteAbelianGroup) -> "GStableIdeal":
        return cls(G, HNFLattice.zero(G.order), check=False)

    @classmethod
    def unit(cls, G: FiniteAbelianGroup) -> "GStableIdeal":
        return cls(G, HNFLattice.full(G.order), check=False)

    @classmethod
    def from_generators(cls, G: FiniteAbelianGroup, gens: Iterable[GroupRingElement]) -> "GStableIdeal":
        rows = []
        for x in gens:
            if x.group != G:
                raise ValueError("group mismatch")
            if not x.is_integral():
                raise ValueError("ideal generators must have integer coefficients")
            rows.extend(_translates(G, x.int_vector()))
        return cls(G, hnf(rows, G.order), check=False)

    @classmethod
    def from_vectors(cls, G: FiniteAbelianGroup, vecs: Iterable[Sequence[int]]) -> "GStableIdeal":
        rows = []
        for v in vecs:
            rows.extend(_translates(G, v))
        return cls(G, hnf(rows, G.order), check=False)

    @classmethod
    def augmentation_ideal(cls, G: FiniteAbelianGroup, H: Subgroup | None = None) -> "GStableIdeal":
        """I(H)Z[G]; I(G) when H is omitted."""
        H = G.whole() if H is None else H
        return cls.from_generators(G, [G.ring_element(h) - 1 for h in H.gens])

    def _check(self, other: "GStableIdeal"):
        if self.group != other.group:
            raise ValueError(f"group mismatch: {self.group} vs {other.group}")

    def __add__(self, other: "GStableIdeal") -> "GStableIdeal":
        self._check(other)
        return GStableIdeal(self.group, self.lattice + other.lattice, check=False)

    def __mul__(self, other: "GStableIdeal") -> "GStableIdeal":
        self._check(other)
        G = self.group
        rows = []
        for a in self.lattice.basis:
            x = GroupRingElement.from_vector(G, a)
            for b in other.lattice.basis:
                rows.append((x * GroupRingElement.from_vector(G, b)).int_vector())
        return GStableIdeal(G, hnf(rows, G.order) if rows else HNFLattice.zero(G.order), check=False)

    def scale(self, x: GroupRingElement) -> "GStableIdeal":
        """The ideal x*I."""
        return self * GStableIdeal.from_generators(self.group, [x])

    def intersect(self, other: "GStableIdeal") -> "GStableIdeal":
        self._check(other)
        return GStableIdeal(self.group, self.lattice.intersect(other.lattice), check=False)

    def __contains__(self, x) -> bool:
        if isinstance(x, GroupRingElement):
            if x.group != self.group:
                raise ValueError("group mismatch")
            if not x.is_integral():
                return False
            x = x.int_vector()
        return list(x) in self.lattice

    def contains_ideal(self, other: "GStableIdeal") -> bool:
        self._check(other)
        return self.lattice.contains_lattice(other.lattice)

    def __le__(self, other: "GStableIdeal") -> bool:
        return other.contains_ideal(self)

    def __eq__(self, other):
        return isinstance(other, GStableIdeal) and self.group == other.group and self.lattice == other.lattice

    def __hash__(self):
        return hash((self.group, self.lattice))

    def sharp(self) -> "GStableIdeal":
        G = self.group
        inv = G.inv_table
        rows = []
        for b in self.lattice.basis:
            row = [0] * G.order
            for i, c in enumerate(b):
                row[inv[i]] = c
            rows.append(row)
        return GStableIdeal(G, hnf(rows, G.order) if rows else HNFLattice.zero(G.order), check=False)

    def basis_elements(self) -> list[GroupRingElement]:
        return [GroupRingElement.from_vector(self.group, b) for b in self.lattice.basis]

    def is_zero(self) -> bool:
        return self.lattice.rank == 0

    def is_unit(self) -> bool:
        return self.lattice.is_full()

    def index(self) -> int:
        """[Z[G] : I], or 0 if I has lower rank."""
        return self.lattice.index()

    def reduce(self, x: GroupRingElement) -> GroupRingElement:
        """Canonical representative of x modulo the ideal."""
        return GroupRingElement.from_vector(self.group, self.lattice.reduce(x.int_vector()))

    def __repr__(self):
        return f"GStableIdeal({list(self.group.orders)}, basis={[list(b) for b in self.lattice.basis]})"


def ideal_from_generators(gens: Sequence[GroupRingElement], group: FiniteAbelianGroup | None = None) -> GStableIdeal:
    if group is None:
        if not gens:
            raise ValueError("group required for an empty generator list")
        group = gens[0].group
    return GStableIdeal.from_generators(group, gens)


def ideal_sum(a: GStableIdeal, b: GStableIdeal) -> GStableIdeal:
    return a + b


def ideal_product(a: GStableIdeal, b: GStableIdeal) -> GStableIdeal:
    return a * b


def ideal_contains(a: GStableIdeal, x: GroupRingElement) -> bool:
    return x in a


def ideal_equal(a: GStableIdeal, b: GStableIdeal) -> bool:
    return a == b


def matrix_to_json(M: Sequence[Sequence[int]]) -> str:
    return json.dumps([[str(int(x)) for x in row] for row in M])


def matrix_from_json(text: str) -> list[list[int]]:
    data = json.loads(text)
    if not isinstance(data, list) or any(not isinstance(r, list) for r in data):
        raise ValueError("matrix JSON must be an array of arrays")
    rows = [[int(x) for x in r] for r in data]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows
