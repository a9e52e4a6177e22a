"""Exterior powers over Z[G], Rubin lattices, and the maps N_H, nu, Phi^H.

Wedges are stored in coordinates of a free module P = Z[G]^d with basis
b_1..b_d: an element of Q (x) wedge^r P is a map from increasing r-tuples mu
to Q[G] coefficients x_mu of b_mu = b_mu(1) ^ ... ^ b_mu(r).  A G-lattice M
comes with an embedding into such a P, so wedges of M live there too.
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .groupring import FiniteAbelianGroup, GroupRingElement, QuotientMap, Subgroup, norm_element
from .intmat import HNFLattice, hnf, hnf_with_transform, snf
from .lattice import GStableIdeal

PVector = list  # list of d GroupRingElements


# ---------------------------------------------------------------- helpers


def _perm_sign(seq: Sequence[int]) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def det(mat: Sequence[Sequence[GroupRingElement]], G: FiniteAbelianGroup) -> GroupRingElement:
    """Determinant over the commutative ring Q[G] by cofactor expansion."""
    n = len(mat)
    if n == 0:
        return G.one()
    if n == 1:
        return mat[0][0]
    total = G.zero()
    for j in range(n):
        if mat[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * det(minor, G)
        total = total + term if j % 2 == 0 else total - term
    return total


def _regular_matrix(G: FiniteAbelianGroup, g) -> list[list[int]]:
    """Matrix of multiplication by g on Z[G] in the element basis (column vectors)."""
    n = G.order
    gi = G.index[G.reduce(g)]
    M = [[0] * n for _ in range(n)]
    for h in range(n):
        M[G.mul_table[gi][h]][h] = 1
    return M


def _matvec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def pvector_to_z(G: FiniteAbelianGroup, v: Sequence[GroupRingElement]) -> list:
    out = []
    for x in v:
        out.extend(x.to_vector())
    return out


def z_to_pvector(G: FiniteAbelianGroup, z: Sequence, d: int) -> PVector:
    k = G.order
    return [GroupRingElement.from_vector(G, z[i * k:(i + 1) * k]) for i in range(d)]


def norm_quotient(z: GroupRingElement, qmap: QuotientMap) -> GroupRingElement:
    """The isomorphism Z[G]^H -> Z[G/H] sending N_H to 1.

    Raises if z is not H-invariant.
    """
    G = z.group
    out = {}
    for tau in qmap.target.elements:
        vals = {z[g] for g in qmap.coset(tau)}
        if len(vals) != 1:
            raise ValueError("element is not H-invariant")
        out[tau] = vals.pop()
    return GroupRingElement(qmap.target, out)


# ---------------------------------------------------------------- G-lattices


class GLattice:
    """A Z-free G-module of rank n, given by integer action matrices.

    action[i] is the matrix (on column vectors) of the i-th cyclic generator
    of G.  `embedding` (optional) lists, for each Z-basis vector, its image in
    P = Z[G]^d in Z-coordinates (index k*|G| + index of h for h*b_k).
    """

    def __init__(self, group: FiniteAbelianGroup, rank: int, action: Sequence[Sequence[Sequence[int]]],
                 embedding: Sequence[Sequence[int]] | None = None, free_rank: int | None = None):
        self.group = group
        self.rank = rank
        self.action = [[list(map(int, r)) for r in A] for A in action]
        if len(self.action) != group.rank:
            raise ValueError("one action matrix per cyclic generator required")
        Id = _identity(rank)
        for A, n in zip(self.action, group.orders):
            P = Id
            for _ in range(n):
                P = _matmul(A, P)
            if P != Id:
                raise ValueError("action matrix order does not divide the generator order")
        for A, B in itertools.combinations(self.action, 2):
            if _matmul(A, B) != _matmul(B, A):
                raise ValueError("action matrices must commute")
        self._mats = {}
        self.embedding = None
        self.d = None
        if embedding is not None:
            self._set_embedding(embedding, free_rank)

    def _set_embedding(self, E, d):
        G = self.group
        E = [list(map(int, r)) for r in E]
        if d is None:
            d = len(E[0]) // G.order if E else 0
        if any(len(r) != d * G.order for r in E) or len(E) != self.rank:
            raise ValueError("embedding has the wrong shape")
        # equivariance: E(g x) = g E(x) on generators
        for gen, A in zip(G.generators(), self.action):
            for i in range(self.rank):
                img = [0] * (d * G.order)
                for j in range(self.rank):
                    if A[j][i]:
                        img = [a + A[j][i] * b for a, b in zip(img, E[j])]
                moved = pvector_to_z(G, [x.act(gen) for x in z_to_pvector(G, E[i], d)])
                if img != moved:
                    raise ValueError("embedding is not G-equivariant")
        if self.rank:
            diag = snf(E).diagonal
            if any(x != 1 for x in diag[:self.rank]):
                raise ValueError("embedding must be injective with Z-torsion-free cokernel")
        self.embedding = E
        self.d = d

    # constructors

    @classmethod
    def free(cls, G: FiniteAbelianGroup, d: int) -> "GLattice":
        """Z[G]^d with Z-basis h*b_k (k-major), embedded by the identity."""
        k = G.order
        action = []
        for gen in G.generators():
            R = _regular_matrix(G, gen)
            A = [[0] * (d * k) for _ in range(d * k)]
            for blk in range(d):
                for i in range(k):
                    for j in range(k):
                        A[blk * k + i][blk * k + j] = R[i][j]
            action.append(A)
        return cls(G, d * k, action, _identity(d * k), d)

    @classmethod
    def submodule_of_free(cls, G: FiniteAbelianGroup, d: int, gens: Iterable[Sequence[GroupRingElement]]) -> "GLattice":
        """The Z[G]-span of `gens` inside Z[G]^d (must have Z-torsion-free cokernel)."""
        k = G.order
        rows = []
        for v in gens:
            if len(v) != d:
                raise ValueError("generator has the wrong length")
            for g in G.elements:
                rows.append(pvector_to_z(G, [x.act(g) for x in v]))
        L = hnf(rows, d * k) if rows else HNFLattice.zero(d * k)
        basis = [list(b) for b in L.basis]
        n = len(basis)
        action = []
        for gen in G.generators():
            A = [[0] * n for _ in range(n)]
            for i, b in enumerate(basis):
                moved = pvector_to_z(G, [x.act(gen) for x in z_to_pvector(G, b, d)])
                coords = L.coordinates(moved)
                for j, c in enumerate(coords):
                    A[j][i] = c
            action.append(A)
        return cls(G, n, action, basis, d)

    @classmethod
    def augmentation_ideal(cls, G: FiniteAbelianGroup) -> "GLattice":
        return cls.submodule_of_free(G, 1, [[G.ring_element(g) - 1] for g in G.generators()])

    @classmethod
    def trivial(cls, G: FiniteAbelianGroup) -> "GLattice":
        """Z with trivial action, embedded as Z*N_G in Z[G]."""
        return cls.submodule_of_free(G, 1, [[norm_element(G.whole())]])

    # action

    def matrix_of(self, g) -> list[list[int]]:
        g = self.group.reduce(g)
        if g not in self._mats:
            M = _identity(self.rank)
            for A, e in zip(self.action, g):
                for _ in range(e):
                    M = _matmul(A, M)
            self._mats[g] = M
        return self._mats[g]

    def act(self, g, v: Sequence) -> list:
        return _matvec(self.matrix_of(g), v)

    def to_free(self, v: Sequence) -> PVector:
        """Image in P of a vector of Z-coordinates (rational allowed)."""
        if self.embedding is None:
            raise ValueError("lattice has no embedding into a free module")
        z = [0] * (self.d * self.group.order)
        for c, row in zip(v, self.embedding):
            if c:
                z = [a + c * b for a, b in zip(z, row)]
        return z_to_pvector(self.group, z, self.d)

    def invariants(self, H: Subgroup) -> list[list[int]]:
        """Z-basis of M^H in Z-coordinates."""
        n = self.rank
        if not H.gens:
            return _identity(n)
        blocks = []
        for h in H.gens:
            A = self.matrix_of(h)
            blocks.extend([[A[i][j] - int(i == j) for j in range(n)] for i in range(n)])
        # v with B v = 0 is a left-kernel vector of B^T
        BT = [list(col) for col in zip(*blocks)]
        _, _, kernel = hnf_with_transform(BT)
        return [list(v) for v in kernel]


# ---------------------------------------------------------------- duals


class EquivariantMap:
    """f in Hom_G(M, Z[G]) as a |G| x n integer matrix: f(x) = F x in element coordinates."""

    def __init__(self, lattice: GLattice, F: Sequence[Sequence[int]]):
        self.lattice = lattice
        self.F = [list(r) for r in F]

    def __call__(self, v: Sequence) -> GroupRingElement:
        return GroupRingElement.from_vector(self.lattice.group, _matvec(self.F, v))

    def functional(self) -> list[int]:
        """The coefficient-of-identity functional (a Z-linear form on M)."""
        return list(self.F[0])

    def is_equivariant(self) -> bool:
        G = self.lattice.group
        for gen, A in zip(G.generators(), self.lattice.action):
            if _matmul(self.F, A) != _matmul(_regular_matrix(G, gen), self.F):
                return False
        return True

    def lift_to_free(self) -> "FreeMap":
        """An equivariant extension to P (exists integrally since P/M is Z-torsion-free)."""
        M = self.lattice
        G = M.group
        E = M.embedding
        if E is None:
            raise ValueError("lattice has no embedding")
        ell = self.functional()
        dim = M.d * G.order
        if M.rank:
            res = snf(E)
            # U E V = [I | 0]; take L = V (U ell, 0)
            Ul = _matvec(res.U, ell)
            y = Ul + [0] * (dim - M.rank)
            L = _matvec(res.V, y)
        else:
            L = [0] * dim
        k = G.order
        values = []
        for blk in range(M.d):
            out = {}
            for g in G.elements:
                # coefficient of g in f(b_blk) = L(g^{-1} b_blk)
                out[g] = L[blk * k + G.index[G.neg(g)]]
            values.append(GroupRingElement(G, out))
        return FreeMap(G, values)


class HomBasis:
    """Z-basis of Hom_G(M, Z[G]) obtained by solving the equivariance system."""

    def __init__(self, lattice: GLattice, maps: list[EquivariantMap]):
        self.lattice = lattice
        self.maps = maps

    def __len__(self):
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    def __getitem__(self, i):
        return self.maps[i]


def hom_dual(M: GLattice) -> HomBasis:
    """Solve F A_g = R_g F over Z.

    Unknowns are ordered with the identity row of F first, so the canonical
    HNF basis of the solution lattice is the one whose identity rows are the
    standard dual basis of M (the identity-row projection is bijective).
    """
    G = M.group
    k, n = G.order, M.rank
    nvar = k * n
    # variable index: row r of F (element index r), column c -> r*n + c
    eqs_per_var = [[] for _ in range(nvar)]
    for gen, A in zip(G.generators(), M.action):
        R = _regular_matrix(G, gen)
        # (F A - R F)[r][c] = sum_j F[r][j] A[j][c] - sum_s R[r][s] F[s][c]
        for r in range(k):
            for c in range(n):
                coeffs = {}
                for j in range(n):
                    if A[j][c]:
                        coeffs[r * n + j] = coeffs.get(r * n + j, 0) + A[j][c]
                for s in range(k):
                    if R[r][s]:
                        coeffs[s * n + c] = coeffs.get(s * n + c, 0) - R[r][s]
                for var in range(nvar):
                    eqs_per_var[var].append(coeffs.get(var, 0))
    if not eqs_per_var or not eqs_per_var[0]:
        kernel = _identity(nvar)
    else:
        _, _, kernel = hnf_with_transform(eqs_per_var)
    L = hnf(kernel, nvar) if kernel else HNFLattice.zero(nvar)
    assert L.rank == n and all(L.basis[i][i] == 1 for i in range(n)), "identity-row projection not bijective"
    maps = []
    for row in L.basis:
        F = [list(row[r * n:(r + 1) * n]) for r in range(k)]
        f = EquivariantMap(M, F)
        assert f.is_equivariant()
        maps.append(f)
    return HomBasis(M, maps)


class FreeMap:
    """f in Hom_G(Z[G]^d, Q[G]) given by its values on the basis."""

    def __init__(self, group: FiniteAbelianGroup, values: Sequence[GroupRingElement]):
        self.group = group
        self.values = list(values)

    @classmethod
    def dual_basis(cls, G: FiniteAbelianGroup, d: int, k: int) -> "FreeMap":
        return cls(G, [G.one() if i == k else G.zero() for i in range(d)])

    def __call__(self, v: Sequence[GroupRingElement]) -> GroupRingElement:
        total = self.group.zero()
        for c, f in zip(v, self.values):
            if not c.is_zero() and not f.is_zero():
                total = total + c * f
        return total

    def deflate(self, qmap: QuotientMap) -> "FreeMap":
        """phi^H on P^H = Z[G/H]^d with basis N_H b_k: N_H b_k -> image of phi(b_k)."""
        return FreeMap(qmap.target, [v.deflate(qmap) for v in self.values])


# ---------------------------------------------------------------- wedges


class Wedge:
    """Element of Q (x) wedge^r_G Z[G]^d in the basis b_mu, mu increasing."""

    def __init__(self, group: FiniteAbelianGroup, d: int, r: int,
                 coeffs: Mapping[Sequence[int], GroupRingElement] | None = None):
        self.group, self.d, self.r = group, d, r
        clean = {}
        for mu, x in (coeffs or {}).items():
            mu = tuple(mu)
            if len(mu) != r or any(not 0 <= i < d for i in mu) or len(set(mu)) != r:
                raise ValueError(f"bad wedge index {mu}")
            if not isinstance(x, GroupRingElement):
                x = group.ring_element(coeff=x)
            sign = _perm_sign(mu)
            key = tuple(sorted(mu))
            val = clean.get(key, group.zero()) + x * sign
            if val.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = val
        self.coeffs = clean

    @classmethod
    def basis(cls, G, d, mu) -> "Wedge":
        return cls(G, d, len(mu), {tuple(mu): G.one()})

    @classmethod
    def of_vectors(cls, G: FiniteAbelianGroup, vectors: Sequence[Sequence[GroupRingElement]], d: int | None = None) -> "Wedge":
        """m_1 ^ ... ^ m_r: the mu-coordinate is the r x r minor on rows mu."""
        r = len(vectors)
        if d is None:
            if not vectors:
                raise ValueError("d is required for the empty wedge")
            d = len(vectors[0])
        coeffs = {}
        for mu in itertools.combinations(range(d), r):
            x = det([[vectors[j][i] for j in range(r)] for i in mu], G)
            if not x.is_zero():
                coeffs[mu] = x
        return cls(G, d, r, coeffs)

    def _check(self, other: "Wedge"):
        if (self.group, self.d, self.r) != (other.group, other.d, other.r):
            raise ValueError("wedge degree or ambient mismatch")

    def __add__(self, other: "Wedge") -> "Wedge":
        self._check(other)
        out = dict(self.coeffs)
        for mu, x in other.coeffs.items():
            out[mu] = out.get(mu, self.group.zero()) + x
        return Wedge(self.group, self.d, self.r, out)

    def __neg__(self):
        return Wedge(self.group, self.d, self.r, {mu: -x for mu, x in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Wedge":
        return Wedge(self.group, self.d, self.r, {mu: x * c for mu, x in self.coeffs.items()})

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other):
        return isinstance(other, Wedge) and (self.group, self.d, self.r) == (other.group, other.d, other.r) \
            and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.group, self.d, self.r, frozenset(self.coeffs.items())))

    def __repr__(self):
        return f"Wedge(r={self.r}, {dict(self.coeffs)})"

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(x.is_integral() for x in self.coeffs.values())

    def coordinate(self, mu) -> GroupRingElement:
        return self.coeffs.get(tuple(mu), self.group.zero())

    def z_vector(self) -> list:
        """Flattened coordinates over (mu, g), mu in lexicographic order."""
        out = []
        for mu in itertools.combinations(range(self.d), self.r):
            out.extend(self.coordinate(mu).to_vector())
        return out

    def contract(self, f: FreeMap) -> "Wedge":
        """The map wedge^r -> wedge^(r-1): sum_i (-1)^(i-1) f(m_i) m_1..^i..m_r on basis wedges."""
        if self.r == 0:
            raise ValueError("cannot contract a degree-0 element")
        out = {}
        G = self.group
        for mu, x in self.coeffs.items():
            for i, idx in enumerate(mu):
                val = f.values[idx]
                if val.is_zero():
                    continue
                rest = mu[:i] + mu[i + 1:]
                term = x * val * (-1) ** i
                out[rest] = out.get(rest, G.zero()) + term
        return Wedge(G, self.d, self.r - 1, out)

    def to_json_obj(self) -> dict:
        return {"group": list(self.group.orders), "d": self.d, "r": self.r,
                "coords": [[list(mu), x.to_json_obj()] for mu, x in sorted(self.coeffs.items())]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Wedge":
        G = FiniteAbelianGroup(obj["group"])
        coeffs = {tuple(mu): GroupRingElement.from_json_obj(x) for mu, x in obj["coords"]}
        return cls(G, int(obj["d"]), int(obj["r"]), coeffs)

    def scalar(self) -> GroupRingElement:
        if self.r != 0:
            raise ValueError("not a degree-0 element")
        return self.coordinate(())


def wedge_eval(maps: Sequence[FreeMap], m: Wedge) -> Wedge:
    """(f_1 ^ ... ^ f_s)(m) via the shuffle-determinant formula, extended linearly."""
    s = len(maps)
    if s > m.r:
        raise ValueError("more maps than the wedge degree")
    G = m.group
    out = Wedge(G, m.d, m.r - s)
    for mu, x in m.coeffs.items():
        out = out + wedge_eval_vectors(maps, [_basis_vector(G, m.d, i) for i in mu], m.d, G).scale(x)
    return out


def wedge_eval_vectors(maps: Sequence[FreeMap], vectors: Sequence[PVector], d: int,
                       group: FiniteAbelianGroup | None = None) -> Wedge:
    """sum over shuffles sigma of sgn(sigma) m_sigma(s+1) ^..^ m_sigma(r) * det(f_i(m_sigma(j)))."""
    G = group or (maps[0].group if maps else vectors[0][0].group)
    r, s = len(vectors), len(maps)
    out = Wedge(G, d, r - s)
    for first in itertools.combinations(range(r), s):
        rest = [j for j in range(r) if j not in first]
        sign = _perm_sign(list(first) + rest)
        D = det([[maps[i](vectors[j]) for j in first] for i in range(s)], G)
        if D.is_zero():
            continue
        w = Wedge.of_vectors(G, [vectors[j] for j in rest], d) if rest else Wedge(G, d, 0, {(): G.one()})
        out = out + w.scale(D * sign)
    return out


def wedge_eval_iterated(maps: Sequence[FreeMap], m: Wedge) -> Wedge:
    """f_s o ... o f_1 applied by repeated contraction (f_1 first)."""
    for f in maps:
        m = m.contract(f)
    return m


def _basis_vector(G, d, i) -> PVector:
    return [G.one() if j == i else G.zero() for j in range(d)]


def evaluate(maps: Sequence[FreeMap], m: Wedge) -> GroupRingElement:
    """Phi(m) in Q[G] for r = s."""
    if len(maps) != m.r:
        raise ValueError("degree mismatch")
    return wedge_eval(maps, m).scalar()


# ---------------------------------------------------------------- Rubin lattice


def _wedge_span_lattice(M: GLattice, r: int) -> HNFLattice:
    """Z-lattice spanned by G-translates of wedges of r Z-basis vectors of M (inside wedge^r P)."""
    G = M.group
    basis_p = [M.to_free(row) for row in _identity(M.rank)]
    rows = []
    for idx in itertools.combinations(range(M.rank), r):
        w = Wedge.of_vectors(G, [basis_p[i] for i in idx], M.d)
        for g in G.elements:
            rows.append(w.scale(G.ring_element(g)).z_vector())
    dim = comb(M.d, r) * G.order
    return hnf(rows, dim) if rows else HNFLattice.zero(dim)


def in_rational_span(M: GLattice, m: Wedge) -> bool:
    """m lies in Q (x) wedge^r_G M (viewed inside Q (x) wedge^r_G P)."""
    if m.d != M.d:
        raise ValueError("ambient mismatch")
    return _wedge_span_lattice(M, m.r).rational_contains(m.z_vector())


def rubin_contains(M: GLattice, r: int, m: Wedge) -> bool:
    """Membership in the r-th Rubin lattice, as (Q wedge^r M) cap wedge^r P."""
    if M.embedding is None:
        raise ValueError("an embedding into a free module is required")
    if m.r != r:
        raise ValueError("degree mismatch")
    return m.is_integral() and in_rational_span(M, m)


def rubin_contains_by_definition(M: GLattice, r: int, m: Wedge) -> bool:
    """Phi(m) integral for every Phi in wedge^r Hom_G(M, Z[G]); m must lie in Q wedge^r M.

    The Z-module wedge^r Hom is spanned by wedges of r Z-basis maps, so a
    finite check suffices.
    """
    if not in_rational_span(M, m):
        return False
    lifts = [f.lift_to_free() for f in hom_dual(M)]
    for idx in itertools.combinations(range(len(lifts)), r):
        if not evaluate([lifts[i] for i in idx], m).is_integral():
            return False
    return True


# ---------------------------------------------------------------- N_H, nu, Phi^H


class NormTarget:
    """Z[H]/I(H)J for a subgroup H of G and an ideal J of Z[H].

    H is realised abstractly (H_group) with an embedding into G.  Elements are
    canonical integer vectors modulo the lattice of I(H)J.
    """

    def __init__(self, H: Subgroup, J: GStableIdeal | None = None):
        self.H = H
        self.Hgrp, self.emb = H.as_group()
        self.inv_emb = {g: h for h, g in self.emb.items()}
        if J is None:
            J = GStableIdeal.unit(self.Hgrp)
        if J.group != self.Hgrp:
            raise ValueError("J must be an ideal of the group ring of H (as returned by as_group)")
        self.J = J
        self.IJ = GStableIdeal.augmentation_ideal(self.Hgrp) * J

    def element_of(self, sigma) -> list[int]:
        """Image of sigma in H (a group element of G) as a reduced vector."""
        v = [0] * self.Hgrp.order
        v[self.Hgrp.index[self.inv_emb[tuple(sigma)]]] = 1
        return list(self.IJ.lattice.reduce(v))

    def reduce(self, v) -> tuple[int, ...]:
        return self.IJ.lattice.reduce(v)

    def in_J(self, v) -> bool:
        return list(v) in self.J.lattice

    def to_G(self, v) -> GroupRingElement:
        """iota: Z[H] -> Z[G]."""
        G = self.H.group
        return GroupRingElement(G, {self.emb[h]: c for h, c in zip(self.Hgrp.elements, v) if c})

    def J_in_G(self) -> GStableIdeal:
        """The ideal J Z[G]."""
        G = self.H.group
        return GStableIdeal.from_generators(G, [self.to_G(b) for b in self.J.lattice.basis])

    def IJ_in_G(self) -> GStableIdeal:
        """I(H) J Z[G]."""
        G = self.H.group
        return GStableIdeal.from_generators(G, [self.to_G(b) for b in self.IJ.lattice.basis])


class TensorElement:
    """Element of (wedge^r_G P) (x)_Z Z[H]/I(H)J, keyed by (mu, g) for the Z-basis g*b_mu."""

    def __init__(self, target: NormTarget, d: int, r: int, comps: Mapping[tuple, Sequence[int]]):
        self.target, self.d, self.r = target, d, r
        clean = {}
        for key, v in comps.items():
            red = target.reduce(v)
            if any(red):
                clean[key] = red
        self.comps = clean

    def __eq__(self, other):
        return isinstance(other, TensorElement) and self.comps == other.comps and self.r == other.r

    def __repr__(self):
        return f"TensorElement({self.comps})"

    def component(self, mu, g) -> tuple[int, ...]:
        return self.comps.get((tuple(mu), tuple(g)), (0,) * self.target.Hgrp.order)


def norm_tensor(m: Wedge, H: Subgroup, J: GStableIdeal | None = None) -> TensorElement:
    """N_H(m) = sum_{sigma in H} sigma m (x) sigma^{-1}, for integral m."""
    if not m.is_integral():
        raise ValueError("N_H is defined on integral elements")
    target = NormTarget(H, J)
    G = m.group
    k = target.Hgrp.order
    acc: dict[tuple, list[int]] = {}
    for mu, x in m.coeffs.items():
        for g, c in x.coeffs.items():
            for sigma in H.elements:
                key = (mu, G.add(sigma, g))
                vec = acc.setdefault(key, [0] * k)
                e = target.element_of(G.neg(sigma))
                for i in range(k):
                    vec[i] += c * e[i]
    return TensorElement(target, m.d, m.r, acc)


class QuotientWedge:
    """Element of Q (x) wedge^r_{G/H} P^H in the basis (N_H b)_mu, coefficients in Q[G/H]."""

    def __init__(self, qmap: QuotientMap, d: int, r: int, coeffs: Mapping[tuple, GroupRingElement]):
        self.qmap, self.d, self.r = qmap, d, r
        self.inner = Wedge(qmap.target, d, r, coeffs)

    @property
    def coeffs(self):
        return self.inner.coeffs


def norm_power(m: Wedge, qmap: QuotientMap) -> QuotientWedge:
    """N_H^r: Q wedge^r_G P -> Q wedge^r_{G/H} P^H, x_mu b_mu -> pi(x_mu) (N_H b)_mu."""
    return QuotientWedge(qmap, m.d, m.r, {mu: x.deflate(qmap) for mu, x in m.coeffs.items()})


def phi_restrict(maps: Sequence[FreeMap], qmap: QuotientMap) -> list[FreeMap]:
    """Phi^H: each phi becomes phi^H on P^H (basis N_H b_k), i.e. deflated values."""
    return [f.deflate(qmap) for f in maps]


def evaluate_restricted(maps_H: Sequence[FreeMap], alpha: QuotientWedge) -> GroupRingElement:
    return evaluate(maps_H, alpha.inner)


def nu_map(alpha: QuotientWedge) -> Wedge:
    """nu on free modules: tau * (N_H b)_mu -> N_H * lift(tau) * b_mu."""
    q = alpha.qmap
    G = q.source
    NH = norm_element(q.subgroup)
    out = {}
    for mu, x in alpha.coeffs.items():
        acc = G.zero()
        for tau, c in x.coeffs.items():
            acc = acc + NH.act(q.lift(tau)) * c
        out[mu] = acc
    return Wedge(G, alpha.d, alpha.r, out)


def xi_map(alpha: QuotientWedge) -> Wedge:
    """The map induced by P^H in P: wedge the actual vectors N_H lift(tau) b_mu(i) in P."""
    q = alpha.qmap
    G = q.source
    NH = norm_element(q.subgroup)
    d, r = alpha.d, alpha.r
    out = Wedge(G, d, r)
    for mu, x in alpha.coeffs.items():
        for tau, c in x.coeffs.items():
            vecs = []
            for pos, i in enumerate(mu):
                scal = NH.act(q.lift(tau)) if pos == 0 else NH
                vecs.append([scal if j == i else G.zero() for j in range(d)])
            w = Wedge.of_vectors(G, vecs, d) if r else Wedge(G, d, 0, {(): NH.act(q.lift(tau))})
            out = out + w.scale(c)
    return out


def nu_scaling_exponent(r: int) -> int:
    return max(0, r - 1)


def in_image_of_nu(t: TensorElement, qmap: QuotientMap) -> bool:
    """t lies in (N_H wedge^r P) (x) J_H: constant along H-cosets with values in J_H."""
    return _nu_preimage(t, qmap) is not None


def _nu_preimage(t: TensorElement, qmap: QuotientMap):
    G = qmap.source
    tgt = t.target
    zero = (0,) * tgt.Hgrp.order
    out = {}
    mus = {mu for (mu, _g) in t.comps}
    for mu in mus:
        for tau in qmap.target.elements:
            vals = {t.comps.get((mu, g), zero) for g in qmap.coset(tau)}
            if len(vals) != 1:
                return None
            y = vals.pop()
            if not tgt.in_J(y):
                return None
            if any(y):
                out[(mu, tau)] = y
    return out


def nu_inverse(t: TensorElement, qmap: QuotientMap) -> dict:
    """nu^{-1}(t) as {(mu, tau): y in J (reduced)}, meaning sum tau (N_H b)_mu (x) y."""
    pre = _nu_preimage(t, qmap)
    if pre is None:
        raise ValueError("element is not in the image of nu")
    return pre


@functools.lru_cache(maxsize=64)
def _free_dual_lifts(G: FiniteAbelianGroup, d: int) -> tuple[FreeMap, ...]:
    return tuple(f.lift_to_free() for f in hom_dual(GLattice.free(G, d)))


def prop49_check(a: Wedge, H: Subgroup, J: GStableIdeal | None = None) -> dict:
    """Evaluate the three conditions independently and, if they hold, the final congruence.

    (i)   a in J Z[G] wedge^r P          (coordinates x_mu in JZ[G])
    (ii)  N_H(a) in the image of nu      (coset-constant with values in J_H)
    (iii) Phi(a) in JZ[G] for all Phi    (all r-wedges of a Z-basis of the dual)
    """
    G = a.group
    if not a.is_integral():
        raise ValueError("a must lie in wedge^r P")
    target = NormTarget(H, J)
    JG = target.J_in_G()
    IJG = target.IJ_in_G()
    qmap = G.quotient(H)

    in_JP = all(x in JG for x in a.coeffs.values())
    t = norm_tensor(a, H, target.J)
    nh_in_im = in_image_of_nu(t, qmap)

    lifts = _free_dual_lifts(G, a.d)
    phis = [[lifts[i] for i in idx] for idx in itertools.combinations(range(len(lifts)), a.r)]
    phi_integral = all(evaluate(phi, a) in JG for phi in phis)

    identity_holds = None
    if in_JP and nh_in_im and phi_integral:
        pre = nu_inverse(t, qmap)
        identity_holds = True
        for phi in phis:
            lhs = evaluate(phi, a)
            rhs = G.zero()
            phiH = phi_restrict(phi, qmap)
            for (mu, tau), y in pre.items():
                val = evaluate(phiH, Wedge.basis(qmap.target, a.d, mu)) * qmap.target.ring_element(tau)
                for sigma_bar, c in val.coeffs.items():
                    rhs = rhs + target.to_G(y).act(qmap.lift(sigma_bar)) * c
            if not IJG.reduce(lhs - rhs).is_zero():
                identity_holds = False
                break
    return {"in_JP": in_JP, "NH_in_im_nu": nh_in_im, "phi_integral": phi_integral,
            "identity_holds": identity_holds}
