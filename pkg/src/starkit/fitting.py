"""Finitely presented Z[G]-modules, higher Fitting ideals and relative Fitting ideals.

A module is given by a relation matrix A over Z[G] with n rows (generators)
and m columns (relations): M = Z[G]^n / (column span of A).
"""

from __future__ import annotations

import itertools
import json
from typing import Iterable, Sequence

from .groupring import FiniteAbelianGroup, GroupRingElement
from .intmat import HNFLattice, hnf, invariant_factors
from .lattice import GStableIdeal

MAX_SIZE = 12
DEFAULT_ENUM_BOUND = 10**4

Vec = tuple[int, ...]


class _DenseRing:
    """Z[G] on dense integer tuples indexed like G.elements."""

    def __init__(self, G: FiniteAbelianGroup):
        self.G = G
        self.n = G.order
        self.mt = G.mul_table
        self.zero = (0,) * self.n
        self.one = tuple(int(i == 0) for i in range(self.n))

    def mul(self, a: Vec, b: Vec) -> Vec:
        if not any(a) or not any(b):
            return self.zero
        out = [0] * self.n
        mt = self.mt
        for i, x in enumerate(a):
            if x:
                row = mt[i]
                for j, y in enumerate(b):
                    if y:
                        out[row[j]] += x * y
        return tuple(out)

    def add(self, a: Vec, b: Vec) -> Vec:
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a: Vec, b: Vec) -> Vec:
        return tuple(x - y for x, y in zip(a, b))

    def shift(self, g_index: int, a: Vec) -> Vec:
        out = [0] * self.n
        row = self.mt[g_index]
        for j, y in enumerate(a):
            if y:
                out[row[j]] = y
        return tuple(out)


class _MinorEngine:
    """Memoized Laplace expansion of minors of a fixed matrix over Z[G]."""

    def __init__(self, ring: _DenseRing, mat: Sequence[Sequence[Vec]]):
        self.R = ring
        self.mat = mat
        self.memo: dict[tuple[tuple[int, ...], tuple[int, ...]], Vec] = {}

    def det(self, rows: tuple[int, ...], cols: tuple[int, ...]) -> Vec:
        if not rows:
            return self.R.one
        key = (rows, cols)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        R = self.R
        r0, rest = rows[0], rows[1:]
        acc = R.zero
        for k, c in enumerate(cols):
            entry = self.mat[r0][c]
            if not any(entry):
                continue
            sub = self.det(rest, cols[:k] + cols[k + 1:])
            if not any(sub):
                continue
            term = R.mul(entry, sub)
            acc = R.add(acc, term) if k % 2 == 0 else R.sub(acc, term)
        self.memo[key] = acc
        return acc


class _IdealBuilder:
    """Accumulates Z[G]-generators into an HNF lattice, skipping redundant ones."""

    def __init__(self, G: FiniteAbelianGroup):
        self.G = G
        self.R = _DenseRing(G)
        self.lattice = HNFLattice.zero(G.order)
        self.full = False

    def add(self, v: Vec):
        if self.full or not any(v) or list(v) in self.lattice:
            return
        rows = [self.R.shift(g, v) for g in range(self.R.n)]
        self.lattice = self.lattice.add_rows(rows)
        self.full = self.lattice.is_full()

    def add_lattice(self, L: HNFLattice):
        if not self.full and L.basis:
            self.lattice = self.lattice + L
            self.full = self.lattice.is_full()

    def ideal(self) -> GStableIdeal:
        return GStableIdeal(self.G, self.lattice, check=False)


def _check_size(n: int, m: int):
    if n > MAX_SIZE or m > MAX_SIZE:
        raise ValueError(f"relation matrix {n}x{m} exceeds the {MAX_SIZE}x{MAX_SIZE} cap")


def minors_ideal(G: FiniteAbelianGroup, mat: Sequence[Sequence[Vec]], c: int,
                 row_sets: Iterable[Sequence[int]] | None = None) -> GStableIdeal:
    """Ideal generated by the c x c minors of `mat` (dense entries).

    With `row_sets` only minors using exactly those rows (|rows| = c) are taken;
    otherwise all c-subsets of rows are used. c <= 0 gives the unit ideal.
    """
    if c <= 0:
        return GStableIdeal.unit(G)
    n = len(mat)
    m = len(mat[0]) if n else 0
    builder = _IdealBuilder(G)
    if c > n or c > m:
        return builder.ideal()
    eng = _MinorEngine(builder.R, mat)
    rsets = itertools.combinations(range(n), c) if row_sets is None else (tuple(r) for r in row_sets)
    for rows in rsets:
        for cols in itertools.combinations(range(m), c):
            builder.add(eng.det(tuple(rows), cols))
            if builder.full:
                return builder.ideal()
    return builder.ideal()


class PresentedModule:
    """M = Z[G]^n / (columns of A), with an optional block shape marking N.

    With block (n1, m1) the matrix is [[A1, A2], [0, A3]] where A1 is the
    n1 x m1 corner presenting the submodule N generated by the first n1
    generators.
    """

    def __init__(self, group: FiniteAbelianGroup, matrix: Sequence[Sequence[GroupRingElement | int]],
                 block: tuple[int, int] | None = None, ncols: int | None = None):
        rows = []
        for r in matrix:
            row = []
            for x in r:
                if not isinstance(x, GroupRingElement):
                    x = group.ring_element(coeff=x)
                if x.group != group:
                    raise ValueError("matrix entry over the wrong group")
                if not x.is_integral():
                    raise ValueError("relation matrix entries must be integral")
                row.append(x)
            rows.append(row)
        n = len(rows)
        m = len(rows[0]) if rows else (ncols or 0)
        if any(len(r) != m for r in rows):
            raise ValueError("ragged relation matrix")
        self.group = group
        self.matrix = rows
        self.n, self.m = n, m
        self.dense = [tuple(tuple(x.int_vector()) for x in r) for r in rows]
        if block is not None:
            n1, m1 = block
            if not (0 <= n1 <= n and 0 <= m1 <= m):
                raise ValueError("block out of range")
            for i in range(n1, n):
                for j in range(m1):
                    if not rows[i][j].is_zero():
                        raise ValueError("lower-left block of the relation matrix must vanish")
            block = (n1, m1)
        self.block = block

    @classmethod
    def from_dense(cls, G: FiniteAbelianGroup, dense: Sequence[Sequence[Sequence[int]]],
                   block: tuple[int, int] | None = None, ncols: int | None = None) -> "PresentedModule":
        return cls(G, [[GroupRingElement.from_vector(G, e) for e in r] for r in dense], block, ncols)

    @classmethod
    def over_integers(cls, matrix: Sequence[Sequence[int]], block=None) -> "PresentedModule":
        G = FiniteAbelianGroup([])
        return cls(G, [[G.ring_element(coeff=x) for x in r] for r in matrix], block)

    def __repr__(self):
        return f"PresentedModule({list(self.group.orders)}, {self.n}x{self.m}, block={self.block})"

    # Z-structure

    def z_relations(self) -> list[list[int]]:
        """Rows spanning the relation lattice inside Z^(n|G|)."""
        R = _DenseRing(self.group)
        k = R.n
        out = []
        for j in range(self.m):
            col = [self.dense[i][j] for i in range(self.n)]
            for g in range(k):
                v = []
                for i in range(self.n):
                    v.extend(R.shift(g, col[i]))
                if any(v):
                    out.append(v)
        return out

    def relation_lattice(self) -> HNFLattice:
        return hnf(self.z_relations(), self.n * self.group.order)

    def module_structure(self) -> tuple[list[int], int]:
        """(torsion invariant factors, free Z-rank) of the underlying abelian group."""
        rels = self.z_relations()
        dim = self.n * self.group.order
        if not rels:
            return [], dim
        return invariant_factors(rels)

    def z_order(self) -> int | None:
        """|M| if finite, else None."""
        L = self.relation_lattice()
        idx = L.index()
        return idx if idx else None

    # Fitting ideals

    def fitting_ideal(self, i: int) -> GStableIdeal:
        if i < 0:
            raise ValueError("i must be non-negative")
        _check_size(self.n, self.m)
        return minors_ideal(self.group, self.dense, self.n - i)

    def quotient_by_submodule(self) -> "PresentedModule":
        """M/N, presented by the A3 block."""
        n1, m1 = self._block()
        dense = [list(r[m1:]) for r in self.dense[n1:]]
        return PresentedModule.from_dense(self.group, dense, ncols=self.m - m1)

    def submodule_presentation(self) -> "PresentedModule":
        """The module presented by A1 (equal to N when A1 presents N)."""
        n1, m1 = self._block()
        return PresentedModule.from_dense(self.group, [list(r[:m1]) for r in self.dense[:n1]], ncols=m1)

    def _block(self) -> tuple[int, int]:
        if self.block is None:
            raise ValueError("submodule block not set")
        return self.block

    def relative_fitting_minors(self, a: int, b: int) -> GStableIdeal:
        """Sum of F(A'') over all row removals: b rows among the first n1, then a more."""
        n1, _ = self._block()
        _check_size(self.n, self.m)
        c = self.n - a - b
        if c <= 0:
            return GStableIdeal.unit(self.group)
        if b > n1:
            return GStableIdeal.zero(self.group)
        row_sets = set()
        for removed_b in itertools.combinations(range(n1), b):
            rest = [r for r in range(self.n) if r not in removed_b]
            for removed_a in itertools.combinations(rest, a):
                row_sets.add(tuple(r for r in rest if r not in removed_a))
        return minors_ideal(self.group, self.dense, c, sorted(row_sets))

    def relative_fitting_ideal(self, a: int, b: int, nu: int | None = None,
                               enum_bound: int = DEFAULT_ENUM_BOUND) -> GStableIdeal:
        """Fitt^(a,b)(M, N).

        nu is the minimal number of generators of N. When omitted it is found
        from cheap bounds or, for finite N, by enumeration.
        """
        if a < 0 or b < 0:
            raise ValueError("a, b must be non-negative")
        n1, _ = self._block()
        if nu is None:
            if b == 0:
                nu = 0  # b <= nu either way
                return self.relative_fitting_minors(a, 0)
            lo, hi = self.submodule_generator_bounds()
            if b > hi:
                nu = hi
            elif b <= lo:
                nu = lo
            else:
                try:
                    nu = self.submodule_min_generators(enum_bound)
                except ValueError as exc:
                    raise ValueError(f"cannot decide b <= nu(N) for b = {b}; pass nu explicitly") from exc
        if b > nu:
            return self.quotient_by_submodule().fitting_ideal(a)
        return self.relative_fitting_minors(a, b)

    # generator counts for N

    def _submodule_z_data(self):
        n1, _ = self._block()
        k = self.group.order
        lam = self.relation_lattice()
        R = _DenseRing(self.group)
        gens = []
        for i in range(n1):
            e = [0] * (self.n * k)
            e[i * k] = 1
            gens.append(tuple(e))
        return lam, gens, R

    def submodule_generator_bounds(self) -> tuple[int, int]:
        """Lower and upper bounds for the minimal number of generators of N.

        N is a quotient of Z[G]^n1; the lower bound uses N tensor Q(chi) for each
        character and N tensor_Z[G] Z (coinvariants), computed from the
        Z-lattice of N inside M when M is finite, else from A1.
        """
        n1, _ = self._block()
        if n1 == 0:
            return 0, 0
        N = self.submodule_presentation()
        lo = 0
        # coinvariants N_G: augment the entries of A1
        aug = [[sum(e) for e in r] for r in N.dense]
        if N.m:
            tors, free = invariant_factors(aug) if any(any(r) for r in aug) else ([], n1)
            lo = max(lo, len(tors) + free)
        else:
            lo = n1
        # character components over Q(zeta)
        for chi in self.group.characters():
            mat = [[_char_value(chi, e) for e in r] for r in N.dense]
            lo = max(lo, n1 - _rank_cyclo(mat))
        return min(lo, n1), n1

    def submodule_min_generators(self, enum_bound: int = DEFAULT_ENUM_BOUND) -> int:
        """Exact minimal number of Z[G]-generators of N, by enumeration of coker A1.

        Valid when A1 presents N (e.g. A3 injective); N must be finite.
        """
        lo, hi = self.submodule_generator_bounds()
        if lo == hi:
            return lo
        n1, m1 = self._block()
        N = PresentedModule.from_dense(self.group, [list(r[:m1]) for r in self.dense[:n1]],
                                       block=(n1, m1), ncols=m1)
        return _EnumContext(N, enum_bound).min_generators_of_N()

    # duality

    def transpose_presentation(self) -> "PresentedModule":
        """coker of A^{tr,#}, after padding A with zero columns to a square matrix."""
        if self.m > self.n:
            raise ValueError("cannot square a presentation with more relations than generators")
        G = self.group
        inv = G.inv_table
        pad = [list(r) + [(0,) * G.order] * (self.n - self.m) for r in self.dense]

        def sharp(v):
            out = [0] * len(v)
            for i, c in enumerate(v):
                out[inv[i]] = c
            return tuple(out)

        dense = [[sharp(pad[j][i]) for j in range(self.n)] for i in range(self.n)]
        return PresentedModule.from_dense(G, dense)

    # serialization

    def to_json_obj(self) -> dict:
        obj = {"group": list(self.group.orders),
               "matrix": [[x.to_json_obj() for x in r] for r in self.matrix]}
        if self.block is not None:
            obj["block"] = list(self.block)
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj) -> "PresentedModule":
        rows = [[GroupRingElement.from_json_obj(x) for x in r] for r in obj["matrix"]]
        if "group" in obj:
            G = FiniteAbelianGroup(obj["group"])
        elif rows and rows[0]:
            G = rows[0][0].group
        else:
            raise ValueError("cannot infer the group of an empty matrix")
        block = tuple(obj["block"]) if obj.get("block") is not None else None
        return cls(G, rows, block)

    @classmethod
    def from_json(cls, text: str) -> "PresentedModule":
        return cls.from_json_obj(json.loads(text))


def _char_value(chi, v: Vec):
    from .cyclo.field import CycloNumber
    E = chi.group.exponent
    out = [0] * E
    for g, c in zip(chi.group.elements, v):
        if c:
            out[chi.exponent_of(g)] += c
    return CycloNumber(E, out)


def _rank_cyclo(mat) -> int:
    """Rank of a matrix of CycloNumbers by Gaussian elimination over the field."""
    A = [list(r) for r in mat]
    if not A or not A[0]:
        return 0
    rank, ncols = 0, len(A[0])
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if not A[i][c].is_zero()), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = A[rank][c].inverse()
        for i in range(len(A)):
            if i != rank and not A[i][c].is_zero():
                f = A[i][c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank


# brute-force side: the submodule-sum characterization


class _EnumContext:
    """Finite M realized as Z^(n|G|)/Lambda with canonical representatives."""

    def __init__(self, M: PresentedModule, bound: int):
        self.M = M
        self.G = M.group
        self.k = self.G.order
        self.dim = M.n * self.k
        self.lam = M.relation_lattice()
        size = self.lam.index()
        if size == 0:
            raise ValueError("module is infinite; enumeration impossible")
        if size > bound:
            raise ValueError(f"|M| = {size} exceeds the enumeration bound {bound}")
        self.size = size
        self.R = _DenseRing(self.G)
        self._cyc_cache: dict[Vec, HNFLattice] = {}

    def act(self, g: int, v: Sequence[int]) -> Vec:
        """g acting on a vector of Z[G]^n written in Z-coordinates."""
        out = []
        for i in range(self.M.n):
            out.extend(self.R.shift(g, tuple(v[i * self.k:(i + 1) * self.k])))
        return tuple(out)

    def span(self, vecs: Iterable[Sequence[int]], base: HNFLattice | None = None) -> HNFLattice:
        """Lambda (or `base`) plus the Z[G]-span of the given vectors."""
        base = self.lam if base is None else base
        rows = [self.act(g, v) for v in vecs for g in range(self.k)]
        return base.add_rows(rows) if rows else base

    def elements_of(self, L: HNFLattice) -> list[Vec]:
        """Canonical representatives of L / Lambda."""
        # L contains Lambda and has full rank; enumerate L-coordinates then reduce
        diag = [L.basis[i][i] for i in range(self.dim)]
        lam_diag = [self.lam.basis[i][i] for i in range(self.dim)]
        ranges = [range(ld // d) for d, ld in zip(diag, lam_diag)]
        seen = set()
        out = []
        for coeffs in itertools.product(*ranges):
            v = [0] * self.dim
            for c, row in zip(coeffs, L.basis):
                if c:
                    v = [x + c * y for x, y in zip(v, row)]
            r = self.lam.reduce(v)
            if r not in seen:
                seen.add(r)
                out.append(r)
        return out

    def cyclic_submodules(self, L: HNFLattice) -> list[HNFLattice]:
        """All cyclic submodules Z[G]x for x in L/Lambda (as lattices containing Lambda)."""
        found: dict[tuple, HNFLattice] = {}
        done: set[Vec] = set()
        for x in self.elements_of(L):
            if x in done:
                continue
            C = self.span([x])
            found.setdefault(C.basis, C)
            # unit multiples k*g*x generate the same submodule
            order = self._element_order(x)
            for t in range(1, order + 1):
                if _coprime(t, order):
                    for g in range(self.k):
                        done.add(self.lam.reduce([t * c for c in self.act(g, x)]))
        return list(found.values())

    def _element_order(self, x: Vec) -> int:
        t = 1
        while list(t * c for c in x) not in self.lam:
            t += 1
        return t

    def submodule_N(self) -> HNFLattice:
        n1, _ = self.M._block()
        gens = []
        for i in range(n1):
            e = [0] * self.dim
            e[i * self.k] = 1
            gens.append(e)
        return self.span(gens)

    def sums(self, start: list[HNFLattice], pieces: list[HNFLattice], times: int) -> list[HNFLattice]:
        level = {L.basis: L for L in start}
        for _ in range(times):
            nxt = dict(level)
            for L in level.values():
                for P in pieces:
                    S = L + P
                    nxt.setdefault(S.basis, S)
            level = nxt
        return list(level.values())

    def min_generators_of_N(self) -> int:
        N = self.submodule_N()
        if N == self.lam:
            return 0
        cyc = self.cyclic_submodules(N)
        level = {self.lam.basis: self.lam}
        k = 0
        while True:
            k += 1
            nxt = {}
            for L in level.values():
                for P in cyc:
                    S = L + P
                    if S == N:
                        return k
                    nxt.setdefault(S.basis, S)
            level = nxt

    def fitt0_quotient(self, L: HNFLattice) -> GStableIdeal:
        """Fitt^0 of Z[G]^n / L: the columns of A plus a greedy Z[G]-generating set of L."""
        cols = []
        for j in range(self.M.m):
            col = []
            for i in range(self.M.n):
                col.extend(self.M.dense[i][j])
            if any(col):
                cols.append(tuple(col))
        span = self.lam
        for v in L.basis:
            if list(v) in span:
                continue
            cols.append(v)
            span = span.add_rows([self.act(g, v) for g in range(self.k)])
            if span == L:
                break
        mat = [[tuple(c[i * self.k:(i + 1) * self.k]) for c in cols] for i in range(self.M.n)]
        return minors_ideal(self.G, mat, self.M.n)


def _coprime(a: int, b: int) -> bool:
    from math import gcd
    return gcd(a, b) == 1


def relative_fitting_oracle(M: PresentedModule, a: int, b: int,
                            bound: int = DEFAULT_ENUM_BOUND) -> GStableIdeal:
    """Sum of Fitt^0(M/X) over submodules X generated by a+b elements, the first b in N."""
    ctx = _EnumContext(M, bound)
    N = ctx.submodule_N()
    cyc_N = ctx.cyclic_submodules(N)
    full = HNFLattice.full(ctx.dim)
    cyc_M = ctx.cyclic_submodules(full) if a else []
    Xs = ctx.sums([ctx.lam], cyc_N, b)
    Xs = ctx.sums(Xs, cyc_M, a)
    builder = _IdealBuilder(M.group)
    for X in Xs:
        builder.add_lattice(ctx.fitt0_quotient(X).lattice)
        if builder.full:
            break
    return builder.ideal()


def fitting_ideal(M: PresentedModule, i: int) -> GStableIdeal:
    return M.fitting_ideal(i)


def relative_fitting_ideal(M: PresentedModule, a: int, b: int, nu: int | None = None) -> GStableIdeal:
    return M.relative_fitting_ideal(a, b, nu)


def transpose_presentation(M: PresentedModule) -> PresentedModule:
    return M.transpose_presentation()


def module_structure(M: PresentedModule) -> tuple[list[int], int]:
    return M.module_structure()
