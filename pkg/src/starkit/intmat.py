"""Exact integer matrix kernels: Hermite and Smith normal forms.

Everything here works on plain nested lists / tuples of Python ints, so the
group-ring layer can build on it without import cycles.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence

Row = tuple[int, ...]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _hnf_core(rows: list[list[int]], ncols: int, upto: int | None = None) -> list[list[int]]:
    """Row-style HNF of `rows` in place; returns the nonzero echelon rows.

    Only columns < `upto` are used as pivot columns (the augmented-transform
    trick relies on this); the remaining columns are carried along.
    """
    limit = ncols if upto is None else upto
    A = [r for r in rows if any(r)]
    r = 0
    for col in range(limit):
        if r >= len(A):
            break
        # 2x2 unimodular combination keeps entry growth in check
        piv = None
        for i in range(r, len(A)):
            if A[i][col]:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        top = A[r]
        for i in range(r + 1, len(A)):
            b = A[i][col]
            if not b:
                continue
            a = top[col]
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            new_top = [x * u + y * v for u, v in zip(top, A[i])]
            A[i] = [ag * v - bg * u for u, v in zip(top, A[i])]
            top = new_top
        if top[col] < 0:
            top = [-v for v in top]
        A[r] = top
        p = top[col]
        for i in range(r):
            q = A[i][col] // p
            if q:
                A[i] = [u - q * v for u, v in zip(A[i], top)]
        r += 1
        # drop rows that became zero
        A = A[:r] + [row for row in A[r:] if any(row)]
    return A[:r] if upto is None else A


def hnf(rows: Iterable[Sequence[int]], ncols: int | None = None) -> "HNFLattice":
    """Canonical row-style HNF basis of the row lattice of `rows`."""
    rows = [list(map(int, r)) for r in rows]
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty generator list")
        ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise ValueError("ragged matrix")
    basis = _hnf_core(rows, ncols)
    return HNFLattice(ncols, tuple(tuple(r) for r in basis))


def hnf_with_transform(rows: Sequence[Sequence[int]]) -> tuple["HNFLattice", list[Row], list[Row]]:
    """HNF of the row lattice together with bookkeeping.

    Returns (lattice, coeffs, kernel) where coeffs[k] expresses the k-th HNF
    basis row as an integer combination of the input rows and `kernel` is a
    Z-basis of the left kernel (integer relations among the input rows).
    """
    rows = [list(map(int, r)) for r in rows]
    m = len(rows)
    if m == 0:
        raise ValueError("need at least one row")
    n = len(rows[0])
    aug = [rows[i] + [1 if j == i else 0 for j in range(m)] for i in range(m)]
    out = _hnf_core(aug, n + m, upto=n)
    basis, coeffs, kernel = [], [], []
    for row in out:
        if any(row[:n]):
            basis.append(tuple(row[:n]))
            coeffs.append(tuple(row[n:]))
        else:
            kernel.append(row[n:])
    kern = hnf(kernel, m).basis if kernel else ()
    return HNFLattice(n, tuple(basis)), coeffs, list(kern)


@dataclass(frozen=True)
class HNFLattice:
    """A Z-lattice in Z^dim stored by its canonical HNF basis."""

    dim: int
    basis: tuple[Row, ...]

    @classmethod
    def zero(cls, dim: int) -> "HNFLattice":
        return cls(dim, ())

    @classmethod
    def full(cls, dim: int) -> "HNFLattice":
        return cls(dim, tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def pivots(self) -> list[int]:
        return [next(j for j, v in enumerate(r) if v) for r in self.basis]

    def reduce(self, v: Sequence[int]) -> Row:
        """Canonical representative of v modulo the lattice."""
        v = list(v)
        for row, p in zip(self.basis, self.pivots):
            q = v[p] // row[p]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)

    def coordinates(self, v: Sequence[int]) -> list[int] | None:
        """Integer coordinates of v in the HNF basis, or None if v is not in it."""
        v = list(v)
        coords = []
        for row, p in zip(self.basis, self.pivots):
            q, rem = divmod(v[p], row[p])
            if rem:
                return None
            coords.append(q)
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return coords if not any(v) else None

    def __contains__(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v)) if len(v) == self.dim else False

    def contains_lattice(self, other: "HNFLattice") -> bool:
        return all(b in self for b in other.basis)

    def __add__(self, other: "HNFLattice") -> "HNFLattice":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return hnf(list(self.basis) + list(other.basis), self.dim)

    def add_rows(self, rows: Iterable[Sequence[int]]) -> "HNFLattice":
        return hnf(list(self.basis) + [list(r) for r in rows], self.dim)

    def intersect(self, other: "HNFLattice") -> "HNFLattice":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        if not self.basis or not other.basis:
            return HNFLattice.zero(self.dim)
        stacked = list(self.basis) + list(other.basis)
        _, _, kernel = hnf_with_transform(stacked)
        k = len(self.basis)
        vecs = []
        for rel in kernel:
            vec = [0] * self.dim
            for c, b in zip(rel[:k], self.basis):
                if c:
                    vec = [x + c * y for x, y in zip(vec, b)]
            vecs.append(vec)
        return hnf(vecs, self.dim)

    def index(self) -> int:
        """Index in Z^dim; 0 when the lattice is not of full rank."""
        if self.rank < self.dim:
            return 0
        out = 1
        for i, row in enumerate(self.basis):
            out *= row[i]
        return out

    def is_full(self) -> bool:
        return self.rank == self.dim and all(row[i] == 1 for i, row in enumerate(self.basis))

    def rational_contains(self, v: Sequence[int | Fraction]) -> bool:
        """True iff v lies in the Q-span of the lattice."""
        v = [Fraction(x) for x in v]
        for row, p in zip(self.basis, self.pivots):
            if v[p]:
                q = v[p] / row[p]
                v = [a - q * b for a, b in zip(v, row)]
        return not any(v)


@dataclass(frozen=True)
class SNFResult:
    diagonal: tuple[int, ...]
    U: tuple[Row, ...]
    V: tuple[Row, ...]


def snf(M: Sequence[Sequence[int]]) -> SNFResult:
    """Smith normal form with unimodular transforms: U * M * V = diag(d)."""
    A = [list(map(int, r)) for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t] and A[i][t] % A[t][t] == 0:
                    q = A[i][t] // A[t][t]
                    A[i] = [v - q * u for u, v in zip(A[t], A[i])]
                    U[i] = [v - q * u for u, v in zip(U[t], U[i])]
                elif A[i][t]:
                    g, x, y = _xgcd(A[t][t], A[i][t])
                    a, b = A[t][t] // g, A[i][t] // g
                    rt, ri = A[t], A[i]
                    A[t] = [x * u + y * v for u, v in zip(rt, ri)]
                    A[i] = [a * v - b * u for u, v in zip(rt, ri)]
                    ut, ui = U[t], U[i]
                    U[t] = [x * u + y * v for u, v in zip(ut, ui)]
                    U[i] = [a * v - b * u for u, v in zip(ut, ui)]
                    changed = True
            for j in range(t + 1, n):
                if A[t][j] and A[t][j] % A[t][t] == 0:
                    q = A[t][j] // A[t][t]
                    for M_ in (A, V):
                        for row in M_:
                            row[j] -= q * row[t]
                elif A[t][j]:
                    g, x, y = _xgcd(A[t][t], A[t][j])
                    a, b = A[t][t] // g, A[t][j] // g
                    for M_ in (A, V):
                        for row in M_:
                            u, v = row[t], row[j]
                            row[t] = x * u + y * v
                            row[j] = a * v - b * u
                    changed = True
            if not changed:
                # divisibility: fold a non-divisible entry into row t
                p = A[t][t]
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
                if bad is None:
                    break
                i, _ = bad
                A[t] = [u + v for u, v in zip(A[t], A[i])]
                U[t] = [u + v for u, v in zip(U[t], U[i])]
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
            U[t] = [-v for v in U[t]]
        t += 1
    diag = tuple(A[i][i] for i in range(min(m, n)))
    return SNFResult(diag, tuple(map(tuple, U)), tuple(map(tuple, V)))


def invariant_factors(M: Sequence[Sequence[int]], ncols: int | None = None) -> tuple[list[int], int]:
    """(torsion invariant factors > 1, free rank) of the cokernel Z^ncols / rowspace(M)."""
    if not M:
        return [], ncols or 0
    ncols = len(M[0])
    d = [x for x in snf(M).diagonal if x]
    return [x for x in d if x != 1], ncols - len(d)
