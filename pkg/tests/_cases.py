"""Random instance generators shared by the unit and acceptance suites."""

from __future__ import annotations

import random

from starkit.fitting import PresentedModule, _char_value, _rank_cyclo
from starkit.groupring import FiniteAbelianGroup

FITTING_GROUPS = [[], [2], [3], [4], [2, 2]]


def rvec(G: FiniteAbelianGroup, rng: random.Random, height: int = 3, density: float = 0.7):
    return tuple(rng.randint(-height, height) if rng.random() < density else 0 for _ in range(G.order))


def injective(G: FiniteAbelianGroup, rows) -> bool:
    """Columns of `rows` are Z[G]-independent, i.e. full column rank at every character."""
    if not rows or not rows[0]:
        return True
    m = len(rows[0])
    return all(_rank_cyclo([[_char_value(chi, e) for e in r] for r in rows]) == m for chi in G.characters())


def random_block(rng: random.Random, G: FiniteAbelianGroup, n1: int, n2: int, m1: int, m2: int,
                 height: int = 3, square_a3: bool = False) -> PresentedModule:
    """[[A1, A2], [0, A3]] with A3 injective, so A1 presents N."""
    if square_a3:
        m2 = n2
    zero = (0,) * G.order
    for _ in range(200):
        a3 = [[rvec(G, rng, height) for _ in range(m2)] for _ in range(n2)]
        if injective(G, a3):
            break
    else:
        raise RuntimeError("no injective A3 found")
    rows = []
    for i in range(n1):
        rows.append([rvec(G, rng, height) for _ in range(m1 + m2)])
    for i in range(n2):
        rows.append([zero] * m1 + list(a3[i]))
    return PresentedModule.from_dense(G, rows, block=(n1, m1), ncols=m1 + m2)


def random_shape(rng: random.Random, max_n: int = 4):
    n1 = rng.randint(1, max_n - 1)
    n2 = rng.randint(0, max_n - n1)
    m2 = rng.randint(0, n2)
    m1 = rng.randint(0, max_n - m2)
    return n1, n2, m1, m2


def add_free_summand(M: PresentedModule, r: int) -> PresentedModule:
    """M (+) Z[G]^r: r extra generators with no relations."""
    zero = (0,) * M.group.order
    rows = [list(row) for row in M.dense] + [[zero] * M.m for _ in range(r)]
    return PresentedModule.from_dense(M.group, rows, block=M.block, ncols=M.m)


def block_preserving_ops(rng: random.Random, M: PresentedModule, steps: int = 3) -> PresentedModule:
    """Row/column operations that keep the block shape and the designated N."""
    G = M.group
    from starkit.fitting import _DenseRing
    R = _DenseRing(G)
    rows = [list(r) for r in M.dense]
    n, m = M.n, M.m
    n1, m1 = M.block
    unit = lambda: R.shift(rng.randrange(G.order), R.one) if rng.random() < 0.5 else tuple(-x for x in R.shift(rng.randrange(G.order), R.one))
    for _ in range(steps):
        kind = rng.choice(["row", "col", "scale_row", "scale_col", "pad"])
        c = rvec(G, rng, 2)
        if kind == "row" and n >= 2:
            i, j = rng.sample(range(n), 2)
            # row_i += c*row_j allowed unless it pushes an A3 row into the zero block
            if i >= n1 and j < n1:
                continue
            rows[i] = [R.add(a, R.mul(c, b)) for a, b in zip(rows[i], rows[j])]
        elif kind == "col" and m >= 2:
            i, j = rng.sample(range(m), 2)
            # col_i += c*col_j keeps the zero block unless i < m1 <= j
            if i < m1 <= j:
                continue
            for r in rows:
                r[i] = R.add(r[i], R.mul(c, r[j]))
        elif kind == "scale_row" and n:
            i = rng.randrange(n)
            u = unit()
            rows[i] = [R.mul(u, a) for a in rows[i]]
        elif kind == "scale_col" and m:
            j = rng.randrange(m)
            u = unit()
            for r in rows:
                r[j] = R.mul(u, r[j])
        elif kind == "pad":
            for r in rows:
                r.append((0,) * G.order)
            m += 1
    return PresentedModule.from_dense(G, rows, block=(n1, m1), ncols=m)


def random_square(rng: random.Random, G: FiniteAbelianGroup, n: int, height: int = 3) -> PresentedModule:
    return PresentedModule.from_dense(G, [[rvec(G, rng, height) for _ in range(n)] for _ in range(n)])
