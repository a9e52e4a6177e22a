import itertools
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from starkit.groupring import FiniteAbelianGroup
from starkit.lattice import (
    GStableIdeal,
    HNFLattice,
    hnf,
    ideal_contains,
    ideal_equal,
    ideal_from_generators,
    ideal_product,
    ideal_sum,
    invariant_factors,
    matrix_from_json,
    matrix_to_json,
    snf,
)

from conftest import random_element

matrices = st.integers(1, 4).flatmap(
    lambda d: st.lists(st.lists(st.integers(-6, 6), min_size=d, max_size=d), min_size=0, max_size=5).map(
        lambda rows: (d, rows)
    )
)


def test_hnf_examples():
    assert hnf([[2, 0], [0, 3]]).basis == ((2, 0), (0, 3))
    assert hnf([[2, 4], [1, 3]]) == hnf([[1, 1], [0, 2]])
    assert hnf([[2, 4], [1, 3]]).basis == ((1, 1), (0, 2))
    assert hnf([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == HNFLattice.full(3)
    assert hnf([[0, 0]]).rank == 0


def test_snf_examples():
    assert snf([[2, 0], [0, 3]]).diagonal == (1, 6)
    assert snf([[4, 0], [0, 6]]).diagonal == (2, 12)
    assert snf([[0, 0], [0, 0]]).diagonal == (0, 0)


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(r, c)) for c in zip(*B)] for r in A]


def _det(M):
    if not M:
        return 1
    return sum((-1) ** j * M[0][j] * _det([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(len(M)))


def _gcd_minors(M, k):
    from math import gcd
    g = 0
    for rows in itertools.combinations(range(len(M)), k):
        for cols in itertools.combinations(range(len(M[0])), k):
            g = gcd(g, _det([[M[r][c] for c in cols] for r in rows]))
    return g


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_transform_and_minors(data):
    d, rows = data
    if not rows:
        return
    res = snf(rows)
    D = _matmul(_matmul([list(r) for r in res.U], rows), [list(r) for r in res.V])
    for i, r in enumerate(D):
        for j, v in enumerate(r):
            assert v == (res.diagonal[i] if i == j else 0)
    assert abs(_det([list(r) for r in res.U])) == 1
    assert abs(_det([list(r) for r in res.V])) == 1
    diag = res.diagonal
    for a, b in zip(diag, diag[1:]):
        assert b == 0 or (a != 0 and b % a == 0)
    prod = 1
    for k in range(1, len(diag) + 1):
        prod *= diag[k - 1]
        assert prod == _gcd_minors(rows, k)


@settings(max_examples=150, deadline=None)
@given(matrices, st.randoms(use_true_random=False))
def test_hnf_canonical(data, r):
    d, rows = data
    L = hnf(rows, d)
    shuffled = list(rows)
    r.shuffle(shuffled)
    assert hnf(shuffled, d) == L
    assert hnf(L.basis, d) == L
    for row in rows:
        assert row in L
    # shape: echelon, positive pivots, reduced above pivots
    for i, (row, p) in enumerate(zip(L.basis, L.pivots)):
        assert row[p] > 0 and not any(row[:p])
        for prev in L.basis[:i]:
            assert 0 <= prev[p] < row[p]


def test_membership_brute_force():
    # N*Z^d lies in L when N = [Z^d : L], so membership is decided in (Z/N)^d,
    # where the subgroup spanned by the original rows is found by search.
    rng = random.Random(5)
    checked = 0
    for _ in range(80):
        d = rng.randint(1, 4)
        rows = [[rng.randint(-4, 4) for _ in range(d)] for _ in range(d)]
        L = hnf(rows, d)
        N = L.index()
        if N == 0 or N > 50:
            continue
        checked += 1
        gens = [tuple(x % N for x in r) for r in rows]
        seen = {(0,) * d}
        frontier = list(seen)
        while frontier:
            nxt = []
            for v in frontier:
                for g in gens:
                    w = tuple((a + b) % N for a, b in zip(v, g))
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        for v in itertools.product(range(-3, 4), repeat=d):
            assert (list(v) in L) == (tuple(x % N for x in v) in seen)
    assert checked >= 10


def test_cokernel_order_matches_enumeration():
    rng = random.Random(9)
    for _ in range(40):
        d = rng.randint(1, 2)
        rows = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(d)]
        tors, free = invariant_factors(rows)
        L = hnf(rows, d)
        if free:
            assert L.index() == 0
            continue
        box = [v for v in itertools.product(range(12), repeat=d)]
        classes = {L.reduce(v) for v in box}
        order = 1
        for t in tors:
            order *= t
        assert len(classes) == order == L.index()


def test_ideal_examples():
    G = FiniteAbelianGroup([2])
    s = G.ring_element((1,))
    assert ideal_from_generators([1 + s]).lattice.basis == ((1, 1),)
    I = ideal_from_generators([2 * G.one(), 1 - s])
    assert I.lattice == hnf([[1, -1], [0, 2]])
    assert ideal_from_generators([], G).is_zero()
    assert ideal_contains(I, 1 + s)
    assert ideal_equal(ideal_sum(I, GStableIdeal.zero(G)), I)
    two = ideal_from_generators([2 * G.one()])
    three = ideal_from_generators([3 * G.one()])
    assert ideal_product(two, three) == ideal_from_generators([6 * G.one()])


def test_non_integral_generators_rejected():
    import pytest
    from fractions import Fraction
    G = FiniteAbelianGroup([2])
    with pytest.raises(ValueError):
        ideal_from_generators([G.ring_element(coeff=Fraction(1, 2))])


def test_ideal_invariants(rng):
    for orders in ([2], [3], [4], [2, 2]):
        G = FiniteAbelianGroup(orders)
        for _ in range(10):
            I = ideal_from_generators([random_element(G, rng) for _ in range(rng.randint(1, 2))], G)
            J = ideal_from_generators([random_element(G, rng)], G)
            IJ = I * J
            assert IJ <= I.intersect(J)
            GStableIdeal(G, IJ.lattice)  # G-stability is checked on construction
            GStableIdeal(G, I.intersect(J).lattice)
            assert I.sharp().sharp() == I
            GStableIdeal(G, I.sharp().lattice)


def test_matrix_json():
    M = [[1, -2], [10**30, 0]]
    text = matrix_to_json(M)
    assert '"1000000000000000000000000000000"' in text
    assert matrix_from_json(text) == M
