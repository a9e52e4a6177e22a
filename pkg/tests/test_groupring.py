from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starkit.cyclo.field import CycloNumber
from starkit.groupring import (
    FiniteAbelianGroup,
    GroupRingElement,
    character_apply,
    deflate,
    norm_element,
)

from conftest import SMALL_GROUPS


def cyclic(n):
    G = FiniteAbelianGroup([n])
    return G, G.ring_element((1,))


@st.composite
def group_and_elements(draw, count=2):
    orders = draw(st.sampled_from(SMALL_GROUPS))
    G = FiniteAbelianGroup(orders)
    xs = [
        GroupRingElement.from_vector(G, draw(st.lists(st.integers(-4, 4), min_size=G.order, max_size=G.order)))
        for _ in range(count)
    ]
    return G, xs


def test_group_basics():
    G = FiniteAbelianGroup([2, 6])
    assert G.order == 12 and G.exponent == 6
    assert all(G.element_order(g) in (1, 2, 3, 6) for g in G.elements)
    H = G.subgroup([(0, 2)])
    cosets = {tuple(G.quotient(H).coset(t)) for t in G.quotient(H).target.elements}
    assert sorted(g for c in cosets for g in c) == G.elements


def test_ring_mul_examples():
    G, s = cyclic(2)
    assert (G.one() + s) * (G.one() - s) == 0
    G3, t = cyclic(3)
    assert (G3.one() + t) * (G3.one() + t * t) == 2 + t + t * t
    x = 3 - 2 * t
    assert G3.one() * x == x


def test_sharp_examples():
    G, s = cyclic(2)
    assert (2 + s).sharp() == 2 + s
    G3, t = cyclic(3)
    assert (1 + 2 * t).sharp() == 1 + 2 * t * t


def test_norm_element():
    G = FiniteAbelianGroup([4])
    assert norm_element(G.trivial_subgroup()) == G.one()
    G2, s = cyclic(2)
    assert norm_element(G2.whole()) == 1 + s
    H = G.subgroup([(2,)])
    assert norm_element(H) * (G.ring_element((2,)) - 1) == 0


def test_character_apply_examples():
    G, s = cyclic(2)
    chi = G.characters()[1]
    assert chi((1,)) == -1
    assert character_apply(chi, s - 1) == -2
    x = 3 + 5 * s
    assert character_apply(G.characters()[0], x) == x.augmentation()
    G6 = FiniteAbelianGroup([2, 3])
    for chi in G6.characters():
        if not chi.is_trivial():
            assert character_apply(chi, norm_element(G6.whole())) == 0


def test_deflate_examples():
    G = FiniteAbelianGroup([4])
    H = G.subgroup([(2,)])
    q = G.quotient(H)
    tau = q.target.ring_element(q((1,)))
    assert deflate(norm_element(G.whole()), H) == 2 + 2 * tau
    assert deflate(norm_element(H), H) == 2 * q.target.one()
    assert deflate(G.one(), H) == q.target.one()


def test_json_round_trip():
    G = FiniteAbelianGroup([2, 3])
    x = GroupRingElement(G, {(1, 2): Fraction(-3, 7), (0, 0): 12345678901234567890})
    obj = x.to_json_obj()
    assert [t["g"] for t in obj["terms"]] == sorted(t["g"] for t in obj["terms"])
    assert GroupRingElement.from_json(x.to_json()) == x


def test_zero_coefficients_not_stored():
    G, s = cyclic(3)
    x = s - s + 0 * G.one()
    assert x.coeffs == {}


def test_group_mismatch():
    G2, s = cyclic(2)
    G3, t = cyclic(3)
    with pytest.raises(ValueError):
        s * t


def test_character_orthogonality_and_idempotents():
    # exhaustive for |G| <= 8
    for orders in ([], [2], [3], [4], [2, 2], [5], [6], [7], [8], [2, 4], [2, 2, 2]):
        G = FiniteAbelianGroup(orders)
        chars = G.characters()
        assert len(set(chars)) == G.order
        for chi in chars:
            assert chi(G.identity) == 1
            for psi in chars:
                s = sum((chi(g) * psi(G.neg(g)) for g in G.elements), CycloNumber.rational(0))
                assert s == (G.order if chi == psi else 0)
                prod = chi.idempotent() * psi.idempotent()
                assert prod == (chi.idempotent() if chi == psi else G.zero())
        for g in G.elements:
            total = sum((chi(g) for chi in chars), CycloNumber.rational(0))
            assert total == (G.order if g == G.identity else 0)


@settings(max_examples=60, deadline=None)
@given(group_and_elements(3))
def test_ring_laws(data):
    G, (x, y, z) = data
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x * y).augmentation() == x.augmentation() * y.augmentation()
    assert (x * y).sharp() == x.sharp() * y.sharp()
    assert x.sharp().sharp() == x


@settings(max_examples=40, deadline=None)
@given(group_and_elements(2), st.data())
def test_deflate_is_ring_hom(data, draw):
    G, (x, y) = data
    H = draw.draw(st.sampled_from(G.subgroups()))
    q = G.quotient(H)
    assert (x * y).deflate(q) == x.deflate(q) * y.deflate(q)
    assert x.sharp().deflate(q) == x.deflate(q).sharp()
    assert x.deflate(q).augmentation() == x.augmentation()


@settings(max_examples=40, deadline=None)
@given(group_and_elements(2), st.data())
def test_characters_are_ring_homs(data, draw):
    G, (x, y) = data
    chi = draw.draw(st.sampled_from(G.characters()))
    assert character_apply(chi, x * y) == character_apply(chi, x) * character_apply(chi, y)
    for g in G.elements:
        for h in G.elements:
            assert chi(G.add(g, h)) == chi(g) * chi(h)
