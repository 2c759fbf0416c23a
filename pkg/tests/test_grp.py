import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permcomplex import grp


def test_sd16_orders_and_relation():
    G = grp.sd16()
    w, f = G.gen("ω"), G.gen("φ")
    assert G.order == 16
    assert G.element_order(w) == 8 and G.element_order(f) == 2
    assert G.conj(f, w) == G.power(w, 3)


def test_sd16_center_brute_force():
    G = grp.sd16()
    w = G.gen("ω")
    brute = [x for x in range(16) if all(G.mul(x, y) == G.mul(y, x) for y in range(16))]
    assert sorted(G.center()) == sorted(brute) == sorted([G.id, G.power(w, 4)])


def test_q8_embedding():
    emb = grp.q8_in_sd16()
    S = grp.sd16()
    Q = grp.q8()
    assert emb.is_injective() and len(emb.image()) == 8
    wf = emb(Q.gen("ωφ"))
    assert S.power(wf, 2) == S.power(S.gen("ω"), 4)
    involutions = [x for x in emb.image() if S.element_order(x) == 2]
    assert len(involutions) == 1
    assert set(emb.image()) == set(S.closure([S.mul(S.gen("ω"), S.gen("φ")), S.power(S.gen("ω"), 2)]))


def test_g24_structure():
    G = grp.g24()
    c, w2 = G.gen("c"), G.gen("ω²")
    assert G.order == 24
    assert G.conj(w2, c) == int(G.inv[c])
    assert G.conj(G.gen("ωφ"), c) == c
    assert G.is_normal(G.closure([c]))
    Q, proj = grp.d6_quotient()
    assert Q.order == 6 and grp.is_dihedral(Q)


def test_stated_relations_hold():
    G = grp.g24()
    wf, w2 = G.gen("ωφ"), G.gen("ω²")
    assert G.power(wf, 2) == G.power(w2, 2)


@pytest.mark.parametrize("k,order", [(1, 72), (2, 216), (3, 648)])
def test_n_level_orders(k, order):
    assert grp.n_level(k).order == order


@pytest.mark.parametrize("k", [1, 2])
def test_n_level_subgroups(k):
    G = grp.n_level(k)
    D = G.subgroups["D"]
    assert G.is_normal(D.image())
    Q, _ = grp.n_mod_d(k)
    assert Q.order == 2 * 3**k and grp.is_dihedral(Q)
    g, w2, wf = G.gen("g"), G.gen("ω²"), G.gen("ωφ")
    assert G.conj(w2, g) == int(G.inv[g]) and G.conj(wf, g) == g


def test_embedding_chain_commutes():
    G = grp.n_level(2)
    via_g24 = G.subgroups["G24"].compose(grp.g24().subgroups["Q8"])
    assert via_g24 == G.subgroups["Q8"]


def test_tower_maps():
    T = grp.tower(3)
    assert [G.order for G in T.levels] == [72, 216, 648]
    for d in T.down:
        assert d.is_surjective() and len(d.kernel()) == 3
        for name in ("G24", "Q8", "C3"):
            assert d.compose(d.src.subgroups[name]) == d.dst.subgroups[name]
    assert T.composite(2, 0) == T.down[0].compose(T.down[1])


def test_tower_requires_two_levels():
    with pytest.raises(grp.GroupError):
        grp.tower(1)
    with pytest.raises(grp.GroupError):
        grp.n_level(0)


def test_cosets():
    S = grp.sd16()
    assert grp.cosets(S, S.complement) == [S.id]
    G = grp.g24()
    T = grp.cosets(G, G.subgroups["Q8"])
    c = G.gen("c")
    assert len(T) == 3 and T[0] == G.id
    assert set(T) == {G.id, c, G.mul(c, c)}
    N1 = grp.n_level(1)
    assert len(grp.cosets(N1, N1.subgroups["G24"])) == 3


def test_coset_data_factorises_every_element():
    G = grp.g24()
    emb = G.subgroups["Q8"]
    T, which, hpart = grp.coset_data(G, emb)
    for x in range(G.order):
        assert G.mul(T[which[x]], emb(int(hpart[x]))) == x


def test_non_homomorphism_rejected():
    S = grp.sd16()
    bad = np.arange(16)
    bad[[1, 2]] = bad[[2, 1]]
    with pytest.raises(grp.GroupError):
        grp.GroupHom(S, S, bad)


def test_bad_table_rejected():
    labels = [0, 1, 2]
    table = np.array([[0, 1, 2], [1, 1, 0], [2, 0, 1]])
    with pytest.raises(grp.GroupError):
        grp.FiniteGroup("broken", labels, table, {"a": 1})


def test_by_name_returns_cached_constructors():
    assert grp.by_name("G24") is grp.g24()
    assert grp.by_name("N2") is grp.n_level(2)
    assert grp.by_name("N", {"k": 1}) is grp.n_level(1)
    with pytest.raises(grp.GroupError):
        grp.by_name("A5")


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 215), st.integers(0, 215), st.integers(0, 215))
def test_n2_associative_samples(a, b, c):
    G = grp.n_level(2)
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert G.mul(a, int(G.inv[a])) == G.id


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 647), st.integers(0, 647))
def test_down_map_is_multiplicative(x, y):
    d = grp.down_map(2)
    assert d(d.src.mul(x, y)) == d.dst.mul(d(x), d(y))
