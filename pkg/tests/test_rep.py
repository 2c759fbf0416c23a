import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permcomplex import exactla as la
from permcomplex import grp, rep

F3 = la.PrimeField(3)
Z3 = la.PLocal(3)


def _sd16_simple(name):
    return {S.name: S for S in rep.simples_sd16()}[name]


# -- characters ------------------------------------------------------------------


def test_chi_values():
    ch = rep.chi()
    S = grp.sd16()
    w, f = S.gen("ω"), S.gen("φ")
    assert ch(w) == -1 and ch(f) == -1
    assert ch(S.power(w, 4)) == 1


def test_theta_values_and_inflation():
    th = rep.theta()
    Q = grp.q8()
    assert th(Q.gen("ωφ")) == 1 and th(Q.gen("ω²")) == -1
    G = grp.g24()
    t24 = rep.theta_on(G)
    assert t24(G.gen("c")) == 1 and t24(G.gen("ω²")) == -1


def test_bad_character_rejected():
    # an element of order 3 cannot map to -1
    with pytest.raises(rep.ActionError):
        rep.CharacterData(grp.c3(), {"c": -1})


# -- audit -----------------------------------------------------------------------


def test_audit_names_failing_pair():
    S = grp.sd16()
    gens = _sd16_simple("F9[z]").gen_mats()
    bad = dict(gens)
    bad["φ"] = np.array([[1, 1], [0, 2]])
    with pytest.raises(rep.ActionError) as e:
        rep.RepModule.from_generators(S, F3, bad)
    assert e.value.pair is not None


def test_from_generators_reconstructs_action():
    M = rep.induce(rep.character_module(rep.theta(), Z3), grp.g24().subgroups["Q8"])
    N = rep.RepModule.from_generators(M.group, Z3, M.gen_mats())
    assert np.array_equal(M.dense(), N.dense())


# -- induction and adjunction ------------------------------------------------------


def test_induce_rank_and_identity_case():
    G = grp.g24()
    I = rep.induce(rep.trivial(grp.q8(), F3), G.subgroups["Q8"])
    assert I.rank == 3
    S = _sd16_simple("F9[z]")
    same = rep.induce(S, grp.sd16().complement)
    assert rep.isomorphism(same, S) is not None


def test_induce_hom_is_equivariant_and_keeps_rank():
    Q = grp.q8()
    aug = rep.ModuleHom(rep.regular(Q, F3), rep.trivial(Q, F3), np.ones((1, 8), dtype=np.int64))
    up = rep.induce_hom(aug, grp.g24().subgroups["Q8"])
    up.check()
    assert (up.dst.rank, up.src.rank) == (3, 24)
    assert la.rank_mod(up.matrix, 3) == 3


def _q8_modules():
    return rep.simples_q8(F3)


def _g24_modules():
    G = grp.g24()
    out = list(rep.simples(G, F3))
    out.append(rep.induce(rep.trivial(grp.c3(), F3), G.subgroups["C3"], name="Ind_C3"))
    out.append(rep.regular(G, F3))
    return out


@pytest.mark.parametrize("i,j", list(itertools.product(range(5), range(7))))
def test_frobenius_reciprocity(i, j):
    G = grp.g24()
    emb = G.subgroups["Q8"]
    M = _q8_modules()[i]
    V = _g24_modules()[j]
    lhs = rep.hom_dim(rep.induce(M, emb), V)
    rhs = rep.hom_dim(M, rep.restrict(V, emb))
    assert lhs == rhs


# -- functors ------------------------------------------------------------------


def test_twist_twice_is_identity():
    M = rep.regular(grp.sd16(), F3)
    ch = rep.chi()
    T = rep.twist(rep.twist(M, ch), ch)
    assert np.array_equal(T.dense() % 3, M.dense() % 3)


def test_twist_preserves_rank_over_tower():
    G = grp.n_level(1)
    I = rep.induce(rep.trivial(grp.g24(), Z3), G.subgroups["G24"])
    assert rep.twist(I, rep.theta_on(G)).rank == I.rank


def test_dual_of_trivial_and_double_dual():
    S = grp.sd16()
    assert rep.isomorphism(rep.dual(rep.trivial(S, F3)), rep.trivial(S, F3)) is not None
    M = _sd16_simple("F9[z]")
    assert np.array_equal(rep.dual(rep.dual(M)).dense() % 3, M.dense() % 3)


def test_faithful_pair_are_mutually_dual():
    a, b = _sd16_simple("F9[z]"), _sd16_simple("F9[z^5]")
    assert rep.isomorphism(rep.dual(a), b) is not None
    assert rep.isomorphism(a, b) is None


def test_tensor_with_trivial():
    M = _sd16_simple("F9[z^2]")
    T = rep.tensor(M, rep.trivial(grp.sd16(), F3))
    assert rep.isomorphism(T, M) is not None


def test_chi_tensor_swaps_faithful_simples():
    # χ ⊗ F9[z] is one of the two faithful simples
    a = _sd16_simple("F9[z]")
    T = rep.tensor(rep.character_module(rep.chi(), F3), a)
    names = [S.name for S in rep.simples_sd16() if S.rank == 2 and rep.isomorphism(T, S) is not None]
    assert len(names) == 1 and names[0] in ("F9[z]", "F9[z^5]")


# -- Hom spaces and multiplicities --------------------------------------------------


def test_hom_examples():
    S = grp.sd16()
    chi = rep.character_module(rep.chi(), F3)
    triv = rep.trivial(S, F3)
    assert rep.hom_dim(chi, chi) == 1
    assert rep.hom_dim(chi, triv) == 0
    G = grp.g24()
    I = rep.induce(rep.trivial(grp.q8(), F3), G.subgroups["Q8"])
    assert rep.hom_dim(I, rep.trivial(G, F3)) == 1


def test_hom_space_refuses_truncation():
    M = rep.trivial(grp.sd16(), la.Truncation(3, 2))
    with pytest.raises(la.RingError):
        rep.hom_space(M, M)


def test_hom_space_elements_intertwine():
    G = grp.g24()
    I = rep.induce(rep.trivial(grp.q8(), F3), G.subgroups["Q8"])
    for f in rep.hom_space(I, I):
        for g in range(G.order):
            assert np.array_equal(f.matrix @ I.mat(g) % 3, I.mat(g) @ f.matrix % 3)


def test_multiplicity_examples():
    S = grp.sd16()
    reg = rep.regular(S, F3)
    triv = rep.trivial(S, F3)
    chi = rep.character_module(rep.chi(), F3)
    assert rep.multiplicity(triv, reg).normalized == 1
    assert rep.multiplicity(chi, rep.direct_sum(chi, chi)).normalized == 2
    total = sum(rep.multiplicity(s, reg).normalized * s.rank for s in rep.simples_sd16())
    assert total == 16


def test_multiplicity_refuses_modular_case():
    G = grp.g24()
    with pytest.raises(la.RingError):
        rep.multiplicity(rep.trivial(G, F3), rep.regular(G, F3))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=4))
def test_multiplicity_is_additive(idx):
    simples = rep.simples_sd16()
    V = rep.direct_sum(*[simples[i] for i in idx])
    for S in simples:
        assert rep.multiplicity(S, V).normalized == sum(1 for i in idx if simples[i].name == S.name)


# -- simples -------------------------------------------------------------------


def test_sd16_simples_census():
    S = rep.simples_sd16()
    assert len(S) == 7
    assert sorted(s.rank for s in S) == [1, 1, 1, 1, 2, 2, 2]
    assert sum(s.rank**2 for s in S) == 16
    assert "chi" in [s.name for s in S]
    for a in S:
        for b in S:
            assert rep.hom_dim(a, b) == (1 if a is b else 0)


def test_f9_simple_is_field_multiplication_and_frobenius():
    S = grp.sd16()
    M = _sd16_simple("F9[z]")
    w, f = M.mat(S.gen("ω")), M.mat(S.gen("φ"))
    assert np.array_equal(np.linalg.matrix_power(w, 8) % 3, np.eye(2))
    assert not np.array_equal(np.linalg.matrix_power(w, 4) % 3, np.eye(2))
    assert np.array_equal(f % 3, np.diag([1, 2]))


def test_q8_simples():
    S = rep.simples_q8(F3)
    assert sorted(s.rank for s in S) == [1, 1, 1, 1, 2]
    assert sum(s.rank**2 for s in S) == 8


@pytest.mark.parametrize("m", [1, 3, 8])
def test_two_dimensional_lift_reduces_to_simple(m):
    H2 = rep.simples_q8(F3)[4]
    L = rep.lift_simple(H2, la.Truncation(3, m))
    assert np.array_equal(L.dense() % 3, H2.dense() % 3)


def test_submodule_and_quotient():
    G = grp.g24()
    I = rep.induce(rep.trivial(grp.q8(), F3), G.subgroups["Q8"])
    norm = np.ones((3, 1), dtype=np.int64)
    U, inc = rep.submodule(I, norm)
    Q, proj = rep.quotient(I, norm)
    assert U.rank == 1 and Q.rank == 2
    assert not np.any((proj.matrix @ inc.matrix) % 3)


def test_non_equivariant_hom_rejected():
    S = grp.sd16()
    triv, chi = rep.trivial(S, F3), rep.character_module(rep.chi(), F3)
    with pytest.raises(rep.EquivarianceError):
        rep.ModuleHom(triv, chi, np.array([[1]]))
