import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permcomplex import exactla as la
from permcomplex import grp, homalg, rep
from permcomplex.homalg import sequences
from permcomplex.homalg.complexes import ChainComplex, CoveringHom, TowerComplex

F3 = la.PrimeField(3)
Z3 = la.PLocal(3)


@pytest.fixture(scope="module")
def g24():
    return grp.g24()


def _triv(G, R=F3):
    return rep.trivial(G, R)


# -- covers ------------------------------------------------------------------------


def test_cover_of_trivial_over_g24(g24):
    cov = homalg.projective_cover(_triv(g24))
    assert cov.rank == 3
    assert {n: c for n, c in cov.summands if c} == {"triv": 1}
    P = rep.induce(rep.trivial(grp.q8(), F3), g24.subgroups["Q8"])
    assert rep.isomorphism(cov.module, P) is not None
    assert la.rank_mod(cov.map.matrix, 3) == 1  # onto the rank-one module
    assert homalg.top(cov.module).dim == 1  # local: simple top


def test_cover_in_semisimple_case():
    chi = rep.character_module(rep.chi(), F3)
    cov = homalg.projective_cover(chi)
    assert cov.rank == 1


def test_cover_of_regular_is_itself(g24):
    cov = homalg.projective_cover(rep.regular(g24, F3))
    assert cov.rank == 24


# -- resolutions ---------------------------------------------------------------------


def test_semisimple_resolutions_stop():
    res = homalg.minimal_resolution(_triv(grp.sd16()), 3)
    assert [P.rank for P in res.terms] == [1, 0, 0, 0]
    res = homalg.minimal_resolution(_triv(grp.q8()), 2)
    assert [P.rank for P in res.terms] == [1, 0, 0]


def test_trivial_g24_cohomology_pattern(g24):
    res = homalg.minimal_resolution(_triv(g24), 4)
    col = res.table.columns.index("triv")
    assert [row[col] for row in res.table.rows] == [1, 0, 0, 1, 1]


def test_differentials_compose_to_zero(g24):
    res = homalg.minimal_resolution(_triv(g24), 3)
    for a, b in zip(res.differentials, res.differentials[1:]):
        assert not np.any((a.matrix @ b.matrix) % 3)


def test_heller_of_projective_is_zero(g24):
    P = rep.regular(g24, F3)
    assert homalg.heller(P).omega.rank == 0
    assert homalg.stable_hom(P, _triv(g24)) == 0


def test_omega4_of_trivial(g24):
    O4 = homalg.heller_power(_triv(g24), 4)
    assert O4.rank == 1
    assert rep.isomorphism(O4, _triv(g24)) is not None


def test_stable_hom_detects_nonprojective(g24):
    assert homalg.stable_hom(_triv(g24), _triv(g24)) == 1


# -- Ext ---------------------------------------------------------------------------


def test_ext_examples(g24):
    e0 = homalg.ext_dim(_triv(g24), _triv(g24), 0)
    assert e0.minimal == e0.free == 1
    table = homalg.ext_table(_triv(g24), 4)
    assert [e.free for e in table if e.simple == "triv"] == [1, 0, 0, 1, 1]
    assert all(e.agree for e in table)


def test_ext_vanishes_over_sd16():
    for S in rep.simples_sd16():
        table = homalg.ext_table(S, 2)
        assert all(e.free == 0 for e in table if e.r >= 1)


def test_ext_agrees_for_theta_twist(g24):
    M = rep.character_module(rep.theta_on(g24), F3)
    assert all(e.agree for e in homalg.ext_table(M, 4))


@pytest.mark.parametrize("redundant", [0, 2])
def test_ext_independent_of_free_resolution_size(g24, redundant):
    res = homalg.free_resolution(_triv(g24), 4, redundant=redundant)
    dims = homalg.projective.ext_dims_free(res, _triv(g24), 3)
    assert dims == [1, 0, 0, 1]


def test_free_resolution_is_not_minimal(g24):
    res = homalg.free_resolution(_triv(g24), 3)
    mini = homalg.minimal_resolution(_triv(g24), 3)
    free_rank = [a * g24.order for a in res.ranks]
    mini_rank = [P.rank for P in mini.terms]
    assert all(f > m for f, m in zip(free_rank, mini_rank))


# -- projectivity ------------------------------------------------------------------


def test_is_projective_examples(g24):
    N1 = grp.n_level(1)
    I = rep.induce(rep.trivial(grp.q8(), Z3), N1.subgroups["Q8"])
    assert homalg.is_projective(I)
    assert not homalg.is_projective(_triv(g24))
    for S in rep.simples_sd16():
        assert homalg.is_projective(S)
    R = la.Truncation(3, 4)
    assert homalg.is_projective(rep.induce(rep.trivial(grp.q8(), R), g24.subgroups["Q8"]))
    assert not homalg.is_projective(_triv(g24, R))


# -- Fitting -----------------------------------------------------------------------


def _pair(g24, m=4):
    R = la.Truncation(3, m)
    return rep.direct_sum(_triv(g24, R), _triv(g24, R))


def test_fitting_identity(g24):
    M = _pair(g24)
    r = homalg.fitting(M, np.eye(2, dtype=np.int64))
    assert r.ranks == (2, 0) and r.ok


def test_fitting_three_times_identity(g24):
    M = _pair(g24)
    r = homalg.fitting(M, 3 * np.eye(2, dtype=np.int64))
    assert r.ranks == (0, 2) and r.ok


def test_fitting_diag_unit_three(g24):
    M = _pair(g24)
    r = homalg.fitting(M, np.diag([2, 3]))
    assert r.ranks == (1, 1) and r.ok


def test_fitting_rejects_non_equivariant(g24):
    R = la.Truncation(3, 2)
    M = rep.induce(_triv(grp.q8(), R), g24.subgroups["Q8"])
    f = np.zeros((3, 3), dtype=np.int64)
    f[0, 0] = 1
    with pytest.raises(rep.EquivarianceError):
        homalg.fitting(M, f)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_fitting_random_endomorphisms(seed):
    recipe = homalg.random_recipe(seed, max_rank=8)
    M = recipe.build(5)
    f = homalg.random_endomorphism(M, np.random.default_rng(seed))
    r = homalg.fitting(M, f)
    assert r.ok
    assert sum(r.ranks) == M.rank


# -- Krull–Schmidt -----------------------------------------------------------------


def test_ks_regular_sd16():
    M = rep.regular(grp.sd16(), la.Truncation(3, 4))
    r = homalg.ks_decompose(M, seed=1, basis_changes=2)
    types = r.multiset()
    assert len(types) == 7
    assert sorted(types.values()) == [1, 1, 1, 1, 2, 2, 2]
    assert r.stable_under_basis_change and r.stable_under_precision_bump


def test_ks_p_plus_p(g24):
    R = la.Truncation(3, 3)
    P = rep.induce(_triv(grp.q8(), R), g24.subgroups["Q8"])
    r = homalg.ks_decompose(rep.direct_sum(P, P), seed=0, basis_changes=2)
    assert list(r.multiset().values()) == [2]


def test_ks_ind_c3(g24):
    R = la.Truncation(3, 4)
    M = rep.induce(_triv(grp.c3(), R), g24.subgroups["C3"])
    r = homalg.ks_decompose(M, seed=3, basis_changes=10)
    assert r.total_rank == 8
    assert r.stable_under_basis_change and not r.flags


def test_ks_requires_truncation(g24):
    with pytest.raises(homalg.DecompositionError):
        homalg.ks_decompose(_triv(g24), seed=0)


def test_newton_idempotent_lifts():
    e0 = np.array([[1, 3], [0, 0]])
    e = homalg.decompose.newton_idempotent(e0, 3, 5)
    q = 3**5
    assert np.array_equal((e @ e) % q, e % q)
    assert np.array_equal(e % 3, e0 % 3)


# -- exactness ---------------------------------------------------------------------


def test_d6_sequence_exact():
    C = sequences.d6_sequence()
    assert C.ranks() == [1, 3, 3, 1]
    assert homalg.check_exact(C).exact


def test_identity_complex_exact(g24):
    M = _triv(g24, Z3)
    N = rep.trivial(g24, Z3)
    C = ChainComplex([M, N], [rep.ModuleHom(M, N, np.eye(1, dtype=np.int64))])
    assert homalg.check_exact(C).exact


def test_multiplication_by_three_has_torsion(g24):
    M, N = _triv(g24, Z3), rep.trivial(g24, Z3)
    C = ChainComplex([M, N], [rep.ModuleHom(M, N, np.array([[3]]))])
    cert = homalg.check_exact(C)
    assert cert.nonexact_positions == [1]
    assert cert.reports[1].torsion_valuations == (1,)


def test_nonzero_composite_rejected(g24):
    A, B, C = (rep.trivial(g24, Z3) for _ in range(3))
    one = np.eye(1, dtype=np.int64)
    with pytest.raises(la.CompositionError):
        ChainComplex([A, B, C], [rep.ModuleHom(A, B, one), rep.ModuleHom(B, C, one)])


def test_check_exact_invariant_under_basis_change():
    C = sequences.d6_sequence()
    rng = np.random.default_rng(5)
    mods, Bs = [], []
    for M in C.modules:
        while True:
            B = rng.integers(-2, 3, size=(M.rank, M.rank))
            if la.rank_mod(B, 3) == M.rank:
                break
        Bs.append(B)
        mods.append(rep.change_basis(M, B))
    diffs = []
    for j, d in enumerate(C.diffs):
        mat = Z3.matmul(Z3.matmul(rep.inverse(Z3, Bs[j + 1]), d.matrix), Bs[j])
        diffs.append(rep.ModuleHom(mods[j], mods[j + 1], mat))
    assert homalg.check_exact(ChainComplex(mods, diffs)).exact


# -- towers ------------------------------------------------------------------------


def test_sequence_1_tower_certified():
    T = sequences.build_tower(sequences.sequence_1, 3)
    cert = homalg.tower_check(T)
    assert cert.nonzero_positions == [0]
    assert all(str(row[0]) == "R^1" for row in cert.homology)
    assert cert.certified and cert.checks


def test_sequence_2_tower_vacuous():
    cert = homalg.tower_check(sequences.build_tower(sequences.sequence_2, 3))
    assert cert.exact_at_every_level and cert.certified and not cert.checks


def test_splice_middle_terms_projective():
    for k in (1, 2):
        C = sequences.splice(k)
        assert homalg.is_projective(C.modules[1]) and homalg.is_projective(C.modules[2])


def test_identity_tower_is_not_certified():
    tw = grp.tower(2)
    levels = [ChainComplex([rep.trivial(G, Z3)], []) for G in tw.levels]
    t = CoveringHom(levels[1].modules[0], levels[0].modules[0], np.eye(1, dtype=np.int64), tw.down[0])
    T = TowerComplex(tw, levels, [[t]])
    cert = homalg.tower_check(T)
    assert cert.nonzero_positions == [0] and not cert.certified


def test_tower_depth_refused():
    with pytest.raises(ValueError):
        sequences.build_tower(sequences.sequence_1, sequences.MAX_LEVEL + 1)
    with pytest.raises(ValueError):
        sequences.sequence_1(0)


def test_sign_identity_is_what_makes_sequence_1_equivariant():
    # with θ replaced by the trivial character the map 1 ↦ (g - g⁻¹) is not equivariant
    G = grp.n_level(1)
    A = rep.induce(rep.trivial(grp.g24(), Z3), G.subgroups["G24"])
    B = rep.induce(rep.trivial(grp.g24(), Z3), G.subgroups["G24"])
    g = G.gen("g")
    e0 = np.zeros((B.rank, 1), dtype=np.int64)
    e0[0, 0] = 1
    img = rep.algebra_apply(B, {g: 1, int(G.inv[g]): -1}, e0)
    with pytest.raises(rep.EquivarianceError):
        rep.frobenius_map(A, B, img)
