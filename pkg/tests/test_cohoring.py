import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permcomplex import cohoring as co
from permcomplex import exactla as la
from permcomplex import grp

x1, x2, y1, y2, a1, a2 = (co.gen(n) for n in ("x1", "x2", "y1", "y2", "a1", "a2"))
w = co.gen("w")


@pytest.fixture(scope="module")
def rows():
    return co.ledger(6)


def test_monomial_degree():
    assert co.Monomial(1, 2, 1, 1).degree == 6
    with pytest.raises(ValueError):
        co.Monomial(3)


def test_anticommutation():
    assert a1 * x1 == -(x1 * a1)


def test_cross_component_products_vanish():
    assert (x1 * x2).is_zero()
    assert (w * x1).is_zero()


def test_exterior_squares_vanish():
    assert (x1 * x1).is_zero() and (a2 * a2).is_zero()
    assert not (y1 * y1).is_zero()


def test_unit():
    u = co.gen("unit")
    for e in (x1, y2, w):
        assert u * e == e and e * u == e


def test_omega_on_generators():
    W = grp.sd16().gen("ω")
    assert co.sd16_action(W, x1) == x2
    assert co.sd16_action(W, x2) == -x1


def test_action_on_products():
    W, F = grp.sd16().gen("ω"), grp.sd16().gen("φ")
    assert co.sd16_action(W, y1 * a1) == y2 * a2
    assert co.sd16_action(W, y2 * a2) == y1 * a1
    assert co.sd16_action(F, w) == x2 * a2 - x1 * a1


def test_action_words_match_labels():
    G = grp.sd16()
    u = co.gen("y1a1") + y2 * x2
    for g in range(G.order):
        a, b = G.labels[g]
        assert co.sd16_action(g, u) == co.sd16_action("ω" * a + "φ" * b, u)


def test_action_audit_passes():
    co.audit_action(8)


def test_action_is_a_left_action():
    G = grp.sd16()
    u = y1 * x1 * a1 + co.gen("y2a2") * x2
    for g in range(G.order):
        for h in range(G.order):
            assert co.sd16_action(G.mul(g, h), u) == co.sd16_action(g, co.sd16_action(h, u))


@pytest.mark.parametrize("d,dim", [(0, 1), (1, 2), (2, 3), (3, 4)])
def test_subalgebra_dims(d, dim):
    assert len(co.subalgebra_basis(d)) == dim


def _span(elements, d):
    basis = co.monomials(d)
    return la.rank_mod(np.stack([e.vector(basis) for e in elements]), 3)


def test_subalgebra_degree_2_and_3_bases():
    B2 = co.subalgebra_basis(2)
    assert _span(B2, 2) == _span(B2 + [y1, y2, w], 2) == 3
    B3 = co.subalgebra_basis(3)
    expected = [y1 * x1, y2 * x2, y1 * a1, y2 * a2]
    assert _span(B3, 3) == _span(B3 + expected, 3) == 4


def test_subalgebra_is_stable_under_action():
    G = grp.sd16()
    for d in range(5):
        B = co.subalgebra_basis(d)
        for g in G.gens.values():
            imgs = [co.sd16_action(g, b) for b in B]
            assert _span(B + imgs, d) == len(B)


def test_rho_examples():
    assert co.rho(w).is_zero()
    assert co.rho(y1) == y1
    assert co.rho(co.gen("y1a1") + co.gen("y2a2")).is_zero()


def _rand_element(data, d):
    basis = co.subalgebra_basis(d, max(d, 6))
    coeffs = data.draw(st.lists(st.integers(0, 2), min_size=len(basis), max_size=len(basis)))
    u = co.GradedElement({}, d)
    for c, b in zip(coeffs, basis):
        u = u + b.scale(c)
    return u


@settings(max_examples=60, deadline=None)
@given(st.data(), st.integers(0, 3), st.integers(0, 3))
def test_rho_is_multiplicative(data, d1, d2):
    u, v = _rand_element(data, d1), _rand_element(data, d2)
    assert co.rho(u * v) == co.rho(u) * co.rho(v)


@settings(max_examples=60, deadline=None)
@given(st.data(), st.integers(0, 3), st.integers(0, 3), st.sampled_from(["ω", "φ"]))
def test_action_is_multiplicative(data, d1, d2, letter):
    G = grp.sd16()
    g = G.gen(letter)
    u, v = _rand_element(data, d1), _rand_element(data, d2)
    assert co.sd16_action(g, u * v) == co.sd16_action(g, u) * co.sd16_action(g, v)


def test_ledger_rows_0_to_3(rows):
    assert rows[0].cokernel == {"chi": 1} and rows[0].kernel == {}
    assert rows[1].cokernel == {} and rows[1].kernel == {}
    assert rows[2].cokernel == {} and rows[2].kernel == {"chi": 1}
    assert rows[3].cokernel == {} and rows[3].kernel == {"triv": 1, "chi": 1}
    assert rows[2].kernel_basis == ["x1a1 - x2a2"]


def test_ledger_isotypic_spans(rows):
    iso = rows[3].kernel_isotypic
    assert iso["triv"] == [str(co.gen("y1a1") + co.gen("y2a2"))]
    # y1a1 - y2a2 up to a scalar
    assert iso["chi"][0] in (str(co.gen("y1a1") - co.gen("y2a2")), str(co.gen("y2a2") - co.gen("y1a1")))


def test_ledger_arithmetic(rows):
    for r in rows:
        assert r.dim_kernel + r.dim_image == r.dim_subalgebra
        assert r.dim_cokernel == r.dim_target - r.dim_image
        assert r.normative == (r.degree <= 3)


def test_ledger_needs_degree_three():
    with pytest.raises(ValueError):
        co.ledger(2)


def test_duals():
    d = co.dual_names()
    assert d["F9[z]"] == "F9[z^5]" and d["F9[z^5]"] == "F9[z]"
    assert all(d[n] == n for n in ("triv", "chi", "sgn_ω", "sgn_φ", "F9[z^2]"))


def test_n1_table(rows):
    t = co.n1_multiplicity_table(2, rows)
    assert t.rows == [{"chi": 1}, {"chi": 1}, {"triv": 1, "chi": 1}]


def test_n1_table_needs_ledger_depth():
    short = co.ledger(3)
    with pytest.raises(ValueError):
        co.n1_multiplicity_table(3, short)
