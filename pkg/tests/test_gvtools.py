import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmatrix.errors import ChainBroken, NotTwoSided
from kmatrix.finring import cyclic_ring, matrix_ring, product_ring, subring
from kmatrix.gvtools import chain_end_ring, gv_property_check, is_gv, random_commutative_instance
from kmatrix.kdirect import k0


def brute_annihilator(R, I):
    return [tuple(x) for x in R.elements() if all(not R.mul(a, x).any() for a in I.elements())]


def test_unit_ideal_is_gv():
    for R in (cyclic_ring(4), product_ring(cyclic_ring(2), cyclic_ring(3)), matrix_ring(cyclic_ring(2), 2)):
        c = is_gv(R, R.unit_ideal())
        assert c.gv and c.routes_agree and c.recheck()


def test_not_gv_examples():
    Z9 = cyclic_ring(9)
    c = is_gv(Z9, Z9.ideal([[3]]))
    assert c.verdict == "not-GV" and c.routes_agree
    assert c.witness["kind"] == "annihilator" and c.witness["element"] in ([3], [6])
    P = product_ring(cyclic_ring(2), cyclic_ring(2))
    c = is_gv(P, P.ideal([[1, 0]]))
    assert not c.gv and c.witness["element"] == [0, 1]


def test_one_sided_rejected():
    M = matrix_ring(cyclic_ring(2), 2)
    with pytest.raises(NotTwoSided):
        is_gv(M, M.ideal([[1, 0, 0, 0]], side="left"))


def test_trivial_chain_agrees():
    B = cyclic_ring(4)
    rep = chain_end_ring(B, [B.unit_ideal(), B.unit_ideal()])
    assert rep.isomorphic and rep.hom_ring.size == rep.colon_ring.size == 4 ** 4
    F2 = cyclic_ring(2)
    rep = chain_end_ring(F2, [F2.unit_ideal()] * 3)
    assert rep.isomorphic and rep.hom_ring.size == 2 ** 9
    assert k0(rep.hom_ring).group.free_rank == 1


def test_chain_with_non_gv_ideal():
    B = cyclic_ring(4)
    rep = chain_end_ring(B, [B.unit_ideal(), B.ideal([[2]])])
    assert not rep.isomorphic
    slots = rep.to_json()["slots"]
    assert rep.gv_last.verdict == "not-GV"
    assert not all(s["injective"] and s["onto"] for s in slots.values())


def test_broken_chain():
    B = cyclic_ring(4)
    with pytest.raises(ChainBroken):
        chain_end_ring(B, [B.ideal([[2]]), B.unit_ideal()])


def test_property_report():
    B = cyclic_ring(4)
    rep = gv_property_check(B, {"B": B.unit_ideal(), "J": B.ideal([[2]])})
    assert rep["ideals"]["B"]["ok"] and rep["ideals"]["B"]["annihilator_zero"]
    assert rep["products"]["B*B"]
    J = rep["ideals"]["J"]
    assert J["verdict"] == "not-GV" and not J["annihilator_zero"] and J["annihilator_witness"] == [2]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_routes_agree_random(seed):
    R, I = random_commutative_instance(np.random.default_rng(seed))
    c = is_gv(R, I)
    assert c.routes_agree and c.recheck()
    if c.gv:
        assert brute_annihilator(R, I) == [tuple([0] * R.dim)]
    else:
        assert c.witness is not None


def test_noncommutative_triangular():
    # two-sided ideals of the 2x2 upper triangular ring over F2
    A = matrix_ring(cyclic_ring(2), 2)
    T, _ = subring(A, A.additive([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1]]))
    for I in (T.unit_ideal(), T.radical):
        c = is_gv(T, I)
        assert c.routes_agree
        assert c.gv == (brute_annihilator(T, I) == [tuple([0] * T.dim)] and c.mu_surjective)
