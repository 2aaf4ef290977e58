import itertools

import numpy as np
import pytest

from kmatrix.errors import ConditionsNotVerified, NotIdempotent
from kmatrix.finring import block_count, cyclic_ring, matrix_ring, product_ring, unit_group
from kmatrix.instances import load_env, parse_pattern
from kmatrix.kdirect import iso_test, k0, k1, mv_exactness
from kmatrix.matshape import (
    Bimodule, MatrixPattern, bimodule_ring, build_subring, check_conditions, companion_C, corner_ring,
    milnor_square_thm1, poset_ring, triangular_ring,
)

Z4 = {"rings": {"R": {"cyclic": 4}}, "ideals": {"I": {"ring": "R", "gens": [[2]]}}}


def pattern(doc, spec):
    env = load_env(dict(doc, pattern=spec))
    return parse_pattern(spec, env)


def conditions(p):
    return {v.condition for v in check_conditions(p)}


def test_s_thm2_passes():
    p = pattern(Z4, {"kind": "S-thm2", "ring": "R", "n": 2, "entries": {"1,2": "I"}})
    assert check_conditions(p) == []


def test_exponent_triangle_violation():
    doc = {"rings": {"R": {"cyclic": 8}},
           "ideals": {"I": {"ring": "R", "gens": [[2]]}, "I3": {"ring": "R", "power": ["I", 3]}}}
    spec = {"kind": "S-thm2", "ring": "R", "n": 3, "entries": {"1,2": "I", "1,3": "I3", "2,3": "I"},
            "exponents": {"1,2": 1, "1,3": 3, "2,3": 1}}
    bad = [v for v in check_conditions(pattern(doc, spec)) if v.condition == "t_ij <= t_ik + t_kj"]
    assert bad and bad[0].witness == [3, 1, 1]


def test_full_pattern_passes():
    p = pattern(Z4, {"kind": "S-thm2", "ring": "R", "n": 3})
    assert check_conditions(p) == []


def test_build_examples():
    R = cyclic_ring(4)
    T = build_subring(MatrixPattern.chain_T(R, {2: R.ideal([[2]])}))
    assert T.size == 4 * 2 * 4 * 4 and len(T.slots) == 4
    one = pattern(Z4, {"kind": "S-thm2", "ring": "R", "n": 1})
    assert build_subring(one).size == 4
    F = {"rings": {"F": {"cyclic": 2}}}
    M = build_subring(pattern(F, {"kind": "S-thm2", "ring": "F", "n": 2}))
    assert M.size == 16 and len(unit_group(M)) == 6


def test_build_rechecks():
    doc = dict(Z4, ideals={"I": {"ring": "R", "gens": [[2]]}, "Z": {"ring": "R", "of": "zero"}})
    p = pattern(doc, {"kind": "S-thm2", "ring": "R", "n": 3, "entries": {"1,3": "Z"}})
    with pytest.raises(ConditionsNotVerified):
        build_subring(p)


@pytest.mark.parametrize("n", [2, 3])
def test_order_is_product_of_slots(n):
    R = cyclic_ring(4)
    I = R.ideal([[2]])
    p = MatrixPattern.lower_full(R, {(i, j): I for i in range(1, n) for j in range(i + 1, n + 1)}, kind="B-lemma32")
    B = build_subring(p)
    assert B.size == int(np.prod([s.num.order() for s in B.slots.values()]))


def test_companion_n2():
    R = cyclic_ring(4)
    I = R.ideal([[2]])
    p = MatrixPattern.lower_full(R, {(1, 2): I}, kind="B-lemma32")
    B, C = build_subring(p), companion_C(p)
    assert C.size == 16
    assert iso_test(k0(B).group, k0(C).group) and iso_test(k1(B).group, k1(C).group)


def test_companion_degenerate_quotient():
    R = cyclic_ring(4)
    p = MatrixPattern.lower_full(R, {(1, 2): R.unit_ideal()}, kind="B-lemma32")
    C = companion_C(p)
    assert C.size == 4  # only the (1,1) corner survives


def _square_elements_pullback(sq):
    # B = {(a, b') : h1(a) = f2(b')} elementwise
    E = sq.R.elements()
    pairs = {(tuple(sq.f1.apply(x)), tuple(sq.h2.apply(x))) for x in E}
    expect = {(tuple(a), tuple(b)) for a in sq.R1.elements() for b in sq.R2.elements()
              if (sq.h1.apply(a) == sq.f2.apply(b)).all()}
    return len(pairs) == len(E) and pairs == expect


def test_milnor_square_thm1_pullback():
    R = cyclic_ring(4)
    I = R.ideal([[2]])
    sq = milnor_square_thm1(MatrixPattern.lower_full(R, {(1, 2): I}, kind="S-thm1", lower=I))
    assert sq.check()["commutes"] and sq.check()["milnor"]
    assert _square_elements_pullback(sq)
    assert mv_exactness(sq).ok


def test_milnor_square_degenerate_ideals():
    R = cyclic_ring(4)
    U = R.unit_ideal()
    sq = milnor_square_thm1(MatrixPattern.lower_full(R, {(1, 2): U}, kind="S-thm1", lower=U))
    assert sq.R2.size == 1 and sq.R0.size == 1
    assert _square_elements_pullback(sq)


def test_poset_examples():
    R = cyclic_ring(4)
    I = R.ideal([[2]])
    chain = poset_ring(R, I, 2, [(1, 2)])
    anti = poset_ring(R, I, 2, [])
    assert chain.size == 4 * 2 * 4 * 4
    assert anti.size == 4 * 2 * 2 * 4


def test_bimodule_examples():
    F = cyclic_ring(2)
    A, sq = bimodule_ring(F, F, Bimodule.zero(F, F), Bimodule.zero(F, F))
    assert A.size == 4 and block_count(A) == 2
    A, sq = bimodule_ring(F, F, Bimodule.free_over_field(F, 1), Bimodule.free_over_field(F, 1))
    assert A.size == 16 and iso_test(k0(A).group, k0(product_ring(F, F)).group)
    assert mv_exactness(sq).ok
    T = triangular_ring(F, F, Bimodule.free_over_field(F, 1))
    assert T.size == 8 and not T.is_commutative


def test_corner_examples():
    F = cyclic_ring(2)
    P = product_ring(F, F)
    I = P.ideal([[1, 0]])
    B = build_subring(MatrixPattern.lower_full(P, {(1, 2): I}, kind="B-lemma32"))
    assert corner_ring(B, P.one).size == B.size
    assert corner_ring(B, [0, 0]).size == 1
    C = corner_ring(B, [1, 0])
    assert C.size == 16  # eRe = F2, entries e I e = F2
    with pytest.raises(NotIdempotent):
        corner_ring(build_subring(MatrixPattern.lower_full(cyclic_ring(4), {(1, 2): cyclic_ring(4).unit_ideal()},
                                                           kind="B-lemma32")), [2])


def test_built_rings_validate():
    R = cyclic_ring(4)
    I = R.ideal([[2]])
    for p in [MatrixPattern.chain_T(R, {2: I}), MatrixPattern.lower_full(R, {(1, 2): I}, kind="S-thm1", lower=I)]:
        B = build_subring(p)
        g = [B.gen(i) for i in range(B.dim)]
        for a, b, c in itertools.product(g, repeat=3):
            assert (B.mul(B.mul(a, b), c) == B.mul(a, B.mul(b, c))).all()
