import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmatrix.errors import IdentityViolation, SizeCapExceeded
from kmatrix.finring import (
    FiniteRing, block_count, colon_ideal, cyclic_ring, finite_field, jacobson_radical, make_ring,
    matrix_ring, poly_quotient, product_ring, quotient_ring, subring, unit_group, zero_ring,
)


def triangular(n=2):
    M = matrix_ring(cyclic_ring(n), 2)  # generators E11, E12, E21, E22
    S, _ = subring(M, M.additive([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1]]))
    return S


def brute_units(R):
    E = R.elements()
    one = np.array(R.one)
    out = []
    for a in E:
        if any((R.mul(a, b) == one).all() and (R.mul(b, a) == one).all() for b in E):
            out.append(tuple(a))
    return out


def brute_nilradical(R):
    """Nilpotent elements; equals the radical for commutative finite rings."""
    E = R.elements()
    return {tuple(a) for a in E if not R.power(a, R.size).any()}


def small_rings():
    return [cyclic_ring(4), cyclic_ring(6), product_ring(cyclic_ring(2), cyclic_ring(2)),
            triangular(2), matrix_ring(cyclic_ring(2), 2), poly_quotient(2, [1, 0, 1]), finite_field(4)]


def test_make_ring_examples():
    Z4 = make_ring([4], [[[1]]], [1])
    assert Z4.size == 4 and Z4.is_commutative
    F2F2 = make_ring([2, 2], [[[1, 0], [0, 0]], [[0, 0], [0, 1]]], [1, 1])
    assert block_count(F2F2) == 2
    # e^2 = e, x^2 = 0, ex = x, xe = 0, one = e
    with pytest.raises(IdentityViolation):
        make_ring([2, 2], [[[1, 0], [0, 1]], [[0, 0], [0, 0]]], [1, 0])


@pytest.mark.parametrize("R", small_rings(), ids=lambda R: f"order{R.size}")
def test_axioms_full_triple_loop(R):
    g = [R.gen(i) for i in range(R.dim)]
    for a, b, c in itertools.product(g, repeat=3):
        assert (R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))).all()
    for a in g:
        assert (R.mul(np.array(R.one), a) == a % R._d).all()
        assert (R.mul(a, np.array(R.one)) == a % R._d).all()


def test_ideal_examples():
    Z4 = cyclic_ring(4)
    assert Z4.ideal([[2]]).order() == 2
    P = product_ring(cyclic_ring(2), cyclic_ring(2))
    assert P.ideal([[1, 0]]).order() == 2
    T = triangular(2)
    strict = [g for g in (T.gen(i) for i in range(T.dim)) if not T.mul(g, g).any()]
    assert T.ideal(strict).order() == 2


def test_quotient_examples():
    Z4 = cyclic_ring(4)
    Q, pi = quotient_ring(Z4, Z4.ideal([[2]]))
    assert Q.size == 2
    Q, _ = quotient_ring(Z4, Z4.unit_ideal())
    assert Q.size == 1
    Z8 = cyclic_ring(8)
    Q, pi = quotient_ring(Z8, Z8.ideal([[4]]))
    assert Q.size == 4 and pi.is_surjective


def test_colon_examples():
    Z8 = cyclic_ring(8)
    I, J = Z8.ideal([[2]]), Z8.ideal([[4]])
    assert colon_ideal(I, Z8.unit_ideal()) == Z8.unit_ideal()
    assert colon_ideal(Z8.unit_ideal(), I) == I
    brute = {x for x in range(8) if all((i * x) % 8 in {0, 4} for i in (0, 2, 4, 6))}
    assert colon_ideal(I, J).order() == len(brute) == 4


def test_radical_examples():
    P = product_ring(cyclic_ring(2), cyclic_ring(2))
    assert jacobson_radical(P).is_zero
    Z4 = cyclic_ring(4)
    assert jacobson_radical(Z4) == Z4.ideal([[2]])
    T = triangular(2)
    rad = jacobson_radical(T)
    assert rad.order() == 2
    assert all(not T.mul(a, b).any() for a in rad.elements() for b in rad.elements())


@pytest.mark.parametrize("n", [4, 6, 8, 9, 12])
def test_radical_matches_nilradical_commutative(n):
    R = cyclic_ring(n)
    rad = jacobson_radical(R)
    assert {tuple(x) for x in rad.elements()} == brute_nilradical(R)


def test_radical_properties():
    for R in small_rings():
        rad = jacobson_radical(R)
        Q, _ = quotient_ring(R, rad)
        assert jacobson_radical(Q).is_zero
        P, k = rad, 1
        while not P.is_zero:
            P, k = P * rad, k + 1
            assert k <= R.size


def test_unit_examples():
    assert len(unit_group(cyclic_ring(4))) == 2
    assert len(unit_group(product_ring(cyclic_ring(2), cyclic_ring(2)))) == 1
    assert len(unit_group(matrix_ring(cyclic_ring(2), 2))) == 6


@pytest.mark.parametrize("R", small_rings(), ids=lambda R: f"order{R.size}")
def test_units_brute_force(R):
    U = unit_group(R)
    assert sorted(map(tuple, U.elements.tolist())) == sorted(brute_units(R))


def test_block_count_examples():
    assert block_count(cyclic_ring(4)) == 1
    assert block_count(product_ring(cyclic_ring(2), cyclic_ring(2))) == 2
    assert block_count(matrix_ring(cyclic_ring(2), 2)) == 1
    assert block_count(product_ring(cyclic_ring(2), cyclic_ring(3))) == 2
    assert block_count(cyclic_ring(6)) == 2


def test_product_with_zero_ring():
    R = product_ring(cyclic_ring(3), zero_ring())
    assert R.size == 3 and block_count(R) == 1


def test_enumeration_cap():
    with pytest.raises(SizeCapExceeded):
        cyclic_ring(64).elements(cap=10)


def test_json_roundtrip():
    T = triangular(4)
    U = FiniteRing.from_json(T.to_json())
    assert U.size == T.size and (U.C == T.C).all()


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4))
def test_units_multiply_in_products(a, b):
    R1, R2 = cyclic_ring(a), cyclic_ring(b)
    assert len(unit_group(product_ring(R1, R2))) == len(unit_group(R1)) * len(unit_group(R2))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([8, 12, 16, 18, 24]), st.data())
def test_quotient_composes(n, data):
    # (R/I)/(J/I) and R/J have the same order and block count
    divs = [d for d in range(1, n + 1) if n % d == 0]
    j = data.draw(st.sampled_from(divs))
    i = data.draw(st.sampled_from([d for d in divs if d % j == 0]))
    R = cyclic_ring(n)
    I, J = R.ideal([[i % n]]), R.ideal([[j % n]])
    Q1, pi = quotient_ring(R, I)
    JI = Q1.ideal(pi.apply_many(J.basis) if J.basis else [])
    Q2, _ = quotient_ring(Q1, JI)
    Q3, _ = quotient_ring(R, J)
    assert Q2.size == Q3.size and block_count(Q2) == block_count(Q3)
