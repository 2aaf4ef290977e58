import itertools
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmatrix.abgroup import FgAbGroup, LocalizedAbGroup, direct_sum, iso_test, localize, mod_p, snf


def minors_gcd(M, k):
    """gcd of all k x k minors, by brute force."""
    m, n = len(M), len(M[0]) if M else 0
    g = 0
    for rows in itertools.combinations(range(m), k):
        for cols in itertools.combinations(range(n), k):
            g = gcd(g, _det([[M[i][j] for j in cols] for i in rows]))
    return g


def _det(A):
    if len(A) == 1:
        return A[0][0]
    return sum((-1) ** j * A[0][j] * _det([r[:j] + r[j + 1:] for r in A[1:]]) for j in range(len(A)))


def invariants_oracle(M):
    """Invariant factors from determinantal divisors d_k = g_k / g_{k-1}."""
    out, prev = [], 1
    m, n = len(M), len(M[0]) if M else 0
    for k in range(1, min(m, n) + 1):
        g = minors_gcd(M, k)
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)))

groups = st.builds(
    lambda r, t: FgAbGroup(r, tuple(t)),
    st.integers(0, 3), st.lists(st.integers(1, 30), max_size=4))


def test_snf_examples():
    assert snf([[1, 0], [0, 1]]).invariants == [1, 1]
    assert snf([[2, 0], [0, 3]]).invariants == [1, 6]
    assert snf([[0, 0, 0], [0, 0, 0]]).invariants == []


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_matches_determinantal_divisors(M):
    assert snf(M).invariants == invariants_oracle(M)


def test_iso_examples():
    assert iso_test(FgAbGroup(1), FgAbGroup(1))
    assert not iso_test(direct_sum([FgAbGroup.cyclic(2)] * 2), FgAbGroup.cyclic(4))
    assert iso_test(FgAbGroup.cyclic(6), direct_sum([FgAbGroup.cyclic(2), FgAbGroup.cyclic(3)]))


def test_normal_form():
    G = FgAbGroup(0, (1, 6, 4))
    assert G.invariant_factors == (2, 12)
    assert all(d >= 2 for d in G.invariant_factors)


def test_localize_examples():
    assert localize(FgAbGroup.cyclic(4), 2).is_trivial
    assert iso_test(localize(FgAbGroup.cyclic(6), 2), LocalizedAbGroup(2, 0, (3,)))
    G = localize(FgAbGroup(1, (5,)), 10)
    assert G.free_rank == 1 and G.torsion == ()


def test_localized_rejects_bad_torsion():
    with pytest.raises(ValueError):
        LocalizedAbGroup(2, 0, (4,))


def test_mod_p_examples():
    t, r = mod_p(FgAbGroup(1), 3)
    assert iso_test(t, FgAbGroup.cyclic(3)) and r.is_trivial
    t, r = mod_p(FgAbGroup.cyclic(4), 2)
    assert iso_test(t, FgAbGroup.cyclic(2)) and iso_test(r, FgAbGroup.cyclic(2))
    t, r = mod_p(FgAbGroup.cyclic(3), 2)
    assert t.is_trivial and r.is_trivial


def test_direct_sum_examples():
    G = direct_sum([FgAbGroup(1), FgAbGroup.cyclic(2)])
    assert G.free_rank == 1 and G.invariant_factors == (2,)
    assert iso_test(direct_sum([FgAbGroup.cyclic(2), FgAbGroup.cyclic(3)]), FgAbGroup.cyclic(6))
    assert direct_sum([]).is_trivial


def test_json_roundtrip_and_str():
    G = FgAbGroup(2, (2, 4))
    assert FgAbGroup.from_json(G.to_json()) == G
    assert str(FgAbGroup(2)) == "Z^2"
    assert str(FgAbGroup()) == "0"


@given(groups, st.integers(2, 30))
def test_localize_idempotent(G, s):
    once = localize(G, s)
    assert localize(once, s) == once


@given(groups, groups, groups)
def test_direct_sum_commutative_associative(A, B, C):
    assert iso_test(direct_sum([A, B]), direct_sum([B, A]))
    assert iso_test(direct_sum([direct_sum([A, B]), C]), direct_sum([A, direct_sum([B, C])]))


@given(groups, groups, st.integers(2, 12))
def test_localize_commutes_with_sum(A, B, s):
    assert iso_test(localize(direct_sum([A, B]), s), direct_sum([localize(A, s), localize(B, s)]))


@settings(max_examples=60)
@given(st.lists(st.integers(1, 12), max_size=3), st.sampled_from([2, 3, 5]))
def test_mod_p_brute_force(tors, p):
    # |G / pG| and |G[p]| by enumerating the finite group
    G = FgAbGroup(0, tuple(tors))
    els = list(itertools.product(*[range(d) for d in G.invariant_factors]))
    pG = {tuple((p * x) % d for x, d in zip(e, G.invariant_factors)) for e in els}
    kill = [e for e in els if all((p * x) % d == 0 for x, d in zip(e, G.invariant_factors))]
    tensor, tor = mod_p(G, p)
    assert tensor.order() == len(els) // len(pG)
    assert tor.order() == len(kill)
    assert tensor.order() == tor.order()
