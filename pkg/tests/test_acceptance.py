"""The ten acceptance criteria, one test each.

Every test records a one-line verdict that conftest prints at the end of the
run, so a plain ``pytest`` shows the pass/fail table.
"""
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from kmatrix import config
from kmatrix.abgroup import FgAbGroup, direct_sum, iso_test, localize, mod_p, snf
from kmatrix.errors import HypothesisFailed, ResourceError
from kmatrix.finmod import FinModule, ModuleMap, ext1, is_approximation, is_dsplit
from kmatrix.finring import block_count, cyclic_ring, matrix_ring, product_ring, subring
from kmatrix.gvtools import chain_end_ring, gv_property_check, is_gv, random_commutative_instance
from kmatrix.kdirect import k0, k1, k1_bruteforce, mv_exactness, verify_decomposition
from kmatrix.ksymbolic import reproduce_paper_example
from kmatrix.matshape import MatrixPattern, build_subring, companion_C, milnor_square_thm1

Z4_DOC = {"rings": {"R": {"cyclic": 4}}, "ideals": {"I": {"ring": "R", "gens": [[2]]}}}
F2F2_DOC = {
    "rings": {"F": {"cyclic": 2}, "P": {"product": ["F", "F"]}},
    "ideals": {"I": {"ring": "P", "gens": [[1, 0]]}},
}


def record(n, ok, line):
    ACCEPTANCE[n] = (bool(ok), line)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {line}")


def _det(M):
    """Exact integer determinant (Bareiss)."""
    A = [list(map(int, r)) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1]


def test_c1_cor46_integral():
    t = time.perf_counter()
    reps = verify_decomposition("cor4.6", dict(Z4_DOC, bind={"ring": "R", "chain": {"2": "I"}, "shape": "T"}))
    R = cyclic_ring(4)
    T = build_subring(MatrixPattern.chain_T(R, {2: R.ideal([[2]])}))
    # independent oracles on the 128-element ring
    k0_oracle = FgAbGroup(block_count(T))
    k1_oracle = k1_bruteforce(T)
    dt = time.perf_counter() - t
    ok = (
        T.size == 128
        and all(r.status == "verified" for r in reps)
        and iso_test(reps[0].lhs, FgAbGroup(2)) and iso_test(reps[0].rhs, FgAbGroup(2))
        and iso_test(reps[1].lhs, FgAbGroup.cyclic(2)) and iso_test(reps[1].rhs, FgAbGroup.cyclic(2))
        and iso_test(k0_oracle, reps[0].lhs) and iso_test(k1_oracle, reps[1].lhs)
        and dt < 1.0
    )
    record(1, ok, f"K0(T)={reps[0].lhs} K1(T)={reps[1].lhs} vs {reps[0].rhs}, {reps[1].rhs}; {dt:.2f}s")
    assert ok


def test_c2_lemma42_chain_n3():
    t = time.perf_counter()
    doc = dict(Z4_DOC, bind={"ring": "R", "upper": {"1,2": "I", "2,3": "I", "1,3": "I"}})
    degraded = False
    try:
        reps = verify_decomposition("lemma4.2", doc, (0, 1))
    except ResourceError:
        # unit enumeration cap hit: K0 at n = 3, K1 at n = 2
        degraded = True
        reps = verify_decomposition("lemma4.2", doc, (0,))
        reps += verify_decomposition("lemma4.2", dict(Z4_DOC, bind={"ring": "R", "upper": {"1,2": "I"}}), (1,))
    dt = time.perf_counter() - t
    ok = all(r.status == "verified" for r in reps) and iso_test(reps[0].lhs, FgAbGroup(3)) and dt < 30
    k1s = f"K1(B)={reps[1].lhs} vs {reps[1].rhs}" + (" [degraded to n=2]" if degraded else "")
    record(2, ok, f"K0(B)={reps[0].lhs} vs {reps[0].rhs}; {k1s}; {dt:.2f}s")
    assert ok


def test_c2_degrades_under_cap():
    config.set_value("k1_cap", 1000)
    doc = dict(Z4_DOC, bind={"ring": "R", "upper": {"1,2": "I", "2,3": "I", "1,3": "I"}})
    with pytest.raises(ResourceError):
        verify_decomposition("lemma4.2", doc, (1,))
    small = verify_decomposition("lemma4.2", dict(Z4_DOC, bind={"ring": "R", "upper": {"1,2": "I"}}), (1,))
    assert small[0].status == "verified"


def _thm1_pattern():
    R = cyclic_ring(4)
    I = R.ideal([[2]])
    return MatrixPattern.lower_full(R, {(1, 2): I}, kind="S-thm1", lower=I)


def test_c3_thm11_localized():
    t = time.perf_counter()
    doc = dict(Z4_DOC, bind={"ring": "R", "ideal": "I", "upper": {"1,2": "I"}, "shape": "S"})
    reps = verify_decomposition("thm1.1", doc, (0, 1), "localized:2")
    S = build_subring(_thm1_pattern())
    direct0 = localize(k0(S).group, 2)
    dt = time.perf_counter() - t
    ok = (
        all(r.status == "verified" for r in reps)
        and direct0.free_rank == 2 and reps[0].rhs.free_rank == 2
        and reps[1].lhs.is_trivial and reps[1].rhs.is_trivial
        and dt < 1.0
    )
    record(3, ok, f"K0[1/2]={reps[0].lhs} vs {reps[0].rhs}; K1[1/2]={reps[1].lhs} vs {reps[1].rhs}; {dt:.2f}s")
    assert ok


def test_c4_mayer_vietoris():
    t = time.perf_counter()
    sq = milnor_square_thm1(_thm1_pattern())
    chk = sq.check()
    rep = mv_exactness(sq)
    dt = time.perf_counter() - t
    need = ("K1(R0)", "K0(R)", "K0(R1)+K0(R2)")
    ok = chk["commutes"] and chk["milnor"] and all(rep.exact[k] for k in need) and dt < 5
    record(4, ok, f"exact at {', '.join(k for k in need if rep.exact[k])}; {dt:.2f}s")
    assert ok


EXPECTED_EXAMPLE = {
    3: {
        "K_0": "ℤ ⊕ ℤ",
        "K_1": "ℤ/2ℤ ⊕ (ℤ/3ℤ)^×",
        "K_2m (m >= 1)": "K_{2m}(ℤ)",
        "K_2m-1 (m >= 2)": "K_{2m-1}(ℤ) ⊕ ℤ/(3^m-1)ℤ",
    },
    5: {
        "K_0": "ℤ ⊕ ℤ",
        "K_1": "ℤ/2ℤ ⊕ (ℤ/5ℤ)^×",
        "K_2m (m >= 1)": "K_{2m}(ℤ)",
        "K_2m-1 (m >= 2)": "K_{2m-1}(ℤ) ⊕ ℤ/(5^m-1)ℤ",
    },
}


def test_c5_worked_example():
    ok, lines = True, []
    for p, want in EXPECTED_EXAMPLE.items():
        rep = reproduce_paper_example(p)
        same = rep["display"] == want and rep["match"]
        # group values: K0 = Z^2, K1 = Z/2 + Z/(p-1)
        g0 = FgAbGroup.from_json(rep["groups"]["K_0"]["group"])
        g1 = FgAbGroup.from_json(rep["groups"]["K_1"]["group"])
        same = same and iso_test(g0, FgAbGroup(2)) and iso_test(g1, direct_sum([FgAbGroup.cyclic(2), FgAbGroup.cyclic(p - 1)]))
        ok = ok and same
        lines.append(f"p={p} {'match' if same else 'MISMATCH'} K1={g1}")
    record(5, ok, "; ".join(lines))
    assert ok


def test_c6_dsplit():
    t = time.perf_counter()
    F2 = cyclic_ring(2)
    A = matrix_ring(F2, 2)
    B, inc = subring(A, A.additive([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1]]))
    A_B = FinModule.regular(A).restrict(inc)
    B_B = FinModule.regular(B)
    e = ext1(A_B, B_B)
    lam = ModuleMap(B_B, A_B, inc.images)
    _, g = A_B.quotient(lam.image)
    good = is_dsplit(lam, g, A_B)

    Z8 = cyclic_ring(8)
    R8 = FinModule.regular(Z8)
    two = ModuleMap(R8, R8, [[2]])
    approx = is_approximation(two, R8, "left")
    _, q = R8.quotient(two.image)
    bad = is_dsplit(two, q, R8)
    dt = time.perf_counter() - t
    ok = e.is_trivial and good.ok and not approx.ok and approx.witness is not None and not bad.ok and dt < 1
    record(6, ok, f"Ext1_B(A,B)={e}; B->A->A/B split={good.ok}; Z/8 x2 split={bad.ok} "
                  f"(failed: {bad.failed}, witness {approx.witness}); {dt:.2f}s")
    assert ok


def test_c7_companion():
    t = time.perf_counter()
    Z4 = cyclic_ring(4)
    I = Z4.ideal([[2]])
    F2 = cyclic_ring(2)
    P = product_ring(F2, F2)
    J = P.ideal([[1, 0]])
    cases = [(Z4, {2: I}), (Z4, {2: I, 3: Z4.zero_ideal()}), (P, {2: J, 3: J})]
    ok, parts = True, []
    for R, chain in cases:
        pat = MatrixPattern.chain_T(R, chain)
        Bring, C = build_subring(pat), companion_C(pat)
        a = iso_test(k0(Bring).group, k0(C).group)
        b = iso_test(k1(Bring).group, k1(C).group)
        ok = ok and a and b
        parts.append(f"|B|={Bring.size}: K0 {k0(C).group}, K1 {k1(C).group}")
    dt = time.perf_counter() - t
    ok = ok and dt < 10
    record(7, ok, "; ".join(parts) + f"; {dt:.2f}s")
    assert ok


def test_c8_idempotent_ideal():
    bind = {"ring": "P", "I": "I", "J": "R", "n": 2}
    reps = verify_decomposition("prop5.3", dict(F2F2_DOC, bind=bind), (1,))
    via52 = verify_decomposition("lemma5.2", dict(F2F2_DOC, bind=bind), (1,))
    with pytest.raises(HypothesisFailed) as exc:
        verify_decomposition("prop5.3", dict(Z4_DOC, bind={"ring": "R", "I": "I", "J": "R", "n": 2}), (1,))
    guard = exc.value.condition == "I^2 = I" and exc.value.witness is not None
    ok = reps[0].status == "verified" and via52[0].status == "verified" and guard
    record(8, ok, f"K1(B)={reps[0].lhs} vs {reps[0].rhs}; guard on 2Z/4: {exc.value}")
    assert ok


def test_c9_gv_suite():
    t = time.perf_counter()
    rng = np.random.default_rng(20240607)
    agree, n_gv, ann_ok = 0, 0, True
    N = 40
    for _ in range(N):
        R, I = random_commutative_instance(rng)
        cert = is_gv(R, I)
        agree += cert.routes_agree and cert.recheck()
        if cert.gv:
            n_gv += 1
            props = gv_property_check(R, {"I": I})
            ann_ok = ann_ok and props["ideals"]["I"]["annihilator_zero"] and props["ok"]
    R = cyclic_ring(4)
    chain = chain_end_ring(R, [R.unit_ideal(), R.unit_ideal()])
    entrywise = all(s["injective"] and s["onto"] for s in chain.to_json()["slots"].values())
    dt = time.perf_counter() - t
    ok = agree == N and ann_ok and chain.isomorphic and entrywise and dt < 30
    record(9, ok, f"{agree}/{N} route agreement, {n_gv} GV verdicts, annihilator ok={ann_ok}, "
                  f"trivial chain iso={chain.isomorphic}; {dt:.2f}s")
    assert ok


def test_c10_snf_kernel():
    t = time.perf_counter()
    rng = np.random.default_rng(7)
    bad = 0
    for _ in range(1000):
        m, n = rng.integers(1, 7, size=2)
        M = rng.integers(-20, 21, size=(m, n)).tolist()
        S = snf(M)
        U, V, D = np.array(S.U, dtype=object), np.array(S.V, dtype=object), np.array(S.D, dtype=object)
        diag_ok = all(D[i][j] == 0 for i in range(m) for j in range(n) if i != j)
        d = [D[i][i] for i in range(min(m, n))]
        chain_ok = all(x >= 0 for x in d) and all(b % a == 0 for a, b in zip(d, d[1:]) if a)
        cert = (U.dot(np.array(M, dtype=object)).dot(V) == D).all()
        if not (cert and diag_ok and chain_ok and abs(_det(S.U)) == 1 and abs(_det(S.V)) == 1):
            bad += 1
    # algebraic identities of the coefficient functors
    ident = True
    for a in range(2, 40):
        for p in (2, 3, 5):
            G = direct_sum([FgAbGroup.cyclic(a), FgAbGroup(1)])
            tens, tor = mod_p(G, p)
            from math import gcd
            ident &= iso_test(tens, direct_sum([FgAbGroup.cyclic(gcd(a, p)), FgAbGroup.cyclic(p)]))
            ident &= iso_test(tor, FgAbGroup.cyclic(gcd(a, p)))
            H = FgAbGroup.cyclic(a + 1)
            ident &= iso_test(localize(direct_sum([G, H]), p), direct_sum([localize(G, p), localize(H, p)]))
    dt = time.perf_counter() - t
    ok = bad == 0 and ident and dt < 10
    record(10, ok, f"1000 SNF certificates, {bad} failures; localize/mod_p identities ok={ident}; {dt:.2f}s")
    assert ok
