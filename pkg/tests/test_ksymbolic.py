from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kmatrix.abgroup import FgAbGroup, direct_sum, iso_test, localize
from kmatrix.errors import HypothesisSchemaMismatch, ModeConflict, UnknownRule
from kmatrix.finring import cyclic_ring, quotient_ring
from kmatrix.kdirect import Mode, k0, k1, verify_decomposition
from kmatrix.ksymbolic import (
    RULES, KExpr, KValue, Unknown, apply_rule, evaluate, identify, load_facts, normalize,
    reproduce_paper_example,
)


def example(p, degree):
    e = KExpr.of("End(Z[x]+J)", degree)
    e = apply_rule(e, "prop7.2", {"B": "Z[x]", "chain": ["Z[x]", "J"], "colon": {"(Z[x]:J)": "J"}})
    return identify(e, {"Z[x]/J": f"Z/{p}"}, "residue field")


def test_apply_examples():
    e = apply_rule(KExpr.of("T"), "cor4.6", {"R": "R", "I": ["I2"]})
    assert e.terms == (("R", 1), ("R/I2", 1))
    e = apply_rule(KExpr.of("S"), "lemma4.1", {"R1": "R1", "R2": "R2", "M": "M"})
    assert e.labels == ["R1", "R2"]
    e = apply_rule(KExpr.of("R"), "cor4.6", {"R": "R", "I": []})
    assert e.terms == (("R", 1),)


def test_normalize_examples():
    e = normalize(KExpr((("R", 1), ("R", 1)), 0))
    assert e.terms == (("R", 2),)
    assert str(normalize(KExpr((), 0))) == "0"
    mixed = KExpr((("b", 1), ("a", 2), ("b", 3)), 1)
    once = normalize(mixed)
    assert once.terms == (("a", 2), ("b", 4)) and normalize(once) == once


@given(st.lists(st.tuples(st.sampled_from("RSTUV"), st.integers(0, 3)), max_size=8))
def test_normalize_idempotent(terms):
    e = normalize(KExpr(tuple(terms), 0))
    assert normalize(e) == e
    assert list(e.terms) == sorted(e.terms)
    assert sum(m for _, m in e.terms) == sum(m for _, m in terms)


def test_evaluate_examples():
    assert str(evaluate(example(5, 0))) == "Z^2"
    v = evaluate(example(5, 1))
    assert iso_test(v.group, direct_sum([FgAbGroup.cyclic(2), FgAbGroup.cyclic(4)]))
    v = evaluate(example(2, 3))
    assert v.opaque == ["K_3(ℤ)"] and iso_test(v.group, FgAbGroup.cyclic(3))
    assert all(p for p in v.provenance)


def test_even_degrees_only_integers():
    v = evaluate(example(3, 4))
    assert v.opaque == ["K_4(ℤ)"] and v.group.is_trivial


def test_unknown_is_a_value():
    v = evaluate(KExpr.of("Q", 1))
    assert isinstance(v, Unknown) and v.missing == ["Q"]


def test_mod_p_split_refused():
    e = replace(example(3, 1), mode=Mode("mod-p", 2))
    with pytest.raises(ModeConflict) as exc:
        evaluate(e)
    assert set(exc.value.endpoints) == {"tensor", "tor"}
    ok = evaluate(replace(example(5, 1), mode=Mode("mod-p", 3)))
    assert isinstance(ok, KValue)


def test_localized_rules():
    bind = {"R": "R", "I": ["I"], "shape": "S"}
    with pytest.raises(ModeConflict):
        apply_rule(KExpr.of("S", 0), "thm1.1", bind)
    e = apply_rule(KExpr.of("S", 0), "thm1.1", dict(bind, s=6, p=2))
    assert e.mode == Mode("localized", 6)
    with pytest.raises(ModeConflict):
        apply_rule(KExpr.of("S", 0), "thm1.1", dict(bind, s=3, p=2))
    e = apply_rule(KExpr.of("S", 0, "localized:2"), "cor4.8", {"R": "R", "I": "I", "n": 3, "p": 2})
    assert e.terms == (("R", 1), ("R/I", 2))


def test_schema_errors():
    with pytest.raises(UnknownRule):
        apply_rule(KExpr.of("S"), "nope", {})
    with pytest.raises(HypothesisSchemaMismatch):
        apply_rule(KExpr.of("S"), "lemma4.1", {"R1": "A"})
    with pytest.raises(HypothesisSchemaMismatch):
        apply_rule(KExpr.of("B", 0), "prop5.3", {"R": "R", "I": "I", "n": 2})
    with pytest.raises(HypothesisSchemaMismatch):
        apply_rule(KExpr.of("B", 1), "prop5.1", {"R": "R", "I": ["I"]})
    with pytest.raises(HypothesisSchemaMismatch):
        apply_rule(KExpr((("A", 1), ("B", 1))), "cor4.6", {"R": "R", "I": []})


def test_every_rule_has_a_statement():
    assert {"lemma4.1", "lemma4.2", "cor4.6", "thm1.1", "thm1.2", "prop7.2", "cor7.3", "cor7.4",
            "opposite", "corner", "radfull"} <= set(RULES)
    assert all(r.statement for r in RULES.values())


def test_confluence_S_vs_T():
    S = apply_rule(KExpr.of("S"), "thm1.2", {"R": "R", "I": ["I2", "I3"], "shape": "S"})
    T = apply_rule(KExpr.of("T"), "thm1.2", {"R": "R", "Ij": ["I2", "I3"], "shape": "T"})
    assert normalize(S).terms == normalize(T).terms


@given(st.integers(1, 8))
def test_multiplicity_law(n):
    e = apply_rule(KExpr.of("B", 1), "prop5.3", {"R": "R", "I": "I", "n": n})
    assert dict(e.terms).get("R/I", 0) == n - 1
    e = apply_rule(KExpr.of("S"), "cor4.6", {"R": "R", "I": [f"I{j}" for j in range(2, n + 1)]})
    assert sum(m for l, m in e.terms if l != "R") == n - 1


@given(st.sampled_from([2, 3, 5, 7]), st.integers(0, 5), st.sampled_from([2, 3, 6]))
def test_mode_monotone(p, n, s):
    integral = evaluate(example(p, n))
    loc = evaluate(replace(example(p, n), mode=Mode("localized", s)))
    assert localize(integral.group, s) == loc.group


def _facts_for(labels_rings):
    facts = []
    for label, R in labels_rings.items():
        for d, g in ((0, k0(R).group), (1, k1(R).group)):
            facts.append({"label": label, "degree": str(d), "group": g.to_json(), "provenance": "direct oracle"})
    return load_facts(extra=facts)


def test_soundness_bridge():
    # symbolic value with oracle-derived facts agrees with the direct check
    R = cyclic_ring(4)
    Q, _ = quotient_ring(R, R.ideal([[2]]))
    facts = _facts_for({"R": R, "R/I": Q})
    doc = {"rings": {"R": {"cyclic": 4}}, "ideals": {"I": {"ring": "R", "gens": [[2]]}},
           "bind": {"ring": "R", "chain": {"2": "I", "3": "I"}, "shape": "S"}}
    reps = verify_decomposition("cor4.6", doc)
    e = apply_rule(KExpr.of("S"), "cor4.6", {"R": "R", "I": ["I", "I"]})
    for rep in reps:
        v = evaluate(replace(e, degree=rep.degree), rep.degree, facts)
        assert rep.status == "verified" and iso_test(v.group, rep.lhs)


@pytest.mark.parametrize("p", [3, 5])
def test_worked_example(p):
    rep = reproduce_paper_example(p)
    assert rep["match"]
    assert rep["display"]["K_1"] == f"ℤ/2ℤ ⊕ (ℤ/{p}ℤ)^×"


def test_facts_need_provenance():
    with pytest.raises(HypothesisSchemaMismatch):
        load_facts(extra=[{"label": "X", "degree": "0", "group": {"rank": 1, "torsion": []}}])
