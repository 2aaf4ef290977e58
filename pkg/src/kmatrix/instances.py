"""Instance files and the per-rule builders behind ``verify_decomposition``.

An instance document names rings, ideals, subrings and bimodules, and binds
them to a rule::

    {"rings": {"R": {"cyclic": 4}},
     "ideals": {"I": {"ring": "R", "gens": [[2]]}},
     "rule": "cor4.6",
     "bind": {"ring": "R", "chain": {"2": "I"}, "shape": "T"}}

Rule builders return the ring on the left of the decomposition, the rings
whose K-groups are summed on the right, and the hypothesis checks they ran.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path
from typing import Callable

import jsonschema
import numpy as np

from .abgroup import prime_factors
from .errors import (
    HypothesisFailed,
    HypothesisSchemaMismatch,
    InputError,
    ModeConflict,
    ParseError,
    UnknownRule,
    UnresolvedReference,
)
from .finring import (
    FiniteRing,
    Ideal,
    RingHom,
    colon_ideal,
    cyclic_ring,
    finite_field,
    matrix_ring,
    poly_quotient,
    product_ring,
    quotient_ring,
    subring,
)
from .lattice import Subgroup, kernel as group_kernel
from .matshape import (
    Bimodule,
    BuiltRing,
    MatrixPattern,
    _slot_inclusion,
    bimodule_ring,
    build_slots,
    build_subring,
    check_conditions,
    corner_ring,
    ideal_power,
    poset_ring,
    triangular_ring,
)

__all__ = [
    "Env",
    "load_document",
    "load_env",
    "parse_ring",
    "parse_pattern",
    "RuleInstance",
    "RULES",
    "build_rule",
    "ring_generated",
]

_SCHEMA_PATH = Path(__file__).parent / "data" / "instance.schema.json"


def load_document(src) -> dict:
    """Parse a path, JSON text or dict; syntax errors carry line and column."""
    if isinstance(src, dict):
        doc = src
    else:
        text = src
        p = Path(str(src)) if not str(src).lstrip().startswith("{") else None
        if p is not None and p.exists():
            text = p.read_text()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    schema = json.loads(_SCHEMA_PATH.read_text())
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as e:
        where = "/".join(str(x) for x in e.absolute_path) or "<root>"
        raise ParseError(f"schema violation at {where}: {e.message}") from None
    return doc


# ----------------------------------------------------------------------------
# environment of named objects


@dataclass
class Env:
    rings: dict[str, FiniteRing] = field(default_factory=dict)
    ideals: dict[str, Ideal] = field(default_factory=dict)
    subrings: dict[str, tuple[str, Subgroup]] = field(default_factory=dict)
    bimodules: dict[str, Bimodule] = field(default_factory=dict)
    doc: dict = field(default_factory=dict)

    def ring(self, ref) -> FiniteRing:
        if isinstance(ref, str):
            if ref not in self.rings:
                raise UnresolvedReference(f"ring {ref!r}")
            return self.rings[ref]
        return parse_ring(ref, self)

    def ideal(self, ref, R: FiniteRing | None = None) -> Ideal:
        """Named ideal, or ``"R"``/``"0"`` (unit/zero ideal of ``R``)."""
        if isinstance(ref, dict):
            return _parse_ideal(ref, self, R)
        if R is not None and ref in ("R", "1"):
            return R.unit_ideal()
        if R is not None and ref == "0":
            return R.zero_ideal()
        if ref not in self.ideals:
            raise UnresolvedReference(f"ideal {ref!r}")
        I = self.ideals[ref]
        if R is not None and I.ring is not R:
            raise HypothesisSchemaMismatch(f"ideal {ref!r} lives in another ring")
        return I

    def subring(self, ref, R: FiniteRing) -> Subgroup:
        if ref == "R":
            return Subgroup.full(R.orders)
        if ref not in self.subrings:
            raise UnresolvedReference(f"subring {ref!r}")
        owner, sub = self.subrings[ref]
        if self.rings[owner] is not R:
            raise HypothesisSchemaMismatch(f"subring {ref!r} lives in another ring")
        return sub

    def bimodule(self, ref) -> Bimodule:
        if isinstance(ref, dict):
            return _parse_bimodule(ref, self)
        if ref not in self.bimodules:
            raise UnresolvedReference(f"bimodule {ref!r}")
        return self.bimodules[ref]


def parse_ring(spec, env: Env | None = None) -> FiniteRing:
    env = env or Env()
    if isinstance(spec, str):
        return env.ring(spec)
    if not isinstance(spec, dict) or not spec:
        raise InputError(f"bad ring spec {spec!r}")
    if "cyclic" in spec:
        return cyclic_ring(int(spec["cyclic"]))
    if "field" in spec:
        return finite_field(int(spec["field"]))
    if "poly" in spec:
        p = spec["poly"]
        return poly_quotient(int(p["n"]), [int(c) for c in p["modulus"]])
    if "product" in spec:
        return product_ring(*[env.ring(r) for r in spec["product"]])
    if "matrix" in spec:
        m = spec["matrix"]
        return matrix_ring(env.ring(m["ring"]), int(m["n"]))
    if "opposite" in spec:
        return env.ring(spec["opposite"]).opposite()
    if "table" in spec:
        return FiniteRing.from_json(spec["table"])
    if {"orders", "mul", "one"} <= set(spec):
        return FiniteRing.from_json(spec)
    raise InputError(f"unknown ring spec keys {sorted(spec)}")


def ring_generated(R: FiniteRing, gens) -> Subgroup:
    """Smallest subring (with ``1``) containing ``gens``."""
    S = R.additive([[int(x) for x in R.one]] + [list(g) for g in gens])
    while True:
        T = S + R.product_span(S.basis, S.basis)
        if T == S:
            return S
        S = T


def _parse_ideal(spec: dict, env: Env, R: FiniteRing | None = None) -> Ideal:
    if "ring" in spec:
        R = env.ring(spec["ring"])
    if R is None:
        raise InputError("ideal spec needs a ring")
    side = spec.get("side", "two")
    if "gens" in spec:
        return R.ideal(spec["gens"], side=side)
    if "of" in spec:
        which = spec["of"]
        if which == "radical":
            return R.radical
        if which == "unit":
            return R.unit_ideal()
        if which == "zero":
            return R.zero_ideal()
        raise InputError(f"unknown ideal {which!r}")
    if "power" in spec:
        name, t = spec["power"]
        return ideal_power(env.ideal(name, R), int(t))
    if "product" in spec:
        out = R.unit_ideal()
        for name in spec["product"]:
            out = out * env.ideal(name, R)
        return out
    if "sum" in spec:
        out = R.zero_ideal()
        for name in spec["sum"]:
            out = out + env.ideal(name, R)
        return out
    if "colon" in spec:
        a, b = spec["colon"]
        return colon_ideal(env.ideal(a, R), env.ideal(b, R))
    raise InputError(f"bad ideal spec {spec!r}")


def _parse_bimodule(spec: dict, env: Env) -> Bimodule:
    if "regular" in spec:
        return Bimodule.regular(env.ring(spec["regular"]))
    if "free" in spec:
        return Bimodule.free_over_field(env.ring(spec["free"]["ring"]), int(spec["free"]["rank"]))
    if "zero" in spec:
        X, Y = spec["zero"]
        return Bimodule.zero(env.ring(X), env.ring(Y))
    X, Y = env.ring(spec["left_ring"]), env.ring(spec["right_ring"])
    M = Bimodule(X, Y, spec["orders"], spec["left"], spec["right"])
    M.validate()
    return M


def load_env(src) -> Env:
    doc = load_document(src)
    env = Env(doc=doc)
    for name, spec in doc.get("rings", {}).items():
        env.rings[name] = parse_ring(spec, env)
    for name, spec in doc.get("subrings", {}).items():
        R = env.ring(spec["ring"])
        env.subrings[name] = (spec["ring"], ring_generated(R, spec.get("gens", [])))
    for name, spec in doc.get("ideals", {}).items():
        env.ideals[name] = _parse_ideal(spec, env)
    for name, spec in doc.get("bimodules", {}).items():
        env.bimodules[name] = _parse_bimodule(spec, env)
    return env


def _pos(key) -> tuple[int, int]:
    if isinstance(key, (tuple, list)):
        return int(key[0]), int(key[1])
    i, j = str(key).split(",")
    return int(i), int(j)


def parse_pattern(spec: dict, env: Env) -> MatrixPattern:
    """Pattern declaration: ``kind``, ``ring``, ``n`` and named slot entries.

    Missing entries default to ``R``.  Entry names resolve to ideals first,
    then subrings; ``"R"`` and ``"0"`` are the unit and zero ideals.
    """
    R = env.ring(spec["ring"])
    n = int(spec["n"])
    entries, labels, ideals = {}, {}, {}
    raw = {_pos(k): v for k, v in spec.get("entries", {}).items()}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            ref = raw.get((i, j), "R")
            if isinstance(ref, dict):
                I = env.ideal(ref, R)
                entries[(i, j)], labels[(i, j)] = I.sub, json.dumps(ref, sort_keys=True)
                continue
            if ref in env.subrings:
                entries[(i, j)] = env.subring(ref, R)
            else:
                I = env.ideal(ref, R)
                entries[(i, j)] = I.sub
                if ref not in ("R", "0", "1"):
                    ideals[ref] = I
            labels[(i, j)] = ref
    for role, ref in spec.get("roles", {}).items():
        ideals[role] = env.ideal(ref, R)
    subs = {int(k): env.subring(v, R) for k, v in spec.get("subrings", {}).items()}
    t = {_pos(k): int(v) for k, v in spec.get("exponents", {}).items()}
    pat = MatrixPattern(spec["kind"], R, n, entries, labels, ideals, subs, t, dict(spec.get("params", {})))
    return pat


# ----------------------------------------------------------------------------
# rule instances


@dataclass
class RuleInstance:
    rule: str
    lhs: FiniteRing
    rhs: list[FiniteRing]
    rhs_labels: list[str]
    claimed_degrees: tuple[int, ...] = (0, 1)
    evidence_degrees: tuple[int, ...] = ()
    checks: list[dict] = field(default_factory=list)
    assumed: list[str] = field(default_factory=list)

    def detail(self) -> dict:
        return {"rhs": self.rhs_labels, "checks": self.checks, "assumed": self.assumed,
                "lhs_order": self.lhs.size}


@dataclass
class RuleSpec:
    id: str
    statement: str
    localized_only: bool
    build: Callable


def _fail(condition: str, witness=None):
    raise HypothesisFailed(condition, witness)


def _enforce(pattern: MatrixPattern, skip: tuple[str, ...] = ()) -> list[dict]:
    bad = [v for v in check_conditions(pattern) if v.condition not in skip]
    if bad:
        v = bad[0]
        raise HypothesisFailed(f"{v.condition} at {list(v.at)}", v.witness)
    return [{"condition": "pattern conditions", "kind": pattern.kind, "ok": True}]


def _q(R: FiniteRing, sub: Subgroup) -> FiniteRing:
    Q, _ = quotient_ring(R, Ideal(R, sub, "two"))
    return Q


def _sub_quotient(R: FiniteRing, Rj: Subgroup, Ij: Subgroup) -> FiniteRing:
    """``R_j / I_j`` with ``R_j`` a subring of ``R``."""
    if Rj.is_full:
        return _q(R, Ij)
    S, _ = subring(R, Rj)
    inner = Subgroup(S.orders, [Rj.coords(v) for v in Ij.basis])
    I = Ideal(S, inner, "two")
    if not I.closed("two"):
        _fail("I_j is a two-sided ideal of R_j")
    Q, _ = quotient_ring(S, I)
    return Q


def _prime_power_p(R: FiniteRing) -> int | None:
    ps = prime_factors(R.size)
    return ps[0] if len(ps) == 1 else None


def _check_mode(rule: str, R: FiniteRing, mode) -> list[dict]:
    """Coefficient guard for the rules that only hold after changing coefficients."""
    if mode.kind == "integral":
        raise ModeConflict(f"{rule} is a statement with Z[1/s] or mod-p coefficients, not integral")
    if mode.kind == "localized":
        p = _prime_power_p(R)
        if p is None:
            _fail("R is a Z/p^m-algebra", list(prime_factors(R.size)))
        if mode.value % p:
            raise ModeConflict(f"localization at s={mode.value} needs p={p} to divide s")
        return [{"condition": "R is a Z/p^m-algebra with p | s", "p": p, "ok": True}]
    p = mode.value
    if gcd(R.size, p) != 1:
        raise ModeConflict(f"mod-{p} coefficients need p invertible in R")
    if p % 4 == 2:
        raise ModeConflict(f"mod-{p} coefficients need p not congruent to 2 mod 4")
    return [{"condition": "R is a Z[1/p]-algebra, p != 2 mod 4", "ok": True}]


def _bind(bind: dict, key: str):
    if key not in bind:
        raise HypothesisSchemaMismatch(f"binding {key!r} missing")
    return bind[key]


def _upper(env: Env, R: FiniteRing, bind: dict) -> dict:
    up = {_pos(k): env.ideal(v, R) for k, v in _bind(bind, "upper").items()}
    n = int(bind.get("n", max([max(p) for p in up] + [1])))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if (i, j) not in up:
                raise HypothesisSchemaMismatch(f"upper entry {i},{j} missing")
    return up


def _chain(env: Env, R: FiniteRing, bind: dict) -> dict[int, Ideal]:
    ch = {int(k): env.ideal(v, R) for k, v in _bind(bind, "chain").items()}
    n = max(ch) if ch else 1
    if sorted(ch) != list(range(2, n + 1)):
        raise HypothesisSchemaMismatch("chain must be indexed 2..n")
    return ch


def _s_chain_rhs(R, pat) -> tuple[list, list]:
    rings, labels = [R], ["R"]
    for j in range(2, pat.n + 1):
        rings.append(_q(R, pat.slot(j - 1, j)))
        labels.append(f"R/{pat.labels[(j - 1, j)]}")
    return rings, labels


def _t_chain_rhs(R, pat) -> tuple[list, list]:
    rings, labels = [R], ["R"]
    for j in range(2, pat.n + 1):
        Rj = pat.subrings.get(j, Subgroup.full(R.orders))
        rings.append(_sub_quotient(R, Rj, pat.slot(1, j)))
        labels.append(f"{pat.labels[(j, j)]}/{pat.labels[(1, j)]}")
    return rings, labels


def _t_pattern(env, R, bind, kind, first_column=None) -> MatrixPattern:
    ch = _chain(env, R, bind)
    subs = {int(k): env.subring(v, R) for k, v in bind.get("subrings", {}).items()}
    lower = {_pos(k): env.ideal(v, R) for k, v in bind.get("lower", {}).items()}
    pat = MatrixPattern.chain_T(R, ch, kind=kind, subrings=subs, lower=lower, first_column=first_column)
    for j, name in bind.get("subrings", {}).items():
        pat.labels[(int(j), int(j))] = name
    for j, name in bind["chain"].items():
        for i in range(1, int(j)):
            pat.labels[(i, int(j))] = name
    return pat


def _s_pattern(env, R, bind, kind, lower=None) -> MatrixPattern:
    up = _upper(env, R, bind)
    pat = MatrixPattern.lower_full(R, up, kind=kind, lower=lower, n=bind.get("n"))
    for k, v in bind["upper"].items():
        pat.labels[_pos(k)] = v
    return pat


def _shape_rule(env, bind, mode, *, integral_kind_S, integral_kind_T, rule, skip=()):
    R = env.ring(_bind(bind, "ring"))
    shape = bind.get("shape", "S")
    if shape == "S":
        pat = _s_pattern(env, R, bind, integral_kind_S)
        checks = _enforce(pat, skip)
        rhs, labels = _s_chain_rhs(R, pat)
    elif shape == "T":
        pat = _t_pattern(env, R, bind, integral_kind_T)
        checks = _enforce(pat, skip)
        rhs, labels = _t_chain_rhs(R, pat)
    else:
        raise HypothesisSchemaMismatch(f"shape must be S or T, got {shape!r}")
    return RuleInstance(rule, build_subring(pat), rhs, labels, checks=checks)


def _r_lemma41(env, bind, mode):
    R1, R2 = env.ring(_bind(bind, "R1")), env.ring(_bind(bind, "R2"))
    M = env.bimodule(_bind(bind, "M"))
    return RuleInstance("lemma4.1", triangular_ring(R1, R2, M), [R1, R2], ["R1", "R2"],
                        checks=[{"condition": "M is an R1-R2-bimodule", "ok": True}])


def _r_lemma42(env, bind, mode):
    return _shape_rule(env, dict(bind, shape="S"), mode, integral_kind_S="B-lemma32",
                       integral_kind_T="B-lemma34", rule="lemma4.2")


def _r_thm12(env, bind, mode):
    return _shape_rule(env, bind, mode, integral_kind_S="S-thm2", integral_kind_T="T-thm2", rule="thm1.2")


def _r_lemma45(env, bind, mode):
    return _shape_rule(env, dict(bind, shape="T"), mode, integral_kind_S="B-lemma32",
                       integral_kind_T="B-lemma34", rule="lemma4.5")


def _r_cor43(env, bind, mode):
    R = env.ring(_bind(bind, "ring"))
    I = env.ideal(_bind(bind, "ideal"), R)
    t = {_pos(k): int(v) for k, v in _bind(bind, "t").items()}
    if any(v < 1 for v in t.values()):
        _fail("t_ij are positive integers", [v for v in t.values() if v < 1])
    pat = MatrixPattern.power(R, I, t, bind.get("n"))
    checks = _enforce(pat)
    rhs, labels = _s_chain_rhs(R, pat)
    return RuleInstance("cor4.3", build_subring(pat), rhs, labels, checks=checks)


def _r_cor44(env, bind, mode):
    R = env.ring(_bind(bind, "ring"))
    I = env.ideal(_bind(bind, "ideal"), R)
    t = [int(x) for x in _bind(bind, "t")]
    if any(x < 1 for x in t):
        _fail("t_j are positive integers", t)
    for a, b in zip(t, t[1:]):
        if a > b:
            _fail("t_j <= t_j+1", [a, b])
    ch = {j + 2: ideal_power(I, x) for j, x in enumerate(t)}
    pat = MatrixPattern.chain_T(R, ch, kind="T-thm2")
    for j, x in enumerate(t):
        for i in range(1, j + 2):
            pat.labels[(i, j + 2)] = f"I^{x}"
    checks = _enforce(pat)
    rhs, labels = _t_chain_rhs(R, pat)
    return RuleInstance("cor4.4", build_subring(pat), rhs, labels, checks=checks)


def _r_cor46(env, bind, mode):
    R = env.ring(_bind(bind, "ring"))
    ch = _chain(env, R, bind)
    n = max(ch) if ch else 1
    shape = bind.get("shape", "T")
    lower = {}
    if shape == "S":
        lower = {(i, j): ch[j] for j in range(2, n + 1) for i in range(j + 1, n + 1)}
    elif shape != "T":
        raise HypothesisSchemaMismatch(f"shape must be S or T, got {shape!r}")
    for j, I in ch.items():
        if not I.closed("two"):
            _fail(f"I{j} is a two-sided ideal")
    pat = MatrixPattern.chain_T(R, ch, kind="T-thm2", lower=lower)
    for j, name in bind["chain"].items():
        for i in range(1, n + 1):
            if i < int(j) or (shape == "S" and i > int(j)):
                pat.labels[(i, int(j))] = name
    checks = _enforce(pat)
    rhs, labels = _t_chain_rhs(R, pat)
    return RuleInstance("cor4.6", build_subring(pat), rhs, labels, checks=checks)


def _r_thm11(env, bind, mode):
    R = env.ring(_bind(bind, "ring"))
    checks = _check_mode("thm1.1", R, mode)
    I = env.ideal(_bind(bind, "ideal"), R)
    skip = ("R is a Z/p^m-algebra",) if mode.kind == "mod-p" else ()
    shape = bind.get("shape", "S")
    if shape == "S":
        pat = _s_pattern(env, R, bind, "S-thm1", lower=I)
        checks += _enforce(pat, skip)
        rhs, labels = _s_chain_rhs(R, pat)
    elif shape == "T":
        pat = _t_pattern(env, R, bind, "T-thm1", first_column=I)
        checks += _enforce(pat, skip)
        rhs, labels = _t_chain_rhs(R, pat)
    else:
        raise HypothesisSchemaMismatch(f"shape must be S or T, got {shape!r}")
    return RuleInstance("thm1.1", build_subring(pat), rhs, labels, checks=checks)


def _two_sided(env, bind, kind="S-cor48"):
    R = env.ring(_bind(bind, "ring"))
    I = env.ideal(_bind(bind, "I"), R)
    J = env.ideal(_bind(bind, "J"), R)
    n = int(_bind(bind, "n"))
    pat = MatrixPattern.two_sided(R, I, J, n, kind=kind)
    pat.labels.update({p: (bind["I"] if v == "I" else bind["J"]) for p, v in pat.labels.items() if v in ("I", "J")})
    return R, I, J, n, pat


def _r_cor48(env, bind, mode):
    R, I, J, n, pat = _two_sided(env, bind)
    checks = _check_mode("cor4.8", R, mode)
    checks += _enforce(pat)
    QI = _q(R, I.sub)
    return RuleInstance("cor4.8", build_subring(pat), [R] + [QI] * (n - 1),
                        ["R"] + [f"R/{bind['I']}"] * (n - 1), checks=checks)


def _r_prop51(env, bind, mode):
    shape = bind.get("shape", "S")
    skip = ("R is a Z/p^m-algebra",)
    if shape == "cor4.8":
        R, I, J, n, pat = _two_sided(env, bind)
        checks = _enforce(pat)
        ri = RuleInstance("prop5.1", build_subring(pat), [R] + [_q(R, I.sub)] * (n - 1),
                          ["R"] + [f"R/{bind['I']}"] * (n - 1), checks=checks)
    else:
        R = env.ring(_bind(bind, "ring"))
        I = env.ideal(_bind(bind, "ideal"), R)
        if shape == "S":
            pat = _s_pattern(env, R, bind, "S-thm1", lower=I)
            checks = _enforce(pat, skip)
            rhs, labels = _s_chain_rhs(R, pat)
        elif shape == "T":
            pat = _t_pattern(env, R, bind, "T-thm1", first_column=I)
            checks = _enforce(pat, skip)
            rhs, labels = _t_chain_rhs(R, pat)
        else:
            raise HypothesisSchemaMismatch(f"shape must be S, T or cor4.8, got {shape!r}")
        ri = RuleInstance("prop5.1", build_subring(pat), rhs, labels, checks=checks)
    ri.claimed_degrees = (0,)
    ri.evidence_degrees = (1,)
    return ri


def _idempotent_witness(I: Ideal):
    """An element of ``I`` outside ``I^2``, or ``None`` when ``I^2 = I``."""
    I2 = I * I
    for b in I.basis:
        if not I2.contains(b):
            return list(b)
    return None


def _r_prop53(env, bind, mode):
    R, I, J, n, pat = _two_sided(env, bind)
    w = _idempotent_witness(I)
    if w is not None:
        _fail("I^2 = I", w)
    if not I <= J:
        _fail("I <= J", next(list(b) for b in I.basis if not J.contains(b)))
    checks = _enforce(pat) + [{"condition": "I^2 = I", "ok": True}, {"condition": "I <= J", "ok": True}]
    ri = RuleInstance("prop5.3", build_subring(pat), [R] + [_q(R, I.sub)] * (n - 1),
                      ["R"] + [f"R/{bind['I']}"] * (n - 1), checks=checks)
    ri.claimed_degrees = (1,)
    return ri


def _induced_quotient_hom(B: BuiltRing, A: BuiltRing, JB: Ideal, JA: Ideal) -> RingHom:
    f = _slot_inclusion(B, A)
    Bq, gB = quotient_ring(B, JB)
    Aq, gA = quotient_ring(A, JA)
    if not Bq.dim:
        return RingHom(Bq, Aq, np.zeros((0, Aq.dim), dtype=np.int64))
    lifts = np.array(gB.target_lifts, dtype=np.int64).reshape(Bq.dim, B.dim)
    return RingHom(Bq, Aq, gA.apply_many(f.apply_many(lifts)))


def _is_iso_map(M: np.ndarray, src: list[int], tgt: list[int]) -> bool:
    if not src or not tgt:
        return not src and not tgt
    ker = group_kernel(M.tolist(), src, tgt)
    return ker.is_zero and Subgroup(tgt, M.tolist()).is_full


def _r_lemma52(env, bind, mode):
    """``B`` inside ``A`` with an idempotent ideal of ``A`` inside ``B``.

    Either the pair from the two-sided shape (``ring``, ``I``, ``J``, ``n``)
    or explicit patterns ``sub`` and ``over`` with slotwise ``ideal`` entries.
    """
    from .kdirect import induced_k1, k1

    if "sub" in bind:
        pb, pa = parse_pattern(bind["sub"], env), parse_pattern(bind["over"], env)
        if pb.R is not pa.R or pb.n != pa.n:
            raise HypothesisSchemaMismatch("sub and over patterns need the same ring and size")
        R, n = pb.R, pb.n
        Jslots = {(i, j): env.ideal(bind["ideal"].get(f"{i},{j}", "0"), R).sub
                  for i in range(1, n + 1) for j in range(1, n + 1)}
    else:
        R, I, J, n, pb = _two_sided(env, bind)
        pa = MatrixPattern.lower_full(R, {(i, j): I for i in range(1, n + 1) for j in range(i + 1, n + 1)},
                                      kind="generic", n=n)
        Jslots = {(i, j): I.sub for i in range(1, n + 1) for j in range(1, n + 1)}
    B = build_slots(R, n, pb.entries, kind="generic")
    A = build_slots(R, n, pa.entries, kind="generic")
    for (i, j), s in B.slots.items():
        if not s.num <= pa.slot(i, j):
            _fail("B <= A", [i, j])
    JA = Ideal(A, A.sub_from_entries({p: s.basis for p, s in Jslots.items()}), "two")
    JB = Ideal(B, B.sub_from_entries({p: s.basis for p, s in Jslots.items()}), "two")
    if not JA.closed("two"):
        _fail("I is an ideal of A")
    for p, s in Jslots.items():
        if not s <= pb.slot(*p):
            _fail("I <= B", list(p))
    w = _idempotent_witness(JA)
    if w is not None:
        _fail("I^2 = I", w)
    g = _induced_quotient_hom(B, A, JB, JA)
    src, tgt = k1(g.source), k1(g.target)
    if not _is_iso_map(induced_k1(g, src, tgt), src.invariants, tgt.invariants):
        _fail("gamma_1: K1(B/I) -> K1(A/I) is an isomorphism")
    checks = [{"condition": "B <= A", "ok": True}, {"condition": "I ideal of A inside B", "ok": True},
              {"condition": "I^2 = I", "ok": True}, {"condition": "gamma_1 iso", "ok": True}]
    ri = RuleInstance("lemma5.2", B, [A], ["A"], claimed_degrees=(1,), checks=checks,
                      assumed=["gamma_2: K2(B/I) -> K2(A/I) is an isomorphism"])
    return ri


def _r_poset(env, bind, mode):
    R = env.ring(_bind(bind, "ring"))
    checks = _check_mode("poset", R, mode)
    I = env.ideal(_bind(bind, "ideal"), R)
    n = int(_bind(bind, "n"))
    rel = [tuple(int(x) for x in r) for r in bind.get("relations", [])]
    B = poset_ring(R, I, n, rel)
    QI = _q(R, I.sub)
    return RuleInstance("poset", B, [R] + [QI] * (n - 1), ["R"] + [f"R/{bind['ideal']}"] * (n - 1),
                        checks=checks + [{"condition": "indexing is a linear extension", "ok": True}])


def _r_corner(env, bind, mode):
    R = env.ring(_bind(bind, "ring"))
    pat = _s_pattern(env, R, bind, "B-lemma32")
    checks = _enforce(pat)
    B = build_slots(R, pat.n, pat.entries, kind="B-lemma32", labels=pat.labels)
    e = R.vec(_bind(bind, "e"))
    C = corner_ring(B, e)
    eRe_sub = Subgroup(R.orders, [R.mul(R.mul(e, R.gen(t)), e).tolist() for t in range(R.dim)])
    Rc, _ = subring(R, eRe_sub, one=e)
    rhs, labels = [Rc], ["eRe"]
    for j in range(1, pat.n):
        vecs = [R.mul(R.mul(e, np.array(x)), e) for x in pat.slot(j, j + 1).basis]
        inner = Subgroup(Rc.orders, [eRe_sub.coords(v) for v in vecs])
        Q, _ = quotient_ring(Rc, Ideal(Rc, inner, "two"))
        rhs.append(Q)
        labels.append(f"eRe/e{pat.labels[(j, j + 1)]}e")
    return RuleInstance("corner", C, rhs, labels, checks=checks)


def _r_opposite(env, bind, mode):
    R = env.ring(_bind(bind, "ring"))
    rows = {int(k): env.ideal(v, R) for k, v in _bind(bind, "rows").items()}
    if sorted(rows) != list(range(1, len(rows) + 1)):
        raise HypothesisSchemaMismatch("rows must be indexed 1..n-1")
    pat = MatrixPattern.rows_of_ideals(R, rows)
    checks = _enforce(pat)
    rhs = [R] + [_q(R, rows[j].sub) for j in sorted(rows)]
    labels = ["R"] + [f"R/{bind['rows'][str(j)] if str(j) in bind['rows'] else j}" for j in sorted(rows)]
    return RuleInstance("opposite", build_subring(pat), rhs, labels, checks=checks)


def _r_bimodule(env, bind, mode):
    R, S = env.ring(_bind(bind, "R")), env.ring(_bind(bind, "S"))
    M, N = env.bimodule(_bind(bind, "M")), env.bimodule(_bind(bind, "N"))
    A, sq = bimodule_ring(R, S, M, N)
    return RuleInstance("bimodule", A, [R, S], ["R", "S"],
                        checks=[{"condition": "Milnor square of M', N'", "ok": True}])


def _r_radfull(env, bind, mode):
    A = env.ring(_bind(bind, "ring"))
    Bsub = env.subring(_bind(bind, "subring"), A)
    Bring, inc = subring(A, Bsub)
    radB = Subgroup(A.orders, [inc.apply(np.array(v)).tolist() for v in Bring.radical.basis])
    w = _first_outside(A.product_span(Subgroup.full(A.orders).basis, radB.basis), radB)
    if w is not None:
        _fail("rad(B) is a left ideal of A", w)
    radA = A.radical.sub
    rBA = A.product_span(radB.basis, Subgroup.full(A.orders).basis)
    if rBA != radA:
        _fail("rad(A) = rad(B) A", _first_outside(radA, rBA) or _first_outside(rBA, radA))
    I2 = Ideal(A, radB, "left")
    pat = MatrixPattern.chain_T(A, {2: I2}, kind="T-thm2", subrings={2: Bsub})
    pat.labels.update({(1, 2): "rad(B)", (2, 2): "B", (1, 1): "A", (2, 1): "A"})
    checks = _enforce(pat) + [{"condition": "left radical-full extension", "ok": True}]
    Q, _ = quotient_ring(Bring, Bring.radical)
    return RuleInstance("radfull", build_subring(pat), [A, Q], ["A", "B/rad(B)"], checks=checks)


def _first_outside(A: Subgroup, B: Subgroup):
    for v in A.basis:
        if not B.contains(v):
            return list(v)
    return None


def _r_prop72(env, bind, mode):
    from .gvtools import chain_end_ring

    B = env.ring(_bind(bind, "ring"))
    names = list(_bind(bind, "chain"))
    chain = [env.ideal(v, B) for v in names]
    rep = chain_end_ring(B, chain)
    cert = rep.gv_last
    if not cert.gv:
        _fail("I_n is a GV-ideal", cert.witness)
    if not rep.isomorphic:
        _fail("End(I_1 + ... + I_n) matches the colon matrix", rep.to_json()["slots"])
    rhs, labels = [B], ["B"]
    for a, b, na, nb in zip(chain, chain[1:], names, names[1:]):
        rhs.append(_q(B, colon_ideal(a, b).sub))
        labels.append(f"B/({na}:{nb})")
    checks = [{"condition": "I_n is a GV-ideal", "ok": True},
              {"condition": "Hom matrix = colon matrix", "ok": True}]
    return RuleInstance("prop7.2", rep.hom_ring, rhs, labels, checks=checks)


RULES: dict[str, RuleSpec] = {
    r.id: r
    for r in [
        RuleSpec("lemma4.1", "K(triangular R1, M, R2) = K(R1) + K(R2)", False, _r_lemma41),
        RuleSpec("lemma4.2", "K(B) = K(R) + sum_j K(R/I_j,j+1)", False, _r_lemma42),
        RuleSpec("cor4.3", "K(S) = K(R) + sum_j K(R/I^t_j-1,j)", False, _r_cor43),
        RuleSpec("cor4.4", "K(T) = K(R) + sum_i K(R/I^t_i)", False, _r_cor44),
        RuleSpec("lemma4.5", "K(B) = K(R) + sum_j K(R_j/I_j)", False, _r_lemma45),
        RuleSpec("cor4.6", "K(S) = K(R) + sum_j K(R/I_j) = K(T)", False, _r_cor46),
        RuleSpec("thm1.1", "K(S)[1/s] = K(R)[1/s] + sum_j K(R/I_j-1,j)[1/s]", True, _r_thm11),
        RuleSpec("thm1.2", "K(S) = K(R) + sum_j K(R/I_j-1,j); K(T) = K(R) + sum_j K(R_j/I_j)", False, _r_thm12),
        RuleSpec("cor4.8", "K(S)[1/s] = K(R)[1/s] + (n-1) K(R/I)[1/s]", True, _r_cor48),
        RuleSpec("prop5.1", "K0 of the localized shapes without coefficient change", False, _r_prop51),
        RuleSpec("prop5.3", "K1(B) = K1(R) + (n-1) K1(R/I), I idempotent", False, _r_prop53),
        RuleSpec("lemma5.2", "K1(B) = K1(A) for an idempotent ideal of A in B", False, _r_lemma52),
        RuleSpec("prop7.2", "K(End(I_1+...+I_n)) = K(B) + sum_j K(B/(I_j:I_j+1))", False, _r_prop72),
        RuleSpec("poset", "K(B(R,I,P))[1/s] = K(R)[1/s] + (n-1) K(R/I)[1/s]", True, _r_poset),
        RuleSpec("corner", "K(B_1) = K(eRe) + sum_j K(eRe/eI_j,j+1 e)", False, _r_corner),
        RuleSpec("opposite", "K(S') = K(R) + sum_j K(R/I_j)", False, _r_opposite),
        RuleSpec("bimodule", "K_i([[R,M],[N,S]]) = K_i(R) + K_i(S), i = 0, 1", False, _r_bimodule),
        RuleSpec("radfull", "K([[A, rad B],[A, B]]) = K(A) + K(B/rad B)", False, _r_radfull),
    ]
}


def build_rule(rule: str, env: Env, bind: dict, mode) -> RuleInstance:
    if rule not in RULES:
        raise UnknownRule(f"unknown rule {rule!r}; known: {', '.join(sorted(RULES))}")
    return RULES[rule].build(env, bind, mode)
