"""Formal K-theory expressions and the decomposition rules as rewrites.

A :class:`KExpr` is a direct sum ``m_1 K_d(L_1) + ... `` over ring labels
with a coefficient mode.  Rules rewrite one labelled term using explicit
bindings; nothing is applied automatically.  Values come from a fact table
(``data/facts.json`` by default), and every evaluation reports the facts it
used.
"""
from __future__ import annotations

import ast
import json
import operator
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

from .abgroup import FgAbGroup, LocalizedAbGroup, direct_sum, localize, mod_p, prime_factors
from .errors import HypothesisSchemaMismatch, ModeConflict, UnknownRule
from .kdirect import Mode

__all__ = [
    "KExpr",
    "KRule",
    "KBaseFact",
    "KValue",
    "Unknown",
    "RULES",
    "normalize",
    "apply_rule",
    "identify",
    "load_facts",
    "evaluate",
    "evaluate_family",
    "reproduce_paper_example",
]

_FACTS_PATH = Path(__file__).parent / "data" / "facts.json"


@dataclass(frozen=True)
class KExpr:
    terms: tuple[tuple[str, int], ...]
    degree: int | str = "*"
    mode: Mode = Mode()
    steps: tuple[str, ...] = ()

    @classmethod
    def of(cls, label: str, degree: int | str = "*", mode: Mode | str = "integral") -> "KExpr":
        return cls(((label, 1),), degree, Mode.parse(mode))

    @property
    def labels(self) -> list[str]:
        return [l for l, _ in self.terms]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        d = self.degree
        parts = [f"{m}K_{d}({l})" if m > 1 else f"K_{d}({l})" for l, m in self.terms]
        s = " + ".join(parts)
        if self.mode.kind == "localized":
            s = f"({s})[1/{self.mode.value}]"
        elif self.mode.kind == "mod-p":
            s = f"({s}; Z/{self.mode.value})"
        return s

    def to_json(self) -> dict:
        return {"degree": self.degree, "mode": str(self.mode),
                "terms": [[l, m] for l, m in self.terms], "steps": list(self.steps), "text": str(self)}


def normalize(expr: KExpr) -> KExpr:
    """Merge equal labels, drop zero multiplicities, sort by label."""
    acc: dict[str, int] = {}
    for label, m in expr.terms:
        if m < 0:
            raise HypothesisSchemaMismatch(f"negative multiplicity for {label}")
        acc[label] = acc.get(label, 0) + int(m)
    terms = tuple(sorted((l, m) for l, m in acc.items() if m > 0))
    return replace(expr, terms=terms)


# ----------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class KRule:
    id: str
    statement: str
    shape: str
    requires: tuple[str, ...]
    rewrite: Callable[[dict], list[str]]
    localized: bool = False
    degrees: tuple[int, ...] | None = None  # None: every degree


def _q(a: str, b: str) -> str:
    return f"{a}/{b}"


def _list(bind: dict, key: str) -> list:
    v = bind[key]
    if not isinstance(v, (list, tuple)):
        raise HypothesisSchemaMismatch(f"binding {key!r} must be a list")
    return list(v)


def _n(bind: dict) -> int:
    n = int(bind["n"])
    if n < 1:
        raise HypothesisSchemaMismatch("n must be positive")
    return n


def _shape_S(bind: dict) -> list[str]:
    return [bind["R"]] + [_q(bind["R"], I) for I in _list(bind, "I")]


def _shape_T(bind: dict) -> list[str]:
    Rj = _list(bind, "Rj") if "Rj" in bind else [bind["R"]] * len(_list(bind, "Ij"))
    Ij = _list(bind, "Ij")
    if len(Rj) != len(Ij):
        raise HypothesisSchemaMismatch("Rj and Ij need the same length")
    return [bind["R"]] + [_q(r, i) for r, i in zip(Rj, Ij)]


def _by_shape(bind: dict) -> list[str]:
    shape = bind.get("shape", "S")
    if shape == "S":
        return _shape_S(bind)
    if shape == "T":
        return _shape_T(bind)
    if shape == "cor4.8":
        return _two_sided(bind)
    raise HypothesisSchemaMismatch(f"unknown shape {shape!r}")


def _two_sided(bind: dict) -> list[str]:
    return [bind["R"]] + [_q(bind["R"], bind["I"])] * (_n(bind) - 1)


def _powers(bind: dict) -> list[str]:
    t = [int(x) for x in _list(bind, "t")]
    if any(x < 1 for x in t):
        raise HypothesisSchemaMismatch("exponents must be positive")
    return [bind["R"]] + [_q(bind["R"], f"{bind['I']}^{x}" if x > 1 else bind["I"]) for x in t]


def _powers_sorted(bind: dict) -> list[str]:
    t = [int(x) for x in _list(bind, "t")]
    if any(a > b for a, b in zip(t, t[1:])):
        raise HypothesisSchemaMismatch("exponents must be non-decreasing")
    return _powers(bind)


def _colon_label(bind: dict, a: str, b: str) -> str:
    c = f"({a}:{b})"
    return bind.get("colon", {}).get(c, c)


def _chain_end(bind: dict) -> list[str]:
    B, ch = bind["B"], _list(bind, "chain")
    return [B] + [_q(B, _colon_label(bind, a, b)) for a, b in zip(ch, ch[1:])]


def _gv_powers(bind: dict) -> list[str]:
    B, I, n = bind["B"], bind["I"], _n(bind)
    pw = [I] + [f"{I}^{j}" for j in range(2, n + 1)]
    return [B] + [_q(B, _colon_label(bind, a, b)) for a, b in zip(pw, pw[1:])]


def _gv_quotients(bind: dict) -> list[str]:
    B, ch = bind["B"], _list(bind, "chain")
    if not ch:
        return [B]
    return [B, _q(B, ch[0])] + [_q(B, _colon_label(bind, a, b)) for a, b in zip(ch, ch[1:])]


def _corner(bind: dict) -> list[str]:
    e = bind["eRe"]
    return [e] + [_q(e, f"e{I}e") for I in _list(bind, "I")]


RULES: dict[str, KRule] = {
    r.id: r
    for r in [
        KRule("lemma4.1", "K_n(S) = K_n(R1) + K_n(R2) for the triangular ring", "triangular",
              ("R1", "R2"), lambda b: [b["R1"], b["R2"]]),
        KRule("lemma4.2", "K_*(B) = K_*(R) + sum_{j<n} K_*(R/I_{j,j+1})", "B-lemma32", ("R", "I"), _shape_S),
        KRule("cor4.3", "K_*(S) = K_*(R) + sum_j K_*(R/I^{t_{j-1,j}})", "S-thm2 powers", ("R", "I", "t"), _powers),
        KRule("cor4.4", "K_*(T) = K_*(R) + sum_i K_*(R/I^{t_i})", "T-thm2 powers", ("R", "I", "t"), _powers_sorted),
        KRule("lemma4.5", "K_*(B) = K_*(R) + sum_j K_*(R_j/I_j)", "B-lemma34", ("R", "Ij"), _shape_T),
        KRule("cor4.6", "K_*(S) = K_*(R) + sum_j K_*(R/I_j) = K_*(T)", "T-thm2 chain", ("R", "I"),
              lambda b: [b["R"]] + [_q(b["R"], I) for I in _list(b, "I")]),
        KRule("thm1.1", "localized: K_*(S), K_*(T) as in the integral chain rules", "S-thm1/T-thm1",
              ("R",), _by_shape, localized=True),
        KRule("thm1.2", "K_*(S) = K_*(R) + sum_j K_*(R/I_{j-1,j}); K_*(T) = K_*(R) + sum_j K_*(R_j/I_j)",
              "S-thm2/T-thm2", ("R",), _by_shape),
        KRule("cor4.8", "localized: K_*(S) = K_*(R) + (n-1) K_*(R/I) when I^2 <= J", "S-cor48",
              ("R", "I", "n"), _two_sided, localized=True),
        KRule("prop5.1", "K_0 of the S, T and two-sided shapes, no coefficient change", "S-thm1/T-thm1/S-cor48",
              ("R",), _by_shape, degrees=(0,)),
        KRule("prop5.3", "K_1(B) = K_1(R) + (n-1) K_1(R/I), I idempotent", "S-cor48 idempotent",
              ("R", "I", "n"), _two_sided, degrees=(1,)),
        KRule("lemma5.2", "K_1(B) = K_1(A) for an idempotent ideal of A inside B", "extension",
              ("A",), lambda b: [b["A"]], degrees=(1,)),
        KRule("prop7.2", "K_*(End(I_1+...+I_n)) = K_*(B) + sum_j K_*(B/(I_j:I_{j+1}))", "GV chain",
              ("B", "chain"), _chain_end),
        KRule("cor7.3", "K_*(End(I+...+I^n)) = K_*(B) + sum_j K_*(B/(I^j:I^{j+1}))", "GV powers",
              ("B", "I", "n"), _gv_powers),
        KRule("cor7.4", "K_*(End(B + B/I_2 + ...)) = K_*(B) + K_*(B/I_2) + sum_j K_*(B/(I_j:I_{j+1}))",
              "GV quotients", ("B", "chain"), _gv_quotients),
        KRule("poset", "localized: K_*(B(R,I,P)) = K_*(R) + (n-1) K_*(R/I)", "poset",
              ("R", "I", "n"), _two_sided, localized=True),
        KRule("corner", "K_*(B_1) = K_*(eRe) + sum_j K_*(eRe/eI_{j,j+1}e)", "corner", ("eRe", "I"), _corner),
        KRule("opposite", "K_*(S') = K_*(R) + sum_j K_*(R/I_j)", "S-prime", ("R", "I"), _shape_S),
        KRule("bimodule", "K_i([[R,M],[N,S]]) = K_i(R) + K_i(S), i = 0, 1", "bimodule",
              ("R", "S"), lambda b: [b["R"], b["S"]], degrees=(0, 1)),
        KRule("radfull", "K_n(C) = K_n(A) + K_n(B/rad B)", "radical-full", ("A", "B"),
              lambda b: [b["A"], _q(b["B"], "rad(" + b["B"] + ")")]),
    ]
}


def _localized_mode(rule: KRule, mode: Mode, bind: dict) -> Mode:
    """Mode of the rewritten expression for a rule that needs new coefficients."""
    if mode.kind == "integral":
        if "s" not in bind:
            raise ModeConflict(f"{rule.id} holds only after inverting s; bind s or use a localized expression")
        mode = Mode("localized", int(bind["s"]))
    if mode.kind == "localized":
        p = bind.get("p")
        if p is None:
            raise HypothesisSchemaMismatch(f"{rule.id} needs the characteristic prime p of R bound")
        if mode.value % int(p):
            raise ModeConflict(f"p = {p} does not divide s = {mode.value}")
        return mode
    if mode.value % 4 == 2:
        raise ModeConflict(f"mod-{mode.value} form needs p not congruent to 2 mod 4")
    if not bind.get("p_invertible", False):
        raise HypothesisSchemaMismatch(f"{rule.id} with mod-p coefficients needs R to be a Z[1/p]-algebra")
    return mode


def apply_rule(expr: KExpr, rule_id: str, bind: dict) -> KExpr:
    """Rewrite the term ``bind["target"]`` (default: the only term) by a rule."""
    if rule_id not in RULES:
        raise UnknownRule(f"unknown rule {rule_id!r}")
    rule = RULES[rule_id]
    missing = [k for k in rule.requires if k not in bind]
    if missing:
        raise HypothesisSchemaMismatch(f"{rule_id} needs bindings {missing}")
    target = bind.get("target")
    labels = expr.labels
    if target is None:
        if len(labels) != 1:
            raise HypothesisSchemaMismatch("several terms; bind 'target'")
        target = labels[0]
    if target not in labels:
        raise HypothesisSchemaMismatch(f"no term {target!r} in {expr}")
    if rule.degrees is not None and expr.degree not in rule.degrees:
        raise HypothesisSchemaMismatch(f"{rule_id} is stated only in degrees {list(rule.degrees)}")
    mode = _localized_mode(rule, expr.mode, bind) if rule.localized else expr.mode
    try:
        rhs = rule.rewrite(bind)
    except KeyError as e:
        raise HypothesisSchemaMismatch(f"{rule_id} needs binding {e.args[0]!r}") from None
    terms = []
    for label, m in expr.terms:
        if label == target:
            terms += [(r, m) for r in rhs]
        else:
            terms.append((label, m))
    step = f"{rule_id}: K({target}) -> " + " + ".join(f"K({r})" for r in rhs)
    if mode != expr.mode:
        step += f" [{mode}]"
    return normalize(KExpr(tuple(terms), expr.degree, mode, expr.steps + (step,)))


def identify(expr: KExpr, mapping: dict[str, str], reason: str) -> KExpr:
    """Replace labels by isomorphic rings; ``reason`` is kept in the steps."""
    terms = tuple((mapping.get(l, l), m) for l, m in expr.terms)
    step = "identify: " + ", ".join(f"{a} = {b}" for a, b in mapping.items()) + f" ({reason})"
    return normalize(KExpr(terms, expr.degree, expr.mode, expr.steps + (step,)))


# ----------------------------------------------------------------------------
# facts and evaluation


@dataclass(frozen=True)
class KBaseFact:
    label: str
    degree: str
    provenance: str
    group: FgAbGroup | None = None
    cyclic: str | None = None
    opaque: str | None = None
    same_as: str | None = None
    guard: str | None = None
    display: str | None = None

    @classmethod
    def from_json(cls, d: dict) -> "KBaseFact":
        if not d.get("provenance"):
            raise HypothesisSchemaMismatch(f"fact for {d.get('label')} lacks provenance")
        g = FgAbGroup.from_json(d["group"]) if "group" in d else None
        return cls(d["label"], str(d["degree"]), d["provenance"], g, d.get("cyclic"), d.get("opaque"),
                   d.get("same_as"), d.get("guard"), d.get("display"))

    def to_json(self) -> dict:
        out = {"label": self.label, "degree": self.degree, "provenance": self.provenance}
        for k in ("cyclic", "opaque", "same_as", "guard", "display"):
            if getattr(self, k) is not None:
                out[k] = getattr(self, k)
        if self.group is not None:
            out["group"] = self.group.to_json()
        return out


def load_facts(path=None, extra: Sequence[dict] = ()) -> list[KBaseFact]:
    doc = json.loads(Path(path or _FACTS_PATH).read_text())
    return [KBaseFact.from_json(d) for d in list(extra) + list(doc)]


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Pow: operator.pow}


def _arith(expr: str, env: dict[str, int]) -> int:
    """Integer arithmetic over named parameters (``q^m-1`` style)."""
    tree = ast.parse(expr.replace("^", "**"), mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name) and node.id in env:
            return env[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise HypothesisSchemaMismatch(f"bad arithmetic in fact: {expr!r}")

    return int(ev(tree))


def _match_label(pattern: str, label: str) -> dict | None:
    if pattern == label:
        return {}
    if pattern == "F_{q}":
        m = re.fullmatch(r"F_(\d+)", label) or re.fullmatch(r"Z/(\d+)", label)
        if m:
            q = int(m.group(1))
            ps = prime_factors(q)
            if len(ps) == 1 and (label.startswith("F_") or q == ps[0]):
                return {"q": q}
    return None


def _match_degree(fact: KBaseFact, n: int) -> dict | None:
    d = fact.degree
    env: dict[str, int]
    if d == "*":
        return {}
    if d.isdigit():
        return {} if int(d) == n else None
    if d == "n":
        env = {"n": n}
    elif d == "2m":
        if n % 2:
            return None
        env = {"m": n // 2}
    elif d == "2m-1":
        if n % 2 == 0:
            return None
        env = {"m": (n + 1) // 2}
    else:
        return None
    if fact.guard:
        var, _, bound = fact.guard.partition(">=")
        if env.get(var.strip(), 0) < int(bound):
            return None
    return env


@dataclass
class Unknown:
    missing: list[str]

    def __str__(self) -> str:
        return "Unknown(" + ", ".join(self.missing) + ")"

    def to_json(self) -> dict:
        return {"unknown": self.missing}


@dataclass
class KValue:
    """Known group plus opaque summands such as ``K_3(Z)``."""

    group: FgAbGroup | LocalizedAbGroup
    opaque: list[str] = field(default_factory=list)
    provenance: list[str] = field(default_factory=list)

    def __str__(self) -> str:
        parts = list(self.opaque)
        if not self.group.is_trivial or not parts:
            parts.append(str(self.group))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "opaque": self.opaque, "provenance": self.provenance,
                "text": str(self)}


def _lookup(label: str, n: int, facts: list[KBaseFact], seen=()) -> tuple | None:
    """(group or None, opaque text or None, fact) for ``K_n(label)``."""
    for f in facts:
        env = _match_label(f.label, label)
        if env is None:
            continue
        denv = _match_degree(f, n)
        if denv is None:
            continue
        env = {**env, **denv}
        if f.same_as is not None:
            if f.same_as in seen:
                continue
            hit = _lookup(f.same_as, n, facts, seen + (label,))
            if hit is None:
                return None
            return hit[0], hit[1], hit[2] + (f,)
        if f.opaque is not None:
            return None, f.opaque.replace("{n}", str(n)), (f,)
        if f.cyclic is not None:
            return FgAbGroup.cyclic(_arith(f.cyclic, env)), None, (f,)
        return f.group, None, (f,)
    return None


def _integral_value(label: str, n: int, facts) -> tuple[FgAbGroup, list[str], list[str]] | None:
    hit = _lookup(label, n, facts)
    if hit is None:
        return None
    g, opaque, used = hit
    return (g if g is not None else FgAbGroup.trivial(), [opaque] if opaque else [],
            [f"K_{n}({label}): {f.provenance}" for f in used])


def evaluate(expr: KExpr, n: int | None = None, facts: list[KBaseFact] | None = None):
    """Value of ``expr`` in degree ``n`` (defaults to the expression's own degree)."""
    facts = load_facts() if facts is None else facts
    n = expr.degree if n is None else n
    if not isinstance(n, int):
        raise HypothesisSchemaMismatch("evaluation needs a concrete degree")
    mode = expr.mode
    if mode.kind == "mod-p" and mode.value % 4 == 2:
        ends = _uct_endpoints(expr, n, facts)
        err = ModeConflict(f"mod-{mode.value} coefficients: the coefficient sequence need not split")
        err.endpoints = ends
        raise err
    groups, opaque, prov, missing = [], [], [], []
    for label, m in expr.terms:
        v = _term_value(label, n, mode, facts)
        if v is None:
            missing.append(label)
            continue
        g, op, pv = v
        groups += [g] * m
        opaque += op * m
        prov += pv
    if missing:
        return Unknown(sorted(set(missing)))
    if mode.kind == "localized":
        total = localize(direct_sum(groups) if groups else FgAbGroup.trivial(), mode.value)
    else:
        total = direct_sum(groups) if groups else FgAbGroup.trivial()
    return KValue(total, opaque, sorted(set(prov)))


def _term_value(label: str, n: int, mode: Mode, facts):
    base = _integral_value(label, n, facts)
    if base is None:
        return None
    g, op, pv = base
    if mode.kind == "integral":
        return g, op, pv
    if mode.kind == "localized":
        return g, [f"{o}[1/{mode.value}]" for o in op], pv
    tensor, _ = mod_p(g, mode.value)
    parts = [tensor]
    if n >= 1:
        prev = _integral_value(label, n - 1, facts)
        if prev is None:
            return None
        _, tor = mod_p(prev[0], mode.value)
        parts.append(tor)
        pv = pv + prev[2]
        op = op + [f"Tor({o}, Z/{mode.value})" for o in prev[1]]
    return direct_sum(parts), [f"{o} (x) Z/{mode.value}" for o in base[1]] + op[len(base[1]):], pv


def _uct_endpoints(expr: KExpr, n: int, facts) -> dict:
    p = expr.mode.value
    left = evaluate(replace(expr, mode=Mode()), n, facts)
    right = evaluate(replace(expr, mode=Mode()), n - 1, facts) if n >= 1 else None
    out = {"tensor": None, "tor": None}
    if isinstance(left, KValue):
        out["tensor"] = mod_p(left.group, p)[0].to_json()
    if isinstance(right, KValue):
        out["tor"] = mod_p(right.group, p)[1].to_json()
    return out


def evaluate_family(expr: KExpr, family: str, guard: int, facts=None, order: Sequence[str] = ()) -> str:
    """Display of ``expr`` over a degree family (``"2m"`` or ``"2m-1"``, ``m >= guard``).

    Each summand must be described by one fact for the whole family; a
    constant family (same group for every ``m``) is rendered by value.
    """
    facts = load_facts() if facts is None else facts
    parts = []
    for label, mult in _ordered(expr, order):
        piece = _family_piece(label, family, guard, facts)
        if piece is None:
            return str(Unknown([label]))
        if piece != "0":
            parts += [piece] * mult
    return " ⊕ ".join(parts) if parts else "0"


def _family_piece(label: str, family: str, guard: int, facts) -> str | None:
    sym = {"2m": "2m", "2m-1": "2m-1"}[family]
    for f in facts:
        env = _match_label(f.label, label)
        if env is None:
            continue
        if f.same_as is not None and f.degree == "*":
            return _family_piece(f.same_as, family, guard, facts)
        if f.degree == family:
            fg = int(f.guard.partition(">=")[2]) if f.guard else 0
            if fg > guard:
                continue
            return (f.display or "").replace("{q}", str(env.get("q", "")))
        if f.degree == "n" and f.opaque:
            fg = int(f.guard.partition(">=")[2]) if f.guard else 0
            low = 2 * guard if family == "2m" else 2 * guard - 1
            if low >= fg:
                return f.opaque.replace("{n}", "{" + sym + "}")
    return None


# ----------------------------------------------------------------------------
# the worked example: End_{Z[x]}(Z[x] + J) with J = (p, x)

EXPECTED_DISPLAY = {
    "K_0": "ℤ ⊕ ℤ",
    "K_1": "ℤ/2ℤ ⊕ (ℤ/{p}ℤ)^×",
    "K_2m (m >= 1)": "K_{2m}(ℤ)",
    "K_2m-1 (m >= 2)": "K_{2m-1}(ℤ) ⊕ ℤ/({p}^m-1)ℤ",
}


def _ordered(expr: KExpr, order: Sequence[str]) -> list[tuple[str, int]]:
    """Terms in a preferred display order; unlisted labels keep sorted order at the end."""
    rank = {l: i for i, l in enumerate(order)}
    return sorted(expr.terms, key=lambda t: (rank.get(t[0], len(rank)), t[0]))


def _display_degree(expr: KExpr, n: int, facts, order: Sequence[str] = ()) -> str:
    parts = []
    for label, mult in _ordered(expr, order):
        for f in facts:
            env = _match_label(f.label, label)
            if env is None or _match_degree(f, n) is None:
                continue
            if f.same_as is not None:
                label = f.same_as
                continue
            break
        hit = _lookup(label, n, facts)
        if hit is None:
            return str(Unknown([label]))
        g, opaque, used = hit
        disp = used[-1].display or (opaque if opaque else str(g))
        q = _match_label(used[-1].label, label) or {}
        parts += [disp.replace("{q}", str(q.get("q", "")))] * mult
    return " ⊕ ".join(parts)


def reproduce_paper_example(p: int, facts=None) -> dict:
    """Derive the four displayed families for the ring ``End(Z[x] + (p, x))``.

    The chain ``Z[x] >= J`` with ``J = (p, x)`` a GV-ideal gives
    ``K(Z[x]) + K(Z[x]/(Z[x]:J))``; ``(Z[x]:J) = J`` and ``Z[x]/J = Z/p``;
    the Fundamental Theorem fact turns ``Z[x]`` into ``Z``.
    """
    if len(prime_factors(p)) != 1 or prime_factors(p)[0] != p:
        raise HypothesisSchemaMismatch("p must be prime")
    facts = load_facts() if facts is None else facts
    e = KExpr.of("End(Z[x]+J)")
    e = apply_rule(e, "prop7.2", {"B": "Z[x]", "chain": ["Z[x]", "J"], "colon": {"(Z[x]:J)": "J"}})
    e = identify(e, {"Z[x]/J": f"Z/{p}"}, f"Z[x]/(p, x) = Z/p")
    order = ["Z[x]", f"Z/{p}"]  # base ring first, as displayed
    got = {
        "K_0": _display_degree(e, 0, facts, order),
        "K_1": _display_degree(e, 1, facts, order),
        "K_2m (m >= 1)": evaluate_family(e, "2m", 1, facts, order),
        "K_2m-1 (m >= 2)": evaluate_family(e, "2m-1", 2, facts, order),
    }
    want = {k: v.replace("{p}", str(p)) for k, v in EXPECTED_DISPLAY.items()}
    groups = {f"K_{n}": evaluate(replace(e, degree=n), n, facts) for n in (0, 1)}
    return {
        "p": p,
        "expression": e.to_json(),
        "display": got,
        "expected": want,
        "match": got == want,
        "groups": {k: v.to_json() for k, v in groups.items()},
    }
