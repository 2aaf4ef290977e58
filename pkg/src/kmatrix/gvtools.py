"""GV-ideals and endomorphism rings of ideal chains.

An ideal ``I`` of ``R`` is GV when ``mu_I: R -> Hom_R(I, R)``, ``r -> (x -> x r)``,
is bijective; equivalently ``Hom(R/I, R) = Ext^1(R/I, R) = 0``.  Both routes are
computed and must agree.  Colon ideals follow the left-action convention
``(I:J) = {x : I x <= J}``, so that ``x`` in ``(I_i:I_j)`` is the map
``I_i -> I_j`` given by right multiplication.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .abgroup import FgAbGroup
from .errors import ChainBroken, NotTwoSided, ParentMismatch
from .finmod import FinModule, HomGroup, ModuleMap, ext1, hom_group
from .finring import FiniteRing, Ideal, RingHom, colon_ideal, cyclic_ring, poly_quotient, product_ring
from .lattice import Subgroup, express, kernel as group_kernel
from .matshape import build_slots

__all__ = [
    "GvCertificate",
    "mu_map",
    "is_gv",
    "end_ring",
    "chain_end_ring",
    "ChainEndReport",
    "gv_property_check",
    "random_commutative_instance",
]


def _as_module(I: Ideal) -> tuple[FinModule, ModuleMap]:
    return FinModule.regular(I.ring).submodule(I.sub)


def _right_mult_map(src: ModuleMap, tgt: FinModule, r, R: FiniteRing) -> np.ndarray:
    """Matrix of ``x -> x r`` from the submodule behind ``src`` into ``R``."""
    return (src.matrix @ R.right_matrix(r)) % R._d


def mu_map(R: FiniteRing, I: Ideal) -> tuple[HomGroup, np.ndarray]:
    """``Hom_R(I, R)`` and the matrix of ``mu_I`` in its cyclic coordinates."""
    if I.ring is not R:
        raise ParentMismatch("ideal belongs to another ring")
    Im, inc = _as_module(I)
    Rm = FinModule.regular(R)
    H = hom_group(Im, Rm)
    rows = [H.coords(_right_mult_map(inc, Rm, R.gen(t), R)) for t in range(R.dim)]
    return H, np.array(rows, dtype=np.int64).reshape(R.dim, len(H.sub.invariants))


@dataclass
class GvCertificate:
    ring: FiniteRing
    ideal: Ideal
    gv: bool
    mu_injective: bool
    mu_surjective: bool
    ext0: FgAbGroup
    ext1: FgAbGroup
    witness: dict | None = None
    inverse: list | None = None  # ring element for each Hom basis map

    @property
    def routes_agree(self) -> bool:
        return self.gv == (self.ext0.is_trivial and self.ext1.is_trivial)

    @property
    def verdict(self) -> str:
        return "GV" if self.gv else "not-GV"

    def recheck(self) -> bool:
        """Re-verify the evidence independently of how it was found."""
        R, I = self.ring, self.ideal
        if self.gv:
            H, _ = mu_map(R, I)
            Im, inc = _as_module(I)
            Rm = FinModule.regular(R)
            for g, r in zip(H.basis, self.inverse):
                if ((_right_mult_map(inc, Rm, r, R) - g.matrix) % R._d).any():
                    return False
            return True
        w = self.witness or {}
        if w.get("kind") == "annihilator":
            x = np.array(w["element"], dtype=np.int64)
            return bool(x.any()) and all(not R.mul(np.array(b), x).any() for b in I.basis)
        if w.get("kind") == "unreachable":
            H, M = mu_map(R, I)
            img = Subgroup(H.sub.invariants, M.tolist())
            return not img.contains(w["hom_coords"])
        return False

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "mu_injective": self.mu_injective,
            "mu_surjective": self.mu_surjective,
            "ext0": self.ext0.to_json(),
            "ext1": self.ext1.to_json(),
            "routes_agree": self.routes_agree,
            "witness": self.witness,
            "inverse": self.inverse,
        }


def is_gv(R: FiniteRing, I: Ideal) -> GvCertificate:
    if I.ring is not R:
        raise ParentMismatch("ideal belongs to another ring")
    if not I.closed("two"):
        raise NotTwoSided("GV test needs a two-sided ideal")
    H, M = mu_map(R, I)
    inv = H.sub.invariants
    ker = group_kernel(M.tolist(), R.orders, inv) if inv else Subgroup.full(R.orders)
    img = Subgroup(inv, M.tolist()) if inv else Subgroup.full([])
    inj, surj = ker.is_zero, img.is_full
    witness = None
    inverse = None
    if not inj:
        witness = {"kind": "annihilator", "element": list(ker.basis[0])}
    elif not surj:
        miss = next(g for g in Subgroup.full(inv).gens if not img.contains(g))
        witness = {"kind": "unreachable", "hom_coords": list(miss),
                   "hom": H.as_map(H.sub.from_coords(miss)).matrix.tolist()}
    else:
        inverse = []
        for k in range(len(inv)):
            c = express(M.tolist(), [int(k == j) for j in range(len(inv))], inv)
            inverse.append([int(x) % d for x, d in zip(c, R.orders)])
    # Ext route on R/I
    Rm = FinModule.regular(R)
    Q, _ = Rm.quotient(I.sub)
    e0 = hom_group(Q, Rm).group()
    e1 = ext1(Q, Rm)
    return GvCertificate(R, I, inj and surj, inj, surj, e0, e1, witness, inverse)


# ----------------------------------------------------------------------------
# endomorphism rings of direct sums


def end_ring(mods: Sequence[FinModule]) -> tuple[FiniteRing, dict]:
    """``End(M_1 + ... + M_n)`` as the matrix ring of ``Hom(M_i, M_j)``.

    Maps act on the right, so ``(f g)_ik = sum_j f_ij then g_jk``; the slot
    dictionary maps ``(i, j)`` to ``(offset, HomGroup)``.
    """
    n = len(mods)
    homs = {}
    off = 0
    for i in range(n):
        for j in range(n):
            H = hom_group(mods[i], mods[j])
            k = len(H.sub.invariants)
            if k:
                homs[(i + 1, j + 1)] = (off, H)
                off += k
    m = off
    C = np.zeros((m, m, m), dtype=np.int64)
    for (i, j), (oa, Ha) in homs.items():
        for k in range(1, n + 1):
            if (j, k) not in homs or (i, k) not in homs:
                continue
            ob, Hb = homs[(j, k)]
            oc, Hc = homs[(i, k)]
            for a, fa in enumerate(Ha.basis):
                for b, fb in enumerate(Hb.basis):
                    comp = fa.matrix @ fb.matrix
                    C[oa + a, ob + b, oc:oc + len(Hc.sub.invariants)] = Hc.coords(comp)
    one = np.zeros(m, dtype=np.int64)
    for i in range(1, n + 1):
        if (i, i) in homs:
            o, H = homs[(i, i)]
            one[o:o + len(H.sub.invariants)] = H.coords(np.eye(mods[i - 1].dim, dtype=np.int64))
    orders = [d for (_, H) in homs.values() for d in H.sub.invariants]
    E = FiniteRing(orders, C, one, validate=True)
    return E, homs


@dataclass
class ChainEndReport:
    hom_ring: FiniteRing
    colon_ring: FiniteRing
    embedding: RingHom
    slots: dict = field(default_factory=dict)
    gv_last: GvCertificate | None = None

    @property
    def isomorphic(self) -> bool:
        return self.embedding.is_injective and self.embedding.is_surjective

    def to_json(self) -> dict:
        return {
            "isomorphic": self.isomorphic,
            "hom_order": self.hom_ring.size,
            "colon_order": self.colon_ring.size,
            "gv_last": None if self.gv_last is None else self.gv_last.verdict,
            "slots": {f"{i},{j}": v for (i, j), v in sorted(self.slots.items())},
        }


def chain_end_ring(B: FiniteRing, chain: Sequence[Ideal]) -> ChainEndReport:
    """Hom-matrix and colon-matrix rings of a chain ``I_1 >= I_2 >= ... >= I_n``.

    The colon matrix maps into the Hom matrix by ``x -> (y -> y x)`` slotwise;
    the report records per slot whether that map is injective and onto.
    """
    n = len(chain)
    for I in chain:
        if I.ring is not B:
            raise ParentMismatch("chain ideal belongs to another ring")
    for i in range(n - 1):
        if not chain[i + 1] <= chain[i]:
            raise ChainBroken(i + 2)
    mods, incs = zip(*[_as_module(I) for I in chain])
    E, homs = end_ring(mods)
    colons = {(i + 1, j + 1): colon_ideal(chain[i], chain[j]).sub for i in range(n) for j in range(n)}
    Cr = build_slots(B, n, colons, kind="generic")
    rows = np.zeros((Cr.dim, E.dim), dtype=np.int64)
    slots = {}
    for (i, j), s in sorted(Cr.slots.items(), key=lambda kv: kv[1].offset):
        block = np.zeros((s.dim, 0), dtype=np.int64)
        H = homs.get((i, j))
        if H is not None:
            o, Hg = H
            k = len(Hg.sub.invariants)
            block = np.zeros((s.dim, k), dtype=np.int64)
            for a, x in enumerate(s.lifts):
                F = (incs[i - 1].matrix @ B.right_matrix(x)) % B._d
                block[a] = Hg.coords(_to_sub_coords(chain[j - 1].sub, F))
            rows[s.offset:s.offset + s.dim, o:o + k] = block
        hom_orders = list(H[1].sub.invariants) if H else []
        ker = group_kernel(block.tolist(), s.orders, hom_orders) if hom_orders else Subgroup.full(s.orders)
        onto = Subgroup(hom_orders, block.tolist()).is_full if hom_orders else True
        slots[(i, j)] = {
            "colon_order": Subgroup.full(s.orders).order(),
            "hom_order": H[1].order() if H else 1,
            "injective": ker.is_zero,
            "onto": onto,
        }
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if (i, j) not in slots:
                H = homs.get((i, j))
                slots[(i, j)] = {"colon_order": 1, "hom_order": H[1].order() if H else 1,
                                 "injective": True, "onto": H is None}
    emb = RingHom(Cr, E, rows)
    return ChainEndReport(E, Cr, emb, slots, is_gv(B, chain[-1]))


def _to_sub_coords(sub: Subgroup, F: np.ndarray) -> np.ndarray:
    if not len(F):
        return np.zeros((0, len(sub.invariants)), dtype=np.int64)
    return sub.coords_many(F)


# ----------------------------------------------------------------------------
# properties of GV-ideals


def gv_property_check(B: FiniteRing, ideals: dict[str, Ideal]) -> dict:
    """Check the standard consequences (2)-(6) for every GV-certified ideal."""
    certs = {name: is_gv(B, I) for name, I in ideals.items()}
    Bm = FinModule.regular(B)
    out: dict = {"ideals": {}, "products": {}}
    for name, J in ideals.items():
        c = certs[name]
        rep: dict = {"verdict": c.verdict, "routes_agree": c.routes_agree}
        # (4) annihilator
        ann = _right_annihilator(B, J)
        rep["annihilator_zero"] = ann.is_zero
        if not ann.is_zero:
            rep["annihilator_witness"] = list(ann.basis[0])
        if c.gv:
            # (2) End(J) = B via right multiplications
            Jm, inc = _as_module(J)
            E = hom_group(Jm, Jm)
            rows = [E.coords(_to_sub_coords(J.sub, (inc.matrix @ B.right_matrix(B.gen(t))) % B._d))
                    for t in range(B.dim)]
            inv = E.sub.invariants
            img = Subgroup(inv, rows) if inv else Subgroup.full([])
            kern = group_kernel(rows, B.orders, inv) if inv else Subgroup.full(B.orders)
            rep["end_is_B"] = img.is_full and kern.is_zero
            # (3) Hom(J, I) has the order of (J:I) for the other ideals
            rep["hom_vs_colon"] = {}
            for other, I in ideals.items():
                Im, _ = _as_module(I)
                rep["hom_vs_colon"][other] = hom_group(Jm, Im).order() == colon_ideal(J, I).order()
            # (5) ideals containing J
            rep["supersets_gv"] = {o: certs[o].gv for o, I in ideals.items() if J <= I}
            rep["ok"] = (rep["annihilator_zero"] and rep["end_is_B"]
                         and all(rep["hom_vs_colon"].values()) and all(rep["supersets_gv"].values()))
        else:
            rep["ok"] = c.routes_agree
        out["ideals"][name] = rep
    # (6) products of GV ideals
    gvs = [n for n, c in certs.items() if c.gv]
    for a in gvs:
        for b in gvs:
            out["products"][f"{a}*{b}"] = is_gv(B, ideals[a] * ideals[b]).gv
    out["ok"] = all(r["ok"] for r in out["ideals"].values()) and all(out["products"].values())
    return out


def _right_annihilator(B: FiniteRing, J: Ideal) -> Subgroup:
    """``{x : J x = 0}``."""
    basis = J.basis
    if not basis:
        return Subgroup.full(B.orders)
    M = np.hstack([B.left_matrix(np.array(b)) for b in basis])
    return group_kernel(M.tolist(), B.orders, list(B.orders) * len(basis))


def _random_commutative_ring(rng: np.random.Generator) -> FiniteRing:
    kind = rng.integers(3)
    if kind == 0:
        return cyclic_ring(int(rng.choice([2, 3, 4, 6, 8, 9, 12, 16, 18, 25, 27])))
    if kind == 1:
        n = int(rng.choice([2, 3, 4]))
        f = [int(c) for c in rng.integers(0, n, size=2)] + [1]
        return poly_quotient(n, f)
    a, b = (int(x) for x in rng.choice([2, 3, 4, 5, 9], size=2))
    return product_ring(cyclic_ring(a), cyclic_ring(b))


def random_commutative_instance(rng: np.random.Generator) -> tuple[FiniteRing, Ideal]:
    """A small commutative ring with a random two-sided ideal (often proper)."""
    R = _random_commutative_ring(rng)
    k = int(rng.integers(0, 3))
    gens = [[int(rng.integers(d)) for d in R.orders] for _ in range(k)]
    return R, R.ideal(gens)
