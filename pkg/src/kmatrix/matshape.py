"""Matrix subrings built from ideal patterns.

Every shape here is an ``n x n`` array of slots over a base ring ``R``: slot
``(i, j)`` holds ``N_ij / D_ij`` for additive subgroups ``D_ij <= N_ij`` of
``R`` (``D`` is zero except in the quotient column of the companion ring).
Products are computed entrywise in ``R`` and projected back into the
target slot.  Indices are 1-based throughout, matching how the shapes are
usually written down.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Iterable, Mapping

import numpy as np

from .abgroup import prime_factors
from .errors import (
    ConditionsNotVerified,
    NotIdempotent,
    NotLinearlyExtended,
    NotPullback,
    ShapeError,
)
from .finmod import FinModule
from .finring import (
    FiniteRing,
    Ideal,
    RingHom,
    _rows,
    ideal_closure,
    quotient_ring,
    subring,
)
from .lattice import Subgroup

__all__ = [
    "MatrixPattern",
    "BuiltRing",
    "MilnorSquare",
    "Violation",
    "build_slots",
    "check_conditions",
    "build_subring",
    "companion_C",
    "milnor_square",
    "milnor_square_thm1",
    "poset_ring",
    "bimodule_ring",
    "Bimodule",
    "corner_ring",
    "ideal_power",
    "KINDS",
]

KINDS = (
    "S-thm1",
    "T-thm1",
    "S-thm2",
    "T-thm2",
    "B-lemma32",
    "B-lemma34",
    "S-cor48",
    "S-prime",
    "poset",
    "bimodule",
    "corner",
    "generic",
)

Pos = tuple[int, int]


# ----------------------------------------------------------------------------
# generic slot builder


@dataclass
class SlotInfo:
    pos: Pos
    num: Subgroup
    den: Subgroup | None
    lifts: np.ndarray  # base-ring vectors, one per slot generator
    orders: tuple[int, ...]
    offset: int
    label: str = ""

    @property
    def dim(self) -> int:
        return len(self.orders)

    def to_coords(self, V) -> np.ndarray:
        """Slot coordinates of base-ring vectors lying in ``num``."""
        V = _rows(V, len(self.num.orders))
        c = self.num.coords_many(V)
        if self.den is None or self.den.is_zero:
            return c
        return self._den_in_num.quotient.image_many(c)

    @property
    def _den_in_num(self) -> Subgroup:
        if not hasattr(self, "_dn"):
            self._dn = Subgroup(self.num.invariants, [self.num.coords(d) for d in self.den.basis])
        return self._dn


class BuiltRing(FiniteRing):
    """A matrix ring over ``base`` with per-slot component addressing."""

    base: FiniteRing
    n: int
    slots: dict[Pos, SlotInfo]
    kind: str

    def embed(self, i: int, j: int, x) -> np.ndarray:
        """The matrix with ``x`` in slot ``(i, j)`` and zeros elsewhere."""
        v = self.zero()
        s = self.slots.get((i, j))
        if s is None:
            if np.any(np.asarray(x) % self.base._d):
                raise ShapeError(f"slot {(i, j)} is zero")
            return v
        v[s.offset:s.offset + s.dim] = s.to_coords([x])[0]
        return v

    def entry(self, v, i: int, j: int) -> np.ndarray:
        """A base-ring representative of the ``(i, j)`` entry of ``v``."""
        s = self.slots.get((i, j))
        if s is None:
            return self.base.zero()
        c = np.asarray(v, dtype=np.int64)[s.offset:s.offset + s.dim]
        return (c @ s.lifts) % self.base._d if s.dim else self.base.zero()

    def e(self, i: int) -> np.ndarray:
        """Diagonal idempotent ``e_i``."""
        return self.embed(i, i, self.base.one)

    def component(self, i: int, j: int) -> Subgroup:
        s = self.slots.get((i, j))
        rows = []
        if s is not None:
            for k in range(s.dim):
                v = self.zero()
                v[s.offset + k] = 1
                rows.append(v.tolist())
        return Subgroup(self.orders, rows)

    def sub_from_entries(self, entries: Mapping[Pos, Iterable]) -> Subgroup:
        """Subgroup of ``self`` spanned by base-ring vectors placed in slots."""
        rows = []
        for (i, j), vecs in entries.items():
            for x in vecs:
                rows.append(self.embed(i, j, x).tolist())
        return Subgroup(self.orders, rows)


def build_slots(
    base: FiniteRing,
    n: int,
    slots: Mapping[Pos, Subgroup | tuple[Subgroup, Subgroup | None]],
    *,
    kind: str = "generic",
    labels: Mapping[Pos, str] | None = None,
    validate: bool = False,
) -> BuiltRing:
    """Assemble the matrix ring with the given slots.

    Raises :class:`ConditionsNotVerified` if a product leaves its slot or
    the identity does not fit on the diagonal.
    """
    labels = labels or {}
    infos: dict[Pos, SlotInfo] = {}
    dropped: dict[Pos, Subgroup] = {}
    offset = 0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            spec = slots.get((i, j))
            if spec is None:
                continue
            num, den = spec if isinstance(spec, tuple) else (spec, None)
            if den is not None and not den <= num:
                raise ConditionsNotVerified([{"condition": "denominator inside numerator", "at": [i, j]}])
            if den is None or den.is_zero:
                orders = tuple(num.invariants)
                lifts = _rows(num.gens, base.dim)
                den = None
            else:
                dn = Subgroup(num.invariants, [num.coords(d) for d in den.basis])
                qm = dn.quotient
                orders = tuple(qm.invariants)
                lifts = _rows([num.from_coords(l) for l in qm.lifts], base.dim)
            if not orders:
                dropped[(i, j)] = num
                continue
            info = SlotInfo((i, j), num, den, lifts, orders, offset, labels.get((i, j), ""))
            if den is not None:
                info._dn = dn
            infos[(i, j)] = info
            offset += len(orders)
    m = offset
    C = np.zeros((m, m, m), dtype=np.int64)
    for (i, j), a in infos.items():
        for k in range(1, n + 1):
            b = infos.get((j, k))
            if b is None:
                continue
            P = np.einsum("ax,by,xyz->abz", a.lifts, b.lifts, base.C) % base._d
            P = P.reshape(-1, base.dim)
            tgt = infos.get((i, k))
            if tgt is None:
                # the target slot is zero (possibly a trivial quotient N/N)
                num = dropped.get((i, k), Subgroup.zero(base.orders))
                ok = num.contains_many(P)
                if not ok.all():
                    raise ConditionsNotVerified(
                        [{"condition": "closed under multiplication", "at": [i, j, k],
                          "witness": P[~ok][0].tolist()}]
                    )
                continue
            ok = tgt.num.contains_many(P)
            if not ok.all():
                raise ConditionsNotVerified(
                    [{"condition": "closed under multiplication", "at": [i, j, k],
                      "witness": P[~ok][0].tolist()}]
                )
            _check_well_defined(base, a, b, tgt, (i, j, k))
            coords = tgt.to_coords(P).reshape(a.dim, b.dim, tgt.dim)
            C[a.offset:a.offset + a.dim, b.offset:b.offset + b.dim, tgt.offset:tgt.offset + tgt.dim] = coords
    one = np.zeros(m, dtype=np.int64)
    for i in range(1, n + 1):
        s = infos.get((i, i))
        if s is None:
            continue
        if not s.num.contains(base.one):
            raise ConditionsNotVerified([{"condition": "identity on the diagonal", "at": [i, i]}])
        one[s.offset:s.offset + s.dim] = s.to_coords([base.one])[0]
    orders = [d for s in infos.values() for d in s.orders]
    gen_labels = [f"({i},{j})#{t}" for (i, j), s in infos.items() for t in range(s.dim)]
    R = BuiltRing(orders, C, one, validate=validate, labels=gen_labels)
    R.base = base
    R.n = n
    R.slots = infos
    R.kind = kind
    return R


def _check_well_defined(base: FiniteRing, a: SlotInfo, b: SlotInfo, tgt: SlotInfo, at) -> None:
    # with quotient slots, D_a N_b and N_a D_b must land in D_tgt
    dt = tgt.den if tgt.den is not None else Subgroup.zero(base.orders)
    pairs = []
    if a.den is not None:
        pairs.append((a.den, b.num))
    if b.den is not None:
        pairs.append((a.num, b.den))
    for X, Y in pairs:
        Xb, Yb = _rows(X.basis, base.dim), _rows(Y.basis, base.dim)
        if not len(Xb) or not len(Yb):
            continue
        P = (np.einsum("ax,by,xyz->abz", Xb, Yb, base.C) % base._d).reshape(-1, base.dim)
        ok = dt.contains_many(P)
        if not ok.all():
            raise ConditionsNotVerified(
                [{"condition": "product well defined on quotient slots", "at": list(at),
                  "witness": P[~ok][0].tolist()}]
            )


# ----------------------------------------------------------------------------
# patterns and their conditions


@dataclass
class Violation:
    condition: str
    at: tuple
    witness: list | None = None

    def to_json(self) -> dict:
        return {"condition": self.condition, "at": list(self.at), "witness": self.witness}


@dataclass
class MatrixPattern:
    """Slot assignment of a matrix subring plus the data its shape needs.

    ``entries`` maps 1-based positions to subgroups of ``R``; ``labels``
    names them (``"R"``, ``"I12"``, ...).  ``ideals`` holds the named ideals
    the shape conditions talk about; ``subrings`` the ``R_i`` of T-shapes;
    ``exponents`` the ``t_ij`` of power shapes.
    """

    kind: str
    R: FiniteRing
    n: int
    entries: dict[Pos, Subgroup]
    labels: dict[Pos, str] = field(default_factory=dict)
    ideals: dict[str, Ideal] = field(default_factory=dict)
    subrings: dict[int, Subgroup] = field(default_factory=dict)
    exponents: dict[Pos, int] = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def slot(self, i: int, j: int) -> Subgroup:
        return self.entries.get((i, j), Subgroup.zero(self.R.orders))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "entries": {f"{i},{j}": self.labels.get((i, j), "?") for (i, j) in sorted(self.entries)},
        }

    # -- constructors ----------------------------------------------------
    @classmethod
    def lower_full(cls, R: FiniteRing, upper: Mapping[Pos, Ideal], *, kind: str = "S-thm2",
                   lower: Ideal | None = None, n: int | None = None) -> "MatrixPattern":
        """``R`` (or ``lower``) below the diagonal, ``upper[(i, j)]`` above, ``R`` on it.

        This covers S and B of the chain theorems (``lower=None``) and the
        S-shape with ideal ``I`` below the diagonal.
        """
        if n is None:
            n = max([max(p) for p in upper] + [1])
        full = Subgroup.full(R.orders)
        entries, labels, ideals = {}, {}, {}
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j:
                    entries[(i, j)], labels[(i, j)] = full, "R"
                elif i > j:
                    if lower is None:
                        entries[(i, j)], labels[(i, j)] = full, "R"
                    else:
                        entries[(i, j)], labels[(i, j)] = lower.sub, "I"
                else:
                    I = upper[(i, j)]
                    entries[(i, j)], labels[(i, j)] = I.sub, f"I{i}{j}"
                    ideals[f"I{i}{j}"] = I
        if lower is not None:
            ideals["I"] = lower
        return cls(kind, R, n, entries, labels, ideals)

    @classmethod
    def chain_T(cls, R: FiniteRing, chain: Mapping[int, Ideal], *, kind: str = "T-thm2",
                subrings: Mapping[int, Subgroup] | None = None,
                lower: Mapping[Pos, Ideal] | None = None,
                first_column: Ideal | None = None) -> "MatrixPattern":
        """T-shape: column ``j >= 2`` holds ``I_j`` above the diagonal.

        ``subrings`` gives ``R_j`` (default ``R``), ``lower`` the ``I_ij`` for
        ``i > j >= 2`` (default ``R``) and ``first_column`` replaces the
        ``R`` below ``(1, 1)``.
        """
        n = max(chain)
        full = Subgroup.full(R.orders)
        subrings = dict(subrings or {})
        lower = dict(lower or {})
        entries, labels, ideals = {}, {}, {}
        for j, I in chain.items():
            ideals[f"I{j}"] = I
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if j == 1:
                    if i > 1 and first_column is not None:
                        entries[(i, j)], labels[(i, j)] = first_column.sub, "I"
                    else:
                        entries[(i, j)], labels[(i, j)] = full, "R"
                elif i < j:
                    entries[(i, j)], labels[(i, j)] = chain[j].sub, f"I{j}"
                elif i == j:
                    entries[(i, j)] = subrings.get(j, full)
                    labels[(i, j)] = f"R{j}" if j in subrings else "R"
                else:
                    if (i, j) in lower:
                        entries[(i, j)], labels[(i, j)] = lower[(i, j)].sub, f"I{i}{j}"
                        ideals[f"I{i}{j}"] = lower[(i, j)]
                    else:
                        entries[(i, j)], labels[(i, j)] = full, "R"
        if first_column is not None:
            ideals["I"] = first_column
        return cls(kind, R, n, entries, labels, ideals, subrings)

    @classmethod
    def power(cls, R: FiniteRing, I: Ideal, t: Mapping[Pos, int], n: int | None = None) -> "MatrixPattern":
        """``I^{t_ij}`` above the diagonal, ``R`` elsewhere."""
        n = n or max(max(p) for p in t)
        upper = {(i, j): ideal_power(I, t[(i, j)]) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
        pat = cls.lower_full(R, upper, kind="S-thm2", n=n)
        for (i, j) in upper:
            pat.labels[(i, j)] = f"I^{t[(i, j)]}"
        pat.ideals["I"] = I
        pat.exponents = {k: int(v) for k, v in t.items()}
        return pat

    @classmethod
    def two_sided(cls, R: FiniteRing, I: Ideal, J: Ideal, n: int, kind: str = "S-cor48") -> "MatrixPattern":
        """``I`` above the diagonal, ``J`` below, ``R`` on it."""
        full = Subgroup.full(R.orders)
        entries, labels = {}, {}
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j:
                    entries[(i, j)], labels[(i, j)] = full, "R"
                elif i < j:
                    entries[(i, j)], labels[(i, j)] = I.sub, "I"
                else:
                    entries[(i, j)], labels[(i, j)] = J.sub, "J"
        return cls(kind, R, n, entries, labels, {"I": I, "J": J})

    @classmethod
    def rows_of_ideals(cls, R: FiniteRing, rows: Mapping[int, Ideal]) -> "MatrixPattern":
        """Row ``i < n`` holds ``I_i`` off the diagonal; the last row is all ``R``."""
        n = max(rows) + 1
        full = Subgroup.full(R.orders)
        entries, labels, ideals = {}, {}, {}
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j or i == n:
                    entries[(i, j)], labels[(i, j)] = full, "R"
                else:
                    entries[(i, j)], labels[(i, j)] = rows[i].sub, f"I{i}"
                    ideals[f"I{i}"] = rows[i]
        return cls("S-prime", R, n, entries, labels, ideals)


def ideal_power(I: Ideal, t: int) -> Ideal:
    R = I.ring
    out = R.unit_ideal()
    for _ in range(t):
        out = out * I
    return out


def _contained(A: Subgroup, B: Subgroup) -> list | None:
    """First basis vector of ``A`` outside ``B`` (``None`` if ``A <= B``)."""
    for v in A.basis:
        if not B.contains(v):
            return list(v)
    return None


def _product_witness(R: FiniteRing, A: Subgroup, B: Subgroup, C: Subgroup) -> list | None:
    Ab = _rows(A.basis, R.dim)
    Bb = _rows(B.basis, R.dim)
    if not len(Ab) or not len(Bb):
        return None
    P = (np.einsum("ax,by,xyz->abz", Ab, Bb, R.C) % R._d).reshape(-1, R.dim)
    ok = C.contains_many(P)
    return None if ok.all() else P[~ok][0].tolist()


def _ideal_violations(R: FiniteRing, name: str, sub: Subgroup, side: str) -> list[Violation]:
    I = Ideal(R, sub, side)
    if I.closed(side):
        return []
    for s in (("left", "right") if side == "two" else (side,)):
        if not I.closed(s):
            B = _rows(sub.basis, R.dim)
            for t in range(R.dim):
                V = (B @ (R.C[t] if s == "left" else R.C[:, t, :])) % R._d
                bad = V[~sub.contains_many(V)]
                if len(bad):
                    return [Violation(f"{name} is a {s} ideal of R", (name,), bad[0].tolist())]
    return [Violation(f"{name} is a {side} ideal of R", (name,))]


def _is_prime_power_algebra(R: FiniteRing) -> tuple[bool, int | None]:
    ps = prime_factors(R.size)
    if len(ps) > 1:
        return False, None
    return True, (ps[0] if ps else None)


def check_conditions(pattern: MatrixPattern) -> list[Violation]:
    """All violated shape conditions (empty list means pass)."""
    R, n, kind = pattern.R, pattern.n, pattern.kind
    out: list[Violation] = []
    E = pattern.slot
    if kind not in KINDS:
        raise ShapeError(f"unknown pattern kind {kind!r}")

    # generic: multiplicative closure of the slots, identity on the diagonal
    for i, k, j in iproduct(range(1, n + 1), repeat=3):
        w = _product_witness(R, E(i, k), E(k, j), E(i, j))
        if w is not None:
            out.append(Violation("B_ik B_kj <= B_ij", (i, k, j), w))
    for i in range(1, n + 1):
        if not E(i, i).contains(R.one):
            out.append(Violation("1 in B_ii", (i, i)))

    if kind in ("S-thm1", "S-thm2", "B-lemma32"):
        for (i, j) in [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]:
            out += _ideal_violations(R, f"I{i}{j}", E(i, j), "two")
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                for k in range(1, i):
                    w = _contained(E(k, j), E(i, j))
                    if w is not None:
                        out.append(Violation("I_kj <= I_ij for k <= i", (k, i, j), w))
        for k in range(1, n + 1):
            for i in range(k + 1, n + 1):
                for j in range(k + 1, i):
                    w = _contained(E(k, i), E(k, j))
                    if w is not None:
                        out.append(Violation("I_ki <= I_kj for j <= i", (k, i, j), w))
        for i in range(1, n + 1):
            for j in range(i + 2, n + 1):
                for k in range(i + 1, j):
                    w = _product_witness(R, E(i, k), E(k, j), E(i, j))
                    if w is not None:
                        out.append(Violation("I_ik I_kj <= I_ij for i < k < j", (i, k, j), w))
        for i in range(2, n + 1):
            for j in range(1, i):
                if kind == "S-thm1":
                    I = pattern.ideals["I"].sub
                    if E(i, j) != I:
                        out.append(Violation("I below the diagonal", (i, j)))
                elif not E(i, j).is_full:
                    out.append(Violation("R below the diagonal", (i, j)))
        if kind == "S-thm1":
            I = pattern.ideals["I"]
            out += _ideal_violations(R, "I", I.sub, "two")
            for i in range(1, n + 1):
                for j in range(i + 1, n + 1):
                    w = _contained(E(i, j), I.sub)
                    if w is not None:
                        out.append(Violation("I_ij <= I", (i, j), w))
            ok, _ = _is_prime_power_algebra(R)
            if not ok:
                out.append(Violation("R is a Z/p^m-algebra", (), list(prime_factors(R.size))))
        t = pattern.exponents
        if t:
            for i in range(1, n + 1):
                for j in range(i + 1, n + 1):
                    if j + 1 <= n and t[(i, j)] > t[(i, j + 1)]:
                        out.append(Violation("t_ij <= t_i,j+1", (i, j), [t[(i, j)], t[(i, j + 1)]]))
                    if i + 1 < j and t[(i + 1, j)] > t[(i, j)]:
                        out.append(Violation("t_i+1,j <= t_ij", (i, j), [t[(i + 1, j)], t[(i, j)]]))
                    for k in range(i + 1, j):
                        if t[(i, j)] > t[(i, k)] + t[(k, j)]:
                            out.append(Violation("t_ij <= t_ik + t_kj", (i, k, j),
                                                 [t[(i, j)], t[(i, k)], t[(k, j)]]))

    if kind in ("T-thm1", "T-thm2", "B-lemma34"):
        chain = {j: E(1, j) for j in range(2, n + 1)}
        for j in range(2, n + 1):
            Rj = pattern.subrings.get(j, Subgroup.full(R.orders))
            if not Rj.contains(R.one):
                out.append(Violation("R_j contains 1", (j,)))
            w = _product_witness(R, Rj, Rj, Rj)
            if w is not None:
                out.append(Violation("R_j is a subring", (j,), w))
            w = _contained(chain[j], Rj)
            if w is not None:
                out.append(Violation("I_j <= R_j", (j,), w))
            w = _product_witness(R, chain[j], Rj, chain[j])
            if w is not None:
                out.append(Violation("I_j is a right ideal of R_j", (j,), w))
            side = "two" if kind == "T-thm1" else "left"
            out += _ideal_violations(R, f"I{j}", chain[j], side)
            if j + 1 <= n:
                w = _contained(chain[j + 1], chain[j])
                if w is not None:
                    out.append(Violation("I_{j+1} <= I_j", (j,), w))
            for i in range(j + 1, n + 1):
                out += _ideal_violations(R, f"I{i}{j}", E(i, j), "two")
                w = _contained(chain[j], E(i, j))
                if w is not None:
                    out.append(Violation("I_j <= I_ij", (i, j), w))
                for k in range(j + 1, i):
                    w = _product_witness(R, E(i, k), E(k, j), E(i, j))
                    if w is not None:
                        out.append(Violation("I_ik I_kj <= I_ij for j < k < i", (i, k, j), w))
            for i in range(1, j):
                if E(i, j) != chain[j]:
                    out.append(Violation("column j holds I_j above the diagonal", (i, j)))
        if kind == "T-thm1":
            I = pattern.ideals["I"]
            out += _ideal_violations(R, "I", I.sub, "two")
            for i in range(2, n + 1):
                if E(i, 1) != I.sub:
                    out.append(Violation("I below (1,1)", (i, 1)))
                for j in range(2, i):
                    w = _contained(E(i, j), I.sub)
                    if w is not None:
                        out.append(Violation("I_ij <= I", (i, j), w))
            ok, _ = _is_prime_power_algebra(R)
            if not ok:
                out.append(Violation("R is a Z/p^m-algebra", (), list(prime_factors(R.size))))
        else:
            for i in range(2, n + 1):
                if not E(i, 1).is_full:
                    out.append(Violation("R in the first column", (i, 1)))

    if kind == "S-cor48":
        I, J = pattern.ideals["I"], pattern.ideals["J"]
        out += _ideal_violations(R, "I", I.sub, "two")
        out += _ideal_violations(R, "J", J.sub, "two")
        if pattern.params.get("require_I2_in_J", True):
            w = _product_witness(R, I.sub, I.sub, J.sub)
            if w is not None:
                out.append(Violation("I^2 <= J", (), w))

    if kind == "S-prime":
        for name, I in pattern.ideals.items():
            out += _ideal_violations(R, name, I.sub, "two")
    return out


def build_subring(pattern: MatrixPattern) -> BuiltRing:
    """Build the ring after re-checking the pattern's conditions.

    A 1x1 pattern with entry ``R`` returns ``R`` itself.
    """
    bad = check_conditions(pattern)
    if bad:
        raise ConditionsNotVerified([v.to_json() for v in bad])
    if pattern.n == 1 and pattern.slot(1, 1).is_full:
        return pattern.R
    return build_slots(pattern.R, pattern.n, pattern.entries, kind=pattern.kind, labels=pattern.labels)


# ----------------------------------------------------------------------------
# companion ring of the chain shape


def companion_C(pattern: MatrixPattern) -> BuiltRing:
    """Derived-equivalent companion of a chain-shaped ring.

    For the S/B chain shape the last column becomes ``B_{i,n-1} / B_{i,n}``
    with corner ``R / I_{n-1,n}`` and a zero last row.  For the T shape the
    first column becomes ``R / I_{i2}`` (``R / I_2`` in row 2) with corner
    ``R_2 / I_2`` and a zero first row.
    """
    if pattern.kind in ("T-thm2", "B-lemma34"):
        return _companion_T(pattern)
    if pattern.kind not in ("S-thm2", "B-lemma32"):
        raise ShapeError("companion ring needs a chain-shaped pattern")
    bad = check_conditions(pattern)
    if bad:
        raise ConditionsNotVerified([v.to_json() for v in bad])
    n, R = pattern.n, pattern.R
    if n == 1:
        return build_slots(R, 1, {(1, 1): Subgroup.full(R.orders)}, kind="companion")
    slots: dict = {}
    labels: dict = {}
    for i in range(1, n):
        for j in range(1, n):
            slots[(i, j)] = pattern.slot(i, j)
            labels[(i, j)] = pattern.labels.get((i, j), "")
        slots[(i, n)] = (pattern.slot(i, n - 1), pattern.slot(i, n))
        labels[(i, n)] = f"{pattern.labels.get((i, n - 1), '')}/{pattern.labels.get((i, n), '')}"
    slots[(n, n)] = (Subgroup.full(R.orders), pattern.slot(n - 1, n))
    labels[(n, n)] = f"R/{pattern.labels.get((n - 1, n), '')}"
    return build_slots(R, n, slots, kind="companion", labels=labels)


def _companion_T(pattern: MatrixPattern) -> BuiltRing:
    bad = check_conditions(pattern)
    if bad:
        raise ConditionsNotVerified([v.to_json() for v in bad])
    n, R = pattern.n, pattern.R
    full = Subgroup.full(R.orders)
    if n == 1:
        return build_slots(R, 1, {(1, 1): full}, kind="companion")
    I2 = pattern.slot(1, 2)
    slots: dict = {(1, 1): (pattern.slot(2, 2), I2)}
    labels: dict = {(1, 1): "R2/I2"}
    for i in range(2, n + 1):
        den = I2 if i == 2 else pattern.slot(i, 2)
        slots[(i, 1)] = (full, den)
        labels[(i, 1)] = f"R/{'I2' if i == 2 else pattern.labels.get((i, 2), '')}"
        slots[(i, 2)] = full
        labels[(i, 2)] = "R"
        for j in range(3, n + 1):
            slots[(i, j)] = pattern.slot(i, j)
            labels[(i, j)] = pattern.labels.get((i, j), "")
    return build_slots(R, n, slots, kind="companion", labels=labels)


# ----------------------------------------------------------------------------
# Milnor squares


@dataclass
class MilnorSquare:
    """Pullback square ``R -f1-> R1``, ``R -h2-> R2``, ``R1 -h1-> R0``, ``R2 -f2-> R0``."""

    R: FiniteRing
    R1: FiniteRing
    R2: FiniteRing
    R0: FiniteRing
    f1: RingHom
    h2: RingHom
    h1: RingHom
    f2: RingHom
    names: dict = field(default_factory=dict)

    def check(self) -> dict:
        """Pullback and Milnor conditions, checked exactly."""
        rep: dict = {}
        comm = (self.f1.images @ self.h1.images - self.h2.images @ self.f2.images) % self.R0._d \
            if self.R0.dim else np.zeros(0)
        rep["commutes"] = not np.any(comm)
        rep["milnor"] = self.h1.is_surjective or self.f2.is_surjective
        both = np.hstack([self.f1.images, self.h2.images])
        ker = Subgroup(self.R.orders, []) if not both.size else None
        from .lattice import kernel as _kernel

        ker = _kernel(both.tolist(), self.R.orders, list(self.R1.orders) + list(self.R2.orders)) \
            if both.shape[1] else Subgroup.full(self.R.orders)
        rep["injective"] = ker.is_zero
        # |pullback| = |R1| |R2| / |R0| once one map into R0 is onto
        rep["order_match"] = self.R.size * self.R0.size == self.R1.size * self.R2.size
        rep["pullback"] = rep["commutes"] and rep["milnor"] and rep["injective"] and rep["order_match"]
        return rep

    def pullback_bruteforce(self, cap: int = 1 << 16) -> bool:
        """Element-wise: ``R`` maps bijectively onto ``{(a, b): h1(a) = f2(b)}``."""
        A = self.R1.elements(cap)
        Bv = self.R2.elements(cap)
        ha = self.R0.encode(self.h1.apply_many(A)) if self.R0.dim else np.zeros(len(A), np.int64)
        fb = self.R0.encode(self.f2.apply_many(Bv)) if self.R0.dim else np.zeros(len(Bv), np.int64)
        count = 0
        for code in np.unique(ha):
            count += int((ha == code).sum()) * int((fb == code).sum())
        X = self.R.elements(cap)
        img = np.hstack([self.R1.encode(self.f1.apply_many(X))[:, None],
                         self.R2.encode(self.h2.apply_many(X))[:, None]])
        distinct = len(np.unique(img, axis=0))
        return count == self.R.size == distinct


def _slot_inclusion(B: BuiltRing, A: BuiltRing) -> RingHom:
    rows = []
    for (i, j), s in B.slots.items():
        for x in s.lifts:
            rows.append(A.embed(i, j, x))
    F = _rows(rows, A.dim) if rows else np.zeros((0, A.dim), dtype=np.int64)
    return RingHom(B, A, F)


def milnor_square(B: BuiltRing, A: BuiltRing, J: Mapping[Pos, Subgroup]) -> MilnorSquare:
    """Canonical square ``B -> A``, ``B -> B/J``, ``A -> A/J``, ``B/J -> A/J``.

    ``J`` is given slotwise and must be an ideal of ``A`` contained in ``B``.
    """
    f = _slot_inclusion(B, A)
    JA_rows = [A.embed(i, j, x) for (i, j), sub in J.items() for x in sub.basis]
    JA = Ideal(A, Subgroup(A.orders, [r.tolist() for r in JA_rows]), "two")
    if not JA.closed("two"):
        raise NotPullback("J is not an ideal of A")
    JB_rows = [B.embed(i, j, x) for (i, j), sub in J.items() for x in sub.basis]
    JB = Ideal(B, Subgroup(B.orders, [r.tolist() for r in JB_rows]), "two")
    if not JB.closed("two"):
        raise NotPullback("J is not an ideal of B")
    Bp, gp = quotient_ring(B, JB)
    Ap, g = quotient_ring(A, JA)
    # f' on generators of B' via lifts
    lifts = _rows(gp.target_lifts, B.dim) if Bp.dim else np.zeros((0, B.dim), dtype=np.int64)
    fp = RingHom(Bp, Ap, g.apply_many(f.apply_many(lifts)) if Bp.dim else np.zeros((0, Ap.dim)))
    sq = MilnorSquare(B, A, Bp, Ap, f, gp, g, fp, names={"R": "B", "R1": "A", "R2": "B'", "R0": "A'"})
    rep = sq.check()
    if not rep["pullback"]:
        raise NotPullback(f"square is not a Milnor square: {rep}")
    return sq


def milnor_square_thm1(pattern: MatrixPattern) -> MilnorSquare:
    """The square used for the localized theorem on the S- or T-shape with ``I`` below."""
    if pattern.kind not in ("S-thm1", "T-thm1"):
        raise ShapeError("expected an S-thm1 or T-thm1 pattern")
    bad = check_conditions(pattern)
    if bad:
        raise ConditionsNotVerified([v.to_json() for v in bad])
    R, n = pattern.R, pattern.n
    I = pattern.ideals["I"].sub
    B = build_subring(pattern)
    full = Subgroup.full(R.orders)
    a_entries = dict(pattern.entries)
    J: dict[Pos, Subgroup] = {}
    if pattern.kind == "S-thm1":
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i > j:
                    a_entries[(i, j)] = full
                J[(i, j)] = pattern.slot(i, j) if i < j else I
    else:
        for i in range(2, n + 1):
            a_entries[(i, 1)] = full
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if j == 1:
                    J[(i, j)] = I
                elif i == j:
                    J[(i, j)] = pattern.slot(1, j)
                else:
                    J[(i, j)] = pattern.slot(i, j)
    A = build_slots(R, n, a_entries, kind="generic")
    return milnor_square(B, A, J)


# ----------------------------------------------------------------------------
# poset rings


def poset_ring(R: FiniteRing, I: Ideal, n: int, relations: Iterable[Pos]) -> BuiltRing:
    """``B_ij = R`` if ``a_i >= a_j`` in the poset, else ``I``.

    ``relations`` lists pairs ``(i, j)`` meaning ``a_i <= a_j``; the indexing
    must be a linear extension (``a_i <= a_j`` implies ``i <= j``).
    """
    le = [[i == j for j in range(n + 1)] for i in range(n + 1)]
    for i, j in relations:
        if not (1 <= i <= n and 1 <= j <= n):
            raise ShapeError(f"relation {(i, j)} out of range")
        le[i][j] = True
    for k in range(1, n + 1):
        for i in range(1, n + 1):
            if le[i][k]:
                for j in range(1, n + 1):
                    if le[k][j]:
                        le[i][j] = True
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if le[i][j] and i > j:
                raise NotLinearlyExtended(f"a_{i} <= a_{j} but {i} > {j}")
    if I.side != "two" and not I.closed("two"):
        raise ConditionsNotVerified([{"condition": "I is a two-sided ideal"}])
    full = Subgroup.full(R.orders)
    slots, labels = {}, {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            geq = le[j][i]
            slots[(i, j)] = full if geq else I.sub
            labels[(i, j)] = "R" if geq else "I"
    B = build_slots(R, n, slots, kind="poset", labels=labels)
    B.poset_leq = le
    return B


# ----------------------------------------------------------------------------
# bimodule rings


@dataclass
class Bimodule:
    """``_X M _Y``: additive group with commuting left X- and right Y-actions.

    ``left[t]`` is the matrix of ``x_t . m`` and ``right[t]`` of ``m . y_t``,
    both acting on row vectors.
    """

    X: FiniteRing
    Y: FiniteRing
    orders: tuple[int, ...]
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self) -> None:
        self.orders = tuple(int(a) for a in self.orders)
        k = len(self.orders)
        self.left = np.array(self.left, dtype=np.int64).reshape(self.X.dim, k, k) if k else np.zeros((self.X.dim, 0, 0), np.int64)
        self.right = np.array(self.right, dtype=np.int64).reshape(self.Y.dim, k, k) if k else np.zeros((self.Y.dim, 0, 0), np.int64)

    @property
    def dim(self) -> int:
        return len(self.orders)

    def validate(self) -> None:
        from .errors import ActionMismatch

        if not self.dim:
            return
        FinModule(self.X, self.orders, self.left)
        FinModule(self.Y.opposite(), self.orders, self.right)
        a = np.array(self.orders, dtype=np.int64)
        for s in range(self.X.dim):
            for t in range(self.Y.dim):
                if ((self.left[s] @ self.right[t] - self.right[t] @ self.left[s]) % a).any():
                    raise ActionMismatch(f"left action of x{s} and right action of y{t} do not commute")

    @classmethod
    def zero(cls, X: FiniteRing, Y: FiniteRing) -> "Bimodule":
        return cls(X, Y, (), [], [])

    @classmethod
    def regular(cls, X: FiniteRing) -> "Bimodule":
        return cls(X, X, X.orders, X.C.copy(), X.C.transpose(1, 0, 2).copy())

    @classmethod
    def free_over_field(cls, F: FiniteRing, rank: int) -> "Bimodule":
        """``F^rank`` with the same scalar action on both sides (``F`` commutative)."""
        base = cls.regular(F)
        k = F.dim
        left = np.zeros((F.dim, k * rank, k * rank), dtype=np.int64)
        right = np.zeros_like(left)
        for r in range(rank):
            sl = slice(r * k, (r + 1) * k)
            left[:, sl, sl] = base.left
            right[:, sl, sl] = base.right
        return cls(F, F, tuple(F.orders) * rank, left, right)


def bimodule_ring(R: FiniteRing, S: FiniteRing, M: Bimodule, N: Bimodule) -> tuple[BuiltRing, MilnorSquare]:
    """``[[R, M], [N, S]]`` with ``M N = N M = 0``, plus its Milnor square."""
    if M.X is not R or M.Y is not S or N.X is not S or N.Y is not R:
        raise ShapeError("bimodules do not match the rings")
    M.validate()
    N.validate()
    blocks = [("R", R.dim), ("M", M.dim), ("N", N.dim), ("S", S.dim)]
    off = {}
    o = 0
    for name, k in blocks:
        off[name] = o
        o += k
    m = o
    C = np.zeros((m, m, m), dtype=np.int64)
    r, mm, nn, s = (slice(off[x], off[x] + k) for x, k in blocks)
    C[r, r, r] = R.C
    C[s, s, s] = S.C
    # r . m, m . s, n . r, s . n
    for a in range(R.dim):
        C[off["R"] + a, mm, mm] = M.left[a]
        C[nn, off["R"] + a, nn] = N.right[a]
    for b in range(S.dim):
        C[mm, off["S"] + b, mm] = M.right[b]
        C[off["S"] + b, nn, nn] = N.left[b]
    one = np.zeros(m, dtype=np.int64)
    one[r] = R.one
    one[s] = S.one
    orders = list(R.orders) + list(M.orders) + list(N.orders) + list(S.orders)
    labels = [f"R{t}" for t in range(R.dim)] + [f"M{t}" for t in range(M.dim)] + \
        [f"N{t}" for t in range(N.dim)] + [f"S{t}" for t in range(S.dim)]
    A = BuiltRing(orders, C, one, validate=True, labels=labels)
    A.base = None
    A.n = 2
    A.slots = {}
    A.kind = "bimodule"
    A.blocks_offsets = off
    eye = np.eye(m, dtype=np.int64)
    Mp = Ideal(A, Subgroup(A.orders, eye[mm].tolist()), "two")
    Np = Ideal(A, Subgroup(A.orders, eye[nn].tolist()), "two")
    for name, I in (("M'", Mp), ("N'", Np)):
        if not I.closed("two"):
            raise ConditionsNotVerified([{"condition": f"{name} is an ideal"}])
    A1, f1 = quotient_ring(A, Mp)
    A2, h2 = quotient_ring(A, Np)
    A0, q0 = quotient_ring(A, Mp + Np)
    l1 = _rows(f1.target_lifts, A.dim) if A1.dim else np.zeros((0, A.dim), np.int64)
    l2 = _rows(h2.target_lifts, A.dim) if A2.dim else np.zeros((0, A.dim), np.int64)
    h1 = RingHom(A1, A0, q0.apply_many(l1) if A1.dim else np.zeros((0, A0.dim)))
    f2 = RingHom(A2, A0, q0.apply_many(l2) if A2.dim else np.zeros((0, A0.dim)))
    sq = MilnorSquare(A, A1, A2, A0, f1, h2, h1, f2, names={"R": "A", "R1": "A/M'", "R2": "A/N'", "R0": "A/(M'+N')"})
    rep = sq.check()
    if not rep["pullback"]:
        raise NotPullback(f"bimodule square is not a pullback: {rep}")
    A.ideal_M = Mp
    A.ideal_N = Np
    return A, sq


def triangular_ring(R1: FiniteRing, R2: FiniteRing, M: Bimodule) -> BuiltRing:
    """``[[R1, M], [0, R2]]``."""
    A, _ = bimodule_ring(R1, R2, M, Bimodule.zero(R2, R1))
    return A


# ----------------------------------------------------------------------------
# corner rings


def corner_ring(B: BuiltRing, e) -> BuiltRing:
    """The same shape over ``eRe`` with entries ``e N_ij e``."""
    R = B.base
    if R is None:
        raise ShapeError("corner ring needs a ring built over a base ring")
    e = R.vec(e)
    if not R.is_idempotent(e):
        raise NotIdempotent("e is not idempotent")
    eRe = Subgroup(R.orders, [R.mul(R.mul(e, R.gen(t)), e).tolist() for t in range(R.dim)])
    Rc, inc = subring(R, eRe, one=e)
    slots, labels = {}, {}
    for (i, j), s in B.slots.items():
        if s.den is not None:
            raise ShapeError("corner rings of quotient slots are not supported")
        vecs = [R.mul(R.mul(e, x), e) for x in s.lifts]
        slots[(i, j)] = Subgroup(Rc.orders, [eRe.coords(v) for v in vecs])
        labels[(i, j)] = f"e{s.label}e"
    out = build_slots(Rc, B.n, slots, kind="corner", labels=labels)
    out.corner_of = B
    return out
