"""Finite left modules over finite rings.

A module is ``Z/a_0 + ... + Z/a_{k-1}`` with an action matrix per ring
generator: ``g_t . x = x @ action[t]``.  Module maps are matrices whose
rows are the images of the source generators, so ``x -> x @ F`` and the
composite "first ``F`` then ``G``" is ``F @ G``.  Right modules are left
modules over the opposite ring.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .abgroup import FgAbGroup
from .errors import ActionMismatch, RingMismatch, ShapeError
from .finring import FiniteRing, RingHom, _rows
from .lattice import Subgroup, kernel

__all__ = [
    "FinModule",
    "ModuleMap",
    "HomGroup",
    "hom_group",
    "ext1",
    "is_approximation",
    "in_add",
    "is_dsplit",
    "DsplitReport",
]


class FinModule:
    def __init__(self, ring: FiniteRing, orders: Sequence[int], action, *, validate: bool = True):
        self.ring = ring
        self.orders = tuple(int(a) for a in orders)
        k = len(self.orders)
        self._a = np.array(self.orders, dtype=np.int64)
        A = np.array(action, dtype=np.int64)
        if A.size == 0:
            A = np.zeros((ring.dim, k, k), dtype=np.int64)
        if A.shape != (ring.dim, k, k):
            raise ShapeError(f"action must have shape {(ring.dim, k, k)}, got {A.shape}")
        self.action = A % self._a if k else A
        if validate:
            self.validate()

    @property
    def dim(self) -> int:
        return len(self.orders)

    def order(self) -> int:
        out = 1
        for a in self.orders:
            out *= a
        return out

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    def __repr__(self) -> str:
        return f"<FinModule order={self.order()} orders={list(self.orders)}>"

    def validate(self) -> None:
        R, A, a = self.ring, self.action, self._a
        k = self.dim
        if not k:
            return
        for t, d in enumerate(R.orders):
            if ((d * A[t]) % a).any():
                raise ActionMismatch(f"action of g{t} does not respect its additive order")
            for i, ai in enumerate(self.orders):
                if ((ai * A[t, i]) % a).any():
                    raise ActionMismatch(f"action of g{t} is not additive on generator {i}")
        # g_i . (g_j . x) = x A_j A_i  must equal  (g_i g_j) . x
        lhs = np.einsum("jab,ibc->ijac", A, A) % a
        rhs = np.einsum("ijk,kac->ijac", R.C, A) % a
        bad = np.argwhere((lhs != rhs).any(axis=(2, 3)))
        if len(bad):
            i, j = bad[0]
            raise ActionMismatch(f"(g{i} g{j}) . x != g{i} . (g{j} . x)")
        one = np.einsum("t,tab->ab", np.array(R.one, dtype=np.int64), A) % a
        if (one != np.eye(k, dtype=np.int64)).any():
            raise ActionMismatch("identity does not act trivially")

    # -- element operations ----------------------------------------------
    def act_matrix(self, r) -> np.ndarray:
        return np.einsum("t,tab->ab", np.asarray(r, dtype=np.int64), self.action) % self._a

    def act(self, r, x) -> np.ndarray:
        return (np.asarray(x, dtype=np.int64) @ self.act_matrix(r)) % self._a

    def additive(self, gens=()) -> Subgroup:
        return Subgroup(self.orders, gens)

    def submodule_closure(self, gens) -> Subgroup:
        sub = Subgroup(self.orders, [list(map(int, g)) for g in gens])
        while True:
            B = _rows(sub.basis, self.dim)
            if not len(B):
                return sub
            V = np.vstack([B @ self.action[t] for t in range(self.ring.dim)]) % self._a
            missing = V[~sub.contains_many(V)]
            if not len(missing):
                return sub
            sub = sub.extend(missing.tolist())

    def is_submodule(self, sub: Subgroup) -> bool:
        B = _rows(sub.basis, self.dim)
        if not len(B):
            return True
        V = np.vstack([B @ self.action[t] for t in range(self.ring.dim)]) % self._a
        return bool(sub.contains_many(V).all())

    def generators(self) -> list[tuple[int, ...]]:
        """A small set of module generators (greedy over the cyclic basis)."""
        full = Subgroup(self.orders, [])
        out: list[tuple[int, ...]] = []
        for g in Subgroup.full(self.orders).gens if self.dim else []:
            if not full.contains(g):
                out.append(g)
                full = self.submodule_closure(out)
        return out

    # -- constructions -----------------------------------------------------
    @classmethod
    def regular(cls, R: FiniteRing) -> "FinModule":
        """``R`` as a left module over itself."""
        return cls(R, R.orders, R.C.copy(), validate=False)

    @classmethod
    def free(cls, R: FiniteRing, n: int) -> "FinModule":
        return direct_sum([cls.regular(R)] * n)[0] if n else cls(R, [], [])

    @classmethod
    def zero(cls, R: FiniteRing) -> "FinModule":
        return cls(R, [], [])

    def submodule(self, sub: Subgroup) -> tuple["FinModule", "ModuleMap"]:
        """Submodule on ``sub`` with its inclusion."""
        if not self.is_submodule(sub):
            raise ActionMismatch("subgroup is not closed under the ring action")
        gens = _rows(sub.gens, self.dim)
        k = len(gens)
        A = np.zeros((self.ring.dim, k, k), dtype=np.int64)
        for t in range(self.ring.dim):
            imgs = (gens @ self.action[t]) % self._a
            if k:
                A[t] = sub.coords_many(imgs)
        N = FinModule(self.ring, sub.invariants, A, validate=False)
        return N, ModuleMap(N, self, gens, validate=False)

    def quotient(self, sub: Subgroup) -> tuple["FinModule", "ModuleMap"]:
        """``M / sub`` with the projection."""
        if not self.is_submodule(sub):
            raise ActionMismatch("subgroup is not closed under the ring action")
        qm = sub.quotient
        e = qm.invariants
        k = len(e)
        lifts = _rows(qm.lifts, self.dim)
        A = np.zeros((self.ring.dim, k, k), dtype=np.int64)
        for t in range(self.ring.dim):
            if k:
                A[t] = qm.image_many((lifts @ self.action[t]) % self._a)
        Q = FinModule(self.ring, e, A, validate=False)
        P = np.array(qm.matrix(), dtype=np.int64).reshape(self.dim, k)
        return Q, ModuleMap(self, Q, P, validate=False)

    def restrict(self, f: RingHom) -> "FinModule":
        """Restriction of scalars along ``f: S -> R``."""
        if f.target is not self.ring:
            raise RingMismatch("homomorphism does not land in the module's ring")
        A = np.einsum("st,tab->sab", f.images, self.action) % self._a if self.dim else None
        return FinModule(f.source, self.orders, A if A is not None else [], validate=False)

    def to_json(self) -> dict:
        return {"orders": list(self.orders), "action": self.action.tolist()}

    @classmethod
    def from_json(cls, R: FiniteRing, doc: dict) -> "FinModule":
        return cls(R, doc["orders"], doc["action"])


def direct_sum(mods: Sequence[FinModule]) -> tuple[FinModule, list["ModuleMap"], list["ModuleMap"]]:
    """Direct sum with injections and projections."""
    if not mods:
        raise ShapeError("empty direct sum needs a ring; use FinModule.zero")
    R = mods[0].ring
    for M in mods:
        if M.ring is not R:
            raise RingMismatch("summands over different rings")
    orders = [a for M in mods for a in M.orders]
    k = len(orders)
    A = np.zeros((R.dim, k, k), dtype=np.int64)
    off = 0
    for M in mods:
        A[:, off:off + M.dim, off:off + M.dim] = M.action
        off += M.dim
    S = FinModule(R, orders, A, validate=False)
    inj, proj = [], []
    off = 0
    for M in mods:
        E = np.zeros((M.dim, k), dtype=np.int64)
        E[:, off:off + M.dim] = np.eye(M.dim, dtype=np.int64)
        inj.append(ModuleMap(M, S, E, validate=False))
        proj.append(ModuleMap(S, M, E.T.copy(), validate=False))
        off += M.dim
    return S, inj, proj


class ModuleMap:
    def __init__(self, source: FinModule, target: FinModule, matrix, *, validate: bool = True):
        if source.ring is not target.ring:
            raise RingMismatch("modules over different rings")
        self.source = source
        self.target = target
        F = np.array(matrix, dtype=np.int64).reshape(source.dim, target.dim)
        self.matrix = F % target._a if target.dim else F
        if validate:
            self.validate()

    def validate(self) -> None:
        S, T, F = self.source, self.target, self.matrix
        for i, a in enumerate(S.orders):
            if ((a * F[i]) % T._a).any():
                raise ShapeError(f"image of generator {i} violates its additive order")
        for t in range(S.ring.dim):
            if ((S.action[t] @ F - F @ T.action[t]) % T._a).any():
                raise ActionMismatch(f"map does not commute with g{t}")

    def apply(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=np.int64) @ self.matrix) % self.target._a

    def then(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, other.target, self.matrix @ other.matrix, validate=False)

    @cached_property
    def kernel(self) -> Subgroup:
        if not self.target.dim:
            return Subgroup.full(self.source.orders)
        return kernel(self.matrix.tolist(), self.source.orders, self.target.orders)

    @cached_property
    def image(self) -> Subgroup:
        return Subgroup(self.target.orders, self.matrix.tolist())

    @property
    def is_injective(self) -> bool:
        return self.kernel.is_zero

    @property
    def is_surjective(self) -> bool:
        return self.image.is_full

    @classmethod
    def identity(cls, M: FinModule) -> "ModuleMap":
        return cls(M, M, np.eye(M.dim, dtype=np.int64), validate=False)


# ----------------------------------------------------------------------------
# Hom groups


def _flat_orders(M: FinModule, N: FinModule) -> list[int]:
    return [b for _ in M.orders for b in N.orders]


class HomGroup:
    """``Hom_R(M, N)`` as a subgroup of the additive maps, flattened row-major."""

    def __init__(self, M: FinModule, N: FinModule, sub: Subgroup):
        self.source = M
        self.target = N
        self.sub = sub  # subgroup of  (+)_{i,j} Z/b_j  (matrix entries)

    def group(self) -> FgAbGroup:
        return self.sub.group()

    def order(self) -> int:
        return self.sub.order()

    @property
    def basis(self) -> list[ModuleMap]:
        """Maps forming the cyclic decomposition of the Hom group."""
        return [self.as_map(g) for g in self.sub.gens]

    @property
    def spanning(self) -> list[ModuleMap]:
        return [self.as_map(g) for g in self.sub.basis]

    def as_map(self, flat) -> ModuleMap:
        return ModuleMap(self.source, self.target, np.array(flat, dtype=np.int64).reshape(
            self.source.dim, self.target.dim), validate=False)

    def flatten(self, F) -> list[int]:
        mat = F.matrix if isinstance(F, ModuleMap) else np.asarray(F)
        return [int(x) for x in np.asarray(mat, dtype=np.int64).reshape(-1)]

    def contains(self, F) -> bool:
        return self.sub.contains(self.flatten(F))

    def coords(self, F) -> tuple[int, ...]:
        return self.sub.coords(self.flatten(F))

    def elements(self, cap: int | None = None) -> list[ModuleMap]:
        return [self.as_map(v) for v in self.sub.elements(cap=cap)]


def hom_group(M: FinModule, N: FinModule) -> HomGroup:
    """All module maps ``M -> N``, by solving the commutation constraints."""
    if M.ring is not N.ring:
        raise RingMismatch("modules over different rings")
    R = M.ring
    k, l = M.dim, N.dim
    flat = _flat_orders(M, N)
    if k == 0 or l == 0:
        return HomGroup(M, N, Subgroup.zero(flat))
    # parameters: F[i, j] = s_ij * p_ij with p_ij in Z/g_ij, s_ij = b_j / g_ij
    g = np.gcd.outer(M._a, N._a)
    s = N._a[None, :] // g
    params = g.reshape(-1).tolist()
    cols = []
    tgt = []
    for t in range(R.dim):
        At, Bt = M.action[t], N.action[t]
        # D_t(E_ij) = A_t E_ij - E_ij B_t with E_ij = s_ij e_i e_j^T
        rows = np.zeros((k * l, k * l), dtype=np.int64)
        for i in range(k):
            for j in range(l):
                E = np.zeros((k, l), dtype=np.int64)
                E[i, j] = s[i, j]
                rows[i * l + j] = ((At @ E - E @ Bt) % N._a).reshape(-1)
        cols.append(rows)
        tgt += flat
    A = np.hstack(cols) if cols else np.zeros((k * l, 0), dtype=np.int64)
    K = kernel(A.tolist(), params, tgt) if tgt else Subgroup.full(params)
    # map parameter vectors back to matrix entries
    S = s.reshape(-1)
    gens = [[int(p * sc) for p, sc in zip(v, S)] for v in K.basis]
    return HomGroup(M, N, Subgroup(flat, gens))


def _hom_from_free(F0: FinModule, s: int, N: FinModule) -> list[np.ndarray]:
    """Spanning maps of ``Hom(R^s, N)``: ``e_i -> n`` for n a cyclic generator of N."""
    R = F0.ring
    out = []
    for i in range(s):
        for n in Subgroup.full(N.orders).gens:
            n = np.array(n, dtype=np.int64)
            F = np.zeros((F0.dim, N.dim), dtype=np.int64)
            for t in range(R.dim):
                F[i * R.dim + t] = (n @ N.action[t]) % N._a
            out.append(F)
    return out


def presentation(M: FinModule, gens=None) -> tuple[FinModule, ModuleMap, FinModule, ModuleMap]:
    """``0 -> K -> R^s -> M -> 0`` for the module generators ``gens``."""
    R = M.ring
    gens = M.generators() if gens is None else [tuple(g) for g in gens]
    s = len(gens)
    F0 = FinModule.free(R, s)
    rows = []
    for g in gens:
        g = np.array(g, dtype=np.int64)
        for t in range(R.dim):
            rows.append((g @ M.action[t]) % M._a)
    P = np.array(rows, dtype=np.int64).reshape(F0.dim, M.dim)
    pi = ModuleMap(F0, M, P, validate=False)
    K, inc = F0.submodule(pi.kernel)
    return F0, pi, K, inc


def ext1(M: FinModule, N: FinModule, gens=None) -> FgAbGroup:
    """``Ext^1_R(M, N) = coker(Hom(F0, N) -> Hom(K, N))``.

    ``gens`` picks the module generators used for ``F0``; the default is a
    greedy small set.  Passing all additive generators gives a second,
    independent presentation.
    """
    if M.ring is not N.ring:
        raise RingMismatch("modules over different rings")
    if M.dim == 0 or N.dim == 0:
        return FgAbGroup()
    F0, pi, K, inc = presentation(M, gens)
    HK = hom_group(K, N)
    if HK.order() == 1:
        return FgAbGroup()
    c = HK.sub.invariants
    rel = []
    for F in _hom_from_free(F0, F0.dim // M.ring.dim, N):
        rel.append(list(HK.coords(inc.matrix @ F)))
    for idx, ci in enumerate(c):
        rel.append([ci if j == idx else 0 for j in range(len(c))])
    return FgAbGroup.from_relations(rel, len(c))


# ----------------------------------------------------------------------------
# approximations and D-split sequences


@dataclass
class ApproxResult:
    ok: bool
    side: str
    witness: list | None = None  # matrix of a map that does not factor

    def __bool__(self) -> bool:
        return self.ok


def is_approximation(f: ModuleMap, M: FinModule, side: str) -> ApproxResult:
    """Left: every ``X -> M`` factors through ``f: X -> M'``.  Right: every
    ``M -> Y`` factors through ``f: M' -> Y``.

    Testing against ``M`` alone suffices for all of ``add(M)`` because Hom is
    additive in each variable.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if f.source.ring is not M.ring:
        raise RingMismatch("map and module over different rings")
    if side == "left":
        X, Mp = f.source, f.target
        target = hom_group(X, M)
        imgs = [(f.matrix @ psi.matrix) for psi in hom_group(Mp, M).spanning]
    else:
        Mp, Y = f.source, f.target
        target = hom_group(M, Y)
        imgs = [(phi.matrix @ f.matrix) for phi in hom_group(M, Mp).spanning]
    flat = _flat_orders(target.source, target.target)
    reach = Subgroup(flat, [np.asarray(F, dtype=np.int64).reshape(-1).tolist() for F in imgs])
    for g in target.sub.basis:
        if not reach.contains(g):
            return ApproxResult(False, side, target.as_map(g).matrix.tolist())
    return ApproxResult(True, side)


def in_add(Mp: FinModule, M: FinModule) -> bool:
    """Is ``M'`` a direct summand of some ``M^k``?

    Equivalent to: ``id_{M'}`` is a sum of composites ``M' -> M -> M'``.
    """
    if Mp.dim == 0:
        return True
    if M.dim == 0:
        return False
    flat = _flat_orders(Mp, Mp)
    prods = []
    out_maps = hom_group(M, Mp).spanning
    for a in hom_group(Mp, M).spanning:
        for b in out_maps:
            prods.append(((a.matrix @ b.matrix) % Mp._a).reshape(-1).tolist())
    span = Subgroup(flat, prods)
    return span.contains(np.eye(Mp.dim, dtype=np.int64).reshape(-1).tolist())


@dataclass
class DsplitReport:
    ok: bool
    failed: str | None = None
    witness: object = None
    checks: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "failed": self.failed, "witness": self.witness, "checks": self.checks}


def is_dsplit(f: ModuleMap, g: ModuleMap, M: FinModule) -> DsplitReport:
    """Check that ``X -f-> M' -g-> Y`` is an ``add(M)``-split sequence."""
    if f.target is not g.source:
        raise ShapeError("maps are not composable")
    if f.source.ring is not M.ring:
        raise RingMismatch("sequence and M over different rings")
    Mp = f.target
    checks: dict = {}

    checks["in_add"] = in_add(Mp, M)
    if not checks["in_add"]:
        return DsplitReport(False, "in_add", None, checks)

    comp = (f.matrix @ g.matrix) % g.target._a if g.target.dim else None
    checks["f_injective"] = f.is_injective
    checks["complex"] = comp is None or not comp.any()
    checks["exact_middle"] = checks["complex"] and g.kernel == f.image
    checks["g_surjective"] = g.is_surjective
    for name in ("f_injective", "complex", "exact_middle", "g_surjective"):
        if not checks[name]:
            witness = None
            if name == "f_injective":
                witness = list(f.kernel.basis[0])
            elif name == "g_surjective":
                missed = [v for v in Subgroup.full(g.target.orders).gens if not g.image.contains(v)]
                witness = list(missed[0])
            return DsplitReport(False, name, witness, checks)

    left = is_approximation(f, M, "left")
    checks["left_approximation"] = left.ok
    if not left.ok:
        return DsplitReport(False, "left_approximation", left.witness, checks)
    right = is_approximation(g, M, "right")
    checks["right_approximation"] = right.ok
    if not right.ok:
        return DsplitReport(False, "right_approximation", right.witness, checks)
    return DsplitReport(True, None, None, checks)
