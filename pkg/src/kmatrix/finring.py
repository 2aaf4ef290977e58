"""Finite rings with identity, presented by structure constants.

The additive group is ``Z/d_0 + ... + Z/d_{m-1}`` with generators ``g_i`` and
``g_i g_j = sum_k C[i, j, k] g_k``.  Elements are integer row vectors; products
are computed with the left/right multiplication matrices

    a * b = b @ L(a),   L(a)[j, k] = sum_i a_i C[i, j, k]
    a * b = a @ R(b),   R(b)[i, k] = sum_j b_j C[i, j, k]

so every linear-algebra question about ideals reduces to subgroup
computations in :mod:`kmatrix.lattice`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from . import config
from .abgroup import prime_factors
from .errors import (
    AssociativityViolation,
    IdentityViolation,
    NotAHomomorphism,
    NotTwoSided,
    OrderInconsistency,
    ParentMismatch,
    ShapeError,
    SizeCapExceeded,
)
from .lattice import Subgroup, kernel

__all__ = [
    "FiniteRing",
    "Ideal",
    "RingHom",
    "UnitGroup",
    "Block",
    "make_ring",
    "ideal_closure",
    "quotient_ring",
    "colon_ideal",
    "jacobson_radical",
    "unit_group",
    "block_count",
    "product_ring",
    "subring",
    "zero_ring",
    "cyclic_ring",
    "matrix_ring",
    "poly_quotient",
    "finite_field",
    "product_projections",
]

SIDES = ("left", "right", "two")


def _rows(V, m: int) -> np.ndarray:
    """Coerce to an ``(N, m)`` int array; a flat vector of length ``m`` is one row."""
    A = np.asarray(V, dtype=np.int64)
    if A.ndim == 2:
        return A
    if A.ndim == 1 and A.size == m:
        return A.reshape(1, m)
    return A.reshape(-1, m) if m else np.zeros((0, 0), dtype=np.int64)


class FiniteRing:
    """A finite ring with identity.

    ``labels`` optionally names the additive generators; builders use it to
    record which matrix slot a generator lives in.
    """

    def __init__(
        self,
        orders: Sequence[int],
        mul,
        one: Sequence[int],
        *,
        validate: bool = True,
        labels: Sequence[str] | None = None,
        name: str | None = None,
    ):
        self.orders = tuple(int(d) for d in orders)
        m = len(self.orders)
        if any(d < 2 for d in self.orders):
            raise ShapeError("generator orders must be at least 2")
        self._d = np.array(self.orders, dtype=np.int64)
        C = np.array(mul, dtype=np.int64) if m else np.zeros((0, 0, 0), dtype=np.int64)
        if C.shape != (m, m, m):
            raise ShapeError(f"structure constants must have shape {(m, m, m)}, got {C.shape}")
        self.C = C % self._d if m else C
        self.C.setflags(write=False)
        if len(one) != m:
            raise ShapeError("identity has the wrong length")
        self.one = tuple(int(x) % d for x, d in zip(one, self.orders))
        self.labels = tuple(labels) if labels is not None else tuple(f"g{i}" for i in range(m))
        self.name = name
        if validate:
            self.validate()

    # -- validation ------------------------------------------------------
    def validate(self) -> None:
        m, d, C = self.dim, self._d, self.C
        for i in range(m):
            for j in range(m):
                g = gcd(self.orders[i], self.orders[j])
                if ((g * C[i, j]) % d).any():
                    raise OrderInconsistency(i, j)
        for i in range(m):
            lhs = np.einsum("jl,lkn->jkn", C[i], C) % d
            rhs = np.einsum("jkl,ln->jkn", C, C[i]) % d
            bad = np.argwhere((lhs != rhs).any(axis=2))
            if len(bad):
                j, k = bad[0]
                raise AssociativityViolation(i, int(j), int(k))
        one = np.array(self.one, dtype=np.int64)
        eye = np.eye(m, dtype=np.int64)
        left = np.einsum("l,lin->in", one, C) % d if m else eye
        right = np.einsum("l,iln->in", one, C) % d if m else eye
        for i in range(m):
            if (left[i] != eye[i]).any() or (right[i] != eye[i]).any():
                raise IdentityViolation(i)

    # -- sizes -----------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.orders)

    @cached_property
    def size(self) -> int:
        out = 1
        for d in self.orders:
            out *= d
        return out

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"<FiniteRing{tag} order={self.size} orders={list(self.orders)}>"

    # -- element coding --------------------------------------------------
    @cached_property
    def radix(self) -> np.ndarray:
        r = np.ones(self.dim, dtype=np.int64)
        for k in range(self.dim - 2, -1, -1):
            r[k] = r[k + 1] * self.orders[k + 1]
        return r

    def encode(self, V) -> np.ndarray:
        V = _rows(V, self.dim) % self._d
        return V @ self.radix

    def decode(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64).reshape(-1)
        return (codes[:, None] // self.radix) % self._d

    def elements(self, cap: int | None = None) -> np.ndarray:
        cap = config.get("enum_cap") if cap is None else cap
        if self.size > cap:
            raise SizeCapExceeded(self.size, cap)
        return self.decode(np.arange(self.size, dtype=np.int64))

    # -- arithmetic ------------------------------------------------------
    def vec(self, v) -> np.ndarray:
        return np.asarray(v, dtype=np.int64).reshape(self.dim) % self._d

    def zero(self) -> np.ndarray:
        return np.zeros(self.dim, dtype=np.int64)

    def gen(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = 1
        return v

    def left_matrix(self, a) -> np.ndarray:
        return np.einsum("i,ijk->jk", np.asarray(a, dtype=np.int64), self.C) % self._d

    def right_matrix(self, b) -> np.ndarray:
        return np.einsum("j,ijk->ik", np.asarray(b, dtype=np.int64), self.C) % self._d

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return np.einsum("i,j,ijk->k", a, b, self.C) % self._d

    def mul_many(self, A, B) -> np.ndarray:
        """Row-wise products ``A[n] * B[n]``."""
        A = _rows(A, self.dim)
        B = _rows(B, self.dim)
        T = np.einsum("ni,ijk->njk", A, self.C)
        return np.einsum("nj,njk->nk", B, T) % self._d

    def add(self, a, b) -> np.ndarray:
        return (np.asarray(a) + np.asarray(b)) % self._d

    def sub(self, a, b) -> np.ndarray:
        return (np.asarray(a) - np.asarray(b)) % self._d

    def neg(self, a) -> np.ndarray:
        return (-np.asarray(a)) % self._d

    def power(self, a, n: int) -> np.ndarray:
        out = np.array(self.one, dtype=np.int64)
        base = self.vec(a)
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def is_idempotent(self, e) -> bool:
        e = self.vec(e)
        return bool((self.mul(e, e) == e).all())

    @cached_property
    def is_commutative(self) -> bool:
        return bool((self.C == self.C.transpose(1, 0, 2)).all())

    def opposite(self) -> "FiniteRing":
        return FiniteRing(
            self.orders, self.C.transpose(1, 0, 2), self.one, validate=False, labels=self.labels
        )

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        return {"orders": list(self.orders), "mul": self.C.tolist(), "one": list(self.one)}

    @classmethod
    def from_json(cls, doc: dict) -> "FiniteRing":
        try:
            return cls(doc["orders"], doc["mul"], doc["one"], labels=doc.get("labels"))
        except KeyError as exc:
            raise ShapeError(f"ring document is missing {exc}") from None

    # -- ideals ----------------------------------------------------------
    def ideal(self, gens: Iterable[Sequence[int]] = (), side: str = "two") -> "Ideal":
        return ideal_closure(self, gens, side)

    def zero_ideal(self) -> "Ideal":
        return Ideal(self, Subgroup.zero(self.orders), "two")

    def unit_ideal(self) -> "Ideal":
        return Ideal(self, Subgroup.full(self.orders), "two")

    def additive(self, gens: Iterable[Sequence[int]] = ()) -> Subgroup:
        return Subgroup(self.orders, gens)

    def product_span(self, A: Iterable[Sequence[int]], B: Iterable[Sequence[int]]) -> Subgroup:
        """Additive span of all products ``a b``."""
        A = _rows(list(A), self.dim)
        B = _rows(list(B), self.dim)
        if not len(A) or not len(B):
            return Subgroup.zero(self.orders)
        P = np.einsum("ai,bj,ijk->abk", A, B, self.C) % self._d
        return Subgroup(self.orders, P.reshape(-1, self.dim).tolist())

    @cached_property
    def center(self) -> Subgroup:
        m = self.dim
        if m == 0:
            return Subgroup.zero(self.orders)
        A = (self.C - self.C.transpose(1, 0, 2)).reshape(m, m * m) % np.tile(self._d, m)
        return kernel(A.tolist(), self.orders, list(self.orders) * m)

    # -- radical and blocks ----------------------------------------------
    @cached_property
    def radical(self) -> "Ideal":
        if self.dim == 0:
            return self.zero_ideal()
        cols, tgt = [], []
        for p in prime_factors(self.size):
            pR = self.ideal([[p * int(i == j) for j in range(self.dim)] for i in range(self.dim)])
            Qp, pi = quotient_ring(self, pR)
            Jp = _radical_fp(Qp)
            qm = Jp.sub.quotient
            if not qm.invariants:
                continue
            M = (pi.images @ np.array(qm.matrix(), dtype=np.int64).reshape(Qp.dim, -1)) % np.array(
                qm.invariants, dtype=np.int64
            )
            cols.append(M)
            tgt += qm.invariants
        if not cols:
            return self.unit_ideal()
        A = np.hstack(cols)
        return Ideal(self, kernel(A.tolist(), self.orders, tgt), "two")

    @cached_property
    def semisimple(self) -> tuple["FiniteRing", "RingHom"]:
        """``R / rad R`` together with the projection."""
        return quotient_ring(self, self.radical)

    @cached_property
    def blocks(self) -> list["Block"]:
        S, pi = self.semisimple
        if S.dim == 0:
            return []
        Z = S.center
        zs = Z.elements(cap=config.get("enum_cap"))
        sq = S.mul_many(zs, zs)
        idem = zs[(sq == zs).all(axis=1) & zs.any(axis=1)]
        # primitive central idempotents: those with no smaller nonzero central idempotent
        prim = []
        for e in idem:
            smaller = S.mul_many(idem, np.broadcast_to(e, idem.shape))
            below = (smaller == idem).all(axis=1) & ~(idem == e).all(axis=1)
            if not below.any():
                prim.append(e)
        prim.sort(key=lambda v: tuple(v))
        lifts = np.array(pi.target_lifts, dtype=np.int64).reshape(S.dim, self.dim)
        out = []
        for eps in prim:
            field = Subgroup(S.orders, [S.mul(eps, z) for z in Z.basis])
            q = field.order()
            blk = Subgroup(S.orders, [S.mul(eps, S.gen(t)) for t in range(S.dim)])
            n2 = _int_log(blk.order(), q)
            n = int(round(n2**0.5))
            f = eps if blk.order() == q else _primitive_idempotent(S, blk, q)
            lifted = _lift_idempotent(self, (f @ lifts) % self._d)
            out.append(Block(central=tuple(int(x) for x in eps), q=q, n=n,
                             idempotent_s=tuple(int(x) for x in f),
                             idempotent=tuple(int(x) for x in lifted)))
        return out

    # -- units -----------------------------------------------------------
    def is_unit_many(self, V) -> np.ndarray:
        """Vectorized unit test: ``x`` is a unit iff it is invertible mod every ``p R``."""
        V = _rows(V, self.dim)
        ok = np.ones(len(V), dtype=bool)
        for p in prime_factors(self.size):
            P = [k for k, d in enumerate(self.orders) if d % p == 0]
            L = np.einsum("ni,ijk->njk", V, self.C)[:, P][:, :, P] % p
            ok &= _invertible_mod_p(L, p)
        return ok

    def is_unit(self, x) -> bool:
        return bool(self.is_unit_many([x])[0])

    @cached_property
    def units(self) -> "UnitGroup":
        return unit_group(self)


@dataclass(frozen=True)
class Block:
    """One simple block ``M_n(F_q)`` of ``R / rad R``.

    ``idempotent`` is a primitive idempotent of ``R`` lying over the block;
    ``R e`` is then the indecomposable projective of that block.
    """

    central: tuple[int, ...]
    q: int
    n: int
    idempotent_s: tuple[int, ...]
    idempotent: tuple[int, ...]


def _int_log(x: int, q: int) -> int:
    k = 0
    while x > 1:
        if x % q:
            raise ValueError(f"{x} is not a power of {q}")
        x //= q
        k += 1
    return k


def _primitive_idempotent(S: FiniteRing, blk: Subgroup, q: int) -> np.ndarray:
    els = blk.elements(cap=config.get("enum_cap"))
    sq = S.mul_many(els, els)
    cand = els[(sq == els).all(axis=1) & els.any(axis=1)]
    for f in cand[np.argsort(S.encode(cand), kind="stable")]:
        corner = Subgroup(S.orders, [S.mul(S.mul(f, S.gen(t)), f) for t in range(S.dim)])
        if corner.order() == q:
            return f
    raise RuntimeError("no primitive idempotent found in a simple block")


def _lift_idempotent(R: FiniteRing, x: np.ndarray) -> np.ndarray:
    x = R.vec(x)
    for _ in range(64):
        x2 = R.mul(x, x)
        if (x2 == x).all():
            return x
        x = R.sub(3 * x2, 2 * R.mul(x2, x))
    raise RuntimeError("idempotent lifting did not converge")


def _invertible_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Batched invertibility of square matrices over ``F_p``."""
    A = np.array(mats, dtype=np.int64) % p
    N, n = A.shape[0], A.shape[1]
    ok = np.ones(N, dtype=bool)
    if n == 0:
        return ok
    inv = np.array([0] + [pow(i, -1, p) for i in range(1, p)], dtype=np.int64)
    idx = np.arange(N)
    for c in range(n):
        nz = A[:, c:, c] != 0
        ok &= nz.any(axis=1)
        r = c + nz.argmax(axis=1)
        rc, rr = A[idx, c].copy(), A[idx, r].copy()
        A[idx, c], A[idx, r] = rr, rc
        A[:, c] = (A[:, c] * inv[A[:, c, c]][:, None]) % p
        f = A[:, :, c].copy()
        f[:, c] = 0
        A = (A - f[:, :, None] * A[:, c][:, None, :]) % p
    return ok


def _is_nilpotent_ideal(R: FiniteRing, I: "Ideal") -> bool:
    P = I.sub
    base = I.sub.basis
    for _ in range(R.size.bit_length() + 1):
        nxt = R.product_span(P.basis, base)
        if nxt.is_zero:
            return True
        if nxt == P:
            return False
        P = nxt
    return False


def _radical_fp(A: FiniteRing) -> "Ideal":
    """Radical of a ring of prime characteristic: its largest nilpotent ideal."""
    if A.dim == 0:
        return A.zero_ideal()
    els = A.elements(cap=config.get("enum_cap"))
    x = els
    steps = (A.dim + 1).bit_length()
    for _ in range(steps):
        x = A.mul_many(x, x)
    nil = els[~x.any(axis=1) & els.any(axis=1)]
    J = A.zero_ideal()
    for v in nil:
        if J.sub.contains(v):
            continue
        cand = ideal_closure(A, list(J.sub.basis) + [v.tolist()], "two")
        if _is_nilpotent_ideal(A, cand):
            J = cand
    return J


# ----------------------------------------------------------------------------
class Ideal:
    """An additive subgroup of a ring closed under the declared side actions."""

    def __init__(self, ring: FiniteRing, sub: Subgroup, side: str = "two", gens=()):
        if side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")
        self.ring = ring
        self.sub = sub
        self.side = side
        self.gens = [tuple(int(x) for x in g) for g in gens]

    @property
    def basis(self) -> list[tuple[int, ...]]:
        return self.sub.basis

    def order(self) -> int:
        return self.sub.order()

    @property
    def is_zero(self) -> bool:
        return self.sub.is_zero

    @property
    def is_full(self) -> bool:
        return self.sub.is_full

    def contains(self, v) -> bool:
        return self.sub.contains(v)

    def __contains__(self, v) -> bool:
        return self.sub.contains(v)

    def __le__(self, other: "Ideal") -> bool:
        return self.sub <= other.sub

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ideal) and self.ring is other.ring and self.sub == other.sub

    def __hash__(self) -> int:
        return hash(self.sub)

    def __add__(self, other: "Ideal") -> "Ideal":
        _same_parent(self, other)
        side = _meet_side(self.side, other.side)
        return Ideal(self.ring, self.sub + other.sub, side)

    def __mul__(self, other: "Ideal") -> "Ideal":
        """Additive span of products; one-sidedness is inherited."""
        _same_parent(self, other)
        sub = self.ring.product_span(self.basis, other.basis)
        left = self.side in ("left", "two")
        right = other.side in ("right", "two")
        side = "two" if left and right else "left" if left else "right" if right else None
        if side is None:
            return ideal_closure(self.ring, sub.basis, "two")
        return Ideal(self.ring, sub, side)

    def closed(self, side: str) -> bool:
        R = self.ring
        B = _rows(self.basis, R.dim)
        if not len(B):
            return True
        for t in range(R.dim):
            if side in ("left", "two") and not self.sub.contains_many((B @ R.C[t]) % R._d).all():
                return False
            if side in ("right", "two") and not self.sub.contains_many((B @ R.C[:, t, :]) % R._d).all():
                return False
        return True

    def elements(self, cap: int | None = None) -> np.ndarray:
        return self.sub.elements(cap=config.get("enum_cap") if cap is None else cap)

    def to_json(self) -> dict:
        return {"gens": [list(g) for g in self.basis], "side": self.side}

    def __repr__(self) -> str:
        return f"<Ideal {self.side} order={self.order()} of {self.ring!r}>"


def _meet_side(a: str, b: str) -> str:
    if a == "two":
        return b
    if b == "two":
        return a
    return a if a == b else "none"


def _same_parent(I: Ideal, J: Ideal) -> None:
    if I.ring is not J.ring:
        raise ParentMismatch("ideals live in different rings")


def ideal_closure(R: FiniteRing, gens: Iterable[Sequence[int]], side: str = "two") -> Ideal:
    """Smallest ``side``-ideal containing ``gens``."""
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    gens = [list(map(int, g)) for g in gens]
    for g in gens:
        if len(g) != R.dim:
            raise ShapeError("generator has the wrong length")
    sub = Subgroup(R.orders, gens)
    while True:
        B = _rows(sub.basis, R.dim)
        if not len(B):
            break
        new = []
        for t in range(R.dim):
            if side in ("left", "two"):
                new.append(B @ R.C[t])
            if side in ("right", "two"):
                new.append(B @ R.C[:, t, :])
        V = np.vstack(new) % R._d if new else np.zeros((0, R.dim), dtype=np.int64)
        missing = V[~sub.contains_many(V)] if len(V) else V
        if not len(missing):
            break
        sub = sub.extend(missing.tolist())
    return Ideal(R, sub, side, gens)


def colon_ideal(I: Ideal, J: Ideal) -> Ideal:
    """``(I : J) = {x in R : I x subset of J}``."""
    _same_parent(I, J)
    R = I.ring
    if I.is_zero or J.is_full:
        return R.unit_ideal()
    qm = J.sub.quotient
    e = np.array(qm.invariants, dtype=np.int64)
    Q = np.array(qm.matrix(), dtype=np.int64).reshape(R.dim, len(e))
    blocks = []
    for h in I.basis:
        # row t: image of h * g_t in R / J
        blocks.append((R.left_matrix(h) @ Q) % e)
    A = np.hstack(blocks)
    sub = kernel(A.tolist(), R.orders, list(qm.invariants) * len(I.basis))
    out = Ideal(R, sub, "two")
    if not out.closed("two"):
        out.side = "right" if out.closed("right") else "left" if out.closed("left") else "none"
    return out


# ----------------------------------------------------------------------------
class RingHom:
    """Ring homomorphism given by the images of the source generators."""

    def __init__(self, source: FiniteRing, target: FiniteRing, images, *, validate: bool = True, unital: bool = True):
        self.source = source
        self.target = target
        F = np.array(images, dtype=np.int64).reshape(source.dim, target.dim)
        self.images = F % target._d if target.dim else F
        self.unital = unital
        self.target_lifts = None
        if validate:
            self.validate()

    def validate(self) -> None:
        S, T, F = self.source, self.target, self.images
        for i, d in enumerate(S.orders):
            if ((d * F[i]) % T._d).any():
                raise NotAHomomorphism(f"image of g{i} does not respect its additive order")
        if S.dim and T.dim:
            lhs = np.einsum("ijl,ln->ijn", S.C, F) % T._d
            rhs = np.einsum("ia,jb,abn->ijn", F, F, T.C) % T._d
            bad = np.argwhere((lhs != rhs).any(axis=2))
            if len(bad):
                i, j = bad[0]
                raise NotAHomomorphism(f"f(g{i} g{j}) != f(g{i}) f(g{j})")
        if self.unital and (self.apply(S.one) != np.array(T.one, dtype=np.int64)).any():
            raise NotAHomomorphism("identity is not preserved")

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64).reshape(self.source.dim)
        return (v @ self.images) % self.target._d if self.target.dim else np.zeros(0, dtype=np.int64)

    def apply_many(self, V) -> np.ndarray:
        V = _rows(V, self.source.dim)
        if not self.target.dim:
            return np.zeros((len(V), 0), dtype=np.int64)
        return (V @ self.images) % self.target._d

    def __call__(self, v) -> np.ndarray:
        return self.apply(v)

    def then(self, other: "RingHom") -> "RingHom":
        """Composite ``other o self``."""
        if other.source is not self.target:
            raise ParentMismatch("homomorphisms are not composable")
        return RingHom(self.source, other.target, self.images @ other.images, validate=False,
                       unital=self.unital and other.unital)

    @cached_property
    def kernel(self) -> Ideal:
        T = self.target
        if not T.dim:
            return self.source.unit_ideal()
        return Ideal(self.source, kernel(self.images.tolist(), self.source.orders, T.orders), "two")

    @cached_property
    def image(self) -> Subgroup:
        return Subgroup(self.target.orders, self.images.tolist())

    @property
    def is_surjective(self) -> bool:
        return self.image.is_full

    @property
    def is_injective(self) -> bool:
        return self.kernel.is_zero

    @classmethod
    def identity(cls, R: FiniteRing) -> "RingHom":
        return cls(R, R, np.eye(R.dim, dtype=np.int64), validate=False)


def make_ring(orders, mul_table, one, **kw) -> FiniteRing:
    """Validated constructor; raises on the first violated ring axiom."""
    return FiniteRing(orders, mul_table, one, **kw)


def zero_ring() -> FiniteRing:
    return FiniteRing([], [], [], validate=False, name="0")


def cyclic_ring(n: int) -> FiniteRing:
    """``Z/n``."""
    if n == 1:
        return zero_ring()
    return FiniteRing([n], [[[1]]], [1], name=f"Z/{n}")


def poly_quotient(n: int, modulus: Sequence[int]) -> FiniteRing:
    """``Z/n[x] / (f)`` for a monic ``f`` given by coefficients, constant term first.

    Generators are ``1, x, ..., x^(d-1)`` with ``d = deg f``.
    """
    f = [int(c) % n for c in modulus]
    d = len(f) - 1
    if d < 1 or f[-1] != 1:
        raise ShapeError("modulus must be monic of positive degree")
    if n == 1:
        return zero_ring()
    # reduce x^k for k < 2d - 1
    powers = []
    for k in range(2 * d - 1):
        v = [0] * (k + 1)
        v[k] = 1
        for top in range(k, d - 1, -1):
            c = v[top]
            if c:
                for t in range(d + 1):
                    v[top - d + t] = (v[top - d + t] - c * f[t]) % n
        powers.append((v + [0] * d)[:d])
    C = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            C[i, j] = powers[i + j]
    one = [1] + [0] * (d - 1)
    return FiniteRing([n] * d, C, one, validate=False, name=f"Z/{n}[x]/({','.join(map(str, f))})")


def finite_field(q: int) -> FiniteRing:
    """``F_q`` as ``F_p[x] / (f)`` with the first irreducible monic ``f`` found."""
    ps = prime_factors(q)
    if len(ps) != 1:
        raise ShapeError(f"{q} is not a prime power")
    p = ps[0]
    k = _int_log(q, p)
    if k == 1:
        return cyclic_ring(p)
    for code in range(p ** k):
        coeffs = [(code // p ** t) % p for t in range(k)] + [1]
        if coeffs[0] == 0:
            continue
        # irreducible iff the quotient is a field: no radical, one block of size q
        F = poly_quotient(p, coeffs)
        if F.radical.is_zero and len(F.blocks) == 1 and F.blocks[0].q == q:
            F.name = f"F{q}"
            return F
    raise ArithmeticError("no irreducible polynomial found")


def quotient_ring(R: FiniteRing, I: Ideal) -> tuple[FiniteRing, RingHom]:
    """``R / I`` with the canonical surjection."""
    if I.ring is not R:
        raise ParentMismatch("ideal belongs to another ring")
    if I.side != "two" and not I.closed("two"):
        raise NotTwoSided("quotient needs a two-sided ideal")
    qm = I.sub.quotient
    e = qm.invariants
    k = len(e)
    lifts = np.array(qm.lifts, dtype=np.int64).reshape(k, R.dim)
    if k:
        prods = np.einsum("ai,bj,ijn->abn", lifts, lifts, R.C) % R._d
        C = qm.image_many(prods.reshape(-1, R.dim)).reshape(k, k, k)
    else:
        C = np.zeros((0, 0, 0), dtype=np.int64)
    Q = FiniteRing(e, C, qm.image(R.one), validate=False)
    pi = RingHom(R, Q, np.array(qm.matrix(), dtype=np.int64).reshape(R.dim, k), validate=False)
    pi.target_lifts = lifts
    return Q, pi


def product_ring(*rings: FiniteRing) -> FiniteRing:
    """Direct product; generators are concatenated in order."""
    orders, one, labels = [], [], []
    for idx, R in enumerate(rings):
        orders += R.orders
        one += R.one
        labels += [f"{idx}:{lab}" for lab in R.labels]
    m = len(orders)
    C = np.zeros((m, m, m), dtype=np.int64)
    off = 0
    for R in rings:
        k = R.dim
        C[off:off + k, off:off + k, off:off + k] = R.C
        off += k
    return FiniteRing(orders, C, one, validate=False, labels=labels)


def product_projections(P: FiniteRing, rings: Sequence[FiniteRing]) -> list[RingHom]:
    out, off = [], 0
    for R in rings:
        F = np.zeros((P.dim, R.dim), dtype=np.int64)
        F[off:off + R.dim] = np.eye(R.dim, dtype=np.int64)
        out.append(RingHom(P, R, F, validate=False))
        off += R.dim
    return out


def subring(R: FiniteRing, sub: Subgroup, one=None) -> tuple[FiniteRing, RingHom]:
    """Ring structure on a multiplicatively closed subgroup.

    ``one`` defaults to the identity of ``R``; corner rings ``eRe`` pass ``e``.
    """
    unital = one is None
    one = R.one if unital else one
    gens = [np.array(g, dtype=np.int64) for g in sub.gens]
    k = len(gens)
    C = np.zeros((k, k, k), dtype=np.int64)
    for a in range(k):
        for b in range(k):
            C[a, b] = sub.coords(R.mul(gens[a], gens[b]))
    S = FiniteRing(sub.invariants, C, sub.coords(one), validate=True)
    inc = RingHom(S, R, np.array(gens, dtype=np.int64).reshape(k, R.dim), validate=False,
                  unital=unital)
    return S, inc


def matrix_ring(R: FiniteRing, n: int) -> FiniteRing:
    """``M_n(R)`` with generators ``g * E_ij`` ordered by ``(i, j, g)``."""
    m = R.dim
    N = n * n * m
    C = np.zeros((N, N, N), dtype=np.int64)

    def idx(i, j, g):
        return (i * n + j) * m + g

    for i in range(n):
        for j in range(n):
            for k in range(n):
                for a in range(m):
                    for b in range(m):
                        C[idx(i, j, a), idx(j, k, b), idx(i, k, 0):idx(i, k, 0) + m] = R.C[a, b]
    one = np.zeros(N, dtype=np.int64)
    for i in range(n):
        one[idx(i, i, 0):idx(i, i, 0) + m] = R.one
    labels = [f"({i},{j}){R.labels[g]}" for i in range(n) for j in range(n) for g in range(m)]
    return FiniteRing(list(R.orders) * (n * n), C, one, validate=False, labels=labels)


# ----------------------------------------------------------------------------
class UnitGroup:
    """The unit group of a finite ring, elements sorted by code."""

    def __init__(self, ring: FiniteRing, elements: np.ndarray):
        self.ring = ring
        codes = ring.encode(elements)
        order = np.argsort(codes)
        self.codes = codes[order]
        self.elements = elements[order]

    @property
    def order(self) -> int:
        return len(self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def index(self, V) -> np.ndarray:
        c = self.ring.encode(V)
        pos = np.searchsorted(self.codes, c)
        pos = np.minimum(pos, len(self.codes) - 1)
        if (self.codes[pos] != c).any():
            raise ValueError("element is not a unit")
        return pos

    @cached_property
    def identity(self) -> int:
        return int(self.index([self.ring.one])[0])

    def mul(self, I, J) -> np.ndarray:
        return self.index(self.ring.mul_many(self.elements[I], self.elements[J]))

    @cached_property
    def inverses(self) -> np.ndarray:
        """Index of the inverse of every unit (``u^(|U|-1)``)."""
        R = self.ring
        n = self.order - 1
        x = self.elements.copy()
        out = np.broadcast_to(np.array(R.one, dtype=np.int64), x.shape).copy()
        while n:
            if n & 1:
                out = R.mul_many(out, x)
            x = R.mul_many(x, x)
            n >>= 1
        return self.index(out)


def unit_group(R: FiniteRing, cap: int | None = None) -> UnitGroup:
    cap = config.get("unit_cap") if cap is None else cap
    if R.size > cap:
        raise SizeCapExceeded(R.size, cap)
    els = R.elements(cap=cap)
    mask = np.zeros(len(els), dtype=bool)
    chunk = 1 << 16
    for s in range(0, len(els), chunk):
        mask[s:s + chunk] = R.is_unit_many(els[s:s + chunk])
    return UnitGroup(R, els[mask])


def jacobson_radical(R: FiniteRing) -> Ideal:
    return R.radical


def block_count(R: FiniteRing) -> int:
    return len(R.blocks)
