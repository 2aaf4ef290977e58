"""Subgroups of finite abelian groups ``G = Z/d_1 + ... + Z/d_m``.

A subgroup ``H`` is stored through the lattice ``L = pi^{-1}(H)`` in ``Z^m``,
which always contains ``d_j e_j``.  That lets the Hermite form be computed
with every coordinate reduced mod ``d_j``, so entries never grow.  All ring,
module and Hom computations in the package funnel through this module.
"""
from __future__ import annotations

from functools import cached_property
from itertools import product
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .abgroup import FgAbGroup, snf

Vec = Sequence[int]


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b) = x a + y b`` and ``g >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def hnf_mod(rows: Iterable[Vec], orders: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Row Hermite form of ``span(rows) + diag(orders) Z^m``.

    The result is upper triangular with ``H[j][j] | orders[j]`` and
    ``0 <= H[i][j] < H[j][j]`` above the diagonal, hence canonical.
    """
    d = [int(x) for x in orders]
    m = len(d)
    work = []
    for r in rows:
        v = [int(x) % d[k] for k, x in enumerate(r)]
        if any(v):
            work.append(v)
    H: list[list[int]] = []
    for j in range(m):
        piv = [0] * m
        piv[j] = d[j]
        rest = []
        for r in work:
            b = r[j]
            if b == 0:
                rest.append(r)
                continue
            a = piv[j]
            g, x, y = egcd(a, b)
            ag, bg = a // g, b // g
            new_piv = [(x * piv[k] + y * r[k]) for k in range(m)]
            new_r = [(bg * piv[k] - ag * r[k]) for k in range(m)]
            for k in range(j + 1, m):
                new_piv[k] %= d[k]
                new_r[k] %= d[k]
            new_piv[j] = g
            new_r[j] = 0
            piv = new_piv
            if any(new_r):
                rest.append(new_r)
        H.append(piv)
        work = rest
    for i in range(m):
        row = H[i]
        for j in range(i + 1, m):
            hj = H[j][j]
            q = row[j] // hj
            if q:
                hjr = H[j]
                for k in range(j, m):
                    row[k] -= q * hjr[k]
    return tuple(tuple(r) for r in H)


def _forward_solve(H: Sequence[Vec], v: Vec) -> list[int] | None:
    """Integer ``y`` with ``y H = v`` (``H`` upper triangular), or ``None``."""
    m = len(H)
    v = list(v)
    y = [0] * m
    for j in range(m):
        hj = H[j][j]
        if v[j] % hj:
            return None
        c = v[j] // hj
        y[j] = c
        if c:
            row = H[j]
            for k in range(j, m):
                v[k] -= c * row[k]
    return y


class Subgroup:
    """Subgroup of ``Z/d_1 + ... + Z/d_m`` generated by ``gens``."""

    __slots__ = ("orders", "hnf", "__dict__")

    def __init__(self, orders: Sequence[int], gens: Iterable[Vec] = (), *, _hnf=None):
        self.orders = tuple(int(x) for x in orders)
        self.hnf = _hnf if _hnf is not None else hnf_mod(gens, self.orders)

    @classmethod
    def full(cls, orders: Sequence[int]) -> "Subgroup":
        m = len(orders)
        return cls(orders, [[int(i == j) for j in range(m)] for i in range(m)])

    @classmethod
    def zero(cls, orders: Sequence[int]) -> "Subgroup":
        return cls(orders, [])

    # -- basic invariants ------------------------------------------------
    @property
    def ambient_dim(self) -> int:
        return len(self.orders)

    def order(self) -> int:
        out = 1
        for j, d in enumerate(self.orders):
            out *= d // self.hnf[j][j]
        return out

    def index(self) -> int:
        out = 1
        for j in range(len(self.orders)):
            out *= self.hnf[j][j]
        return out

    @property
    def is_zero(self) -> bool:
        return all(self.hnf[j][j] == d for j, d in enumerate(self.orders))

    @property
    def is_full(self) -> bool:
        return all(self.hnf[j][j] == 1 for j in range(len(self.orders)))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subgroup) and self.orders == other.orders and self.hnf == other.hnf

    def __hash__(self) -> int:
        return hash((self.orders, self.hnf))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order()}, ambient={self.orders})"

    @property
    def basis(self) -> list[tuple[int, ...]]:
        """Additive generators: the nonzero Hermite rows, reduced."""
        return [
            tuple(x % d for x, d in zip(row, self.orders))
            for j, row in enumerate(self.hnf)
            if row[j] != self.orders[j]
        ]

    # -- membership ------------------------------------------------------
    def reduce(self, v: Vec) -> list[int]:
        """Canonical representative of ``v`` modulo the subgroup."""
        d = self.orders
        v = [int(x) % d[k] for k, x in enumerate(v)]
        for j, row in enumerate(self.hnf):
            c = v[j] // row[j]
            if c:
                for k in range(j, len(d)):
                    v[k] = (v[k] - c * row[k]) % d[k]
        return v

    def contains(self, v: Vec) -> bool:
        return not any(self.reduce(v))

    def contains_many(self, V: np.ndarray) -> np.ndarray:
        """Vectorized membership for the rows of ``V``."""
        V = np.array(V, dtype=np.int64, copy=True).reshape(-1, len(self.orders))
        d = np.array(self.orders, dtype=np.int64)
        V %= d
        ok = np.ones(len(V), dtype=bool)
        for j, row in enumerate(self.hnf):
            hj = row[j]
            col = V[:, j]
            ok &= col % hj == 0
            q = col // hj
            V = (V - np.outer(q, np.array(row, dtype=np.int64))) % d
        return ok & ~V.any(axis=1)

    def __contains__(self, v: Vec) -> bool:
        return self.contains(v)

    def __le__(self, other: "Subgroup") -> bool:
        return all(other.contains(r) for r in self.hnf)

    def __add__(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.orders, list(self.hnf) + list(other.hnf))

    def extend(self, gens: Iterable[Vec]) -> "Subgroup":
        return Subgroup(self.orders, list(self.hnf) + [list(g) for g in gens])

    # -- cyclic decomposition -------------------------------------------
    @cached_property
    def _structure(self):
        m = len(self.orders)
        H = [list(r) for r in self.hnf]
        T = []
        for k, dk in enumerate(self.orders):
            e = [0] * m
            e[k] = dk
            T.append(_forward_solve(H, e))
        sf = snf(T, transforms=True, inverse=True)
        keep = [k for k in range(m) if sf.D[k][k] != 1] if m else []
        invariants = [sf.D[k][k] for k in keep]
        Q = sf.V
        gens = []
        for k in keep:
            y = sf.Vinv[k]
            vec = [sum(y[i] * H[i][c] for i in range(m)) % self.orders[c] for c in range(m)]
            gens.append(tuple(vec))
        return invariants, keep, Q, gens

    @property
    def invariants(self) -> list[int]:
        """Orders of the cyclic generators in :attr:`gens`."""
        return self._structure[0]

    @property
    def gens(self) -> list[tuple[int, ...]]:
        """Independent cyclic generators, ``H = <g_1> + ... + <g_k>``."""
        return self._structure[3]

    def group(self) -> FgAbGroup:
        return FgAbGroup(0, tuple(self.invariants))

    def coords(self, v: Vec) -> tuple[int, ...]:
        """Coordinates of ``v`` (which must lie in ``H``) in the cyclic basis."""
        invariants, keep, Q, _ = self._structure
        y = _forward_solve(self.hnf, [int(x) % self.orders[k] for k, x in enumerate(v)])
        if y is None:
            raise ValueError("vector is not in the subgroup")
        m = len(y)
        return tuple(
            sum(y[i] * Q[i][k] for i in range(m)) % c for k, c in zip(keep, invariants)
        )

    def coords_many(self, V: np.ndarray) -> np.ndarray:
        invariants, keep, Q, _ = self._structure
        m = len(self.orders)
        V = np.array(V, dtype=np.int64, copy=True).reshape(-1, m) % np.array(self.orders, dtype=np.int64)
        Y = np.zeros_like(V)
        for j, row in enumerate(self.hnf):
            c = V[:, j] // row[j]
            Y[:, j] = c
            V = V - np.outer(c, np.array(row, dtype=np.int64))
        if not keep:
            return np.zeros((len(V), 0), dtype=np.int64)
        Qk = np.array([[Q[i][k] for k in keep] for i in range(m)], dtype=object)
        out = (Y.astype(object) @ Qk) % np.array(invariants, dtype=object)
        return out.astype(np.int64)

    def from_coords(self, c: Vec) -> tuple[int, ...]:
        v = [0] * len(self.orders)
        for coef, g in zip(c, self.gens):
            for k in range(len(v)):
                v[k] += coef * g[k]
        return tuple(x % d for x, d in zip(v, self.orders))

    def elements(self, cap: int | None = None) -> np.ndarray:
        """All elements as rows (enumeration; respects ``cap``)."""
        n = self.order()
        if cap is not None and n > cap:
            raise OverflowError(f"subgroup of order {n} exceeds enumeration cap {cap}")
        m = len(self.orders)
        out = np.zeros((1, m), dtype=np.int64)
        d = np.array(self.orders, dtype=np.int64)
        for g, c in zip(self.gens, self.invariants):
            g = np.array(g, dtype=np.int64)
            out = ((out[None, :, :] + np.arange(c)[:, None, None] * g[None, None, :]) % d).reshape(-1, m)
        return out

    # -- quotient ambient / H ------------------------------------------
    @cached_property
    def quotient(self) -> "QuotientMap":
        return QuotientMap(self)


class QuotientMap:
    """Explicit isomorphism ``G / H -> Z/e_1 + ... + Z/e_k``."""

    def __init__(self, H: Subgroup):
        self.sub = H
        m = len(H.orders)
        sf = snf([list(r) for r in H.hnf], transforms=True, inverse=True)
        keep = [k for k in range(m) if sf.D[k][k] != 1]
        self.invariants = [sf.D[k][k] for k in keep]
        self._Q = np.array([[sf.V[i][k] for k in keep] for i in range(m)], dtype=object).reshape(m, len(keep))
        self.lifts = [tuple(int(x) % d for x, d in zip(sf.Vinv[k], H.orders)) for k in keep]

    @property
    def target_orders(self) -> tuple[int, ...]:
        return tuple(self.invariants)

    def image(self, v: Vec) -> tuple[int, ...]:
        r = np.array([int(x) for x in v], dtype=object) @ self._Q
        return tuple(int(x) % e for x, e in zip(r, self.invariants))

    def image_many(self, V: np.ndarray) -> np.ndarray:
        V = np.asarray(V, dtype=np.int64).reshape(-1, len(self.sub.orders))
        if not self.invariants:
            return np.zeros((len(V), 0), dtype=np.int64)
        r = (V.astype(object) @ self._Q) % np.array(self.invariants, dtype=object)
        return r.astype(np.int64)

    def matrix(self) -> list[list[int]]:
        """Images of the ambient generators, one row each."""
        m = len(self.sub.orders)
        return [list(self.image([int(i == j) for j in range(m)])) for i in range(m)]


def image(A: Sequence[Vec], tgt_orders: Sequence[int]) -> Subgroup:
    """Image of the homomorphism whose generator images are the rows of ``A``."""
    return Subgroup(tgt_orders, A)


def kernel(A: Sequence[Vec], src_orders: Sequence[int], tgt_orders: Sequence[int]) -> Subgroup:
    """Kernel of ``x -> x A`` from ``(+) Z/src`` to ``(+) Z/tgt``.

    The homomorphism must be well defined (``src[i] * A[i] = 0`` in the target).
    """
    ms, mt = len(src_orders), len(tgt_orders)
    rows = []
    for i in range(ms):
        r = [int(x) for x in A[i]] + [int(i == j) for j in range(ms)]
        rows.append(r)
    H = hnf_mod(rows, list(tgt_orders) + list(src_orders))
    gens = [r[mt:] for j, r in enumerate(H) if j >= mt]
    return Subgroup(src_orders, gens)


def check_hom(A: Sequence[Vec], src_orders: Sequence[int], tgt_orders: Sequence[int]) -> bool:
    """True iff ``A`` defines a homomorphism (respects additive orders)."""
    for i, d in enumerate(src_orders):
        if any((d * int(x)) % t for x, t in zip(A[i], tgt_orders)):
            return False
    return True


def express(gens: Sequence[Vec], target: Vec, orders: Sequence[int]) -> list[int] | None:
    """Integers ``c`` with ``sum c_i gens_i = target``, or ``None`` if impossible."""
    orders = [int(d) for d in orders]
    k = len(gens)
    tgt = [int(x) % d for x, d in zip(target, orders)]
    if not any(tgt):
        return [0] * k
    exp = 1
    t_ord = 1
    for x, d in zip(tgt, orders):
        exp = exp * d // gcd(exp, d)
        o = d // gcd(x, d)
        t_ord = t_ord * o // gcd(t_ord, o)
    K = kernel([list(g) for g in gens] + [tgt], [exp] * k + [t_ord], orders)
    # find a kernel vector whose last coordinate is -1 mod t_ord
    combo = [0] * (k + 1)
    g_cur = 0
    for v in K.hnf:
        a = v[k] % t_ord
        if a == 0:
            continue
        g_cur, x, y = egcd(g_cur, a)
        combo = [x * c + y * vv for c, vv in zip(combo, v)]
    if g_cur == 0 or gcd(g_cur, t_ord) != 1:
        return None
    scale = (-pow(g_cur, -1, t_ord)) % t_ord
    return [scale * x for x in combo[:k]]


def enumerate_group(orders: Sequence[int]) -> Iterable[tuple[int, ...]]:
    return product(*(range(d) for d in orders))
