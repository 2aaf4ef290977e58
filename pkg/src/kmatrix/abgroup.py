"""Finitely generated abelian groups in invariant-factor form.

Every K-group in the package is reported as an :class:`FgAbGroup` (or a
:class:`LocalizedAbGroup` once a prime set has been inverted).  The canonical
form is ``Z^r + Z/d1 + ... + Z/dk`` with ``d1 | d2 | ... | dk`` and every
``di >= 2``; equality of canonical forms is isomorphism.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "SmithForm",
    "snf",
    "FgAbGroup",
    "LocalizedAbGroup",
    "iso_test",
    "localize",
    "mod_p",
    "direct_sum",
    "prime_factors",
]

Matrix = list[list[int]]


class SmithForm(NamedTuple):
    """Result of :func:`snf`: ``U @ M @ V == D`` with ``D`` diagonal."""

    invariants: list[int]
    U: Matrix
    V: Matrix
    D: Matrix
    Vinv: Matrix


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def snf(M: Sequence[Sequence[int]], transforms: bool = True, inverse: bool = False) -> SmithForm:
    """Smith normal form of an integer matrix.

    Pivots are chosen by minimal absolute value; arithmetic is exact on Python
    integers.  ``invariants`` lists the nonzero diagonal entries, each dividing
    the next.  ``U`` and ``V`` are unimodular and satisfy ``U M V = D``.
    With ``transforms=False`` the certificates are returned as empty lists;
    ``inverse=True`` additionally tracks ``Vinv = V^-1``.
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m) if transforms else []
    V = _identity(n) if transforms else []
    Vi = _identity(n) if inverse else []

    def swap_rows(i: int, j: int) -> None:
        if i != j:
            A[i], A[j] = A[j], A[i]
            if transforms:
                U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            if transforms:
                for row in V:
                    row[i], row[j] = row[j], row[i]
            if inverse:
                Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst: int, src: int, c: int) -> None:
        # row_dst += c * row_src
        if c:
            rs, rd = A[src], A[dst]
            for k in range(n):
                if rs[k]:
                    rd[k] += c * rs[k]
            if transforms:
                us, ud = U[src], U[dst]
                for k in range(m):
                    if us[k]:
                        ud[k] += c * us[k]

    def add_col(dst: int, src: int, c: int) -> None:
        if c:
            for row in A:
                if row[src]:
                    row[dst] += c * row[src]
            if transforms:
                for row in V:
                    if row[src]:
                        row[dst] += c * row[src]
            if inverse:
                # V <- V E  implies  V^-1 <- E^-1 V^-1
                vd, vs = Vi[dst], Vi[src]
                for k in range(n):
                    if vd[k]:
                        vs[k] -= c * vd[k]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        clean = False
            if not clean:
                # move the smallest leftover of the pivot row/column into place
                cand = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = None
            for i in range(t + 1, m):
                row = A[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if transforms:
                U[t] = [-x for x in U[t]]
        t += 1
    invariants = [A[i][i] for i in range(min(m, n)) if A[i][i]]
    return SmithForm(invariants, U, V, A, Vi)


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``|n|`` in increasing order."""
    n = abs(int(n))
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _normalize_torsion(orders: Iterable[int]) -> tuple[int, ...]:
    # invariant factors of a diagonal matrix via prime-power bookkeeping
    powers: dict[int, list[int]] = {}
    for d in orders:
        d = abs(int(d))
        if d == 0:
            raise ValueError("torsion orders must be nonzero; use free_rank for Z summands")
        for p in prime_factors(d):
            q = 1
            while d % p == 0:
                d //= p
                q *= p
            powers.setdefault(p, []).append(q)
    if not powers:
        return ()
    k = max(len(v) for v in powers.values())
    factors = [1] * k
    for p, qs in powers.items():
        qs = sorted(qs)
        for idx, q in enumerate(qs):
            factors[k - len(qs) + idx] *= q
    return tuple(f for f in factors if f > 1)


@dataclass(frozen=True)
class FgAbGroup:
    """``Z^free_rank`` plus cyclic factors in invariant-factor order.

    The constructor normalizes ``invariant_factors``, so ``FgAbGroup(0, (6,))``
    and ``FgAbGroup(0, (2, 3))`` compare equal.
    """

    free_rank: int = 0
    invariant_factors: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("free_rank must be nonnegative")
        object.__setattr__(self, "free_rank", int(self.free_rank))
        object.__setattr__(self, "invariant_factors", _normalize_torsion(self.invariant_factors))

    @classmethod
    def cyclic(cls, d: int) -> "FgAbGroup":
        return cls(1) if d == 0 else cls(0, (d,))

    @classmethod
    def free(cls, r: int) -> "FgAbGroup":
        return cls(r)

    @classmethod
    def trivial(cls) -> "FgAbGroup":
        return cls(0)

    @classmethod
    def from_relations(cls, rel: Sequence[Sequence[int]], ngens: int) -> "FgAbGroup":
        """Group ``Z^ngens / rowspace(rel)``."""
        inv = snf(rel, transforms=False).invariants if rel else []
        return cls(ngens - len(inv), tuple(d for d in inv if d > 1))

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def order(self) -> int | None:
        """Cardinality, or ``None`` for an infinite group."""
        if self.free_rank:
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def to_json(self) -> dict:
        return {"rank": self.free_rank, "torsion": list(self.invariant_factors)}

    @classmethod
    def from_json(cls, doc: dict) -> "FgAbGroup":
        return cls(int(doc.get("rank", 0)), tuple(doc.get("torsion", ())))

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.invariant_factors]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class LocalizedAbGroup:
    """A finitely generated ``Z[1/s]``-module: free part plus prime-to-s torsion."""

    s: int
    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.s < 1:
            raise ValueError("inverted element must be positive")
        tors = _normalize_torsion(self.torsion)
        for d in tors:
            if gcd(d, self.s) != 1:
                raise ValueError(f"torsion factor {d} is not prime to {self.s}")
        object.__setattr__(self, "torsion", tors)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def to_json(self) -> dict:
        return {"rank": self.free_rank, "torsion": list(self.torsion), "inverted": self.s}

    def __str__(self) -> str:
        base = str(FgAbGroup(self.free_rank, self.torsion))
        return f"({base})[1/{self.s}]"


def iso_test(G: FgAbGroup | LocalizedAbGroup, H: FgAbGroup | LocalizedAbGroup) -> bool:
    """True iff the two (normalized) groups are isomorphic."""
    if isinstance(G, LocalizedAbGroup) or isinstance(H, LocalizedAbGroup):
        if not (isinstance(G, LocalizedAbGroup) and isinstance(H, LocalizedAbGroup)):
            return False
        same_primes = prime_factors(G.s) == prime_factors(H.s)
        return same_primes and G.free_rank == H.free_rank and G.torsion == H.torsion
    return G.free_rank == H.free_rank and G.invariant_factors == H.invariant_factors


def localize(G: FgAbGroup | LocalizedAbGroup, s: int) -> LocalizedAbGroup:
    """``G (x) Z[1/s]``: the rank survives and torsion on the primes of ``s`` dies."""
    if s < 1:
        raise ValueError("s must be positive")
    if isinstance(G, LocalizedAbGroup):
        s_total = G.s * s // gcd(G.s, s)
        rank, tors = G.free_rank, G.torsion
    else:
        s_total = s
        rank, tors = G.free_rank, G.invariant_factors
    primes = prime_factors(s_total)
    kept = []
    for d in tors:
        for p in primes:
            while d % p == 0:
                d //= p
        if d > 1:
            kept.append(d)
    return LocalizedAbGroup(s_total, rank, tuple(kept))


def mod_p(G: FgAbGroup, p: int) -> tuple[FgAbGroup, FgAbGroup]:
    """Return ``(G (x) Z/p, Tor_1(G, Z/p))``."""
    if p < 2:
        raise ValueError("p must be at least 2")
    tensor = [p] * G.free_rank + [gcd(d, p) for d in G.invariant_factors]
    tor = [gcd(d, p) for d in G.invariant_factors]
    return FgAbGroup(0, tuple(tensor)), FgAbGroup(0, tuple(tor))


def direct_sum(groups: Iterable[FgAbGroup | LocalizedAbGroup]) -> FgAbGroup | LocalizedAbGroup:
    """Direct sum, renormalized; an empty sum is the trivial group."""
    groups = list(groups)
    if any(isinstance(g, LocalizedAbGroup) for g in groups):
        if not all(isinstance(g, LocalizedAbGroup) for g in groups):
            raise TypeError("cannot mix localized and integral groups")
        s = 1
        for g in groups:
            s = s * g.s // gcd(s, g.s)
        return LocalizedAbGroup(
            s,
            sum(g.free_rank for g in groups),
            tuple(d for g in groups for d in localize(g, s).torsion),
        )
    return FgAbGroup(
        sum(g.free_rank for g in groups),
        tuple(d for g in groups for d in g.invariant_factors),
    )
