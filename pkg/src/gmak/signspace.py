"""Sign vectors of subspaces, chirotopes and face lattices of cones.

A subspace is handled through a basis matrix B (n x d). Its sign vectors
are the sign patterns of B @ lam, i.e. the positions of the rows
w^1..w^n of B relative to the hyperplane with normal lam. Realizability of
a pattern is decided by an exact LP, so no tolerance enters anywhere.
"""

from __future__ import annotations

import itertools
import os
from math import gcd
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .exactla import SubspaceBasis, orthogonal_complement
from .lp import solve_lp, strict_sign_feasible
from .rational import determinant, nullspace, primitive_integer, to_fraction

DEFAULT_ENUM_LIMIT = 14

_SYMBOL = {-1: "-", 0: "0", 1: "+"}
_VALUE = {"-": -1, "0": 0, "+": 1}


class EnumerationLimitError(ValueError):
    pass


def enum_limit() -> int:
    env = os.environ.get("GMAK_ENUM_LIMIT")
    return int(env) if env else DEFAULT_ENUM_LIMIT


def _sign(x) -> int:
    return int(x > 0) - int(x < 0)


@dataclass(frozen=True, order=True)
class SignVector:
    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if any(e not in (-1, 0, 1) for e in entries):
            raise ValueError(f"sign entries must be -1, 0 or 1: {entries}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def parse(cls, text: str) -> SignVector:
        return cls(tuple(_VALUE[ch] for ch in text))

    def __str__(self) -> str:
        return "".join(_SYMBOL[e] for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __neg__(self) -> SignVector:
        return SignVector(tuple(-e for e in self.entries))

    def __iter__(self):
        return iter(self.entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_nonnegative(self) -> bool:
        return all(e >= 0 for e in self.entries)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, e in enumerate(self.entries) if e)


def sign_of(x: Iterable) -> SignVector:
    return SignVector(tuple(_sign(to_fraction(v) if not isinstance(v, float) else v) for v in x))


def orthogonal_pair(a: SignVector, b: SignVector) -> bool:
    if len(a) != len(b):
        raise ValueError(f"sign vectors of different lengths {len(a)} and {len(b)}")
    products = [x * y for x, y in zip(a.entries, b.entries)]
    return all(p == 0 for p in products) or (-1 in products and 1 in products)


@dataclass(frozen=True)
class SignVectorSet:
    vectors: frozenset[SignVector]
    ambient_dim: int

    def __contains__(self, item) -> bool:
        if isinstance(item, str):
            item = SignVector.parse(item)
        return item in self.vectors

    def __iter__(self) -> Iterator[SignVector]:
        return iter(sorted(self.vectors))

    def __len__(self) -> int:
        return len(self.vectors)

    def strings(self) -> list[str]:
        return [str(v) for v in self]

    def nonnegative(self) -> list[SignVector]:
        return [v for v in self if v.is_nonnegative()]

    def intersection(self, other: SignVectorSet) -> SignVectorSet:
        return SignVectorSet(self.vectors & other.vectors, self.ambient_dim)

    def orthogonal_complement(self) -> SignVectorSet:
        """All of {-,0,+}^n orthogonal to every member (brute force over 3^n)."""
        n = self.ambient_dim
        if not self.vectors:
            return SignVectorSet(frozenset(SignVector(c) for c in itertools.product((-1, 0, 1), repeat=n)), n)
        T = np.array([v.entries for v in self.vectors])
        Tp, Tm = (T > 0).T.astype(np.float32), (T < 0).T.astype(np.float32)
        out = []
        for chunk in _chunks(itertools.product((-1, 0, 1), repeat=n), 4096):
            C = np.array(chunk)
            Cp, Cm = (C > 0).astype(np.float32), (C < 0).astype(np.float32)
            # counts of coordinates where the product is positive / negative
            has_pos = (Cp @ Tp + Cm @ Tm) > 0
            has_neg = (Cp @ Tm + Cm @ Tp) > 0
            ok = (has_pos == has_neg).all(axis=1)
            out.extend(SignVector(tuple(c)) for c, keep in zip(chunk, ok) if keep)
        return SignVectorSet(frozenset(out), n)


def _chunks(it, size):
    buf = []
    for item in it:
        buf.append(item)
        if len(buf) == size:
            yield buf
            buf = []
    if buf:
        yield buf


def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _integral(v: Sequence) -> tuple[int, ...]:
    """Positive multiple of a rational vector with integer entries (signs are unchanged)."""
    fr = [to_fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    return tuple(int(x * den) for x in fr)


def _slide_to_plane(rows, signs, lam, w, moves) -> tuple[int, ...] | None:
    """Try ``c * lam - (w . lam) * u`` for each move ``(c, u)``; it lies on ``w . x = 0``."""
    a = _dot(w, lam)
    for c, u in moves:
        cand = tuple(c * x - a * y for x, y in zip(lam, u))
        if c < 0:
            cand = tuple(-x for x in cand)
        if all(_sign(_dot(v, cand)) == s for v, s in zip(rows, signs)):
            return cand
    return None


def _push_off(rows, signs, base, direction) -> tuple[int, ...]:
    """``M * base + direction`` for the least integer M >= 1 keeping the strict signs of ``base``."""
    M = 1
    for w, s in zip(rows, signs):
        if s:
            a, c = _dot(w, base), _dot(w, direction)
            if _sign(c) == -s:
                M = max(M, abs(c) // abs(a) + 1)
    return tuple(M * x + y for x, y in zip(base, direction))


def _covectors(rows: list[tuple[Fraction, ...]], d: int, alphabet: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Depth-first enumeration of realizable sign patterns of ``rows @ lam``.

    Each node carries an integer witness ``lam`` in the relatively open
    cone of its prefix, which lies in the null space L of the rows set to
    zero. Row k is either constant on that cone (one child) or the cone
    crosses the hyperplane of row k and all three signs occur. A witness
    on the hyperplane settles this without an LP; otherwise one LP for the
    zero sign decides it. Row k is forced to zero when it vanishes on L.
    """
    n = len(rows)
    rows = [_integral(w) for w in rows]
    found: list[tuple[int, ...]] = []
    null_bases: dict[tuple, list[tuple[int, ...]]] = {}

    def null_basis(zero_rows: tuple) -> list[tuple[int, ...]]:
        if zero_rows not in null_bases:
            if zero_rows:
                null_bases[zero_rows] = [_integral(v) for v in nullspace(list(zero_rows), d)]
            else:
                null_bases[zero_rows] = [tuple(int(i == j) for j in range(d)) for i in range(d)]
        return null_bases[zero_rows]

    def rec(k: int, signs: list[int], lam: tuple[int, ...], zero_rows: tuple):
        if k == n:
            found.append(tuple(signs))
            return
        w = rows[k]
        moves = [(_dot(w, u), u) for u in null_basis(zero_rows)]
        moves = [(c, u) for c, u in moves if c]
        if not moves:
            if 0 in alphabet:
                rec(k + 1, signs + [0], lam, zero_rows)
            return
        free = _sign(_dot(w, lam))
        witnesses: dict[int, tuple[int, ...]] = {free: lam}
        if free == 0:
            c, u = moves[0]
            u = u if c > 0 else tuple(-x for x in u)
            witnesses[1] = _push_off(rows[:k], signs, lam, u)
            witnesses[-1] = _push_off(rows[:k], signs, lam, tuple(-x for x in u))
        else:
            on_plane = _slide_to_plane(rows[:k], signs, lam, w, moves)
            if on_plane is None:
                on_plane = strict_sign_feasible(rows[: k + 1], signs + [0], d)
            if on_plane is not None:
                witnesses[0] = _integral(on_plane)
                witnesses[-free] = _push_off(rows[:k], signs, witnesses[0], tuple(-x for x in lam))
        for s in alphabet:
            if s not in witnesses:
                continue
            if s == 0:
                rec(k + 1, signs + [0], witnesses[0], zero_rows + (w,))
            else:
                rec(k + 1, signs + [s], witnesses[s], zero_rows)

    rec(0, [], (0,) * d, ())
    return found


def _check_limit(n: int, limit: int | None) -> None:
    limit = enum_limit() if limit is None else limit
    if n > limit:
        raise EnumerationLimitError(
            f"sign-vector enumeration over {n} coordinates exceeds the limit {limit} (set GMAK_ENUM_LIMIT)"
        )


def enumerate_sign_vectors(B: SubspaceBasis, limit: int | None = None) -> SignVectorSet:
    """Exactly the sign vectors sigma(im B)."""
    _check_limit(B.ambient_dim, limit)
    pats = _covectors(B.rows(), B.dim, (-1, 0, 1))
    return SignVectorSet(frozenset(SignVector(p) for p in pats), B.ambient_dim)


def realize(B: SubspaceBasis, tau: SignVector) -> tuple[Fraction, ...] | None:
    """A vector x in im B with sign(x) == tau, or None if tau is not a sign vector of B."""
    if len(tau) != B.ambient_dim:
        raise ValueError("sign vector length differs from ambient dimension")
    rows = B.rows()
    lam = strict_sign_feasible(rows, tau.entries, B.dim)
    if lam is None:
        return None
    return tuple(_dot(w, lam) for w in rows)


def duality_check(B: SubspaceBasis, limit: int | None = None) -> bool:
    """Self-test: sigma(B-perp) equals the sign-orthogonal set of sigma(B)."""
    lhs = enumerate_sign_vectors(orthogonal_complement(B), limit)
    rhs = enumerate_sign_vectors(B, limit).orthogonal_complement()
    if lhs.vectors != rhs.vectors:
        bad = sorted(lhs.vectors ^ rhs.vectors)[0]
        raise AssertionError(f"sign duality violated at {bad}")
    return True


# --- chirotopes ------------------------------------------------------------


@dataclass(frozen=True)
class Chirotope:
    """Signs of d x d minors of the row configuration, on sorted index tuples (0-based)."""

    d: int
    n: int
    signs: dict = field(hash=False)

    def __call__(self, *idx: int) -> int:
        if len(idx) != self.d:
            raise ValueError(f"expected {self.d} indices")
        if len(set(idx)) < len(idx):
            return 0
        order = sorted(range(len(idx)), key=lambda i: idx[i])
        parity = _permutation_parity(order)
        return parity * self.signs[tuple(sorted(idx))]

    def negated(self) -> Chirotope:
        return Chirotope(self.d, self.n, {k: -v for k, v in self.signs.items()})

    def is_zero(self) -> bool:
        return not any(self.signs.values())


def _permutation_parity(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def chirotope_of(B: SubspaceBasis) -> Chirotope:
    rows = B.rows()
    d = B.dim
    signs = {}
    for combo in itertools.combinations(range(B.ambient_dim), d):
        signs[combo] = _sign(determinant([rows[i] for i in combo])) if d else 1
    return Chirotope(d, B.ambient_dim, signs)


def sign_sets_equal(B1: SubspaceBasis, B2: SubspaceBasis, cross_check: bool = True, limit: int | None = None) -> bool:
    """Decide sigma(im B1) == sigma(im B2) by comparing chirotopes up to a global sign.

    With ``cross_check`` and n within the enumeration limit, the answer is
    compared to explicit enumeration and a disagreement raises.
    """
    if B1.ambient_dim != B2.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    if B1.dim != B2.dim:
        result = False
    else:
        c1, c2 = chirotope_of(B1), chirotope_of(B2)
        result = c1.signs == c2.signs or c1.signs == c2.negated().signs
    limit = enum_limit() if limit is None else limit
    if cross_check and B1.ambient_dim <= limit:
        enumerated = enumerate_sign_vectors(B1, limit).vectors == enumerate_sign_vectors(B2, limit).vectors
        if enumerated != result:
            raise AssertionError("chirotope comparison disagrees with sign-vector enumeration")
    return result


# --- face lattices ---------------------------------------------------------


def _leq(a: SignVector, b: SignVector) -> bool:
    return all(x <= y for x, y in zip(a.entries, b.entries))


@dataclass(frozen=True)
class FaceLattice:
    """Nonnegative sign vectors of im B, ordered componentwise with 0 < +.

    The zero vector stands for the whole cone generated by the rows of B and
    (+,...,+), when present, for its apex.
    """

    elements: tuple[SignVector, ...]
    grades: dict = field(hash=False, compare=False)

    @classmethod
    def from_elements(cls, elements: Iterable[SignVector]) -> FaceLattice:
        elems = tuple(sorted(set(elements), key=lambda v: (sum(v.entries), v.entries)))
        grades: dict[SignVector, int] = {}
        for e in elems:  # sorted by support size, so every strict predecessor comes first
            below = [grades[f] for f in grades if f != e and _leq(f, e)]
            grades[e] = 1 + max(below) if below else 0
        return cls(elems, grades)

    def leq(self, a: SignVector, b: SignVector) -> bool:
        return _leq(a, b)

    @property
    def bottom(self) -> SignVector | None:
        lows = [e for e in self.elements if all(_leq(e, f) for f in self.elements)]
        return lows[0] if lows else None

    @property
    def top(self) -> SignVector | None:
        highs = [e for e in self.elements if all(_leq(f, e) for f in self.elements)]
        return highs[0] if highs else None

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, item) -> bool:
        if isinstance(item, str):
            item = SignVector.parse(item)
        return item in self.grades

    def strings(self) -> list[str]:
        return [str(e) for e in self.elements]


def face_lattice(B: SubspaceBasis, limit: int | None = None) -> FaceLattice:
    _check_limit(B.ambient_dim, limit)
    pats = _covectors(B.rows(), B.dim, (0, 1))
    return FaceLattice.from_elements(SignVector(p) for p in pats)


def find_dominant_lattice_iso(Ft: FaceLattice, F: FaceLattice) -> dict[SignVector, SignVector] | None:
    """Order isomorphism Phi: Ft -> F with tau >= Phi(tau) componentwise, or None.

    Exhaustive backtracking; candidates must match in poset grade and be
    dominated by the source element.
    """
    if len(Ft) != len(F):
        return None
    if sorted(Ft.grades.values()) != sorted(F.grades.values()):
        return None
    src = sorted(Ft.elements, key=lambda e: (Ft.grades[e], e.entries))
    candidates = {
        a: [b for b in F.elements if F.grades[b] == Ft.grades[a] and _leq(b, a)] for a in src
    }
    if any(not c for c in candidates.values()):
        return None
    phi: dict[SignVector, SignVector] = {}
    used: set[SignVector] = set()

    def rec(i: int) -> bool:
        if i == len(src):
            return True
        a = src[i]
        for b in candidates[a]:
            if b in used:
                continue
            if all(_leq(a, x) == _leq(b, phi[x]) and _leq(x, a) == _leq(phi[x], b) for x in phi):
                phi[a] = b
                used.add(b)
                if rec(i + 1):
                    return True
                del phi[a]
                used.discard(b)
        return False

    return dict(phi) if rec(0) else None


# --- conservation ----------------------------------------------------------


def positive_vector(B: SubspaceBasis) -> tuple[int, ...] | None:
    """A strictly positive integer vector in im B, or None.

    Among lam with B lam >= 1 the LP minimizes the entry sum; the optimum is
    scaled to coprime integers.
    """
    if B.dim == 0:
        return None
    rows = B.rows()
    d = B.dim
    A_ub = [[-v for v in w] for w in rows]
    b_ub = [-1] * len(rows)
    cost = [sum((w[j] for w in rows), Fraction(0)) for j in range(d)]
    res = solve_lp(cost, A_ub, b_ub, nvars=d)
    if not res.feasible or res.x is None:
        return None
    vec = [_dot(w, res.x) for w in rows]
    return tuple(primitive_integer(vec))


def is_conservative(B_Sperp: SubspaceBasis) -> bool:
    return positive_vector(B_Sperp) is not None
