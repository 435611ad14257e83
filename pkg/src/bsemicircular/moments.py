"""Moment oracle for B-valued semicircular families via non-crossing pairings.

This path never touches the Fock space: ``E[b_0 S_{j_1} b_1 ... S_{j_k} b_k]``
is the sum over non-crossing pair partitions that only pair equal letters of
``b_0 eta_pi(b_1, ..., b_{k-1}) b_k``.  Positions are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .balgebra import CPMap
from .errors import LetterOutOfRange, MalformedPartition
from .ncpoly import NCPoly


@dataclass(frozen=True)
class PairPartition:
    k: int
    pairs: tuple  # sorted tuple of (a, b) with a < b

    def partner(self) -> dict:
        out = {}
        for a, b in self.pairs:
            out[a] = b
            out[b] = a
        return out


def is_crossing(pairs) -> bool:
    return any(a < c < b < e for a, b in pairs for c, e in pairs)


def validate_partition(pi: PairPartition) -> None:
    seen = [x for ab in pi.pairs for x in ab]
    if sorted(seen) != list(range(pi.k)) or any(a >= b for a, b in pi.pairs):
        raise MalformedPartition(f"{pi.pairs} is not a pair partition of range({pi.k})")
    if is_crossing(pi.pairs):
        raise MalformedPartition(f"{pi.pairs} is crossing")


@lru_cache(maxsize=None)
def _nc2(lo: int, hi: int) -> tuple:
    """Non-crossing pairings of ``range(lo, hi)`` as tuples of pairs."""
    if lo == hi:
        return ((),)
    if (hi - lo) % 2:
        return ()
    out = []
    for b in range(lo + 1, hi, 2):
        for inner in _nc2(lo + 1, b):
            for outer in _nc2(b + 1, hi):
                out.append(((lo, b),) + inner + outer)
    return tuple(out)


def nc2_enumerate(k: int) -> list[PairPartition]:
    if k < 0:
        raise ValueError("k must be non-negative")
    return [PairPartition(k, tuple(sorted(p))) for p in _nc2(0, k)]


def eta_pi(pi: PairPartition, bs: Sequence[np.ndarray], etas: Sequence[CPMap] | CPMap,
           letters: Sequence[int] | None = None) -> np.ndarray:
    """Nested evaluation of the multiplicative functional ``eta_pi(b_1, ..., b_{k-1})``.

    ``bs[i]`` sits between positions ``i`` and ``i + 1``.  Each pair ``(a, c)``
    applies the covariance of its letter to the product of the already-reduced
    interior, innermost pairs first; e.g. ``{(0,3),(1,2)}`` gives
    ``eta(b_1 eta(b_2) b_3)``.
    """
    validate_partition(pi)
    if isinstance(etas, CPMap):
        etas = [etas]
    if letters is None:
        letters = [0] * pi.k
    if len(bs) != max(pi.k - 1, 0):
        raise MalformedPartition(f"need {pi.k - 1} interior coefficients, got {len(bs)}")
    partner = pi.partner()
    for a, c in pi.pairs:
        if letters[a] != letters[c]:
            raise MalformedPartition(f"pair {(a, c)} joins letters {letters[a]} and {letters[c]}")

    def block(a: int) -> np.ndarray:
        # value contributed by the pair opened at position a
        c = partner[a]
        return etas[letters[a]](segment(a + 1, c - 1))

    def segment(lo: int, hi: int) -> np.ndarray:
        # bs[lo-1] * blocks of positions lo..hi * bs[hi], i.e. the stretch strictly between lo-1 and hi+1
        acc = bs[lo - 1]
        pos = lo
        while pos <= hi:
            acc = acc @ block(pos) @ bs[partner[pos]]
            pos = partner[pos] + 1
        return acc

    if pi.k == 0:
        raise MalformedPartition("empty partition has no functional")
    # top level: positions 0..k-1 between the outer coefficients, which are not part of eta_pi
    acc = None
    pos = 0
    while pos < pi.k:
        c = partner[pos]
        val = block(pos)
        acc = val if acc is None else acc @ bs[pos - 1] @ val
        pos = c + 1
    return acc


def moment(b0: np.ndarray, chain: Sequence[tuple[int, np.ndarray]], etas: Sequence[CPMap]) -> np.ndarray:
    """``E[b_0 S_{j_1} b_1 ... S_{j_k} b_k]`` for ``chain = [(j_1, b_1), ..., (j_k, b_k)]``."""
    b0 = np.asarray(b0, dtype=complex)
    k = len(chain)
    letters = [j for j, _ in chain]
    if any(not 0 <= j < len(etas) for j in letters):
        raise LetterOutOfRange(f"letters {letters} out of range for d={len(etas)}")
    if k == 0:
        return b0.copy()
    out = np.zeros_like(b0)
    if k % 2:
        return out
    bs = [b for _, b in chain]
    for pi in nc2_enumerate(k):
        if any(letters[a] != letters[c] for a, c in pi.pairs):
            continue
        out = out + b0 @ eta_pi(pi, bs[:-1], etas, letters) @ bs[-1]
    return out


def expect_oracle(p: NCPoly, etas: Sequence[CPMap]) -> np.ndarray:
    out = np.zeros((p.algebra.dim, p.algebra.dim), dtype=complex)
    for w in p.terms:
        chain = list(zip(w.letters, w.coeffs[1:]))
        out = out + moment(w.coeffs[0], chain, etas)
    return out
