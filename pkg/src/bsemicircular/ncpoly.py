"""Non-commutative polynomials with matrix coefficients and the free difference quotient.

A word ``b_0 X_{i_1} b_1 ... X_{i_m} b_m`` is stored as its letter tuple
``(i_1, ..., i_m)`` (0-based letters) and a coefficient stack of shape
``(m + 1, k, k)``.  Polynomials are finite sums of words and two-leg tensors
are finite sums of ``(left word, right word)`` pairs.  Sums are never merged
on construction; equality is decided by :func:`residual`, which flattens the
words sharing a letter sequence into a dense tensor in ``B^{(m+1)}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

from .balgebra import BAlgebra, adjoint, matrix_from_json, matrix_to_json
from .errors import AlgebraMismatch, LetterOutOfRange, ParseError, VariableCountMismatch


@dataclass(frozen=True, eq=False)
class Word:
    letters: tuple
    coeffs: np.ndarray = field(repr=False)  # (m + 1, k, k)

    @property
    def degree(self) -> int:
        return len(self.letters)

    def adjoint(self) -> "Word":
        return Word(self.letters[::-1], adjoint(self.coeffs[::-1]))

    def __mul__(self, other: "Word") -> "Word":
        junction = self.coeffs[-1] @ other.coeffs[0]
        coeffs = np.concatenate([self.coeffs[:-1], junction[None], other.coeffs[1:]])
        return Word(self.letters + other.letters, coeffs)

    def scaled(self, c: complex) -> "Word":
        coeffs = self.coeffs.copy()
        coeffs[0] = c * coeffs[0]
        return Word(self.letters, coeffs)

    def lmul(self, b: np.ndarray) -> "Word":
        coeffs = self.coeffs.copy()
        coeffs[0] = b @ coeffs[0]
        return Word(self.letters, coeffs)

    def rmul(self, b: np.ndarray) -> "Word":
        coeffs = self.coeffs.copy()
        coeffs[-1] = coeffs[-1] @ b
        return Word(self.letters, coeffs)


def make_word(letters: Sequence[int], coeffs: Sequence) -> Word:
    letters = tuple(int(i) for i in letters)
    arr = np.asarray(np.stack([np.asarray(c, dtype=complex) for c in coeffs]), dtype=complex)
    if arr.shape[0] != len(letters) + 1:
        raise ValueError("a word with m letters needs m + 1 coefficients")
    return Word(letters, arr)


class NCPoly:
    """A finite sum of words in ``d`` self-adjoint variables over ``algebra``."""

    __slots__ = ("algebra", "d", "terms")
    __array_ufunc__ = None  # make ``b * p`` with a numpy ``b`` defer to __rmul__

    def __init__(self, algebra: BAlgebra, d: int, terms: Iterable[Word] = ()):
        self.algebra = algebra
        self.d = int(d)
        self.terms = tuple(terms)
        k = algebra.dim
        for w in self.terms:
            if w.coeffs.shape[1:] != (k, k):
                raise AlgebraMismatch("word coefficients do not match the algebra dimension")
            if any(i < 0 or i >= self.d for i in w.letters):
                raise LetterOutOfRange(f"letters {w.letters} out of range for d={self.d}")

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, algebra: BAlgebra, d: int) -> "NCPoly":
        return cls(algebra, d, ())

    @classmethod
    def const(cls, algebra: BAlgebra, d: int, b=None) -> "NCPoly":
        b = algebra.unit if b is None else algebra.element(b)
        return cls(algebra, d, (Word((), b[None].copy()),))

    @classmethod
    def var(cls, algebra: BAlgebra, d: int, j: int) -> "NCPoly":
        _check_letter(j, d)
        one = algebra.unit
        return cls(algebra, d, (Word((j,), np.stack([one, one])),))

    @classmethod
    def monomial(cls, algebra: BAlgebra, d: int, letters: Sequence[int], coeffs: Sequence) -> "NCPoly":
        w = make_word(letters, [algebra.element(c) for c in coeffs])
        return cls(algebra, d, (w,))

    # -- algebra ------------------------------------------------------------
    def _compatible(self, other: "NCPoly") -> None:
        if other.algebra is not self.algebra:
            raise AlgebraMismatch("polynomials live over different coefficient algebras")
        if other.d != self.d:
            raise VariableCountMismatch(f"d={self.d} vs d={other.d}")

    def _coerce(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            self._compatible(other)
            return other
        if isinstance(other, Number):
            return NCPoly.const(self.algebra, self.d, complex(other) * self.algebra.unit)
        if isinstance(other, np.ndarray):
            return NCPoly.const(self.algebra, self.d, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return NCPoly(self.algebra, self.d, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly(self.algebra, self.d, tuple(w.scaled(-1) for w in self.terms))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return poly_scale(other, self)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return NCPoly(self.algebra, self.d, tuple(a * b for a in self.terms for b in other.terms))

    def __rmul__(self, other):
        if isinstance(other, Number):
            return poly_scale(other, self)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self

    def lmul(self, b: np.ndarray) -> "NCPoly":
        return NCPoly(self.algebra, self.d, tuple(w.lmul(b) for w in self.terms))

    def rmul(self, b: np.ndarray) -> "NCPoly":
        return NCPoly(self.algebra, self.d, tuple(w.rmul(b) for w in self.terms))

    def adjoint(self) -> "NCPoly":
        return NCPoly(self.algebra, self.d, tuple(w.adjoint() for w in self.terms))

    @property
    def degree(self) -> int:
        return max((w.degree for w in self.terms), default=0)

    def letters_used(self) -> set:
        return {i for w in self.terms for i in w.letters}

    def __repr__(self) -> str:
        return f"NCPoly(d={self.d}, k={self.algebra.dim}, {len(self.terms)} words, degree {self.degree})"


def _check_letter(j: int, d: int) -> None:
    if not 0 <= j < d:
        raise LetterOutOfRange(f"letter {j} out of range for d={d}")


def poly_add(p: NCPoly, q: NCPoly) -> NCPoly:
    return p + q


def poly_mul(p: NCPoly, q: NCPoly) -> NCPoly:
    return p * q


def poly_scale(c: complex, p: NCPoly) -> NCPoly:
    return NCPoly(p.algebra, p.d, tuple(w.scaled(c) for w in p.terms))


def poly_adjoint(p: NCPoly) -> NCPoly:
    return p.adjoint()


# ----------------------------------------------------------------------------
# two-leg tensors

class BiTensor:
    """A finite sum of simple tensors ``left (x) right`` of words."""

    __slots__ = ("algebra", "d", "pairs")

    def __init__(self, algebra: BAlgebra, d: int, pairs: Iterable[tuple[Word, Word]] = ()):
        self.algebra = algebra
        self.d = int(d)
        self.pairs = tuple(pairs)

    @classmethod
    def simple(cls, p: NCPoly, q: NCPoly) -> "BiTensor":
        p._compatible(q)
        return cls(p.algebra, p.d, tuple((a, b) for a in p.terms for b in q.terms))

    @classmethod
    def unit(cls, algebra: BAlgebra, d: int) -> "BiTensor":
        one = NCPoly.const(algebra, d)
        return cls.simple(one, one)

    def _compatible(self, other: "BiTensor") -> None:
        if other.algebra is not self.algebra:
            raise AlgebraMismatch("tensors live over different coefficient algebras")
        if other.d != self.d:
            raise VariableCountMismatch(f"d={self.d} vs d={other.d}")

    def __add__(self, other: "BiTensor") -> "BiTensor":
        self._compatible(other)
        return BiTensor(self.algebra, self.d, self.pairs + other.pairs)

    def __neg__(self) -> "BiTensor":
        return self.scaled(-1)

    def __sub__(self, other: "BiTensor") -> "BiTensor":
        return self + (-other)

    def scaled(self, c: complex) -> "BiTensor":
        return BiTensor(self.algebra, self.d, tuple((a.scaled(c), b) for a, b in self.pairs))

    def __mul__(self, c):
        if isinstance(c, Number):
            return self.scaled(c)
        return NotImplemented

    __rmul__ = __mul__

    def left_legs(self) -> list[NCPoly]:
        return [NCPoly(self.algebra, self.d, (a,)) for a, _ in self.pairs]

    def right_legs(self) -> list[NCPoly]:
        return [NCPoly(self.algebra, self.d, (b,)) for _, b in self.pairs]

    @property
    def degree(self) -> int:
        return max((max(a.degree, b.degree) for a, b in self.pairs), default=0)

    def __repr__(self) -> str:
        return f"BiTensor(d={self.d}, k={self.algebra.dim}, {len(self.pairs)} pairs)"


def bt_add(s: BiTensor, t: BiTensor) -> BiTensor:
    return s + t


def bt_lmul(p: NCPoly, t: BiTensor) -> BiTensor:
    """``(p (x) 1) t``."""
    return BiTensor(t.algebra, t.d, tuple((w * a, b) for w in p.terms for a, b in t.pairs))


def bt_rmul(p: NCPoly, t: BiTensor) -> BiTensor:
    """``t (1 (x) p)``."""
    return BiTensor(t.algebra, t.d, tuple((a, b * w) for a, b in t.pairs for w in p.terms))


def bt_adjoint(t: BiTensor) -> BiTensor:
    """``(p (x) q)^* = q^* (x) p^*``."""
    return BiTensor(t.algebra, t.d, tuple((b.adjoint(), a.adjoint()) for a, b in t.pairs))


def fdq(p: NCPoly, j: int) -> BiTensor:
    """Free difference quotient with respect to ``X_j``.

    ``b_0 X b_1 ... X b_m`` maps to the sum over positions ``l`` carrying the
    letter ``j`` of ``(b_0 X ... b_{l-1}) (x) (b_l X ... b_m)``.
    """
    _check_letter(j, p.d)
    pairs = []
    for w in p.terms:
        for pos, letter in enumerate(w.letters):
            if letter != j:
                continue
            left = Word(w.letters[:pos], w.coeffs[:pos + 1])
            right = Word(w.letters[pos + 1:], w.coeffs[pos + 1:])
            pairs.append((left, right))
    return BiTensor(p.algebra, p.d, pairs)


def mul_x(j: int, t: BiTensor) -> NCPoly:
    """Splice ``X_j`` between the legs: ``a (x) b -> a X_j b``."""
    _check_letter(j, t.d)
    words = []
    for a, b in t.pairs:
        words.append(Word(a.letters + (j,) + b.letters, np.concatenate([a.coeffs, b.coeffs])))
    return NCPoly(t.algebra, t.d, words)


# ----------------------------------------------------------------------------
# canonical forms

def _chain_dense(coeff_stack: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Sum of Kronecker products of coefficient chains, restricted to ``mask``.

    ``coeff_stack`` has shape ``(n, f, k, k)``; the result is a vector of length
    ``s ** f`` with ``s = mask.sum()``.
    """
    vals = coeff_stack[:, :, mask]  # (n, f, s)
    acc = vals[:, 0]
    for f in range(1, vals.shape[1]):
        acc = (acc[:, :, None] * vals[:, f, None, :]).reshape(acc.shape[0], -1)
    return acc.sum(axis=0)


def _group(items, key):
    groups: dict = {}
    for it in items:
        groups.setdefault(key(it), []).append(it)
    return groups


def canonical(p: NCPoly) -> dict:
    """Map each letter sequence to the dense tensor of its coefficient chains."""
    out = {}
    for letters, words in _group(p.terms, lambda w: w.letters).items():
        out[letters] = _chain_dense(np.stack([w.coeffs for w in words]), p.algebra.mask)
    return out


def canonical_tensor(t: BiTensor) -> dict:
    out = {}
    for key, pairs in _group(t.pairs, lambda ab: (ab[0].letters, ab[1].letters)).items():
        stack = np.stack([np.concatenate([a.coeffs, b.coeffs]) for a, b in pairs])
        out[key] = _chain_dense(stack, t.algebra.mask)
    return out


def residual(p: NCPoly) -> float:
    """Max-abs entry of the canonical form; zero iff ``p`` is the zero polynomial."""
    return max((float(np.max(np.abs(v))) for v in canonical(p).values()), default=0.0)


def residual_tensor(t: BiTensor) -> float:
    return max((float(np.max(np.abs(v))) for v in canonical_tensor(t).values()), default=0.0)


def is_zero(p: NCPoly, tol: float = 1e-10) -> bool:
    return residual(p) <= tol


def is_zero_tensor(t: BiTensor, tol: float = 1e-10) -> bool:
    return residual_tensor(t) <= tol


def canonicalize(p: NCPoly, tol: float = 0.0) -> NCPoly:
    """Merge constant words, drop letter groups whose dense form vanishes within ``tol``."""
    dense = canonical(p)
    keep = []
    const = None
    for w in p.terms:
        if not w.letters:
            const = w.coeffs[0] if const is None else const + w.coeffs[0]
        elif np.max(np.abs(dense[w.letters])) > tol:
            keep.append(w)
    if const is not None and np.max(np.abs(const)) > tol:
        keep.insert(0, Word((), const[None]))
    return NCPoly(p.algebra, p.d, keep)


def graded_components(p: NCPoly) -> dict[int, NCPoly]:
    out: dict[int, list] = {}
    for w in p.terms:
        out.setdefault(w.degree, []).append(w)
    return {m: NCPoly(p.algebra, p.d, ws) for m, ws in sorted(out.items())}


# ----------------------------------------------------------------------------
# random generation and JSON

def random_word(algebra: BAlgebra, d: int, degree: int, rng: np.random.Generator,
                letters: Sequence[int] | None = None) -> Word:
    from .balgebra import random_element

    if letters is None:
        letters = rng.integers(0, d, size=degree)
    coeffs = np.stack([random_element(algebra, rng) for _ in range(len(letters) + 1)])
    return Word(tuple(int(i) for i in letters), coeffs)


def random_poly(algebra: BAlgebra, d: int, max_degree: int, rng: np.random.Generator,
                n_words: int | None = None) -> NCPoly:
    if n_words is None:
        n_words = int(rng.integers(1, 5))
    words = [random_word(algebra, d, int(rng.integers(0, max_degree + 1)), rng) for _ in range(n_words)]
    return NCPoly(algebra, d, words)


def poly_to_json(p: NCPoly) -> dict:
    return {
        "d": p.d,
        "terms": [
            {"letters": list(w.letters), "coeffs": [matrix_to_json(c) for c in w.coeffs]} for w in p.terms
        ],
    }


def poly_from_json(obj, algebra: BAlgebra, d: int | None = None) -> NCPoly:
    try:
        if isinstance(obj, str):
            obj = json.loads(obj)
        terms = obj["terms"] if isinstance(obj, dict) else obj
        if d is None:
            d = int(obj.get("d", 0)) if isinstance(obj, dict) else 0
            d = max([d] + [max(t["letters"], default=-1) + 1 for t in terms])
        words = []
        for t in terms:
            coeffs = [algebra.element(matrix_from_json(c, algebra.dim)) for c in t["coeffs"]]
            words.append(make_word(t["letters"], coeffs))
        return NCPoly(algebra, max(d, 1), words)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed polynomial: {exc}") from exc
