"""The B-valued Chebyshev family, its difference quotient and Chebyshev decompositions.

``U_1(b; b')(X) = b X b'`` and

    U_n(b_1,b_1'; ...; b_n,b_n') = U_1(b_1; b_1') U_{n-1}(b_2,b_2'; ...)
                                   - b_1 eta(b_1' b_2) b_2' U_{n-2}(b_3,b_3'; ...)

with ``U_0 = 1``.  For ``B = C`` and ``eta = id`` this is the monic Chebyshev
family of the second kind orthogonal for the standard semicircle law.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .balgebra import CPMap
from .errors import DuplicateSignature, EmptyPairs, MixedLetters
from .ncpoly import BiTensor, NCPoly, Word, _check_letter, residual


@dataclass(frozen=True, eq=False)
class ChebSpec:
    """Arguments of ``U_n^{eta_letter}(b_1, b_1'; ...; b_n, b_n')(X_letter)``."""

    letter: int
    pairs: tuple  # ((b_1, b_1'), ..., (b_n, b_n'))

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((np.asarray(b, dtype=complex), np.asarray(c, dtype=complex))
                                                for b, c in self.pairs))
        if not self.pairs:
            raise EmptyPairs("a Chebyshev term needs at least one coefficient pair")

    @property
    def n(self) -> int:
        return len(self.pairs)

    def lmul(self, a: np.ndarray) -> "ChebSpec":
        """``a U_n(...)`` absorbed into the first coefficient (partial balancedness)."""
        (b, c), rest = self.pairs[0], self.pairs[1:]
        return ChebSpec(self.letter, ((a @ b, c),) + rest)

    def rmul(self, a: np.ndarray) -> "ChebSpec":
        (b, c), rest = self.pairs[-1], self.pairs[:-1]
        return ChebSpec(self.letter, rest + ((b, c @ a),))


@dataclass(frozen=True, eq=False)
class ChebProduct:
    """``U_{n(1)}(X_{i(1)}) ... U_{n(l)}(X_{i(l)})`` with alternating letters."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise EmptyPairs("a Chebyshev product needs at least one factor")
        for a, b in zip(self.factors, self.factors[1:]):
            if a.letter == b.letter:
                raise MixedLetters("consecutive factors of a Chebyshev product must use different letters")

    @property
    def degrees(self) -> tuple:
        return tuple(f.n for f in self.factors)

    @property
    def letters(self) -> tuple:
        return tuple(f.letter for f in self.factors)

    @property
    def total_degree(self) -> int:
        return sum(self.degrees)

    @property
    def signature(self) -> tuple:
        """``(k, l, n, i)``: total degree, length, degree vector and letter vector."""
        return (self.total_degree, len(self.factors), self.degrees, self.letters)


def _const(etas, b) -> NCPoly:
    alg = etas[0].algebra
    return NCPoly(alg, len(etas), (Word((), np.asarray(b, dtype=complex)[None].copy()),))


def _u1(etas, letter, b, c) -> NCPoly:
    alg = etas[0].algebra
    return NCPoly(alg, len(etas), (Word((letter,), np.stack([b, c]).astype(complex)),))


def cheb(spec: ChebSpec, etas: Sequence[CPMap]) -> NCPoly:
    """Expand ``U_n^{eta_j}`` into a polynomial of ``X_j`` over the algebra of ``etas``."""
    _check_letter(spec.letter, len(etas))
    eta = etas[spec.letter]
    j = spec.letter
    pairs = spec.pairs
    n = len(pairs)
    # build U_m(pairs[n-m:]) for m = 0..n from the tail
    tail = [None] * (n + 1)
    tail[0] = _const(etas, eta.algebra.unit)
    b, c = pairs[-1]
    tail[1] = _u1(etas, j, b, c)
    for m in range(2, n + 1):
        start = n - m
        b1, c1 = pairs[start]
        b2, c2 = pairs[start + 1]
        tail[m] = _u1(etas, j, b1, c1) * tail[m - 1] - tail[m - 2].lmul(b1 @ eta(c1 @ b2) @ c2)
    return tail[n]


def product_poly(prod: ChebProduct, etas: Sequence[CPMap]) -> NCPoly:
    out = cheb(prod.factors[0], etas)
    for f in prod.factors[1:]:
        out = out * cheb(f, etas)
    return out


def cheb_fdq(spec: ChebSpec, etas: Sequence[CPMap]) -> BiTensor:
    """Closed form of ``d_j U_n``.

    Cutting at the ``k``-th variable leaves ``U_{k-1}(...; b_{k-1}, b_{k-1}' b_k)``
    on the left and ``U_{n-k}(b_k' b_{k+1}, b_{k+1}'; ...)`` on the right, where
    an empty left (right) factor is just ``b_1`` (``b_n'``).
    """
    j = spec.letter
    pairs = spec.pairs
    n = len(pairs)
    alg = etas[0].algebra
    d = len(etas)
    out = BiTensor(alg, d)
    for k in range(n):  # cut at pair index k (0-based)
        b_k, c_k = pairs[k]
        if k == 0:
            left = _const(etas, b_k)
        else:
            lp = pairs[:k - 1] + ((pairs[k - 1][0], pairs[k - 1][1] @ b_k),)
            left = cheb(ChebSpec(j, lp), etas)
        if k == n - 1:
            right = _const(etas, c_k)
        else:
            rp = ((c_k @ pairs[k + 1][0], pairs[k + 1][1]),) + pairs[k + 2:]
            right = cheb(ChebSpec(j, rp), etas)
        out = out + BiTensor.simple(left, right)
    return out


# ----------------------------------------------------------------------------
# decompositions

def _mono_to_cheb(pairs, letter, eta):
    """``(b_1 X b_1') ... (b_n X b_n')`` as ``scalar + sum of U specs``.

    Uses ``U_1(a; a') U_m(c_1, c_1'; ...) = U_{m+1}(a, a'; c_1, c_1'; ...)
    + a eta(a' c_1) c_1' U_{m-1}(c_2, c_2'; ...)``.
    """
    a, a1 = pairs[0]
    if len(pairs) == 1:
        return None, [ChebSpec(letter, ((a, a1),))]
    scalar, specs = _mono_to_cheb(pairs[1:], letter, eta)
    new_scalar = None
    new_specs = []
    if scalar is not None:
        new_specs.append(ChebSpec(letter, ((a, a1 @ scalar),)))
    for s in specs:
        new_specs.append(ChebSpec(letter, ((a, a1),) + s.pairs))
        c1, c1p = s.pairs[0]
        corr = a @ eta(a1 @ c1) @ c1p
        if s.n == 1:
            new_scalar = corr if new_scalar is None else new_scalar + corr
        else:
            new_specs.append(s.__class__(letter, s.pairs[1:]).lmul(corr))
    return new_scalar, new_specs


def cheb_decompose_single(p: NCPoly, j: int, etas: Sequence[CPMap]):
    """Write ``p`` in ``B<X_j>`` as ``(scalar, [ChebSpec, ...])`` reconstructing it exactly."""
    _check_letter(j, len(etas))
    eta = etas[j]
    scalar = np.zeros((p.algebra.dim, p.algebra.dim), dtype=complex)
    specs = []
    for w in p.terms:
        if any(i != j for i in w.letters):
            raise MixedLetters(f"word with letters {w.letters} is not in B<X_{j}>")
        if not w.letters:
            scalar = scalar + w.coeffs[0]
            continue
        one = p.algebra.unit
        pairs = [(w.coeffs[0], w.coeffs[1])] + [(one, c) for c in w.coeffs[2:]]
        s, sp = _mono_to_cheb(pairs, j, eta)
        if s is not None:
            scalar = scalar + s
        specs += sp
    return scalar, specs


@dataclass
class ChebExpansion:
    """``scalar + sum(products)``; signatures may repeat."""

    scalar: np.ndarray
    products: list

    def poly(self, etas: Sequence[CPMap]) -> NCPoly:
        out = _const(etas, self.scalar)
        for prod in self.products:
            out = out + product_poly(prod, etas)
        return out


def _runs(word: Word, algebra):
    """Split a word into maximal same-letter runs of monomial pairs ``(b, b')``."""
    one = algebra.unit
    runs = []
    for pos, letter in enumerate(word.letters):
        pair = (word.coeffs[0] if pos == 0 else one, word.coeffs[pos + 1])
        if runs and runs[-1][0] == letter:
            runs[-1][1].append(pair)
        else:
            runs.append((letter, [pair]))
    return runs


def _decompose_runs(runs, etas):
    """Terms of a product of runs: list of (scalar or None, tuple of ChebSpec)."""
    letter, pairs = runs[0]
    s, specs = _mono_to_cheb(pairs, letter, etas[letter])
    heads = ([("s", s)] if s is not None else []) + [("u", sp) for sp in specs]
    if len(runs) == 1:
        return [(val, None) if kind == "s" else (None, (val,)) for kind, val in heads]
    rest = _decompose_runs(runs[1:], etas)
    out = []
    for kind, val in heads:
        for r_scalar, r_factors in rest:
            if kind == "s":
                if r_factors is None:
                    out.append((val @ r_scalar, None))
                else:
                    out.append((None, (r_factors[0].lmul(val),) + r_factors[1:]))
                continue
            if r_factors is None:
                out.append((None, (val.rmul(r_scalar),)))
            elif r_factors[0].letter != val.letter:
                out.append((None, (val,) + r_factors))
            else:
                # adjacent same-letter factors: re-expand their product in B<X_j>
                merged = cheb(val, etas) * cheb(r_factors[0], etas)
                m_scalar, m_specs = cheb_decompose_single(merged, val.letter, etas)
                tail = r_factors[1:]
                if tail:
                    out.append((None, (tail[0].lmul(m_scalar),) + tail[1:]))
                else:
                    out.append((m_scalar, None))
                for sp in m_specs:
                    out.append((None, (sp,) + tail))
    return out


def cheb_decompose(p: NCPoly, etas: Sequence[CPMap]) -> ChebExpansion:
    """Decompose any polynomial into ``B`` plus alternating Chebyshev products."""
    alg = p.algebra
    scalar = np.zeros((alg.dim, alg.dim), dtype=complex)
    products = []
    for w in p.terms:
        if not w.letters:
            scalar = scalar + w.coeffs[0]
            continue
        for s, factors in _decompose_runs(_runs(w, alg), etas):
            if factors is None:
                scalar = scalar + s
            else:
                products.append(ChebProduct(factors))
    return ChebExpansion(scalar, _drop_cancelling(products, etas))


def _drop_cancelling(products: list, etas: Sequence[CPMap], tol: float = 1e-12) -> list:
    """Remove same-signature products that cancel, whole classes first and then pairs."""
    classes: dict = {}
    for prod in products:
        classes.setdefault(prod.signature, []).append(prod)
    out = []
    for members in classes.values():
        if len(members) == 1:
            out.extend(members)
            continue
        polys = [product_poly(m, etas) for m in members]
        scale = max(max((float(np.max(np.abs(w.coeffs))) for w in q.terms), default=0.0) for q in polys)
        thresh = tol * max(1.0, scale)
        total = polys[0]
        for q in polys[1:]:
            total = total + q
        if residual(total) <= thresh:
            continue
        alive = list(range(len(members)))
        i = 0
        while i < len(alive):
            for jj in range(i + 1, len(alive)):
                if residual(polys[alive[i]] + polys[alive[jj]]) <= thresh:
                    del alive[jj], alive[i]
                    break
            else:
                i += 1
        out.extend(members[a] for a in alive)
    return out


# ----------------------------------------------------------------------------
# witness expressions

@dataclass(frozen=True, eq=False)
class TExpr:
    """An expression ``b + sum of Chebyshev products`` with pairwise distinct signatures."""

    scalar: np.ndarray
    products: tuple

    @property
    def signatures(self) -> dict:
        return {prod.signature: prod for prod in self.products}

    def poly(self, etas: Sequence[CPMap]) -> NCPoly:
        return ChebExpansion(self.scalar, list(self.products)).poly(etas)


def make_texpr(scalar, products: Sequence[ChebProduct]) -> TExpr:
    counts = Counter(prod.signature for prod in products)
    dup = [sig for sig, c in counts.items() if c > 1]
    if dup:
        raise DuplicateSignature(f"signature(s) {dup} appear more than once")
    return TExpr(np.asarray(scalar, dtype=complex), tuple(products))


def signature_multiplicity(expansion: ChebExpansion) -> Counter:
    return Counter(prod.signature for prod in expansion.products)
