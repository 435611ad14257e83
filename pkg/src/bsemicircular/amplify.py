"""Matrix amplification ``M_N(B)`` and the corner embedding of a polynomial into a witness expression.

Elements of ``M_N(B)`` are stored as ``(N k, N k)`` arrays in the layout
``sum_pq kron(E_pq, b_pq)``.  The lifted covariance ``eta (x) id_N`` acts
entrywise, which in Kraus form means ``kron(I_N, A)`` for each Kraus operator
``A`` of ``eta``.

Evaluation at ``X (x) I_N`` turns a polynomial over ``M_N(B)`` into an
``N x N`` matrix of polynomials over ``B``.  Identities that only hold after
that evaluation are compared through :func:`evaluate_amplified`.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .balgebra import BAlgebra, CPMap, make_cp_map
from .chebyshev import ChebProduct, ChebSpec, TExpr, cheb, cheb_decompose, make_texpr, product_poly
from .errors import BlockOverflow, DecompositionFailure, MixedLetters
from .fock import FockSpace, inner_eta, make_space
from .ncpoly import NCPoly, Word, fdq, residual


@dataclass(frozen=True, eq=False)
class AmplifiedContext:
    base: BAlgebra
    N: int
    amplified: BAlgebra
    lifted_etas: tuple

    def space(self, depth: int) -> FockSpace:
        return make_space(self.amplified, self.lifted_etas, depth)


def amplified_algebra(base: BAlgebra, N: int) -> BAlgebra:
    """``M_N(B)`` with the trace ``tau (x) tr_N``."""
    if N < 1:
        raise ValueError("amplification order must be at least 1")
    mask = np.kron(np.ones((N, N), dtype=bool), base.mask)
    rho = np.kron(np.full(N, 1.0 / N), base.rho)
    return BAlgebra("amplified", N * base.dim, base.trace_weights, None, mask, rho)


def lift_map(eta: CPMap, amplified: BAlgebra, N: int) -> CPMap:
    kraus = np.stack([np.kron(np.eye(N), a) for a in eta.kraus])
    return make_cp_map(amplified, kraus, star_closed=eta.star_closed)


def amplify(base: BAlgebra, etas: Sequence[CPMap], N: int) -> AmplifiedContext:
    amp = amplified_algebra(base, N)
    return AmplifiedContext(base, int(N), amp, tuple(lift_map(e, amp, N) for e in etas))


# ----------------------------------------------------------------------------
# block helpers

def unit_block(N: int, p: int, q: int, b: np.ndarray) -> np.ndarray:
    """``E_pq (x) b``."""
    e = np.zeros((N, N))
    e[p, q] = 1.0
    return np.kron(e, b)


def blockdiag(blocks: Sequence[np.ndarray], N: int) -> np.ndarray:
    """Block-diagonal element of ``M_N(B)``, zero-padded after ``len(blocks)`` slots."""
    if len(blocks) > N:
        raise BlockOverflow(f"{len(blocks)} blocks do not fit into M_{N}")
    k = blocks[0].shape[0]
    out = np.zeros((N * k, N * k), dtype=complex)
    for s, b in enumerate(blocks):
        out[s * k:(s + 1) * k, s * k:(s + 1) * k] = b
    return out


def ones_row(N: int, k: int) -> np.ndarray:
    """``sum_q E_0q (x) 1``: the padding row ``[1 ... 1; 0]``."""
    return np.kron(np.vstack([np.ones((1, N)), np.zeros((N - 1, N))]), np.eye(k))


def ones_col(N: int, k: int) -> np.ndarray:
    return ones_row(N, k).T


def embed_poly(p: NCPoly, amplified: BAlgebra, N: int, slot: int = 0) -> NCPoly:
    """``E_ss (x) p``: every coefficient placed in the diagonal slot ``s``."""
    words = [Word(w.letters, np.stack([unit_block(N, slot, slot, c) for c in w.coeffs])) for w in p.terms]
    return NCPoly(amplified, p.d, words)


# ----------------------------------------------------------------------------
# evaluation at X (x) I_N

def evaluate_amplified(p: NCPoly, base: BAlgebra, N: int) -> dict:
    """Dense form of ``p(X (x) I_N)`` per letter sequence, shape ``(N, N, D)``.

    Entry ``[p, q]`` is the canonical dense form of the ``(p, q)`` polynomial
    over ``B``: the sum over intermediate block indices of the Kronecker
    products of the structural entries of the coefficient chain.
    """
    k = base.dim
    rows, cols = np.nonzero(base.mask)
    out: dict = {}
    for w in p.terms:
        t = w.coeffs.reshape(len(w.coeffs), N, k, N, k)
        v = t[:, :, rows, :, cols]  # advanced indices go first: (E, m + 1, N, N)
        v = np.transpose(v, (1, 2, 3, 0))  # (m + 1, N, N, E)
        acc = v[0]
        for nxt in v[1:]:
            acc = np.einsum("pax,aqe->pqxe", acc, nxt).reshape(N, N, -1)
        if w.letters in out:
            out[w.letters] = out[w.letters] + acc
        else:
            out[w.letters] = acc
    return out


def evaluation_residual(a: dict, b: dict) -> float:
    """Max-abs difference of two evaluated forms."""
    res = 0.0
    for key in set(a) | set(b):
        x = a.get(key)
        y = b.get(key)
        diff = x if y is None else (-y if x is None else x - y)
        if diff.size:
            res = max(res, float(np.max(np.abs(diff))))
    return res


def corner_form(p: NCPoly, base: BAlgebra, N: int) -> dict:
    """Evaluated form of ``E_00 (x) p``."""
    out = {}
    for key, val in evaluate_amplified(p, base, 1).items():
        full = np.zeros((N, N, val.shape[-1]), dtype=complex)
        full[0, 0] = val[0, 0]
        out[key] = full
    return out


# ----------------------------------------------------------------------------
# block-diagonal Chebyshev arguments

def amplified_spec(specs: Sequence[ChebSpec], N: int) -> ChebSpec:
    """One spec over ``M_N(B)`` whose coefficients are the block diagonals of ``specs``."""
    if not specs:
        raise ValueError("need at least one spec")
    if len(specs) > N:
        raise BlockOverflow(f"{len(specs)} blocks do not fit into M_{N}")
    letter, n = specs[0].letter, specs[0].n
    if any(s.letter != letter for s in specs):
        raise MixedLetters("block-diagonal arguments must share one letter")
    if any(s.n != n for s in specs):
        raise ValueError("block-diagonal arguments must share one degree")
    pairs = tuple((blockdiag([s.pairs[r][0] for s in specs], N), blockdiag([s.pairs[r][1] for s in specs], N))
                  for r in range(n))
    return ChebSpec(letter, pairs)


def amplified_cheb_block(specs: Sequence[ChebSpec], ell: int, etas: Sequence[CPMap]) -> float:
    """Residual of ``U(blockdiag args) = blockdiag(U(args_1), ..., U(args_k), 0, ...)`` over ``M_ell(B)``."""
    if len(specs) > ell:
        raise BlockOverflow(f"{len(specs)} blocks do not fit into M_{ell}")
    base = etas[0].algebra
    ctx = amplify(base, etas, ell)
    lhs = cheb(amplified_spec(specs, ell), ctx.lifted_etas)
    rhs = NCPoly.zero(ctx.amplified, len(etas))
    for s, spec in enumerate(specs):
        rhs = rhs + embed_poly(cheb(spec, etas), ctx.amplified, ell, slot=s)
    return evaluation_residual(evaluate_amplified(lhs, base, ell), evaluate_amplified(rhs, base, ell))


def padded_product(products: Sequence[ChebProduct], N: int) -> ChebProduct:
    """Merge same-signature products into one amplified product compressed by the ones row and column.

    Its value at ``X (x) I_N`` is ``E_00 (x) sum(products)``.
    """
    sig = products[0].signature
    if any(pr.signature != sig for pr in products):
        raise ValueError("padded products need one common signature")
    k = products[0].factors[0].pairs[0][0].shape[0]
    factors = [amplified_spec([pr.factors[t] for pr in products], N) for t in range(len(products[0].factors))]
    factors[0] = factors[0].lmul(ones_row(N, k))
    factors[-1] = factors[-1].rmul(ones_col(N, k))
    return ChebProduct(factors)


def padded_product_residual(products: Sequence[ChebProduct], N: int, etas: Sequence[CPMap]) -> float:
    """Residual of the padded-product identity for one signature class."""
    base = etas[0].algebra
    ctx = amplify(base, etas, N)
    lhs = product_poly(padded_product(products, N), ctx.lifted_etas)
    total = NCPoly.zero(base, len(etas))
    for pr in products:
        total = total + product_poly(pr, etas)
    return evaluation_residual(evaluate_amplified(lhs, base, N), corner_form(total, base, N))


# ----------------------------------------------------------------------------
# corner embedding

@dataclass(frozen=True, eq=False)
class CornerEmbedding:
    N: int
    context: AmplifiedContext
    texpr: TExpr
    residual: float
    norm_ratio_by_letter: tuple


def embed_corner(p: NCPoly, etas: Sequence[CPMap], depth: int | None = None) -> CornerEmbedding:
    """Realize ``p`` as the ``(0, 0)`` corner of a witness expression over ``M_N(B)``.

    ``N`` is the largest number of Chebyshev products sharing a signature in
    the decomposition of ``p``.  The ratios compare the squared eta-norms of
    the difference quotients upstairs and downstairs and should equal ``1/N``;
    a letter on which ``p`` has no difference quotient reports ``nan``.
    """
    base = p.algebra
    d = len(etas)
    expansion = cheb_decompose(p, etas)
    if residual(expansion.poly(etas) - p) > 1e-8 * max(1.0, _size(p)):
        raise DecompositionFailure("Chebyshev decomposition does not reconstruct the polynomial")
    classes: dict = defaultdict(list)
    for pr in expansion.products:
        classes[pr.signature].append(pr)
    N = max((len(v) for v in classes.values()), default=1)
    ctx = amplify(base, etas, N)
    scalar = unit_block(N, 0, 0, expansion.scalar)
    texpr = make_texpr(scalar, [padded_product(v, N) for v in classes.values()])
    lifted = texpr.poly(ctx.lifted_etas)
    res = evaluation_residual(evaluate_amplified(lifted, base, N), corner_form(p, base, N))

    if depth is None:
        depth = max(p.degree, 1)
    base_space = make_space(base, etas, depth)
    amp_space = ctx.space(depth)
    ratios = []
    for j in range(d):
        dp = fdq(p, j)
        down = inner_eta(base_space, j, dp, dp).real
        dq = fdq(lifted, j)
        up = inner_eta(amp_space, j, dq, dq).real
        ratios.append(up / down if down > 1e-300 else float("nan"))
    return CornerEmbedding(N, ctx, texpr, res, tuple(ratios))


def _size(p: NCPoly) -> float:
    return max((float(np.max(np.abs(w.coeffs))) for w in p.terms), default=0.0)
