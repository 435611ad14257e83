"""Divergence, number operator, Stein's equation, integration by parts and the Poincaré gap.

All routines return the raw quantities (both sides of an identity, or a
residual norm); tolerances are left to the caller.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .balgebra import check_trace_symmetry, trace_b
from .errors import TraceSymmetryRequired
from .fock import FockSpace, _check_letter, expect, expect_many, inner_eta, inner_tau
from .moments import expect_oracle
from .ncpoly import BiTensor, NCPoly, Word, bt_lmul, bt_rmul, fdq, residual


def _word_poly(t: BiTensor, w: Word) -> NCPoly:
    return NCPoly(t.algebra, t.d, (w,))


def _expectations(space: FockSpace, polys, oracle: bool) -> np.ndarray:
    k = space.algebra.dim
    if not polys:
        return np.zeros((0, k, k), dtype=complex)
    if oracle:
        return np.stack([expect_oracle(p, space.etas) for p in polys])
    return expect_many(space, polys)


def divergence(space: FockSpace, j: int, t: BiTensor, oracle: bool = False) -> NCPoly:
    """``d_j^*`` on a two-leg tensor.

    A simple tensor ``x (x) y`` maps to ``x X_j y`` minus
    ``sum x eta_j(E[y']) y''`` over ``d_j y = y' (x) y''`` and minus
    ``sum x' eta_j(E[x'']) y`` over ``d_j x = x' (x) x''``.  With
    ``oracle=True`` the expectations come from the pairing formula instead of
    the Fock space.
    """
    _check_letter(space, j)
    eta = space.etas[j]
    alg, d = t.algebra, t.d
    words = []
    middles = []  # (left word, middle poly, right word)
    for a, b in t.pairs:
        words.append(Word(a.letters + (j,) + b.letters, np.concatenate([a.coeffs, b.coeffs])))
        for b1, b2 in fdq(_word_poly(t, b), j).pairs:
            middles.append((a, _word_poly(t, b1), b2))
        for a1, a2 in fdq(_word_poly(t, a), j).pairs:
            middles.append((a1, _word_poly(t, a2), b))
    if middles:
        mids = eta(_expectations(space, [m for _, m, _ in middles], oracle))
        words += [(left.rmul(mid) * right).scaled(-1) for (left, _, right), mid in zip(middles, mids)]
    return NCPoly(alg, d, words)


def pairing_term(space: FockSpace, j: int, t1: BiTensor, t2: BiTensor) -> NCPoly:
    """Bilinear pairing ``(x1 (x) x2, x3 (x) x4)_j = x1 eta_j(E[x2 x3]) x4``."""
    _check_letter(space, j)
    t1._compatible(t2)
    combos = [(a, b * c, e) for a, b in t1.pairs for c, e in t2.pairs]
    es = _expectations(space, [_word_poly(t1, m) for _, m, _ in combos], False)
    words = []
    if combos:
        mids = space.etas[j](es)
        words = [left.rmul(mid) * right for (left, _, right), mid in zip(combos, mids)]
    return NCPoly(t1.algebra, t1.d, words)


def check_product_rule(space: FockSpace, j: int, a: NCPoly, t: BiTensor) -> tuple[float, float]:
    """Residuals of the left and right product rules for the divergence."""
    da = fdq(a, j)
    left = divergence(space, j, bt_lmul(a, t)) - (a * divergence(space, j, t) - pairing_term(space, j, da, t))
    right = divergence(space, j, bt_rmul(a, t)) - (divergence(space, j, t) * a - pairing_term(space, j, t, da))
    return residual(left), residual(right)


def number_op(space: FockSpace, j: int, p: NCPoly) -> NCPoly:
    """``d_j^* d_j p``."""
    return divergence(space, j, fdq(p, j))


def stein_residual(space: FockSpace, j: int, p: NCPoly) -> tuple[complex, complex]:
    """``(<S_j, p(S)>_tau, <1 (x) 1, d_j p>_eta_j)``."""
    _check_letter(space, j)
    x = NCPoly.var(space.algebra, p.d, j)
    lhs = inner_tau(space, x, p)
    rhs = inner_eta(space, j, BiTensor.unit(space.algebra, p.d), fdq(p, j))
    return lhs, rhs


def ibp_residual(space: FockSpace, j: int, t: BiTensor, xi: NCPoly) -> tuple[complex, complex]:
    """``(<d_j^* t, xi>_tau, <t, d_j xi>_eta_j)``; needs a trace-symmetric covariance."""
    _check_letter(space, j)
    if not check_trace_symmetry(space.etas[j]):
        raise TraceSymmetryRequired(f"covariance map {j} is not symmetric for the trace")
    lhs = inner_tau(space, divergence(space, j, t), xi)
    rhs = inner_eta(space, j, t, fdq(xi, j))
    return lhs, rhs


@dataclass(frozen=True)
class PoincareReport:
    lhs_sq: float
    rhs_sq_by_letter: tuple
    gap: float


def poincare_report(space: FockSpace, p: NCPoly) -> PoincareReport:
    """Centered tau-norm of ``p`` against the eta-norms of its difference quotients."""
    centered = p - NCPoly.const(p.algebra, p.d, expect(space, p))
    lhs = inner_tau(space, centered, centered).real
    rhs = []
    for j in range(space.d):
        if j >= p.d:
            rhs.append(0.0)
            continue
        dp = fdq(p, j)
        rhs.append(inner_eta(space, j, dp, dp).real)
    return PoincareReport(float(lhs), tuple(float(r) for r in rhs), float(sum(rhs) - lhs))


def tau_norm_sq(space: FockSpace, p: NCPoly) -> float:
    return float(inner_tau(space, p, p).real)


def trace_of(space: FockSpace, b: np.ndarray) -> complex:
    return complex(trace_b(space.algebra, b))
