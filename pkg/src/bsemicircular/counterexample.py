"""Failure of the naive Poincaré inequality with the ``tau (x) tau`` norm on the right.

The coefficient algebra is diagonal with minimal projections ``e_1, ..., e_m`` of
trace ``(6/pi^2)/n^2`` plus a remainder projection ``e_0`` that absorbs the
leftover trace mass.  The covariance is the identity.  For

    P_n = e_1 X e_1 + 2 e_2 X e_2 + ... + n e_n X e_n

the centered tau-norm grows like ``n`` while ``||d P_n||^2_{tau (x) tau}``
stays bounded, so no constant ``C`` makes the inequality hold for every ``n``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .balgebra import BAlgebra, CPMap, identity_map, make_algebra
from .errors import TruncationExceeded
from .fock import FockSpace, apply_poly, expect, inner_tau, inner_tau_tau, make_space, vacuum
from .ncpoly import NCPoly, Word, fdq

SIX_OVER_PI2 = 6.0 / math.pi ** 2
CSV_COLUMNS = ("n", "lhs_sq", "rhs_sq", "min_C", "closed_form_lhs", "closed_form_rhs")


@dataclass(frozen=True, eq=False)
class CESpace:
    m: int
    algebra: BAlgebra
    eta: CPMap
    fock: FockSpace

    def projection(self, n: int) -> np.ndarray:
        """``e_n``; slot 0 is the remainder projection."""
        e = np.zeros((self.m + 1, self.m + 1), dtype=complex)
        e[n, n] = 1.0
        return e


def ce_weights(m: int) -> np.ndarray:
    w = SIX_OVER_PI2 / np.arange(1, m + 1, dtype=float) ** 2
    return np.concatenate([[1.0 - w.sum()], w])


def build_ce_space(m: int, depth: int = 2) -> CESpace:
    if m < 1:
        raise ValueError("truncation size must be at least 1")
    alg = make_algebra("diagonal", m + 1, ce_weights(m))
    eta = identity_map(alg)
    return CESpace(m, alg, eta, make_space(alg, [eta], depth))


def ce_poly(space: CESpace, n: int) -> NCPoly:
    """``sum_{k <= n} k e_k X e_k``."""
    if n > space.m:
        raise TruncationExceeded(f"n={n} exceeds the truncation m={space.m}")
    if n < 1:
        raise ValueError("n must be at least 1")
    words = []
    for k in range(1, n + 1):
        e = space.projection(k)
        words.append(Word((0,), np.stack([k * e, e])))
    return NCPoly(space.algebra, 1, words)


def closed_form_lhs(n: int) -> float:
    return SIX_OVER_PI2 * n


def closed_form_rhs(n: int) -> float:
    return SIX_OVER_PI2 ** 2 * math.fsum(1.0 / k ** 2 for k in range(1, n + 1))


@dataclass(frozen=True)
class CERow:
    n: int
    lhs_sq: float
    rhs_sq: float
    min_C: float
    closed_form_lhs: float
    closed_form_rhs: float


def ce_row(space: CESpace, n: int) -> CERow:
    p = ce_poly(space, n)
    centered = p - NCPoly.const(space.algebra, 1, expect(space.fock, p))
    lhs = inner_tau(space.fock, centered, centered).real
    dp = fdq(p, 0)
    rhs = inner_tau_tau(space.fock, dp, dp).real
    return CERow(n, lhs, rhs, math.sqrt(lhs / rhs), closed_form_lhs(n), closed_form_rhs(n))


def ce_table(space: CESpace, n_max: int) -> list[CERow]:
    if n_max > space.m:
        raise TruncationExceeded(f"n_max={n_max} exceeds the truncation m={space.m}")
    return [ce_row(space, n) for n in range(1, n_max + 1)]


def growth_slope(rows: list[CERow], n_lo: int = 5, n_hi: int = 50) -> float:
    """Least-squares slope of ``log min_C`` against ``log n`` over ``[n_lo, n_hi]``."""
    sel = [r for r in rows if n_lo <= r.n <= n_hi]
    if len(sel) < 2:
        return float("nan")
    x = np.log([r.n for r in sel])
    y = np.log([r.min_C for r in sel])
    return float(np.polyfit(x, y, 1)[0])


def remainder_leak(space: CESpace, n: int) -> float:
    """Largest entry touching the remainder slot in ``P_n(S)`` applied to the vacuum."""
    v = apply_poly(ce_poly(space, n), vacuum(space.fock))
    leak = 0.0
    for arr in v.components.values():
        if len(arr):
            leak = max(leak, float(np.abs(arr[..., 0, :]).max()), float(np.abs(arr[..., :, 0]).max()))
    return leak


def commutator_poly(space: CESpace, b: np.ndarray) -> NCPoly:
    """``b X - X b``."""
    one = space.algebra.unit
    b = space.algebra.element(b)
    return NCPoly(space.algebra, 1, (Word((0,), np.stack([b, one])), Word((0,), np.stack([-one, b]))))


def commutation_residual(space: CESpace, b: np.ndarray) -> float:
    """tau-norm squared of ``b S - S b``; zero when ``S`` commutes with ``B``."""
    q = commutator_poly(space, b)
    return float(inner_tau(space.fock, q, q).real)


def conjugate_kernel_check(space: CESpace, b: np.ndarray) -> dict:
    """Norms of ``P_b = bX - Xb`` and of ``d P_b = b (x) 1 - 1 (x) b``.

    A vanishing first norm next to a positive second one shows that the
    difference quotient does not factor through evaluation at ``S``.
    """
    q = commutator_poly(space, b)
    dq = fdq(q, 0)
    poly_sq = max(inner_tau(space.fock, q, q).real, 0.0)
    tensor_sq = max(inner_tau_tau(space.fock, dq, dq).real, 0.0)
    return {"poly_norm": math.sqrt(poly_sq), "tensor_norm": math.sqrt(tensor_sq)}


# ----------------------------------------------------------------------------
# reports

def _row_values(r: CERow) -> list:
    return [r.n, r.lhs_sq, r.rhs_sq, r.min_C, r.closed_form_lhs, r.closed_form_rhs]


def table_csv(rows: list[CERow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([v if isinstance(v, int) else repr(float(v)) for v in _row_values(r)])
    return buf.getvalue()


def table_json(rows: list[CERow], m: int, slope: float) -> str:
    obj = {
        "m": m,
        "columns": list(CSV_COLUMNS),
        "rows": [dict(zip(CSV_COLUMNS, _row_values(r))) for r in rows],
        "growth_exponent": None if math.isnan(slope) else slope,
    }
    return json.dumps(obj, indent=2) + "\n"
