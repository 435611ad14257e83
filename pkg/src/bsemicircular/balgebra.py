"""Finite-dimensional coefficient algebras with a faithful trace, and CP maps.

Elements of an algebra ``B`` are plain complex ``(k, k)`` numpy arrays.  The
algebra records which entries may be non-zero (its *structure mask*) and a
diagonal trace density ``rho`` so that ``tau(b) = sum_r rho[r] * b[r, r]``.

Supported kinds:

* ``"diagonal"``: the diagonal matrices ``D_k`` with arbitrary positive weights.
* ``"full"``: the full matrix algebra ``M_k`` with the normalized trace.
* ``"blocks"``: block-diagonal matrices, one positive weight per block; each
  block carries its weight times its own normalized trace.
* ``"amplified"``: ``M_N(B)`` built by :func:`bsemicircular.amplify.amplify`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AlgebraMismatch,
    EmptyAlgebra,
    NonPositiveWeight,
    StructureViolation,
    WeightSumMismatch,
    ConfigError,
)

KINDS = ("diagonal", "full", "blocks", "amplified")
_KIND_ALIASES = {"block-diagonal": "blocks", "block_diagonal": "blocks"}


@dataclass(frozen=True, eq=False)
class BAlgebra:
    kind: str
    dim: int
    trace_weights: tuple
    block_sizes: tuple | None
    mask: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)

    @property
    def unit(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    @property
    def zero(self) -> np.ndarray:
        return np.zeros((self.dim, self.dim), dtype=complex)

    @property
    def structure_size(self) -> int:
        return int(self.mask.sum())

    def element(self, matrix) -> np.ndarray:
        """Validate ``matrix`` against the structure and return it as a complex array."""
        b = np.asarray(matrix, dtype=complex)
        if b.shape != (self.dim, self.dim):
            raise AlgebraMismatch(f"expected a {self.dim}x{self.dim} matrix, got shape {b.shape}")
        if np.any(b[~self.mask] != 0):
            raise StructureViolation(f"matrix has entries outside the {self.kind} structure")
        return b

    def contains(self, matrix) -> bool:
        b = np.asarray(matrix)
        return b.shape == (self.dim, self.dim) and not np.any(b[~self.mask] != 0)

    def basis(self) -> np.ndarray:
        """Matrix units ``e_{rs}`` spanning the structure, shape ``(s, k, k)``."""
        rows, cols = np.nonzero(self.mask)
        out = np.zeros((rows.size, self.dim, self.dim), dtype=complex)
        out[np.arange(rows.size), rows, cols] = 1.0
        return out

    def trace(self, b) -> complex:
        return trace_b(self, b)


def _check_weights(weights: Sequence[float], normalize: bool) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise EmptyAlgebra("no trace weights given")
    if np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise NonPositiveWeight(f"trace weights must be positive, got {list(weights)}")
    total = w.sum()
    if normalize:
        return w / total
    if abs(total - 1.0) > 1e-12:
        raise WeightSumMismatch(f"trace weights sum to {total!r}, not 1")
    return w


def make_algebra(
    kind: str,
    dim: int | None = None,
    trace_weights: Sequence[float] | None = None,
    block_sizes: Sequence[int] | None = None,
    normalize: bool = False,
) -> BAlgebra:
    """Build and validate a coefficient algebra.

    ``dim`` may be omitted when it is implied by ``trace_weights`` (diagonal)
    or ``block_sizes`` (blocks).  With ``normalize=True`` the weights are
    rescaled to sum to one; otherwise a sum different from one is rejected.
    """
    kind = _KIND_ALIASES.get(kind, kind)
    if kind == "full":
        if dim is None or dim < 1:
            raise EmptyAlgebra("full algebra needs dim >= 1")
        if trace_weights is not None and len(trace_weights) != 1:
            raise ConfigError("a full matrix algebra has a single trace weight")
        if trace_weights is not None:
            _check_weights(trace_weights, normalize)
        mask = np.ones((dim, dim), dtype=bool)
        rho = np.full(dim, 1.0 / dim)
        return BAlgebra("full", dim, (1.0,), None, mask, rho)
    if kind == "diagonal":
        if trace_weights is None:
            if dim is None or dim < 1:
                raise EmptyAlgebra("diagonal algebra needs dim >= 1")
            trace_weights = [1.0 / dim] * dim
        w = _check_weights(trace_weights, normalize)
        if dim is None:
            dim = w.size
        if w.size != dim:
            raise ConfigError(f"diagonal algebra of dim {dim} needs {dim} weights, got {w.size}")
        mask = np.eye(dim, dtype=bool)
        return BAlgebra("diagonal", dim, tuple(w), None, mask, w.copy())
    if kind == "blocks":
        if not block_sizes:
            raise EmptyAlgebra("block algebra needs at least one block")
        sizes = [int(s) for s in block_sizes]
        if any(s < 1 for s in sizes):
            raise EmptyAlgebra(f"block sizes must be positive, got {sizes}")
        total = sum(sizes)
        if dim is not None and dim != total:
            raise ConfigError(f"block sizes {sizes} do not add up to dim {dim}")
        if trace_weights is None:
            trace_weights = [s / total for s in sizes]
        w = _check_weights(trace_weights, normalize)
        if w.size != len(sizes):
            raise ConfigError("one trace weight per block is required")
        mask = np.zeros((total, total), dtype=bool)
        rho = np.empty(total)
        start = 0
        for s, ws in zip(sizes, w):
            mask[start:start + s, start:start + s] = True
            rho[start:start + s] = ws / s
            start += s
        return BAlgebra("blocks", total, tuple(w), tuple(sizes), mask, rho)
    raise ConfigError(f"unknown algebra kind {kind!r}")


def scalar_algebra() -> BAlgebra:
    """The algebra ``C`` (1x1 matrices)."""
    return make_algebra("diagonal", 1, [1.0])


def trace_b(algebra: BAlgebra, b) -> complex:
    b = np.asarray(b)
    if b.shape[-2:] != (algebra.dim, algebra.dim):
        raise AlgebraMismatch("element does not belong to this algebra")
    return np.einsum("...rr,r->...", b, algebra.rho)


def adjoint(b: np.ndarray) -> np.ndarray:
    return np.swapaxes(np.conj(b), -1, -2)


@dataclass(frozen=True, eq=False)
class CPMap:
    """A completely positive map ``b -> sum_i A_i^* b A_i`` in Kraus form."""

    algebra: BAlgebra
    kraus: np.ndarray = field(repr=False)  # (r, k, k)
    star_closed: bool = False

    def __call__(self, b: np.ndarray) -> np.ndarray:
        # b may carry leading batch axes
        out = None
        for a in self.kraus:
            term = adjoint(a) @ b @ a
            out = term if out is None else out + term
        return out

    @cached_property
    def diagonal_action(self) -> np.ndarray:
        """Matrix ``M`` with ``diag(eta(diag(v))) = M v``; only meaningful on diagonal algebras."""
        k = self.algebra.dim
        units = np.zeros((k, k, k), dtype=complex)
        units[np.arange(k), np.arange(k), np.arange(k)] = 1.0
        return np.diagonal(self(units), axis1=1, axis2=2).T.copy()

    @property
    def is_identity(self) -> bool:
        return bool(np.allclose(self(self.algebra.unit), self.algebra.unit)) and all(
            np.allclose(self(e), e) for e in self.algebra.basis()
        )


def _is_star_closed(kraus: np.ndarray, tol: float = 1e-12) -> bool:
    unused = list(range(len(kraus)))
    for a in kraus:
        target = adjoint(a)
        for pos, idx in enumerate(unused):
            if np.max(np.abs(kraus[idx] - target)) <= tol:
                del unused[pos]
                break
        else:
            return False
    return True


def make_cp_map(algebra: BAlgebra, kraus: Iterable, star_closed: bool = False) -> CPMap:
    ops = [algebra.element(a) for a in kraus]
    if not ops:
        raise ConfigError("a CP map needs at least one Kraus operator")
    arr = np.stack(ops)
    if star_closed and not _is_star_closed(arr):
        raise ConfigError("Kraus family is flagged star-closed but {A_i} != {A_i^*}")
    return CPMap(algebra, arr, star_closed)


def identity_map(algebra: BAlgebra) -> CPMap:
    return CPMap(algebra, algebra.unit[None].copy(), True)


def apply_cp(eta: CPMap, b) -> np.ndarray:
    b = np.asarray(b, dtype=complex)
    if b.shape[-2:] != (eta.algebra.dim, eta.algebra.dim):
        raise AlgebraMismatch("element does not belong to the algebra of this CP map")
    return eta(b)


def check_trace_symmetry(eta: CPMap, tol: float = 1e-12) -> bool:
    """True iff ``tau(eta(E_p) E_q) == tau(E_p eta(E_q))`` on all matrix-unit pairs."""
    alg = eta.algebra
    rows, cols = np.nonzero(alg.mask)
    basis = alg.basis()
    images = eta(basis)  # (s, k, k)
    rho = alg.rho
    # tau(X e_{ab}) = rho_b X_{ba};  tau(e_{ab} Y) = rho_a Y_{ba}
    lhs = rho[cols][None, :] * images[:, cols, rows]
    rhs = (rho[rows][:, None] * images[:, cols, rows].T)
    return bool(np.max(np.abs(lhs - rhs), initial=0.0) <= tol)


# ----------------------------------------------------------------------------
# random elements and trace-symmetric CP maps

def random_element(algebra: BAlgebra, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    k = algebra.dim
    z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    z *= scale / np.sqrt(2)
    z[~algebra.mask] = 0
    return z


def random_symmetric_cp(algebra: BAlgebra, rng: np.random.Generator, n_pairs: int = 2) -> CPMap:
    """Random CP map satisfying ``tau(eta(b1) b2) == tau(b1 eta(b2))`` by construction.

    Diagonal algebras get diagonal Kraus operators (symmetry then follows from
    commutativity).  Full, block and amplified algebras get a star-closed
    family ``{G_1, G_1^*, ..., G_r, G_r^*}`` whose members respect the structure;
    this is symmetric because every block carries a normalized trace.
    """
    if algebra.kind == "diagonal":
        ops = [np.diag(rng.standard_normal(algebra.dim) + 1j * rng.standard_normal(algebra.dim)) / np.sqrt(2 * n_pairs)
               for _ in range(n_pairs)]
        return make_cp_map(algebra, ops)
    if algebra.kind == "amplified":
        raise ConfigError("draw the base map and lift it with amplify() instead")
    ops = []
    for _ in range(n_pairs):
        g = random_element(algebra, rng, scale=1.0 / np.sqrt(2 * n_pairs))
        ops += [g, adjoint(g)]
    return make_cp_map(algebra, ops, star_closed=True)


# ----------------------------------------------------------------------------
# JSON helpers

def matrix_from_json(obj, dim: int | None = None) -> np.ndarray:
    """Decode a matrix written as nested rows of numbers or ``[re, im]`` pairs.

    A bare number stands for a ``1 x 1`` matrix.
    """
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        obj = [[obj]]
    try:
        rows = []
        for row in obj:
            out = []
            for entry in row:
                if isinstance(entry, (list, tuple)):
                    re, im = entry
                    out.append(complex(float(re), float(im)))
                else:
                    out.append(complex(float(entry)))
            rows.append(out)
        arr = np.array(rows, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot decode matrix {obj!r}: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or (dim is not None and arr.shape[0] != dim):
        raise ConfigError(f"expected a square {dim}x{dim} matrix, got shape {arr.shape}")
    return arr


def matrix_to_json(b: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(b)]


def algebra_from_json(obj: dict, normalize: bool = False) -> tuple[BAlgebra, list[CPMap]]:
    """Decode ``{"kind", "dim", "trace_weights", "block_sizes", "etas"}``.

    Returns the algebra and the (possibly empty) list of CP maps listed
    under ``"etas"``, each ``{"kraus": [matrix, ...], "star_closed": bool}``.
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError("algebra spec must be an object with a 'kind' field")
    alg = make_algebra(
        obj["kind"],
        obj.get("dim"),
        obj.get("trace_weights"),
        obj.get("block_sizes"),
        normalize=bool(obj.get("normalize", normalize)),
    )
    etas = []
    for e in obj.get("etas", []):
        if not isinstance(e, dict) or "kraus" not in e:
            raise ConfigError("each eta needs a 'kraus' list")
        mats = [matrix_from_json(m, alg.dim) for m in e["kraus"]]
        try:
            etas.append(make_cp_map(alg, mats, star_closed=bool(e.get("star_closed", False))))
        except StructureViolation as exc:
            raise ConfigError(str(exc)) from exc
    return alg, etas


def algebra_to_json(algebra: BAlgebra, etas: Sequence[CPMap] = ()) -> dict:
    out = {"kind": algebra.kind, "dim": algebra.dim, "trace_weights": list(algebra.trace_weights)}
    if algebra.block_sizes is not None:
        out["block_sizes"] = list(algebra.block_sizes)
    out["etas"] = [
        {"kraus": [matrix_to_json(a) for a in eta.kraus], "star_closed": eta.star_closed} for eta in etas
    ]
    return out
