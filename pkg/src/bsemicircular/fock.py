"""Truncated algebraic full Fock space over ``B`` and the semicircular system on it.

A vector is stored per letter sequence ``(i_1, ..., i_m)`` as a stack of simple
tensors ``b_0 X_{i_1} b_1 ... X_{i_m} b_m`` of shape ``(n, m + 1, k, k)``.  One
:class:`FockVec` may carry several vectors at once (``count > 1``); every
stored simple tensor then records the index of the vector it belongs to in
``owners``.  Batching is what keeps the B-valued Gram matrices used by the
tau- and eta-inner products cheap: all of them reduce to :func:`gram`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .balgebra import BAlgebra, CPMap, adjoint, trace_b
from .errors import AlgebraMismatch, DepthExceeded, LetterOutOfRange, SpaceMismatch
from .ncpoly import BiTensor, NCPoly


@dataclass(frozen=True, eq=False)
class FockSpace:
    algebra: BAlgebra
    etas: tuple
    depth: int

    def __post_init__(self):
        object.__setattr__(self, "etas", tuple(self.etas))
        if not self.etas:
            raise ValueError("need at least one covariance map")
        if any(e.algebra is not self.algebra for e in self.etas):
            raise AlgebraMismatch("all covariance maps must act on the Fock space's algebra")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")

    @property
    def d(self) -> int:
        return len(self.etas)


def make_space(algebra: BAlgebra, etas: Sequence[CPMap], depth: int) -> FockSpace:
    return FockSpace(algebra, tuple(etas), int(depth))


@dataclass(frozen=True, eq=False)
class FockVec:
    space: FockSpace
    components: Mapping = field(repr=False)  # seq -> (n, m + 1, k, k)
    owners: Mapping = field(repr=False)  # seq -> (n,) int
    count: int = 1

    @property
    def max_length(self) -> int:
        return max((len(s) for s in self.components), default=0)

    def component(self, seq=()) -> np.ndarray:
        """Stored simple tensors at ``seq`` (all owners), shape ``(n, m + 1, k, k)``."""
        k = self.space.algebra.dim
        return self.components.get(tuple(seq), np.zeros((0, len(seq) + 1, k, k), dtype=complex))

    def __add__(self, other: "FockVec") -> "FockVec":
        _same_space(self, other)
        if other.count != self.count:
            raise ValueError("cannot add bundles of different sizes")
        comps = dict(self.components)
        owners = dict(self.owners)
        for seq, arr in other.components.items():
            if seq in comps:
                comps[seq] = np.concatenate([comps[seq], arr])
                owners[seq] = np.concatenate([owners[seq], other.owners[seq]])
            else:
                comps[seq] = arr
                owners[seq] = other.owners[seq]
        return FockVec(self.space, comps, owners, self.count)

    def scaled(self, c: complex) -> "FockVec":
        comps = {}
        for seq, arr in self.components.items():
            arr = arr.copy()
            arr[:, 0] *= c
            comps[seq] = arr
        return FockVec(self.space, comps, self.owners, self.count)

    def __sub__(self, other: "FockVec") -> "FockVec":
        return self + other.scaled(-1)


def _same_space(v: FockVec, w: FockVec) -> None:
    if v.space is not w.space:
        raise SpaceMismatch("vectors belong to different Fock spaces")


def vacuum(space: FockSpace) -> FockVec:
    one = space.algebra.unit[None, None]
    return FockVec(space, {(): one.copy()}, {(): np.zeros(1, dtype=int)}, 1)


def basis_vector(space: FockSpace, letters: Sequence[int], coeffs: Sequence) -> FockVec:
    """The vector ``b_0 X_{i_1} b_1 ... X_{i_m} b_m``."""
    letters = tuple(int(i) for i in letters)
    if len(letters) > space.depth:
        raise DepthExceeded(f"word of length {len(letters)} exceeds depth {space.depth}")
    arr = np.stack([space.algebra.element(c) for c in coeffs])[None]
    if arr.shape[1] != len(letters) + 1:
        raise ValueError("a word with m letters needs m + 1 coefficients")
    return FockVec(space, {letters: arr}, {letters: np.zeros(1, dtype=int)}, 1)


def _check_letter(space: FockSpace, j: int) -> None:
    if not 0 <= j < space.d:
        raise LetterOutOfRange(f"letter {j} out of range for d={space.d}")


def create(j: int, v: FockVec) -> FockVec:
    space = v.space
    _check_letter(space, j)
    one = space.algebra.unit
    comps, owners = {}, {}
    for seq, arr in v.components.items():
        if len(seq) + 1 > space.depth:
            raise DepthExceeded(f"creation on a word of length {len(seq)} exceeds depth {space.depth}")
        head = np.broadcast_to(one, (arr.shape[0], 1) + one.shape)
        comps[(j,) + seq] = np.concatenate([head, arr], axis=1)
        owners[(j,) + seq] = v.owners[seq]
    return FockVec(space, comps, owners, v.count)


def annihilate(j: int, v: FockVec) -> FockVec:
    space = v.space
    _check_letter(space, j)
    eta = space.etas[j]
    comps, owners = {}, {}
    for seq, arr in v.components.items():
        if not seq or seq[0] != j:
            continue
        head = eta(arr[:, 0]) @ arr[:, 1]
        comps[seq[1:]] = np.concatenate([head[:, None], arr[:, 2:]], axis=1)
        owners[seq[1:]] = v.owners[seq]
    return FockVec(space, comps, owners, v.count)


def mult_b(b, v: FockVec) -> FockVec:
    """Left multiplication by ``b``; ``b`` may also be one matrix per owner ``(count, k, k)``."""
    b = np.asarray(b, dtype=complex)
    comps = {}
    for seq, arr in v.components.items():
        arr = arr.copy()
        arr[:, 0] = (b[v.owners[seq]] if b.ndim == 3 else b) @ arr[:, 0]
        comps[seq] = arr
    return FockVec(v.space, comps, v.owners, v.count)


def apply_s(j: int, v: FockVec) -> FockVec:
    """``S_j = l_j + l_j^*``."""
    return create(j, v) + annihilate(j, v)


def _relabel(v: FockVec, mapping: np.ndarray, count: int) -> FockVec:
    return FockVec(v.space, v.components, {s: mapping[o] for s, o in v.owners.items()}, count)


def _tile(v: FockVec, times: int) -> FockVec:
    """``times`` copies of a single vector, copy ``t`` owned by ``t``."""
    comps, owners = {}, {}
    for seq, arr in v.components.items():
        n = arr.shape[0]
        comps[seq] = np.tile(arr, (times, 1, 1, 1))
        owners[seq] = np.repeat(np.arange(times), n)
    return FockVec(v.space, comps, owners, times)


def _empty(space: FockSpace, count: int) -> FockVec:
    return FockVec(space, {}, {}, count)


def apply_polys(space: FockSpace, polys: Sequence[NCPoly], v: FockVec | None = None) -> FockVec:
    """Bundle whose vector ``t`` is ``polys[t](S) v``."""
    if v is None:
        v = vacuum(space)
    if v.space is not space:
        raise SpaceMismatch("vector belongs to a different Fock space")
    if v.count != 1:
        raise ValueError("apply_polys expects a single starting vector")
    groups: dict = {}
    for t, p in enumerate(polys):
        if p.algebra is not space.algebra:
            raise AlgebraMismatch("polynomial and Fock space use different algebras")
        if p.d > space.d:
            raise LetterOutOfRange(f"polynomial in {p.d} variables on a space with d={space.d}")
        if p.degree + v.max_length > space.depth:
            raise DepthExceeded(f"degree {p.degree} on a vector of length {v.max_length} exceeds depth {space.depth}")
        for w in p.terms:
            groups.setdefault(w.letters, ([], []))
            groups[w.letters][0].append(w.coeffs)
            groups[w.letters][1].append(t)
    out = _empty(space, len(polys))
    for letters, (coeffs, targets) in groups.items():
        stack = np.stack(coeffs)  # (g, m + 1, k, k)
        cur = mult_b(stack[:, -1], _tile(v, stack.shape[0]))
        for pos in range(len(letters) - 1, -1, -1):
            cur = mult_b(stack[:, pos], apply_s(letters[pos], cur))
        out = out + _relabel(cur, np.asarray(targets), len(polys))
    return out


def apply_poly(p: NCPoly, v: FockVec) -> FockVec:
    return apply_polys(v.space, [p], v)


def gram(x: FockVec, y: FockVec, middle: np.ndarray | None = None) -> np.ndarray:
    """B-valued Gram matrix ``G[p, q] = <x_p, middle[p, q] y_q>_F``.

    ``<b_0 X_{i_1} ... b_m, c_0 X_{i_1} ... c_m>_F``
    ``= b_m^* eta_{i_m}( ... eta_{i_1}(b_0^* c_0) c_1 ...) c_m``.
    """
    _same_space(x, y)
    space = x.space
    if space.algebra.kind == "diagonal":
        return _gram_diagonal(x, y, middle)
    k = space.algebra.dim
    out = np.zeros((x.count, y.count, k, k), dtype=complex)
    for seq, xa in x.components.items():
        ya = y.components.get(seq)
        if ya is None or not len(xa) or not len(ya):
            continue
        ox, oy = x.owners[seq], y.owners[seq]
        xh = adjoint(xa)
        if middle is None:
            m = xh[:, None, 0] @ ya[None, :, 0]
        else:
            m = xh[:, None, 0] @ middle[ox[:, None], oy[None, :]] @ ya[None, :, 0]
        for pos, letter in enumerate(seq):
            m = xh[:, None, pos + 1] @ space.etas[letter](m) @ ya[None, :, pos + 1]
        np.add.at(out, (ox[:, None], oy[None, :]), m)
    return out


def _gram_diagonal(x: FockVec, y: FockVec, middle: np.ndarray | None) -> np.ndarray:
    """:func:`gram` for commutative diagonal algebras, working on diagonals only."""
    space = x.space
    k = space.algebra.dim
    acts = [e.diagonal_action.T for e in space.etas]
    out = np.zeros((x.count, y.count, k), dtype=complex)
    mid = None if middle is None else np.diagonal(middle, axis1=2, axis2=3)
    for seq, xa in x.components.items():
        ya = y.components.get(seq)
        if ya is None or not len(xa) or not len(ya):
            continue
        ox, oy = x.owners[seq], y.owners[seq]
        xd = np.diagonal(xa, axis1=2, axis2=3).conj()  # (n, m + 1, k)
        yd = np.diagonal(ya, axis1=2, axis2=3)
        m = xd[:, None, 0] * yd[None, :, 0]
        if mid is not None:
            m = m * mid[ox[:, None], oy[None, :]]
        for pos, letter in enumerate(seq):
            m = xd[:, None, pos + 1] * (m @ acts[letter]) * yd[None, :, pos + 1]
        np.add.at(out, (ox[:, None], oy[None, :]), m)
    full = np.zeros((x.count, y.count, k, k), dtype=complex)
    full[..., np.arange(k), np.arange(k)] = out
    return full


def fock_inner(v: FockVec, w: FockVec) -> np.ndarray:
    """B-valued inner product, conjugate-linear in ``v``."""
    if v.count != 1 or w.count != 1:
        raise ValueError("fock_inner takes single vectors; use gram for bundles")
    return gram(v, w)[0, 0]


def expect_many(space: FockSpace, polys: Sequence[NCPoly]) -> np.ndarray:
    """``E[p(S)] = <1, p(S) 1>_F`` for each polynomial, shape ``(len(polys), k, k)``."""
    k = space.algebra.dim
    bundle = apply_polys(space, polys)
    out = np.zeros((len(polys), k, k), dtype=complex)
    if () in bundle.components:
        np.add.at(out, bundle.owners[()], bundle.components[()][:, 0])
    return out


def expect(space: FockSpace, p: NCPoly) -> np.ndarray:
    return expect_many(space, [p])[0]


def gram_tau(space: FockSpace, ps: Sequence[NCPoly], qs: Sequence[NCPoly]) -> np.ndarray:
    """Scalar Gram matrix ``tau(p_i(S)^* q_j(S))``."""
    g = gram(apply_polys(space, ps), apply_polys(space, qs))
    return trace_b(space.algebra, g)


def inner_tau(space: FockSpace, p: NCPoly, q: NCPoly) -> complex:
    """``<p(S), q(S)>_tau = tau(p(S)^* q(S))`` with ``tau = tau_B o E``."""
    return complex(gram_tau(space, [p], [q])[0, 0])


def inner_eta(space: FockSpace, j: int, t1: BiTensor, t2: BiTensor) -> complex:
    """``<a1 (x) a2, a3 (x) a4>_eta_j = tau(a2^* eta_j(E[a1^* a3]) a4)``, extended sesquilinearly."""
    _check_letter(space, j)
    if not t1.pairs or not t2.pairs:
        return 0j
    left = gram(apply_polys(space, t1.left_legs()), apply_polys(space, t2.left_legs()))
    mid = space.etas[j](left)
    right = gram(apply_polys(space, t1.right_legs()), apply_polys(space, t2.right_legs()), middle=mid)
    return complex(trace_b(space.algebra, right).sum())


def inner_tau_tau(space: FockSpace, t1: BiTensor, t2: BiTensor) -> complex:
    """``<a1 (x) a2, a3 (x) a4>_{tau (x) tau} = tau(a1^* a3) tau(a2^* a4)``."""
    if not t1.pairs or not t2.pairs:
        return 0j
    left = gram_tau(space, t1.left_legs(), t2.left_legs())
    right = gram_tau(space, t1.right_legs(), t2.right_legs())
    return complex((left * right).sum())


def vector_residual(v: FockVec) -> float:
    """Max-abs of the dense form of a single vector; zero iff ``v`` is the zero tensor."""
    from .ncpoly import _chain_dense

    mask = v.space.algebra.mask
    return max((float(np.max(np.abs(_chain_dense(arr, mask)))) for arr in v.components.values() if len(arr)),
               default=0.0)
