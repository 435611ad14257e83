import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bsemicircular import (
    BiTensor,
    ChebExpansion,
    ChebProduct,
    ChebSpec,
    NCPoly,
    apply_poly,
    cheb,
    cheb_decompose,
    cheb_decompose_single,
    cheb_fdq,
    expect,
    fdq,
    is_zero,
    make_texpr,
    product_poly,
    random_element,
    vacuum,
)
from bsemicircular.errors import DuplicateSignature, EmptyPairs, MixedLetters
from bsemicircular.fock import basis_vector, gram, vector_residual
from bsemicircular.ncpoly import graded_components, random_poly, residual, residual_tensor
from bsemicircular.verify import monomial_of_product, random_product, random_spec


def coeffs_of(p):
    """Coefficients of a polynomial over C in one variable, lowest degree first."""
    out = np.zeros(p.degree + 1, dtype=complex)
    for w in p.terms:
        out[w.degree] += np.prod(w.coeffs[:, 0, 0])
    return out


def test_u1_and_u2(setting, rng):
    alg, etas, _ = setting
    b = [random_element(alg, rng) for _ in range(4)]
    assert is_zero(cheb(ChebSpec(0, [(b[0], b[1])]), etas) - NCPoly.monomial(alg, 2, [0], [b[0], b[1]]))
    u2 = cheb(ChebSpec(1, [(b[0], b[1]), (b[2], b[3])]), etas)
    expected = NCPoly.monomial(alg, 2, [1, 1], [b[0], b[1] @ b[2], b[3]]) - NCPoly.const(
        alg, 2, b[0] @ etas[1](b[1] @ b[2]) @ b[3])
    assert is_zero(u2 - expected)


def test_classical_chebyshev_over_c(scalar_setting):
    alg, etas, _ = scalar_setting
    one = np.eye(1)
    u = [cheb(ChebSpec(0, [(one, one)] * n), etas) for n in range(1, 6)]
    np.testing.assert_allclose(coeffs_of(u[2]), [0, -2, 0, 1])
    np.testing.assert_allclose(coeffs_of(u[3]), [1, 0, -3, 0, 1])
    np.testing.assert_allclose(coeffs_of(u[4]), [0, 3, 0, -4, 0, 1])


def test_empty_pairs():
    with pytest.raises(EmptyPairs):
        ChebSpec(0, [])
    with pytest.raises(EmptyPairs):
        ChebProduct([])


def test_products_must_alternate(setting, rng):
    alg, _, _ = setting
    s = random_spec(alg, 0, 1, rng)
    with pytest.raises(MixedLetters):
        ChebProduct([s, s])


def test_recursion_consistency(setting, rng):
    alg, etas, _ = setting
    for n in range(2, 7):
        spec = random_spec(alg, 0, n, rng, scale=0.7)
        (b1, c1), (b2, c2) = spec.pairs[:2]
        rest1 = ChebSpec(0, spec.pairs[1:])
        head = NCPoly.monomial(alg, 2, [0], [b1, c1])
        corr = b1 @ etas[0](c1 @ b2) @ c2
        tail2 = cheb(ChebSpec(0, spec.pairs[2:]), etas) if n > 2 else NCPoly.const(alg, 2)
        rhs = head * cheb(rest1, etas) - tail2.lmul(corr)
        assert residual(cheb(spec, etas) - rhs) <= 1e-12


def test_leading_word(setting, rng):
    alg, etas, _ = setting
    spec = random_spec(alg, 1, 4, rng)
    u = cheb(spec, etas)
    assert u.degree == 4
    top = NCPoly(alg, 2, [w for w in u.terms if w.degree == 4])
    letters, coeffs = monomial_of_product(ChebProduct([spec]))
    assert is_zero(top - NCPoly.monomial(alg, 2, letters, coeffs))


def test_closed_fdq_small_cases(setting, rng):
    alg, etas, _ = setting
    b = [random_element(alg, rng) for _ in range(4)]
    c = lambda x: NCPoly.const(alg, 2, x)  # noqa: E731
    assert is_zero_tensor_close(cheb_fdq(ChebSpec(0, [(b[0], b[1])]), etas), BiTensor.simple(c(b[0]), c(b[1])))
    spec = ChebSpec(0, [(b[0], b[1]), (b[2], b[3])])
    expected = BiTensor.simple(c(b[0]), cheb(ChebSpec(0, [(b[1] @ b[2], b[3])]), etas)) + BiTensor.simple(
        cheb(ChebSpec(0, [(b[0], b[1] @ b[2])]), etas), c(b[3]))
    assert is_zero_tensor_close(cheb_fdq(spec, etas), expected)


def is_zero_tensor_close(t1, t2):
    return residual_tensor(t1 - t2) <= 1e-12


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5), st.integers(0, 1))
def test_closed_fdq_matches_generic(seed, n, j):
    from bsemicircular import make_algebra, random_symmetric_cp

    rng = np.random.default_rng(seed)
    alg = make_algebra("full", dim=2)
    etas = [random_symmetric_cp(alg, rng) for _ in range(2)]
    spec = random_spec(alg, j, n, rng, scale=0.7)
    assert residual_tensor(cheb_fdq(spec, etas) - fdq(cheb(spec, etas), j)) <= 1e-12


def test_single_variable_decomposition_examples(setting, rng):
    alg, etas, _ = setting
    b = [random_element(alg, rng) for _ in range(4)]
    scalar, specs = cheb_decompose_single(NCPoly.monomial(alg, 2, [0], [b[0], b[1]]), 0, etas)
    assert not np.any(scalar) and len(specs) == 1 and specs[0].n == 1
    p = NCPoly.monomial(alg, 2, [0], [b[0], b[1]]) * NCPoly.monomial(alg, 2, [0], [b[2], b[3]])
    scalar, specs = cheb_decompose_single(p, 0, etas)
    np.testing.assert_allclose(scalar, b[0] @ etas[0](b[1] @ b[2]) @ b[3], atol=1e-12)
    assert [s.n for s in specs] == [2]
    assert is_zero(cheb(specs[0], etas) - cheb(ChebSpec(0, [(b[0], b[1]), (b[2], b[3])]), etas))
    with pytest.raises(MixedLetters):
        cheb_decompose_single(NCPoly.var(alg, 2, 1), 0, etas)


def test_cube_is_u3_plus_two_u1(scalar_setting):
    alg, etas, _ = scalar_setting
    x = NCPoly.var(alg, 1, 0)
    scalar, specs = cheb_decompose_single(x * x * x, 0, etas)
    assert not np.any(scalar)
    by_degree = {}
    for s in specs:
        by_degree[s.n] = by_degree.get(s.n, 0) + np.prod([b[0, 0] * c[0, 0] for b, c in s.pairs])
    assert by_degree == {3: 1, 1: 2}


def test_multi_letter_examples(setting, rng):
    alg, etas, _ = setting
    b = [random_element(alg, rng) for _ in range(4)]
    p = NCPoly.monomial(alg, 2, [0, 1], [b[0], b[1] @ b[2], b[3]])
    ex = cheb_decompose(p, etas)
    assert [pr.signature for pr in ex.products] == [(2, 2, (1, 1), (0, 1))]
    assert residual(ex.poly(etas) - p) <= 1e-12
    q = NCPoly.monomial(alg, 2, [0, 0, 1], b)
    ex = cheb_decompose(q, etas)
    sigs = sorted(pr.signature for pr in ex.products)
    assert sigs == [(1, 1, (1,), (1,)), (3, 2, (2, 1), (0, 1))]
    assert residual(ex.poly(etas) - q) <= 1e-12


def test_collapsed_middle_run_is_remerged(setting, rng):
    alg, etas, _ = setting
    # X0 X1 X1 X0: the middle U_2 correction leaves X0 (scalar) X0 which must merge into one run
    p = NCPoly.monomial(alg, 2, [0, 1, 1, 0], [random_element(alg, rng) for _ in range(5)])
    ex = cheb_decompose(p, etas)
    assert residual(ex.poly(etas) - p) <= 1e-11
    for pr in ex.products:
        assert all(a.letter != b.letter for a, b in zip(pr.factors, pr.factors[1:]))
    assert {pr.signature for pr in ex.products} == {(4, 3, (1, 2, 1), (0, 1, 0)), (2, 1, (2,), (0,))}


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3))
def test_decomposition_round_trip(seed, d):
    from bsemicircular import make_algebra, random_symmetric_cp

    rng = np.random.default_rng(seed)
    alg = make_algebra("diagonal", trace_weights=[0.6, 0.4])
    etas = [random_symmetric_cp(alg, rng) for _ in range(d)]
    p = random_poly(alg, d, 5, rng)
    assert residual(cheb_decompose(p, etas).poly(etas) - p) <= 1e-10 * max(1.0, residual(p))


def test_direct_sum_uniqueness(setting, rng):
    alg, etas, _ = setting
    one_var = [etas[0]]
    p = NCPoly(alg, 1, [w for w in random_poly(alg, 1, 5, rng, n_words=4).terms])

    def graded(poly):
        scalar, specs = cheb_decompose_single(poly, 0, one_var)
        parts = {0: NCPoly.const(alg, 1, scalar)}
        for s in specs:
            parts[s.n] = parts.get(s.n, NCPoly.zero(alg, 1)) + cheb(s, one_var)
        return parts

    first = graded(p)
    recon = sum(first.values(), NCPoly.zero(alg, 1))
    assert residual(recon - p) <= 1e-10
    second = graded(recon)
    for n in set(first) | set(second):
        a = first.get(n, NCPoly.zero(alg, 1))
        b = second.get(n, NCPoly.zero(alg, 1))
        assert residual(a - b) <= 1e-10


def test_vacuum_monomial_property(setting, rng):
    alg, etas, sp = setting
    for total in range(1, 6):
        prod = random_product(alg, 2, total, rng)
        letters, coeffs = monomial_of_product(prod)
        v = apply_poly(product_poly(prod, etas), vacuum(sp))
        assert vector_residual(v - basis_vector(sp, letters, coeffs)) <= 1e-10


def test_orthogonality_and_centering(setting, rng):
    alg, etas, sp = setting
    checked = 0
    while checked < 30:
        a = random_product(alg, 2, int(rng.integers(1, 6)), rng)
        b = random_product(alg, 2, int(rng.integers(1, 6)), rng)
        va = apply_poly(product_poly(a, etas), vacuum(sp))
        assert np.abs(expect(sp, product_poly(a, etas))).max() <= 1e-10
        if a.signature[2:] == b.signature[2:]:
            continue
        vb = apply_poly(product_poly(b, etas), vacuum(sp))
        assert np.abs(gram(va, vb)).max() <= 1e-10
        checked += 1


def test_texpr_constraints(setting, rng):
    alg, etas, _ = setting
    assert make_texpr(alg.unit, []).products == ()
    u = [ChebProduct([random_spec(alg, 0, n, rng)]) for n in range(1, 4)]
    t = make_texpr(alg.zero, u)
    assert set(t.signatures) == {(n, 1, (n,), (0,)) for n in range(1, 4)}
    assert is_zero(t.poly(etas) - ChebExpansion(alg.zero, u).poly(etas))
    twins = [ChebProduct([random_spec(alg, 1, 1, rng)]) for _ in range(2)]
    with pytest.raises(DuplicateSignature):
        make_texpr(alg.zero, twins)


def test_partial_balancedness(setting, rng):
    alg, etas, _ = setting
    spec = random_spec(alg, 0, 3, rng)
    a = random_element(alg, rng)
    assert is_zero(cheb(spec.lmul(a), etas) - cheb(spec, etas).lmul(a))
    assert is_zero(cheb(spec.rmul(a), etas) - cheb(spec, etas).rmul(a))


def test_graded_pieces_of_u_n(setting, rng):
    alg, etas, _ = setting
    u = cheb(random_spec(alg, 0, 4, rng), etas)
    assert set(graded_components(u)) == {0, 2, 4}
