import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bsemicircular import (
    BiTensor,
    ChebSpec,
    NCPoly,
    check_product_rule,
    cheb,
    divergence,
    ibp_residual,
    is_zero,
    pairing_term,
    make_algebra,
    make_cp_map,
    make_space,
    number_op,
    poincare_report,
    product_poly,
    random_element,
    random_symmetric_cp,
    stein_residual,
    trace_b,
)
from bsemicircular.errors import DepthExceeded, TraceSymmetryRequired
from bsemicircular.ncpoly import random_poly, residual
from bsemicircular.verify import random_product, random_spec


def c(alg, b, d=2):
    return NCPoly.const(alg, d, b)


def test_divergence_examples(setting, rng):
    alg, etas, sp = setting
    unit = BiTensor.unit(alg, 2)
    x0 = NCPoly.var(alg, 2, 0)
    assert is_zero(divergence(sp, 0, unit) - x0)
    b, cc = random_element(alg, rng), random_element(alg, rng)
    assert is_zero(divergence(sp, 1, BiTensor.simple(c(alg, b), c(alg, cc))) - NCPoly.monomial(alg, 2, [1], [b, cc]))
    got = divergence(sp, 0, BiTensor.simple(x0, c(alg, alg.unit)))
    assert is_zero(got - (x0 * x0 - c(alg, etas[0](alg.unit))))


def test_divergence_oracle_path_agrees(setting, rng):
    alg, etas, sp = setting
    for _ in range(10):
        t = BiTensor.simple(random_poly(alg, 2, 3, rng), random_poly(alg, 2, 3, rng))
        assert residual(divergence(sp, 0, t) - divergence(sp, 0, t, oracle=True)) <= 1e-10


def test_pairing_examples(setting, rng):
    alg, etas, sp = setting
    unit = BiTensor.unit(alg, 2)
    assert is_zero(pairing_term(sp, 0, unit, unit) - c(alg, etas[0](alg.unit)))
    b = [random_element(alg, rng) for _ in range(4)]
    got = pairing_term(sp, 1, BiTensor.simple(c(alg, b[0]), c(alg, b[1])), BiTensor.simple(c(alg, b[2]), c(alg, b[3])))
    assert is_zero(got - c(alg, b[0] @ etas[1](b[1] @ b[2]) @ b[3]))
    x = NCPoly.var(alg, 2, 0)
    one = c(alg, alg.unit)
    got = pairing_term(sp, 0, BiTensor.simple(one, x), BiTensor.simple(x, one))
    assert is_zero(got - c(alg, etas[0](etas[0](alg.unit))))


def test_product_rules(setting, rng):
    alg, etas, sp = setting
    unit = BiTensor.unit(alg, 2)
    assert check_product_rule(sp, 0, c(alg, random_element(alg, rng)), unit) == (0.0, 0.0)
    assert max(check_product_rule(sp, 0, NCPoly.var(alg, 2, 0), unit)) <= 1e-14
    for _ in range(30):
        a = random_poly(alg, 2, 3, rng)
        t = BiTensor.simple(random_poly(alg, 2, 2, rng), random_poly(alg, 2, 2, rng))
        left, right = check_product_rule(sp, int(rng.integers(0, 2)), a, t)
        assert left <= 1e-10 and right <= 1e-10


def test_number_operator_on_single_family(setting, rng):
    alg, etas, sp = setting
    for n in range(1, 5):
        for j in range(2):
            u = cheb(random_spec(alg, j, n, rng), etas)
            assert residual(number_op(sp, j, u) - n * u) <= 1e-10
            assert residual(number_op(sp, 1 - j, u)) == 0.0
    assert not number_op(sp, 0, c(alg, random_element(alg, rng))).terms


def test_number_operator_on_products(setting, rng):
    alg, etas, sp = setting
    for _ in range(20):
        prod = random_product(alg, 2, int(rng.integers(1, 6)), rng)
        p = product_poly(prod, etas)
        for j in range(2):
            eig = sum(f.n for f in prod.factors if f.letter == j)
            assert residual(number_op(sp, j, p) - eig * p) <= 1e-10


def test_stein_examples(setting, rng):
    alg, etas, sp = setting
    assert stein_residual(sp, 0, c(alg, random_element(alg, rng))) == (0, 0)
    b, bp = random_element(alg, rng), random_element(alg, rng)
    lhs, rhs = stein_residual(sp, 0, NCPoly.monomial(alg, 2, [0], [b, bp]))
    expected = trace_b(alg, etas[0](b) @ bp)
    assert lhs == pytest.approx(expected) and rhs == pytest.approx(expected)
    prod = random_product(alg, 2, 3, rng)
    lhs, rhs = stein_residual(sp, 0, product_poly(prod, etas))
    assert abs(lhs) <= 1e-10 and abs(rhs) <= 1e-10


@given(st.integers(0, 2 ** 32 - 1))
def test_stein_random(seed):
    rng = np.random.default_rng(seed)
    alg = make_algebra("full", dim=2)
    etas = [random_symmetric_cp(alg, rng) for _ in range(2)]
    sp = make_space(alg, etas, 5)
    lhs, rhs = stein_residual(sp, int(rng.integers(0, 2)), random_poly(alg, 2, 4, rng))
    assert abs(lhs - rhs) <= 1e-10


def test_ibp(setting, rng):
    alg, etas, _ = setting
    sp = make_space(alg, etas, 8)
    xi = random_poly(alg, 2, 3, rng)
    for j in range(2):
        lhs, rhs = ibp_residual(sp, j, BiTensor.unit(alg, 2), xi)
        assert (lhs, rhs) == pytest.approx(stein_residual(sp, j, xi), abs=1e-10)
    b, cc, e = (random_element(alg, rng) for _ in range(3))
    lhs, rhs = ibp_residual(sp, 0, BiTensor.simple(c(alg, b), c(alg, cc)), c(alg, e))
    assert abs(lhs - rhs) <= 1e-10
    for _ in range(30):
        t = BiTensor.simple(random_poly(alg, 2, 3, rng), random_poly(alg, 2, 3, rng))
        lhs, rhs = ibp_residual(sp, int(rng.integers(0, 2)), t, random_poly(alg, 2, 3, rng))
        assert abs(lhs - rhs) <= 1e-9


def test_ibp_requires_symmetry():
    alg = make_algebra("full", dim=2)
    eta = make_cp_map(alg, [np.array([[0, 1], [0, 0]])])
    sp = make_space(alg, [eta], 4)
    with pytest.raises(TraceSymmetryRequired):
        ibp_residual(sp, 0, BiTensor.unit(alg, 1), NCPoly.var(alg, 1, 0))


def test_depth_errors(setting):
    alg, etas, _ = setting
    sp = make_space(alg, etas, 2)
    p = NCPoly.monomial(alg, 2, [0, 0, 0], [alg.unit] * 4)
    with pytest.raises(DepthExceeded):
        stein_residual(sp, 0, p)


def test_poincare_examples(setting, rng):
    alg, etas, sp = setting
    rep = poincare_report(sp, c(alg, random_element(alg, rng)))
    assert rep.lhs_sq == pytest.approx(0, abs=1e-14) and rep.rhs_sq_by_letter == (0.0, 0.0)
    u1 = cheb(ChebSpec(1, [(random_element(alg, rng), random_element(alg, rng))]), etas)
    assert poincare_report(sp, u1).gap == pytest.approx(0, abs=1e-10)
    for _ in range(10):
        prod = random_product(alg, 2, int(rng.integers(1, 5)), rng, scale=0.8)
        rep = poincare_report(sp, product_poly(prod, etas))
        assert sum(rep.rhs_sq_by_letter) == pytest.approx(prod.total_degree * rep.lhs_sq, rel=1e-10, abs=1e-9)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3))
def test_poincare_gap_nonnegative(seed, d):
    rng = np.random.default_rng(seed)
    alg = make_algebra("diagonal", trace_weights=[0.5, 0.25, 0.25])
    etas = [random_symmetric_cp(alg, rng) for _ in range(d)]
    sp = make_space(alg, etas, 4)
    assert poincare_report(sp, random_poly(alg, d, 4, rng)).gap >= -1e-9
