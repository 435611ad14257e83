"""Operator-valued Chebyshev polynomials and the decomposition of a polynomial into them.

U_n is built from n coefficient pairs by the three-term recursion.  Applied
to the vacuum, an alternating product of such polynomials produces exactly
one tensor, and products with different letter patterns are orthogonal.
"""
import numpy as np

from bsemicircular import (
    ChebProduct,
    NCPoly,
    apply_poly,
    cheb,
    cheb_decompose,
    make_algebra,
    make_space,
    product_poly,
    random_element,
    random_symmetric_cp,
    vacuum,
)
from bsemicircular.fock import gram
from bsemicircular.ncpoly import residual
from bsemicircular.verify import random_spec

rng = np.random.default_rng(7)
alg = make_algebra("full", dim=2)
etas = [random_symmetric_cp(alg, rng) for _ in range(2)]
space = make_space(alg, etas, 6)

u3 = cheb(random_spec(alg, 0, 3, rng), etas)
print("U_3 has words of degree", sorted({w.degree for w in u3.terms}))

prod = ChebProduct([random_spec(alg, 0, 2, rng), random_spec(alg, 1, 1, rng)])
vec = apply_poly(product_poly(prod, etas), vacuum(space))
print("U_2(X_0) U_1(X_1) applied to the vacuum lives in", sorted(vec.components))

other = ChebProduct([random_spec(alg, 1, 1, rng), random_spec(alg, 0, 2, rng)])
w = apply_poly(product_poly(other, etas), vacuum(space))
print("inner product with U_1(X_1) U_2(X_0):", float(np.abs(gram(vec, w)).max()))

b = [random_element(alg, rng) for _ in range(5)]
p = NCPoly.monomial(alg, 2, [0, 1, 1, 0], b)
expansion = cheb_decompose(p, etas)
print("\ndecomposition of b0 X0 b1 X1 b2 X1 b3 X0 b4:")
for prod in expansion.products:
    print("  signature", prod.signature)
print("reconstruction residual:", residual(expansion.poly(etas) - p))
