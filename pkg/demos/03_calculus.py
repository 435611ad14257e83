"""Free difference quotients, their adjoints, and the Poincaré inequality.

With a trace-symmetric covariance the adjoint of the difference quotient has
an explicit formula.  The number operator (adjoint composed with quotient)
counts the degree of each letter in a Chebyshev product, and the Poincaré
inequality is an equality on single products of total degree one.
"""
import numpy as np

from bsemicircular import (
    BiTensor,
    NCPoly,
    divergence,
    make_algebra,
    make_space,
    number_op,
    poincare_report,
    product_poly,
    random_symmetric_cp,
    stein_residual,
)
from bsemicircular.ncpoly import random_poly, residual
from bsemicircular.verify import random_product

rng = np.random.default_rng(11)
alg = make_algebra("blocks", block_sizes=[1, 2], trace_weights=[0.4, 0.6])
etas = [random_symmetric_cp(alg, rng) for _ in range(2)]
space = make_space(alg, etas, 8)

x0 = NCPoly.var(alg, 2, 0)
print("adjoint of 1 (x) 1 is X_0:", residual(divergence(space, 0, BiTensor.unit(alg, 2)) - x0) == 0)

p = random_poly(alg, 2, 4, rng) + x0 * random_poly(alg, 2, 2, rng)
lhs, rhs = stein_residual(space, 0, p)
print(f"Stein: <S, p> = {lhs.real:.6f}{lhs.imag:+.6f}i   <1 (x) 1, d p> = {rhs.real:.6f}{rhs.imag:+.6f}i")

prod = random_product(alg, 2, 4, rng)
q = product_poly(prod, etas)
for j in range(2):
    n_j = sum(f.n for f in prod.factors if f.letter == j)
    print(f"number operator on letter {j}: eigenvalue {n_j}, residual {residual(number_op(space, j, q) - n_j * q):.1e}")

print("\nPoincaré gaps (should be >= 0):")
for _ in range(5):
    rep = poincare_report(space, random_poly(alg, 2, 4, rng))
    print(f"  lhs {rep.lhs_sq:10.4f}   rhs {sum(rep.rhs_sq_by_letter):10.4f}   gap {rep.gap:10.4f}")
rep = poincare_report(space, q)
print(f"product of total degree {prod.total_degree}: rhs / lhs = {sum(rep.rhs_sq_by_letter) / rep.lhs_sq:.12f}")
