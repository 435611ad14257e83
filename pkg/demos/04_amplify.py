"""Realizing a polynomial as a corner of a Chebyshev expression over M_N(B).

Chebyshev products sharing a signature are stacked block-diagonally in M_N(B)
and compressed with a row and a column of units.  The result has one product
per signature, its (0, 0) corner reproduces the original polynomial after
evaluation at X (x) I_N, and the squared difference-quotient norms shrink by
exactly 1/N because of the normalized matrix trace.
"""
import numpy as np

from bsemicircular import NCPoly, embed_corner, make_algebra, random_element, random_symmetric_cp

rng = np.random.default_rng(3)
alg = make_algebra("full", dim=2)
etas = [random_symmetric_cp(alg, rng)]

b = [random_element(alg, rng) for _ in range(6)]
p = (NCPoly.monomial(alg, 1, [0], b[0:2]) + NCPoly.monomial(alg, 1, [0], b[2:4])
     + NCPoly.monomial(alg, 1, [0], b[4:6]))
emb = embed_corner(p, etas)
print("three U_1 terms of one signature need N =", emb.N)
print("witness signatures:", list(emb.texpr.signatures))
print("corner residual:", emb.residual)
print("norm ratio:", emb.norm_ratio_by_letter[0], "expected", 1 / emb.N)
