"""Moments of an operator-valued semicircular element, computed two ways.

The Fock-space model applies the polynomial to the vacuum and reads off the
vacuum coefficient.  The combinatorial oracle sums the covariance over nested
non-crossing pairings.  Both should agree to rounding error.
"""
import numpy as np

from bsemicircular import (
    NCPoly,
    expect,
    expect_oracle,
    identity_map,
    make_algebra,
    make_cp_map,
    make_space,
    nc2_enumerate,
    scalar_algebra,
)

# Over the complex numbers with eta = id the even moments are Catalan numbers.
c = scalar_algebra()
eta = identity_map(c)
space = make_space(c, [eta], 10)
x = NCPoly.var(c, 1, 0)
power = NCPoly.const(c, 1)
print("scalar semicircle moments E[X^k]:")
for k in range(1, 11):
    power = power * x
    print(f"  k={k:2d}  {expect(space, power)[0, 0].real:6.1f}   pairings: {len(list(nc2_enumerate(k)))}")

# Over M_2 the moments are matrices.  A star-closed Kraus family gives a
# covariance that respects the adjoint.
m2 = make_algebra("full", dim=2)
a = np.array([[1.0, 1.0], [0.0, 1.0]]) / np.sqrt(2)
eta2 = make_cp_map(m2, [a, a.T], star_closed=True)
space2 = make_space(m2, [eta2], 6)
b = np.array([[1.0, 2.0], [0.0, 1.0]])
cmat = np.array([[0.0, 1.0], [1.0, 0.0]])
one = np.eye(2)
p = NCPoly.monomial(m2, 1, [0, 0, 0, 0], [one, b, cmat, one, one])
print("\nE[X b X c X X] over M_2")
print("  Fock  :", np.round(expect(space2, p).real, 12).tolist())
print("  oracle:", np.round(expect_oracle(p, [eta2]).real, 12).tolist())
