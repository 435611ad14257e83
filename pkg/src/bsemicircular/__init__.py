"""Operator-valued semicircular systems on a truncated full Fock space.

Coefficient algebras are finite-dimensional ``*``-algebras of complex matrices,
covariances are completely positive maps in Kraus form, and polynomials are
finite sums of coefficient chains ``b_0 X_{i_1} b_1 ... X_{i_m} b_m``.
"""
from .amplify import AmplifiedContext, CornerEmbedding, amplified_cheb_block, amplify, embed_corner
from .balgebra import (
    BAlgebra,
    CPMap,
    apply_cp,
    check_trace_symmetry,
    identity_map,
    make_algebra,
    make_cp_map,
    random_element,
    random_symmetric_cp,
    scalar_algebra,
    trace_b,
)
from .calculus import (
    PoincareReport,
    check_product_rule,
    divergence,
    ibp_residual,
    pairing_term,
    number_op,
    poincare_report,
    stein_residual,
)
from .chebyshev import (
    ChebExpansion,
    ChebProduct,
    ChebSpec,
    TExpr,
    cheb,
    cheb_decompose,
    cheb_decompose_single,
    cheb_fdq,
    make_texpr,
    product_poly,
)
from .counterexample import CESpace, build_ce_space, ce_poly, ce_table, commutation_residual, conjugate_kernel_check
from .errors import *  # noqa: F401,F403
from .fock import (
    FockSpace,
    FockVec,
    annihilate,
    apply_poly,
    create,
    expect,
    fock_inner,
    inner_eta,
    inner_tau,
    inner_tau_tau,
    make_space,
    vacuum,
)
from .moments import PairPartition, eta_pi, expect_oracle, moment, nc2_enumerate
from .ncpoly import BiTensor, NCPoly, Word, canonical, fdq, is_zero, is_zero_tensor, make_word, residual

__version__ = "0.1.0"
