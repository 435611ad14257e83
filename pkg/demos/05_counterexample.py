"""No constant makes the Poincaré inequality hold with the tau (x) tau norm.

On a diagonal algebra with projections of trace (6/pi^2)/n^2 and eta = id,
the polynomial P_n = sum_k k e_k X e_k has squared centered norm (6/pi^2) n
while its difference quotient stays bounded in the tau (x) tau norm.  The
smallest admissible constant therefore grows like sqrt(n).
"""
from bsemicircular import build_ce_space, ce_table, conjugate_kernel_check
from bsemicircular.counterexample import growth_slope

space = build_ce_space(50)
rows = ce_table(space, 50)
print(f"{'n':>3} {'lhs^2':>10} {'rhs^2':>10} {'min C':>8}")
for r in rows[:5] + rows[9::10]:
    print(f"{r.n:3d} {r.lhs_sq:10.5f} {r.rhs_sq:10.5f} {r.min_C:8.4f}")
print("log-log growth exponent over n in [5, 50]:", round(growth_slope(rows, 5, 50), 4))

check = conjugate_kernel_check(space, space.projection(1))
print("\ne_1 X - X e_1 vanishes at S:", check["poly_norm"])
print("but its difference quotient does not:", check["tensor_norm"])
