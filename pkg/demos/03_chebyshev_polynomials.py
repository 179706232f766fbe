"""
Chebyshev polynomials of a union of intervals
=============================================

The Remez exchange finds the monic minimax polynomial T_n; M_n = ||T_n|| / Cap^n
sits above the Widom factor of the equilibrium measure and never below 2 on
real sets.
"""
import numpy as np

from widomlab.chebyshev import chebyshev_poly, verify_alternation
from widomlab.measures import normalize
from widomlab.orthopoly import recurrence
from widomlab.potential import equilibrium_measure
from widomlab.sets import make_interval_union

K = make_interval_union([(-1.0, -0.3), (0.2, 0.5), (0.8, 1.0)])
E = equilibrium_measure(K)
W = recurrence(normalize(E), 20).widom

print(" n      M_n        W_n    alternation ok")
for n in (1, 2, 3, 5, 8, 13, 20):
    res = chebyshev_poly(E, n)
    print(f"{n:2d}  {res.m_factor:9.6f}  {W[n]:9.6f}   {verify_alternation(res)}")

# the classical case: 2^(1-n) T_n on [-1, 1]
res = chebyshev_poly(equilibrium_measure(make_interval_union([(-1, 1)])), 4)
print("T_4 coefficients", np.round(res.coeffs, 12), " sup norm", res.sup_norm)
print("alternation points", [x for x, _ in res.alternation_points])
