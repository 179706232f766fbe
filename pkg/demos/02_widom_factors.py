"""
Widom factors and the Szego-type lower bound
============================================

W_n(mu) = ||P_n||_{L^2(mu)} / Cap(K)^n.  For mu = h d mu_K the squares stay
above exp(int log h d mu_K); the equilibrium measure itself gives W_n >= 1.
"""
import math

import numpy as np

from widomlab.measures import DensitySpec, normalize, szego_integral
from widomlab.orthopoly import recurrence
from widomlab.potential import equilibrium_measure
from widomlab.sets import make_interval_union, unit_circle
from widomlab.szego import verify_lower_bound, widom_interval_limit

K = make_interval_union([(-2.0, -0.7), (0.1, 0.6), (1.0, 2.2)])
E = equilibrium_measure(K)

mu_K = normalize(E)
print("W_n(mu_K), n=1..10:", np.round(recurrence(mu_K, 10).widom[1:], 6))

# a density with a zero inside a band, a root at a band end and an exponential factor
h = DensitySpec(1.0, ((0.3, 1.0), (2.2, 0.5)), (0.0, 0.4))
mu = normalize(E, h, [(3.0, 0.1)])
rep = verify_lower_bound(mu, 30)
print(f"M = {rep.M:.6f}   e^M = {rep.e_M:.6f}   min W_n^2 = {rep.min_Wn_sq:.6f} at n = {rep.argmin_n}")

# on the circle the equilibrium measure is sharp: every W_n equals 1
print("circle:", recurrence(normalize(equilibrium_measure(unit_circle())), 8).widom[1:])

# one interval: W_n^2 tends to 2 pi R(inf) Cap(K), pi/2 for Lebesgue measure on [-1, 1]
lim = widom_interval_limit(DensitySpec(0.5), -1.0, 1.0, 40)
for n, v in zip(lim.n_values[::3], lim.tail_values[::3]):
    print(f"  n={n:2d}  W_n^2 = {v:.8f}")
print("  target", lim.target, " pi/2 =", math.pi / 2)
# the limit in the Szego form: 2 exp(M) with h = pi f sqrt(1 - x^2)
leb = normalize(equilibrium_measure(make_interval_union([(-1, 1)])),
                DensitySpec(math.pi / 2, ((-1.0, 0.5), (1.0, 0.5))))
print("  2 exp(M) =", 2 * math.exp(szego_integral(leb)))
