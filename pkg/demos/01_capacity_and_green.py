"""
Capacity, equilibrium measure and Green function of a finite gap set
====================================================================

Two symmetric bands [-b, -a] U [a, b] have a closed form capacity
sqrt(b^2 - a^2) / 2, and the Green function peaks at 0 in the gap.
"""
import math

import numpy as np

from widomlab.potential import band_measures, critical_points, equilibrium_measure, green_values, pw_sum
from widomlab.sets import make_interval_union

a, b = 0.5, 1.0
K = make_interval_union([(-b, -a), (a, b)])
E = equilibrium_measure(K)

print("capacity      ", E.capacity)
print("closed form   ", math.sqrt(b * b - a * a) / 2)
print("band masses   ", band_measures(E))

# the Green function vanishes on K and grows like log|z| - log Cap at infinity
x = np.linspace(-0.4, 0.4, 9)
print("g on the gap  ", np.round(green_values(E, x), 6))
print("critical point", critical_points(E))
print("PW sum        ", pw_sum(E), " closed form", 0.5 * math.log((b + a) / (b - a)))

# equilibrium density |Q| / (pi sqrt|R|): square root blow-up at the band ends
t = np.linspace(a, b, 6)[1:-1]
print("density       ", E.density(t))

# extended precision: the same quantities at 40 digits
E40 = equilibrium_measure(K, 40)
print("log Cap (40)  ", E40.log_capacity_exact())
