"""
Middle-thirds Cantor approximants
=================================

Capacity falls and the Parreau-Widom sum grows with the stage m, while the
Widom factors of the equilibrium measures stay above 1.  The table is also
written to cantor_study.csv for plotting elsewhere.
"""
from widomlab.potential import equilibrium_measure, log_capacity, pw_sum
from widomlab.sets import cantor_approximant
from widomlab.szego import cantor_csv, cantor_study

rows = cantor_study(6, 30)
print(" m   capacity      PW sum     min W_n")
for r in rows:
    print(f"{r.m:2d}  {r.capacity:.10f}  {r.pw_sum:.8f}  {r.min_widom:.6f}")

# uniform mass 2^-m per band instead of the equilibrium measure
for r in cantor_study(4, 30, "cantor_lebesgue"):
    print(f"Lebesgue-type m={r.m}: min W_n = {r.min_widom:.6f}, W_30 = {r.widom[30]:.6f}")

# the first stage at 50 digits: Cap = sqrt(2)/6, PW sum = log(2)/2
E = equilibrium_measure(cantor_approximant(1), 50)
print("log Cap(K_1) =", log_capacity(E, exact=True))
print("PW(K_1)      =", pw_sum(E, exact=True))

with open("cantor_study.csv", "w") as fh:
    fh.write(cantor_csv(rows, {"m_max": 6, "N": 30}))
