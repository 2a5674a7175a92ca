"""
Growth indices of Orlicz functions
==================================

An Orlicz function is summarized by two exponents: how fast it grows at
small scales and at large scales.  Here we estimate them for the three
built-in families and look at the Delta_2 constant.
"""

import numpy as np

from ncorlicz import Power, PowerLog, PowerSin, delta2_constant, growth_function, indices

# t^a log(1 + t^b) behaves like t^(a+b) near zero and like t^a log t at infinity,
# so the lower index is a and the upper index is a + b
phi = PowerLog(1.2, 0.5)
est = indices(phi)
print(f"{phi.spec():28s} p_Phi = {est.p_phi:.4f}  q_Phi = {est.q_phi:.4f}")

# the growth function M(t) = sup_s Phi(ts)/Phi(s) sits between t^p and t^q
for t in (1e-3, 1e-1, 10.0, 1e3):
    m = growth_function(phi, t)
    print(f"  M({t:g}) = {m:.4g}   log M / log t = {np.log(m) / np.log(t):.4f}")

# an oscillating perturbation of t^4 keeps both indices at 4
phi = PowerSin(4.0, 0.2)
est = indices(phi)
print(f"{phi.spec():28s} p_Phi = {est.p_phi:.4f}  q_Phi = {est.q_phi:.4f}")

# Delta_2 constants: exactly 2^r for powers, at most about 2^(a+b) for PowerLog
for phi in (Power(1.5), Power(3.0), PowerLog(1.2, 0.5), PowerSin(4.0, 0.2)):
    print(f"{phi.spec():28s} K = {delta2_constant(phi):.6f}")
