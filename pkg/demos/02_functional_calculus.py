"""
Phi-moments of matrices
=======================

On M_d with the normalized trace, tau(Phi(|x|)) is an average of Phi over
the singular values.  The same number comes out of a layer-cake sum over
the jumps of the distribution function.
"""

import numpy as np

from ncorlicz import (
    PowerLog,
    distribution,
    layer_cake_trace,
    lp_norm,
    orlicz_norm,
    random_operator,
    singular_values,
    trace_phi_moment,
)

rng = np.random.default_rng(0)
x = random_operator(rng, 8)
phi = PowerLog(1.2, 0.5)

mu = singular_values(x)
print("singular values:", np.round(mu.values, 4))

direct = trace_phi_moment(phi, x)
layered = layer_cake_trace(phi, x)
print(f"tau(Phi(|x|)) = {direct:.15f}")
print(f"layer cake    = {layered:.15f}")

# Kolmogorov: lambda_s(x) <= ||x||_p^p / s^p
for s in (0.5, 1.0, 2.0):
    lam = distribution(x, s)
    print(f"s={s}: lambda={lam:.3f}  bound p=2: {lp_norm(x, 2) ** 2 / s ** 2:.3f}")

# the Luxemburg norm rescales x until the modular reaches one
n = orlicz_norm(phi, x)
print(f"||x||_Phi = {n:.6f}, modular at x/||x||_Phi = {trace_phi_moment(phi, x / n):.12f}")
