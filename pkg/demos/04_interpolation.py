"""
Interpolating Phi-moment bounds
===============================

A linear map that is of weak type (p0, p0) and (p1, p1) with p0 < p_Phi and
q_Phi < p1 satisfies tau(Phi(|Tx|)) <= C tau(Phi(|x|)).  The constant is
assembled from the weak-type constants and the growth data of Phi.
"""

import numpy as np

from ncorlicz import (
    Filtration,
    PowerLog,
    auto_exponents,
    random_operator,
    transform_operator,
    verify_interpolation,
    weak_type_constant,
)

rng = np.random.default_rng(2)
phi = PowerLog(1.2, 0.5)
f = Filtration.tensor(4)
T = transform_operator(f, [1, -1, 1, -1])
ensemble = [random_operator(rng, 16) for _ in range(100)]

p0, p1 = auto_exponents(phi)
print(f"p0 = {p0:.3f}, p1 = {p1:.3f}")
print(f"weak-type constants: A0 = {weak_type_constant(T, p0, ensemble):.4f}, "
      f"A1 = {weak_type_constant(T, p1, ensemble):.4f}")

res = verify_interpolation(T, phi, p0, p1, ensemble)
print(f"max ratio {res.max_ratio:.4f} against certified C = {res.constant:.4f}: pass = {res.passed}")
