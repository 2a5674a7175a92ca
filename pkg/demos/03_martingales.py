"""
Matrix martingales and square functions
=======================================

M_8 = M_2 (x) M_2 (x) M_2 carries a filtration that keeps the first k
tensor factors.  Projecting a random matrix through it gives a martingale
whose differences are trace-orthogonal.
"""

import numpy as np

from ncorlicz import (
    Filtration,
    Power,
    column_square_moment,
    random_martingale,
    row_square_moment,
    trace_phi_moment,
)

rng = np.random.default_rng(1)
f = Filtration.tensor(3)
m = random_martingale(f, rng)
m.validate()

tr = lambda a: np.trace(a).real / a.shape[0]
print("tau(|dx_k|^2):", [round(float(tr(d.conj().T @ d)), 6) for d in m.diffs])
print("tau(|x|^2)   :", round(float(tr(m.final.conj().T @ m.final)), 6))

# at p = 2 the column and row square functions have the same moment as x
phi = Power(2)
print("column / row / direct:",
      column_square_moment(phi, m.diffs), row_square_moment(phi, m.diffs), trace_phi_moment(phi, m.final))

# at p = 4 they separate; the column and row versions also differ from each other
phi = Power(4)
print("p=4 column / row / direct:",
      column_square_moment(phi, m.diffs), row_square_moment(phi, m.diffs), trace_phi_moment(phi, m.final))

# the partition model keeps diagonal matrices fixed; the tensor model averages them dyadically
v = np.arange(8.0)
print("tensor E_0(diag):", np.diag(f.expectation(0, np.diag(v))).real)
print("pinching E_0(diag):", np.diag(Filtration.dyadic_partition(3).expectation(0, np.diag(v))).real)
