"""
Khintchine and Burkholder-Gundy in Phi-moments
==============================================

Below exponent 2 the Rademacher average is compared with the cheapest
column/row decomposition; above 2 with the larger of the column and row
square functions.  Between the two regimes the tests give no information.
"""

from ncorlicz import EnsembleConfig, Power, PowerLog, RegimeError, verify_bg, verify_khintchine

rep = verify_khintchine(EnsembleConfig(Power(4), samples=20, n_terms=5))
print(f"Power(4) Khintchine: max ratio {rep.aggregate['max']:.4f}, pass = {rep.passed}")

rep = verify_khintchine(EnsembleConfig(PowerLog(1.2, 0.5), samples=4, n_terms=3))
for variant, s in rep.aggregate["by_variant"].items():
    print(f"PowerLog(1.2,0.5) {variant:11s} ratios in [{s['min']:.3f}, {s['max']:.3f}]")

for phi in (Power(3), PowerLog(1.2, 0.3)):
    rep = verify_bg(EnsembleConfig(phi, samples=10))
    agg = rep.aggregate
    print(f"{phi.spec():24s} [{rep.regime['regime']}] upper {agg['upper_constant']:.3f} lower {agg['lower_constant']:.3f}")

try:
    verify_bg(EnsembleConfig(PowerLog(1.5, 1.0), samples=1))
except RegimeError as exc:
    print("PowerLog(1.5,1):", exc)
