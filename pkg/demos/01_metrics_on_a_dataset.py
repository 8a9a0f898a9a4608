"""
ENCE, ZVE and reliability diagrams on a single dataset
=======================================================

Build a heteroscedastic dataset whose errors really are drawn with the
claimed uncertainties, then look at the binned statistics.
"""

# %%
import numpy as np

from uqcal import (
    Dataset,
    bin_stats,
    ence,
    make_binning,
    mean_squared_error,
    mean_variance,
    reliability_diagram,
    zve,
)

rng = np.random.default_rng(1)
u = rng.uniform(0.5, 2.0, 5000)
d = Dataset(rng.normal(size=u.size) * u, u)

print(f"M = {d.size}, MV = {mean_variance(d):.4f}, MSE = {mean_squared_error(d):.4f}")

# %%
# Average calibration only compares MV and MSE. Binning by uncertainty checks
# it locally. The same calibrated data give different ENCE and ZVE values
# depending on the number of bins:
for n in (5, 10, 20, 50, 100):
    s = bin_stats(d, make_binning(d, n))
    print(f"N = {n:3d}   ENCE = {100 * ence(s):5.2f} %   ZVE = {zve(s):.4f}")

# %%
# A reliability diagram is one (RMV, RMSE) point per bin, to be compared
# with the identity line.
for p in reliability_diagram(bin_stats(d, make_binning(d, 10), zvar=None)):
    print(f"bin {p.bin}: RMV = {p.rmv:.3f}  RMSE = {p.rmse:.3f}  (n = {p.size})")

# %%
# Uncertainties overstated by 25 %: the ENCE sits near (1.25 - 1) / 1.25 = 0.2
# whatever the number of bins.
over = Dataset(d.errors, 1.25 * d.uncertainties)
for n in (5, 20, 100):
    print(f"N = {n:3d}   ENCE = {ence(bin_stats(over, make_binning(over, n), zvar=None)):.4f}")
