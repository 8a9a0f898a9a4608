"""
Sensitivity to a single outstanding error
=========================================

Multiply one error of a calibrated dataset by 20 and compare how much the
ENCE and ZVE - 1 grow, relative to their values without the outlier.
"""

# %%
import numpy as np

from uqcal import Dataset, bin_stats, ence, make_binning, zve

M, N = 5000, 10
rows = []
for seed in range(100):
    rng = np.random.default_rng(seed)
    e = rng.normal(size=M)
    u = np.ones(M)
    d = Dataset(e, u)
    base = bin_stats(d, make_binning(d, N))
    e2 = e.copy()
    e2[rng.integers(M)] *= 20
    d2 = Dataset(e2, u)
    hit = bin_stats(d2, make_binning(d2, N))
    rows.append(((ence(hit) - ence(base)) / ence(base), (zve(hit) - zve(base)) / (zve(base) - 1)))

rows = np.array(rows)
print(f"mean relative inflation: ENCE {rows[:, 0].mean():.3f}, ZVE-1 {rows[:, 1].mean():.3f}")
print(f"median: ENCE {np.median(rows[:, 0]):.3f}, ZVE-1 {np.median(rows[:, 1]):.3f}")
