"""
Expected ENCE of a homoscedastic dataset
========================================

With errors ~ N(0, 1) and a claimed uncertainty u, the RMSE of a bin of k
points is chi_k / sqrt(k). Three routes to the expected ENCE agree:
chi sampling, quadrature, and simulating whole datasets.
"""

# %%
import math

import numpy as np

from uqcal.sim import (
    RngStream,
    SimSpec,
    expected_ence_chi,
    expected_ence_quadrature,
    fit_scatter,
    mc_ence_realizations,
)

M = 5000
grid = (1, 4, 9, 16, 25, 36, 64, 100, 144)

print("  N   u=1 (chi)  u=1 (quad)  u=1.1 (quad)  u=1.25 (quad)")
for n in grid:
    chi = expected_ence_chi(M, n, 1.0, draws=20_000, rng=RngStream(3, n))
    q = [expected_ence_quadrature(M // n, u) for u in (1.0, 1.1, 1.25)]
    print(f"{n:4d}   {chi:.5f}    {q[0]:.5f}     {q[1]:.5f}       {q[2]:.5f}")

# %%
# Calibrated case: proportional to sqrt(N) with slope close to 1 / sqrt(pi M).
# Miscalibrated: flat at (u - 1) / u for small N, then rising.
scatter = mc_ence_realizations(SimSpec(m=M, u=1.0, grid=grid, realizations=50, seed=0))
fit = fit_scatter(scatter)
print(f"simulated datasets: intercept {fit.intercept:.5f} [{fit.ci_low:.5f}, {fit.ci_high:.5f}]")
print(f"slope {fit.slope:.5f}; 1/sqrt(pi M) = {1 / math.sqrt(math.pi * M):.5f}")
print("per-N mean of 50 realizations:", np.round(scatter.mean(), 5))
