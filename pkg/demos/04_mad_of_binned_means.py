"""
Why sqrt(N): mean absolute value of bin means
=============================================

The bin means of M zero-centred normal draws split into N bins are
N(0, u_X^2 N / M), so their mean absolute value is u_X sqrt(2 N / (pi M)).
"""

# %%
from uqcal.sim import RngStream, mad_binned_means

for n in (1, 4, 25, 100, 400, 1000):
    mc, closed = mad_binned_means(1.0, 10_000, n, 500, RngStream(4, n))
    print(f"N = {n:5d}  simulated {mc:.5f}  closed form {closed:.5f}  ratio {mc / closed:.4f}")
