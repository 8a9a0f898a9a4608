import numpy as np
import pytest

from uqcal import Dataset, bin_stats, ence, make_binning, zve

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def synthetic(m, seed, u=None, factor=1.0, low=0.5, high=2.0):
    """Normal errors with scale ``u``; claimed uncertainty ``factor * u``.

    ``u=None`` draws heteroscedastic scales uniformly on ``[low, high]``.
    """
    rng = np.random.default_rng(seed)
    scale = rng.uniform(low, high, m) if u is None else np.full(m, float(u))
    errors = rng.normal(size=m) * scale
    return Dataset(errors, scale * factor)


def outlier_inflation(seed, m=5000, n=10, factor=20.0):
    """Relative inflation of ENCE and ZVE-1 when one random error is multiplied by ``factor``.

    Homoscedastic, calibrated data with u = 1; the affected row is drawn
    from the same seeded generator.
    """
    rng = np.random.default_rng(seed)
    e = rng.normal(size=m)
    u = np.ones(m)
    base = bin_stats(Dataset(e, u), make_binning(Dataset(e, u), n))
    e2 = e.copy()
    e2[rng.integers(m)] *= factor
    d2 = Dataset(e2, u)
    hit = bin_stats(d2, make_binning(d2, n))
    ence0, zve0 = ence(base), zve(base) - 1
    return (ence(hit) - ence0) / ence0, (zve(hit) - 1 - zve0) / zve0


@pytest.fixture
def calibrated():
    return synthetic(2000, 7)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[key]
        status = "PASS" if passed else ("SKIP" if passed is None else "FAIL")
        terminalreporter.write_line(f"criterion {key}: {status}  {detail}")
