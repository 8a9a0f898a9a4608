"""Acceptance criteria.

Each test prints one ``criterion N: PASS/FAIL`` line (run with ``-s`` to see
them inline); a summary is also printed at the end of the session.
"""
import filecmp
import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from uqcal import (
    Dataset,
    ScanSeries,
    bin_stats,
    ence,
    fit_sqrt_n,
    make_binning,
    mean_squared_error,
    mean_variance,
    scan,
    zve,
)
from uqcal.binning import weighted_recombination
from uqcal.io import InputSpec, load_csv
from uqcal.scanfit import default_grid
from uqcal.sim import (
    RngStream,
    SimSpec,
    expected_ence_chi,
    expected_ence_quadrature,
    fit_scatter,
    mad_binned_means,
    mc_ence_realizations,
)

from conftest import ACCEPTANCE, outlier_inflation

QM9_ENV = "UQCAL_QM9_CSV"


def record(n, passed, detail):
    ACCEPTANCE[n] = (passed, detail)
    status = "PASS" if passed else "FAIL"
    print(f"\ncriterion {n}: {status}  {detail}")
    assert passed, detail


def test_1_appendix_mad_oracle():
    t0 = time.perf_counter()
    ratios = {}
    for j, n in enumerate((25, 100, 400)):
        mc, closed = mad_binned_means(1.0, 10_000, n, 1000, RngStream(2023, ("appendix", j)))
        ratios[n] = mc / closed
    elapsed = time.perf_counter() - t0
    ok = all(abs(r - 1) <= 0.02 for r in ratios.values()) and elapsed < 10
    detail = ", ".join(f"N={n}: ratio {r:.4f}" for n, r in ratios.items())
    record(1, ok, f"{detail}; {elapsed:.1f}s (<10s)")


def test_2_fig1_calibrated_line():
    t0 = time.perf_counter()
    m = 5000
    grid = tuple(default_grid(m // 30))
    scatter = mc_ence_realizations(SimSpec(m=m, u=1.0, grid=grid, realizations=50, seed=0))
    fit = fit_scatter(scatter)
    quad = np.array([expected_ence_quadrature(m // n, 1.0) for n in grid])
    oracle = fit_sqrt_n(ScanSeries("ence", np.asarray(grid), quad))
    elapsed = time.perf_counter() - t0
    slope_ok = abs(fit.slope / oracle.slope - 1) <= 0.10
    ok = fit.calibrated and slope_ok and elapsed < 60
    record(
        2,
        ok,
        f"intercept {fit.intercept:.5f} CI [{fit.ci_low:.5f}, {fit.ci_high:.5f}]; "
        f"slope {fit.slope:.5f} vs oracle {oracle.slope:.5f} "
        f"(1/sqrt(pi M) = {1 / math.sqrt(math.pi * m):.5f}); {elapsed:.1f}s (<60s)",
    )


def test_3_five_percent_anchor():
    t0 = time.perf_counter()
    v = expected_ence_chi(5000, 36, 1.0, rng=RngStream(2023, "anchor"))
    elapsed = time.perf_counter() - t0
    record(3, 0.04 <= v <= 0.06 and elapsed < 5, f"ENCE(M=5000, N=36, u=1) = {v:.4f}; {elapsed:.2f}s (<5s)")


def test_4_miscalibration_plateau():
    vals = {n: expected_ence_chi(5000, n, 1.25, rng=RngStream(2023, ("plateau", n))) for n in (1, 2, 3, 4)}
    ok = all(abs(v - 0.2) <= 0.02 for v in vals.values())
    record(4, ok, ", ".join(f"N={n}: {v:.4f}" for n, v in vals.items()) + " (target 0.2 +/- 0.02)")


def test_5_oracle_equivalence():
    worst = 0.0
    for k in (10, 100, 1000):
        for u in (1.0, 1.1, 1.25):
            v, se = expected_ence_chi(k, 1, u, 1_000_000, RngStream(2023, ("equiv", k, int(u * 100))),
                                      return_stderr=True)
            worst = max(worst, abs(v - expected_ence_quadrature(k, u)) / se)
    record(5, worst < 4, f"max |MC - quadrature| = {worst:.2f} standard errors (<4)")


def _random_dataset(rng, m=None, distinct=True):
    m = m or int(rng.integers(4, 400))
    if distinct:
        # distinct uncertainties: scaling cannot create ties
        u = rng.permutation(np.arange(1, m + 1)) * rng.uniform(1e-3, 1e-1)
    else:
        u = rng.choice([0.5, 1.0, 2.0], m)
    e = rng.normal(size=m) * u * rng.uniform(0.3, 3)
    return Dataset(e, u)


def test_6_property_suite():
    cases = 1000
    rng = np.random.default_rng(6)
    failures = {}

    def check(name, cond):
        if not cond:
            failures[name] = failures.get(name, 0) + 1

    for _ in range(cases):
        d = _random_dataset(rng)
        m = d.size
        n = int(rng.integers(1, m // 2 + 1))
        c = float(np.exp(rng.uniform(-7, 7)))
        s = bin_stats(d, make_binning(d, n))
        ds = d.scaled(c)
        s2 = bin_stats(ds, make_binning(ds, n))
        check("ence>=0", ence(s) >= 0)
        check("zve>=1", zve(s) >= 1)
        check("scale", math.isclose(ence(s2), ence(s), rel_tol=1e-9, abs_tol=1e-15)
              and math.isclose(zve(s2), zve(s), rel_tol=1e-12))
        mv, mse = weighted_recombination(s)
        check("recombination", math.isclose(mv, mean_variance(d), rel_tol=1e-12)
              and math.isclose(mse, mean_squared_error(d), rel_tol=1e-12))

        dt = _random_dataset(rng, distinct=False)
        b = make_binning(dt, int(rng.integers(1, dt.size + 1)))
        order = np.concatenate(b.assignments)
        check("binning", b.sizes.max() - b.sizes.min() <= 1
              and sorted(order.tolist()) == list(range(dt.size))
              and bool(np.all(np.diff(dt.uncertainties[order]) >= 0)))

        ns = np.unique(rng.integers(1, 5000, int(rng.integers(3, 40))))
        if ns.size < 3:
            ns = np.array([1, 2, 3])
        a, bb = rng.uniform(-5, 5, 2)
        f = fit_sqrt_n(ScanSeries("ence", ns, a + bb * np.sqrt(ns)))
        scale = max(abs(a), abs(bb), 1.0)
        check("line-fit", abs(f.intercept - a) <= 1e-10 * scale and abs(f.slope - bb) <= 1e-10 * scale)

    names = ["ence>=0", "zve>=1", "scale", "recombination", "binning", "line-fit"]
    detail = "; ".join(f"{k}: {cases - failures.get(k, 0)}/{cases}" for k in names)
    record(6, not failures, detail)


def test_7_outlier_sensitivity():
    infl = np.array([outlier_inflation(s) for s in range(100)])
    e_mean, z_mean = infl.mean(axis=0)
    record(7, e_mean > z_mean, f"mean relative inflation ENCE {e_mean:.3f} > ZVE-1 {z_mean:.3f} (100 seeds)")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "uqcal", *map(str, args)], capture_output=True, check=False)


def test_8_determinism(tmp_path):
    rng = np.random.default_rng(8)
    u = rng.uniform(0.5, 2, 1500)
    data = tmp_path / "d.csv"
    data.write_text("E,u\n" + "".join(f"{float(e)!r},{float(s)!r}\n" for e, s in zip(rng.normal(size=1500) * u, u)))
    runs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        a = _cli("scan", "--input", data, "--seed", 7, "--out", out / "scan")
        b = _cli("simulate", "fig1", "--m", 2000, "--grid", "1,4,16", "--factors", "1,1.2", "--draws", 5000,
                 "--realizations", 4, "--seed", 7, "--out", out / "sim")
        c = _cli("simulate", "appendix", "--realizations", 20, "--seed", 7, "--out", out / "app")
        d = _cli("compute", "--input", data, "--bins", 12, "--seed", 7)
        assert a.returncode == b.returncode == c.returncode == d.returncode == 0, (a.stderr, b.stderr)
        runs.append((out, d.stdout))
    files = sorted(p.relative_to(runs[0][0]) for p in runs[0][0].rglob("*") if p.is_file())
    same = [filecmp.cmp(runs[0][0] / f, runs[1][0] / f, shallow=False) for f in files]
    ok = all(same) and len(files) >= 8 and runs[0][1] == runs[1][1]
    record(8, ok, f"{sum(same)}/{len(files)} output files byte-identical; stdout identical: {runs[0][1] == runs[1][1]}")


def _qm9_path():
    path = os.environ.get(QM9_ENV) or Path(__file__).parent / "data" / "qm9.csv"
    return Path(path) if Path(path).is_file() else None


def test_9_qm9_table1():
    path = _qm9_path()
    if path is None:
        ACCEPTANCE[9] = (None, f"QM9 data not found (set {QM9_ENV} to an R,V,uV csv)")
        print(f"\ncriterion 9: SKIP  QM9 data absent")
        pytest.skip(f"QM9 dataset not available; set {QM9_ENV}")
    schema = "rvu" if "uv" in path.read_text().splitlines()[0].lower() else "eu"
    d = load_csv(InputSpec(path, schema))
    fe = fit_sqrt_n(scan(d, "ence"), threshold_sqrtN=4)
    fz = fit_sqrt_n(scan(d, "zve"))
    ok = (
        abs(fe.intercept - 0.019) <= 2 * 0.003
        and abs(fe.slope - 0.0064) <= 2 * 0.0003
        and abs(fz.intercept - 1.027) <= 2 * 0.004
    )
    record(9, ok, f"ENCE intercept {fe.intercept:.4f} slope {fe.slope:.5f}; ZVE intercept {fz.intercept:.4f}")
