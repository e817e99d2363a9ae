"""Acceptance criteria, each at its stated tolerance.

Every check prints one ``criterion N: PASS|FAIL`` line (also collected into
the pytest terminal summary). Run directly with ``python3 tests/test_acceptance.py``
for the same report without pytest.
"""
import functools
import json
import math
import tempfile
from pathlib import Path

import numpy as np
import pytest

from krigbound import (Design, Kernel, StudyConfig, bessel_k, condition1_ratio, fit, interpolate,
                       maximin_lhd, power_function_sq, run_study, sample_gp)
from krigbound.cli import main as cli_main
from krigbound.design import grid_points, Region
from krigbound.kernels import correlation, matern_half_integer
from krigbound.kriging import rkhs_norm_sq

REPORT = []

SEED = 0
SCALED = dict(design_sizes=tuple(range(10, 201, 10)), replicates=30, grid_step=0.02, seed=SEED)


def record(name, ok, detail):
    line = f"criterion {name}: {'PASS' if ok else 'FAIL'}  {detail}"
    REPORT.append(line)
    print(line)
    return ok, detail


@functools.lru_cache(maxsize=None)
def scaled_slope(nu0, nu, phi=1.0):
    cfg = StudyConfig(Kernel.matern(nu0, phi), Kernel.matern(nu, phi), **SCALED)
    res = run_study(cfg)
    return res.fit.slope, tuple(r.mean_sup_error for r in res.rows)


def inversions(errors):
    return int(sum(b >= a for a, b in zip(errors, errors[1:])))


# -- 1 ------------------------------------------------------------------------

def check_1():
    s1, e1 = scaled_slope(3.0, 2.5)
    s2, e2 = scaled_slope(3.5, 3.5)
    ok1 = abs(s1 - 2.5) <= 0.4
    ok2 = abs(s2 - 3.5) <= 0.6
    paper = StudyConfig.from_json(json.dumps({
        "true_kernel": {"family": "matern", "nu": 3, "phi": 1},
        "imposed_kernel": {"family": "matern", "nu": 2.5, "phi": 1}}))
    ok3 = (paper.design_sizes == tuple(range(10, 501, 10)) and paper.replicates == 100
           and paper.grid_step == 0.01)
    detail = (f"(3,2.5) slope={s1:.4f} need 2.5+-0.4 [{'ok' if ok1 else 'miss'}]; "
              f"(3.5,3.5) slope={s2:.4f} need 3.5+-0.6 [{'ok' if ok2 else 'miss'}]; "
              f"paper-scale config from JSON [{'ok' if ok3 else 'miss'}]; "
              f"error-ladder inversions {inversions(e1)}, {inversions(e2)}")
    return record("1", ok1 and ok2 and ok3, detail)


def report_1_phi():
    # Reported, not asserted: the same scaled runs at a second scale parameter.
    s1, _ = scaled_slope(3.0, 2.5, 0.5)
    s2, _ = scaled_slope(3.5, 3.5, 0.5)
    line = f"criterion 1 (report, phi=0.5): (3,2.5) slope={s1:.4f}; (3.5,3.5) slope={s2:.4f}"
    REPORT.append(line)
    print(line)


# -- 2 ------------------------------------------------------------------------

def check_2():
    a, _ = scaled_slope(3.0, 3.5)
    b, _ = scaled_slope(5.0, 3.5)
    c, _ = scaled_slope(5.0, 2.5)
    d_true = abs(b - a)
    d_imposed = abs(b - c)
    ok_a = d_true < 0.5
    ok_b = d_imposed > 0.7
    detail = (f"nu0 3->5 at nu=3.5: {a:.4f}->{b:.4f}, |diff|={d_true:.4f} need <0.5 "
              f"[{'ok' if ok_a else 'miss'}]; nu 2.5->3.5 at nu0=5: {c:.4f}->{b:.4f}, "
              f"|diff|={d_imposed:.4f} need >0.7 [{'ok' if ok_b else 'miss'}]")
    return record("2", ok_a and ok_b, detail)


def report_2_table_pairs():
    # Reported, not asserted: the pairs compared in the source table, both with nu <= nu0.
    a, _ = scaled_slope(3.5, 3.5)
    b, _ = scaled_slope(5.0, 3.5)
    c, _ = scaled_slope(5.0, 5.0)
    line = (f"criterion 2 (report, table pairs): nu0 3.5->5 at nu=3.5: {a:.4f}->{b:.4f} "
            f"|diff|={abs(b - a):.4f}; nu 3.5->5 at nu0=5: {b:.4f}->{c:.4f} |diff|={abs(c - b):.4f}")
    REPORT.append(line)
    print(line)


# -- 3 ------------------------------------------------------------------------

def _random_case(rng):
    d = int(rng.integers(1, 4))
    n = int(rng.integers(1, 51))
    pts = rng.random((n, d))
    if n > 1:
        diff = pts[:, None] - pts[None]
        sep = math.sqrt(np.min(np.sum(diff * diff, -1) + 9 * np.eye(n)))
    else:
        sep = 1.0
    if rng.random() < 0.5:
        kernel = Kernel.gaussian(1.0 / sep ** 2, dim=d)
    else:
        kernel = Kernel.matern(float(rng.uniform(0.5, 4.0)), 1.0 / sep, dim=d)
    values = rng.standard_normal(n) * 10 ** rng.uniform(-3, 3)
    return Design(pts), kernel, values


def check_3():
    rng = np.random.default_rng(3)
    worst = 0.0
    families = set()
    for _ in range(100):
        design, kernel, f = _random_case(rng)
        families.add(kernel.family)
        err = np.max(np.abs(interpolate(fit(design, kernel), f, design.points) - f))
        worst = max(worst, err / np.max(np.abs(f)))
    ok = worst <= 1e-8 and len(families) == 2
    return record("3", ok, f"100 cases, max |If(x_i)-f_i|/max|f| = {worst:.3e} (tol 1e-8)")


# -- 4 ------------------------------------------------------------------------

def check_4():
    kernel = Kernel.matern(2.5, 1.0)
    design = maximin_lhd(30, 2, SEED)
    model = fit(design, kernel)
    at_nodes = float(np.max(power_function_sq(model, design.points)))
    grid = grid_points(Region.unit(2), 0.01)
    p2 = power_function_sq(model, grid)
    in_range = bool(np.all((p2 >= 0) & (p2 <= 1)))
    rng = np.random.default_rng(4)
    worst = -math.inf
    for _ in range(50):
        extra = rng.random((1, 2))
        bigger = fit(Design(np.vstack([design.points, extra])), kernel)
        worst = max(worst, float(np.max(power_function_sq(bigger, grid) - p2)))
    ok = at_nodes <= 1e-10 and in_range and worst <= 1e-8
    return record("4", ok, f"max P^2 at nodes {at_nodes:.2e} (<=1e-10); P^2 in [0,1] on "
                           f"{len(grid)} nodes: {in_range}; max increase after augmentation "
                           f"{worst:.2e} (<=1e-8)")


# -- 5 ------------------------------------------------------------------------

def check_5():
    rng = np.random.default_rng(5)
    violations = 0
    worst = 0.0
    for case in range(200):
        nu = (1.5, 2.5)[case % 2]
        kernel = Kernel.matern(nu, float(rng.uniform(0.5, 3.0)))
        centers = rng.random((int(rng.integers(1, 11)), 2))
        coeffs = rng.standard_normal(len(centers))
        design = maximin_lhd(int(rng.integers(5, 41)), 2, int(rng.integers(2**31)))
        model = fit(design, kernel)
        fx = lambda x: kernel.matrix(centers, x).T @ coeffs
        x = rng.random((100, 2))
        err = np.abs(fx(x) - interpolate(model, fx(design.points), x))
        norm = math.sqrt(rkhs_norm_sq(kernel, centers, coeffs))
        bound = np.sqrt(power_function_sq(model, x)) * norm
        violations += int(np.sum(err > bound * (1 + 1e-6)))
        worst = max(worst, float(np.max(err / np.where(bound > 0, bound, np.inf))))
    return record("5", violations == 0, f"{violations} violations in 200x100 points; "
                                        f"max |f-If|/(P ||f||) = {worst:.4f}")


# -- 6 ------------------------------------------------------------------------

def check_6():
    r = np.logspace(-6, 1, 2000)
    worst_cf = 0.0
    for nu in (0.5, 1.5, 2.5):
        for phi in (0.5, 1.0, 2.0):
            got = correlation(Kernel.matern(nu, phi), r)
            ref = matern_half_integer(nu, phi, r)
            worst_cf = max(worst_cf, float(np.max(np.abs(got - ref) / ref)))
    worst_rec = 0.0
    z = np.logspace(-3, math.log10(50), 60)
    for nu in (0.2, 0.5, 1.0, 1.3, 2.5, 3.7, 5.0, 8.9, 15.0):
        lhs = bessel_k(nu + 1, z)
        rhs = bessel_k(nu - 1, z) + 2 * nu / z * bessel_k(nu, z)
        worst_rec = max(worst_rec, float(np.max(np.abs(lhs - rhs) / lhs)))
    ok = worst_cf <= 1e-10 and worst_rec <= 1e-10
    return record("6", ok, f"closed-form max rel err {worst_cf:.2e}; recurrence max rel "
                           f"residual {worst_rec:.2e} (both <=1e-10)")


# -- 7 ------------------------------------------------------------------------

def check_7(draws=20000):
    sigma2 = 2.0
    k = Kernel.matern(1.5, 1.0)
    single = np.array([sample_gp([[0.3, 0.4]], k, sigma2, seed=s).values[0] for s in range(draws)])
    var = float(np.var(single, ddof=1))
    se_var = sigma2 * math.sqrt(2.0 / (draws - 1))
    mean_ok = abs(single.mean()) <= 3 * math.sqrt(sigma2 / draws)
    gauss = Kernel.gaussian(1.0)
    lag = math.sqrt(math.log(2.0))
    pts = [[0.0, 0.0], [lag, 0.0]]
    pair = np.array([sample_gp(pts, gauss, 1.0, seed=s).values for s in range(draws)])
    rho = float(np.corrcoef(pair.T)[0, 1])
    target = float(correlation(gauss, lag))
    se_rho = (1 - target ** 2) / math.sqrt(draws)
    ok = abs(var - sigma2) <= 3 * se_var and abs(rho - target) <= 3 * se_rho and mean_ok
    return record("7", ok, f"var {var:.4f} vs {sigma2} (3SE={3 * se_var:.4f}); corr {rho:.4f} "
                           f"vs {target:.4f} (3SE={3 * se_rho:.4f}); mean {single.mean():.4f}")


# -- 8 ------------------------------------------------------------------------

def check_8():
    a = condition1_ratio(Kernel.matern(3.0), Kernel.matern(2.5)).trend
    b = condition1_ratio(Kernel.matern(3.0), Kernel.matern(3.5)).trend
    c = [condition1_ratio(Kernel.gaussian(phi), Kernel.matern(nu)).trend
         for phi in (0.5, 1.0, 4.0) for nu in (0.5, 1.5, 2.5, 3.5, 5.0, 10.0)]
    ok = a == "bounded" and b == "diverging" and all(t == "bounded" for t in c)
    return record("8", ok, f"2.5/3: {a}; 3.5/3: {b}; Gaussian truth vs Matern: "
                           f"{sum(t == 'bounded' for t in c)}/{len(c)} bounded")


# -- 9 ------------------------------------------------------------------------

def check_9():
    cfg = StudyConfig(Kernel.matern(3.0), Kernel.matern(2.5), design_sizes=(10, 20, 30, 40),
                      replicates=3, grid_step=0.05, seed=SEED)
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "cfg.json"
        path.write_text(json.dumps(cfg.to_dict()))
        codes = []
        for threads in ("1", "1", "8", "8"):
            out = Path(tmp) / f"out{len(outputs)}"
            codes.append(cli_main(["study", "--config", str(path), "--out", str(out),
                                   "--threads", threads]))
            outputs.append((out / "rows.csv").read_bytes())
    ok = all(c == 0 for c in codes) and len(set(outputs)) == 1
    return record("9", ok, f"4 runs (threads 1,1,8,8): {len(set(outputs))} distinct rows.csv")


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9]


@pytest.mark.slow
@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_criterion(check):
    ok, detail = check()
    assert ok, detail


@pytest.mark.slow
@pytest.mark.parametrize("report", [report_1_phi, report_2_table_pairs],
                         ids=["criterion_1_second_phi", "criterion_2_table_pairs"])
def test_report(report):
    report()


if __name__ == "__main__":
    for check in CHECKS:
        check()
    report_1_phi()
    report_2_table_pairs()
