"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``[PASS]``/``[FAIL]`` line, collected again in the
terminal summary.  The Monte Carlo criteria run the shipped configs in
``configs/`` through the same code path as the ``spikelab`` CLI.
"""
import functools
import math
from pathlib import Path

import numpy as np
import pytest
from scipy.special import ndtr

from spikelab.analytic import EntryLaw, fluctuation_target, g_sc, rho, z_sigma
from spikelab.harness import load_config, run_experiment
from spikelab.harness.runner import resolve_workers
from spikelab.spectra import eigvals_hermitian, eigvals_sym, hermitian_embed
from spikelab.stats import ks_stat

pytestmark = pytest.mark.acceptance

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

# characteristic-cubic roots from tests/_oracles.py
CUBIC_A = np.array([[2.0, -1.0, 0.5], [-1.0, 3.0, 0.25], [0.5, 0.25, -1.0]])
CUBIC_ROOTS = [3.6185965610991957, 1.5056208493588459, -1.1242174104580454]


@functools.lru_cache(maxsize=None)
def report(name):
    return run_experiment(load_config(CONFIGS / f"{name}.json"), resolve_workers(None))


def _rescaled(rep):
    return np.array([r["rescaled"] for r in rep.records])


def _var(x):
    return float(np.var(x, ddof=1))


def test_criterion_01_outlier_limits(acceptance_line):
    rep = report("outliers_real_gaussian")
    m = {int(k): v["mean"] for k, v in rep.aggregates["means"].items()}
    top = 10 / 3
    checks = {
        "lambda_1": abs(m[1] - top) <= 0.05,
        "lambda_2": abs(m[2] - top) <= 0.05,
        "lambda_3": 0.0 <= 2.0 - m[3] <= 0.1,
        "lambda_1000": abs(m[1000] + 2.9) <= 0.05,
    }
    ok = all(checks.values())
    detail = (f"means {m[1]:.4f} {m[2]:.4f} (10/3 +- 0.05), {m[3]:.4f} (2 - [0, 0.1]), "
              f"{m[1000]:.4f} (-2.9 +- 0.05)")
    assert acceptance_line("criterion 1 outlier limits", ok, detail), checks


@pytest.mark.parametrize("name,var", [("fluct_real_gaussian", 1.5), ("fluct_complex_gaussian", 0.75)])
def test_criterion_02_gaussian_fluctuations(acceptance_line, name, var):
    x = _rescaled(report(name))
    rel = abs(_var(x) - var) / var
    d = ks_stat(x, lambda y: ndtr(y / math.sqrt(var)))
    ok = rel <= 0.10 and d <= 0.06
    detail = f"{name}: variance {_var(x):.4f} (rel err {rel:.4f} <= 0.10), KS vs N(0,{var}) {d:.4f} <= 0.06"
    assert acceptance_line("criterion 2 gaussian fluctuations", ok, detail)


def test_criterion_03_non_universality(acceptance_line):
    x = _rescaled(report("fluct_real_rademacher"))
    target = fluctuation_target(EntryLaw.rademacher(), 2.0, field="real")
    d_target = ks_stat(x, target.cdf)
    d_gauss = ks_stat(x, lambda y: ndtr(y / math.sqrt(1.5)))
    ok = d_target <= 0.06 and d_gauss >= 0.25
    detail = f"KS vs 0.75(sqrt2 Rad * N(0,1/6)) {d_target:.4f} <= 0.06, KS vs N(0,1.5) {d_gauss:.4f} >= 0.25"
    assert acceptance_line("criterion 3 non-universality", ok, detail)


def test_criterion_04_full_deformation_universality(acceptance_line):
    x = _rescaled(report("fluct_real_rademacher_full"))
    d = ks_stat(x, lambda y: ndtr(y / math.sqrt(1.5)))
    assert acceptance_line("criterion 4 full-deformation universality", d <= 0.08,
                           f"KS vs N(0,1.5) {d:.4f} <= 0.08")


def test_criterion_05_master_equation_correction(acceptance_line):
    rep = report("correction_complex_gaussian")
    per = rep.aggregates["per_N"]
    L = complex(rep.predictions["L_sigma"]["re"], rep.predictions["L_sigma"]["im"])
    last = per[-1]
    c = complex(last["c_hat"]["re"], last["c_hat"]["im"])
    bias_ok = abs(c - L) <= 3 * last["c_se"] + 0.2 * abs(L)
    sign_ok = abs(c - L) < abs(c + L)
    ns = np.array([p["N"] for p in per], dtype=float)
    res = np.array([p["residual"] for p in per])
    slope = float(np.polyfit(np.log(ns), np.log(res), 1)[0])
    ok = bias_ok and sign_ok and slope <= -1.3 and [p["N"] for p in per] == [40, 80, 160]
    detail = (f"|c_160 - L| {abs(c - L):.5f} <= {3 * last['c_se'] + 0.2 * abs(L):.5f}, "
              f"sign test {'+L' if sign_ok else '-L'}, slope {slope:.3f} <= -1.3")
    assert acceptance_line("criterion 5 master-equation correction", ok, detail)


def test_criterion_06_spectrum_inclusion(acceptance_line):
    rep = report("gaps_single_spike")
    gaps = rep.predictions["gaps"]
    counts = np.array([r["counts"] for r in rep.records])
    idx = [i for i, (a, b) in enumerate(gaps) if a > 0]
    assert [tuple(gaps[i]) for i in idx][0] == pytest.approx((2.1, 2.4))
    assert gaps[idx[1]][0] == pytest.approx(2.6)
    frac = float(np.mean(np.all(counts[:, idx] == 0, axis=1)))
    assert acceptance_line("criterion 6 spectrum inclusion", frac >= 0.99,
                           f"(2.1,2.4) and (2.6,inf) empty in {frac:.2f} of {len(counts)} reps >= 0.99")


def test_criterion_07_exact_separation(acceptance_line):
    rep = report("separation_three_spikes")
    i_n = rep.predictions["i_N"]
    frac = float(np.mean([r["upper"] > 3.0 and r["lower"] < 2.2 for r in rep.records]))
    ok = i_n == 2 and frac >= 0.99 and len(rep.records) == 100
    assert acceptance_line("criterion 7 exact separation", ok,
                           f"i_N = {i_n}, lambda_2 > 3.0 and lambda_3 < 2.2 in {frac:.2f} of reps >= 0.99")


def test_criterion_08_quadform_clt(acceptance_line):
    ig = report("quadform_identity_gaussian")
    ir = report("quadform_identity_rademacher")
    ci = report("quadform_circulant_gaussian")
    v_ig, v_ir, v_ci = (r.aggregates["variance"] for r in (ig, ir, ci))
    bs = max(max(r.aggregates["bai_silverstein"].values()) for r in (ig, ir, ci))
    ns = sorted(int(k) for k in ig.aggregates["bai_silverstein"])
    ok = 1.9 <= v_ig <= 2.1 and v_ir == 0.0 and 0.9 <= v_ci <= 1.1 and bs <= 4 and ns == [50, 200, 800]
    detail = (f"identity/gaussian {v_ig:.4f} in [1.9,2.1], identity/rademacher {v_ir} == 0, "
              f"circulant {v_ci:.4f} in [0.9,1.1], max second-moment ratio {bs:.3f} <= 4 over N {ns}")
    assert acceptance_line("criterion 8 quadratic-form CLT", ok, detail)


def test_criterion_09_analytic_invariants(acceptance_line):
    rng = np.random.default_rng(9)
    residual = roundtrip = 0.0
    for sigma in (0.5, 1.0, 2.0):
        z = sigma * (rng.uniform(-6, 6, 1000) + 1j * rng.choice([-1, 1], 1000) * rng.uniform(0.01, 3, 1000))
        g = g_sc(z, sigma)
        residual = max(residual, float(np.max(np.abs(sigma**2 * g**2 - z * g + 1))))
        roundtrip = max(roundtrip, float(np.max(np.abs(z_sigma(g, sigma) - z) / np.maximum(1, np.abs(z)))))
    theta_err = max(abs(1 / g_sc(rho(th, s), s) - th)
                    for s in (0.5, 1.0, 2.0) for th in (1.1 * s, 1.5 * s, 3 * s, -2 * s))

    weyl_ok = True
    for _ in range(200):
        b = rng.standard_normal((8, 8))
        c = rng.standard_normal((8, 8))
        b, c = b + b.T, c + c.T
        lb, lc, lbc = (eigvals_sym(m).eigenvalues for m in (b, c, b + c))
        for j in range(8):
            for k in range(8 - j):
                weyl_ok &= lbc[j + k] <= lb[j] + lc[k] + 1e-9
    cubic = float(np.max(np.abs(eigvals_sym(CUBIC_A).eigenvalues - CUBIC_ROOTS)))

    h = rng.standard_normal((40, 40)) + 1j * rng.standard_normal((40, 40))
    h = h + h.conj().T
    emb = eigvals_sym(hermitian_embed(h)).eigenvalues
    pairing = float(np.max(np.abs(emb[0::2] - emb[1::2])) / np.max(np.abs(emb)))
    herm = float(np.max(np.abs(eigvals_hermitian(h).eigenvalues - emb[0::2])))

    ok = (residual <= 1e-12 and roundtrip <= 1e-10 and theta_err <= 1e-10 and weyl_ok
          and cubic <= 1e-10 and pairing <= 1e-8 and herm <= 1e-12 * np.max(np.abs(emb)))
    detail = (f"residual {residual:.1e}, round trip {roundtrip:.1e}, 1/g(rho)-theta {theta_err:.1e}, "
              f"Weyl {'ok' if weyl_ok else 'violated'}, cubic {cubic:.1e}, pairing {pairing:.1e}")
    assert acceptance_line("criterion 9 analytic invariants", ok, detail)


@pytest.mark.parametrize("name", ["esd_gaussian_deformed", "esd_gaussian_undeformed",
                                  "esd_rademacher_deformed", "esd_rademacher_undeformed"])
def test_criterion_10_esd_bulk(acceptance_line, name):
    rep = report(name)
    w1 = [r["w1"] for r in rep.records]
    ok = rep.config["N"] == 1000 and max(w1) <= 0.05
    assert acceptance_line("criterion 10 ESD bulk", ok, f"{name}: max W1 over {len(w1)} reps {max(w1):.4f} <= 0.05")
