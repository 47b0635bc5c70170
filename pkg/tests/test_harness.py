import json
import math
import os

import numpy as np
import pytest

from artifact.bo_solver import BOConfig, BOState, BlowUpError, gaussian_profile, run_to
from artifact.harness import (ConfigError, ResidualSample, ScalingReport,
                              ValidationConfig, build_ansatz, describe_plan,
                              default_residual_amplitude, error_energy_trace,
                              fit_slope, lattice_cutoff, residual_cutoff,
                              residual_eval, residual_fields,
                              run_residual_sweep, run_validation)
from artifact.lattice import LatticeConfig, LatticeState, run_steps
from artifact.specfun import make_alpha_params
from artifact.spectral import PeriodicGrid, sample_spectrum

PARAMS2 = make_alpha_params(2.0)


def _smoke_config(**kw):
    base = dict(alpha=2.0, epsilons=(0.4, 0.32, 0.25), period=102.4,
                tau0=0.05, checkpoints=2, amplitude=0.1, bo_modes=256,
                bo_steps_per_checkpoint=20)
    base.update(kw)
    return ValidationConfig(**base)


# ---------------------------------------------------------------------------
# configuration and fits


def test_config_validation():
    with pytest.raises(ConfigError):
        ValidationConfig(alpha=3.2)
    with pytest.raises(ConfigError):
        ValidationConfig(epsilons=())
    with pytest.raises(ConfigError):
        ValidationConfig(epsilons=(0.1, 0.2))  # ascending
    with pytest.raises(ConfigError):
        ValidationConfig(epsilons=(0.6, 0.2, 0.1))  # out of range
    with pytest.raises(ConfigError):
        ValidationConfig(tau0=0.0)
    with pytest.raises(ConfigError):
        ValidationConfig(checkpoints=0)
    with pytest.raises(ConfigError):
        ValidationConfig(jobs=0)


def test_default_amplitude_policy():
    assert default_residual_amplitude(1.8) == 0.7
    assert default_residual_amplitude(2.0) == 0.7
    assert default_residual_amplitude(2.5) == 0.1


def test_fit_slope_exact_power_law():
    eps = [0.2, 0.1, 0.05, 0.025]
    pairs = [(e, 3.7 * e ** 2.5) for e in eps]
    slope, intercept, r2 = fit_slope(pairs)
    assert abs(slope - 2.5) < 1e-12
    assert abs(math.exp(intercept) - 3.7) < 1e-12
    assert r2 == pytest.approx(1.0)


def test_fit_slope_with_jitter():
    rng = np.random.default_rng(21)
    eps = [0.2, 0.141, 0.1, 0.0707, 0.05]
    pairs = [(e, 2.0 * e ** 1.5 * float(np.exp(0.01 * rng.standard_normal())))
             for e in eps]
    slope, _, r2 = fit_slope(pairs)
    assert abs(slope - 1.5) < 0.05
    assert r2 > 0.999


def test_fit_slope_rejects_bad_input():
    with pytest.raises(ValueError):
        fit_slope([(0.2, 1.0), (0.1, 0.5)])
    with pytest.raises(ValueError):
        fit_slope([(0.2, 1.0), (0.1, 0.5), (0.05, -0.1)])
    with pytest.raises(ValueError):
        fit_slope([(0.2, 1.0), (0.1, 0.5), (0.0, 0.2)])


def test_scaling_report_validation():
    with pytest.raises(ValueError):
        ScalingReport(pairs=((0.2, 1.0), (0.1, 0.5)), slope=1.0,
                      intercept=0.0, target_exponent=1.0, r_squared=1.0)


def test_describe_plan_default_ring_sizes():
    cfg = ValidationConfig(alpha=2.0)
    plan = describe_plan(cfg, "residual")
    sizes = [entry["N"] for entry in plan]
    assert sizes == [512, 724, 1024, 1448]
    eps = [entry["epsilon"] for entry in plan]
    assert eps[0] == pytest.approx(0.2)
    assert eps[1] == pytest.approx(102.4 / 724)
    cuts = [entry["cutoff"] for entry in plan]
    assert cuts[0] == min(255, math.ceil(3.0 / eps[0] ** 2))
    assert all(c <= n // 2 - 1 for c, n in zip(cuts, sizes))
    vplan = describe_plan(cfg, "validation")
    assert all(entry["steps_per_checkpoint"] >= 1 for entry in vplan)
    assert all(entry["dt"] <= cfg.lattice_dt + 1e-15 for entry in vplan)


def test_cutoff_policies():
    cfg = ValidationConfig(alpha=2.5)
    params = make_alpha_params(2.5)
    # the floor 8/eps applies when the tail formula asks for less
    m = lattice_cutoff(cfg, params, 0.1, 1024, norm_r=0.05)
    assert m >= math.ceil(8.0 / 0.1)
    assert m <= 511
    # cap at N/2 - 1 once the tail formula wants a long range
    m_small = lattice_cutoff(cfg, params, 0.4, 64, norm_r=5.0)
    assert m_small == 31
    assert residual_cutoff(ValidationConfig(alpha=2.0), 0.2, 512) == 75
    assert residual_cutoff(ValidationConfig(alpha=2.0), 0.05, 256) == 127


def test_clock_consistency_across_checkpoints():
    # lattice time i*seg must land on the surrogate checkpoint tau_i/eps^a
    for alpha in (1.8, 2.0, 2.5):
        for eps in (0.2, 102.4 / 724, 0.1, 102.4 / 1448):
            tau0, K = 0.25, 20
            T = tau0 / eps ** alpha
            seg = T / K
            for i in range(1, K + 1):
                tau_i = i * tau0 / K
                t_i = i * seg
                err = abs(t_i * eps ** alpha - tau_i)
                assert err <= 4.0 * np.spacing(tau_i)


# ---------------------------------------------------------------------------
# ansatz and residual


def test_build_ansatz_values_and_scaling():
    grid = PeriodicGrid(102.4, 256)
    u0 = gaussian_profile(grid, 0.2)
    eps = 0.4
    state = build_ansatz(u0, eps, PARAMS2)
    assert state.r.size == 256
    us = sample_spectrum(u0.spectrum, 102.4, 256)
    scale = eps ** (PARAMS2.alpha - 1.0)
    assert np.allclose(state.r, -scale * us, atol=1e-15)
    assert np.allclose(state.p, PARAMS2.c * scale * us, atol=1e-14)
    assert state.t == 0.0


def test_build_ansatz_rejects_bad_input():
    grid = PeriodicGrid(102.4, 256)
    u0 = gaussian_profile(grid, 0.2)
    with pytest.raises(ConfigError):
        build_ansatz(u0, 0.11, PARAMS2)  # period/eps not an integer
    from artifact.spectral import SpectralField
    biased = SpectralField.from_values(grid, u0.values + 1.0)
    with pytest.raises(ValueError):
        build_ansatz(biased, 0.4, PARAMS2)


def test_residual_cancellation_between_parts():
    # the interaction part must cancel the wave-operator part to leading
    # order; the sum sits far below either term
    grid = PeriodicGrid(102.4, 512)
    u0 = gaussian_profile(grid, 0.7)
    eps = 0.05
    cutoff = min(255, math.ceil(3.0 / eps ** 2))
    accel, fpart = residual_fields(u0, eps, PARAMS2, cutoff)
    total = np.linalg.norm(accel + fpart)
    assert total < 0.02 * np.linalg.norm(accel)
    assert total < 0.02 * np.linalg.norm(fpart)


def test_residual_eval_decreases_with_epsilon():
    grid = PeriodicGrid(102.4, 512)
    u0 = gaussian_profile(grid, 0.7)
    r1 = residual_eval(u0, 0.2, 0.0, PARAMS2, residual_cutoff(
        ValidationConfig(alpha=2.0), 0.2, 512))
    r2 = residual_eval(u0, 0.1, 0.0, PARAMS2, residual_cutoff(
        ValidationConfig(alpha=2.0), 0.1, 1024))
    local_slope = math.log(r1.l2_norm / r2.l2_norm) / math.log(2.0)
    assert 2.8 < local_slope < 4.2  # near beta = 3.5 already at two points
    assert isinstance(r1, ResidualSample)
    assert r1.values is None
    kept = residual_eval(u0, 0.2, 0.0, PARAMS2, 75, keep_values=True)
    assert kept.values is not None and kept.values.size == 512


def test_residual_eval_rejects_incommensurate():
    grid = PeriodicGrid(102.4, 256)
    u0 = gaussian_profile(grid, 0.5)
    with pytest.raises(ConfigError):
        residual_eval(u0, 0.117, 0.0, PARAMS2, 10)


# ---------------------------------------------------------------------------
# pipelines (small but real)


def test_run_residual_sweep_smoke(tmp_path):
    cfg = _smoke_config(output=str(tmp_path / "res"))
    rows, report = run_residual_sweep(cfg)
    assert len(rows) == 3 * (cfg.checkpoints + 1)
    assert report.target_exponent == PARAMS2.beta
    assert report.slope > 1.5
    assert len(report.pairs) == 3
    for name in ("residual_sweep.csv", "residual_sweep.dat", "report.json"):
        assert (tmp_path / "res" / name).exists()
    with open(tmp_path / "res" / "report.json") as fh:
        payload = json.load(fh)
    assert payload["pipeline"] == "residual"
    assert payload["residual"]["slope"] == report.slope


def test_run_residual_sweep_deterministic(tmp_path):
    cfg_a = _smoke_config(output=str(tmp_path / "a"))
    cfg_b = _smoke_config(output=str(tmp_path / "b"))
    run_residual_sweep(cfg_a)
    run_residual_sweep(cfg_b)
    a = (tmp_path / "a" / "residual_sweep.csv").read_bytes()
    b = (tmp_path / "b" / "residual_sweep.csv").read_bytes()
    assert a == b


def test_run_validation_smoke(tmp_path):
    cfg = _smoke_config(output=str(tmp_path / "val"))
    result = run_validation(cfg)
    K = cfg.checkpoints
    assert len(result.rows) == 3 * (K + 1)
    for eps in (0.4, 0.32, 0.25):
        zero_rows = [row for row in result.rows
                     if abs(row[1] - eps) < 0.01 and row[2] == 0.0]
        assert len(zero_rows) == 1
        assert zero_rows[0][3] == 0.0 and zero_rows[0][4] == 0.0
    assert result.aborted == []
    assert result.mu_report.slope == result.mu_report.slope  # finite
    assert (tmp_path / "val" / "validation.csv").exists()
    assert (tmp_path / "val" / "report.json").exists()
    with open(tmp_path / "val" / "report.json") as fh:
        payload = json.load(fh)
    assert payload["pipeline"] == "validation"
    assert payload["aborted"] == []


def test_run_validation_bidirectional_and_energy(tmp_path):
    cfg = _smoke_config(bidirectional=True, energy_trace=True,
                        output=str(tmp_path / "bd"))
    result = run_validation(cfg)
    K = cfg.checkpoints
    assert len(result.rows) == 3 * (2 * K + 1)
    neg = [row for row in result.rows if row[2] < 0.0]
    pos = [row for row in result.rows if row[2] > 0.0]
    assert len(neg) == len(pos) == 3 * K
    # backward errors are the same order as forward ones
    sup_neg = max(row[3] for row in neg)
    sup_pos = max(row[3] for row in pos)
    assert 0.1 < sup_neg / sup_pos < 10.0
    assert result.energy_rows
    assert all(bool(row[5]) for row in result.energy_rows)
    assert (tmp_path / "bd" / "energy_trace.csv").exists()


def test_run_validation_parallel_matches_serial(tmp_path):
    cfg1 = _smoke_config(output=str(tmp_path / "s"))
    cfg2 = _smoke_config(output=str(tmp_path / "p"), jobs=3)
    run_validation(cfg1)
    run_validation(cfg2)
    a = (tmp_path / "s" / "validation.csv").read_bytes()
    b = (tmp_path / "p" / "validation.csv").read_bytes()
    assert a == b


def test_run_validation_all_runs_colliding_raises():
    cfg = _smoke_config(amplitude=10.0)
    with pytest.raises(BlowUpError) as info:
        run_validation(cfg)
    assert info.value.epsilon is not None


def test_shift_canary_moving_frame_matters():
    # comparing the lattice against the unshifted surrogate at the final
    # checkpoint must be strictly worse than the co-moving comparison
    params = PARAMS2
    period, n, eps = 102.4, 256, 0.4
    grid = PeriodicGrid(period, n)
    u0 = gaussian_profile(grid, 0.1)
    state = build_ansatz(u0, eps, params)
    tau_end = 0.05
    T = tau_end / eps ** params.alpha
    nsteps = math.ceil(T / 0.05)
    cfg = LatticeConfig(N=n, alpha=params.alpha, cutoff=30, dt=T / nsteps)
    out = run_steps(state, cfg, nsteps)
    bo_cfg = BOConfig(params=params, dtau=tau_end / 100.0)
    bo, _ = run_to(BOState(u=u0, tau=0.0), tau_end, bo_cfg)
    scale = eps ** (params.alpha - 1.0)
    shifted = sample_spectrum(bo.u.spectrum, period, n, -eps * params.c * T)
    plain = sample_spectrum(bo.u.spectrum, period, n, 0.0)
    mu_shifted = np.linalg.norm(out.r + scale * shifted)
    mu_plain = np.linalg.norm(out.r + scale * plain)
    assert mu_shifted < 0.5 * mu_plain


def test_error_energy_trace_rows():
    params = PARAMS2
    rng = np.random.default_rng(33)
    samples = []
    for i in range(3):
        mu = 0.01 * rng.standard_normal(64)
        nu = 0.01 * rng.standard_normal(64)
        rt = 0.02 * rng.standard_normal(64)
        samples.append((0.5 * i, mu, nu, rt))
    rows = error_energy_trace(samples, params, cutoff=20)
    assert len(rows) == 3
    for (t, H, ok, ratio) in rows:
        assert H >= 0.0
        assert ok
