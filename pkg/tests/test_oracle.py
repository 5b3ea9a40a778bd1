"""Tests for the split-step grid oracle and cross-method comparison."""

import numpy as np
import pytest

from conftest import coherent_state_exact
from tdse import (
    CoefficientState,
    EdgeLeakage,
    GaussianPacket,
    GridMismatch,
    OracleConfig,
    PhysicalParams,
    PotentialModel,
    StepperConfig,
    WaveGrid,
    compare_methods,
    gaussian_coefficients,
    l2_distance,
    norm_squared,
    observables,
    parse_potential,
    split_step_evolve,
    state_on_oracle_grid,
)
from tdse.oracle import oracle_grid_xs

PARAMS = PhysicalParams()
FREE = PotentialModel({})
HARMONIC = parse_potential("x^2/2")
GROUND_WIDTH = 1.0 / np.sqrt(2.0)


def test_oracle_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(-1.0, 1.0, 100, 0.1, 1)  # not a power of two
    with pytest.raises(ValueError):
        OracleConfig(-1.0, 1.0, 512, -0.1, 1)
    with pytest.raises(ValueError):
        OracleConfig(1.0, -1.0, 512, 0.1, 1)
    cfg = OracleConfig(-8.0, 8.0, 512, 0.1, 0)  # zero steps allowed: identity
    assert cfg.dx == pytest.approx(16.0 / 512)


def test_zero_steps_is_identity():
    cfg = OracleConfig(-15.0, 15.0, 512, dt=0.1, steps=0)
    start = state_on_oracle_grid(gaussian_coefficients(GaussianPacket(0, 1, 0)), cfg)
    snaps = split_step_evolve(start, FREE, PARAMS, cfg)
    assert len(snaps) == 1
    assert np.array_equal(snaps[0].values, start.values)


def test_free_gaussian_spreading_law():
    # <x^2>(t) = sigma^2 * (1 + (hbar t / 2 m sigma^2)^2) -> 2.0 at t = 2
    cfg = OracleConfig(-25.0, 25.0, 1024, dt=1e-3, steps=2000, snapshot_stride=2000)
    start = state_on_oracle_grid(gaussian_coefficients(GaussianPacket(0, 1, 0)), cfg)
    snaps = split_step_evolve(start, FREE, PARAMS, cfg)
    assert observables(snaps[-1], PARAMS).mean_x2 == pytest.approx(2.0, abs=1e-3)


def test_harmonic_coherent_oscillation():
    steps = 2048
    cfg = OracleConfig(-12.0, 12.0, 1024, dt=np.pi / steps, steps=steps, snapshot_stride=steps)
    packet = gaussian_coefficients(GaussianPacket(1.0, GROUND_WIDTH, 0.0))
    start = state_on_oracle_grid(packet, cfg)
    snaps = split_step_evolve(start, HARMONIC, PARAMS, cfg)
    assert observables(snaps[-1], PARAMS).mean_x == pytest.approx(-1.0, abs=1e-3)


def test_unitarity_norm_drift():
    cfg = OracleConfig(-12.0, 12.0, 1024, dt=1e-4, steps=10**4, snapshot_stride=10**4)
    packet = gaussian_coefficients(GaussianPacket(1.0, GROUND_WIDTH, 0.0))
    start = state_on_oracle_grid(packet, cfg)
    snaps = split_step_evolve(start, HARMONIC, PARAMS, cfg)
    drift = abs(norm_squared(snaps[-1]) - norm_squared(snaps[0])) / norm_squared(snaps[0])
    assert drift <= 1e-10


def test_second_order_convergence():
    # time-splitting error vanishes identically for V = 0, so the order is
    # measured on the harmonic coherent state against its closed form
    packet = gaussian_coefficients(GaussianPacket(1.0, GROUND_WIDTH, 0.0))
    errors = []
    for steps in (50, 100, 200):
        cfg = OracleConfig(-12.0, 12.0, 1024, dt=1.0 / steps, steps=steps, snapshot_stride=steps)
        start = state_on_oracle_grid(packet, cfg)
        snaps = split_step_evolve(start, HARMONIC, PARAMS, cfg)
        reference = state_on_oracle_grid(coherent_state_exact(1.0, 1.0), cfg)
        errors.append(l2_distance(reference, snaps[-1]))
    for coarse, fine in zip(errors, errors[1:]):
        assert 3.4 <= coarse / fine <= 4.6


def test_edge_leakage_detected():
    cfg = OracleConfig(-8.0, 8.0, 512, dt=0.01, steps=10)
    packet = gaussian_coefficients(GaussianPacket(6.0, 1.0, 0.0))
    start = state_on_oracle_grid(packet, cfg)
    with pytest.raises(EdgeLeakage):
        split_step_evolve(start, FREE, PARAMS, cfg)


def test_l2_distance_identity_and_phase():
    cfg = OracleConfig(-10.0, 10.0, 512, dt=0.1, steps=1)
    grid = state_on_oracle_grid(gaussian_coefficients(GaussianPacket(0, 1, 0)), cfg)
    assert l2_distance(grid, grid) == 0.0
    rotated = WaveGrid(grid.xmin, grid.dx, grid.values * np.exp(0.731j), grid.time)
    assert l2_distance(grid, rotated) <= 1e-12


def test_l2_distance_orthogonal_states():
    cfg = OracleConfig(-10.0, 10.0, 512, dt=0.1, steps=1)
    xs = oracle_grid_xs(cfg)
    even = WaveGrid(cfg.xmin, cfg.dx, np.exp(-(xs**2) / 2).astype(complex))
    odd = WaveGrid(cfg.xmin, cfg.dx, (xs * np.exp(-(xs**2) / 2)).astype(complex))
    assert l2_distance(even, odd) == pytest.approx(np.sqrt(2.0), abs=1e-9)


def test_l2_distance_grid_mismatch():
    a = WaveGrid(-1.0, 0.25, np.ones(9, dtype=complex))
    b = WaveGrid(-1.0, 0.25, np.ones(10, dtype=complex))
    with pytest.raises(GridMismatch):
        l2_distance(a, b)
    c = WaveGrid(-2.0, 0.25, np.ones(9, dtype=complex))
    with pytest.raises(GridMismatch):
        l2_distance(a, c)


def test_compare_methods_free_case():
    init = gaussian_coefficients(GaussianPacket(0, 1, 0))
    stepper = StepperConfig(dt=1e-3, steps=1000, integrator="rk4", snapshot_stride=100)
    oracle = OracleConfig(-25.0, 25.0, 1024, dt=1e-3, steps=1000)
    report = compare_methods(init, FREE, PARAMS, stepper, oracle)
    assert report.stepper_status == "completed"
    assert len(report.times) == 11
    assert report.l2[-1] <= 1e-4
    assert abs(report.d_mean_x[-1]) <= 1e-6
    assert abs(report.d_norm[-1]) <= 1e-6


def test_compare_methods_harmonic_case():
    init = CoefficientState([-0.125, 0.5, -0.5])
    stepper = StepperConfig(dt=1e-4, steps=10**4, snapshot_stride=10**4)
    oracle = OracleConfig(-12.0, 12.0, 1024, dt=1.0 / 2048, steps=2048, snapshot_stride=2048)
    report = compare_methods(init, HARMONIC, PARAMS, stepper, oracle)
    assert report.l2[-1] <= 1e-3


def test_compare_methods_horizon_mismatch():
    init = gaussian_coefficients(GaussianPacket(0, 1, 0))
    stepper = StepperConfig(dt=1e-3, steps=1000)
    oracle = OracleConfig(-25.0, 25.0, 1024, dt=1e-3, steps=999)
    with pytest.raises(ValueError):
        compare_methods(init, FREE, PARAMS, stepper, oracle)


def test_cross_validation_transitivity():
    # quadratic-closure case: series flow (rk4, small dt), the closed form,
    # and the oracle agree pairwise
    x0 = 1.0
    init = gaussian_coefficients(GaussianPacket(x0, GROUND_WIDTH, 0.0))
    cfg = OracleConfig(-12.0, 12.0, 1024, dt=1.0 / 1024, steps=1024, snapshot_stride=1024)

    stepper = StepperConfig(dt=1e-3, steps=1000, integrator="rk4", snapshot_stride=1000)
    from tdse import propagate

    series_final = propagate(init, HARMONIC, PARAMS, stepper).final
    series_grid = state_on_oracle_grid(series_final, cfg)

    closed_grid = state_on_oracle_grid(coherent_state_exact(x0, 1.0), cfg)

    start = state_on_oracle_grid(init, cfg)
    oracle_grid = split_step_evolve(start, HARMONIC, PARAMS, cfg)[-1]

    assert l2_distance(series_grid, closed_grid) <= 1e-8
    assert l2_distance(closed_grid, oracle_grid) <= 1e-5
    assert l2_distance(series_grid, oracle_grid) <= 1e-5 + 1e-8
