"""Tests for fidelity, Wigner sampling, discrepancy and leakage diagnostics."""

import math

import numpy as np
import pytest

from catforge.diagnostics import (
    WignerGrid,
    expectation_a,
    fidelity,
    loglog_slope,
    propagator_discrepancy,
    truncation_leakage,
    wigner,
)
from catforge.dynamics import ideal_cat
from catforge.fock import (
    Operator,
    StateVector,
    TruncationConfig,
    TruncationWarning,
    coherent_state,
    fock_state,
    vacuum_state,
)

CFG64 = TruncationConfig(n_levels=64)


def test_fidelity_self_and_orthogonal():
    vac = vacuum_state(CFG64)
    assert fidelity(vac, vac) == pytest.approx(1.0)
    assert fidelity(vac, fock_state(1, CFG64)) == pytest.approx(0.0, abs=1e-15)


def test_fidelity_coherent_pair():
    mu = 0.6
    value = fidelity(coherent_state(mu, CFG64), coherent_state(-mu, CFG64))
    assert abs(value - math.exp(-4.0 * mu ** 2)) < 1e-8


def test_fidelity_bounds_on_random_states():
    rng = np.random.default_rng(11)
    for _ in range(20):
        raw1 = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        raw2 = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        s1 = StateVector(raw1 / np.linalg.norm(raw1))
        s2 = StateVector(raw2 / np.linalg.norm(raw2))
        value = fidelity(s1, s2)
        assert 0.0 <= value <= 1.0 + 1e-12
        assert abs(value - fidelity(s2, s1)) < 1e-14


def test_fidelity_dimension_mismatch():
    with pytest.raises(ValueError, match="dimensions differ"):
        fidelity(vacuum_state(CFG64), vacuum_state(TruncationConfig(n_levels=32)))


def test_expectation_a_vacuum_and_coherent():
    assert expectation_a(vacuum_state(CFG64)) == 0.0
    for mu in (0.5, 1.2 - 0.7j, 2.0j):
        assert abs(expectation_a(coherent_state(mu, CFG64)) - mu) < 1e-8


def test_expectation_a_even_cat_vanishes():
    cat = ideal_cat(1.2, 0.0, +1, CFG64)
    assert abs(expectation_a(cat)) < 1e-10


def test_wigner_vacuum_origin():
    grid = wigner(vacuum_state(CFG64), -0.5, 0.5, -0.5, 0.5, n_x=3, n_p=3)
    assert abs(grid.values[1, 1] - 2.0 / math.pi) < 1e-6


def test_wigner_coherent_peak_location():
    mu = 0.8 + 0.3j
    grid = wigner(coherent_state(mu, CFG64))
    i, j = np.unravel_index(np.argmax(grid.values), grid.values.shape)
    expect_i = int(np.argmin(np.abs(grid.x_axis - math.sqrt(2.0) * mu.real)))
    expect_j = int(np.argmin(np.abs(grid.p_axis - math.sqrt(2.0) * mu.imag)))
    assert (i, j) == (expect_i, expect_j)


def test_wigner_even_cat_interference_negative():
    cat = ideal_cat(1.5, 0.0, +1, CFG64)
    grid = wigner(cat)
    assert grid.values.min() < 0.0


def test_wigner_riemann_sum_is_two_under_parity_convention():
    # with x = sqrt(2) Re(alpha) axes and the 2/pi origin value, dx dp is
    # twice d^2alpha, so the grid sum approaches 2 rather than 1
    state = coherent_state(0.5, CFG64)
    grid = wigner(state, -4.0, 4.0, -4.0, 4.0, n_x=81, n_p=81)
    dx = grid.x_axis[1] - grid.x_axis[0]
    dp = grid.p_axis[1] - grid.p_axis[0]
    total = float(grid.values.sum()) * dx * dp
    assert abs(total / 2.0 - 1.0) <= 0.02


def test_wigner_guard_warns_outside_safe_window():
    state = vacuum_state(TruncationConfig(n_levels=8))
    with pytest.warns(TruncationWarning):
        wigner(state, -4.0, 4.0, -4.0, 4.0, n_x=5, n_p=5)


def test_wigner_grid_validation():
    with pytest.raises(ValueError, match="ordered"):
        WignerGrid(1.0, -1.0, -1.0, 1.0, 3, 3, np.zeros((3, 3)))
    with pytest.raises(ValueError, match="finite"):
        WignerGrid(-1.0, 1.0, -1.0, 1.0, 2, 2,
                   np.array([[0.0, math.inf], [0.0, 0.0]]))
    with pytest.raises(ValueError, match="shape"):
        WignerGrid(-1.0, 1.0, -1.0, 1.0, 3, 3, np.zeros((2, 2)))


def test_discrepancy_identical_and_phase_shifted():
    rng = np.random.default_rng(5)
    raw = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    q, _ = np.linalg.qr(raw)
    u = Operator(q, tag="unitary")
    assert propagator_discrepancy(u, u, 32) < 1e-14
    shifted = Operator(np.exp(0.7j) * q, tag="unitary")
    assert propagator_discrepancy(u, shifted, 32) < 1e-12
    for phi in (0.1, 2.0, -1.3):
        shifted = Operator(np.exp(1j * phi) * q, tag="unitary")
        assert propagator_discrepancy(u, shifted, 32) < 1e-12


def test_discrepancy_detects_real_differences():
    eye = Operator(np.eye(16), tag="unitary")
    other = Operator(np.diag(np.exp(1j * 0.01 * np.arange(16))), tag="unitary")
    assert propagator_discrepancy(eye, other, 16) > 1e-3


def test_discrepancy_block_restriction():
    n = 8
    m1 = np.eye(2 * n, dtype=complex)
    m2 = np.eye(2 * n, dtype=complex)
    m2[n - 1, n - 1] = -1.0  # corrupt the top of the e-block ladder
    u1 = Operator(m1, tag="unitary")
    u2 = Operator(m2, tag="unitary")
    assert propagator_discrepancy(u1, u2, 4, n_levels=n) < 1e-14
    assert propagator_discrepancy(u1, u2, n, n_levels=n) > 1.0


def test_discrepancy_validation():
    u = Operator(np.eye(8), tag="unitary")
    with pytest.raises(ValueError, match="rank"):
        propagator_discrepancy(u, u, 9)
    with pytest.raises(ValueError, match="does not match"):
        propagator_discrepancy(u, u, 2, n_levels=8)
    with pytest.raises(ValueError, match="dimensions differ"):
        propagator_discrepancy(u, Operator(np.eye(4)), 2)


def test_truncation_leakage_values():
    assert truncation_leakage(vacuum_state(CFG64), CFG64) == 0.0
    assert truncation_leakage(coherent_state(1.0, CFG64), CFG64) < 1e-12
    small = TruncationConfig(n_levels=20)
    with pytest.warns(TruncationWarning):
        big_state = coherent_state(4.0, small)
    assert truncation_leakage(big_state, small) > 0.01
    with pytest.raises(ValueError, match="does not match"):
        truncation_leakage(vacuum_state(CFG64), small)


def test_truncation_leakage_monotone_in_amplitude():
    previous = -1.0
    for mu in (0.5, 1.0, 1.5, 2.0):
        current = truncation_leakage(coherent_state(mu, CFG64), CFG64)
        assert current >= previous
        previous = current


def test_loglog_slope_recovers_power_laws():
    ts = np.array([0.01, 0.02, 0.05, 0.1])
    assert abs(loglog_slope(ts, 3.0 * ts ** 2) - 2.0) < 1e-12
    assert abs(loglog_slope(ts, 0.5 * ts ** 3) - 3.0) < 1e-12
    assert math.isnan(loglog_slope([1.0], [1.0]))
    assert math.isnan(loglog_slope([0.0, 0.0], [1.0, 2.0]))
