"""Acceptance suite: the end-to-end guarantees this package commits to.

Each criterion gets one test and prints one line of the form

    criterion N (<name>): <measured values> -> PASS|FAIL

before asserting, so the verdicts are readable in captured output either way.
Criteria 3-7 compute physical observables at n_levels=64; criterion 8 repeats
the same computations at n_levels=128 and demands that nothing reported moved
by more than 1e-6.

Criterion 5 is held to a third-order small-time residual between the
closed-form propagator and exact exponentiation of the displaced-qubit
generator.  The measured residual is second order: after undoing the qubit
dressing, exact evolution under that generator produces no field
displacement at all, so the closed form's t^2 displacement is itself the
leading difference.  The bound is kept as written rather than loosened, and
the test fails honestly.  See tests below and test_dynamics.py for the
measured orders (discrepancy ~ t^2, split-product residual ~ t^3,
infidelity ~ t^4).
"""

import json
import math

import numpy as np
import pytest

from catforge.cli import main
from catforge.diagnostics import (
    expectation_a,
    fidelity,
    loglog_slope,
    propagator_discrepancy,
    truncation_leakage,
    wigner,
)
from catforge.dynamics import (
    PropagatorKind,
    ideal_cat,
    initial_state,
    make_cat,
    project_qubit,
    propagator,
)
from catforge.fock import TruncationConfig
from catforge.model import (
    DeviceParams,
    build_full_hamiltonian,
    build_polaron_transform,
    build_transformed_hamiltonian,
    derive_params,
)

BETA_GRID = (0.0, 0.1, 0.25, 0.3, 0.5)
GAMMA_GRID = (0.0, 0.2, math.pi / 2.0)


def report(num, name, ok, detail):
    print(f"criterion {num} ({name}): {detail} -> {'PASS' if ok else 'FAIL'}")


def sweet_spot(e_j=0.01, beta=0.3):
    params = DeviceParams(e_ch=0.25, e_j=e_j, n_g=0.5, gamma=0.2, beta=beta)
    return params, derive_params(params)


def offset_spot(e_j=0.01, beta=0.3):
    # n_g = 0.6 puts the qubit splitting at E_z = 0.1 with omega = 1
    params = DeviceParams(e_ch=0.25, e_j=e_j, n_g=0.6, gamma=0.2, beta=beta)
    return params, derive_params(params)


def compute_observables(n_levels):
    """Every reported observable from criteria 3-7 at one truncation."""
    cfg = TruncationConfig(n_levels=n_levels)
    obs = {}

    # criterion 3: transformed vs JC evolution fidelity, omega t <= 5
    params, derived = sweet_spot()
    psi0 = initial_state(cfg)
    ts3 = np.linspace(0.25, 5.0, 20)
    fids = []
    for t in ts3:
        u_full = propagator(PropagatorKind.EXACT_TRANSFORMED, params, derived,
                            cfg, float(t))
        u_jc = propagator(PropagatorKind.EXACT_JC, params, derived, cfg,
                          float(t))
        fids.append(fidelity(u_full @ psi0, u_jc @ psi0))
    obs["jc_fidelities"] = np.array(fids)

    # criterion 4: displacement growth of the e-projected branch
    ts4 = np.linspace(0.25, 2.0, 8)
    amps = []
    for t in ts4:
        u = propagator(PropagatorKind.ANALYTIC, params, derived, cfg, float(t))
        branch, _ = project_qubit(u @ psi0, "e")
        amps.append(abs(expectation_a(branch)))
    obs["branch_amplitudes"] = np.array(amps)
    obs["branch_slope"] = loglog_slope(ts4, amps)
    obs["branch_targets"] = derived.omega ** 2 * abs(params.beta) * ts4 ** 2 / 4.0

    # criterion 5: analytic vs exactly exponentiated JC generator
    params5, derived5 = offset_spot()
    ts5 = np.array([0.01, 0.02, 0.04, 0.08, 0.16])
    discs = []
    for t in ts5:
        u_an = propagator(PropagatorKind.ANALYTIC, params5, derived5, cfg,
                          float(t))
        u_jc = propagator(PropagatorKind.EXACT_JC, params5, derived5, cfg,
                          float(t))
        discs.append(propagator_discrepancy(u_an, u_jc, 32, n_levels=n_levels))
    obs["bch_discrepancies"] = np.array(discs)
    obs["bch_exponent"] = loglog_slope(ts5, discs)

    # criterion 6: measurement branch statistics
    ts6 = np.linspace(0.25, 2.0, 8)
    defect = 0.0
    for t in ts6:
        pair = make_cat(params, derived, cfg, float(t))
        defect = max(defect, abs(pair.prob_e + pair.prob_g - 1.0))
    obs["prob_sum_defect"] = defect
    t_unit = math.sqrt(4.0 / (derived.omega ** 2 * abs(params.beta)))
    pair = make_cat(params, derived, cfg, t_unit)
    obs["prob_e_at_unit"] = pair.prob_e
    mu_t = np.exp(-1j * derived.omega * t_unit) * pair.beta_tilde
    obs["cat_fidelity_plus"] = fidelity(
        pair.phi_plus, ideal_cat(mu_t, pair.phase_theta, +1, cfg))
    obs["cat_fidelity_minus"] = fidelity(
        pair.phi_minus, ideal_cat(mu_t, pair.phase_theta, -1, cfg))

    # criterion 7: Wigner interference minimum at |beta~| = 1.5
    t_cat = math.sqrt(4.0 * 1.5 / (derived.omega ** 2 * abs(params.beta)))
    pair = make_cat(params, derived, cfg, t_cat)
    obs["wigner_min"] = float(wigner(pair.phi_plus).values.min())
    obs["wigner_leakage"] = truncation_leakage(pair.phi_plus, cfg)
    return obs


@pytest.fixture(scope="module")
def obs64():
    return compute_observables(64)


@pytest.fixture(scope="module")
def obs128():
    return compute_observables(128)


def test_criterion_1_transform_unitarity():
    cfg = TruncationConfig(n_levels=64)
    worst = 0.0
    for beta in BETA_GRID:
        for gamma in GAMMA_GRID:
            params = DeviceParams(e_ch=0.25, e_j=0.01, n_g=0.5,
                                  gamma=gamma, beta=beta)
            t_op = build_polaron_transform(params, derive_params(params), cfg)
            worst = max(worst, t_op.unitarity_defect())
    ok = worst < 1e-10
    report(1, "transform unitarity", ok, f"max defect {worst:.3e}, tol 1e-10")
    assert ok


def test_criterion_2_transformed_hamiltonian_identity():
    cfg = TruncationConfig(n_levels=128)
    params = DeviceParams(e_ch=0.25, e_j=0.05, n_g=0.6, gamma=0.2, beta=0.3)
    derived = derive_params(params)
    assert derived.omega == pytest.approx(1.0)
    assert derived.e_z == pytest.approx(0.1)
    h = build_full_hamiltonian(params, derived, cfg)
    t_op = build_polaron_transform(params, derived, cfg)
    conjugated = (t_op @ h @ t_op.dag()).entries
    direct = build_transformed_hamiltonian(params, derived, cfg).entries
    block = np.concatenate([np.arange(32), 128 + np.arange(32)])
    diff = np.max(np.abs((conjugated - direct)[np.ix_(block, block)]))
    ok = diff < 1e-6
    report(2, "transformed Hamiltonian identity", ok,
           f"projected max |diff| {diff:.3e}, tol 1e-6")
    assert ok


def test_criterion_3_jc_regime_fidelity(obs64):
    worst = float(obs64["jc_fidelities"].min())
    ok = worst >= 0.99
    report(3, "JC regime fidelity", ok,
           f"min fidelity {worst:.6f} over omega*t <= 5, bound 0.99")
    assert ok


def test_criterion_4_displacement_growth(obs64):
    point = float(np.max(np.abs(obs64["branch_amplitudes"]
                                - obs64["branch_targets"])))
    slope = obs64["branch_slope"]
    ok = point < 1e-8 and abs(slope - 2.0) <= 0.01
    report(4, "t^2 displacement law", ok,
           f"max pointwise error {point:.3e} (tol 1e-8), "
           f"slope {slope:.4f} (2.000 +/- 0.01)")
    assert ok


def test_criterion_5_bch_residual_order(obs64):
    exponent = obs64["bch_exponent"]
    at_001 = float(obs64["bch_discrepancies"][0])
    ok = 2.5 <= exponent <= 3.5 and at_001 < 1e-5
    report(5, "closed-form residual order", ok,
           f"fitted exponent {exponent:.4f} (required [2.5, 3.5]), "
           f"discrepancy at omega*t=0.01 is {at_001:.3e} (required < 1e-5)")
    # Expected to fail: the measured residual is second order because exact
    # evolution under the displaced-qubit generator produces no displacement,
    # so the closed form's t^2 drift is the leading difference.  The
    # third-order behaviour shows up only for the split-product propagator
    # (see test_dynamics.py).  Kept as written rather than weakened.
    assert ok


def test_criterion_6_measurement_branches(obs64):
    defect = obs64["prob_sum_defect"]
    prob_e = obs64["prob_e_at_unit"]
    target = (1.0 + math.exp(-2.0)) / 2.0
    fid_p = obs64["cat_fidelity_plus"]
    fid_m = obs64["cat_fidelity_minus"]
    ok = (defect < 1e-12 and abs(prob_e - target) < 1e-6
          and fid_p >= 1.0 - 1e-8 and fid_m >= 1.0 - 1e-8)
    report(6, "measurement branch statistics", ok,
           f"prob sum defect {defect:.3e} (tol 1e-12), "
           f"prob_e {prob_e:.8f} vs {target:.8f} (tol 1e-6), "
           f"cat fidelities {fid_p:.10f}/{fid_m:.10f} (>= 1-1e-8)")
    assert ok


def test_criterion_7_wigner_negativity(obs64):
    w_min = obs64["wigner_min"]
    ok = w_min < -0.01
    report(7, "Wigner negativity", ok,
           f"grid minimum {w_min:.4f}, required < -0.01")
    assert ok


def test_criterion_8_truncation_convergence(obs64, obs128):
    worst_name, worst = "", 0.0
    for name in sorted(obs64):
        delta = float(np.max(np.abs(np.asarray(obs64[name])
                                    - np.asarray(obs128[name]))))
        if delta > worst:
            worst_name, worst = name, delta
    ok = worst < 1e-6
    report(8, "truncation convergence", ok,
           f"largest shift 64->128 is {worst:.3e} ({worst_name}), tol 1e-6")
    assert ok


def test_criterion_9_determinism(tmp_path):
    jobs = [
        (["derive"], ["derive.json"]),
        (["validate"], ["validate.csv"]),
        (["cat", "--t-steps", "4", "--wigner"], ["cat.csv", "wigner.csv"]),
        (["compare", "--t-stop", "0.3", "--t-steps", "3"], ["compare.csv"]),
        (["scaling", "--t-steps", "4"], ["scaling.csv"]),
    ]
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n_x = 21\nn_p = 21\n")
    stable = True
    for argv, names in jobs:
        out = tmp_path / argv[0]
        full = argv + ["--config", str(cfg), "--out", str(out)]
        assert main(full) == 0
        first = {name: (out / name).read_bytes() for name in names}
        assert main(full) == 0
        for name in names:
            if (out / name).read_bytes() != first[name]:
                stable = False
    report(9, "determinism", stable,
           "reran every subcommand with identical config; "
           "outputs byte-identical" if stable else "outputs differed")
    assert stable
