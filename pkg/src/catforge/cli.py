"""Command-line entry points.

Subcommands:

* ``derive``: resolve device parameters and print the derived frequencies
  and regime report as JSON.
* ``validate``: run the invariant suite (transform unitarity, conjugation
  consistency, Hermiticity tags, coherent-state oracles, ...) and report
  pass/fail per check.
* ``cat``: sweep the protocol over the time grid and record cat fidelities,
  branch probabilities and leakage; optionally emit a Wigner grid.
* ``compare``: sweep all propagator kinds and record phase-aligned
  discrepancies and state infidelities, with log-log exponent fits.
* ``scaling``: record the displacement growth of the pre-measurement branch
  and the time needed to reach a target cat size.

Exit codes: 0 success, 1 validation failure, 2 configuration error.  All
outputs are deterministic: fixed iteration order, 17-significant-digit
numbers, no timestamps.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, build_run_config, parse_config_file
from .diagnostics import (
    expectation_a,
    fidelity,
    loglog_slope,
    propagator_discrepancy,
    truncation_leakage,
    wigner,
)
from .dynamics import (
    PropagatorKind,
    ideal_cat,
    initial_state,
    make_cat,
    project_qubit,
    propagator,
    propagator_factored,
)
from .fock import Operator, TruncationConfig, coherent_state, displacement, \
    make_annihilation, matrix_exponential, operator_cosine, operator_sine, \
    vacuum_state
from .model import (
    DeviceParams,
    build_full_hamiltonian,
    build_jc_hamiltonian,
    build_polaron_transform,
    build_polaron_transform_pauli,
    build_transformed_hamiltonian,
    derive_params,
    regime_check,
)


def _format_number(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {key: _jsonable(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(val) for val in obj]
    if isinstance(obj, complex):
        return {"real": obj.real, "imag": obj.imag}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(
        json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def _write_csv(path: Path, cfg: RunConfig, header: list[str], rows: list[list],
               extra_comments: tuple[str, ...] = (),
               trailing_comments: tuple[str, ...] = ()) -> None:
    lines = ["# config: " + " ".join(f"{k}={v}" for k, v in cfg.resolved_items())]
    lines.extend("# " + comment for comment in extra_comments)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_format_number(cell) for cell in row))
    lines.extend("# " + comment for comment in trailing_comments)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _device_payload(params: DeviceParams, derived, report) -> dict:
    return {
        "device": {
            "e_ch": params.e_ch,
            "e_j": params.e_j,
            "n_g": params.n_g,
            "gamma": params.gamma,
            "beta": complex(params.beta),
        },
        "derived": {
            "omega": derived.omega,
            "e_z": derived.e_z,
            "alpha": complex(derived.alpha),
            "regime_ratio": derived.regime_ratio,
        },
        "regime": {
            "ratio": report.ratio,
            "beta_ok": report.beta_ok,
            "jc_valid": report.jc_valid,
            "threshold": report.threshold,
        },
    }


def cmd_derive(cfg: RunConfig, out_dir: Path, args) -> int:
    params = cfg.device_params()
    derived = derive_params(params)
    report = regime_check(derived, params, cfg.jc_threshold)
    payload = _device_payload(params, derived, report)
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    print(text)
    _write_json(out_dir / "derive.json", payload)
    return 0


def _restricted_diff(m1: np.ndarray, m2: np.ndarray, rank: int, n_levels: int) -> float:
    idx = np.concatenate([np.arange(rank), n_levels + np.arange(rank)])
    sub = m1[np.ix_(idx, idx)] - m2[np.ix_(idx, idx)]
    return float(np.max(np.abs(sub)))


def cmd_validate(cfg: RunConfig, out_dir: Path, args) -> int:
    params = cfg.device_params()
    derived = derive_params(params)
    trunc = cfg.truncation()
    checks: list[dict] = []

    def add(name: str, value: float, tol: float) -> None:
        checks.append({
            "name": name,
            "value": float(value),
            "tolerance": float(tol),
            "passed": bool(value <= tol),
        })

    # Transform unitarity and construction agreement over the coupling grid.
    betas = (0.0, 0.1, 0.25, 0.3, 0.5)
    gammas = (0.0, 0.2, math.pi / 2.0)
    worst_unit = 0.0
    worst_agree = 0.0
    for beta in betas:
        for gamma in gammas:
            p_grid = DeviceParams(e_ch=params.e_ch, e_j=params.e_j, n_g=params.n_g,
                                  gamma=gamma, beta=beta)
            d_grid = derive_params(p_grid)
            t_block = build_polaron_transform(p_grid, d_grid, trunc)
            t_pauli = build_polaron_transform_pauli(p_grid, d_grid, trunc)
            worst_unit = max(worst_unit, t_block.unitarity_defect())
            worst_agree = max(
                worst_agree, float(np.max(np.abs(t_block.entries - t_pauli.entries)))
            )
    add("transform_unitarity_grid", worst_unit, 1e-10)
    add("transform_construction_agreement", worst_agree, 1e-13)

    # Conjugation consistency: T H T^dag against the closed form, away from
    # the truncation edge.  Pinned at 128 levels, rank-32 restriction.
    p_conj = DeviceParams(e_ch=0.25, e_j=0.05, n_g=0.6, gamma=0.2, beta=0.3)
    d_conj = derive_params(p_conj)
    t_conj = TruncationConfig(n_levels=128, leakage_fraction=cfg.leakage_fraction)
    t_op = build_polaron_transform(p_conj, d_conj, t_conj).entries
    h_full = build_full_hamiltonian(p_conj, d_conj, t_conj).entries
    h_closed = build_transformed_hamiltonian(p_conj, d_conj, t_conj).entries
    conj = t_op @ h_full @ t_op.conj().T
    add("conjugation_consistency",
        _restricted_diff(conj, h_closed, 32, t_conj.n_levels), 1e-6)

    # Hermiticity of every Hamiltonian builder at the configured parameters.
    herm = max(
        build_full_hamiltonian(params, derived, trunc).hermiticity_defect(),
        build_transformed_hamiltonian(params, derived, trunc).hermiticity_defect(),
        build_jc_hamiltonian(params, derived, trunc).hermiticity_defect(),
    )
    add("hamiltonian_hermiticity", herm, 1e-12)

    # Displacement against the Poisson amplitudes of a displaced vacuum.
    disp = displacement(1.0, trunc)
    vac = vacuum_state(trunc)
    displaced = disp @ vac
    worst_poisson = 0.0
    for n in range(6):
        target = math.exp(-1.0) / math.factorial(n)
        worst_poisson = max(
            worst_poisson, abs(abs(displaced.amplitudes[n]) ** 2 - target)
        )
    add("displacement_poisson_amplitudes", worst_poisson, 1e-10)

    mu = 0.8 + 0.3j
    add("coherent_expectation",
        abs(expectation_a(coherent_state(mu, trunc)) - mu), 1e-8)

    mu_ov = 0.7
    overlap = complex(np.vdot(coherent_state(mu_ov, trunc).amplitudes,
                              coherent_state(-mu_ov, trunc).amplitudes))
    add("coherent_overlap",
        abs(overlap - math.exp(-2.0 * mu_ov ** 2)), 1e-8)

    # Seeded random anti-Hermitian generators must exponentiate to unitaries.
    rng = np.random.default_rng(cfg.seed)
    worst_expm = 0.0
    for _ in range(20):
        raw = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
        gen = Operator(raw - raw.conj().T)
        worst_expm = max(worst_expm, matrix_exponential(gen).unitarity_defect())
    add("exponential_unitarity_random", worst_expm, 1e-10)

    from .model import _cosine_argument
    arg = _cosine_argument(params, trunc)
    cos_m = operator_cosine(arg).entries
    sin_m = operator_sine(arg).entries
    add("trig_identity",
        float(np.max(np.abs(cos_m @ cos_m + sin_m @ sin_m - np.eye(trunc.n_levels)))),
        1e-10)

    a_op = make_annihilation(trunc).entries
    comm = a_op @ a_op.conj().T - a_op.conj().T @ a_op - np.eye(trunc.n_levels)
    half = trunc.n_levels // 2
    add("ladder_commutator_interior",
        float(np.max(np.abs(comm[:half, :half]))), 1e-12)

    inv = displacement(0.7j, trunc) @ displacement(-0.7j, trunc)
    add("displacement_inverse",
        float(np.max(np.abs(inv.entries - np.eye(trunc.n_levels)))), 1e-10)

    worst_prob = 0.0
    for t in (0.5, 1.5):
        pair = make_cat(params, derived, trunc, t, PropagatorKind.ANALYTIC)
        worst_prob = max(worst_prob, abs(pair.prob_e + pair.prob_g - 1.0))
    add("branch_probability_conservation", worst_prob, 1e-12)

    all_passed = all(check["passed"] for check in checks)
    for check in checks:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status}  {check['name']}: value={check['value']:.3e} "
              f"tol={check['tolerance']:.1e}")
    print(f"validate: {sum(c['passed'] for c in checks)}/{len(checks)} checks passed")

    header = ["name", "value", "tolerance", "passed"]
    rows = [[c["name"], c["value"], c["tolerance"], c["passed"]] for c in checks]
    _write_csv(out_dir / "validate.csv", cfg, header, rows)
    _write_json(out_dir / "validate.json",
                {"checks": checks, "all_passed": all_passed})
    return 0 if all_passed else 1


def cmd_cat(cfg: RunConfig, out_dir: Path, args) -> int:
    params = cfg.device_params()
    derived = derive_params(params)
    trunc = cfg.truncation()
    kind = cfg.propagator_kind()
    ts = cfg.time_grid()

    header = ["t", "abs_beta_tilde", "abs_expectation_a", "fidelity_vs_ideal",
              "prob_e", "prob_g", "leakage", "flag"]
    rows: list[list] = []
    last_pair = None
    for t in ts:
        t = float(t)
        try:
            pair = make_cat(params, derived, trunc, t, kind)
            u = propagator(kind, params, derived, trunc, t)
            branch_e, _ = project_qubit(u @ initial_state(trunc), "e")
            mu_t = np.exp(-1j * derived.omega * t) * pair.beta_tilde
            target = ideal_cat(mu_t, pair.phase_theta, +1, trunc)
            rows.append([
                t,
                abs(pair.beta_tilde),
                abs(expectation_a(branch_e)),
                fidelity(pair.phi_plus, target),
                pair.prob_e,
                pair.prob_g,
                truncation_leakage(pair.phi_plus, trunc),
                "",
            ])
            last_pair = pair
        except ValueError as exc:
            rows.append([t, math.nan, math.nan, math.nan, math.nan, math.nan,
                         math.nan, str(exc).replace(",", ";")])
    _write_csv(out_dir / "cat.csv", cfg, header, rows)

    outputs = ["cat.csv"]
    if getattr(args, "wigner", False) and last_pair is not None:
        grid = wigner(last_pair.phi_plus, cfg.x_min, cfg.x_max,
                      cfg.p_min, cfg.p_max, cfg.n_x, cfg.n_p)
        wigner_rows = []
        xs = grid.x_axis
        ps = grid.p_axis
        for i in range(grid.n_x):
            for j in range(grid.n_p):
                wigner_rows.append([float(xs[i]), float(ps[j]),
                                    float(grid.values[i, j])])
        _write_csv(
            out_dir / "wigner.csv", cfg, ["x", "p", "w"], wigner_rows,
            extra_comments=(
                "convention: x = sqrt(2) Re(alpha), p = sqrt(2) Im(alpha); "
                "vacuum origin value 2/pi; riemann sum of w dx dp -> 2",
            ),
        )
        outputs.append("wigner.csv")

    report = _device_payload(params, derived,
                             regime_check(derived, params, cfg.jc_threshold))
    final = dict(zip(header, rows[-1])) if rows else {}
    flagged = sum(1 for row in rows if row[-1])
    report.update({
        "kind": kind.value,
        "rows": len(rows),
        "flagged_rows": flagged,
        "final": final,
        "outputs": outputs,
    })
    _write_json(out_dir / "cat.json", report)
    print(f"wrote {out_dir / 'cat.csv'} ({len(rows)} rows, {flagged} flagged)")
    if "wigner.csv" in outputs:
        print(f"wrote {out_dir / 'wigner.csv'} ({cfg.n_x * cfg.n_p} points)")
    return 0


def cmd_compare(cfg: RunConfig, out_dir: Path, args) -> int:
    params = cfg.device_params()
    derived = derive_params(params)
    trunc = cfg.truncation()
    ts = cfg.time_grid()
    rank = cfg.projector_rank
    n = trunc.n_levels
    psi0 = initial_state(trunc)

    header = [
        "t",
        "disc_analytic_vs_exact_jc",
        "disc_factored_vs_exact_jc",
        "disc_exact_jc_vs_exact_transformed",
        "disc_exact_transformed_vs_exact_full",
        "infid_analytic_vs_exact_jc",
        "infid_exact_jc_vs_exact_transformed",
        "infid_exact_transformed_vs_exact_full",
    ]
    rows = []
    disc_an = []
    disc_fact = []
    infid_an = []
    for t in ts:
        t = float(t)
        u_full = propagator(PropagatorKind.EXACT_FULL, params, derived, trunc, t)
        u_tr = propagator(PropagatorKind.EXACT_TRANSFORMED, params, derived, trunc, t)
        u_jc = propagator(PropagatorKind.EXACT_JC, params, derived, trunc, t)
        u_an = propagator(PropagatorKind.ANALYTIC, params, derived, trunc, t)
        u_fact = propagator_factored(params, derived, trunc, t)

        d_an = propagator_discrepancy(u_an, u_jc, rank, n)
        d_fact = propagator_discrepancy(u_fact, u_jc, rank, n)
        d_jc_tr = propagator_discrepancy(u_jc, u_tr, rank, n)
        d_tr_full = propagator_discrepancy(u_tr, u_full, rank, n)

        s_full = u_full @ psi0
        s_tr = u_tr @ psi0
        s_jc = u_jc @ psi0
        s_an = u_an @ psi0
        i_an = 1.0 - fidelity(s_an, s_jc)
        i_jc = 1.0 - fidelity(s_jc, s_tr)
        i_tr = 1.0 - fidelity(s_tr, s_full)

        rows.append([t, d_an, d_fact, d_jc_tr, d_tr_full, i_an, i_jc, i_tr])
        disc_an.append(d_an)
        disc_fact.append(d_fact)
        infid_an.append(i_an)

    ts_arr = np.asarray(ts, dtype=float)
    positive = ts_arr > 0.0
    fit_count = min(5, int(np.sum(positive)))
    fit_ts = ts_arr[positive][:fit_count]
    fit_an = np.asarray(disc_an)[positive][:fit_count]
    fit_fact = np.asarray(disc_fact)[positive][:fit_count]
    fit_infid = np.asarray(infid_an)[positive][:fit_count]
    slope_an = loglog_slope(fit_ts, fit_an)
    slope_fact = loglog_slope(fit_ts, fit_fact)
    slope_infid = loglog_slope(fit_ts, fit_infid)

    trailing = (
        f"exponent_disc_analytic_vs_exact_jc = {_format_number(slope_an)}",
        f"exponent_disc_factored_vs_exact_jc = {_format_number(slope_fact)}",
        f"exponent_infid_analytic_vs_exact_jc = {_format_number(slope_infid)}",
    )
    _write_csv(out_dir / "compare.csv", cfg, header, rows,
               trailing_comments=trailing)

    payload = _device_payload(params, derived,
                              regime_check(derived, params, cfg.jc_threshold))
    payload.update({
        "projector_rank": rank,
        "fit_points": fit_count,
        "fits": {
            "disc_analytic_vs_exact_jc": slope_an,
            "disc_factored_vs_exact_jc": slope_fact,
            "infid_analytic_vs_exact_jc": slope_infid,
        },
        "transform_constant": {
            "included": True,
            "value": 0.25 * derived.omega * abs(params.beta) ** 2,
            "note": "shifts the transformed propagator by a global phase only; "
                    "discrepancy metrics are phase-aligned and insensitive to it",
        },
        "rows": len(rows),
    })
    _write_json(out_dir / "compare.json", payload)
    print(f"wrote {out_dir / 'compare.csv'} ({len(rows)} rows)")
    print(f"exponent disc(analytic, exact_jc) = {_format_number(slope_an)}")
    print(f"exponent disc(factored, exact_jc) = {_format_number(slope_fact)}")
    return 0


def cmd_scaling(cfg: RunConfig, out_dir: Path, args) -> int:
    params = cfg.device_params()
    derived = derive_params(params)
    trunc = cfg.truncation()
    kind = cfg.propagator_kind()
    ts = cfg.time_grid()

    header = ["t", "abs_beta_tilde", "abs_expectation_a", "leakage"]
    rows = []
    amps = []
    beta = abs(params.beta)
    for t in ts:
        t = float(t)
        u = propagator(kind, params, derived, trunc, t)
        branch_e, _ = project_qubit(u @ initial_state(trunc), "e")
        amp = abs(expectation_a(branch_e))
        beta_tilde = 0.25 * derived.omega ** 2 * beta * t * t
        rows.append([t, beta_tilde, amp, truncation_leakage(branch_e, trunc)])
        amps.append(amp)

    ts_arr = np.asarray(ts, dtype=float)
    slope = loglog_slope(ts_arr, np.asarray(amps))
    if derived.omega ** 2 * beta == 0.0:
        t_star = math.inf
    else:
        t_star = math.sqrt(4.0 * cfg.mu_star / (derived.omega ** 2 * beta))

    trailing = (
        f"slope = {_format_number(slope)}",
        f"t_star = {_format_number(t_star)}",
        f"mu_star = {_format_number(cfg.mu_star)}",
    )
    _write_csv(out_dir / "scaling.csv", cfg, header, rows,
               trailing_comments=trailing)
    payload = _device_payload(params, derived,
                              regime_check(derived, params, cfg.jc_threshold))
    payload.update({
        "kind": kind.value,
        "slope": slope,
        "t_star": t_star,
        "mu_star": cfg.mu_star,
        "rows": len(rows),
    })
    _write_json(out_dir / "scaling.json", payload)
    print(f"wrote {out_dir / 'scaling.csv'} ({len(rows)} rows)")
    print(f"slope = {_format_number(slope)}, t_star = {_format_number(t_star)}")
    return 0


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", default=None,
                        help="flat key = value config file")
    parser.add_argument("--out", metavar="DIR", default=None,
                        help="output directory (default: config value or 'out')")
    parser.add_argument("--kind", default=None,
                        help="propagator kind: exact_full, exact_transformed, "
                             "exact_jc or analytic")
    parser.add_argument("--n-levels", dest="n_levels", type=int, default=None,
                        help="Fock ladder truncation")
    parser.add_argument("--t-start", dest="t_start", type=float, default=None)
    parser.add_argument("--t-stop", dest="t_stop", type=float, default=None)
    parser.add_argument("--t-steps", dest="t_steps", type=int, default=None)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catforge",
        description="Cat-state preparation simulator for a charge qubit "
                    "coupled to a cavity mode.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    subcommands = [
        ("validate", cmd_validate, "run the invariant suite"),
        ("cat", cmd_cat, "sweep the cat preparation protocol"),
        ("compare", cmd_compare, "compare propagator kinds"),
        ("scaling", cmd_scaling, "displacement growth and target-size timing"),
        ("derive", cmd_derive, "print derived parameters and the regime report"),
    ]
    for name, func, help_text in subcommands:
        sp = sub.add_parser(name, help=help_text)
        _add_common_arguments(sp)
        if name == "cat":
            sp.add_argument("--wigner", action="store_true",
                            help="also write a Wigner grid of the final-time "
                                 "e-branch cat")
        sp.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        overrides = {
            "out": args.out,
            "kind": args.kind,
            "n_levels": args.n_levels,
            "t_start": args.t_start,
            "t_stop": args.t_stop,
            "t_steps": args.t_steps,
        }
        cfg = build_run_config(file_values, overrides)
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if not os.access(out_dir, os.W_OK):
            raise ConfigError(f"output directory {out_dir} is not writable")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot prepare output directory: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(cfg, out_dir, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
