"""Propagators and the measurement protocol that prepares cat states.

All propagators returned here act in the lab frame on the combined
qubit (x) field space (qubit outermost, basis |e>, |g>).  Four kinds are
supported:

* ``exact_full``: exponentiation of the lab-frame Hamiltonian.
* ``exact_transformed``: exponentiation of the closed-form transformed
  Hamiltonian, pulled back through the polaron transform.  Agrees with
  ``exact_full`` to machine precision; kept as a cross-check.
* ``exact_jc``: exponentiation of the JC-type reduction, pulled back.
* ``analytic``: the closed-form propagator built from free rotation and a
  qubit-conditioned displacement that grows like t^2.

The protocol: start in (|e> + |g>)/sqrt(2) (x) |vacuum>, evolve, rotate the
qubit, measure it.  Either outcome collapses the field onto a coherent-state
superposition (a cat).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fock import (
    Operator,
    StateVector,
    TruncationConfig,
    coherent_state,
    displacement,
    eigh_checked,
    matrix_exponential,
    make_annihilation,
    sigma_x,
)
from .model import (
    DerivedParams,
    DeviceParams,
    RegimeWarning,
    beta_from_alpha,
    build_full_hamiltonian,
    build_jc_hamiltonian,
    build_polaron_transform,
    build_transformed_hamiltonian,
    regime_check,
)


class PropagatorKind(enum.Enum):
    EXACT_FULL = "exact_full"
    EXACT_TRANSFORMED = "exact_transformed"
    EXACT_JC = "exact_jc"
    ANALYTIC = "analytic"

    @classmethod
    def from_string(cls, name: str) -> "PropagatorKind":
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown propagator kind {name!r}; valid: {valid}") from None


@dataclass(frozen=True)
class CatPair:
    """Both measurement branches of the protocol at a fixed time.

    phi_plus / phi_minus are the normalized field states collapsed by the e
    and g outcomes, prob_e / prob_g the outcome probabilities, beta_tilde the
    accumulated displacement amplitude and phase_theta = E_z * t the relative
    phase between the coherent branches.
    """

    phi_plus: StateVector
    phi_minus: StateVector
    prob_e: float
    prob_g: float
    beta_tilde: complex
    t: float
    phase_theta: float

    def __post_init__(self):
        if abs(self.prob_e + self.prob_g - 1.0) > 1e-10:
            raise ValueError(
                f"branch probabilities sum to {self.prob_e + self.prob_g!r}, not 1"
            )
        for name, state in (("phi_plus", self.phi_plus), ("phi_minus", self.phi_minus)):
            if abs(state.norm() - 1.0) > 1e-10:
                raise ValueError(f"{name} is not normalized: |norm - 1| > 1e-10")


def propagator_exact(h: Operator, t: float) -> Operator:
    """exp(-i h t) of a Hermitian-tagged Hamiltonian, unitary by construction."""
    w, v = eigh_checked(h)
    u = (v * np.exp(-1j * w * t)) @ v.conj().T
    return Operator(u, tag="unitary")


def propagator_analytic(derived: DerivedParams, t: float,
                        cfg: TruncationConfig) -> Operator:
    """Closed-form lab-frame propagator of the JC-type reduction.

    Free oscillator rotation times a qubit-conditioned displacement whose
    amplitude beta_tilde = i omega^2 beta t^2 / 4 grows quadratically in
    time, times the qubit phase e^{-i E_z t sigma_z}:

        U(t) = e^{-i omega t a^dag a}
               [ D(beta_tilde) e^{-i E_z t}                        0
                 0                        D(beta_tilde)^dag e^{i E_z t} ]

    Derived by factoring the JC evolution to lowest order in the commutator
    corrections; see the comparison experiments for its measured accuracy.
    """
    n = cfg.n_levels
    beta = beta_from_alpha(derived.alpha)
    beta_tilde = 0.25j * derived.omega ** 2 * beta * t * t
    d = displacement(beta_tilde, cfg).entries
    free = np.exp(-1j * derived.omega * t * np.arange(n))
    u = np.zeros((2 * n, 2 * n), dtype=complex)
    u[:n, :n] = free[:, None] * d * np.exp(-1j * derived.e_z * t)
    u[n:, n:] = free[:, None] * d.conj().T * np.exp(1j * derived.e_z * t)
    return Operator(u, tag="unitary")


def propagator_factored(params: DeviceParams, derived: DerivedParams,
                        cfg: TruncationConfig, t: float) -> Operator:
    """Commutator-corrected factored propagator, pulled back to the lab frame.

    The JC evolution is split into free rotation, the linear drive, the
    first commutator correction (the t^2 displacement) and the qubit phase:

        U_T(t) = e^{-i omega t a^dag a}
                 exp[ (omega t / 2)(beta a - beta* a^dag) sigma_x ]
                 exp[ -i (omega^2 t^2 / 4)(beta a + beta* a^dag) sigma_x ]
                 exp[ i E_z t sigma_x ]

    The residual against exact JC exponentiation is third order in t.  This
    is the stepping stone between ``exact_jc`` and ``analytic``; unlike
    ``analytic`` it keeps the drive and correction as separate factors.
    """
    n = cfg.n_levels
    beta = beta_from_alpha(derived.alpha)
    a = make_annihilation(cfg).entries
    sx = sigma_x().entries
    eye_f = np.eye(n)

    free = np.exp(-1j * derived.omega * t * np.arange(n))
    f1 = np.kron(np.eye(2), np.diag(free))
    drive = 0.5 * derived.omega * t * (beta * a - np.conj(beta) * a.conj().T)
    f2 = matrix_exponential(Operator(np.kron(sx, drive))).entries
    corr = -0.25j * derived.omega ** 2 * t * t * (beta * a + np.conj(beta) * a.conj().T)
    f3 = matrix_exponential(Operator(np.kron(sx, corr))).entries
    f4 = matrix_exponential(Operator(1j * derived.e_z * t * np.kron(sx, eye_f))).entries

    t_op = build_polaron_transform(params, derived, cfg).entries
    u = t_op.conj().T @ (f1 @ f2 @ f3 @ f4) @ t_op
    return Operator(u, tag="unitary")


def propagator(kind: PropagatorKind, params: DeviceParams, derived: DerivedParams,
               cfg: TruncationConfig, t: float) -> Operator:
    """Lab-frame propagator of the requested kind at time t."""
    if kind is PropagatorKind.EXACT_FULL:
        h = build_full_hamiltonian(params, derived, cfg)
        return propagator_exact(h, t)
    if kind is PropagatorKind.ANALYTIC:
        return propagator_analytic(derived, t, cfg)
    if kind is PropagatorKind.EXACT_TRANSFORMED:
        h = build_transformed_hamiltonian(params, derived, cfg)
    elif kind is PropagatorKind.EXACT_JC:
        h = build_jc_hamiltonian(params, derived, cfg)
    else:
        raise ValueError(f"unknown propagator kind {kind!r}")
    u_t = propagator_exact(h, t).entries
    t_op = build_polaron_transform(params, derived, cfg).entries
    return Operator(t_op.conj().T @ u_t @ t_op, tag="unitary")


def initial_state(cfg: TruncationConfig) -> StateVector:
    """Protocol input (|e> + |g>)/sqrt(2) (x) |vacuum>."""
    n = cfg.n_levels
    amps = np.zeros(2 * n, dtype=complex)
    amps[0] = amps[n] = 1.0 / math.sqrt(2.0)
    return StateVector(amps)


def qubit_rotation_matrix() -> Operator:
    """The 2x2 pre-measurement rotation (|e> -> (|e> - |g>)/sqrt(2))."""
    r = np.array([[1.0, 1.0], [-1.0, 1.0]]) / math.sqrt(2.0)
    return Operator(r, tag="unitary")


def rotate_qubit(psi: StateVector) -> StateVector:
    """Apply the pre-measurement qubit rotation to a combined state."""
    if psi.dim % 2 != 0:
        raise ValueError(f"combined state must have even dimension, got {psi.dim}")
    n = psi.dim // 2
    r = qubit_rotation_matrix().entries
    amps = np.kron(r, np.eye(n)) @ psi.amplitudes
    return StateVector(amps, norm_deficit=psi.norm_deficit)


def project_qubit(psi: StateVector, outcome: str) -> tuple[StateVector, float]:
    """Measure the qubit; return the collapsed field state and the probability.

    ``outcome`` is "e" or "g".  Raises when the requested outcome has
    vanishing probability (no state to collapse onto).
    """
    if outcome not in ("e", "g"):
        raise ValueError(f"outcome must be 'e' or 'g', got {outcome!r}")
    if psi.dim % 2 != 0:
        raise ValueError(f"combined state must have even dimension, got {psi.dim}")
    n = psi.dim // 2
    block = psi.amplitudes[:n] if outcome == "e" else psi.amplitudes[n:]
    prob = float(np.linalg.norm(block) ** 2)
    if prob < 1e-14:
        raise ValueError(f"outcome {outcome!r} has vanishing probability {prob:.3e}")
    return StateVector(block / math.sqrt(prob)), prob


def make_cat(params: DeviceParams, derived: DerivedParams, cfg: TruncationConfig,
             t: float, kind: PropagatorKind = PropagatorKind.ANALYTIC) -> CatPair:
    """Run the full protocol at time t and collapse both branches.

    Warns when the analytic propagator is requested outside the regime where
    the JC-type reduction is trustworthy.
    """
    if kind is PropagatorKind.ANALYTIC:
        report = regime_check(derived, params)
        if not report.jc_valid:
            warnings.warn(
                f"analytic propagator requested at regime ratio "
                f"{report.ratio:.3g} < {report.threshold:.3g}; "
                f"JC-type reduction may not hold",
                RegimeWarning,
                stacklevel=2,
            )
    beta = beta_from_alpha(derived.alpha)
    beta_tilde = 0.25j * derived.omega ** 2 * beta * t * t
    u = propagator(kind, params, derived, cfg, t)
    psi_t = u @ initial_state(cfg)
    psi_r = rotate_qubit(psi_t)
    phi_plus, prob_e = project_qubit(psi_r, "e")
    phi_minus, prob_g = project_qubit(psi_r, "g")
    return CatPair(
        phi_plus=phi_plus,
        phi_minus=phi_minus,
        prob_e=prob_e,
        prob_g=prob_g,
        beta_tilde=complex(beta_tilde),
        t=float(t),
        phase_theta=float(derived.e_z * t),
    )


def ideal_cat(mu: complex, theta: float, sign: int,
              cfg: TruncationConfig) -> StateVector:
    """Normalized coherent-state superposition

        N [ e^{-i theta} |mu> + sign * e^{i theta} |-mu> ]

    with N fixed numerically.  The closed form of the normalization is
    N = [2 + 2 sign cos(2 theta) e^{-2 |mu|^2}]^{-1/2}.  Raises when the
    superposition vanishes (sign = -1, mu = 0, theta = 0 and neighbors).
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    plus = coherent_state(mu, cfg)
    minus = coherent_state(-mu, cfg)
    amps = np.exp(-1j * theta) * plus.amplitudes \
        + sign * np.exp(1j * theta) * minus.amplitudes
    norm_sq = float(np.linalg.norm(amps) ** 2)
    if norm_sq < 1e-14:
        raise ValueError(
            f"cat superposition vanishes for mu={mu!r}, theta={theta!r}, sign={sign:+d}"
        )
    deficit = max(plus.norm_deficit, minus.norm_deficit)
    return StateVector(amps / math.sqrt(norm_sq), norm_deficit=deficit)
