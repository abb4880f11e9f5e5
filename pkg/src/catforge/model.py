"""Device model: parameters, Hamiltonians and the polaron-type transform.

The system is a charge qubit (two lowest charge states) coupled to a single
cavity mode through the flux threading its SQUID loop.  In natural units
(hbar = 1, and e = 1, Phi_0 = 1 for the raw circuit inputs) the lab-frame
Hamiltonian is

    H = omega a^dag a + E_z sigma_z - E_J sigma_x cos(gamma + beta a + beta* a^dag)

with omega = 4 E_ch, E_z = -2 E_ch (1 - 2 n_g).

A unitary polaron-type transform (a field displacement conditioned on the
qubit, combined with a Hadamard-like rotation) moves the qubit splitting onto
sigma_x and turns the junction cosine into doubled-argument dressing terms of
size E_J.  Dropping those dressing terms leaves a Jaynes-Cummings-like
Hamiltonian, a good reduction when omega |beta| / E_J is large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import (
    Operator,
    TruncationConfig,
    displacement,
    identity,
    make_annihilation,
    number_operator,
    operator_cosine,
    operator_sine,
    sigma_minus,
    sigma_plus,
    sigma_x,
    sigma_z,
    tensor,
)


class RegimeWarning(UserWarning):
    """Requested dynamics outside the validity regime of the JC reduction."""


@dataclass(frozen=True)
class DeviceParams:
    """Device parameters, either given directly or derived from raw circuit values.

    Direct fields: e_ch (single-electron charging energy), e_j (Josephson
    energy), n_g (dimensionless gate charge), gamma (static flux phase),
    beta (mode coupling phase, complex).

    Raw alternatives (natural units e = 1, Phi_0 = 1): gate and junction
    capacitances c_g, c_j give e_ch = 1 / (2 (c_g + 2 c_j)); gate voltage v_g
    gives n_g = c_g v_g / 2; static external flux phi_c gives
    gamma = pi * phi_c; mode flux amplitude eta gives beta = pi * eta.
    Giving both a direct field and its raw alternative is an error.
    """

    e_ch: float | None = None
    e_j: float | None = None
    n_g: float | None = None
    gamma: float | None = None
    beta: complex | None = None
    c_g: float | None = None
    c_j: float | None = None
    v_g: float | None = None
    phi_c: float | None = None
    eta: complex | None = None

    def __post_init__(self):
        have_caps = self.c_g is not None or self.c_j is not None
        if self.e_ch is not None and have_caps:
            raise ValueError("give either e_ch or capacitances c_g/c_j, not both")
        if self.e_ch is None:
            if self.c_g is None or self.c_j is None:
                raise ValueError("charging energy needs e_ch or both c_g and c_j")
            denom = self.c_g + 2.0 * self.c_j
            if denom <= 0.0:
                raise ValueError(f"total capacitance must be positive, got {denom!r}")
            object.__setattr__(self, "e_ch", 1.0 / (2.0 * denom))

        if self.n_g is not None and self.v_g is not None:
            raise ValueError("give either n_g or v_g, not both")
        if self.n_g is None:
            if self.v_g is None:
                raise ValueError("gate charge needs n_g or v_g")
            if self.c_g is None:
                raise ValueError("deriving n_g from v_g requires c_g")
            object.__setattr__(self, "n_g", self.c_g * self.v_g / 2.0)

        if self.gamma is not None and self.phi_c is not None:
            raise ValueError("give either gamma or phi_c, not both")
        if self.gamma is None:
            if self.phi_c is None:
                raise ValueError("flux phase needs gamma or phi_c")
            object.__setattr__(self, "gamma", math.pi * self.phi_c)

        if self.beta is not None and self.eta is not None:
            raise ValueError("give either beta or eta, not both")
        if self.beta is None:
            if self.eta is None:
                raise ValueError("mode coupling needs beta or eta")
            object.__setattr__(self, "beta", math.pi * complex(self.eta))
        object.__setattr__(self, "beta", complex(self.beta))

        if self.e_j is None:
            raise ValueError("Josephson energy e_j is required")
        if self.e_ch <= 0.0:
            raise ValueError(f"e_ch must be positive, got {self.e_ch!r}")
        if self.e_j < 0.0:
            raise ValueError(f"e_j must be non-negative, got {self.e_j!r}")
        if abs(self.beta) >= 1.0:
            raise ValueError(
                f"|beta| = {abs(self.beta):.3g} is outside the validity "
                f"envelope |beta| < 1"
            )


@dataclass(frozen=True)
class DerivedParams:
    """Working frequencies derived from :class:`DeviceParams`.

    omega: mode frequency scale 4 e_ch used throughout the reduced model.
    e_z: qubit splitting -2 e_ch (1 - 2 n_g); zero at the charge sweet spot.
    alpha: conditional displacement amplitude i beta* / 2.
    regime_ratio: omega |beta| / e_j, infinite when e_j = 0.
    """

    omega: float
    e_z: float
    alpha: complex
    regime_ratio: float


@dataclass(frozen=True)
class RegimeReport:
    """Outcome of the coupling-regime check."""

    ratio: float
    beta_ok: bool
    jc_valid: bool
    threshold: float


def derive_params(params: DeviceParams) -> DerivedParams:
    omega = 4.0 * params.e_ch
    e_z = -2.0 * params.e_ch * (1.0 - 2.0 * params.n_g) + 0.0
    alpha = 0.5j * np.conj(params.beta)
    if params.e_j == 0.0:
        ratio = math.inf
    else:
        ratio = omega * abs(params.beta) / params.e_j
    return DerivedParams(omega=omega, e_z=e_z, alpha=complex(alpha), regime_ratio=ratio)


def beta_from_alpha(alpha: complex) -> complex:
    """Invert alpha = i beta* / 2 back to the coupling phase beta."""
    return complex(2j * np.conj(alpha))


def regime_check(derived: DerivedParams, params: DeviceParams,
                 threshold: float = 10.0) -> RegimeReport:
    """Check whether the JC-type reduction is trustworthy.

    The reduction needs a coupling strong enough to be resolved
    (|beta| >= 0.25) and a ratio omega |beta| / e_j at or above ``threshold``.
    """
    ratio = derived.regime_ratio
    beta_ok = abs(params.beta) >= 0.25
    jc_valid = ratio >= threshold
    return RegimeReport(ratio=ratio, beta_ok=beta_ok, jc_valid=jc_valid,
                        threshold=threshold)


def _cosine_argument(params: DeviceParams, cfg: TruncationConfig) -> Operator:
    """gamma + beta a + beta* a^dag, the Hermitian argument of the junction cosine."""
    a = make_annihilation(cfg).entries
    m = params.gamma * np.eye(cfg.n_levels) + params.beta * a \
        + np.conj(params.beta) * a.conj().T
    return Operator(m, tag="hermitian")


def build_full_hamiltonian(params: DeviceParams, derived: DerivedParams,
                           cfg: TruncationConfig) -> Operator:
    """Lab-frame Hamiltonian on the qubit (x) field space."""
    n_op = number_operator(cfg)
    eye_f = identity(cfg.n_levels)
    cos_op = operator_cosine(_cosine_argument(params, cfg))
    h = derived.omega * tensor(identity(2), n_op).entries \
        + derived.e_z * tensor(sigma_z(), eye_f).entries \
        - params.e_j * tensor(sigma_x(), cos_op).entries
    return Operator(h, tag="hermitian")


def build_polaron_transform(params: DeviceParams, derived: DerivedParams,
                            cfg: TruncationConfig) -> Operator:
    """Unitary that maps the lab frame to the displaced sigma_x frame.

    In 2x2 block form (qubit outermost, basis |e>, |g>):

        T = (1/sqrt(2)) [[-B^dag, B], [B^dag, B]],   B = e^{i gamma / 2} D(alpha)

    where D is the field displacement by alpha = i beta* / 2.  Conjugating
    the lab Hamiltonian with T turns the junction cosine into ladder terms.
    """
    n = cfg.n_levels
    b = np.exp(0.5j * params.gamma) * displacement(derived.alpha, cfg).entries
    bd = b.conj().T
    t = np.zeros((2 * n, 2 * n), dtype=complex)
    t[:n, :n] = -bd
    t[:n, n:] = b
    t[n:, :n] = bd
    t[n:, n:] = b
    return Operator(t / math.sqrt(2.0), tag="unitary")


def build_polaron_transform_pauli(params: DeviceParams, derived: DerivedParams,
                                  cfg: TruncationConfig) -> Operator:
    """Same transform assembled from its four Pauli components.

    Kept as an independent cross-check of :func:`build_polaron_transform`;
    the two constructions must agree entrywise to machine precision.
    """
    b = np.exp(0.5j * params.gamma) * displacement(derived.alpha, cfg).entries
    bd = b.conj().T
    sz = sigma_z().entries
    sp = sigma_plus().entries
    sm = sigma_minus().entries
    eye_q = np.eye(2)
    t = np.kron(-(eye_q + sz) / 2.0, bd) + np.kron(sp, b) \
        + np.kron(sm, bd) + np.kron((eye_q - sz) / 2.0, b)
    return Operator(t / math.sqrt(2.0), tag="unitary")


def build_transformed_hamiltonian(params: DeviceParams, derived: DerivedParams,
                                  cfg: TruncationConfig,
                                  include_constant: bool = True) -> Operator:
    """Closed form of T H T^dag, assembled directly.

        H_T = omega a^dag a
              + [ (i omega / 2)(beta a - beta* a^dag) - E_z ] sigma_x
              + (E_J / 2) sigma_z (1 + cos 2M)
              - (i E_J / 2)(sigma_plus - sigma_minus) sin 2M
              + (omega |beta|^2 / 4) I

    where M = gamma + beta a + beta* a^dag is the original cosine argument.
    The transform moves the qubit splitting onto sigma_x and turns the
    junction cosine into doubled-argument dressing terms of size E_J.  The
    trailing constant comes from the displaced number operator;
    ``include_constant=False`` drops it, which only changes the propagator
    by a global phase.
    """
    n = cfg.n_levels
    a = make_annihilation(cfg).entries
    n_num = a.conj().T @ a
    eye_f = np.eye(n)

    kin = 0.5j * derived.omega * (params.beta * a - np.conj(params.beta) * a.conj().T) \
        - derived.e_z * eye_f
    arg2 = Operator(2.0 * _cosine_argument(params, cfg).entries, tag="hermitian")
    cos2 = operator_cosine(arg2).entries
    sin2 = operator_sine(arg2).entries

    sx = sigma_x().entries
    sz = sigma_z().entries
    spm = sigma_plus().entries - sigma_minus().entries

    h = derived.omega * np.kron(np.eye(2), n_num) \
        + np.kron(sx, kin) \
        + 0.5 * params.e_j * np.kron(sz, eye_f + cos2) \
        - 0.5j * params.e_j * np.kron(spm, sin2)
    if include_constant:
        h = h + 0.25 * derived.omega * abs(params.beta) ** 2 * np.kron(np.eye(2), eye_f)
    return Operator(h, tag="hermitian")


def build_jc_hamiltonian(params: DeviceParams, derived: DerivedParams,
                         cfg: TruncationConfig) -> Operator:
    """JC-type reduction of the transformed Hamiltonian.

    Drops the Josephson dressing terms (the doubled-argument cos/sin pieces
    of size E_J) and the constant, keeping the number term and the linear
    sigma_x coupling:

        H_jc = omega a^dag a
               + (i omega / 2) [ (beta a - beta* a^dag) + 2 i E_z / omega ] sigma_x

    Valid when omega |beta| / E_J is large and |beta| is moderate.
    """
    n = cfg.n_levels
    a = make_annihilation(cfg).entries
    n_num = a.conj().T @ a
    coupling = 0.5j * derived.omega * (params.beta * a - np.conj(params.beta) * a.conj().T) \
        - derived.e_z * np.eye(n)
    h = derived.omega * np.kron(np.eye(2), n_num) + np.kron(sigma_x().entries, coupling)
    return Operator(h, tag="hermitian")
