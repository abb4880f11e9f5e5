"""Truncated Fock-space linear algebra.

Dense complex matrices on a finite oscillator ladder, plus the 2x2 qubit
algebra and the qubit (x) field tensor product.  Conventions used throughout
the package:

* hbar = 1; all frequencies are angular frequencies.
* Fock ladder is truncated to ``n_levels`` states |0>, ..., |n_levels - 1>.
* The qubit factor is always outermost: basis order |e>, |g>, so a combined
  state is ordered |e>|0>, |e>|1>, ..., |g>|0>, |g>|1>, ...
* sigma_z = |e><e| - |g><g|, sigma_plus = |e><g|.

Matrix functions of Hermitian generators go through an eigendecomposition so
that exponentials of anti-Hermitian matrices come out unitary to machine
precision.  ``scipy.linalg.expm`` is only used as a fallback for matrices
with no usable structure.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10

_VALID_TAGS = ("general", "hermitian", "unitary")


class TruncationWarning(UserWarning):
    """A requested amplitude pushes weight toward the truncation edge."""


@dataclass(frozen=True)
class TruncationConfig:
    """Size of the truncated Fock ladder and the leakage bookkeeping window.

    ``leakage_fraction`` is the fraction of the ladder, counted from the top,
    whose population is reported as truncation leakage.
    """

    n_levels: int
    leakage_fraction: float = 0.1

    def __post_init__(self):
        if not isinstance(self.n_levels, (int, np.integer)) or self.n_levels < 2:
            raise ValueError(f"n_levels must be an integer >= 2, got {self.n_levels!r}")
        if not (0.0 < self.leakage_fraction < 1.0):
            raise ValueError(
                f"leakage_fraction must lie strictly between 0 and 1, "
                f"got {self.leakage_fraction!r}"
            )

    @property
    def edge_levels(self) -> int:
        """Number of top-of-ladder levels counted as the truncation edge."""
        return self.n_levels - math.ceil((1.0 - self.leakage_fraction) * self.n_levels)


@dataclass(frozen=True)
class Operator:
    """A dense square matrix with a declared role.

    ``tag`` records what the operator is supposed to be ("hermitian",
    "unitary" or "general").  The declaration is not re-verified on every
    construction; call :meth:`check_tag` to measure the defect and fail
    loudly if the tag is violated.
    """

    entries: np.ndarray
    tag: str = "general"

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"operator entries must be square, got shape {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        if self.tag not in _VALID_TAGS:
            raise ValueError(f"unknown operator tag {self.tag!r}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.entries.conj().T, tag=self.tag)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def unitarity_defect(self) -> float:
        eye = np.eye(self.dim)
        return float(np.max(np.abs(self.entries.conj().T @ self.entries - eye)))

    def check_tag(self) -> float:
        """Verify the declared role; returns the defect, raises if too large."""
        if self.tag == "hermitian":
            defect = self.hermiticity_defect()
            if defect > HERMITIAN_TOL:
                raise ValueError(
                    f"operator tagged hermitian has Hermiticity defect "
                    f"{defect:.3e} > {HERMITIAN_TOL:.1e}"
                )
            return defect
        if self.tag == "unitary":
            defect = self.unitarity_defect()
            if defect > UNITARY_TOL:
                raise ValueError(
                    f"operator tagged unitary has unitarity defect "
                    f"{defect:.3e} > {UNITARY_TOL:.1e}"
                )
            return defect
        return 0.0

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.entries @ other.entries, tag="general")
        if isinstance(other, StateVector):
            return StateVector(self.entries @ other.amplitudes)
        return NotImplemented


@dataclass(frozen=True)
class StateVector:
    """A ket on the truncated space.

    ``norm_deficit`` records probability lost to truncation before any
    renormalization (zero for states built without truncating anything).
    """

    amplitudes: np.ndarray
    norm_deficit: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if arr.size < 1:
            raise ValueError("state vector must have at least one amplitude")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n < 1e-14:
            raise ValueError("cannot normalize a state with vanishing norm")
        return StateVector(self.amplitudes / n, norm_deficit=self.norm_deficit)


def eigh_checked(op: Operator, tol: float = HERMITIAN_TOL):
    """Eigendecomposition of an operator that must be Hermitian.

    Returns (eigenvalues, eigenvectors).  Raises if the operator is not
    tagged hermitian or if its Hermiticity defect exceeds ``tol``.
    """
    if op.tag != "hermitian":
        raise ValueError(f"expected an operator tagged hermitian, got {op.tag!r}")
    defect = op.hermiticity_defect()
    if defect > tol:
        raise ValueError(
            f"matrix claimed hermitian has Hermiticity defect {defect:.3e} > {tol:.1e}"
        )
    return np.linalg.eigh(op.entries)


def make_annihilation(cfg: TruncationConfig) -> Operator:
    """Annihilation operator a on the truncated ladder.

    The commutator [a, a^dag] equals the identity only away from the
    truncation edge; the (n_levels-1, n_levels-1) entry is 1 - n_levels.
    """
    n = cfg.n_levels
    return Operator(np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1))


def make_creation(cfg: TruncationConfig) -> Operator:
    return make_annihilation(cfg).dag()


def number_operator(cfg: TruncationConfig) -> Operator:
    return Operator(np.diag(np.arange(cfg.n_levels, dtype=float)), tag="hermitian")


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim), tag="hermitian")


def sigma_z() -> Operator:
    return Operator(np.diag([1.0, -1.0]), tag="hermitian")


def sigma_x() -> Operator:
    return Operator(np.array([[0.0, 1.0], [1.0, 0.0]]), tag="hermitian")


def sigma_plus() -> Operator:
    return Operator(np.array([[0.0, 1.0], [0.0, 0.0]]))


def sigma_minus() -> Operator:
    return sigma_plus().dag()


def vacuum_state(cfg: TruncationConfig) -> StateVector:
    amps = np.zeros(cfg.n_levels, dtype=complex)
    amps[0] = 1.0
    return StateVector(amps)


def fock_state(n: int, cfg: TruncationConfig) -> StateVector:
    if not 0 <= n < cfg.n_levels:
        raise ValueError(f"Fock index {n} outside ladder of {cfg.n_levels} levels")
    amps = np.zeros(cfg.n_levels, dtype=complex)
    amps[n] = 1.0
    return StateVector(amps)


def matrix_exponential(op: Operator) -> Operator:
    """exp(M) with structure-aware routing.

    Hermitian-tagged matrices and matrices detected as anti-Hermitian go
    through an eigendecomposition, so exp(-i H t) is unitary to machine
    precision.  Everything else falls back to scipy's expm.
    """
    m = op.entries
    if op.tag == "hermitian":
        w, v = eigh_checked(op)
        result = (v * np.exp(w)) @ v.conj().T
        return Operator(result, tag="hermitian")
    anti_defect = float(np.max(np.abs(m + m.conj().T)))
    if anti_defect <= HERMITIAN_TOL:
        # m = -i h with h Hermitian, so exp(m) = V exp(-i w) V^dag.
        h = Operator(1j * m, tag="hermitian")
        w, v = eigh_checked(h)
        result = (v * np.exp(-1j * w)) @ v.conj().T
        return Operator(result, tag="unitary")
    return Operator(scipy.linalg.expm(m))


def displacement(alpha: complex, cfg: TruncationConfig) -> Operator:
    """Displacement operator exp(alpha a^dag - alpha* a).

    Warns when |alpha|^2 exceeds n_levels / 4, the point where the displaced
    vacuum starts to put non-negligible weight near the truncation edge.
    """
    alpha = complex(alpha)
    if abs(alpha) ** 2 > cfg.n_levels / 4.0:
        warnings.warn(
            f"displacement amplitude |alpha|^2 = {abs(alpha)**2:.3g} exceeds "
            f"n_levels/4 = {cfg.n_levels / 4:.3g}; truncation artifacts likely",
            TruncationWarning,
            stacklevel=2,
        )
    a = make_annihilation(cfg).entries
    gen = alpha * a.conj().T - np.conj(alpha) * a
    return matrix_exponential(Operator(gen))


def coherent_state(mu: complex, cfg: TruncationConfig) -> StateVector:
    """Coherent state |mu>, i.e. the displaced vacuum, on the truncated ladder.

    The amplitudes mu^n / sqrt(n!) (times the Gaussian prefactor) are
    truncated at n_levels and then renormalized; the probability lost to the
    discarded tail is recorded as ``norm_deficit``.  The same soft guard as
    :func:`displacement` applies.
    """
    mu = complex(mu)
    if abs(mu) ** 2 > cfg.n_levels / 4.0:
        warnings.warn(
            f"coherent amplitude |mu|^2 = {abs(mu)**2:.3g} exceeds "
            f"n_levels/4 = {cfg.n_levels / 4:.3g}; truncation artifacts likely",
            TruncationWarning,
            stacklevel=2,
        )
    n = cfg.n_levels
    amps = np.empty(n, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(mu) ** 2)
    for k in range(1, n):
        amps[k] = amps[k - 1] * mu / math.sqrt(k)
    kept = float(np.sum(np.abs(amps) ** 2))
    deficit = max(0.0, 1.0 - kept)
    return StateVector(amps / math.sqrt(kept), norm_deficit=deficit)


def operator_cosine(op: Operator) -> Operator:
    """cos(M) of a Hermitian operator via eigendecomposition."""
    w, v = eigh_checked(op)
    return Operator((v * np.cos(w)) @ v.conj().T, tag="hermitian")


def operator_sine(op: Operator) -> Operator:
    """sin(M) of a Hermitian operator via eigendecomposition."""
    w, v = eigh_checked(op)
    return Operator((v * np.sin(w)) @ v.conj().T, tag="hermitian")


def tensor(qubit_op: Operator, field_op: Operator) -> Operator:
    """Kronecker product with the qubit factor outermost.

    The result is tagged hermitian (resp. unitary) when both factors carry
    that tag, otherwise general.
    """
    if qubit_op.dim != 2:
        raise ValueError(
            f"qubit factor must be 2x2, got dimension {qubit_op.dim}"
        )
    if qubit_op.tag == field_op.tag and qubit_op.tag in ("hermitian", "unitary"):
        tag = qubit_op.tag
    else:
        tag = "general"
    return Operator(np.kron(qubit_op.entries, field_op.entries), tag=tag)
