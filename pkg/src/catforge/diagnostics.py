"""Measurement and comparison diagnostics.

Includes the Wigner quasiprobability on a phase-space grid, state fidelity,
phase-aligned propagator discrepancy, truncation leakage and a log-log slope
fit used by the scaling studies.

Wigner convention: W(alpha) = (2/pi) <D(-alpha) psi| P |D(-alpha) psi> with P
the photon parity, evaluated on quadrature axes x = sqrt(2) Re(alpha),
p = sqrt(2) Im(alpha).  The vacuum then peaks at W(0,0) = 2/pi and the
Riemann sum of W dx dp over a covering grid approaches 2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fock import Operator, StateVector, TruncationConfig, TruncationWarning


def fidelity(psi: StateVector, phi: StateVector) -> float:
    """|<psi|phi>|^2 between two normalized states of equal dimension."""
    if psi.dim != phi.dim:
        raise ValueError(f"state dimensions differ: {psi.dim} vs {phi.dim}")
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2)


def expectation_a(field_state: StateVector) -> complex:
    """<a> of a field-only state."""
    amps = field_state.amplitudes
    n = amps.size
    a = np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1)
    return complex(np.vdot(amps, a @ amps))


@dataclass(frozen=True)
class WignerGrid:
    """Wigner function samples on a rectangular quadrature grid.

    ``values[i, j]`` is W at x = x_axis[i], p = p_axis[j].
    """

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    n_x: int
    n_p: int
    values: np.ndarray

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.p_min < self.p_max):
            raise ValueError("Wigner grid bounds must be ordered")
        if self.n_x < 2 or self.n_p < 2:
            raise ValueError("Wigner grid needs at least 2 points per axis")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.n_x, self.n_p):
            raise ValueError(
                f"values shape {vals.shape} does not match grid "
                f"({self.n_x}, {self.n_p})"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("Wigner values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def x_axis(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def p_axis(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)


def wigner(field_state: StateVector, x_min: float = -4.0, x_max: float = 4.0,
           p_min: float = -4.0, p_max: float = 4.0,
           n_x: int = 121, n_p: int = 121) -> WignerGrid:
    """Wigner function of a field state via the displaced-parity formula.

    For each grid point alpha = (x + i p)/sqrt(2) the state is displaced by
    -alpha and its parity expectation taken.  The polar split
    D(-alpha) = e^{i theta n} D(-r) e^{-i theta n} needs only one
    eigendecomposition of the radial generator for the whole grid, and is
    exact on the truncated ladder.  Warns when a grid corner displaces past
    the soft truncation guard.
    """
    amps = field_state.amplitudes
    n = amps.size
    corner_alpha_sq = (max(x_min ** 2, x_max ** 2) + max(p_min ** 2, p_max ** 2)) / 2.0
    if corner_alpha_sq > n / 4.0:
        warnings.warn(
            f"Wigner grid corner |alpha|^2 = {corner_alpha_sq:.3g} exceeds "
            f"n_levels/4 = {n / 4:.3g}; edge values may carry truncation artifacts",
            TruncationWarning,
            stacklevel=2,
        )

    ladder = np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1)
    radial_gen = Operator(1j * (ladder.conj().T - ladder), tag="hermitian")
    lam, v = np.linalg.eigh(radial_gen.entries)
    vd = v.conj().T
    levels = np.arange(n)
    parity = (-1.0) ** levels

    xs = np.linspace(x_min, x_max, n_x)
    ps = np.linspace(p_min, p_max, n_p)
    values = np.empty((n_x, n_p), dtype=float)
    for i, x in enumerate(xs):
        for j, p in enumerate(ps):
            alpha = complex(x, p) / math.sqrt(2.0)
            r = abs(alpha)
            theta = np.angle(alpha) if r > 0.0 else 0.0
            rotated = np.exp(-1j * theta * levels) * amps
            displaced = v @ (np.exp(1j * r * lam) * (vd @ rotated))
            values[i, j] = (2.0 / math.pi) * float(
                np.sum(parity * np.abs(displaced) ** 2)
            )
    return WignerGrid(x_min=x_min, x_max=x_max, p_min=p_min, p_max=p_max,
                      n_x=n_x, n_p=n_p, values=values)


def propagator_discrepancy(u1: Operator, u2: Operator, rank: int,
                           n_levels: int | None = None) -> float:
    """Max-entry difference of two propagators after global phase alignment.

    Both operators are restricted to the lowest ``rank`` Fock levels first
    (of each qubit block when ``n_levels`` marks the operators as living on
    the combined space), discarding rows and columns contaminated by the
    truncation edge.  The global phase is fixed by the largest restricted
    entry of ``u1``.
    """
    if u1.dim != u2.dim:
        raise ValueError(f"operator dimensions differ: {u1.dim} vs {u2.dim}")
    dim = u1.dim
    if n_levels is not None:
        if dim != 2 * n_levels:
            raise ValueError(
                f"dimension {dim} does not match a qubit ladder of {n_levels} levels"
            )
        if rank > n_levels:
            raise ValueError(f"rank {rank} exceeds n_levels {n_levels}")
        idx = np.concatenate([np.arange(rank), n_levels + np.arange(rank)])
    else:
        if rank > dim:
            raise ValueError(f"rank {rank} exceeds dimension {dim}")
        idx = np.arange(rank)
    sub1 = u1.entries[np.ix_(idx, idx)]
    sub2 = u2.entries[np.ix_(idx, idx)]
    k = np.unravel_index(np.argmax(np.abs(sub1)), sub1.shape)
    if abs(sub2[k]) < 1e-300:
        phase = 1.0
    else:
        phase = sub1[k] / sub2[k]
        phase = phase / abs(phase)
    return float(np.max(np.abs(sub1 - phase * sub2)))


def truncation_leakage(field_state: StateVector, cfg: TruncationConfig) -> float:
    """Population in the top ``edge_levels`` of the ladder."""
    if field_state.dim != cfg.n_levels:
        raise ValueError(
            f"state dimension {field_state.dim} does not match "
            f"n_levels {cfg.n_levels}"
        )
    edge = cfg.edge_levels
    return float(np.sum(np.abs(field_state.amplitudes[cfg.n_levels - edge:]) ** 2))


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x) over strictly positive pairs.

    Returns nan when fewer than two usable pairs remain.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    mask = (xs > 0.0) & (ys > 0.0) & np.isfinite(xs) & np.isfinite(ys)
    if int(np.sum(mask)) < 2:
        return math.nan
    return float(np.polyfit(np.log(xs[mask]), np.log(ys[mask]), 1)[0])
