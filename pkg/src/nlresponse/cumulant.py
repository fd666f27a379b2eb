"""Closed-form second-cumulant response functions.

Levels are indexed from 0.  All frequencies are rad/fs; a system may carry a
rotating-frame carrier ``frame`` that is subtracted from every transition
frequency before any phase is evaluated.
"""
from dataclasses import dataclass

import numpy as np

from .bath import CorrelationMatrix, _as_time
from .errors import DomainError, GridError, UnsupportedPathwayError
from .units import cm_to_rad_fs

PROVENANCES = ("exact", "rdm", "propagated")


@dataclass(frozen=True)
class SystemSpec:
    """Transition frequencies, dipole magnitudes and bath correlations of M levels."""

    omega: np.ndarray
    dipole: np.ndarray
    correlation: CorrelationMatrix
    frame: float = 0.0

    def __post_init__(self):
        omega = np.atleast_1d(np.asarray(self.omega, dtype=float))
        dipole = np.atleast_1d(np.asarray(self.dipole, dtype=float))
        if omega.ndim != 1 or omega.shape != dipole.shape:
            raise DomainError("omega and dipole must be 1-D and of equal length")
        if not np.all(np.isfinite(omega)) or not np.isfinite(self.frame):
            raise DomainError("transition frequencies must be finite")
        if np.any(dipole < 0) or not np.all(np.isfinite(dipole)):
            raise DomainError("dipole magnitudes must be finite and non-negative")
        if self.correlation.size != omega.size:
            raise DomainError("correlation matrix size does not match number of levels")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "dipole", dipole)
        object.__setattr__(self, "frame", float(self.frame))

    @classmethod
    def from_wavenumbers(cls, levels_cm, dipoles, correlation, frame_cm=0.0):
        return cls(cm_to_rad_fs(np.atleast_1d(levels_cm)), dipoles, correlation, cm_to_rad_fs(frame_cm))

    @property
    def num_levels(self):
        return self.omega.size

    @property
    def omega_rot(self):
        return self.omega - self.frame

    def check_level(self, i):
        if not (isinstance(i, (int, np.integer)) and 0 <= i < self.num_levels):
            raise DomainError(f"level index {i!r} outside 0..{self.num_levels - 1}")


@dataclass(frozen=True)
class PathwaySpec:
    """R2 pathway labels: ``i`` is the first-interval level, ``j`` the third."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 0 or self.j < 0:
            raise DomainError("pathway levels must be non-negative")

    def check(self, sys):
        sys.check_level(self.i)
        sys.check_level(self.j)

    @property
    def diagonal(self):
        return self.i == self.j


def uniform_axis(step, count):
    """``count`` samples from 0 with spacing ``step`` (fs)."""
    if count < 1 or (count > 1 and not step > 0):
        raise GridError(f"invalid axis step={step!r} count={count!r}")
    return np.arange(count) * float(step)


def check_axis(axis, what="axis"):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise GridError(f"{what} must be a non-empty 1-D array")
    if axis[0] != 0.0:
        raise GridError(f"{what} must start at 0")
    if axis.size > 1:
        d = np.diff(axis)
        if np.any(d <= 0) or np.ptp(d) > 1e-9 * d[0]:
            raise GridError(f"{what} must be uniform and increasing")
    return axis


def axis_step(axis):
    return float(axis[1] - axis[0]) if axis.size > 1 else 0.0


@dataclass(frozen=True)
class ResponseField:
    """R2 sampled on a (tau, t) grid at one waiting time T."""

    tau_axis: np.ndarray
    t_axis: np.ndarray
    T: float
    values: np.ndarray
    provenance: str
    pathway: PathwaySpec
    frame: float = 0.0

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if np.shape(self.values) != (np.size(self.tau_axis), np.size(self.t_axis)):
            raise GridError("field values do not match the axes")


def _with_value(x):
    return complex(x) if np.ndim(x) == 0 else x


def linear_coherence(sys, i, t):
    """rho_ig(t) = exp(-i omega_ig t - g_ii(t))."""
    sys.check_level(i)
    t = _as_time(t)
    return _with_value(np.exp(-1j * sys.omega_rot[i] * t - sys.correlation.g(i, i, t)))


def linear_response(sys, t_grid):
    """sum_i |d_i|^2 rho_ig(t) + c.c. (imaginary part vanishes)."""
    t = _as_time(t_grid)
    s = np.zeros(t.shape, dtype=complex)
    for i in range(sys.num_levels):
        s += sys.dipole[i] ** 2 * linear_coherence(sys, i, t)
    return s + s.conj()


def r2_exact(sys, pathway, tau, T, t):
    """Exact second-cumulant R2^(ji)(t, T, tau); broadcasts over array arguments."""
    pathway.check(sys)
    i, j = pathway.i, pathway.j
    tau, T, t = _as_time(tau), _as_time(T), _as_time(t)
    c = sys.correlation
    wi, wj = sys.omega_rot[i], sys.omega_rot[j]
    phase = -1j * (wj * t + (wj - wi) * T - wi * tau)
    expo = (
        -np.conj(c.g(i, i, tau + T))
        - c.g(j, j, T + t)
        + np.conj(c.g(i, j, t + T + tau))
        - np.conj(c.g(i, j, t))
        - np.conj(c.g(i, j, tau))
        + c.g(i, j, T)
    )
    amp = sys.dipole[i] ** 2 * sys.dipole[j] ** 2
    return _with_value(amp * np.exp(phase + expo))


def r2_rdm(sys, pathway, tau, T, t):
    """R2 with the ground-state equilibrium projector kept in every interval.

    Only the diagonal pathway (i == j) is defined; the result ignores T.
    """
    pathway.check(sys)
    if not pathway.diagonal:
        raise UnsupportedPathwayError("RDM response is only defined for i == j pathways")
    i = pathway.i
    tau, T, t = _as_time(tau), _as_time(T), _as_time(t)
    c = sys.correlation
    w = sys.omega_rot[i]
    expo = -1j * (w * t - w * tau) - np.conj(c.g(i, i, tau)) - c.g(i, i, t)
    amp = sys.dipole[i] ** 4
    out = amp * np.exp(expo)
    # keep the broadcast shape identical to r2_exact
    return _with_value(out * np.ones(np.broadcast(tau, T, t).shape))


def r2_initial(sys, pathway, tau, T):
    """R2 at t = 0: the initial condition of the third-interval equation."""
    return r2_exact(sys, pathway, tau, T, 0.0)


def _field(fn, sys, pathway, tau_axis, t_axis, T, provenance):
    tau_axis = check_axis(tau_axis, "tau axis")
    t_axis = check_axis(t_axis, "t axis")
    values = fn(sys, pathway, tau_axis[:, None], float(T), t_axis[None, :])
    values = np.broadcast_to(values, (tau_axis.size, t_axis.size)).astype(complex)
    return ResponseField(tau_axis, t_axis, float(T), values, provenance, pathway, sys.frame)


def field_exact(sys, pathway, tau_axis, t_axis, T):
    return _field(r2_exact, sys, pathway, tau_axis, t_axis, T, "exact")


def field_rdm(sys, pathway, tau_axis, t_axis, T):
    return _field(r2_rdm, sys, pathway, tau_axis, t_axis, T, "rdm")
