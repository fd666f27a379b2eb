"""Energy-gap correlation functions and line-broadening functions.

Two backings are provided for ``g(t)`` and its derivative:

* the overdamped Brownian oscillator (OBO) in closed form,

      g(t) = (lambda * theta * tau_c**2 - 1j * lambda * tau_c) * (exp(-t/tau_c) - 1 + t/tau_c)

  with ``theta = k_B T / hbar``.  Note that this form carries no factor of 2
  in the high-temperature prefactor, unlike some textbook expressions; it is
  used as written.

* tabulated correlation functions C(t), integrated twice with a fourth-order
  cumulative rule and interpolated with cubic splines.

Levels share one bath; cross-correlations enter only through a symmetric
coefficient matrix, ``g_ij = c_ij * g``.
"""
import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from . import _kernels
from .errors import DomainError, GridError, TableFormatError, TableRangeError
from .units import CM_TO_RAD_FS, cm_to_rad_fs, thermal_rad_fs

_UNIFORM_RTOL = 1e-9


def _as_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(~np.isfinite(t)):
        raise DomainError("time arguments must be finite and non-negative")
    return t


def _result(x):
    return complex(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class ObOParams:
    """Overdamped Brownian oscillator parameters.

    lambda_reorg is in cm^-1, tau_corr in fs and temperature in K.
    ``lambda_reorg = 0`` is allowed and switches the bath off.
    """

    lambda_reorg: float
    tau_corr: float
    temperature: float

    def __post_init__(self):
        if not (np.isfinite(self.lambda_reorg) and self.lambda_reorg >= 0):
            raise DomainError(f"lambda_reorg must be >= 0, got {self.lambda_reorg}")
        if not (np.isfinite(self.tau_corr) and self.tau_corr > 0):
            raise DomainError(f"tau_corr must be > 0, got {self.tau_corr}")
        if not (np.isfinite(self.temperature) and self.temperature > 0):
            raise DomainError(f"temperature must be > 0, got {self.temperature}")

    @property
    def lambda_rad(self):
        return cm_to_rad_fs(self.lambda_reorg)

    @property
    def theta(self):
        return thermal_rad_fs(self.temperature)


def obo_g(params, t):
    """Closed-form OBO line-broadening function (dimensionless, complex)."""
    t = _as_time(t)
    lam, tc = params.lambda_rad, params.tau_corr
    x = t / tc
    # expm1 keeps the bracket accurate for t << tau_c
    bracket = np.expm1(-x) + x
    return _result((lam * params.theta * tc**2 - 1j * lam * tc) * bracket)


def obo_gdot(params, t):
    """Time derivative of :func:`obo_g`, rad/fs."""
    t = _as_time(t)
    lam, tc = params.lambda_rad, params.tau_corr
    return _result((lam * params.theta * tc - 1j * lam) * -np.expm1(-t / tc))


def egcf_from_obo(params, t):
    """OBO correlation function C(t) = d^2 g / dt^2, rad^2/fs^2."""
    t = _as_time(t)
    lam, tc = params.lambda_rad, params.tau_corr
    return _result((lam * params.theta - 1j * lam / tc) * np.exp(-t / tc))


def _check_uniform(times, what):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise TableFormatError(f"{what} needs at least two samples")
    if times[0] != 0.0:
        raise TableFormatError(f"{what} must start at t = 0")
    d = np.diff(times)
    if np.any(d <= 0):
        raise TableFormatError(f"{what} must be strictly increasing")
    h = (times[-1] - times[0]) / (times.size - 1)
    if np.max(np.abs(d - h)) > _UNIFORM_RTOL * max(h, times[-1]):
        raise TableFormatError(f"{what} must be uniformly spaced")
    return times, h


@dataclass(frozen=True)
class TabulatedEgcf:
    """Sampled correlation function C(t) on a uniform grid from t = 0.

    Times in fs, values in rad^2/fs^2.  Only t >= 0 is stored; C(-t) = C(t)*
    is never needed by the quadrature.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times, _ = _check_uniform(self.times, "EGCF table")
        values = np.asarray(self.values, dtype=complex)
        if values.shape != times.shape:
            raise TableFormatError("EGCF times and values differ in length")
        if values[0].real < 0:
            raise TableFormatError("Re C(0) must be non-negative")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def step(self):
        return (self.times[-1] - self.times[0]) / (self.times.size - 1)


class LineBroadening:
    """Evaluator for g(t) and its derivative gdot(t).

    Subclasses implement ``_g`` and ``_gdot`` on validated, non-negative
    float arrays.
    """

    model = "abstract"

    def g(self, t):
        return _result(self._g(_as_time(t)))

    def gdot(self, t):
        return _result(self._gdot(_as_time(t)))

    def _g(self, t):
        raise NotImplementedError

    def _gdot(self, t):
        raise NotImplementedError


class ObOLineBroadening(LineBroadening):
    model = "analytic-obo"

    def __init__(self, params):
        self.params = params

    def _g(self, t):
        return np.asarray(obo_g(self.params, t), dtype=complex)

    def _gdot(self, t):
        return np.asarray(obo_gdot(self.params, t), dtype=complex)

    def __repr__(self):
        return f"ObOLineBroadening({self.params!r})"


class TabulatedLineBroadening(LineBroadening):
    """g and gdot sampled on a uniform grid, evaluated by cubic splines."""

    model = "tabulated-quadrature"

    def __init__(self, times, g_values, gdot_values):
        self.times = np.asarray(times, dtype=float)
        self.g_values = np.asarray(g_values, dtype=complex)
        self.gdot_values = np.asarray(gdot_values, dtype=complex)
        self._g_spline = CubicSpline(self.times, self.g_values)
        self._gdot_spline = CubicSpline(self.times, self.gdot_values)
        self.t_max = float(self.times[-1])

    def _check_range(self, t):
        if t.size and np.max(t) > self.t_max * (1 + 1e-12):
            raise TableRangeError(f"t = {np.max(t):g} fs beyond tabulated range {self.t_max:g} fs")

    def _g(self, t):
        self._check_range(t)
        return np.where(t == 0, 0.0, self._g_spline(t))

    def _gdot(self, t):
        self._check_range(t)
        return np.where(t == 0, 0.0, self._gdot_spline(t))


class ScaledLineBroadening(LineBroadening):
    """``factor * base``; used for cross-correlated level pairs."""

    def __init__(self, base, factor):
        self.base = base
        self.factor = float(factor)
        self.model = base.model

    def _g(self, t):
        return self.factor * self.base._g(t)

    def _gdot(self, t):
        return self.factor * self.base._gdot(t)


def g_from_egcf(egcf, t_grid=None):
    """Integrate a tabulated C(t) twice into a :class:`TabulatedLineBroadening`.

    gdot(t) = int_0^t C and g(t) = int_0^t gdot, both with a fourth-order
    cumulative rule.  ``t_grid`` defaults to the table's own axis; any other
    grid must be uniform, start at 0 and stay within the table, and C is then
    spline-interpolated onto it.
    """
    if t_grid is None:
        t_grid, values = egcf.times, egcf.values
    else:
        try:
            t_grid, _ = _check_uniform(t_grid, "t_grid")
        except TableFormatError as exc:
            raise GridError(str(exc)) from None
        if t_grid[-1] > egcf.times[-1] * (1 + 1e-12):
            raise TableRangeError(
                f"t_grid ends at {t_grid[-1]:g} fs, beyond table end {egcf.times[-1]:g} fs"
            )
        if t_grid.size == egcf.times.size and np.allclose(t_grid, egcf.times, rtol=0, atol=1e-12):
            values = egcf.values
        else:
            values = CubicSpline(egcf.times, egcf.values)(t_grid)
    if t_grid.size < 4:
        raise GridError("quadrature needs at least 4 samples")
    h = (t_grid[-1] - t_grid[0]) / (t_grid.size - 1)
    gdot = _kernels.cumulative_integral(values, h)
    g = _kernels.cumulative_integral(gdot, h)
    return TabulatedLineBroadening(t_grid, g, gdot)


@dataclass
class CorrelationMatrix:
    """Line-broadening functions for every level pair, g_ij = c_ij * g.

    ``coefficients`` defaults to the identity (uncorrelated levels).
    """

    base: LineBroadening
    size: int
    coefficients: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.size < 1:
            raise DomainError("correlation matrix needs at least one level")
        if self.coefficients is None:
            c = np.eye(self.size)
        else:
            c = np.array(self.coefficients, dtype=float)
        if c.shape != (self.size, self.size):
            raise DomainError(f"coefficients must be {self.size}x{self.size}, got {c.shape}")
        if not np.array_equal(c, c.T):
            raise DomainError("correlation coefficients must be symmetric")
        if np.any(np.diag(c) != 1.0):
            raise DomainError("diagonal correlation coefficients must equal 1")
        if np.any(np.abs(c) > 1.0):
            raise DomainError("correlation coefficients must lie in [-1, 1]")
        self.coefficients = c

    def _check(self, i, j):
        if not (0 <= i < self.size and 0 <= j < self.size):
            raise DomainError(f"level pair ({i}, {j}) outside 0..{self.size - 1}")

    def pair(self, i, j):
        self._check(i, j)
        return ScaledLineBroadening(self.base, self.coefficients[i, j])

    def g(self, i, j, t):
        self._check(i, j)
        return _result(self.coefficients[i, j] * self.base._g(_as_time(t)))

    def gdot(self, i, j, t):
        self._check(i, j)
        return _result(self.coefficients[i, j] * self.base._gdot(_as_time(t)))


# ---------------------------------------------------------------------------
# EGCF table files: CSV with header ``t_fs,re,im`` plus a sidecar
# ``<stem>.units.csv`` with header ``column,units`` naming the units of the
# ``re`` and ``im`` columns.

EGCF_UNITS = {
    "rad2/fs2": 1.0,
    "cm-2": CM_TO_RAD_FS**2,
}


def units_sidecar_path(path):
    path = Path(path)
    return path.with_name(path.stem + ".units.csv")


def load_egcf_csv(path, units=None):
    """Read a tabulated EGCF.

    Units come from the sidecar file unless ``units`` is given explicitly.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t_fs", "re", "im"]:
            raise TableFormatError(f"{path}: header must be 't_fs,re,im', got {header}")
        try:
            rows = np.array([[float(x) for x in row] for row in reader if row], dtype=float)
        except ValueError as exc:
            raise TableFormatError(f"{path}: {exc}") from None
    if rows.ndim != 2 or rows.shape[1] != 3:
        raise TableFormatError(f"{path}: expected three numeric columns")

    if units is None:
        units = _read_units_sidecar(path)
    if units not in EGCF_UNITS:
        raise TableFormatError(f"unknown EGCF units {units!r}; expected one of {sorted(EGCF_UNITS)}")
    scale = EGCF_UNITS[units]
    return TabulatedEgcf(rows[:, 0], scale * (rows[:, 1] + 1j * rows[:, 2]))


def _read_units_sidecar(path):
    side = units_sidecar_path(path)
    if not side.exists():
        raise TableFormatError(f"{path}: units sidecar {side.name} not found")
    with side.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) != {"column", "units"}:
            raise TableFormatError(f"{side}: header must be 'column,units'")
        found = {row["column"].strip(): row["units"].strip() for row in reader}
    missing = {"re", "im"} - set(found)
    if missing:
        raise TableFormatError(f"{side}: no units given for {sorted(missing)}")
    if found["re"] != found["im"]:
        raise TableFormatError(f"{side}: mixed units {found['re']!r} and {found['im']!r}")
    return found["re"]


def write_egcf_csv(path, egcf, units="rad2/fs2"):
    """Write an EGCF table and its units sidecar; inverse of :func:`load_egcf_csv`."""
    path = Path(path)
    scale = EGCF_UNITS[units]
    vals = egcf.values / scale
    with path.open("w", newline="") as fh:
        fh.write("t_fs,re,im\n")
        for t, v in zip(egcf.times, vals):
            fh.write(f"{t:.17g},{v.real:.17g},{v.imag:.17g}\n")
    with units_sidecar_path(path).open("w", newline="") as fh:
        fh.write(f"column,units\nre,{units}\nim,{units}\n")
