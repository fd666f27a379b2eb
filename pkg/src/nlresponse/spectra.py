"""Fourier transforms of response functions and 2D lineshape metrics.

Conventions
-----------
Time signals are weighted by 1/2 at t = 0 (trapezoid end point), optionally
apodized, zero-padded to a power of two and transformed with

    A(w)        = Re  dt * sum_n x(t_n) exp(+i w t_n)
    F(w1, w3)   =     dtau dt * sum x(tau, t) exp(-i w1 tau) exp(+i w3 t)

The minus sign on the tau kernel is the rephasing convention: the R2
coherence exp(+i w_ig tau) lands at positive w1 = w_ig.  Frequency axes are
absolute, i.e. the rotating-frame carrier of the input is added back.

The displayed 2D map is |F| by default.  Re F is available
(``part="real"``) but a rephasing-only Re F carries the phase-twist
lineshape, whose dispersive cross term elongates even an uncorrelated peak
along the diagonal and so masks the ellipticity contrast the metrics are
meant to measure.

The complex transforms obey a discrete Parseval identity

    sum |F|^2 dw1 dw3 = (2 pi)^2 sum |x|^2 dtau dt

with dw = 2 pi / (N dt) on the padded length N.

Only the R2 pathway enters these maps; a complete rephasing spectrum would
also contain ground-state bleach contributions.
"""
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage

from .cumulant import axis_step, check_axis, linear_coherence
from .errors import AmbiguousPeakError, GridError, WindowingError
from .units import rad_fs_to_cm

WINDOWS = ("none", "cos2")
PARTS = ("abs", "real")
PAD_2D = 8
TAPER_FRACTION = 0.2
METRIC_THRESHOLD = 0.5


def time_window(n, kind="cos2"):
    """Apodization for n samples; ``cos2`` tapers the last 20% to zero."""
    if kind not in WINDOWS:
        raise ValueError(f"unknown window {kind!r}; expected one of {WINDOWS}")
    w = np.ones(n)
    if kind == "cos2":
        m = int(np.ceil(TAPER_FRACTION * n))
        if m:
            x = np.arange(1, m + 1) / m
            w[n - m:] = np.cos(0.5 * np.pi * x) ** 2
    return w


def _padded_length(n, factor):
    target = max(1, int(np.ceil(factor * n)))
    return 1 << (target - 1).bit_length()


def _freq_axis(n_pad, dt, frame):
    return np.fft.fftshift(np.fft.fftfreq(n_pad, d=dt)) * 2 * np.pi + frame


@dataclass(frozen=True)
class Spectrum1D:
    omega_axis: np.ndarray
    values: np.ndarray

    @property
    def omega_cm(self):
        return rad_fs_to_cm(self.omega_axis)

    @property
    def peak_omega(self):
        return float(self.omega_axis[np.argmax(self.values)])

    @property
    def bin_width(self):
        return float(self.omega_axis[1] - self.omega_axis[0])


@dataclass(frozen=True)
class Spectrum2D:
    """Real 2D map indexed [w_tau, w_t]."""

    omega_tau_axis: np.ndarray
    omega_t_axis: np.ndarray
    values: np.ndarray
    T: float
    provenance: str


def absorption(sys, t_grid, window="none", pad=4):
    """Absorption lineshape from the one-sided transform of sum |d_i|^2 rho_ig(t)."""
    t_grid = check_axis(t_grid, "t grid")
    n = t_grid.size
    if n < 8:
        raise GridError("absorption needs at least 8 time samples")
    dt = axis_step(t_grid)
    s = np.zeros(n, dtype=complex)
    for i in range(sys.num_levels):
        s += sys.dipole[i] ** 2 * linear_coherence(sys, i, t_grid)
    x = s * time_window(n, window)
    x[0] *= 0.5
    n_pad = _padded_length(n, pad)
    spec = dt * n_pad * np.fft.ifft(x, n_pad)
    return Spectrum1D(_freq_axis(n_pad, dt, sys.frame), np.fft.fftshift(spec).real)


def spectrum2d_complex(field, window="cos2", pad=PAD_2D):
    """Complex 2D transform of a response field.

    Returns ``(omega_tau_axis, omega_t_axis, F, x)`` where ``x`` is the
    weighted, windowed time-domain input actually transformed.
    """
    tau = check_axis(field.tau_axis, "tau axis")
    t = check_axis(field.t_axis, "t axis")
    if tau.size < 2 or t.size < 2:
        raise GridError("2D transform needs at least two samples per axis")
    dtau, dt = axis_step(tau), axis_step(t)
    x = np.array(field.values, dtype=complex)
    x *= time_window(tau.size, window)[:, None] * time_window(t.size, window)[None, :]
    x[0, :] *= 0.5
    x[:, 0] *= 0.5
    n1, n3 = _padded_length(tau.size, pad), _padded_length(t.size, pad)
    F = np.fft.fft(x, n1, axis=0)
    F = np.fft.ifft(F, n3, axis=1) * (n3 * dtau * dt)
    F = np.fft.fftshift(F)
    return _freq_axis(n1, dtau, field.frame), _freq_axis(n3, dt, field.frame), F, x


def spectrum2d(field, window="cos2", pad=PAD_2D, part="abs"):
    """Rephasing 2D spectrum S(w_tau, w_t; T) of an R2 field, |F| or Re F."""
    if part not in PARTS:
        raise ValueError(f"unknown part {part!r}; expected one of {PARTS}")
    w1, w3, F, _ = spectrum2d_complex(field, window, pad)
    values = np.abs(F) if part == "abs" else F.real
    return Spectrum2D(w1, w3, values, field.T, field.provenance)


def crop(spec, center, half_width):
    """Sub-map with both frequency axes inside center +/- half_width (rad/fs)."""
    k1 = np.abs(spec.omega_tau_axis - center) <= half_width
    k3 = np.abs(spec.omega_t_axis - center) <= half_width
    return Spectrum2D(
        spec.omega_tau_axis[k1], spec.omega_t_axis[k3], spec.values[np.ix_(k1, k3)], spec.T, spec.provenance
    )


@dataclass(frozen=True)
class LineshapeMetrics:
    """Peak location (rad/fs), amplitude and moment-based ellipticity.

    ``diagonal_width`` and ``antidiagonal_width`` are the rms extents of the
    half-maximum region about the peak along w_t = w_tau and perpendicular
    to it.
    """

    peak_omega_tau: float
    peak_omega_t: float
    peak_amplitude: float
    ellipticity: float
    diagonal_width: float
    antidiagonal_width: float

    def as_dict(self):
        d = asdict(self)
        d["peak_omega_tau_cm"] = float(rad_fs_to_cm(self.peak_omega_tau))
        d["peak_omega_t_cm"] = float(rad_fs_to_cm(self.peak_omega_t))
        return d


def lineshape_metrics(spec, threshold=METRIC_THRESHOLD):
    """Ellipticity (a^2 - b^2) / (a^2 + b^2) of the main peak.

    Second moments are taken over the connected region above ``threshold``
    times the peak value, in coordinates rotated by 45 degrees about the peak.
    """
    v = np.asarray(spec.values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("spectrum contains non-finite values")
    k = np.unravel_index(np.argmax(v), v.shape)
    vmax = v[k]
    if np.count_nonzero(v >= vmax - 1e-9 * abs(vmax)) > 1:
        raise AmbiguousPeakError("spectrum has more than one global maximum")
    if k[0] in (0, v.shape[0] - 1) or k[1] in (0, v.shape[1] - 1):
        raise WindowingError("spectral peak lies on the map boundary")

    labels, _ = ndimage.label(v >= threshold * vmax)
    region = labels == labels[k]
    x = spec.omega_tau_axis[:, None] - spec.omega_tau_axis[k[0]]
    y = spec.omega_t_axis[None, :] - spec.omega_t_axis[k[1]]
    u = (x + y) / np.sqrt(2.0)
    w = (y - x) / np.sqrt(2.0)
    weight = np.where(region, v, 0.0)
    total = weight.sum()
    a2 = float(np.sum(weight * u**2) / total)
    b2 = float(np.sum(weight * w**2) / total)
    return LineshapeMetrics(
        peak_omega_tau=float(spec.omega_tau_axis[k[0]]),
        peak_omega_t=float(spec.omega_t_axis[k[1]]),
        peak_amplitude=float(vmax),
        ellipticity=(a2 - b2) / (a2 + b2),
        diagonal_width=float(np.sqrt(a2)),
        antidiagonal_width=float(np.sqrt(b2)),
    )


def compare(first, second):
    """Metrics of two spectra on identical axes and their differences (second - first)."""
    if not (
        np.array_equal(first.omega_tau_axis, second.omega_tau_axis)
        and np.array_equal(first.omega_t_axis, second.omega_t_axis)
    ):
        raise GridError("spectra are defined on different frequency axes")
    m1, m2 = lineshape_metrics(first), lineshape_metrics(second)
    d1, d2 = m1.as_dict(), m2.as_dict()
    return {
        "first": {"provenance": first.provenance, "T_fs": first.T, **d1},
        "second": {"provenance": second.provenance, "T_fs": second.T, **d2},
        "difference": {key: d2[key] - d1[key] for key in d1},
    }
