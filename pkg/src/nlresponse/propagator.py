"""Interval-specific time-local master equations for the R2 pathway.

Each interval of the third-order response obeys a scalar linear equation
d rho / ds = a(s) rho with a time-dependent coefficient built from gdot:

* first interval (tau):  d rho_gi/dtau = [+i w_i - gdot_ii*(tau)] rho_gi
* second interval (T):   d rho_ji/dT   = [-i (w_j - w_i) + K2(T, tau)] rho_ji
* third interval (t):    d rho_jg/dt   = [-i w_j + K3(t, T, tau)] rho_jg

The coefficients I and M obtained from the second-coherence projector are
exposed through their second-cumulant closed forms; the normalisation factor
beta = exp(g_ii*(tau)) of that projector cancels inside them and never
appears explicitly.  K3^(ii) = -(I + M) holds identically.

Equations are integrated with classical fixed-step RK4 (see
:mod:`nlresponse._kernels`).  If the requested step is coarser than the output
grid, intermediate outputs come from cubic Hermite interpolation, which uses
the exact right-hand side a(s) y at the nodes.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bath import _as_time
from .cumulant import ResponseField, SystemSpec, check_axis, r2_exact, r2_initial
from .errors import DomainError, GridError

# relative disagreement at which the chained initial condition is replaced
CHAIN_RTOL = 1e-6


def _out(x):
    return complex(x) if np.ndim(x) == 0 else x


def k3(sys, pathway, t, T, tau):
    """Third-interval relaxation coefficient K3^(ji)(t, T, tau), rad/fs."""
    pathway.check(sys)
    i, j = pathway.i, pathway.j
    t, T, tau = _as_time(t), _as_time(T), _as_time(tau)
    c = sys.correlation
    return _out(-np.conj(c.gdot(i, j, t)) + np.conj(c.gdot(i, j, t + T + tau)) - c.gdot(j, j, t + T))


def k2(sys, pathway, T, tau):
    """Second-interval relaxation coefficient K2^(ji)(T, tau); zero when i == j."""
    pathway.check(sys)
    i, j = pathway.i, pathway.j
    T, tau = _as_time(T), _as_time(tau)
    c = sys.correlation
    return _out(
        c.gdot(i, j, T) - np.conj(c.gdot(i, i, T + tau)) - c.gdot(j, j, T) + np.conj(c.gdot(i, j, T + tau))
    )


def coeff_I(sys, i, t, T, tau):
    sys.check_level(i)
    t, T, tau = _as_time(t), _as_time(T), _as_time(tau)
    c = sys.correlation
    return _out(c.gdot(i, i, t + T) - c.gdot(i, i, t) - np.conj(c.gdot(i, i, t + T + tau)) + np.conj(c.gdot(i, i, t)))


def coeff_M(sys, i, t):
    sys.check_level(i)
    return _out(sys.correlation.gdot(i, i, _as_time(t)))


@dataclass(frozen=True)
class OdeSolution:
    """Solution samples; ``values`` is (n,) or (batch, n) matching ``t_axis``."""

    t_axis: np.ndarray
    values: np.ndarray
    scheme: str
    step: float


def _build_nodes(t_out, step):
    """Integration nodes for output times ``t_out`` and a requested step.

    Returns ``(nodes, idx)`` where ``idx[k]`` is the node index of output k,
    or ``idx is None`` when outputs must be interpolated.
    """
    if t_out.size == 1:
        return t_out.copy(), np.array([0])
    d = np.diff(t_out)
    if step <= d.min() * (1 + 1e-12):
        m = np.ceil(d / step - 1e-9).astype(int)
        pieces = [t_out[k] + d[k] * np.arange(m[k]) / m[k] for k in range(d.size)]
        nodes = np.concatenate(pieces + [t_out[-1:]])
        idx = np.concatenate([[0], np.cumsum(m)])
        return nodes, idx
    n = int(math.floor((t_out[-1] - t_out[0]) / step + 1e-9))
    nodes = t_out[0] + step * np.arange(n + 1)
    if t_out[-1] - nodes[-1] > 1e-9 * step:
        nodes = np.append(nodes, t_out[-1])
    return nodes, None


def _hermite(nodes, y, f, x):
    """Cubic Hermite interpolation of rows of y (derivatives f) at points x."""
    k = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, nodes.size - 2)
    h = nodes[k + 1] - nodes[k]
    s = (x - nodes[k]) / h
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    out = h00 * y[:, k] + h10 * h * f[:, k] + h01 * y[:, k + 1] + h11 * h * f[:, k + 1]
    exact = np.isin(x, nodes)
    if np.any(exact):
        out[:, exact] = y[:, np.searchsorted(nodes, x[exact])]
    return out


def solve_linear(coeff, t_out, y0, step):
    """Integrate y' = a(s) y for a batch of scalar equations.

    ``coeff(s)`` maps a 1-D array of times to a (batch, len(s)) complex array.
    ``y0`` has shape (batch,).  Returns a (batch, len(t_out)) array whose first
    column equals ``y0`` exactly.
    """
    if not step > 0:
        raise DomainError(f"integration step must be positive, got {step!r}")
    t_out = np.asarray(t_out, dtype=float)
    if t_out.ndim != 1 or t_out.size == 0 or np.any(np.diff(t_out) <= 0):
        raise GridError("output times must be a non-empty increasing 1-D array")
    y0 = np.atleast_1d(np.asarray(y0, dtype=complex))
    nodes, idx = _build_nodes(t_out, float(step))
    if nodes.size == 1:
        return y0[:, None].copy()
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    batch = y0.size
    a_nodes = np.broadcast_to(coeff(nodes), (batch, nodes.size))
    a_mid = np.broadcast_to(coeff(mids), (batch, mids.size))
    y = _kernels.rk4_linear(nodes, a_nodes, a_mid, y0)
    if idx is not None:
        return y[:, idx]
    return _hermite(nodes, y, a_nodes * y, t_out)


def _squeeze(values, batched):
    return values if batched else values[0]


def propagate_first(sys, i, tau_grid, step=1.0):
    """First-interval coherence rho_gi(tau) from rho_gi(0) = 1."""
    sys.check_level(i)
    tau_grid = _as_time(tau_grid)
    w = sys.omega_rot[i]
    c = sys.correlation

    def coeff(s):
        return (1j * w - np.conj(c.gdot(i, i, s)))[None, :]

    values = solve_linear(coeff, tau_grid, [1.0], step)
    return OdeSolution(tau_grid, values[0], "rk4", float(step))


def propagate_second(sys, pathway, T_grid, tau, step=1.0, initial=None):
    """Second-interval coherence rho_ji(T; tau), batched over ``tau``.

    ``initial`` defaults to R2(0, 0, tau) / (|d_i|^2 |d_j|^2).
    """
    pathway.check(sys)
    T_grid = _as_time(T_grid)
    batched = np.ndim(tau) > 0
    tau = np.atleast_1d(_as_time(tau))
    if initial is None:
        initial = _initial_normalised(sys, pathway, tau)
    dw = sys.omega[pathway.j] - sys.omega[pathway.i]

    def coeff(s):
        return -1j * dw + k2(sys, pathway, s[None, :], tau[:, None])

    values = solve_linear(coeff, T_grid, np.broadcast_to(initial, tau.shape), step)
    return OdeSolution(T_grid, _squeeze(values, batched), "rk4", float(step))


def _initial_normalised(sys, pathway, tau):
    # R2(0, 0, tau) with unit dipoles, so zero dipoles do not need a division
    unit = SystemSpec(sys.omega, np.ones_like(sys.dipole), sys.correlation, sys.frame)
    return np.asarray(r2_exact(unit, pathway, tau, 0.0, 0.0), dtype=complex)


def propagate_third(sys, pathway, t_grid, T, tau, step=1.0, initial=None):
    """Third-interval coherence rho_jg(t; T, tau), batched over ``tau``.

    ``initial`` defaults to R2(0, T, tau).
    """
    pathway.check(sys)
    t_grid = _as_time(t_grid)
    T = float(_as_time(T))
    batched = np.ndim(tau) > 0
    tau = np.atleast_1d(_as_time(tau))
    if initial is None:
        initial = np.asarray(r2_initial(sys, pathway, tau, T), dtype=complex)
    wj = sys.omega_rot[pathway.j]

    def coeff(s):
        return -1j * wj + k3(sys, pathway, s[None, :], T, tau[:, None])

    values = solve_linear(coeff, t_grid, np.broadcast_to(initial, tau.shape), step)
    return OdeSolution(t_grid, _squeeze(values, batched), "rk4", float(step))


def r2_via_master(sys, pathway, tau_axis, t_axis, T, step=1.0):
    """R2 on a (tau, t) grid by chaining the three interval propagations.

    The first-interval solution seeds the second interval; its value at T,
    times the dipole prefactor, seeds the third.  If that chained value
    disagrees with R2(0, T, tau) beyond ``CHAIN_RTOL`` a warning is issued and
    the closed-form initial condition is used instead.
    """
    pathway.check(sys)
    tau_axis = check_axis(tau_axis, "tau axis")
    t_axis = check_axis(t_axis, "t axis")
    T = float(_as_time(T))
    amp = sys.dipole[pathway.i] ** 2 * sys.dipole[pathway.j] ** 2

    first = propagate_first(sys, pathway.i, tau_axis, step).values
    if T > 0:
        second = propagate_second(sys, pathway, [0.0, T], tau_axis, step, initial=first).values[:, -1]
    else:
        second = first
    chained = amp * second

    reference = np.asarray(r2_initial(sys, pathway, tau_axis, T), dtype=complex)
    scale = np.max(np.abs(reference))
    if scale > 0 and np.max(np.abs(chained - reference)) > CHAIN_RTOL * scale:
        warnings.warn(
            "chained initial condition disagrees with R2(0, T, tau); using the closed form",
            RuntimeWarning,
            stacklevel=2,
        )
        chained = reference

    third = propagate_third(sys, pathway, t_axis, T, tau_axis, step, initial=chained)
    return ResponseField(tau_axis, t_axis, T, third.values, "propagated", pathway, sys.frame)
