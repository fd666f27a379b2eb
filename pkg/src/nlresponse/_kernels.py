"""Inner loops: batched RK4 for scalar linear ODEs and cumulative quadrature.

Each kernel has a numba ``@njit`` implementation and a pure-numpy one with the
same signature.  The public names (``rk4_linear``, ``cumulative_integral``)
point at the numba versions unless numba is missing or the environment
variable ``NLRESPONSE_DISABLE_NUMBA`` is set to ``1``/``true``/``yes``.
Both paths are always importable so they can be benchmarked and cross-checked.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

_DISABLED = os.environ.get("NLRESPONSE_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")
USE_NUMBA = numba is not None and not _DISABLED


def _njit(fn):
    if numba is None:  # pragma: no cover
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# RK4 for y' = a(t) y, batched over independent rows.
#
# a is supplied at the integration nodes and at the step midpoints, which is
# all classical RK4 needs for a linear right-hand side.  Nodes may be
# non-uniform.


def _rk4_linear_py(nodes, a_nodes, a_mid, y0):
    nb, n = a_nodes.shape
    out = np.empty((nb, n), dtype=np.complex128)
    for b in range(nb):
        y = y0[b]
        out[b, 0] = y
        for k in range(n - 1):
            h = nodes[k + 1] - nodes[k]
            am = a_mid[b, k]
            k1 = a_nodes[b, k] * y
            k2 = am * (y + 0.5 * h * k1)
            k3 = am * (y + 0.5 * h * k2)
            k4 = a_nodes[b, k + 1] * (y + h * k3)
            y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            out[b, k + 1] = y
    return out


rk4_linear_numba = _njit(_rk4_linear_py)


def rk4_linear_numpy(nodes, a_nodes, a_mid, y0):
    a_nodes = np.asarray(a_nodes, dtype=np.complex128)
    a_mid = np.asarray(a_mid, dtype=np.complex128)
    y = np.array(y0, dtype=np.complex128)
    out = np.empty(a_nodes.shape, dtype=np.complex128)
    out[:, 0] = y
    h = np.diff(nodes)
    for k in range(a_nodes.shape[1] - 1):
        hk = h[k]
        am = a_mid[:, k]
        k1 = a_nodes[:, k] * y
        k2 = am * (y + 0.5 * hk * k1)
        k3 = am * (y + 0.5 * hk * k2)
        k4 = a_nodes[:, k + 1] * (y + hk * k3)
        y = y + hk / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[:, k + 1] = y
    return out


# ---------------------------------------------------------------------------
# Cumulative integral of uniformly sampled data, fourth order.
#
# Each interval [t_k, t_k+1] is integrated with the cubic through the four
# nearest samples; the first and last intervals use one-sided stencils.
# Needs at least 4 samples.


def _cumulative_integral_py(f, h):
    n = f.shape[0]
    out = np.empty(n, dtype=np.complex128)
    out[0] = 0.0
    c = h / 24.0
    out[1] = out[0] + c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
    for k in range(1, n - 2):
        out[k + 1] = out[k] + c * (-f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2])
    out[n - 1] = out[n - 2] + c * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1])
    return out


cumulative_integral_numba = _njit(_cumulative_integral_py)


def cumulative_integral_numpy(f, h):
    f = np.asarray(f, dtype=np.complex128)
    n = f.shape[0]
    pieces = np.empty(n - 1, dtype=np.complex128)
    pieces[0] = 9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]
    pieces[1:n - 2] = -f[:n - 3] + 13.0 * f[1:n - 2] + 13.0 * f[2:n - 1] - f[3:]
    pieces[n - 2] = f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]
    out = np.empty(n, dtype=np.complex128)
    out[0] = 0.0
    out[1:] = np.cumsum(pieces * (h / 24.0))
    return out


if USE_NUMBA:
    def rk4_linear(nodes, a_nodes, a_mid, y0):
        return rk4_linear_numba(
            np.ascontiguousarray(nodes, dtype=np.float64),
            np.ascontiguousarray(a_nodes, dtype=np.complex128),
            np.ascontiguousarray(a_mid, dtype=np.complex128),
            np.ascontiguousarray(y0, dtype=np.complex128),
        )

    def cumulative_integral(f, h):
        return cumulative_integral_numba(np.ascontiguousarray(f, dtype=np.complex128), float(h))
else:
    rk4_linear = rk4_linear_numpy
    cumulative_integral = cumulative_integral_numpy
