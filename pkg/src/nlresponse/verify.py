"""Oracle checks run by ``nlresponse verify`` on a configured system.

Every check yields a :class:`VerificationRecord` whose ``passed`` flag is
exactly ``max_rel <= tolerance`` (for the error-ratio checks ``max_rel`` is
the ratio itself, and 0 once the finer result is at the round-off floor).
"""
import time
from dataclasses import asdict, dataclass

import numpy as np

from .bath import CorrelationMatrix, ObOLineBroadening, TabulatedEgcf, egcf_from_obo, g_from_egcf, obo_g
from .config import axes
from .cumulant import PathwaySpec, SystemSpec, field_exact, r2_exact, uniform_axis
from .propagator import coeff_I, coeff_M, k2, k3, r2_via_master
from .spectra import absorption

EXACTNESS_TOL = 1e-4
IDENTITY_TOL = 1e-12
ROUNDTRIP_TOL = 1e-6
RK4_MIN_REDUCTION = 8.0
FD_MIN_ORDER = 1.9
FLOOR = 1e-12


@dataclass
class VerificationRecord:
    name: str
    max_abs: float
    max_rel: float
    tolerance: float
    passed: bool
    runtime_s: float
    note: str = ""

    def as_dict(self):
        return asdict(self)


def _record(name, max_abs, max_rel, tol, t0, note=""):
    max_abs, max_rel = float(max_abs), float(max_rel)
    return VerificationRecord(name, max_abs, max_rel, tol, bool(max_rel <= tol), time.perf_counter() - t0, note)


def exactness_deviation(sys, pw, tau_axis, t_axis, T_list, step):
    """max |propagated - exact| and that over max |exact|, across all T."""
    num = 0.0
    den = 0.0
    for T in T_list:
        ex = field_exact(sys, pw, tau_axis, t_axis, T).values
        pr = r2_via_master(sys, pw, tau_axis, t_axis, T, step).values
        num = max(num, float(np.max(np.abs(pr - ex))))
        den = max(den, float(np.max(np.abs(ex))))
    return num, (num / den if den > 0 else num)


def check_exactness(sys, pw, tau_axis, t_axis, T_list, step):
    t0 = time.perf_counter()
    a, r = exactness_deviation(sys, pw, tau_axis, t_axis, T_list, step)
    return _record("master_equation_exactness", a, r, EXACTNESS_TOL, t0, f"rk_step={step:g} fs")


def check_rk4_order(sys, pw, tau_axis, t_axis, T_list, step):
    t0 = time.perf_counter()
    _, coarse = exactness_deviation(sys, pw, tau_axis, t_axis, T_list, step)
    _, fine = exactness_deviation(sys, pw, tau_axis, t_axis, T_list, step / 2)
    if fine <= FLOOR:
        ratio, note = 0.0, "finer deviation at round-off floor"
    else:
        ratio = fine / coarse
        note = f"reduction factor {coarse / fine:.3g}"
    return _record("rk4_convergence_order", fine, ratio, 1.0 / RK4_MIN_REDUCTION, t0, note)


def check_identities(sys, pw, t_max, samples, seed=0):
    """K2^(ii) = 0 and K3^(ii) + I + M = 0 at random (t, T, tau)."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    t, T, tau = rng.uniform(0.0, t_max, size=(3, samples))
    i = pw.i
    diag = PathwaySpec(i, i)
    k2_err = np.abs(k2(sys, diag, T, tau))
    k3_err = np.abs(k3(sys, diag, t, T, tau) + coeff_I(sys, i, t, T, tau) + coeff_M(sys, i, t))
    worst = float(max(k2_err.max(), k3_err.max()))
    return _record("relaxation_identities", worst, worst, IDENTITY_TOL, t0, f"{samples} samples")


def check_bath_roundtrip(params, t_end=1000.0, step=0.5):
    t0 = time.perf_counter()
    n = int(round(t_end / step)) + 1
    t = uniform_axis(step, n)
    lb = g_from_egcf(TabulatedEgcf(t, egcf_from_obo(params, t)))
    ref = obo_g(params, t[1:])
    diff = np.abs(lb.g(t[1:]) - ref)
    nz = np.abs(ref) > 0
    rel = float(np.max(diff[nz] / np.abs(ref[nz]))) if np.any(nz) else float(diff.max())
    return _record("bath_roundtrip", diff.max(), rel, ROUNDTRIP_TOL, t0, f"{step:g} fs sampling to {t_end:g} fs")


def log_derivative_error(sys, pw, t, T, tau, h):
    """max |centred difference of log R2 in t - (-i w_j + K3)| at times t."""
    wj = sys.omega_rot[pw.j]
    # remove the carrier analytically so the principal log never wraps
    ratio = r2_exact(sys, pw, tau, T, t + h) / r2_exact(sys, pw, tau, T, t - h) * np.exp(2j * wj * h)
    fd = (np.log(ratio) - 2j * wj * h) / (2 * h)
    return float(np.max(np.abs(fd - (-1j * wj + k3(sys, pw, t, T, tau)))))


def check_log_derivative(sys, pw, t_axis, T, tau, steps=(0.5, 0.25)):
    t0 = time.perf_counter()
    # log R2 needs a non-vanishing amplitude; the dipoles only scale it
    sys = SystemSpec(sys.omega, np.ones_like(sys.dipole), sys.correlation, sys.frame)
    t = t_axis[(t_axis >= 1.0)]
    if t.size == 0:
        t = np.array([1.0])
    e1 = log_derivative_error(sys, pw, t, T, tau, steps[0])
    e2 = log_derivative_error(sys, pw, t, T, tau, steps[1])
    if e2 <= FLOOR:
        ratio, note = 0.0, "finer error at round-off floor"
    else:
        order = np.log2(e1 / e2)
        ratio, note = 2.0 ** (-order), f"observed order {order:.3f}"
    return _record("log_derivative_order", e2, ratio, 2.0 ** (-FD_MIN_ORDER), t0, note)


def check_absorption_peak(sys, level, t_axis, lambda_rad):
    """Absorption peak of one level lies within lambda (or one bin if lambda = 0)."""
    t0 = time.perf_counter()
    single = SystemSpec(
        sys.omega[level : level + 1],
        [1.0],
        CorrelationMatrix(sys.correlation.base, 1),
        sys.frame,
    )
    spec = absorption(single, t_axis)
    shift = abs(spec.peak_omega - sys.omega[level])
    tol = lambda_rad if lambda_rad > 0 else spec.bin_width
    return _record("absorption_peak", shift, shift, tol, t0, "tolerance in rad/fs")


def run_checks(cfg, sys, pw, rk_step=None):
    tau_axis, t_axis = axes(cfg)
    T_list = cfg.grids.T_fs
    step = cfg.run.rk_step_fs if rk_step is None else rk_step
    records = [
        check_exactness(sys, pw, tau_axis, t_axis, T_list, step),
        check_rk4_order(sys, pw, tau_axis, t_axis, T_list, step),
    ]
    base = sys.correlation.base
    span = max(tau_axis[-1], t_axis[-1], max(T_list), 1.0)
    if hasattr(base, "t_max"):
        span = min(span, base.t_max / 3.0)
    records.append(check_identities(sys, pw, span, cfg.run.identity_samples, cfg.run.seed))
    if isinstance(base, ObOLineBroadening):
        records.append(check_bath_roundtrip(base.params, t_end=max(1000.0, span)))
        records.append(check_absorption_peak(sys, pw.i, t_axis, base.params.lambda_rad))
    records.append(
        check_log_derivative(
            sys, pw, t_axis[t_axis <= span], min(min(T_list), span), min(tau_axis[tau_axis.size // 2], span)
        )
    )
    return records
