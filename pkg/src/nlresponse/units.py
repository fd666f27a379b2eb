"""Unit conventions.

Internally time is in fs, angular frequency in rad/fs and hbar = 1.  Inputs in
wavenumbers (cm^-1) are converted with ``omega = 2*pi*c*nu``.
"""
import numpy as np

C_CM_PER_FS = 2.99792458e-5
KB_CM_PER_K = 0.6950348

CM_TO_RAD_FS = 2.0 * np.pi * C_CM_PER_FS


def cm_to_rad_fs(nu):
    """Wavenumber (cm^-1) to angular frequency (rad/fs)."""
    return np.asarray(nu, dtype=float) * CM_TO_RAD_FS if np.ndim(nu) else float(nu) * CM_TO_RAD_FS


def rad_fs_to_cm(omega):
    """Angular frequency (rad/fs) to wavenumber (cm^-1)."""
    return np.asarray(omega, dtype=float) / CM_TO_RAD_FS if np.ndim(omega) else float(omega) / CM_TO_RAD_FS


def thermal_rad_fs(temperature):
    """k_B T / hbar in rad/fs for a temperature in K."""
    return cm_to_rad_fs(KB_CM_PER_K * temperature)
