"""Extended-precision reference values for the closed-form bath and response formulas.

Run with ``python tests/oracles/make_oracles.py``; the printed numbers are
frozen into the test modules.  Nothing here imports the package.
"""
import mpmath as mp

mp.mp.dps = 40

C_CM_PER_FS = mp.mpf("2.99792458e-5")
KB_CM_PER_K = mp.mpf("0.6950348")


def to_rad_fs(nu_cm):
    return 2 * mp.pi * C_CM_PER_FS * mp.mpf(nu_cm)


LAM = to_rad_fs(100)
THETA = to_rad_fs(KB_CM_PER_K * 300)
TAU_C = mp.mpf(100)


def g(t, c=1):
    t = mp.mpf(t)
    return c * (LAM * THETA * TAU_C**2 - 1j * LAM * TAU_C) * (mp.exp(-t / TAU_C) - 1 + t / TAU_C)


def gdot(t, c=1):
    return mp.diff(lambda s: g(s, c), mp.mpf(t))


def egcf(t):
    return mp.diff(g, mp.mpf(t), 2)


def r2_exact(tau, T, t, wi, wj, cij=1, di=1, dj=1):
    gii = lambda s: g(s)
    gjj = lambda s: g(s)
    gij = lambda s: g(s, cij)
    phase = mp.exp(-1j * (wj * t + (wj - wi) * T - wi * tau))
    e1 = mp.exp(-mp.conj(gii(tau + T)) - gjj(T + t) + mp.conj(gij(t + T + tau)))
    e2 = mp.exp(-mp.conj(gij(t)) - mp.conj(gij(tau)) + gij(T))
    return di**2 * dj**2 * phase * e1 * e2


def r2_rdm(tau, t, w):
    return mp.exp(-1j * (w * t - w * tau)) * mp.exp(-mp.conj(g(tau)) - g(t))


def show(name, z):
    z = mp.mpc(z)
    print(f"{name} = complex({mp.nstr(z.real, 17)}, {mp.nstr(z.imag, 17)})")


show("G_100", g(100))
show("GDOT_100", gdot(100))
show("GDOT_INF", gdot(5000))
show("GDOT_TAUC", gdot(100))
show("EGCF_0", egcf(0))
show("EGCF_500", egcf(500))
show("LINEAR_COH_10000CM_200FS", mp.exp(-1j * to_rad_fs(10000) * 200 - g(200)))
show("R2_EXACT_100_0_100", r2_exact(100, 0, 100, 0, 0))
show("R2_RDM_100_100", r2_rdm(100, 100, 0))
show("R2_INITIAL_50_100", r2_exact(50, 100, 0, 0, 0))
# K3 with i=j at t=T=tau=100
gd = lambda s: gdot(s)
show("K3_100_100_100", -mp.conj(gd(100)) + mp.conj(gd(300)) - gd(200))
# K2 for i != j, c_ij = 0, T = tau = 100
show("K2_CIJ0_100_100", -mp.conj(gd(200)) - gd(100))
# I at t=0, T=100, tau=50
show("COEFF_I_0_100_50", gd(100) - mp.conj(gd(150)))
