import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_system
from nlresponse.cumulant import PathwaySpec, ResponseField, field_exact, field_rdm, uniform_axis
from nlresponse.errors import AmbiguousPeakError, GridError, WindowingError
from nlresponse.spectra import (
    PAD_2D,
    Spectrum2D,
    absorption,
    compare,
    crop,
    lineshape_metrics,
    spectrum2d,
    spectrum2d_complex,
    time_window,
)
from nlresponse.units import cm_to_rad_fs

AXIS = uniform_axis(2.0, 251)
DIAG = PathwaySpec(0, 0)


def _field(values, step=2.0, frame=0.0):
    n1, n3 = values.shape
    return ResponseField(uniform_axis(step, n1), uniform_axis(step, n3), 0.0, values, "exact", DIAG, frame)


def _gaussian_map(su, sw, n=401, half=1.0):
    """Gaussian peak at the origin with rms widths su (diagonal) and sw (antidiagonal)."""
    ax = np.linspace(-half, half, n)
    x, y = np.meshgrid(ax, ax, indexing="ij")
    u, w = (x + y) / np.sqrt(2), (y - x) / np.sqrt(2)
    return Spectrum2D(ax, ax, np.exp(-u**2 / (2 * su**2) - w**2 / (2 * sw**2)), 0.0, "exact")


@pytest.fixture(scope="module")
def ref_fields():
    sys = make_system()
    return sys, {T: (field_exact(sys, DIAG, AXIS, AXIS, T), field_rdm(sys, DIAG, AXIS, AXIS, T)) for T in (0.0, 100.0, 500.0)}


# -- windows and absorption ------------------------------------------------------


def test_time_window():
    np.testing.assert_array_equal(time_window(10, "none"), np.ones(10))
    w = time_window(100, "cos2")
    assert np.all(w[:80] == 1.0) and w[-1] == pytest.approx(0.0, abs=1e-30)
    assert np.all(np.diff(w[79:]) <= 0)
    with pytest.raises(ValueError):
        time_window(10, "hann")


def test_absorption_bare_peak():
    sys = make_system(lam=0.0, frame_cm=9000.0)
    spec = absorption(sys, AXIS)
    assert abs(spec.peak_omega - sys.omega[0]) <= spec.bin_width
    np.testing.assert_allclose(np.diff(spec.omega_axis), spec.bin_width, rtol=1e-9)
    assert spec.omega_axis.size == 1024


def test_absorption_zero_dipole():
    spec = absorption(make_system(dipoles=(0.0,)), AXIS)
    assert np.all(spec.values == 0)


def test_absorption_reference_peak_and_width():
    sys = make_system()
    lam = cm_to_rad_fs(100.0)
    coarse = absorption(sys, AXIS)
    dense = absorption(sys, uniform_axis(0.5, 4001))
    assert abs(coarse.peak_omega - sys.omega[0]) <= lam

    def fwhm(s):
        w, v = s.omega_axis, s.values
        h = v.max() / 2
        k = np.flatnonzero(v >= h)
        lo, hi = k[0], k[-1]
        left = w[lo - 1] + (h - v[lo - 1]) / (v[lo] - v[lo - 1]) * (w[lo] - w[lo - 1])
        right = w[hi] + (v[hi] - h) / (v[hi] - v[hi + 1]) * (w[hi + 1] - w[hi])
        return right - left

    assert fwhm(coarse) == pytest.approx(fwhm(dense), rel=0.01)


def test_absorption_errors():
    sys = make_system()
    with pytest.raises(GridError):
        absorption(sys, uniform_axis(1.0, 7))
    with pytest.raises(GridError):
        absorption(sys, [0.0, 1.0, 2.0, 4.0, 5.0, 6.0, 7.0, 8.0])


# -- 2D transform --------------------------------------------------------------------


def test_zero_field():
    spec = spectrum2d(_field(np.zeros((16, 16), dtype=complex)))
    assert np.all(spec.values == 0)


def test_bare_peak_at_frame():
    sys = make_system(lam=0.0)
    spec = spectrum2d(field_exact(sys, DIAG, uniform_axis(2.0, 64), uniform_axis(2.0, 64), 0.0))
    k = np.unravel_index(np.argmax(spec.values), spec.values.shape)
    assert spec.omega_tau_axis[k[0]] == pytest.approx(sys.frame, abs=1e-12)
    assert spec.omega_t_axis[k[1]] == pytest.approx(sys.frame, abs=1e-12)


def test_off_frame_peak_lands_at_transition():
    sys = make_system(levels_cm=(10300.0,), lam=0.0, frame_cm=10000.0)
    spec = spectrum2d(field_exact(sys, DIAG, AXIS, AXIS, 0.0))
    k = np.unravel_index(np.argmax(spec.values), spec.values.shape)
    bin_ = 2 * np.pi / (AXIS.size * 2.0)
    assert abs(spec.omega_tau_axis[k[0]] - sys.omega[0]) <= bin_
    assert abs(spec.omega_t_axis[k[1]] - sys.omega[0]) <= bin_


def test_reference_exact_peak_within_one_bin(ref_fields):
    sys, fields = ref_fields
    m = lineshape_metrics(spectrum2d(fields[0.0][0]))
    bin_ = 2 * np.pi / (AXIS.size * 2.0)
    assert abs(m.peak_omega_tau - sys.omega[0]) <= bin_
    assert abs(m.peak_omega_t - sys.omega[0]) <= bin_


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 24), st.integers(2, 24), st.integers(0, 2**32 - 1), st.sampled_from(["none", "cos2"]))
def test_parseval(n1, n3, seed, window):
    rng = np.random.default_rng(seed)
    field = _field(rng.normal(size=(n1, n3)) + 1j * rng.normal(size=(n1, n3)), step=1.5)
    w1, w3, F, x = spectrum2d_complex(field, window=window, pad=2)
    d1, d3 = w1[1] - w1[0], w3[1] - w3[0]
    lhs = np.sum(np.abs(F) ** 2) * d1 * d3
    rhs = (2 * np.pi) ** 2 * np.sum(np.abs(x) ** 2) * 1.5 * 1.5
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_linearity(ref_fields):
    _, fields = ref_fields
    a, b = 0.7 - 0.2j, -1.3 + 0.5j
    r1, r2 = fields[0.0][0], fields[100.0][0]
    mix = _field(a * r1.values + b * r2.values)
    _, _, F1, _ = spectrum2d_complex(r1)
    _, _, F2, _ = spectrum2d_complex(r2)
    _, _, F, _ = spectrum2d_complex(mix)
    scale = np.max(np.abs(F))
    assert np.max(np.abs(F - (a * F1 + b * F2))) <= 1e-12 * scale
    # the real part is linear under real coefficients
    s = spectrum2d(_field(0.3 * r1.values - 2.0 * r2.values), part="real").values
    s1 = spectrum2d(r1, part="real").values
    s2 = spectrum2d(r2, part="real").values
    assert np.max(np.abs(s - (0.3 * s1 - 2.0 * s2))) <= 1e-12 * np.max(np.abs(s))


def test_spectrum_shape_and_options(ref_fields):
    _, fields = ref_fields
    spec = spectrum2d(fields[0.0][0])
    assert spec.values.shape == (2048, 2048) and PAD_2D == 8
    assert np.all(spec.values >= 0) and spec.provenance == "exact"
    re = spectrum2d(fields[0.0][0], part="real")
    assert np.all(np.abs(re.values) <= spec.values + 1e-9)
    with pytest.raises(ValueError):
        spectrum2d(fields[0.0][0], part="imag")
    with pytest.raises(GridError):
        spectrum2d(_field(np.ones((1, 4), dtype=complex)))


def test_padding_invariance(ref_fields):
    _, fields = ref_fields
    m1 = lineshape_metrics(spectrum2d(fields[0.0][0], pad=PAD_2D))
    m2 = lineshape_metrics(spectrum2d(fields[0.0][0], pad=2 * PAD_2D))
    bin_ = 2 * np.pi / (AXIS.size * 2.0)
    assert abs(m1.peak_omega_tau - m2.peak_omega_tau) < bin_
    assert abs(m1.peak_omega_t - m2.peak_omega_t) < bin_
    assert m2.ellipticity == pytest.approx(m1.ellipticity, rel=0.01)


def test_crop(ref_fields):
    sys, fields = ref_fields
    spec = spectrum2d(fields[0.0][0])
    half = cm_to_rad_fs(500.0)
    c = crop(spec, sys.frame, half)
    assert np.all(np.abs(c.omega_tau_axis - sys.frame) <= half)
    assert c.values.shape == (c.omega_tau_axis.size, c.omega_t_axis.size)
    assert c.values.max() == spec.values.max()


# -- metrics -------------------------------------------------------------------------


def test_isotropic_gaussian():
    assert abs(lineshape_metrics(_gaussian_map(0.1, 0.1)).ellipticity) <= 1e-3


def test_elongated_gaussian():
    m = lineshape_metrics(_gaussian_map(0.15, 0.05))
    assert m.ellipticity == pytest.approx(0.8, rel=0.02)
    assert m.diagonal_width > m.antidiagonal_width
    anti = lineshape_metrics(_gaussian_map(0.05, 0.15))
    assert anti.ellipticity == pytest.approx(-0.8, rel=0.02)


def test_metric_errors():
    v = np.zeros((9, 9))
    v[0, 4] = 1.0
    ax = np.arange(9.0)
    with pytest.raises(WindowingError):
        lineshape_metrics(Spectrum2D(ax, ax, v, 0.0, "exact"))
    v = np.zeros((9, 9))
    v[3, 3] = v[5, 5] = 1.0
    with pytest.raises(AmbiguousPeakError):
        lineshape_metrics(Spectrum2D(ax, ax, v, 0.0, "exact"))
    v[5, 5] = 1.0 - 1e-12
    with pytest.raises(AmbiguousPeakError):
        lineshape_metrics(Spectrum2D(ax, ax, v, 0.0, "exact"))
    v[5, 5] = np.nan
    with pytest.raises(ValueError):
        lineshape_metrics(Spectrum2D(ax, ax, v, 0.0, "exact"))


def test_metrics_dict():
    d = lineshape_metrics(_gaussian_map(0.1, 0.1)).as_dict()
    assert set(d) >= {"peak_omega_tau", "peak_omega_t", "peak_amplitude", "ellipticity",
                      "peak_omega_tau_cm", "peak_omega_t_cm"}


@pytest.mark.parametrize("T", [0.0, 100.0, 500.0])
def test_rdm_is_round(ref_fields, T):
    _, fields = ref_fields
    assert abs(lineshape_metrics(spectrum2d(fields[T][1])).ellipticity) <= 0.05


# -- comparison ---------------------------------------------------------------------


def test_compare_identical():
    s = _gaussian_map(0.12, 0.07)
    rep = compare(s, s)
    assert all(v == 0 for v in rep["difference"].values())


def test_compare_reference(ref_fields):
    _, fields = ref_fields
    exact0, rdm0 = spectrum2d(fields[0.0][0]), spectrum2d(fields[0.0][1])
    rep = compare(exact0, rdm0)
    assert rep["first"]["ellipticity"] > rep["second"]["ellipticity"]
    assert rep["first"]["provenance"] == "exact" and rep["second"]["provenance"] == "rdm"
    late = compare(exact0, spectrum2d(fields[500.0][0]))
    assert late["difference"]["ellipticity"] < 0


def test_compare_axis_mismatch():
    with pytest.raises(GridError):
        compare(_gaussian_map(0.1, 0.1, n=101), _gaussian_map(0.1, 0.1, n=103))
