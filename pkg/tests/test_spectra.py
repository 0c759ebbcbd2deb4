from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss
from scipy.integrate import trapezoid
from scipy.linalg import expm as dense_expm

from thermoprobe.bath import Dicke, HECTwoQubit, spec_moments
from thermoprobe.dynamics import LindbladGenerator, ProbeParams, Rates, rates, steady_state
from thermoprobe.errors import FitError, PhysicsError
from thermoprobe.spectra import (
    Spectrum,
    bandwidth,
    bandwidth_dicke,
    bandwidth_hec,
    dc_autocorrelation,
    ew_grid,
    ew_longtime,
    ew_spectrum,
    linewidth,
    local_maxima,
    lorentzian,
    lorentzian_fit,
    read_spectrum,
    spectral_intensity,
    stationary_autocorrelation,
    wk_grid,
    wk_spectrum,
    write_spectrum,
)

FIG3 = dict(decay=1.0, mu=2.0, dephasing=0.15, n_env=0.1)


def qubit(**kw) -> ProbeParams:
    return ProbeParams("qubit", **kw)


# --- stationary correlations -----------------------------------------------------------

def test_autocorrelation_basics():
    r = Rates(1.95, 2.45)
    taus = np.array([0.0, math.log(2) / (0.15 + 0.5 * r.relaxation_rate)])
    c = stationary_autocorrelation(r, 0.15, 1.0, taus)
    assert c[0] == pytest.approx(r.steady, abs=1e-15)
    assert abs(c[1]) == pytest.approx(r.steady / 2, rel=1e-13)


def test_autocorrelation_regression_oracle():
    # <s+(0) s-(tau)> = Tr[s- exp(L tau)(rho_st s+)] with the full generator
    m = spec_moments(HECTwoQubit(np.pi / 4, 0.9))
    p = qubit(omega=1.3, **FIG3)
    r = rates(m, p)
    liouv = LindbladGenerator(m, p).liouvillian()
    sp = np.array([[0, 1], [0, 0]], dtype=complex)
    x0 = (steady_state(r).data @ sp).reshape(-1)
    taus = np.linspace(0.0, 2.0, 50)
    brute = []
    for tau in taus:
        x = (dense_expm(liouv * tau) @ x0).reshape(2, 2)
        # generator is in the rotating frame; restore the free phase
        brute.append(np.trace(sp.T @ x) * np.exp(-1j * p.omega * tau))
    ref = stationary_autocorrelation(r, p.dephasing, p.omega, taus)
    assert np.max(np.abs(np.array(brute) - ref)) < 1e-8


# --- Wiener-Khintchine spectra ---------------------------------------------------------

def test_wk_peak_and_intensity():
    m = spec_moments(HECTwoQubit(np.pi / 4, 0.9))
    p = qubit(**FIG3)
    r = rates(m, p)
    gamma = linewidth(r, p.dephasing)
    s = wk_spectrum(r, p, grid=wk_grid(p.omega, gamma, span=50, points=20001))
    assert s.values.max() == pytest.approx(2 * r.steady / (math.pi * gamma), rel=1e-12)
    q = spectral_intensity(s)
    assert abs(q - r.steady) / r.steady < 1e-4
    # plain grid quadrature misses the Lorentzian tails
    assert abs(spectral_intensity(s, tail=False) - r.steady) / r.steady > 1e-3


def test_fig3_linewidths():
    p = qubit(**FIG3)
    hot = rates(spec_moments(HECTwoQubit(np.pi / 4, 0.9)), p)
    cold = rates(spec_moments(HECTwoQubit(-np.pi / 4, 0.9)), p)
    assert linewidth(hot, p.dephasing) == pytest.approx(9.1, abs=1e-12)
    assert linewidth(cold, p.dephasing) == pytest.approx(1.9, abs=1e-12)


def test_cavity_linewidth_ignores_hec():
    p = ProbeParams("cavity", decay=1.0, dephasing=0.3, mu=0.7, n_env=0.2)
    for phi in (-np.pi / 4, 0.1, np.pi / 4):
        for zeta in (0.0, 0.5, 1.0):
            r = rates(spec_moments(HECTwoQubit(phi, zeta)), p)
            assert linewidth(r, p.dephasing) == pytest.approx(1.6, abs=1e-12)
            assert bandwidth_hec(phi, zeta, p) == pytest.approx(1.6, abs=1e-12)


def test_wk_rejects_inconsistent_steady_value():
    with pytest.raises(PhysicsError):
        wk_spectrum(Rates(1.0, 2.0), qubit(), steady=0.5)
    with pytest.raises(PhysicsError, match="degenerate linewidth"):
        wk_spectrum(Rates(0.0, 0.0), qubit(), grid=[0, 1])


# --- closed-form bandwidths ---------------------------------------------------------------

def test_bandwidth_routes_agree():
    p = qubit(decay=1.0, dephasing=0.2, n_env=0.3, mu=1.4)
    for phi in np.linspace(-np.pi / 4, np.pi / 4, 7):
        for zeta in (0.0, 0.4, 1.0):
            m = spec_moments(HECTwoQubit(phi, zeta))
            general = bandwidth(m, p)
            assert bandwidth_hec(phi, zeta, p) == pytest.approx(general, abs=1e-12)
            assert linewidth(rates(m, p), p.dephasing) == pytest.approx(general, abs=1e-12)
    for n in (2, 4, 6, 8):
        m = spec_moments(Dicke(n, n // 2 - 1))
        assert bandwidth_dicke(n, p) == pytest.approx(bandwidth(m, p), abs=1e-12)


def test_bandwidth_examples():
    p = qubit(decay=1.0, mu=1.5)
    assert bandwidth_hec(np.pi / 4, 1.0, p) - bandwidth_hec(np.pi / 4, 0.0, p) == pytest.approx(3.0)
    assert bandwidth_dicke(4, p.replace(decay=0.0)) == pytest.approx(10 * 1.5)
    assert bandwidth_hec(-np.pi / 4, 1.0, qubit(decay=1.0, mu=2.0)) == pytest.approx(1.0, abs=1e-15)


# --- driven qubit ------------------------------------------------------------------------------

def test_dc_autocorrelation_examples():
    om = 1.7
    assert dc_autocorrelation(math.pi / om, math.pi / om, om) == pytest.approx(1.0, abs=1e-15)
    assert np.all(dc_autocorrelation(0.0, np.linspace(0, 5, 7), om) == 0)


def test_dc_autocorrelation_matrix_oracle():
    om = 1.3
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sp = np.array([[0, 1], [0, 0]], dtype=complex)
    g = np.array([0, 1], dtype=complex)

    def u(t):
        return math.cos(om * t / 2) * np.eye(2) - 1j * math.sin(om * t / 2) * sx

    rng = np.random.default_rng(9)
    for t1, t2 in rng.uniform(0, 6, size=(25, 2)):
        op1 = u(t1).conj().T @ sp @ u(t1)
        op2 = u(t2).conj().T @ sp.T @ u(t2)
        brute = g.conj() @ op1 @ op2 @ g
        assert abs(brute - dc_autocorrelation(t1, t2, om)) < 1e-12


def ew_brute(omegas, t, gamma_f, omega_rabi, nodes=160):
    """Direct 2-D Gauss-Legendre quadrature of the filtered double integral."""
    x, w = leggauss(nodes)
    s = 0.5 * t * (x + 1)
    ws = 0.5 * t * w
    t1, t2 = np.meshgrid(s, s, indexing="ij")
    w2 = np.outer(ws, ws)
    kern = dc_autocorrelation(t1, t2, omega_rabi)
    out = []
    for om in omegas:
        f = (np.exp(-(gamma_f - 1j * om) * (t - t1)) * np.exp(-(gamma_f + 1j * om) * (t - t2))
             * kern)
        out.append(2 * gamma_f * np.sum(w2 * f).real)
    return np.array(out)


@pytest.mark.parametrize("t", [3.0, 12.0])
def test_ew_closed_form_vs_brute_force(t):
    omegas = np.linspace(-3.0, 3.0, 10)
    closed = ew_spectrum(omegas, t, 0.2, 2.0).values
    brute = ew_brute(omegas, t, 0.2, 2.0)
    assert np.max(np.abs(closed - brute) / np.abs(brute)) < 1e-6


def test_ew_resonant_denominator_limit():
    # a = gamma_f - i(omega - Omega) vanishes only for gamma_f = 0; probe the guard directly
    grid = np.array([-2.0, -1e-13, 0.0, 2.0])
    s = ew_spectrum(grid, 5.0, 1e-9, 2.0)
    assert np.all(np.isfinite(s.values))
    assert np.all(s.values >= 0)


def test_ew_no_drive_is_dark():
    s = ew_spectrum(np.linspace(-2, 2, 51), 10.0, 0.2, 0.0)
    assert np.max(np.abs(s.values)) < 1e-30


def test_ew_symmetry():
    d = np.linspace(0.0, 5.0, 101)
    for t in (1.0, 7.3, 50.0):
        s = ew_spectrum(np.concatenate([-d[::-1], d[1:]]), t, 0.2, 2.0).values
        left, right = s[:101][::-1], s[100:]
        assert np.max(np.abs(left - right)) < 1e-10


def test_ew_weak_signal_monotone_in_time():
    om = 2.0
    grid = np.linspace(-3, 3, 601)
    totals = [trapezoid(ew_spectrum(grid, t, 0.2, om).values, grid)
              for t in np.linspace(0.005, 0.05, 6)]
    assert np.all(np.diff(totals) > 0)


def test_ew_longtime_values():
    s = ew_longtime(np.array([-2.0, 0.0, 2.0]), 0.2, 2.0)
    assert s.values[1] == pytest.approx(2.5248, abs=1e-4)
    assert s.values[2] == pytest.approx(1.2779, abs=1e-4)
    assert s.values[0] == s.values[2]


def test_ew_longtime_collapses_without_drive():
    grid = np.linspace(-2, 2, 41)
    s = ew_longtime(grid, 0.2, 0.0)
    assert np.allclose(s.values, math.pi * lorentzian(grid, 0.0, 0.4, 1.0), atol=1e-14)


def test_ew_finite_time_period_average_is_longtime():
    # the finite-t spectrum keeps a Rabi-periodic ripple; its period average is the limit
    gamma_f, om = 0.2, 2.0
    grid = np.linspace(-3, 3, 61)
    times = 50 / gamma_f + np.linspace(0, 2 * math.pi / om, 257)[:-1]
    avg = np.mean([ew_spectrum(grid, t, gamma_f, om).values for t in times], axis=0)
    assert np.max(np.abs(avg - ew_longtime(grid, gamma_f, om).values)) < 1e-6


def test_sidebands():
    grid = ew_grid(0.0, 2.0, 0.2)
    s = ew_longtime(grid, 0.2, 2.0)
    peaks = grid[local_maxima(s.values)]
    step = grid[1] - grid[0]
    assert len(peaks) == 3
    assert np.max(np.abs(peaks - np.array([-2.0, 0.0, 2.0]))) <= step
    weak_grid = ew_grid(0.0, 0.1, 0.2)
    assert len(local_maxima(ew_longtime(weak_grid, 0.2, 0.1).values)) == 1


# --- fitting -----------------------------------------------------------------------------------

def test_fit_recovers_synthesis():
    m = spec_moments(HECTwoQubit(0.3, 0.6))
    p = qubit(omega=2.0, **FIG3)
    r = rates(m, p)
    gamma = linewidth(r, p.dephasing)
    s = wk_spectrum(r, p, grid=wk_grid(p.omega, gamma, span=20))
    fit = lorentzian_fit(s)
    assert fit.center == pytest.approx(p.omega, rel=1e-3)
    assert fit.fwhm == pytest.approx(gamma, rel=1e-3)
    assert fit.intensity == pytest.approx(r.steady, rel=1e-3)


def test_fit_width_grid():
    p = qubit(**FIG3)
    for phi in np.linspace(-np.pi / 4, np.pi / 4, 9):
        for zeta in np.linspace(0.0, 1.0, 5):
            m = spec_moments(HECTwoQubit(phi, zeta))
            fit = lorentzian_fit(wk_spectrum(rates(m, p), p))
            assert fit.fwhm == pytest.approx(bandwidth_hec(phi, zeta, p), rel=5e-3)


def test_fit_with_smooth_distortion():
    # a slow multiplicative ripple keeps one peak but leaves a nonzero residual
    grid = np.linspace(-10, 10, 2001)
    clean = lorentzian(grid, 0.3, 1.2, 0.8)
    fit = lorentzian_fit(Spectrum(grid, clean * (1 + 2e-3 * np.cos(0.1 * grid)), "qubit", 0.0,
                                  "synthetic"))
    assert fit.fwhm == pytest.approx(1.2, rel=1e-2)
    assert fit.residual_rms > 0


def test_fit_rejects_triplet():
    grid = ew_grid(0.0, 2.0, 0.2)
    with pytest.raises(FitError, match="not a single Lorentzian"):
        lorentzian_fit(ew_longtime(grid, 0.2, 2.0))


def test_fit_rejects_flat_zero():
    grid = np.linspace(-1, 1, 101)
    with pytest.raises(FitError, match="fit failed"):
        lorentzian_fit(Spectrum(grid, np.zeros_like(grid), "qubit", 0.0, "synthetic"))


# --- container and files -------------------------------------------------------------------

def test_spectrum_validation():
    with pytest.raises(ValueError, match="ascending"):
        Spectrum([0.0, 0.0, 1.0], [1.0, 1.0, 1.0], "qubit", 0.0, "x")
    with pytest.raises(PhysicsError, match="negative"):
        Spectrum([0.0, 1.0], [1.0, -1.0], "qubit", 0.0, "x")


def test_spectrum_round_trip(tmp_path):
    grid = np.linspace(-1, 1, 11)
    s = ew_spectrum(grid, 3.0, 0.2, 2.0, omega_q=0.0)
    csv, meta = write_spectrum(s, tmp_path / "s")
    assert csv.read_text().splitlines()[0] == "omega,value"
    back = read_spectrum(tmp_path / "s")
    assert np.array_equal(back.grid, s.grid)
    assert np.array_equal(back.values, s.values)
    assert back.gamma_f == 0.2 and back.method == s.method
