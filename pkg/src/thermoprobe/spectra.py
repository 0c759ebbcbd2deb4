"""Correlation functions, power spectra and Lorentzian line fitting."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import least_squares

from .bath import BathMoments
from .dynamics import ProbeParams, Rates
from .errors import FitError, PhysicsError

DEFAULT_POINTS = 2001
# antiderivative denominators smaller than this use the polynomial limit
RESONANCE_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class Spectrum:
    grid: np.ndarray
    values: np.ndarray
    kind: str
    omega0: float
    method: str
    gamma_f: float | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.shape != values.shape or grid.ndim != 1:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if grid.size > 1 and np.any(np.diff(grid) <= 0):
            raise ValueError("spectrum grid must be strictly ascending")
        if values.size and values.min() < -1e-12:
            raise PhysicsError(f"negative spectral density {values.min():.3e}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def metadata(self) -> dict:
        meta = {"kind": self.kind, "omega0": self.omega0, "method": self.method,
                "params": self.params}
        if self.gamma_f is not None:
            meta["gamma_f"] = self.gamma_f
        return meta


@dataclass(frozen=True)
class LorentzianFit:
    center: float
    fwhm: float
    intensity: float
    residual_rms: float

    def __call__(self, omega):
        return lorentzian(omega, self.center, self.fwhm, self.intensity)


def lorentzian(omega, center: float, fwhm: float, intensity: float = 1.0):
    """Area-normalized Lorentzian times ``intensity``."""
    half = 0.5 * fwhm
    return intensity / np.pi * half / ((np.asarray(omega) - center) ** 2 + half * half)


def write_spectrum(s: Spectrum, path: str | Path) -> tuple[Path, Path]:
    """Write ``<path>.csv`` (``omega,value``) and a ``<path>.json`` metadata sidecar."""
    path = Path(path)
    csv_path, meta_path = path.with_suffix(".csv"), path.with_suffix(".json")
    lines = ["omega,value"] + [f"{w:.17g},{v:.17g}" for w, v in zip(s.grid, s.values)]
    csv_path.write_text("\n".join(lines) + "\n")
    meta_path.write_text(json.dumps(s.metadata(), indent=2, sort_keys=True) + "\n")
    return csv_path, meta_path


def read_spectrum(path: str | Path) -> Spectrum:
    path = Path(path)
    data = np.loadtxt(path.with_suffix(".csv"), delimiter=",", skiprows=1, ndmin=2)
    meta = json.loads(path.with_suffix(".json").read_text())
    return Spectrum(data[:, 0], data[:, 1], meta["kind"], meta["omega0"], meta["method"],
                    meta.get("gamma_f"), meta.get("params", {}))


# --- stationary (Wiener-Khintchine) spectra ---------------------------------

def linewidth(r: Rates, dephasing: float) -> float:
    """FWHM from rates: ``2 dephasing + 1/t_therm``."""
    return 2.0 * dephasing + r.relaxation_rate


def stationary_autocorrelation(r: Rates, dephasing: float, omega: float, taus) -> np.ndarray:
    """``<s^dag(0) s(tau)>`` in the steady state via the quantum regression formula."""
    taus = np.asarray(taus, dtype=float)
    decay = dephasing + 0.5 * r.relaxation_rate
    return r.steady * np.exp(-(1j * omega + decay) * taus)


def wk_grid(center: float, width: float, span: float = 10.0,
            points: int = DEFAULT_POINTS) -> np.ndarray:
    return np.linspace(center - span * width, center + span * width, points)


def wk_spectrum(r: Rates, p: ProbeParams, steady: float | None = None,
                grid=None) -> Spectrum:
    gamma = linewidth(r, p.dephasing)
    if gamma <= 0:
        raise PhysicsError("degenerate linewidth")
    expected = r.steady
    if steady is None:
        steady = expected
    elif abs(steady - expected) > 1e-10:
        raise PhysicsError(f"steady value {steady} inconsistent with rates ({expected})")
    grid = wk_grid(p.omega, gamma) if grid is None else np.asarray(grid, dtype=float)
    return Spectrum(grid, lorentzian(grid, p.omega, gamma, steady), p.kind, p.omega,
                    "wiener-khintchine",
                    params={"fwhm": gamma, "intensity": steady, "heat": r.heat,
                            "cool": r.cool, "dephasing": p.dephasing})


def bandwidth(m: BathMoments, p: ProbeParams) -> float:
    if p.kind == "qubit":
        return (2.0 * p.dephasing + p.decay * (2.0 * p.n_env + 1.0)
                + 2.0 * p.mu * (m.j2 - m.jz2))
    return 2.0 * p.dephasing + p.decay - 2.0 * p.mu * m.jz


def bandwidth_hec(phi: float, zeta: float, p: ProbeParams) -> float:
    if p.kind == "cavity":
        return 2.0 * p.dephasing + p.decay
    return (2.0 * p.dephasing + p.decay * (2.0 * p.n_env + 1.0)
            + 2.0 * p.mu * (1.0 + np.real(zeta) * np.sin(2.0 * phi)))


def bandwidth_dicke(n: int, p: ProbeParams) -> float:
    """Qubit linewidth for a Dicke cluster with ``k = n/2 - 1`` excitations."""
    if n < 2 or n % 2:
        raise ValueError("Dicke bandwidth formula needs an even cluster size n >= 2")
    if p.kind == "cavity":
        return 2.0 * p.dephasing + p.decay + 2.0 * p.mu
    return (2.0 * p.dephasing + p.decay * (2.0 * p.n_env + 1.0)
            + p.mu * (n + n * n / 2.0 - 2.0))


# --- driven qubit (Eberly-Wodkiewicz) spectra -------------------------------

def dc_autocorrelation(t1, t2, omega_rabi: float):
    """``<g| s+(t1) s-(t2) |g>`` for a resonantly driven qubit started in ``|g>``."""
    a = np.asarray(t1, dtype=float) * omega_rabi
    b = np.asarray(t2, dtype=float) * omega_rabi
    return np.sin(a / 2) ** 2 * np.sin(b / 2) ** 2 + np.sin(a) * np.sin(b) / 4


def _damped_integral(c, t: float, gamma_f: float):
    """``exp(-gamma_f t) * int_0^t exp(c s) ds`` without overflow."""
    c = np.asarray(c, dtype=complex)
    small = np.abs(c) < RESONANCE_EPS
    safe = np.where(small, 1.0, c)
    out = (np.exp((c - gamma_f) * t) - np.exp(-gamma_f * t)) / safe
    return np.where(small, t * np.exp(-gamma_f * t), out)


def ew_grid(omega_q: float, omega_rabi: float, gamma_f: float,
            points: int = DEFAULT_POINTS) -> np.ndarray:
    half = abs(omega_rabi) + 10.0 * gamma_f
    return np.linspace(omega_q - half, omega_q + half, points)


def ew_spectrum(grid, t: float, gamma_f: float, omega_rabi: float,
                omega_q: float = 0.0) -> Spectrum:
    """Time-dependent filtered spectrum of the driven qubit at time ``t``."""
    if gamma_f <= 0 or t <= 0:
        raise ValueError("gamma_f and t must be positive")
    grid = np.asarray(grid, dtype=float)
    a = gamma_f - 1j * (grid - omega_q)
    up = _damped_integral(a + 1j * omega_rabi, t, gamma_f)
    down = _damped_integral(a - 1j * omega_rabi, t, gamma_f)
    flat = _damped_integral(a, t, gamma_f)
    sin_part = (up - down) / 2j
    cos_part = flat - 0.5 * (up + down)
    values = 0.5 * gamma_f * (np.abs(sin_part) ** 2 + np.abs(cos_part) ** 2)
    return Spectrum(grid, values, "qubit", omega_q, "eberly-wodkiewicz", gamma_f,
                    {"t": t, "omega_rabi": omega_rabi})


def ew_longtime(grid, gamma_f: float, omega_rabi: float, omega_q: float = 0.0) -> Spectrum:
    """Long-time limit: Lorentzians of weight 1/4, 1/2, 1/4 at the Rabi sidebands and centre."""
    if gamma_f <= 0:
        raise ValueError("gamma_f must be positive")
    grid = np.asarray(grid, dtype=float)
    d = grid - omega_q
    g2 = gamma_f * gamma_f
    values = (0.25 * gamma_f / (g2 + (d + omega_rabi) ** 2)
              + 0.5 * gamma_f / (g2 + d * d)
              + 0.25 * gamma_f / (g2 + (d - omega_rabi) ** 2))
    return Spectrum(grid, values, "qubit", omega_q, "eberly-wodkiewicz-longtime", gamma_f,
                    {"omega_rabi": omega_rabi})


# --- line fitting and intensity ----------------------------------------------

def local_maxima(values, frac: float = 0.05) -> np.ndarray:
    """Indices of strict interior local maxima above ``frac`` of the global maximum."""
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return np.array([], dtype=int)
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:]) & (v[1:-1] > frac * v.max())
    return np.nonzero(inner)[0] + 1


def _half_max_width(x: np.ndarray, y: np.ndarray, i: int) -> float | None:
    half = 0.5 * y[i]
    left = np.nonzero(y[:i] < half)[0]
    right = np.nonzero(y[i:] < half)[0]
    if not left.size or not right.size:
        return None
    j, k = left[-1], i + right[0]
    xl = np.interp(half, [y[j], y[j + 1]], [x[j], x[j + 1]])
    xr = np.interp(half, [y[k], y[k - 1]], [x[k], x[k - 1]])
    return float(xr - xl)


def lorentzian_fit(s: Spectrum, max_iter: int = 200) -> LorentzianFit:
    x, y = s.grid, s.values
    if y.size < 4 or not np.all(np.isfinite(y)):
        raise FitError("fit failed: too few or non-finite samples")
    peak = y.max()
    if peak <= 0:
        raise FitError("fit failed: spectrum has no positive peak")
    peaks = local_maxima(y)
    if peaks.size > 1:
        raise FitError(f"not a single Lorentzian: {peaks.size} local maxima")
    i = int(np.argmax(y))
    width = _half_max_width(x, y, i) or 0.25 * (x[-1] - x[0])
    yn = y / peak
    # fit in units of the peak value: model = A/pi * h / ((x - c)^2 + h^2)
    x0 = np.array([x[i], width, 0.5 * np.pi * width])

    def resid(q):
        c, w, a = q
        h = 0.5 * w
        return a / np.pi * h / ((x - c) ** 2 + h * h) - yn

    def jac(q):
        c, w, a = q
        h = 0.5 * w
        den = (x - c) ** 2 + h * h
        d_c = a / np.pi * h * 2 * (x - c) / den**2
        d_h = a / np.pi * ((x - c) ** 2 - h * h) / den**2
        return np.column_stack([d_c, 0.5 * d_h, h / (np.pi * den)])

    sol = least_squares(resid, x0, jac=jac, method="lm", xtol=1e-10, ftol=1e-15,
                        gtol=1e-15, max_nfev=max_iter)
    if sol.status <= 0 or not np.all(np.isfinite(sol.x)):
        raise FitError(f"fit failed: {sol.message}")
    c, w, a = sol.x
    if w <= 0 or a <= 0:
        raise FitError("fit failed: nonpositive width or intensity")
    rms = float(np.sqrt(np.mean(sol.fun**2)) * peak)
    return LorentzianFit(float(c), float(w), float(a * peak), rms)


def spectral_intensity(s: Spectrum, fit: LorentzianFit | None = None,
                       tail: bool = True) -> float:
    """Simpson quadrature over the grid plus the fitted Lorentzian's weight beyond it."""
    total = float(simpson(s.values, x=s.grid))
    if not tail:
        return total
    if fit is None:
        fit = lorentzian_fit(s)
    h = 0.5 * fit.fwhm
    inside = (np.arctan((s.grid[-1] - fit.center) / h)
              - np.arctan((s.grid[0] - fit.center) / h)) / np.pi
    return total + fit.intensity * (1.0 - inside)
