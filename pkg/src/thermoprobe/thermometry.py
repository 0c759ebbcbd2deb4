"""Fisher-information bounds for apparent temperature and coherence estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import bisect

from .bath import BathMoments
from .dynamics import ProbeKind, ProbeParams, Rates, rates
from .errors import PhysicsError


@dataclass(frozen=True)
class EstimationResult:
    qfi: float
    bound: float
    nu: int
    target: Literal["temperature", "zeta"] = "temperature"

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.bound)


def qfi_temperature(kind: ProbeKind, T: float, omega: float) -> float:
    """Quantum Fisher information of a thermal qubit or oscillator about ``T``."""
    if not T > 0:
        raise PhysicsError("QFI formulas defined for positive temperature only")
    x = omega / (2.0 * T)
    pref = (omega / (2.0 * T * T)) ** 2
    if x > 350:
        return 0.0
    if kind == "qubit":
        return pref / math.cosh(x) ** 2
    return pref / math.sinh(x) ** 2


def _alpha_equation(kind: ProbeKind, alpha: float) -> float:
    if kind == "qubit":
        return 2.0 * alpha - math.tanh(1.0 / alpha)
    return 2.0 * alpha - 1.0 / math.tanh(1.0 / alpha)


def optimal_alpha(kind: ProbeKind) -> float:
    """Root of ``2a = tanh(1/a)`` (qubit) or ``2a = coth(1/a)`` (cavity) on [0.1, 2]."""
    return bisect(lambda a: _alpha_equation(kind, a), 0.1, 2.0, xtol=1e-15, rtol=1e-15,
                  maxiter=200)


def optimal_temperature(kind: ProbeKind, omega: float) -> float:
    """Temperature of maximal Fisher information, ``alpha omega / 2``."""
    if omega <= 0:
        raise PhysicsError("probe frequency must be positive")
    return 0.5 * optimal_alpha(kind) * omega


def invert_moments(fwhm: float, intensity: float, p: ProbeParams) -> tuple[float, float]:
    """Recover ``(<J+J->, <J-J+>)`` from a measured linewidth and intensity."""
    if fwhm <= 2.0 * p.dephasing:
        raise PhysicsError("spectral width below dephasing floor")
    if p.mu <= 0:
        raise PhysicsError("no cluster coupling to invert")
    width = fwhm - 2.0 * p.dephasing
    sign = -1.0 if p.kind == "qubit" else 1.0
    jp_jm = width * intensity / p.mu - p.decay / p.mu * p.n_env
    jm_jp = width * (1.0 + sign * intensity) / p.mu - p.decay / p.mu * (1.0 + p.n_env)
    return jp_jm, jm_jp


def _hec_rates(phi: float, zeta: float, mu_over_gamma: float, n_env: float) -> Rates:
    p = ProbeParams("qubit", decay=1.0, n_env=n_env, mu=mu_over_gamma)
    return rates(BathMoments.from_hec(phi, zeta), p)


def _temperature(zeta, phi, mu_over_gamma, n_env, omega=1.0) -> float:
    r = _hec_rates(phi, zeta, mu_over_gamma, n_env)
    return omega / math.log(r.cool / r.heat)


def qfi_zeta(phi: float, zeta: float, mu_over_gamma: float, n_env: float,
             method: Literal["chain", "rates", "explicit", "numeric"] = "explicit") -> float:
    """Fisher information about the HEC amplitude ``zeta`` of the two-qubit cluster.

    ``chain``: thermal QFI times ``(dT/dzeta)^2`` by central differences;
    ``rates``: closed form in heating/cooling rates and their zeta-derivative;
    ``explicit``: closed form in ``z = n_env + (mu/gamma)(1 + zeta sin 2 phi)``;
    ``numeric``: classical Fisher information of the steady populations,
    differentiated numerically.
    """
    if abs(zeta) > 1.0:
        raise PhysicsError(f"unphysical purity: |zeta| = {abs(zeta):.6g} > 1")
    if mu_over_gamma < 0 or n_env < 0:
        raise PhysicsError("mu/gamma and n_env must be nonnegative")
    s2 = math.sin(2.0 * phi)
    if s2 == 0.0 or mu_over_gamma == 0.0:
        return 0.0
    h = 1e-6 * max(1.0, abs(zeta))
    if method == "explicit":
        z = n_env + mu_over_gamma * (1.0 + zeta * s2)
        return mu_over_gamma**2 * s2**2 / (z * (1.0 + z) * (1.0 + 2.0 * z) ** 2)
    if method == "rates":
        r = _hec_rates(phi, zeta, mu_over_gamma, n_env)
        # both rates carry mu <J+-J-+>/2 with d<J+-J-+>/dzeta = sin 2phi
        d_rate = 0.5 * mu_over_gamma * s2
        d_ratio = (d_rate * r.heat - r.cool * d_rate) / r.heat**2
        return r.heat / r.cool * (r.heat / (r.heat + r.cool) * d_ratio) ** 2
    if method == "chain":
        t = _temperature(zeta, phi, mu_over_gamma, n_env)
        dt = (_temperature(zeta + h, phi, mu_over_gamma, n_env)
              - _temperature(zeta - h, phi, mu_over_gamma, n_env)) / (2.0 * h)
        return qfi_temperature("qubit", t, 1.0) * dt * dt
    if method == "numeric":
        def pe(zz):
            r = _hec_rates(phi, zz, mu_over_gamma, n_env)
            return r.steady

        # populations are flatter in zeta than T is; a wider step limits roundoff
        hn = 10.0 * h
        p0 = pe(zeta)
        dp = (pe(zeta + hn) - pe(zeta - hn)) / (2.0 * hn)
        return dp * dp / (p0 * (1.0 - p0))
    raise ValueError(f"unknown method {method!r}")


def cramer_rao(qfi: float, nu: int = 1,
               target: Literal["temperature", "zeta"] = "temperature") -> EstimationResult:
    """Quantum Cramer-Rao bound ``1/sqrt(nu F)`` for ``nu`` independent measurements."""
    if qfi < 0:
        raise ValueError("Fisher information must be nonnegative")
    if nu < 1:
        raise ValueError("nu must be a positive integer")
    bound = math.inf if qfi == 0 else 1.0 / math.sqrt(nu * qfi)
    return EstimationResult(float(qfi), bound, int(nu), target)


def fisher_curve(kind: ProbeKind, temperatures, omega: float = 1.0) -> np.ndarray:
    return np.array([qfi_temperature(kind, float(T), omega) for T in temperatures])
