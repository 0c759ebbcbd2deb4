"""Probe dynamics: rates, master-equation generators, collision simulator.

All frequencies are in natural units (hbar = k_B = 1). Generators act in the
interaction picture of the probe's free Hamiltonian, so ``omega`` only enters
thermodynamic quantities and spectra.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .bath import BathMoments, ClusterSpec, cluster_state
from .errors import NumericalError, PhysicsError
from .operators import (
    SIGMA_MINUS,
    SIGMA_Z,
    Operator,
    as_operator,
    collective_spin,
    destroy,
    expm,
    kron,
    partial_trace,
)

ProbeKind = Literal["qubit", "cavity"]
TRUNCATION_THRESHOLD = 1e-8
# moments below this are roundoff from trace evaluation
MOMENT_FLOOR = 1e-13


@dataclass(frozen=True)
class Collision:
    """Repeated-interaction schedule: Poisson rate, coupling strength, duration."""

    rate: float
    coupling: float
    tau: float

    def __post_init__(self):
        if self.rate < 0 or self.tau < 0:
            raise PhysicsError("collision rate and duration must be nonnegative")

    @property
    def mu(self) -> float:
        return self.rate * (self.coupling * self.tau) ** 2

    @property
    def mu_tilde(self) -> float:
        return self.rate * self.coupling * self.tau


@dataclass(frozen=True)
class ProbeParams:
    """Physical constants of a qubit or cavity probe.

    ``decay`` is gamma (qubit) or kappa (cavity), ``dephasing`` is gamma_phi or
    kappa_phi, ``mu`` the effective coupling rate ``p (g tau)^2`` and
    ``mu_tilde`` the drive scale ``p g tau``. When ``collision`` is given the
    two effective rates default to its values. ``n_max`` truncates the cavity.
    """

    kind: ProbeKind = "qubit"
    omega: float = 1.0
    decay: float = 1.0
    dephasing: float = 0.0
    n_env: float = 0.0
    mu: float | None = None
    collision: Collision | None = None
    mu_tilde: float | None = None
    n_max: int | None = None

    def __post_init__(self):
        if self.kind not in ("qubit", "cavity"):
            raise ValueError(f"unknown probe kind {self.kind!r}")
        if self.omega <= 0:
            raise PhysicsError("probe frequency must be positive")
        if self.decay < 0 or self.dephasing < 0 or self.n_env < 0:
            raise PhysicsError("decay, dephasing and n_env must be nonnegative")
        if self.collision is not None:
            if self.mu is None:
                object.__setattr__(self, "mu", self.collision.mu)
            elif abs(self.mu - self.collision.mu) > 1e-12 * max(1.0, abs(self.mu)):
                raise PhysicsError(
                    f"mu = {self.mu} inconsistent with collision p (g tau)^2 = {self.collision.mu}")
            if self.mu_tilde is None:
                object.__setattr__(self, "mu_tilde", self.collision.mu_tilde)
        if self.mu is None:
            object.__setattr__(self, "mu", 0.0)
        if self.mu < 0:
            raise PhysicsError("mu must be nonnegative")
        if self.kind == "cavity" and self.n_max is not None and self.n_max < 2:
            raise PhysicsError("cavity truncation needs n_max >= 2")

    @property
    def dim(self) -> int:
        if self.kind == "qubit":
            return 2
        if self.n_max is None:
            raise PhysicsError("cavity probe needs n_max to build operators")
        return self.n_max

    def replace(self, **changes) -> ProbeParams:
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class Rates:
    """Heating (excitation) and cooling (de-excitation) rates of a probe."""

    heat: float
    cool: float
    kind: ProbeKind = "qubit"

    def __post_init__(self):
        if self.heat < 0 or self.cool < 0:
            raise PhysicsError("rates must be nonnegative")

    @property
    def steady(self) -> float:
        """Steady excited population (qubit) or photon number (cavity)."""
        if self.kind == "qubit":
            if self.heat + self.cool == 0:
                raise PhysicsError("no steady state: both rates vanish")
            return self.heat / (self.heat + self.cool)
        if self.cool <= self.heat:
            raise PhysicsError("no cavity steady state (negative-temperature regime)")
        return self.heat / (self.cool - self.heat)

    @property
    def relaxation_rate(self) -> float:
        """Inverse thermalization time: ``2(r_d + r_e)`` or ``2(R_d - R_e)``."""
        if self.kind == "qubit":
            return 2.0 * (self.cool + self.heat)
        return 2.0 * (self.cool - self.heat)


@dataclass(frozen=True)
class Temperature:
    """Apparent temperature stored as an inverse temperature.

    ``beta == 0`` encodes infinite temperature and a negative ``beta`` a
    population inversion.
    """

    beta: float
    omega: float

    @property
    def T(self) -> float:
        return math.inf if self.beta == 0 else 1.0 / self.beta


def rates(m: BathMoments, p: ProbeParams) -> Rates:
    heat = 0.5 * (p.mu * np.real(m.jp_jm) + p.decay * p.n_env)
    cool = 0.5 * (p.mu * np.real(m.jm_jp) + p.decay * (p.n_env + 1.0))
    return Rates(float(heat), float(cool), p.kind)


def qubit_solution(rho0: Operator | np.ndarray, r: Rates, dephasing: float,
                   t: float) -> Operator:
    """Closed-form qubit state at time ``t`` (``t = inf`` gives the steady state)."""
    rho0 = as_operator(rho0).data
    if t < 0:
        raise ValueError("t must be nonnegative")
    total = r.heat + r.cool
    if math.isinf(t):
        if total == 0:
            raise PhysicsError("no steady state: both rates vanish")
        ee, eg = r.heat / total, 0.0
    elif t == 0:
        return Operator(rho0.copy())
    else:
        eg = rho0[0, 1] * math.exp(-(total + dephasing) * t)
        if total == 0:
            ee = rho0[0, 0].real
        else:
            ee = ((r.cool * rho0[0, 0].real - r.heat * rho0[1, 1].real)
                  * math.exp(-2.0 * t * total) + r.heat) / total
    return Operator(np.array([[ee, eg], [np.conj(eg), 1.0 - ee]], dtype=complex))


def steady_state(r: Rates, n_max: int | None = None) -> Operator:
    """Diagonal steady state: ``diag(r_e, r_d)/(r_e + r_d)`` or a truncated thermal mode."""
    if r.kind == "qubit":
        pe = r.steady
        return Operator(np.diag([pe, 1.0 - pe]).astype(complex))
    if n_max is None:
        raise PhysicsError("cavity steady state needs n_max")
    n = r.steady
    pops = (n / (n + 1.0)) ** np.arange(n_max) / (n + 1.0)
    return Operator(np.diag(pops / pops.sum()).astype(complex))


class LindbladGenerator:
    """Right-hand side of the coarse-grained repeated-interaction master equation.

    Term groups: ``dissipative`` (cluster-induced L[s], L[s^dag]), ``squeezing``
    (L_Sq terms weighted by <J_+^2>, <J_-^2>), ``drive`` (effective Hamiltonian
    from <J_+-> displacement coherences) and ``background`` (thermal
    environment plus pure dephasing).
    """

    def __init__(self, m: BathMoments, p: ProbeParams, *, dissipative: bool = True,
                 squeezing: bool = True, drive: bool = True, background: bool = True):
        self.moments = m
        self.params = p
        d = p.dim
        s = SIGMA_MINUS.data if p.kind == "qubit" else destroy(d).data
        sd = s.conj().T
        half_mu = 0.5 * p.mu
        self.lindblad_terms: list[tuple[float, np.ndarray]] = []
        self.squeeze_terms: list[tuple[complex, np.ndarray]] = []
        self.hamiltonian = np.zeros((d, d), dtype=complex)

        if dissipative and p.mu:
            self.lindblad_terms += [(half_mu * np.real(m.jm_jp), s),
                                    (half_mu * np.real(m.jp_jm), sd)]
        if squeezing and p.mu and abs(m.jp2) > MOMENT_FLOOR:
            # <B^2> L_Sq[s^dag] + <B^dag 2> L_Sq[s] with B = J_-
            self.squeeze_terms += [(half_mu * m.jm2, sd), (half_mu * complex(m.jp2), s)]
        if drive and abs(m.jp) > MOMENT_FLOOR:
            if p.mu_tilde is None:
                raise PhysicsError("drive term needs mu_tilde (or a collision schedule)")
            self.hamiltonian = p.mu_tilde * (complex(m.jp) * s + m.jm * sd)
        if background:
            self.lindblad_terms += [(0.5 * p.decay * (p.n_env + 1.0), s),
                                    (0.5 * p.decay * p.n_env, sd)]
            if p.dephasing:
                if p.kind == "qubit":
                    self.lindblad_terms.append((p.dephasing, 0.5 * SIGMA_Z.data))
                else:
                    self.lindblad_terms.append((p.dephasing, sd @ s))
        self.lindblad_terms = [(c, o) for c, o in self.lindblad_terms if c != 0]
        self.squeeze_terms = [(c, o) for c, o in self.squeeze_terms if c != 0]
        # no-jump part -i(K rho - rho K^dag) with K = H - i sum c o^dag o
        k = self.hamiltonian.astype(complex)
        for c, o in self.lindblad_terms:
            k = k - 1j * c * (o.conj().T @ o)
        self._k = k
        self._jumps = [(2.0 * c, o, o.conj().T) for c, o in self.lindblad_terms]
        self._sq = [(c, o, o @ o) for c, o in self.squeeze_terms]

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        rho = _as_array(rho)
        kr = self._k @ rho
        out = -1j * kr + 1j * (rho @ self._k.conj().T)
        for c2, o, od in self._jumps:
            out += c2 * (o @ rho @ od)
        for c, o, o2 in self._sq:
            out += c * (2.0 * o @ rho @ o - o2 @ rho - rho @ o2)
        return out

    def liouvillian(self) -> np.ndarray:
        """Matrix acting on row-major ``rho.reshape(-1)``."""
        return liouvillian_of(self, self.dim)


def liouvillian_of(rhs: Callable[[np.ndarray], np.ndarray], dim: int) -> np.ndarray:
    """Matrix of a linear superoperator, column by column."""
    out = np.empty((dim * dim, dim * dim), dtype=complex)
    basis = np.zeros(dim * dim, dtype=complex)
    for k in range(dim * dim):
        basis[k] = 1.0
        out[:, k] = rhs(basis.reshape(dim, dim)).reshape(-1)
        basis[k] = 0.0
    return out


def generator(m: BathMoments, p: ProbeParams, *, dissipative: bool = True,
              squeezing: bool = True, drive: bool = True,
              background: bool = True) -> LindbladGenerator:
    return LindbladGenerator(m, p, dissipative=dissipative, squeezing=squeezing,
                             drive=drive, background=background)


def _as_array(x) -> np.ndarray:
    return x.data if isinstance(x, Operator) else np.asarray(x, dtype=complex)


def clean_state(rho: np.ndarray, min_eig: float = -1e-6) -> np.ndarray:
    """Hermitize and renormalize ``rho``; raise if it has drifted from positivity."""
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    lam = np.linalg.eigvalsh(rho)[0]
    if lam < min_eig:
        raise NumericalError(
            f"integration unstable (reduce step / raise n_max): min eigenvalue {lam:.3e}")
    return rho


def truncation_monitor(threshold: float = TRUNCATION_THRESHOLD) -> Callable[[np.ndarray], None]:
    """Callback that fails when the top two Fock levels carry population."""

    def check(rho: np.ndarray) -> None:
        top = np.abs(np.diag(rho)[-2:]).max()
        if top > threshold:
            raise NumericalError(
                f"Fock truncation too small: top-level population {top:.3e} > {threshold:g}")

    return check


def default_n_max(n_st: float) -> int:
    """Cavity truncation for a thermal-like state of mean photon number ``n_st``.

    At least ``ceil(8 (n_st + 1))`` and large enough that a thermal state's
    population in level ``n_max - 2`` is below the truncation threshold.
    """
    base = math.ceil(8.0 * (n_st + 1.0))
    if n_st <= 0:
        return max(base, 2)
    q = n_st / (n_st + 1.0)
    k = math.log(TRUNCATION_THRESHOLD * (n_st + 1.0)) / math.log(q)
    return max(base, math.ceil(k) + 3)


def evolve(rhs: Callable[[np.ndarray], np.ndarray], rho0: Operator | np.ndarray,
           times: Sequence[float], tol: float = 1e-10,
           monitor: Callable[[np.ndarray], None] | None = None) -> np.ndarray:
    """States at each of ``times`` (ascending, starting at or after 0).

    Uses an adaptive 8th-order Dormand-Prince integrator; every sample is
    Hermitized, renormalized and checked for positivity.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rho0 = _as_array(rho0)
    d = rho0.shape[0]
    times = np.asarray(times, dtype=float)
    if times.size == 0 or times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be nonnegative and ascending")

    def f(_t, y):
        return rhs(y.reshape(d, d)).reshape(-1)

    out = np.empty((times.size, d, d), dtype=complex)
    y = rho0.reshape(-1).astype(complex)
    t = 0.0
    # restart at every sample: dense-output interpolants are far less accurate
    # than step endpoints for small populations
    for i, ts in enumerate(times):
        if ts > t:
            sol = solve_ivp(f, (t, ts), y, method="DOP853", rtol=tol, atol=tol * 1e-2)
            if not sol.success:
                raise NumericalError(f"integration failed: {sol.message}")
            y, t = sol.y[:, -1], ts
        out[i] = clean_state(y.reshape(d, d))
        if monitor is not None:
            monitor(out[i])
    return out


def integrate(rhs: Callable[[np.ndarray], np.ndarray], rho0: Operator | np.ndarray,
              t: float, tol: float = 1e-10,
              monitor: Callable[[np.ndarray], None] | None = None) -> Operator:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return Operator(evolve(rhs, rho0, [t], tol, monitor)[0])


# --- exact collisions ------------------------------------------------------

def _probe_lowering(kind: ProbeKind, dim: int) -> Operator:
    return SIGMA_MINUS if kind == "qubit" else destroy(dim)


def _cluster_size(rho_cl: Operator) -> int:
    n = int(round(math.log2(rho_cl.dim)))
    if 2**n != rho_cl.dim:
        raise PhysicsError(f"cluster dimension {rho_cl.dim} is not a power of two")
    return n


def interaction_hamiltonian(kind: ProbeKind, probe_dim: int, n: int,
                            coupling: float) -> Operator:
    """``coupling (s J_+ + s^dag J_-)`` on probe x cluster (dipolar or Tavis-Cummings)."""
    s = _probe_lowering(kind, probe_dim)
    spin = collective_spin(n)
    return coupling * (kron(s, spin.jp) + kron(s.dag(), spin.jm))


def collision_step(rho_probe: Operator | np.ndarray, rho_cl: Operator | np.ndarray,
                   coupling: float, tau: float, kind: ProbeKind = "qubit") -> Operator:
    """Probe state after one exact collision with a fresh cluster."""
    rho_probe = as_operator(rho_probe)
    rho_cl = as_operator(rho_cl)
    n = _cluster_size(rho_cl)
    h = interaction_hamiltonian(kind, rho_probe.dim, n, coupling)
    u = expm(h, tau)
    joint = kron(Operator(rho_probe.data), Operator(rho_cl.data))
    joint = Operator(u.data @ joint.data @ u.data.conj().T, (rho_probe.dim, rho_cl.dim))
    return partial_trace(joint, [0])


def collision_kraus(rho_cl: Operator | np.ndarray, coupling: float, tau: float,
                    kind: ProbeKind, probe_dim: int) -> np.ndarray:
    """Kraus operators ``sqrt(w_k) <j|U|psi_k>`` of the single-collision channel."""
    rho_cl = as_operator(rho_cl)
    n = _cluster_size(rho_cl)
    u = expm(interaction_hamiltonian(kind, probe_dim, n, coupling), tau).data
    dc = rho_cl.dim
    u4 = u.reshape(probe_dim, dc, probe_dim, dc)
    w, v = np.linalg.eigh(0.5 * (rho_cl.data + rho_cl.data.conj().T))
    keep = w > 1e-14
    # K[j, k] = sum_b U[:, j, :, b] v[b, k] sqrt(w_k)
    kraus = np.einsum("ajcb,bk->jkac", u4, v[:, keep] * np.sqrt(w[keep]))
    return kraus.reshape(-1, probe_dim, probe_dim)


def apply_kraus(kraus: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return np.einsum("kab,bc,kdc->ad", kraus, rho, kraus.conj())


def kraus_superoperator(kraus: np.ndarray) -> np.ndarray:
    """Row-major superoperator ``sum_k K x conj(K)``."""
    return np.einsum("kab,kcd->acbd", kraus, kraus.conj()).reshape(
        kraus.shape[1] ** 2, kraus.shape[1] ** 2)


@dataclass
class Trajectory:
    """Sampled probe states; ``stderr`` holds Monte-Carlo standard errors of
    the real and imaginary parts (as the real and imaginary parts of a
    complex array) when the states are ensemble means."""

    times: np.ndarray
    states: np.ndarray
    stderr: np.ndarray | None = None
    n_traj: int = 1

    @property
    def rho_ee(self) -> np.ndarray:
        return self.states[:, 0, 0].real

    @property
    def photons(self) -> np.ndarray:
        return np.einsum("tnn,n->t", self.states, np.arange(self.states.shape[1])).real


class _Propagator:
    """``exp(L t)`` for a fixed Liouvillian, via eigendecomposition when well conditioned."""

    def __init__(self, liouv: np.ndarray):
        self.liouv = liouv
        w, v = np.linalg.eig(liouv)
        self.eig = None
        if np.linalg.cond(v) < 1e8:
            self.eig = (w, v, np.linalg.inv(v))

    def __call__(self, t: float) -> np.ndarray:
        if self.eig is None:
            return scipy.linalg.expm(self.liouv * t)
        w, v, vinv = self.eig
        return (v * np.exp(w * t)) @ vinv

    def apply(self, t: float, vec: np.ndarray) -> np.ndarray:
        if self.eig is None:
            return scipy.linalg.expm(self.liouv * t) @ vec
        w, v, vinv = self.eig
        return v @ (np.exp(w * t) * (vinv @ vec))


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for trajectory ``index`` of ensemble ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def collision_trajectory(p: ProbeParams, spec: ClusterSpec, rho0: Operator | np.ndarray,
                         t_final: float, mode: Literal["averaged", "poisson"] = "averaged",
                         dt: float | None = None, samples: int = 101, seed: int = 0,
                         n_traj: int = 1) -> Trajectory:
    """Simulate the repeated-interaction model with exact collisions.

    ``averaged`` iterates ``rho -> p dt Phi(rho) + (1 - p dt) rho`` followed by
    background evolution over ``dt``. ``poisson`` draws collision times from
    an exponential clock (rate ``p``) per trajectory and averages ``n_traj``
    trajectories in seed order.
    """
    if p.collision is None:
        raise PhysicsError("collision schedule (p, coupling, tau) required")
    col = p.collision
    rho0 = _as_array(rho0)
    d = p.dim
    if rho0.shape != (d, d):
        raise PhysicsError(f"initial state has shape {rho0.shape}, probe needs {(d, d)}")
    times = np.linspace(0.0, t_final, samples)
    kraus = collision_kraus(cluster_state(spec), col.coupling, col.tau, p.kind, d)
    background = LindbladGenerator(BathMoments(0, 0), p, dissipative=False,
                                   squeezing=False, drive=False).liouvillian()
    if mode == "averaged":
        return _averaged(p, kraus, background, rho0, times, dt)
    if mode == "poisson":
        return _poisson(p, kraus, background, rho0, times, seed, n_traj)
    raise ValueError(f"unknown mode {mode!r}")


def _averaged(p, kraus, background, rho0, times, dt):
    rate = p.collision.rate
    d = rho0.shape[0]
    interval = times[1] - times[0] if times.size > 1 else 0.0
    dt_max = 0.01 / rate if rate > 0 else interval or 1.0
    if dt is not None:
        if rate * dt >= 0.1:
            raise PhysicsError(f"time step too coarse: p dt = {rate * dt:.3g} >= 0.1")
        dt_max = dt
    nsub = max(1, math.ceil(interval / dt_max - 1e-9)) if interval else 1
    step = interval / nsub if interval else 0.0
    one = np.eye(d * d)
    m = scipy.linalg.expm(background * step) @ (
        (1.0 - rate * step) * one + rate * step * kraus_superoperator(kraus))
    m_sample = np.linalg.matrix_power(m, nsub)
    states = np.empty((times.size, d, d), dtype=complex)
    vec = rho0.reshape(-1).astype(complex)
    states[0] = rho0
    for i in range(1, times.size):
        vec = m_sample @ vec
        states[i] = clean_state(vec.reshape(d, d))
    return Trajectory(times, states)


def _poisson(p, kraus, background, rho0, times, seed, n_traj):
    rate = p.collision.rate
    d = rho0.shape[0]
    prop = _Propagator(background)
    total = np.zeros((times.size, d * d), dtype=complex)
    total_sq_re = np.zeros((times.size, d * d))
    total_sq_im = np.zeros((times.size, d * d))
    for index in range(n_traj):
        rng = trajectory_rng(seed, index)
        path = np.empty((times.size, d * d), dtype=complex)
        vec = rho0.reshape(-1).astype(complex)
        t = 0.0
        next_event = rng.exponential(1.0 / rate) if rate > 0 else math.inf
        for i, ts in enumerate(times):
            while next_event <= ts:
                vec = prop.apply(next_event - t, vec)
                vec = apply_kraus(kraus, vec.reshape(d, d)).reshape(-1)
                t = next_event
                next_event = t + rng.exponential(1.0 / rate)
            vec = prop.apply(ts - t, vec)
            t = ts
            path[i] = vec
        total += path
        total_sq_re += path.real ** 2
        total_sq_im += path.imag ** 2
    mean = total / n_traj
    states = np.array([clean_state(v.reshape(d, d)) for v in mean])
    stderr = None
    if n_traj > 1:
        var_re = np.clip(total_sq_re / n_traj - mean.real ** 2, 0, None) * n_traj / (n_traj - 1)
        var_im = np.clip(total_sq_im / n_traj - mean.imag ** 2, 0, None) * n_traj / (n_traj - 1)
        stderr = (np.sqrt(var_re / n_traj) + 1j * np.sqrt(var_im / n_traj)).reshape(-1, d, d)
    return Trajectory(times, states, stderr, n_traj)


# --- thermodynamics --------------------------------------------------------

def mean_photons(rho: Operator | np.ndarray) -> float:
    rho = _as_array(rho)
    return float(np.real(np.diag(rho) @ np.arange(rho.shape[0])))


def heat_flow(rho: Operator | np.ndarray, r: Rates, p: ProbeParams) -> float:
    rho = _as_array(rho)
    if p.kind == "qubit":
        return 2.0 * p.omega * (r.heat * rho[1, 1].real - r.cool * rho[0, 0].real)
    n = mean_photons(rho)
    return 2.0 * p.omega * (r.heat * (n + 1.0) - r.cool * n)


def probe_temperature(rho: Operator | np.ndarray, omega: float,
                      kind: ProbeKind = "qubit") -> Temperature:
    rho = _as_array(rho)
    if kind == "qubit":
        ee, gg = rho[0, 0].real, rho[1, 1].real
        if ee <= 0 or gg <= 0:
            raise PhysicsError("degenerate state: a level population vanishes")
        return Temperature(math.log(gg / ee) / omega, omega)
    n = mean_photons(rho)
    if n <= 0:
        raise PhysicsError("degenerate state: cavity in vacuum")
    return Temperature(math.log(1.0 / n + 1.0) / omega, omega)


def bath_temperature(r: Rates, omega: float) -> Temperature:
    if r.kind == "cavity" and r.heat >= r.cool:
        raise PhysicsError("no cavity steady state (negative-temperature regime)")
    if r.heat <= 0 or r.cool <= 0:
        raise PhysicsError("degenerate state: a rate vanishes")
    return Temperature(math.log(r.cool / r.heat) / omega, omega)


def apparent_temperature(arg: Rates | Operator | np.ndarray, omega: float,
                         kind: ProbeKind = "qubit") -> Temperature:
    """Temperature of a bath (given its ``Rates``) or of a probe state."""
    if isinstance(arg, Rates):
        return bath_temperature(arg, omega)
    return probe_temperature(arg, omega, kind)


def thermalization_time(m: BathMoments, p: ProbeParams) -> float:
    if p.kind == "qubit":
        denom = p.decay * (2.0 * p.n_env + 1.0) + 2.0 * p.mu * (m.j2 - m.jz2)
        if denom <= 0:
            raise PhysicsError("no relaxation: thermalization rate vanishes")
    else:
        denom = p.decay - 2.0 * p.mu * m.jz
        if denom <= 0:
            raise PhysicsError("unstable cavity regime: kappa - 2 mu <Jz> <= 0")
    return 1.0 / denom


def effective_rabi(m: BathMoments, mu_tilde: float) -> float:
    return 2.0 * mu_tilde * abs(m.jp)
