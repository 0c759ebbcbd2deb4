"""Cluster states and the collective moments that drive probe generators."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Union

import numpy as np

from .errors import PhysicsError
from .operators import (
    SIGMA_Y,
    Operator,
    as_operator,
    check_density_matrix,
    collective_spin,
    kron,
)

MOMENT_TOL = 1e-10


@dataclass(frozen=True)
class HECTwoQubit:
    """Two-qubit cluster carrying only heat-exchange coherences.

    ``phi`` sets the populations of ``|eg>`` and ``|ge>``; ``zeta`` is the
    purity/amplitude of the coherence between them.
    """

    phi: float
    zeta: complex = 0.0

    def __post_init__(self):
        if abs(self.zeta) > 1.0 + 1e-12:
            raise PhysicsError(f"unphysical purity: |zeta| = {abs(self.zeta):.6g} > 1")
        if not -np.pi / 4 - 1e-12 <= self.phi <= np.pi / 4 + 1e-12:
            raise PhysicsError(f"phi = {self.phi} outside [-pi/4, pi/4]")

    @property
    def n(self) -> int:
        return 2


@dataclass(frozen=True)
class Dicke:
    """Symmetric ``n``-qubit state with exactly ``k`` excitations."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise PhysicsError("cluster needs at least one qubit")
        if not 0 <= self.k <= self.n:
            raise PhysicsError(f"bad excitation count: k = {self.k} not in [0, {self.n}]")


@dataclass(frozen=True, eq=False)
class ExplicitCluster:
    rho: Operator
    n: int

    def __post_init__(self):
        rho = as_operator(self.rho)
        if rho.dim != 2**self.n:
            raise PhysicsError(f"cluster size mismatch: dim {rho.dim} != 2^{self.n}")
        check_density_matrix(rho)
        object.__setattr__(self, "rho", rho)


ClusterSpec = Union[HECTwoQubit, Dicke, ExplicitCluster]


@dataclass(frozen=True)
class BathMoments:
    """Collective-spin expectation values of a cluster state.

    ``jp_jm = <J+J->``, ``jm_jp = <J-J+>``, ``jp = <J+>``, ``jp2 = <J+^2>``,
    ``jz = <Jz>``, ``jz2 = <Jz^2>``, ``j2 = <J^2>``.
    """

    jp_jm: complex
    jm_jp: complex
    jp: complex = 0.0
    jp2: complex = 0.0
    jz: float = 0.0
    jz2: float = 0.0
    j2: float = 0.0

    @property
    def jm(self) -> complex:
        return complex(np.conj(self.jp))

    @property
    def jm2(self) -> complex:
        return complex(np.conj(self.jp2))

    def violations(self, tol: float = MOMENT_TOL) -> list[str]:
        """Names of the algebraic identities this set of moments breaks."""
        bad = []
        for name in ("jp_jm", "jm_jp"):
            v = complex(getattr(self, name))
            if abs(v.imag) > tol or v.real < -tol:
                bad.append(f"{name} not a nonnegative real")
        if abs(self.jp_jm - self.jm_jp - 2 * self.jz) > tol:
            bad.append("jp_jm - jm_jp != 2 jz")
        if abs(self.j2 - self.jz2 - 0.5 * (self.jp_jm + self.jm_jp)) > tol:
            bad.append("j2 - jz2 != (jp_jm + jm_jp)/2")
        return bad

    @classmethod
    def from_hec(cls, phi: float, zeta: complex) -> BathMoments:
        """Closed form for the two-qubit HEC family."""
        x = 1.0 + 2.0 * np.real(zeta) * np.sin(phi) * np.cos(phi)
        return cls(jp_jm=x, jm_jp=x, jz=0.0, jz2=0.0, j2=x)

    @classmethod
    def from_dicke(cls, n: int, k: int) -> BathMoments:
        jz = k - n / 2
        pm = k * (n - k + 1)
        mp = (k + 1) * (n - k)
        return cls(jp_jm=pm, jm_jp=mp, jz=jz, jz2=jz * jz, j2=jz * jz + 0.5 * (pm + mp))


def dicke_vector(n: int, k: int) -> np.ndarray:
    """Normalized symmetric state with ``k`` excitations (all coefficients positive)."""
    psi = np.zeros(2**n, dtype=complex)
    for excited in combinations(range(n), k):
        # qubit j is the (n-1-j)-th bit; bit value 0 encodes |e>
        index = sum(1 << (n - 1 - j) for j in range(n) if j not in excited)
        psi[index] = 1.0
    return psi / np.sqrt(comb(n, k))


def cluster_state(spec: ClusterSpec) -> Operator:
    if isinstance(spec, HECTwoQubit):
        s, c = np.sin(spec.phi), np.cos(spec.phi)
        z = complex(spec.zeta)
        rho = np.zeros((4, 4), dtype=complex)
        rho[1, 1] = s * s
        rho[2, 2] = c * c
        rho[1, 2] = z * s * c
        rho[2, 1] = np.conj(z) * s * c
        return Operator(rho, (2, 2))
    if isinstance(spec, Dicke):
        psi = dicke_vector(spec.n, spec.k)
        return Operator(np.outer(psi, psi.conj()), (2,) * spec.n if spec.n > 1 else ())
    if isinstance(spec, ExplicitCluster):
        return spec.rho
    raise TypeError(f"unknown cluster spec {spec!r}")


def bath_moments(rho_cl: Operator | np.ndarray, n: int) -> BathMoments:
    rho = as_operator(rho_cl)
    if rho.dim != 2**n:
        raise PhysicsError(f"cluster size mismatch: dim {rho.dim} != 2^{n}")
    ops = collective_spin(n)

    def ev(op: Operator) -> complex:
        return rho.expect(op)

    return BathMoments(
        jp_jm=ev(ops.jp @ ops.jm),
        jm_jp=ev(ops.jm @ ops.jp),
        jp=ev(ops.jp),
        jp2=ev(ops.jp @ ops.jp),
        jz=ev(ops.jz).real,
        jz2=ev(ops.jz @ ops.jz).real,
        j2=ev(ops.j2).real,
    )


def spec_moments(spec: ClusterSpec) -> BathMoments:
    return bath_moments(cluster_state(spec), spec.n)


def concurrence(rho: Operator | np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    The lambda_i are taken as singular values of ``V^T (Y x Y) V`` with
    ``V`` the subnormalized eigenvectors of ``rho``; unlike square roots of
    eigenvalues of ``rho rho~`` this stays accurate for rank-deficient states.
    """
    r = as_operator(rho).data
    yy = kron(SIGMA_Y, SIGMA_Y).data.real
    w, e = np.linalg.eigh(0.5 * (r + r.conj().T))
    v = e * np.sqrt(np.clip(w, 0.0, None))
    lam = np.linalg.svd(v.T @ yy @ v, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def l1_coherence(rho: Operator | np.ndarray) -> float:
    r = as_operator(rho).data
    return float(np.sum(np.abs(r)) - np.sum(np.abs(np.diag(r))))


def concurrence_and_l1(phi: float, zeta: complex) -> tuple[float, float]:
    rho = cluster_state(HECTwoQubit(phi, zeta))
    return concurrence(rho), l1_coherence(rho)
