"""Dense operators on small composite Hilbert spaces.

Basis conventions: a qubit is ordered ``(e, g)`` so that ``sigma_z = diag(1, -1)``;
multi-qubit states put the most significant qubit first, e.g. ``(ee, eg, ge, gg)``.
Boson modes are truncated Fock spaces ``|0>, ..., |n_max - 1>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericalError, PhysicsError

MAX_DIM = 4096
TOL_HERM = 1e-10


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix with optional tensor-factor layout.

    ``factors`` lists the subsystem dimensions; an empty tuple marks an
    atomic (unfactored) operator.
    """

    data: np.ndarray
    factors: tuple[int, ...] = field(default=())

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"operator must be square, got shape {data.shape}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        factors = tuple(int(f) for f in self.factors)
        if factors and prod(factors) != data.shape[0]:
            raise ValueError(f"factors {factors} do not multiply to dim {data.shape[0]}")
        object.__setattr__(self, "factors", factors)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def layout(self) -> tuple[int, ...]:
        return self.factors or (self.dim,)

    def dag(self) -> Operator:
        return Operator(self.data.conj().T, self.factors)

    def tr(self) -> complex:
        return complex(np.trace(self.data))

    def expect(self, other: Operator | np.ndarray) -> complex:
        """``Tr(self @ other)``; for a state this is the expectation of ``other``."""
        return complex(np.einsum("ij,ji->", self.data, _as_array(other)))

    def is_hermitian(self, tol: float = TOL_HERM) -> bool:
        return bool(np.max(np.abs(self.data - self.data.conj().T), initial=0.0) <= tol)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.data @ other.data, self.factors or other.factors)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Operator):
            return Operator(self.data + other.data, self.factors or other.factors)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Operator):
            return Operator(self.data - other.data, self.factors or other.factors)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return Operator(self.data * scalar, self.factors)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if np.isscalar(scalar):
            return Operator(self.data / scalar, self.factors)
        return NotImplemented

    def __neg__(self):
        return Operator(-self.data, self.factors)

    def __repr__(self):
        return f"Operator(dim={self.dim}, factors={self.factors})"


def _as_array(x) -> np.ndarray:
    return x.data if isinstance(x, Operator) else np.asarray(x, dtype=complex)


def as_operator(x, factors: Sequence[int] = ()) -> Operator:
    if isinstance(x, Operator):
        return x
    return Operator(np.asarray(x, dtype=complex), tuple(factors))


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim, dtype=complex))


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def check_density_matrix(rho: Operator | np.ndarray, tol: float = 1e-10,
                         min_eig: float = -1e-9) -> None:
    """Raise ``PhysicsError`` unless ``rho`` is a valid density matrix."""
    arr = _as_array(rho)
    herm = np.max(np.abs(arr - arr.conj().T), initial=0.0)
    if herm > tol:
        raise PhysicsError(f"hermiticity violation: max |rho - rho^H| = {herm:.3e}")
    trace = np.trace(arr)
    if abs(trace - 1.0) > tol:
        raise PhysicsError(f"density matrix trace is {trace.real:.12g}, expected 1")
    lam = np.linalg.eigvalsh(0.5 * (arr + arr.conj().T))[0]
    if lam < min_eig:
        raise PhysicsError(f"density matrix not positive: minimum eigenvalue {lam:.3e}")


def kron(a: Operator, b: Operator, max_dim: int = MAX_DIM) -> Operator:
    dim = a.dim * b.dim
    if dim > max_dim:
        raise NumericalError(f"dimension limit: {a.dim} x {b.dim} = {dim} exceeds {max_dim}")
    return Operator(np.kron(a.data, b.data), a.layout + b.layout)


def kron_all(ops: Iterable[Operator], max_dim: int = MAX_DIM) -> Operator:
    return reduce(lambda x, y: kron(x, y, max_dim), ops)


def expm(h: Operator | np.ndarray, t: float) -> Operator:
    """Return ``exp(-i h t)`` for Hermitian ``h`` via eigendecomposition."""
    h = as_operator(h)
    if not h.is_hermitian():
        raise PhysicsError("hermiticity violation: expm requires a Hermitian generator")
    w, v = np.linalg.eigh(0.5 * (h.data + h.data.conj().T))
    return Operator((v * np.exp(-1j * w * t)) @ v.conj().T, h.factors)


def partial_trace(rho: Operator, keep: Iterable[int]) -> Operator:
    if not rho.factors:
        raise ValueError("unfactored operator: partial_trace needs factor dimensions")
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("nothing to keep")
    n = len(rho.factors)
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"keep indices {keep} out of range for {n} factors")
    dims = rho.factors
    tensor = rho.data.reshape(dims + dims)
    # einsum labels: rows use letters [0, n), columns reuse them for traced factors
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = [letters[n + i] if i in keep else letters[i] for i in range(n)]
    out = [rows[i] for i in keep] + [cols[i] for i in keep]
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + "".join(out), tensor)
    kept = tuple(dims[i] for i in keep)
    d = prod(kept)
    return Operator(reduced.reshape(d, d), kept if len(kept) > 1 else ())


# --- single-qubit and collective operators ---------------------------------

SIGMA_PLUS = Operator(np.array([[0, 1], [0, 0]]))
SIGMA_MINUS = Operator(np.array([[0, 0], [1, 0]]))
SIGMA_X = Operator(np.array([[0, 1], [1, 0]]))
SIGMA_Y = Operator(np.array([[0, -1j], [1j, 0]]))
SIGMA_Z = Operator(np.array([[1, 0], [0, -1]]))
EXCITED = Operator(np.array([[1, 0], [0, 0]]))
GROUND = Operator(np.array([[0, 0], [0, 1]]))


@dataclass(frozen=True)
class CollectiveSpin:
    """Collective operators ``J_+, J_-, J_z, J^2`` of ``n`` qubits."""

    n: int
    jp: Operator
    jm: Operator
    jz: Operator
    j2: Operator


def site_operator(op: Operator, site: int, n: int, max_dim: int = MAX_DIM) -> Operator:
    """Embed a single-qubit ``op`` at position ``site`` of an ``n``-qubit register."""
    return kron_all([op if j == site else identity(2) for j in range(n)], max_dim)


def collective_spin(n: int, max_dim: int = MAX_DIM) -> CollectiveSpin:
    if n < 1:
        raise ValueError("cluster needs at least one qubit")
    if 2**n > max_dim:
        raise NumericalError(f"dimension limit: 2^{n} exceeds {max_dim}")
    jp = reduce(lambda x, y: x + y, (site_operator(SIGMA_PLUS, j, n) for j in range(n)))
    jz = reduce(lambda x, y: x + y, (site_operator(SIGMA_Z, j, n) for j in range(n))) * 0.5
    jm = jp.dag()
    j2 = jz @ jz + (jp @ jm + jm @ jp) * 0.5
    return CollectiveSpin(n, jp, jm, jz, j2)


def destroy(n_max: int) -> Operator:
    """Truncated annihilation operator with ``a|n> = sqrt(n)|n-1>``."""
    if n_max < 2:
        raise ValueError("boson truncation needs n_max >= 2")
    return Operator(np.diag(np.sqrt(np.arange(1, n_max)), k=1))


def boson(n_max: int) -> tuple[Operator, Operator]:
    a = destroy(n_max)
    return a, a.dag()


def number(n_max: int) -> Operator:
    return Operator(np.diag(np.arange(n_max, dtype=float)))
