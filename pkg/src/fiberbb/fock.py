"""
Truncated multi-mode bosonic Fock space.

Every operator in the package lives on a product space of ``num_modes``
oscillators, each truncated to occupations ``0 .. d-1``. The tensor
convention is fixed here and nowhere else:

    index(n_0, n_1, ..., n_{M-1}) = sum_j n_j * d**(M-1-j)

i.e. mode 0 is the slowest-varying index, matching ``np.kron(op_0, op_1, ...)``.
All single-mode operators are lifted to the full space through
:meth:`FockSpace.embed`.

Matrices are dense. Spaces larger than ``MAX_DIMENSION`` are refused.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

MAX_DIMENSION = 4096
DEFAULT_DIM_PER_MODE = 4
FLAG_TOL = 1e-12


class FockError(ValueError):
    """Invalid Fock-space construction or operation."""


@dataclass(frozen=True)
class FockSpace:
    num_modes: int
    dim_per_mode: int = DEFAULT_DIM_PER_MODE

    def __post_init__(self):
        if self.num_modes < 1 or self.dim_per_mode < 1:
            raise FockError("num_modes and dim_per_mode must be positive")
        if self.dim > MAX_DIMENSION:
            raise FockError(
                f"total dimension {self.dim} exceeds the dense cap {MAX_DIMENSION}"
            )

    @property
    def dim(self) -> int:
        return self.dim_per_mode ** self.num_modes

    def check_mode(self, mode: int) -> None:
        if not 0 <= mode < self.num_modes:
            raise FockError(f"mode {mode} out of range [0, {self.num_modes - 1}]")

    def embed(self, single: np.ndarray, mode: int) -> np.ndarray:
        """Lift a ``d x d`` single-mode matrix onto ``mode`` of the full space."""
        self.check_mode(mode)
        d = self.dim_per_mode
        if single.shape != (d, d):
            raise FockError(f"single-mode matrix must be {d}x{d}, got {single.shape}")
        eye = np.eye(d, dtype=complex)
        factors = [single if j == mode else eye for j in range(self.num_modes)]
        return reduce(np.kron, factors)

    def index(self, occupations: Sequence[int]) -> int:
        if len(occupations) != self.num_modes:
            raise FockError("occupation tuple has wrong length")
        idx = 0
        for n in occupations:
            if not 0 <= n < self.dim_per_mode:
                raise FockError(f"occupation {n} outside truncation {self.dim_per_mode}")
            idx = idx * self.dim_per_mode + n
        return idx

    def occupations(self, index: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.num_modes):
            index, n = divmod(index, self.dim_per_mode)
            out.append(n)
        return tuple(reversed(out))

    def occupation_table(self) -> np.ndarray:
        """``(dim, num_modes)`` integer array of occupations per basis index."""
        grids = np.indices((self.dim_per_mode,) * self.num_modes)
        return grids.reshape(self.num_modes, -1).T

    def identity(self) -> "FockOperator":
        return FockOperator(self, np.eye(self.dim, dtype=complex), hermitian=True, unitary=True)

    def zero(self) -> "FockOperator":
        return FockOperator(self, np.zeros((self.dim, self.dim), dtype=complex), hermitian=True)

    def basis_state(self, occupations: Sequence[int]) -> "FockState":
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(occupations)] = 1.0
        return FockState(self, v)

    def vacuum(self) -> "FockState":
        return self.basis_state((0,) * self.num_modes)


def _is_hermitian(m: np.ndarray, tol: float = FLAG_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def _is_unitary(m: np.ndarray, tol: float = FLAG_TOL) -> bool:
    eye = np.eye(m.shape[0])
    return bool(np.max(np.abs(m.conj().T @ m - eye), initial=0.0) <= tol)


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Dense operator bound to a :class:`FockSpace`.

    ``hermitian`` / ``unitary`` flags are optional claims; a ``True`` claim
    is verified (max-abs entrywise, 1e-12) at construction.
    """

    space: FockSpace
    matrix: np.ndarray
    hermitian: Optional[bool] = None
    unitary: Optional[bool] = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise FockError(
                f"matrix shape {m.shape} does not match space dimension {self.space.dim}"
            )
        if self.hermitian and not _is_hermitian(m):
            raise FockError("operator flagged Hermitian but is not (tol 1e-12)")
        if self.unitary and not _is_unitary(m):
            raise FockError("operator flagged unitary but is not (tol 1e-12)")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def _check(self, other: "FockOperator") -> None:
        if other.space != self.space:
            raise FockError("operators live on different Fock spaces")

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            self._check(other)
            return FockOperator(self.space, self.matrix @ other.matrix)
        if isinstance(other, FockState):
            return other.evolve(self)
        return NotImplemented

    def __add__(self, other: "FockOperator") -> "FockOperator":
        self._check(other)
        return FockOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        self._check(other)
        return FockOperator(self.space, self.matrix - other.matrix)

    def __neg__(self) -> "FockOperator":
        return FockOperator(self.space, -self.matrix, hermitian=self.hermitian)

    def __mul__(self, scalar) -> "FockOperator":
        return FockOperator(self.space, complex(scalar) * self.matrix)

    __rmul__ = __mul__

    def dag(self) -> "FockOperator":
        return FockOperator(
            self.space, self.matrix.conj().T, hermitian=self.hermitian, unitary=self.unitary
        )

    def power(self, k: int) -> "FockOperator":
        return FockOperator(self.space, np.linalg.matrix_power(self.matrix, k))

    def commutator(self, other: "FockOperator") -> "FockOperator":
        return self @ other - other @ self

    def conjugate_by(self, u: "FockOperator") -> "FockOperator":
        """Return ``u A u^dagger``."""
        self._check(u)
        return FockOperator(self.space, u.matrix @ self.matrix @ u.matrix.conj().T)

    def is_hermitian(self, tol: float = FLAG_TOL) -> bool:
        return _is_hermitian(self.matrix, tol)

    def is_unitary(self, tol: float = FLAG_TOL) -> bool:
        return _is_unitary(self.matrix, tol)

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def annihilation(space: FockSpace, mode: int) -> FockOperator:
    """Lowering operator ``b_mode``; ``<m-1|b|m> = sqrt(m)`` up to the cutoff."""
    space.check_mode(mode)
    d = space.dim_per_mode
    single = np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)
    return FockOperator(space, space.embed(single, mode))


def creation(space: FockSpace, mode: int) -> FockOperator:
    return annihilation(space, mode).dag()


def number(space: FockSpace, mode: int) -> FockOperator:
    space.check_mode(mode)
    single = np.diag(np.arange(space.dim_per_mode, dtype=float)).astype(complex)
    return FockOperator(space, space.embed(single, mode), hermitian=True)


def phase_rotation(space: FockSpace, angles: Sequence[float]) -> FockOperator:
    """``exp(i sum_j angles[j] n_j)`` built directly on the diagonal."""
    if len(angles) > space.num_modes:
        raise FockError("more angles than modes")
    occ = space.occupation_table()[:, : len(angles)]
    phases = occ @ np.asarray(angles, dtype=float)
    return FockOperator(space, np.diag(np.exp(1j * phases)), unitary=True)


def matrix_exponential(a: FockOperator, scale: complex = 1.0) -> FockOperator:
    """``exp(scale * A)``.

    Hermitian ``A`` goes through an eigendecomposition; anything else through
    scipy's scaling-and-squaring Padé. The result is flagged unitary when
    ``A`` is Hermitian and ``scale`` is purely imaginary.
    """
    m = a.matrix
    if not np.all(np.isfinite(m)):
        raise FockError("matrix_exponential: non-finite entries")
    scale = complex(scale)
    if a.hermitian or _is_hermitian(m):
        herm = 0.5 * (m + m.conj().T)
        w, v = np.linalg.eigh(herm)
        out = (v * np.exp(scale * w)) @ v.conj().T
        unitary = scale.real == 0.0
        return FockOperator(a.space, out, hermitian=None, unitary=True if unitary else None)
    return FockOperator(a.space, scipy.linalg.expm(scale * m))


def evolution(h: FockOperator, t: float) -> FockOperator:
    """``exp(-i H t)`` for Hermitian ``H``."""
    if not h.is_hermitian():
        raise FockError("evolution requires a Hermitian generator")
    return matrix_exponential(h, -1j * t)


@dataclass(frozen=True, eq=False)
class FockState:
    """Pure state (1-D amplitudes) or density matrix (2-D) on a Fock space."""

    space: FockSpace
    data: np.ndarray
    psd_checked: bool = field(default=False)

    def __post_init__(self):
        d = np.array(self.data, dtype=complex)
        n = self.space.dim
        if d.ndim == 1:
            if d.shape != (n,):
                raise FockError("state vector has wrong dimension")
            if abs(np.linalg.norm(d) - 1.0) > FLAG_TOL:
                raise FockError("state vector is not normalized (tol 1e-12)")
        elif d.ndim == 2:
            if d.shape != (n, n):
                raise FockError("density matrix has wrong dimension")
            if abs(np.trace(d) - 1.0) > FLAG_TOL:
                raise FockError("density matrix trace is not 1 (tol 1e-12)")
            if self.psd_checked and np.linalg.eigvalsh(0.5 * (d + d.conj().T)).min() < -1e-10:
                raise FockError("density matrix is not positive semidefinite")
        else:
            raise FockError("state data must be 1-D or 2-D")
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @property
    def is_density(self) -> bool:
        return self.data.ndim == 2

    @classmethod
    def from_vector(cls, space: FockSpace, vector, normalize: bool = True) -> "FockState":
        v = np.asarray(vector, dtype=complex)
        if normalize:
            v = v / np.linalg.norm(v)
        return cls(space, v)

    def to_density(self) -> "FockState":
        if self.is_density:
            return self
        return FockState(self.space, np.outer(self.data, self.data.conj()))

    def evolve(self, u: FockOperator) -> "FockState":
        if u.space != self.space:
            raise FockError("operator and state live on different spaces")
        if self.is_density:
            return FockState(self.space, u.matrix @ self.data @ u.matrix.conj().T)
        return FockState(self.space, u.matrix @ self.data)

    def expectation(self, op: FockOperator) -> complex:
        if self.is_density:
            return complex(np.trace(op.matrix @ self.data))
        return complex(self.data.conj() @ op.matrix @ self.data)

    def purity(self) -> float:
        rho = self.to_density().data
        return float(np.real(np.trace(rho @ rho)))


def partial_trace(rho: FockState, keep: Iterable[int]) -> FockState:
    """Reduce a density matrix onto the modes in ``keep`` (returned in ascending order)."""
    if not rho.is_density:
        raise FockError("partial_trace needs a density matrix; call to_density() first")
    space = rho.space
    keep = sorted(set(keep))
    if not keep:
        raise FockError("keep must name at least one mode")
    for m in keep:
        space.check_mode(m)
    n, d = space.num_modes, space.dim_per_mode
    t = rho.data.reshape((d,) * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for j in range(n):
        if j not in keep:
            col[j] = row[j]
    out = "".join(row[j] for j in keep) + "".join(col[j] for j in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    sub = FockSpace(len(keep), d)
    return FockState(sub, reduced.reshape(sub.dim, sub.dim))


def op_distance(a: FockOperator, b: FockOperator, phase_invariant: bool = False) -> float:
    """Spectral-norm distance ``||A - B||``, optionally ``min_phi ||A - e^{i phi} B||``."""
    a._check(b)
    if not phase_invariant:
        return float(np.linalg.norm(a.matrix - b.matrix, 2))
    if a.is_unitary(1e-10) and b.is_unitary(1e-10):
        # ||A - e^{i phi} B|| = max_k |lambda_k - e^{i phi}| over eigenvalues of B^dag A
        lam = np.linalg.eigvals(b.matrix.conj().T @ a.matrix)
        theta = np.sort(np.mod(np.angle(lam), 2 * np.pi))
        gaps = np.diff(np.concatenate([theta, [theta[0] + 2 * np.pi]]))
        arc = 2 * np.pi - gaps.max()
        return float(2 * np.sin(arc / 4))

    def f(phi):
        return np.linalg.norm(a.matrix - np.exp(1j * phi) * b.matrix, 2)

    grid = np.linspace(0.0, 2 * np.pi, 73)
    vals = [f(p) for p in grid]
    i = int(np.argmin(vals))
    step = grid[1] - grid[0]
    res = minimize_scalar(f, bounds=(grid[i] - step, grid[i] + step), method="bounded",
                          options={"xatol": 1e-12})
    return float(min(res.fun, vals[i]))
