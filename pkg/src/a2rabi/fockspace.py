"""Operator matrices on the truncated spin-1/2 x single-mode Fock space.

Basis ordering for the full space is ``spin_index * (n_max + 1) + fock_index``
with spin index 0 the excited state (sigma_z = +1) and 1 the ground state
(sigma_z = -1).  All matrices are dense numpy arrays; everything here is a pure
function of its inputs.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.linalg

__all__ = [
    "Truncation",
    "TruncationInadequate",
    "HermitianOperator",
    "UnitaryOperator",
    "annihilation",
    "creation",
    "number",
    "quadrature",
    "quadrature_squared",
    "boson_identity",
    "pauli",
    "tensor",
    "displacement",
    "squeeze",
    "parity",
    "parity_signs",
]

HERMITIAN_RTOL = 1e-12


class TruncationInadequate(UserWarning):
    """The Fock cutoff is too small for the requested unitary."""


@dataclass(frozen=True)
class Truncation:
    """Fock cutoff plus the adaptive-convergence policy.

    ``n_max`` is the highest retained occupation, so the boson block has
    dimension ``n_max + 1`` and the full space ``2 * (n_max + 1)``.
    """

    n_max: int = 40
    rel_tol: float = 1e-10
    max_doublings: int = 4

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if int(self.max_doublings) != self.max_doublings or self.max_doublings < 0:
            raise ValueError(f"max_doublings must be >= 0, got {self.max_doublings!r}")
        object.__setattr__(self, "n_max", int(self.n_max))
        object.__setattr__(self, "max_doublings", int(self.max_doublings))

    @property
    def boson_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def with_n_max(self, n_max: int) -> "Truncation":
        return Truncation(n_max, self.rel_tol, self.max_doublings)


TruncLike = Union[Truncation, int]


def _n_max(trunc: TruncLike) -> int:
    # bare ints are accepted so that single operators can be built at n_max = 0
    if isinstance(trunc, Truncation):
        return trunc.n_max
    n = int(trunc)
    if n != trunc or n < 0:
        raise ValueError(f"n_max must be a non-negative integer, got {trunc!r}")
    return n


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, copy=True)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class HermitianOperator:
    """Dense square matrix with its Hermiticity defect recorded at construction."""

    entries: np.ndarray
    hermitian_defect: float = field(default=float("nan"))

    def __post_init__(self):
        m = np.asarray(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be a square matrix, got shape {m.shape}")
        object.__setattr__(self, "entries", _frozen(m))
        defect = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        object.__setattr__(self, "hermitian_defect", defect)
        scale = float(np.max(np.abs(m))) if m.size else 0.0
        if defect > HERMITIAN_RTOL * max(scale, 1.0):
            raise ValueError(
                f"matrix is not Hermitian: defect {defect:.3e} at scale {scale:.3e}"
            )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class UnitaryOperator:
    """Dense (approximately) unitary matrix.

    ``unitarity_defect`` is ``max|U^dag U - I|``.  Exponentials of a truncated
    anti-Hermitian generator are unitary to rounding, so the truncation error
    shows up instead as amplitude reaching the top Fock level; ``leakage``
    records that amplitude for the lowest quarter of the Fock basis.
    """

    entries: np.ndarray
    unitarity_defect: float = field(default=float("nan"))
    leakage: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be a square matrix, got shape {m.shape}")
        object.__setattr__(self, "entries", _frozen(m))
        eye = np.eye(m.shape[0])
        object.__setattr__(
            self, "unitarity_defect", float(np.max(np.abs(m.conj().T @ m - eye)))
        )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def defect(self) -> float:
        return max(self.unitarity_defect, self.leakage)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def annihilation(trunc: TruncLike) -> np.ndarray:
    """Boson lowering operator, ``<n-1|a|n> = sqrt(n)``."""
    n = _n_max(trunc)
    return np.diag(np.sqrt(np.arange(1, n + 1, dtype=float)), 1)


def creation(trunc: TruncLike) -> np.ndarray:
    return annihilation(trunc).T.copy()


def number(trunc: TruncLike) -> np.ndarray:
    return np.diag(np.arange(_n_max(trunc) + 1, dtype=float))


def boson_identity(trunc: TruncLike) -> np.ndarray:
    return np.eye(_n_max(trunc) + 1)


def quadrature(trunc: TruncLike) -> np.ndarray:
    """``a + a^dag``."""
    a = annihilation(trunc)
    return a + a.T


def quadrature_squared(trunc: TruncLike) -> np.ndarray:
    """``(a + a^dag)^2`` in normal order, ``a^2 + a^dag^2 + 2 a^dag a + 1``.

    Unlike the square of the truncated quadrature this is the exact
    compression of the infinite operator, so a smaller cutoff always gives a
    principal submatrix of a larger one.
    """
    n = _n_max(trunc)
    a = annihilation(n)
    a2 = a @ a
    return a2 + a2.T + np.diag(2.0 * np.arange(n + 1) + 1.0)


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "i": np.eye(2, dtype=complex),
}
_PAULI["plus"] = 0.5 * (_PAULI["x"] + 1j * _PAULI["y"])
_PAULI["minus"] = 0.5 * (_PAULI["x"] - 1j * _PAULI["y"])


def pauli(which: str) -> np.ndarray:
    """Pauli matrix ``x``, ``y``, ``z``, ladder ``plus``/``minus``, or ``i``.

    Real-valued matrices are returned as float arrays so Hamiltonians that
    never touch sigma_y stay real.
    """
    try:
        m = _PAULI[which]
    except KeyError:
        raise ValueError(f"unknown Pauli axis {which!r}; expected one of {sorted(_PAULI)}") from None
    if np.all(m.imag == 0):
        return m.real.copy()
    return m.copy()


def tensor(spin_op, boson_op) -> np.ndarray:
    """Kronecker product with the spin slot first."""
    s = np.asarray(spin_op)
    b = np.asarray(boson_op)
    if s.shape != (2, 2):
        raise ValueError(f"spin operator must be 2x2, got {s.shape}")
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError(f"boson operator must be square, got {b.shape}")
    return np.kron(s, b)


def _exp_unitary(generator: np.ndarray, n: int, rel_tol: float, label: str) -> UnitaryOperator:
    u = scipy.linalg.expm(generator)
    quarter = max(1, (n + 1) // 4)
    leak = float(np.max(np.abs(u[n, :quarter]))) if n > 0 else 0.0
    op = UnitaryOperator(u, leakage=leak)
    if op.defect > rel_tol:
        warnings.warn(
            f"{label}: truncation n_max={n} inadequate (unitarity defect "
            f"{op.unitarity_defect:.2e}, top-level leakage {leak:.2e})",
            TruncationInadequate,
            stacklevel=3,
        )
    return op


def displacement(beta: float, trunc: TruncLike) -> UnitaryOperator:
    """``D(beta) = exp[beta (a^dag - a)]`` for real ``beta``."""
    n = _n_max(trunc)
    a = annihilation(n)
    tol = trunc.rel_tol if isinstance(trunc, Truncation) else 1e-10
    return _exp_unitary(beta * (a.T - a), n, tol, f"displacement({beta:g})")


def squeeze(zeta: float, trunc: TruncLike) -> UnitaryOperator:
    """``S(zeta) = exp[(zeta/2)(a^2 - a^dag^2)]`` for real ``zeta``.

    With this sign ``S^dag (a + a^dag) S = exp(-zeta) (a + a^dag)``.
    """
    n = _n_max(trunc)
    a = annihilation(n)
    a2 = a @ a
    tol = trunc.rel_tol if isinstance(trunc, Truncation) else 1e-10
    return _exp_unitary(0.5 * zeta * (a2 - a2.T), n, tol, f"squeeze({zeta:g})")


def parity_signs(trunc: TruncLike) -> np.ndarray:
    """Diagonal of ``sigma_z (x) (-1)^{a^dag a}`` as an int array of +-1."""
    n = _n_max(trunc)
    fock = 1 - 2 * (np.arange(n + 1) % 2)
    return np.concatenate([fock, -fock]).astype(np.int64)


def parity(trunc: TruncLike) -> HermitianOperator:
    """Parity ``sigma_z (x) (-1)^{a^dag a}``; diagonal, squares to the identity."""
    return HermitianOperator(np.diag(parity_signs(trunc).astype(float)))
