"""Hamiltonians of the Rabi model with an A^2 term and the maps between them.

Units: hbar = 1, every energy is an angular frequency.

The full model is

    H(wa, wc, g, C) = (wa/2) sz + wc (a^dag a + 1/2) + g sx (a + a^dag) + C g^2 (a + a^dag)^2

and the Hopfield-Bogoliubov squeeze maps it onto ``H(wa, w(g), g~, 0)`` with
``w(g) = sqrt(wc^2 + 4 C wc g^2)`` and ``g~ = g sqrt(wc / w(g))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import fockspace as fs
from .fockspace import HermitianOperator, TruncLike, UnitaryOperator

__all__ = [
    "ModelParams",
    "HbImage",
    "RScheme",
    "SCHEDULES",
    "LIMIT_KINDS",
    "hb_map",
    "paper_shift",
    "build_hamiltonian",
    "shifted_hamiltonian",
    "build_polaron_unitary",
    "build_eq3_rhs",
    "build_limit_hamiltonian",
    "limit_levels",
]


@dataclass(frozen=True)
class ModelParams:
    omega_a: float
    omega_c: float
    g: float
    C: float = 0.0

    def __post_init__(self):
        for name in ("omega_a", "omega_c", "g", "C"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.omega_c <= 0:
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")
        if self.omega_a < 0 or self.g < 0 or self.C < 0:
            raise ValueError(f"omega_a, g and C must be >= 0, got {self}")

    @classmethod
    def symmetric(cls, omega: float, g: float, C: float = 0.0) -> "ModelParams":
        """``omega_a = omega_c = omega``: the setting of the g-sweeps."""
        return cls(omega, omega, g, C)

    def as_dict(self) -> dict:
        return {"omega_a": self.omega_a, "omega_c": self.omega_c, "g": self.g, "C": self.C}


@dataclass(frozen=True)
class HbImage:
    omega_g: float
    g_tilde: float
    zeta: float


def hb_map(p: ModelParams) -> HbImage:
    """Renormalised frequency, coupling and squeeze parameter.

    ``zeta = ln(w(g)/wc) / 2`` is the squeeze for which
    ``S(zeta)^dag H(p) S(zeta) = H(wa, w(g), g~, 0)``.
    """
    omega_g = math.sqrt(p.omega_c**2 + 4.0 * p.C * p.omega_c * p.g**2)
    g_tilde = p.g * math.sqrt(p.omega_c / omega_g)
    zeta = 0.5 * math.log(omega_g / p.omega_c)
    return HbImage(omega_g, g_tilde, zeta)


def paper_shift(p: ModelParams) -> float:
    """Scalar added before taking the strong-coupling limits.

    ``g^2 / wc`` when C = 0, ``g~^2 / w(g)`` otherwise (the two agree at C = 0).
    """
    if p.C == 0:
        return p.g**2 / p.omega_c
    hb = hb_map(p)
    return hb.g_tilde**2 / hb.omega_g


def _linear(r: float, omega: float) -> float:
    return (1.0 - r) * omega


def _cosine(r: float, omega: float) -> float:
    return omega * math.cos(0.5 * math.pi * r)


def _quadratic(r: float, omega: float) -> float:
    return omega * (1.0 - r * r)


SCHEDULES: dict[str, Callable[[float, float], float]] = {
    "linear": _linear,
    "cosine": _cosine,
    "quadratic": _quadratic,
}

Schedule = Union[str, Callable[[float, float], float]]


@dataclass(frozen=True)
class RScheme:
    """``omega_a = w[r]``, ``omega_c = omega0``, ``g = r g0`` for r in [0, 1].

    ``schedule`` names an entry of :data:`SCHEDULES` or is a callable
    ``(r, omega0) -> w[r]``; either way it must hit ``omega0`` at r = 0 and 0
    at r = 1, which is checked on construction.
    """

    omega0: float
    g0: float
    C: float = 0.0
    schedule: Schedule = "linear"

    def __post_init__(self):
        if self.omega0 <= 0 or self.g0 <= 0 or self.C < 0:
            raise ValueError(f"need omega0 > 0, g0 > 0, C >= 0; got {self}")
        if isinstance(self.schedule, str) and self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}; known: {sorted(SCHEDULES)}")
        w0, w1 = self.omega_a(0.0), self.omega_a(1.0)
        if not math.isclose(w0, self.omega0, rel_tol=1e-12):
            raise ValueError(f"schedule must give w[0] = omega0 = {self.omega0}, got {w0}")
        if abs(w1) > 1e-12 * self.omega0:
            raise ValueError(f"schedule must give w[1] = 0, got {w1}")

    @property
    def schedule_name(self) -> str:
        return self.schedule if isinstance(self.schedule, str) else getattr(
            self.schedule, "__name__", "custom"
        )

    def omega_a(self, r: float) -> float:
        fn = SCHEDULES[self.schedule] if isinstance(self.schedule, str) else self.schedule
        return float(fn(r, self.omega0))

    def params(self, r: float) -> ModelParams:
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"r must lie in [0, 1], got {r}")
        # clamp rounding noise from the schedule at r = 1
        wa = max(self.omega_a(r), 0.0) if r < 1.0 else 0.0
        return ModelParams(wa, self.omega0, r * self.g0, self.C)

    def omega_tilde(self, r: float) -> float:
        return math.sqrt(self.omega0**2 + 4.0 * self.C * self.omega0 * (r * self.g0) ** 2)

    def g_tilde(self, r: float) -> float:
        return r * self.g0 * math.sqrt(self.omega0 / self.omega_tilde(r))

    def as_dict(self) -> dict:
        return {
            "omega0": self.omega0,
            "g0": self.g0,
            "C": self.C,
            "schedule": self.schedule_name,
        }


def build_hamiltonian(p: ModelParams, trunc: TruncLike) -> HermitianOperator:
    nb = fs.boson_identity(trunc)
    n = np.diag(nb).size - 1
    h = 0.5 * p.omega_a * fs.tensor(fs.pauli("z"), nb)
    h = h + p.omega_c * fs.tensor(fs.pauli("i"), fs.number(n) + 0.5 * nb)
    h = h + p.g * fs.tensor(fs.pauli("x"), fs.quadrature(n))
    if p.C:
        h = h + p.C * p.g**2 * fs.tensor(fs.pauli("i"), fs.quadrature_squared(n))
    return HermitianOperator(h)


def shifted_hamiltonian(p: ModelParams, trunc: TruncLike) -> HermitianOperator:
    h = np.asarray(build_hamiltonian(p, trunc))
    return HermitianOperator(h + paper_shift(p) * np.eye(h.shape[0]))


def build_polaron_unitary(beta: float, trunc: TruncLike) -> UnitaryOperator:
    """``U(beta) = [(s- - 1) s+ D(beta) + (s+ + 1) s- D(-beta)] / sqrt(2)``."""
    sp, sm, one = fs.pauli("plus"), fs.pauli("minus"), fs.pauli("i")
    d_plus = np.asarray(fs.displacement(beta, trunc))
    d_minus = np.asarray(fs.displacement(-beta, trunc))
    u = (fs.tensor((sm - one) @ sp, d_plus) + fs.tensor((sp + one) @ sm, d_minus)) / math.sqrt(2.0)
    n = d_plus.shape[0] - 1
    quarter = max(1, (n + 1) // 4)
    leak = float(max(np.max(np.abs(d_plus[n, :quarter])), np.max(np.abs(d_minus[n, :quarter]))))
    return UnitaryOperator(u, leakage=leak if n > 0 else 0.0)


def build_eq3_rhs(p: ModelParams, trunc: TruncLike) -> HermitianOperator:
    """``wc (a^dag a + 1/2) - (wa/2) [s+ D(beta)^2 + s- D(-beta)^2]``, beta = g/wc.

    ``D(beta)^2`` is built directly as ``D(2 beta)``.
    """
    if p.C != 0:
        raise ValueError("the polaron-frame identity is stated for C = 0 only")
    beta = p.g / p.omega_c
    nb = fs.boson_identity(trunc)
    n = nb.shape[0] - 1
    d2 = np.asarray(fs.displacement(2.0 * beta, trunc))
    d2m = np.asarray(fs.displacement(-2.0 * beta, trunc))
    h = p.omega_c * fs.tensor(fs.pauli("i"), fs.number(n) + 0.5 * nb)
    h = h - 0.5 * p.omega_a * (fs.tensor(fs.pauli("plus"), d2) + fs.tensor(fs.pauli("minus"), d2m))
    return HermitianOperator(h)


LIMIT_KINDS = ("strong_coupling_C0", "strong_coupling_Cpos", "r_scheme")
_KIND_ALIASES = {"eq4": "strong_coupling_C0", "eq5": "strong_coupling_Cpos", "eq6": "r_scheme"}


def _limit_kind(kind: str) -> str:
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in LIMIT_KINDS:
        raise ValueError(f"unknown limit kind {kind!r}; expected one of {LIMIT_KINDS}")
    return kind


def _limit_context(kind: str, omega, omega_g, omega_tilde) -> tuple[float, float]:
    """Return (ladder frequency, atomic splitting) for a limit kind."""
    if kind == "strong_coupling_C0":
        if omega is None or omega <= 0:
            raise ValueError("strong_coupling_C0 needs omega > 0")
        return omega, 0.0
    if kind == "strong_coupling_Cpos":
        if omega is None or omega_g is None or omega_g <= 0:
            raise ValueError("strong_coupling_Cpos needs omega and omega_g > 0")
        return omega_g, omega
    if omega_tilde is None or omega_tilde <= 0:
        raise ValueError("r_scheme needs omega_tilde > 0")
    return omega_tilde, 0.0


def build_limit_hamiltonian(
    kind: str,
    trunc: TruncLike,
    *,
    omega: float | None = None,
    omega_g: float | None = None,
    omega_tilde: float | None = None,
) -> HermitianOperator:
    """Limit Hamiltonian with its conjugating unitaries dropped.

    ``strong_coupling_C0``: ``omega (a^dag a + 1/2)``;
    ``strong_coupling_Cpos``: ``omega_g (a^dag a + 1/2) - (omega/2) sx``;
    ``r_scheme``: ``omega_tilde (a^dag a + 1/2)``.
    The aliases ``eq4``, ``eq5``, ``eq6`` are accepted.
    """
    kind = _limit_kind(kind)
    ladder, atom = _limit_context(kind, omega, omega_g, omega_tilde)
    nb = fs.boson_identity(trunc)
    n = nb.shape[0] - 1
    h = ladder * fs.tensor(fs.pauli("i"), fs.number(n) + 0.5 * nb)
    if atom:
        h = h - 0.5 * atom * fs.tensor(fs.pauli("x"), nb)
    return HermitianOperator(h)


def limit_levels(
    kind: str,
    k: int,
    *,
    omega: float | None = None,
    omega_g: float | None = None,
    omega_tilde: float | None = None,
) -> np.ndarray:
    """Closed-form lowest ``k`` eigenvalues of :func:`build_limit_hamiltonian`."""
    kind = _limit_kind(kind)
    ladder, atom = _limit_context(kind, omega, omega_g, omega_tilde)
    n = np.arange(k)
    e = np.concatenate([ladder * (n + 0.5) - 0.5 * atom, ladder * (n + 0.5) + 0.5 * atom])
    return np.sort(e)[:k]
