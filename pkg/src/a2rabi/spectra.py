"""Eigenvalues with parity labels, adaptive truncation and SUSY classification."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.linalg

from . import fockspace as fs
from . import model
from .fockspace import HermitianOperator, Truncation
from .model import ModelParams

__all__ = [
    "SpectrumError",
    "MixedParity",
    "UnconvergedSpectrum",
    "Level",
    "Spectrum",
    "SusyClass",
    "SusyReport",
    "diagonalize",
    "diagonalize_sectors",
    "label_parities",
    "classify_susy",
    "converge",
    "initial_n_max",
    "solve",
    "sector_oracle_gap",
    "sequence_eventually_nonincreasing",
    "PARITY_ATOL",
    "NO_GO_BAND",
]

PARITY_ATOL = 1e-6
NO_GO_BAND = 0.15
DEGENERACY_RTOL = 1e-6


class SpectrumError(RuntimeError):
    """The dense eigensolver failed or returned non-finite values."""


class MixedParity(SpectrumError):
    """An eigenvector could not be given a definite parity."""


class UnconvergedSpectrum(ValueError):
    """Classification was requested on a spectrum that did not converge."""


class Level(NamedTuple):
    energy: float
    parity: int


@dataclass(frozen=True)
class Spectrum:
    levels: tuple[Level, ...]
    n_max_used: int
    converged: bool = True
    max_level_shift_on_last_doubling: float = float("nan")

    @property
    def energies(self) -> np.ndarray:
        return np.array([lv.energy for lv in self.levels])

    @property
    def parities(self) -> np.ndarray:
        return np.array([lv.parity for lv in self.levels], dtype=int)

    def __len__(self) -> int:
        return len(self.levels)

    def sector(self, parity: int) -> np.ndarray:
        """Energies of one parity sector, ascending."""
        return np.array([lv.energy for lv in self.levels if lv.parity == parity])


class SusyClass(str, Enum):
    UNBROKEN = "unbroken"
    SPONTANEOUSLY_BROKEN = "spontaneously_broken"
    CRUSHED_NO_GO = "crushed_no_go"


@dataclass(frozen=True)
class SusyReport:
    ground_energy: float
    ground_degenerate: bool
    ground_pair_splitting: float
    gap_above_ground: float
    classification: SusyClass
    tolerance_used: float

    def as_dict(self) -> dict:
        return {
            "classification": self.classification.value,
            "ground_energy": self.ground_energy,
            "ground_degenerate": self.ground_degenerate,
            "splitting": self.ground_pair_splitting,
            "gap_above_ground": self.gap_above_ground,
            "tolerance": self.tolerance_used,
        }


def _eigh(m: np.ndarray, k: int, vectors: bool):
    k = min(k, m.shape[0])
    try:
        out = scipy.linalg.eigh(m, subset_by_index=[0, k - 1], eigvals_only=not vectors)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectrumError(f"dense eigensolver failed on a {m.shape[0]}x{m.shape[0]} matrix") from exc
    w = out[0] if vectors else out
    if not np.all(np.isfinite(w)):
        raise SpectrumError("eigensolver returned non-finite eigenvalues")
    return out


def diagonalize(h, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowest ``k`` eigenpairs of a dense Hermitian matrix (ascending)."""
    m = np.asarray(h)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return _eigh(m, k, vectors=True)


def diagonalize_sectors(h, signs: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowest ``k`` eigenvalues with exact parity, one parity block at a time.

    ``signs`` is the diagonal of the parity operator.  Returns energies and
    parities sorted by (energy, -parity).
    """
    m = np.asarray(h)
    signs = np.asarray(signs)
    energies, labels = [], []
    for sgn in (1, -1):
        idx = np.flatnonzero(signs == sgn)
        if idx.size == 0:
            continue
        w = _eigh(m[np.ix_(idx, idx)], k, vectors=False)
        energies.append(w)
        labels.append(np.full(w.size, sgn))
    e = np.concatenate(energies)
    p = np.concatenate(labels)
    order = np.lexsort((-p, e))[:k]
    return e[order], p[order]


def _clusters(e: np.ndarray, tol: float) -> list[np.ndarray]:
    groups, start = [], 0
    for i in range(1, e.size + 1):
        if i == e.size or e[i] - e[i - 1] > tol:
            groups.append(np.arange(start, i))
            start = i
    return groups


def label_parities(
    energies: np.ndarray,
    vectors: np.ndarray,
    parity_op,
    *,
    n_max_used: int = 0,
    cluster_tol: float | None = None,
) -> Spectrum:
    """Attach parity labels to eigenpairs from a full-space diagonalisation.

    Inside every (near-)degenerate cluster the parity operator is diagonalised
    in the cluster span first, so degenerate opposite-parity pairs come out
    pure.  Raises :class:`MixedParity` if any label is not within
    ``PARITY_ATOL`` of +-1 afterwards.
    """
    e = np.asarray(energies, dtype=float)
    v = np.asarray(vectors)
    pi = np.asarray(parity_op)
    if cluster_tol is None:
        cluster_tol = 1e-8 * max(1.0, float(np.max(np.abs(e))) if e.size else 1.0)
    expect = np.empty(e.size)
    for grp in _clusters(e, cluster_tol):
        sub = v[:, grp]
        if grp.size > 1:
            _, rot = np.linalg.eigh(sub.conj().T @ pi @ sub)
            sub = sub @ rot
        expect[grp] = np.real(np.einsum("ij,ik,kj->j", sub.conj(), pi, sub))
    bad = np.abs(np.abs(expect) - 1.0) > PARITY_ATOL
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise MixedParity(f"level {i} at E={e[i]:.10g} has <parity> = {expect[i]:.3e}")
    signs = np.where(expect > 0, 1, -1)
    order = np.lexsort((-signs, e))
    levels = tuple(Level(float(e[i]), int(signs[i])) for i in order)
    return Spectrum(levels, n_max_used)


def classify_susy(
    spec: Spectrum,
    tol: float | None = None,
    *,
    omega: float | None = None,
    omega_ladder: float | None = None,
    band: float = NO_GO_BAND,
) -> SusyReport:
    """Classify the ground-state structure of a converged spectrum.

    * ``spontaneously_broken``: ground pair split by less than ``tol``, with
      opposite parities and positive energy.
    * ``crushed_no_go``: unique positive ground whose parity partner sits
      ``omega`` above it (within ``band``) while the ladder spacing tracks
      ``omega_ladder``, itself clearly above ``omega``.  Only tested when both
      frequencies are given.
    * ``unbroken``: any other unique ground.

    ``tol`` defaults to ``1e-6 * omega``.
    """
    if not spec.converged:
        raise UnconvergedSpectrum("refusing to classify an unconverged spectrum")
    if len(spec) < 3:
        raise ValueError("need at least 3 levels to classify")
    if tol is None:
        if omega is None:
            raise ValueError("give either tol or omega")
        tol = DEGENERACY_RTOL * omega
    e, p = spec.energies, spec.parities
    splitting = float(e[1] - e[0])
    degenerate = splitting < tol
    if degenerate:
        above = e[e - e[0] >= tol]
        gap = float(above[0] - e[0]) if above.size else float("nan")
    else:
        gap = splitting

    if degenerate:
        if p[0] == p[1] or e[0] <= tol:
            raise ValueError(
                f"degenerate ground pair without the broken-SUSY signature "
                f"(parities {p[0]}, {p[1]}; E0 = {e[0]:.6g})"
            )
        cls = SusyClass.SPONTANEOUSLY_BROKEN
    elif (
        omega is not None
        and omega_ladder is not None
        and omega_ladder > (1.0 + band) * omega
        and e[0] > tol
        and p[0] != p[1]
        and abs(splitting / omega - 1.0) <= band
        and abs((e[2] - e[0]) / omega_ladder - 1.0) <= band
    ):
        cls = SusyClass.CRUSHED_NO_GO
    else:
        cls = SusyClass.UNBROKEN
    return SusyReport(float(e[0]), bool(degenerate), splitting, gap, cls, float(tol))


def _scale(e: np.ndarray) -> float:
    return max(float(np.max(np.abs(e))), np.finfo(float).tiny)


def converge(
    builder: Callable[[int], HermitianOperator],
    trunc: Truncation,
    k: int,
) -> Spectrum:
    """Grow ``n_max`` by doubling until the lowest ``k`` levels settle.

    Each step compares the lowest ``k`` eigenvalues at ``n`` and ``2n``; the
    shift is ``max|dE| / max|E|``.  When it drops below ``trunc.rel_tol`` the
    spectrum at ``n`` is returned, so the reported levels are exactly the ones
    that survived a doubling.  If ``max_doublings`` is exhausted the last
    spectrum is returned with ``converged=False``.
    """
    n = trunc.n_max
    e, p = diagonalize_sectors(builder(n), fs.parity_signs(n), k)
    shift = float("nan")
    for _ in range(trunc.max_doublings):
        e2, p2 = diagonalize_sectors(builder(2 * n), fs.parity_signs(2 * n), k)
        m = min(e.size, e2.size)
        shift = float(np.max(np.abs(e2[:m] - e[:m]))) / _scale(e2[:m])
        if e.size == k and shift < trunc.rel_tol:
            return _spectrum(e, p, n, True, shift)
        n, e, p = 2 * n, e2, p2
    return _spectrum(e, p, n, False, shift)


def _spectrum(e, p, n, converged, shift) -> Spectrum:
    levels = tuple(Level(float(x), int(s)) for x, s in zip(e, p))
    return Spectrum(levels, n, converged, shift)


def initial_n_max(p: ModelParams) -> int:
    """Starting cutoff: displaced-vacuum occupation plus a squeezing allowance."""
    hb = model.hb_map(p)
    beta = hb.g_tilde / hb.omega_g
    zeta_factor = math.expm1(2.0 * abs(hb.zeta))
    return int(math.ceil(4.0 * beta**2 + 8.0 * zeta_factor + 40.0))


def solve(
    p: ModelParams,
    k: int = 8,
    *,
    shift: bool = False,
    trunc: Truncation | None = None,
) -> Spectrum:
    """Converged lowest ``k`` levels of ``H(p)`` (plus the limit shift if asked)."""
    if trunc is None:
        trunc = Truncation(initial_n_max(p))
    build = model.shifted_hamiltonian if shift else model.build_hamiltonian
    return converge(lambda n: build(p, n), trunc, k)


def sector_oracle_gap(h, signs: np.ndarray, k: int) -> float:
    """Max difference between full and block-wise lowest-``k`` eigenvalues."""
    full = _eigh(np.asarray(h), k, vectors=False)
    blocks, _ = diagonalize_sectors(h, signs, k)
    return float(np.max(np.abs(full - blocks)))


def sequence_eventually_nonincreasing(values: Sequence[float], slack: float = 0.0) -> bool:
    """True if the last third (at least two points) never increases by more than ``slack``."""
    v = np.asarray(values, dtype=float)
    tail = v[-max(2, math.ceil(v.size / 3)):]
    return bool(np.all(np.diff(tail) <= slack))
