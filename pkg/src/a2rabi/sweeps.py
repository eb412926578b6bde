"""Level-vs-parameter sweeps over the coupling g and the r-scheme parameter r."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from . import __version__, model
from .fockspace import Truncation
from .model import ModelParams, RScheme
from .spectra import Spectrum, converge, initial_n_max

__all__ = [
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "PRESETS",
    "OMEGA_FIG",
    "C_FIG",
    "grid_presets",
    "point_params",
    "sweep_g",
    "sweep_r",
    "run_sweep",
    "SCHEMA",
]

SCHEMA = "a2rabi.sweep/1"
OMEGA_FIG = 6.2832
C_FIG = 0.3770


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep.

    For ``axis='g'`` the base is a :class:`ModelParams` whose ``g`` is
    replaced point by point; for ``axis='r'`` it is an :class:`RScheme`.
    ``trunc=None`` picks a starting cutoff per point from the parameters.
    """

    axis: str
    grid: tuple[float, ...]
    base: Union[ModelParams, RScheme]
    levels: int = 8
    shift_mode: str = "paper_shift"
    trunc: Truncation | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(x) for x in self.grid))
        if self.axis not in ("g", "r"):
            raise ValueError(f"axis must be 'g' or 'r', got {self.axis!r}")
        if self.shift_mode not in ("none", "paper_shift"):
            raise ValueError(f"shift_mode must be 'none' or 'paper_shift', got {self.shift_mode!r}")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        g = np.asarray(self.grid)
        if g.size == 0 or np.any(np.diff(g) <= 0):
            raise ValueError("grid must be non-empty and strictly increasing")
        if self.axis == "g":
            if not isinstance(self.base, ModelParams):
                raise TypeError("a g-sweep needs ModelParams as base")
            if g[0] < 0:
                raise ValueError("g-grid must be >= 0")
        else:
            if not isinstance(self.base, RScheme):
                raise TypeError("an r-sweep needs an RScheme as base")
            if g[0] < 0 or g[-1] > 1:
                raise ValueError("r-grid must lie in [0, 1]")

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "axis": self.axis,
            "grid": list(self.grid),
            "base": self.base.as_dict(),
            "levels": self.levels,
            "shift_mode": self.shift_mode,
            "trunc": None if self.trunc is None else {
                "n_max": self.trunc.n_max,
                "rel_tol": self.trunc.rel_tol,
                "max_doublings": self.trunc.max_doublings,
            },
        }


class SweepRow(NamedTuple):
    axis_value: float
    level_index: int
    energy: float
    parity: int
    n_max_used: int
    converged: bool


@dataclass(frozen=True)
class SweepResult:
    """Rows sorted by (axis value, energy).

    ``level_index`` counts within the row's parity sector, so a curve is the
    set of rows sharing ``(parity, level_index)``.  ``asymptotes`` pairs the
    global energy rank at the last grid point with the limit-Hamiltonian level.
    """

    spec: SweepSpec
    rows: tuple[SweepRow, ...]
    asymptotes: tuple[tuple[int, float], ...]
    spectra: tuple[Spectrum, ...] = field(repr=False, default=())

    @property
    def metadata(self) -> dict:
        return {
            "schema": SCHEMA,
            "code_version": __version__,
            "spec": self.spec.as_dict(),
            "asymptotes": [{"level_index": i, "limit_energy": e} for i, e in self.asymptotes],
            "grid_note": "grid range and density are chosen here; the source figures give no numeric axes",
        }

    def at(self, axis_value: float) -> list[SweepRow]:
        return [r for r in self.rows if r.axis_value == axis_value]

    @property
    def all_failed(self) -> bool:
        return not any(r.converged for r in self.rows)


def point_params(spec: SweepSpec, x: float) -> ModelParams:
    if spec.axis == "g":
        b = spec.base
        return ModelParams(b.omega_a, b.omega_c, x, b.C)
    return spec.base.params(x)


def _solve_point(spec: SweepSpec, x: float) -> Spectrum:
    p = point_params(spec, x)
    trunc = spec.trunc or Truncation(initial_n_max(p))
    build = model.shifted_hamiltonian if spec.shift_mode == "paper_shift" else model.build_hamiltonian
    return converge(lambda n: build(p, n), trunc, spec.levels)


def _rows(x: float, s: Spectrum) -> list[SweepRow]:
    rows, seen = [], {1: 0, -1: 0}
    for lv in s.levels:
        rows.append(SweepRow(x, seen[lv.parity], lv.energy, lv.parity, s.n_max_used, s.converged))
        seen[lv.parity] += 1
    return rows


def _asymptotes(spec: SweepSpec) -> tuple[tuple[int, float], ...]:
    k = spec.levels
    if spec.axis == "g":
        p = point_params(spec, spec.grid[-1])
        omega = p.omega_c
        if p.C == 0:
            e = model.limit_levels("strong_coupling_C0", k, omega=omega)
        else:
            e = model.limit_levels(
                "strong_coupling_Cpos", k, omega=p.omega_a, omega_g=model.hb_map(p).omega_g
            )
    else:
        e = model.limit_levels("r_scheme", k, omega_tilde=spec.base.omega_tilde(1.0))
    if spec.shift_mode == "none":
        p = point_params(spec, spec.grid[-1] if spec.axis == "g" else 1.0)
        e = e - model.paper_shift(p)
    return tuple((i, float(v)) for i, v in enumerate(e))


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Solve every grid point; ``jobs > 1`` uses a bounded thread pool.

    Results are assembled by grid index, so the output does not depend on
    ``jobs``.
    """
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    if jobs == 1:
        spectra = [_solve_point(spec, x) for x in spec.grid]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            spectra = list(pool.map(lambda x: _solve_point(spec, x), spec.grid))
    rows = []
    for x, s in zip(spec.grid, spectra):
        rows.extend(_rows(x, s))
    return SweepResult(spec, tuple(rows), _asymptotes(spec), tuple(spectra))


def sweep_g(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    if spec.axis != "g":
        raise ValueError("sweep_g needs axis='g'")
    return run_sweep(spec, jobs)


def sweep_r(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    if spec.axis != "r":
        raise ValueError("sweep_r needs axis='r'")
    return run_sweep(spec, jobs)


def _g_grid(omega: float, points: int = 81) -> tuple[float, ...]:
    return tuple(np.linspace(0.0, 4.0 * omega, points))


def _r_grid(points: int = 51) -> tuple[float, ...]:
    return tuple(np.linspace(0.0, 1.0, points))


PRESETS = {
    "fig1a": "g-sweep, omega_a = omega_c = 6.2832, C = 0, g in [0, 4 omega] (81 points)",
    "fig1b": "g-sweep, omega_a = omega_c = 6.2832, C = 0.3770, g in [0, 4 omega] (81 points)",
    "fig2a": "r-sweep, omega = g0 = 6.2832, C = 0, linear w[r], r in [0, 1] (51 points)",
    "fig2b": "r-sweep, omega = g0 = 6.2832, C = 0.3770, linear w[r], r in [0, 1] (51 points)",
}


def grid_presets(name: str, levels: int = 8) -> SweepSpec:
    """Canned sweeps for the four published spectrum panels."""
    w = OMEGA_FIG
    if name == "fig1a":
        return SweepSpec("g", _g_grid(w), ModelParams.symmetric(w, 0.0, 0.0), levels, name=name)
    if name == "fig1b":
        return SweepSpec("g", _g_grid(w), ModelParams.symmetric(w, 0.0, C_FIG), levels, name=name)
    if name == "fig2a":
        return SweepSpec("r", _r_grid(), RScheme(w, w, 0.0), levels, name=name)
    if name == "fig2b":
        return SweepSpec("r", _r_grid(), RScheme(w, w, C_FIG), levels, name=name)
    raise ValueError(f"unknown preset {name!r}; known: {sorted(PRESETS)}")


def parse_grid(text: str) -> tuple[float, ...]:
    """``start:step:stop`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid range must be start:step:stop, got {text!r}")
        start, step, stop = (float(x) for x in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad grid range {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(n))
    return tuple(float(x) for x in text.split(",") if x.strip())
