"""Command-line front end: ``spectrum``, ``sweep``, ``verify``, ``presets``.

Exit codes: 0 ok, 2 usage error, 3 unconverged result, 4 verification breach.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import __version__, model, spectra, sweeps, verify
from .fockspace import Truncation
from .model import ModelParams, RScheme

log = logging.getLogger("a2rabi")

EXIT_OK, EXIT_USAGE, EXIT_UNCONVERGED, EXIT_BREACH = 0, 2, 3, 4
SPECTRUM_SCHEMA = "a2rabi.spectrum/1"
VERIFY_SCHEMA = "a2rabi.verify/1"
CSV_COLUMNS = ("axis_name", "axis_value", "level_index", "energy", "parity", "n_max_used", "converged")


def _e(x: float) -> float:
    """Round to the 12 significant digits used in every artifact."""
    return float(f"{x:.12g}")


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--omega", type=float, help="sets omega_a = omega_c")
    g.add_argument("--omega-a", type=float)
    g.add_argument("--omega-c", type=float)
    g.add_argument("--g", type=float)
    g.add_argument("--C", type=float, dest="C")


def _add_trunc_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("truncation")
    g.add_argument("--n-max", type=int, help="starting Fock cutoff (default: from parameters)")
    g.add_argument("--rel-tol", type=float, default=1e-10)
    g.add_argument("--max-doublings", type=int, default=4)


def _params(args, defaults: tuple[float, float, float, float]) -> ModelParams:
    wa, wc, g, c = defaults
    if args.omega is not None:
        wa = wc = args.omega
    wa = args.omega_a if args.omega_a is not None else wa
    wc = args.omega_c if args.omega_c is not None else wc
    g = args.g if args.g is not None else g
    c = args.C if args.C is not None else c
    return ModelParams(wa, wc, g, c)


def _trunc(args, p: ModelParams | None = None) -> Truncation | None:
    n = args.n_max
    if n is None:
        if p is None:
            if args.rel_tol == 1e-10 and args.max_doublings == 4:
                return None
            raise argparse.ArgumentTypeError("--rel-tol/--max-doublings need --n-max here")
        n = spectra.initial_n_max(p)
    return Truncation(n, args.rel_tol, args.max_doublings)


def _trunc_dict(t: Truncation | None) -> dict | None:
    if t is None:
        return None
    return {"n_max": t.n_max, "rel_tol": t.rel_tol, "max_doublings": t.max_doublings}


def cmd_spectrum(args) -> int:
    p = _params(args, (1.0, 1.0, 0.0, 0.0))
    trunc = _trunc(args, p)
    shift = args.shift == "paper"
    s = spectra.solve(p, args.k, shift=shift, trunc=trunc)
    hb = model.hb_map(p)
    doc = {
        "schema": SPECTRUM_SCHEMA,
        "code_version": __version__,
        "params": p.as_dict(),
        "shift": args.shift,
        "shift_value": model.paper_shift(p) if shift else 0.0,
        "truncation": _trunc_dict(trunc),
        "levels": [{"energy": _e(lv.energy), "parity": lv.parity} for lv in s.levels],
        "n_max_used": s.n_max_used,
        "converged": s.converged,
        "max_level_shift_on_last_doubling": s.max_level_shift_on_last_doubling,
        "susy": None,
    }
    if s.converged and len(s) >= 3:
        try:
            rep = spectra.classify_susy(
                s,
                spectra.DEGENERACY_RTOL * p.omega_c,
                omega=p.omega_a or None,
                omega_ladder=hb.omega_g,
            )
            doc["susy"] = rep.as_dict()
        except ValueError as exc:
            doc["susy"] = {"classification": None, "error": str(exc)}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("level_index", "energy", "parity"))
        for i, lv in enumerate(s.levels):
            w.writerow((i, f"{lv.energy:.12g}", lv.parity))
        _write(buf.getvalue(), args.out)
    else:
        _write(_dump(doc), args.out)
    if not s.converged:
        log.warning("spectrum not converged after %d doublings", trunc.max_doublings)
        return EXIT_UNCONVERGED
    return EXIT_OK


def _sweep_spec(args) -> sweeps.SweepSpec:
    shift_mode = "paper_shift" if args.shift == "paper" else "none"
    if args.preset:
        spec = sweeps.grid_presets(args.preset, args.levels)
        trunc = _trunc(args)
        return sweeps.SweepSpec(
            spec.axis, spec.grid, spec.base, spec.levels, shift_mode, trunc, spec.name
        )
    if not args.axis or not args.grid:
        raise argparse.ArgumentTypeError("give --preset, or both --axis and --grid")
    grid = sweeps.parse_grid(args.grid)
    omega = args.omega if args.omega is not None else sweeps.OMEGA_FIG
    c = args.C if args.C is not None else 0.0
    if args.axis == "g":
        wa = args.omega_a if args.omega_a is not None else omega
        wc = args.omega_c if args.omega_c is not None else omega
        base = ModelParams(wa, wc, 0.0, c)
    else:
        g0 = args.g0 if args.g0 is not None else omega
        base = RScheme(omega, g0, c, args.schedule)
    return sweeps.SweepSpec(args.axis, grid, base, args.levels, shift_mode, _trunc(args), "explicit")


def _sweep_csv(res: sweeps.SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in res.rows:
        w.writerow((
            res.spec.axis,
            f"{r.axis_value:.12g}",
            r.level_index,
            f"{r.energy:.12g}",
            r.parity,
            r.n_max_used,
            "true" if r.converged else "false",
        ))
    return buf.getvalue()


def cmd_sweep(args) -> int:
    spec = _sweep_spec(args)
    res = sweeps.run_sweep(spec, jobs=args.jobs)
    meta = dict(res.metadata, csv_columns=list(CSV_COLUMNS))
    out = args.out or f"{spec.name or 'sweep'}.{args.format}"
    if args.format == "csv":
        _write(_sweep_csv(res), out)
        if out != "-":
            Path(out).with_suffix(".json").write_text(_dump(meta))
    else:
        doc = dict(meta, rows=[
            {
                "axis_value": r.axis_value,
                "level_index": r.level_index,
                "energy": _e(r.energy),
                "parity": r.parity,
                "n_max_used": r.n_max_used,
                "converged": r.converged,
            }
            for r in res.rows
        ])
        _write(_dump(doc), out)
    failed = sum(not s.converged for s in res.spectra)
    if failed:
        log.warning("%d of %d grid points did not converge", failed, len(res.spectra))
    return EXIT_UNCONVERGED if res.all_failed else EXIT_OK


def _floats(text: str | None) -> list[float] | None:
    if text is None:
        return None
    return list(sweeps.parse_grid(text))


def _verify_reports(args) -> list[dict]:
    w = sweeps.OMEGA_FIG
    reports = []
    suites = ("eq2", "eq3", "limits") if args.suite == "all" else (args.suite,)
    if "eq2" in suites:
        p = _params(args, (w, w, w, sweeps.C_FIG))
        reports.append(verify.eq2_spectrum_equivalence(p, args.k or 6, _trunc(args, p)).as_dict())
        reports.append(verify.eq2_squeeze_conjugation(p).as_dict())
    if "eq3" in suites:
        p = _params(args, (1.0, 1.0, 1.0, 0.0))
        n = args.n_max or 200
        first = verify.eq3_residual(p, args.k_subspace, n)
        doubled = verify.eq3_residual(p, args.k_subspace, 2 * n)
        d = first.as_dict()
        d["residual_doubled"] = doubled.residual
        d["decreases_on_doubling"] = doubled.residual <= max(first.residual, verify.EQ3_NOISE)
        d["passed"] = bool(first.passed and d["decreases_on_doubling"])
        reports.append(d)
    if "limits" in suites:
        omega = args.omega if args.omega is not None else w
        kinds = (args.kind,) if args.kind else ("eq4", "eq5", "eq6")
        for kind in kinds:
            axis = _floats(args.axis_values)
            if kind == "eq6":
                c = args.C if args.C is not None else sweeps.C_FIG
                axis = axis or [0.9, 0.99, 1.0]
                rep = verify.limit_convergence_monitor(
                    kind, axis, omega=omega, C=c, g0=args.g0, schedule=args.schedule, k=args.k or 8
                )
            else:
                c = 0.0 if kind == "eq4" else (args.C if args.C else sweeps.C_FIG)
                axis = axis or [m * omega for m in (1, 2, 3, 4)]
                rep = verify.limit_convergence_monitor(kind, axis, omega=omega, C=c, k=args.k or 8)
            reports.append(rep.as_dict())
    return reports


def cmd_verify(args) -> int:
    reports = _verify_reports(args)
    ok = all(r["passed"] for r in reports)
    doc = {"schema": VERIFY_SCHEMA, "code_version": __version__, "suite": args.suite,
           "passed": ok, "reports": reports}
    _write(_dump(doc), args.out)
    for r in reports:
        log.info("%-12s %s", r.get("kind", r["oracle"]), "ok" if r["passed"] else "BREACH")
    return EXIT_OK if ok else EXIT_BREACH


def cmd_presets(args) -> int:
    doc = {}
    for name, desc in sweeps.PRESETS.items():
        spec = sweeps.grid_presets(name)
        doc[name] = {"description": desc, **spec.as_dict()}
        doc[name]["grid"] = {"start": spec.grid[0], "stop": spec.grid[-1], "points": len(spec.grid)}
    _write(_dump(doc), args.out)
    return EXIT_OK


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="a2rabi", description="Spectra of the quantum Rabi model with an A^2 term."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="key = value file; command-line flags override it")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    sp = sub.add_parser("spectrum", help="levels and SUSY status at one parameter point")
    _add_model_flags(sp)
    _add_trunc_flags(sp)
    sp.add_argument("-k", type=int, default=8, help="number of levels")
    sp.add_argument("--shift", choices=("none", "paper"), default="none")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_spectrum)
    subs["spectrum"] = sp

    sw = sub.add_parser("sweep", help="levels along a g- or r-grid")
    sw.add_argument("--preset", choices=sorted(sweeps.PRESETS))
    sw.add_argument("--axis", choices=("g", "r"))
    sw.add_argument("--grid", help="start:step:stop (inclusive) or comma list")
    _add_model_flags(sw)
    sw.add_argument("--g0", type=float)
    sw.add_argument("--schedule", choices=sorted(model.SCHEDULES), default="linear")
    _add_trunc_flags(sw)
    sw.add_argument("-k", "--levels", type=int, default=8)
    sw.add_argument("--shift", choices=("none", "paper"), default="paper")
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--out", help="output path (default <preset>.csv); metadata goes next to it as .json")
    sw.set_defaults(func=cmd_sweep)
    subs["sweep"] = sw

    vf = sub.add_parser("verify", help="run the numerical oracles")
    vf.add_argument("--suite", choices=("eq2", "eq3", "limits", "all"), default="all")
    vf.add_argument("--kind", choices=("eq4", "eq5", "eq6"))
    _add_model_flags(vf)
    vf.add_argument("--g0", type=float)
    vf.add_argument("--schedule", choices=sorted(model.SCHEDULES), default="linear")
    _add_trunc_flags(vf)
    vf.add_argument("-k", type=int)
    vf.add_argument("--k-subspace", type=int, default=40)
    vf.add_argument("--axis-values", help="limit-monitor axis: comma list or start:step:stop")
    vf.add_argument("--out", default="-")
    vf.set_defaults(func=cmd_verify)
    subs["verify"] = vf

    pr = sub.add_parser("presets", help="list the canned figure sweeps")
    pr.add_argument("--out", default="-")
    pr.set_defaults(func=cmd_presets)
    subs["presets"] = pr
    return parser, subs


def read_config(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes map to underscores."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(parser, subs, argv) -> argparse.Namespace:
    pre, _ = parser.parse_known_args(argv)
    if not pre.config:
        return parser.parse_args(argv)
    try:
        cfg = read_config(pre.config)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    sp = subs[pre.command]
    actions = {a.dest: a for a in sp._actions}
    defaults = {}
    for key, value in cfg.items():
        act = actions.get(key)
        if act is None or key in ("help", "func"):
            parser.error(f"config key {key!r} is not an option of {pre.command!r}")
        try:
            defaults[key] = act.type(value) if act.type else value
        except (TypeError, ValueError):
            parser.error(f"config key {key!r}: bad value {value!r}")
        if act.choices is not None and defaults[key] not in act.choices:
            parser.error(f"config key {key!r}: {value!r} not in {list(act.choices)}")
    sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    parser, subs = build_parser()
    args = _apply_config(parser, subs, argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        parser.error(str(exc))
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
