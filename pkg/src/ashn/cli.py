"""Command-line front end.

Subcommands: ``compile``, ``table``, ``avgtime``, ``synth``, ``verify-suite``
and ``kak``.  Results go to stdout as JSON lines or CSV; diagnostics go to
stderr.  Exit codes: 0 ok, 1 verification failure, 2 usage or domain error,
3 numeric failure.  ``ASHN_TOL`` (JSON object) overrides tolerance fields.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from typing import Sequence

import numpy as np

from . import compiler as ac
from . import synthesis, weyl
from .config import Tolerances
from .errors import AshnError, NumericError, PreconditionError

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

RECORD_FIELDS = ("x", "y", "z", "g", "h", "sector", "tau", "A1", "A2", "two_delta", "coord_error")


class _Usage(PreconditionError):
    pass


def _num(v: float) -> str:
    """Shortest round-trip decimal."""
    return repr(float(v))


def _sig4(v: float) -> str:
    v = float(v)
    if abs(v) < 5e-13:
        return "0"
    return f"{v:.4g}"


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise _Usage(f"expected a comma-separated list of numbers, got {text!r}") from exc


def read_matrix(path: str) -> np.ndarray:
    """Reads the plain-text matrix format: ``dim`` then ``dim^2`` lines ``re im``."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    except OSError as exc:
        raise _Usage(f"cannot read matrix file {path!r}: {exc}") from exc
    if not lines:
        raise _Usage(f"matrix file {path!r} is empty")
    try:
        dim = int(lines[0])
    except ValueError as exc:
        raise _Usage(f"first line of {path!r} must be the dimension") from exc
    if dim < 1 or len(lines) != 1 + dim * dim:
        raise _Usage(f"matrix file {path!r} needs {dim * dim} entries after the dimension, got {len(lines) - 1}")
    vals = np.empty(dim * dim, dtype=complex)
    for i, ln in enumerate(lines[1:]):
        parts = ln.split()
        if len(parts) != 2:
            raise _Usage(f"line {i + 2} of {path!r} must be 're im'")
        try:
            vals[i] = complex(float(parts[0]), float(parts[1]))
        except ValueError as exc:
            raise _Usage(f"line {i + 2} of {path!r} is not numeric") from exc
    return vals.reshape(dim, dim)


def write_matrix(path: str, m: np.ndarray) -> None:
    m = np.asarray(m, dtype=complex)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{m.shape[0]}\n")
        for v in m.ravel():
            fh.write(f"{_num(v.real)} {_num(v.imag)}\n")


def _emit_csv(out, header: Sequence[str], rows) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=False, allow_nan=True)


def _complex_matrix(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m)]


# ---------------------------------------------------------------------------
# compile


def pulse_record(point, c: ac.Couplings, params: ac.PulseParams, sector: ac.Sector, coord_error: float | None) -> dict:
    p = weyl.canonicalize(point)
    rec = {
        "x": p.x,
        "y": p.y,
        "z": p.z,
        "g": c.g,
        "h": c.h,
        "sector": sector.value,
        "tau": params.tau,
        # + 0.0 folds negative zero
        "A1": params.a1 + 0.0,
        "A2": params.a2 + 0.0,
        "two_delta": params.two_delta + 0.0,
    }
    if coord_error is not None:
        rec["coord_error"] = coord_error
    return rec


def cmd_compile(args, tol: Tolerances, out) -> int:
    if args.matrix is not None:
        if any(v is not None for v in (args.x, args.y, args.z)):
            raise _Usage("give either --x/--y/--z or --matrix, not both")
        m = read_matrix(args.matrix)
        if m.shape != (4, 4):
            raise _Usage(f"compile needs a 4x4 matrix, got {m.shape[0]}x{m.shape[1]}")
        point = weyl.interaction_coefficients(m, tol)
    else:
        if any(v is None for v in (args.x, args.y, args.z)):
            raise _Usage("compile needs --x, --y and --z (or --matrix)")
        point = [args.x, args.y, args.z]
        if args.degrees:
            point = [math.radians(v) for v in point]
    c = ac.Couplings(args.g, args.h)
    cfg = ac.default_cutoff(c) if args.r is None else ac.CutoffConfig(args.r)
    params, sector = ac.compile(point, c, cfg, tol)
    err = ac.verify(point, params, c, tol) if args.verify else None
    rec = pulse_record(point, c, params, sector, err)
    if args.csv:
        keys = [k for k in RECORD_FIELDS if k in rec]
        _emit_csv(out, keys, [[rec[k] if isinstance(rec[k], str) else _num(rec[k]) for k in keys]])
    else:
        out.write(_json(rec) + "\n")
    if err is not None and err > tol.round_trip:
        print(f"verification failed: coordinate error {err:.3e} > {tol.round_trip:.1e}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# table


def cmd_table(args, tol: Tolerances, out) -> int:
    c = ac.Couplings(args.g, args.h)
    rows = []
    for cls in ac.GateClass:
        p, _ = ac.special_gate(cls, c, tol)
        vals = (p.tau, p.a1, p.a2, p.two_delta)
        vals = tuple(0.0 if abs(v) < 5e-13 else v for v in vals)
        rows.append([cls.value, *(_num(v) for v in vals), " ".join(_sig4(v) for v in vals)])
    _emit_csv(out, ("class", "tau", "A1", "A2", "two_delta", "display_4sf"), rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# avgtime


def cmd_avgtime(args, tol: Tolerances, out) -> int:
    grid = _floats(args.r_grid)
    if args.samples < 1:
        raise _Usage("--samples must be positive")
    for r in grid:
        ac.CutoffConfig(r).check(ac.Couplings())
    pts = weyl.sample_weyl(args.seed, args.samples, tol)
    rows = []
    for r in grid:
        mc = float(np.mean(ac.gate_time_array(pts, 0.0, r, tol)))
        rows.append([_num(r), _num(mc), _num(ac.avg_gate_time_closed(r)), _num(ac.amplitude_bound(r))])
    _emit_csv(out, ("r", "mc_mean", "closed_form", "max_bound"), rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# synth


def synth_report(n: int, seed: int, tol: Tolerances, with_runtime: bool = False) -> dict:
    if n not in (3, 4):
        raise _Usage(f"synth supports --n 3 or 4, got {n}")
    u = weyl.haar_su(2**n, seed)
    t0 = time.perf_counter()
    circ = synthesis.synthn(u, tol)
    ms = (time.perf_counter() - t0) * 1e3
    rep = {"n": n, "seed": seed, "gate_count": circ.two_qubit_count, "bound": synthesis.count_bound(n), "dist": circ.dist}
    if with_runtime:
        rep["runtime_ms"] = ms
    return rep


def cmd_synth(args, tol: Tolerances, out) -> int:
    rep = synth_report(args.n, args.seed, tol, args.report)
    out.write(_json(rep) + "\n")
    if rep["gate_count"] > rep["bound"] or rep["dist"] > 1e-6:
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify-suite


def run_verify_suite(samples: int, seed: int, h_list, r_list, tol: Tolerances, perturb: float = 0.0) -> dict:
    """Compile, evolve and re-extract coordinates over a grid of couplings.

    A requested cutoff above ``(1-|h|)pi/2`` is clamped to that maximum and
    the clamp is reported per case.
    """
    pts = weyl.sample_weyl(seed, samples, tol)
    cases = []
    worst = 0.0
    problems = 0
    for h in h_list:
        c = ac.Couplings(1.0, h)
        for r in r_list:
            r_used = min(float(r), ac.max_cutoff(h))
            cfg = ac.CutoffConfig(r_used)
            params, keep, errors = [], [], []
            tau_bad = 0
            tau_max = 0.0
            for i, p in enumerate(pts):
                try:
                    pp, _ = ac.compile(p, c, cfg, tol)
                except AshnError as exc:
                    errors.append(f"{type(exc).__name__} at {p.tolist()}: {exc}")
                    continue
                if perturb:
                    pp = ac.PulseParams(pp.tau, pp.omega1 + perturb, pp.omega2, pp.delta)
                tau_max = max(tau_max, pp.tau)
                tau_bad += pp.tau > math.pi / c.g + 1e-12
                params.append(pp)
                keep.append(i)
            err = ac.verify_many(pts[keep], params, c, tol) if keep else np.zeros(0)
            m = float(err.max()) if err.size else 0.0
            n_bad = int(np.sum(err > tol.round_trip))
            worst = max(worst, m)
            problems += n_bad + len(errors) + int(tau_bad)
            case = {
                "h": h,
                "r": float(r),
                "r_used": r_used,
                "max_error": m,
                "max_tau": tau_max,
                "over_tolerance": n_bad,
                "tau_violations": int(tau_bad),
                "compile_errors": len(errors),
            }
            if errors:
                case["first_error"] = errors[0]
            cases.append(case)
    return {
        "samples": samples,
        "seed": seed,
        "tolerance": tol.round_trip,
        "max_error": worst,
        "failures": problems,
        "passed": problems == 0,
        "cases": cases,
    }


def cmd_verify_suite(args, tol: Tolerances, out) -> int:
    if args.samples < 1:
        raise _Usage("--samples must be positive")
    rep = run_verify_suite(args.samples, args.seed, _floats(args.h_list), _floats(args.r_list), tol, args.perturb)
    out.write(_json(rep) + "\n")
    return EXIT_OK if rep["passed"] else EXIT_VERIFY


# ---------------------------------------------------------------------------
# kak


def cmd_kak(args, tol: Tolerances, out) -> int:
    m = read_matrix(args.matrix)
    if m.shape != (4, 4):
        raise _Usage(f"kak needs a 4x4 matrix, got {m.shape[0]}x{m.shape[1]}")
    f = weyl.kak(m, tol)
    rec = {
        "eta": list(f.eta),
        "global_phase": [f.global_phase.real, f.global_phase.imag],
        "a1": _complex_matrix(f.a1),
        "a2": _complex_matrix(f.a2),
        "b1": _complex_matrix(f.b1),
        "b2": _complex_matrix(f.b2),
        "reconstruction_error": float(np.max(np.abs(f.reconstruct() - m))),
    }
    out.write(_json(rec) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ashn", description="AshN pulse compiler and verification suite")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("compile", help="compile one target to pulse parameters")
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--z", type=float)
    p.add_argument("--matrix", help="4x4 matrix file instead of coordinates")
    p.add_argument("--degrees", action="store_true", help="coordinates are in degrees")
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--r", type=float, default=None, help="cutoff (default min(1.1, (1-|h|/g)pi/2))")
    p.add_argument("--verify", action="store_true", help="evolve and report the coordinate error")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON line output (default)")
    fmt.add_argument("--csv", action="store_true", help="CSV output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("table", help="special gate classes as CSV")
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.0)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("avgtime", help="average gate time versus cutoff")
    p.add_argument("--r-grid", default="0,0.3,0.5,0.8,1.1")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_avgtime)

    p = sub.add_parser("synth", help="synthesize a Haar-random 3 or 4 qubit unitary")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", action="store_true", help="include wall-clock runtime")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify-suite", help="round-trip compile/evolve/verify over a grid")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--h-list", default="0,0.2,-0.2,0.8,-0.8")
    p.add_argument("--r-list", default="0,1.1")
    p.add_argument("--perturb", type=float, default=0.0, help="add this to Omega1 (negative control)")
    p.set_defaults(func=cmd_verify_suite)

    p = sub.add_parser("kak", help="KAK factors and coordinates of a matrix file")
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_kak)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = Tolerances.from_env()
        return args.func(args, tol, out)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
