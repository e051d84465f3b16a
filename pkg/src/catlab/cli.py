"""Command-line front end.

Subcommands: orbits, propagator-check, husimi, expect, quasimode, sweep,
selftest.  All I/O goes through files; every run that writes artifacts also
writes a manifest echoing the resolved configuration and tool version.
Exit codes: 0 ok, 2 configuration error, 3 numeric precondition violation,
4 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .classical import enumerate_prime_orbits, validate_cat_map
from .coherent import axis_variances, husimi, torus_coherent
from .errors import CatlabError, ConfigError, PreconditionError
from .hilbert import choose_theta, propagator, translation
from .io import (
    canonical_json,
    load_state,
    load_symbol_json,
    save_husimi_csv,
    save_orbits_json,
    save_state,
)
from .quantize import Symbol, antiwick_expectation, weyl_antiwick_gap, weyl_quantize
from .quasimodes import build_quasimode, run_experiment, scmeasure_error, QuasimodeSpec
from .selftest import selftest


def _parse_matrix(text: str):
    try:
        vals = [int(v) for v in text.replace(" ", "").split(",")]
    except ValueError as exc:
        raise ConfigError(f"matrix must be four integers: {text!r}") from exc
    if len(vals) != 4:
        raise ConfigError(f"matrix must have four entries, got {len(vals)}")
    return validate_cat_map(*vals)


def _parse_ladder(text: str) -> List[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",")]
    except ValueError as exc:
        raise ConfigError(f"ladder must be comma-separated integers: {text!r}") from exc


def _write_manifest(out: Path, config: Dict) -> None:
    clean = {k: v for k, v in config.items() if not callable(v)}
    doc = {"tool": "catlab", "version": __version__, "resolved_config": clean}
    out.parent.mkdir(parents=True, exist_ok=True)
    manifest = out.parent / (out.stem + ".manifest.json")
    manifest.write_text(canonical_json(doc))


def parse_config_file(path: str) -> Dict:
    """Key = value configuration ('toml-like'): ints, floats, JSON arrays,
    comma lists, and bare strings; '#' starts a comment."""
    cfg: Dict = {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    for raw in p.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line (need key = value): {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        try:
            cfg[key] = json.loads(val)
            continue
        except json.JSONDecodeError:
            pass
        if "," in val:
            parts = [s.strip() for s in val.split(",")]
            try:
                cfg[key] = [int(s) for s in parts]
                continue
            except ValueError:
                try:
                    cfg[key] = [float(s) for s in parts]
                    continue
                except ValueError:
                    pass
        cfg[key] = val
    return cfg


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_orbits(args) -> int:
    cat = _parse_matrix(args.matrix)
    orbits = enumerate_prime_orbits(cat, args.T, lattice_guard=args.guard)
    out = Path(args.out)
    save_orbits_json(out, orbits, cat)
    _write_manifest(out, {"matrix": args.matrix, "T": args.T, "guard": args.guard})
    print(f"{len(orbits)} prime orbit(s) of length {args.T} -> {out}")
    return 0


def cmd_propagator_check(args) -> int:
    cat = _parse_matrix(args.matrix)
    grid = choose_theta(cat, args.N)
    u = propagator(cat, grid)
    rng = np.random.default_rng(args.seed)
    states = rng.standard_normal((args.states, args.N)) + 1j * rng.standard_normal(
        (args.states, args.N)
    )
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    unit = max(abs(np.linalg.norm(u.apply(s)) - 1.0) for s in states)
    egorov = 0.0
    for n1 in range(-args.nmax, args.nmax + 1):
        for n2 in range(-args.nmax, args.nmax + 1):
            tn = translation((n1, n2), grid)
            tmn = translation(
                (cat.a * n1 + cat.b * n2, cat.c * n1 + cat.d * n2), grid
            )
            for s in states[:5]:
                d = np.linalg.norm(u.apply(tn.apply(u.apply_adjoint(s))) - tmn.apply(s))
                egorov = max(egorov, float(d))
    report = {
        "matrix": list(cat.entries),
        "N": args.N,
        "theta": [grid.theta[0], grid.theta[1]],
        "unitarity_defect": unit,
        "egorov_defect": egorov,
        "states": args.states,
        "nmax": args.nmax,
    }
    text = canonical_json(report)
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        _write_manifest(out, vars(args))
    sys.stdout.write(text)
    return 0


def cmd_husimi(args) -> int:
    cat = _parse_matrix(args.matrix)
    state = load_state(args.state)
    h = husimi(state, cat, args.G)
    out = Path(args.out)
    save_husimi_csv(out, h)
    _write_manifest(out, {"state": args.state, "matrix": args.matrix, "G": args.G})
    print(f"husimi grid {args.G}x{args.G} -> {out} (total mass {h.total():.6f})")
    return 0


def cmd_expect(args) -> int:
    cat = _parse_matrix(args.matrix)
    state = load_state(args.state)
    symbol = load_symbol_json(args.symbol)
    if args.mode == "aw":
        val = antiwick_expectation(state, symbol, cat, G=args.G)
    elif args.mode == "w":
        if symbol.fourier is None:
            raise ConfigError(
                "mode 'w' needs a Fourier symbol; sampled symbols only "
                "support mode 'aw'"
            )
        op = weyl_quantize(symbol, state.grid)
        val = complex(np.vdot(state.amplitudes, op.apply(state.amplitudes)))
    else:
        raise ConfigError(f"mode must be 'aw' or 'w', got {args.mode!r}")
    report = {
        "mode": args.mode,
        "value": [val.real, val.imag],
        "state": args.state,
        "symbol": args.symbol,
    }
    text = canonical_json(report)
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        _write_manifest(out, vars(args))
    sys.stdout.write(text)
    return 0


def cmd_quasimode(args) -> int:
    cfg = parse_config_file(args.config)
    if "matrix" not in cfg:
        raise ConfigError("config needs a 'matrix' entry")
    t0 = time.time()
    report = run_experiment(cfg)
    elapsed = time.time() - t0
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(canonical_json(report))
    # timings are volatile; they live in a sidecar so report bytes stay
    # reproducible for identical config + seed
    (out.parent / (out.stem + ".timings.json")).write_text(
        canonical_json({"total_seconds": elapsed})
    )
    _write_manifest(out, cfg)
    outputs = cfg.get("outputs", ["state", "husimi", "orbit"])
    if outputs:
        cat = validate_cat_map(*cfg["matrix"])
        grid = choose_theta(cat, report["N"])
        from .classical import Orbit, RationalPoint

        orbit = Orbit(
            tuple(RationalPoint(j, k, report["orbit"]["l"]) for j, k in report["orbit"]["points"]),
            l=report["orbit"]["l"],
        )
        spec = QuasimodeSpec(
            orbit=orbit,
            phi=report["phi"],
            delta=report["delta"],
            grid=grid,
            catmap=cat,
        )
        psi, psi_n = build_quasimode(spec)
        if "state" in outputs:
            save_state(out.parent / (out.stem + ".state.bin"), psi_n)
        if "husimi" in outputs:
            save_husimi_csv(
                out.parent / (out.stem + ".husimi.csv"),
                husimi(psi_n, cat, int(cfg.get("G", 256))),
            )
        if "orbit" in outputs:
            save_orbits_json(out.parent / (out.stem + ".orbit.json"), [orbit], cat)
    print(f"quasimode report -> {out}")
    return 0


def _sweep_rows(args) -> Tuple[List[List[float]], List[str], float]:
    cat = _parse_matrix(args.matrix)
    ladder = _parse_ladder(args.ladder)
    if len(ladder) < 3:
        raise PreconditionError("sweep ladder needs at least 3 points")
    if args.kind == "waw-gap":
        from .selftest import GAP_SYMBOL

        sym = Symbol.from_fourier(GAP_SYMBOL, real=True)
        rows = []
        for N in ladder:
            grid = choose_theta(cat, N)
            gap = weyl_antiwick_gap(sym, cat, grid, G=args.G)
            rows.append([N, grid.hbar, gap])
        slope = float(
            np.polyfit(np.log([r[0] for r in rows]), np.log([r[2] for r in rows]), 1)[0]
        )
        return rows, ["N", "hbar", "gap"], slope
    if args.kind == "husimi-width":
        grid = choose_theta(cat, args.N)
        u = propagator(cat, grid)
        state = torus_coherent((0.0, 0.0), cat, grid)
        amp = state.amplitudes
        rows = []
        reached = 0
        for t in range(0, max(ladder) + 1):
            if t in ladder:
                st = state.copy()
                st.amplitudes = amp
                h = husimi(st, cat, args.G)
                var_u, var_s = axis_variances(h, cat, (0.0, 0.0))
                theory = grid.hbar / (1.0 - math.tanh(cat.lyapunov * t))
                rows.append([t, var_u, var_s, theory])
            amp = u.apply(amp)
        slope = float(
            np.polyfit([r[0] for r in rows], np.log([r[1] for r in rows]), 1)[0]
        )
        return rows, ["t", "var_unstable", "var_stable", "theory_unstable"], slope
    if args.kind == "scmeasure":
        freqs = [
            (n1, n2) for n1 in range(-2, 3) for n2 in range(-2, 3) if (n1, n2) != (0, 0)
        ]
        rows = []
        for N in ladder:
            grid = choose_theta(cat, N)
            orbit = enumerate_prime_orbits(cat, args.T)[0]
            spec = QuasimodeSpec(
                orbit=orbit, phi=0.0, delta=args.delta, grid=grid, catmap=cat
            )
            _, psi_n = build_quasimode(spec)
            err = scmeasure_error(psi_n, spec, freqs, G=args.G).max_error
            rows.append([N, grid.hbar, err])
        slope = float(
            np.polyfit(np.log([r[0] for r in rows]), np.log([r[2] for r in rows]), 1)[0]
        )
        return rows, ["N", "hbar", "max_error"], slope
    raise ConfigError(f"unknown sweep kind {args.kind!r}")


def cmd_sweep(args) -> int:
    rows, header, slope = _sweep_rows(args)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{v:.16e}" if isinstance(v, float) else str(v) for v in row))
    lines.append(f"slope,{slope:.16e}")
    out.write_text("\n".join(lines) + "\n")
    _write_manifest(out, vars(args))
    print(f"sweep {args.kind} -> {out} (slope {slope:+.4f})")
    return 0


def cmd_selftest(args) -> int:
    report, ok = selftest(seed=args.seed)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(canonical_json(report))
        _write_manifest(out, {"seed": args.seed})
    return 0 if ok else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="catlab",
        description="Quantized hyperbolic torus maps: propagators, coherent "
        "states, Husimi analysis, periodic orbits, and orbit quasimodes.",
    )
    ap.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("CATLAB_THREADS", "0")) or None,
        help="cap worker threads (recorded in manifests; computations are "
        "single-threaded apart from BLAS)",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbits", help="enumerate prime closed orbits")
    p.add_argument("--matrix", required=True, help="A,B,C,D integer entries")
    p.add_argument("--T", type=int, required=True, help="orbit length")
    p.add_argument("--guard", type=int, default=10_000, help="lattice guard on l")
    p.add_argument("--out", required=True, help="output JSON path")
    p.set_defaults(fn=cmd_orbits)

    p = sub.add_parser("propagator-check", help="unitarity and Egorov defects")
    p.add_argument("--matrix", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--states", type=int, default=20)
    p.add_argument("--nmax", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_propagator_check)

    p = sub.add_parser("husimi", help="Husimi grid of a stored state")
    p.add_argument("--state", required=True, help="binary CATSTATE file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--G", type=int, default=256)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(fn=cmd_husimi)

    p = sub.add_parser("expect", help="Weyl or anti-Wick expectation value")
    p.add_argument("--state", required=True)
    p.add_argument("--symbol", required=True, help="symbol JSON path")
    p.add_argument("--mode", choices=["aw", "w"], required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--G", type=int, default=256)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_expect)

    p = sub.add_parser("quasimode", help="build a quasimode and run diagnostics")
    p.add_argument("--config", required=True, help="key = value config file")
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(fn=cmd_quasimode)

    p = sub.add_parser("sweep", help="scaling tables over N- or t-ladders")
    p.add_argument("--kind", choices=["waw-gap", "husimi-width", "scmeasure"], required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--ladder", required=True, help="comma-separated ladder points")
    p.add_argument("--N", type=int, default=4096, help="dimension for t-ladders")
    p.add_argument("--T", type=int, default=2, help="orbit length for scmeasure")
    p.add_argument("--delta", type=float, default=0.24)
    p.add_argument("--G", type=int, default=256)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("selftest", help="run acceptance criteria twice; compare bytes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, matching our config-error code
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error[config]: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 3
    except CatlabError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"error[internal:{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
