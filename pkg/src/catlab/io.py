"""File formats: states, Husimi grids, orbits, symbols, reports.

States travel as little-endian binary with a fixed 32-byte header, or as
JSON for small N.  Husimi grids are CSV (17 significant digits, row major)
with a JSON sidecar.  Report JSON uses sorted keys and Python's shortest
round-trip float representation, so identical inputs give identical bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np

from .classical import CatMap, Orbit, RationalPoint
from .coherent import HusimiGrid
from .errors import ConfigError
from .hilbert import PlanckGrid, QuantumState
from .quantize import Symbol

__all__ = [
    "MAGIC",
    "save_state",
    "load_state",
    "save_state_json",
    "load_state_json",
    "save_husimi_csv",
    "save_orbits_json",
    "load_orbits_json",
    "save_symbol_json",
    "load_symbol_json",
    "canonical_json",
]

MAGIC = b"CATSTATE"
JSON_STATE_MAX_N = 256


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def save_state(path: Union[str, Path], state: QuantumState) -> None:
    """Binary state: 32-byte header (magic, N, theta1, theta2), then
    interleaved float64 (re, im) pairs, all little endian."""
    amp = state.amplitudes
    header = MAGIC + struct.pack(
        "<Qdd", state.grid.N, state.grid.theta[0], state.grid.theta[1]
    )
    inter = np.empty(2 * len(amp))
    inter[0::2] = amp.real
    inter[1::2] = amp.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(inter.astype("<f8").tobytes())


def load_state(path: Union[str, Path]) -> QuantumState:
    with open(path, "rb") as fh:
        header = fh.read(32)
        if len(header) != 32 or header[:8] != MAGIC:
            raise ConfigError(f"{path}: not a CATSTATE file")
        N, t1, t2 = struct.unpack("<Qdd", header[8:])
        data = np.frombuffer(fh.read(), dtype="<f8")
    if len(data) != 2 * N:
        raise ConfigError(f"{path}: expected {2 * N} floats, found {len(data)}")
    amp = data[0::2] + 1j * data[1::2]
    return QuantumState(amp, PlanckGrid(int(N), (t1, t2)))


def save_state_json(path: Union[str, Path], state: QuantumState) -> None:
    if state.grid.N > JSON_STATE_MAX_N:
        raise ConfigError(
            f"JSON state format is for N <= {JSON_STATE_MAX_N}; use the binary format"
        )
    doc = {
        "N": state.grid.N,
        "theta": [state.grid.theta[0], state.grid.theta[1]],
        "re": state.amplitudes.real.tolist(),
        "im": state.amplitudes.imag.tolist(),
    }
    Path(path).write_text(canonical_json(doc))


def load_state_json(path: Union[str, Path]) -> QuantumState:
    doc = json.loads(Path(path).read_text())
    amp = np.asarray(doc["re"]) + 1j * np.asarray(doc["im"])
    return QuantumState(amp, PlanckGrid(int(doc["N"]), tuple(doc["theta"])))


def save_husimi_csv(path: Union[str, Path], hgrid: HusimiGrid) -> None:
    """G x G CSV, row major (rows = position index), plus a JSON sidecar."""
    path = Path(path)
    np.savetxt(path, hgrid.values, fmt="%.16e", delimiter=",")
    sidecar = {
        "G": hgrid.G,
        "N": hgrid.grid.N,
        "theta": [hgrid.grid.theta[0], hgrid.grid.theta[1]],
        "matrix": list(hgrid.map_entries),
        "norm_sq": hgrid.state_norm2,
    }
    path.with_suffix(path.suffix + ".json").write_text(canonical_json(sidecar))


def orbit_doc(orbit: Orbit, catmap: CatMap) -> Dict:
    return {
        "matrix": list(catmap.entries),
        "T": orbit.length,
        "l": orbit.l,
        "points": [[p.j, p.k] for p in orbit.points],
    }


def save_orbits_json(
    path: Union[str, Path], orbits: Sequence[Orbit], catmap: CatMap
) -> None:
    Path(path).write_text(canonical_json([orbit_doc(o, catmap) for o in orbits]))


def load_orbits_json(path: Union[str, Path]) -> List[Orbit]:
    docs = json.loads(Path(path).read_text())
    out = []
    for doc in docs:
        l = int(doc["l"])
        pts = tuple(RationalPoint(int(j), int(k), l) for j, k in doc["points"])
        out.append(Orbit(pts, l=l, prime=True))
    return out


def save_symbol_json(path: Union[str, Path], symbol: Symbol, G: int = 256) -> None:
    """Fourier symbols as [[n1, n2, re, im], ...]; others as a sampled grid."""
    path = Path(path)
    if symbol.fourier is not None:
        doc = {
            "kind": "fourier",
            "rho": symbol.rho,
            "coefficients": [
                [n[0], n[1], c.real, c.imag] for n, c in sorted(symbol.fourier.items())
            ],
        }
        path.write_text(canonical_json(doc))
    else:
        vals = symbol.sample(G)
        csv_path = path.with_suffix(".csv")
        np.savetxt(csv_path, np.real(vals), fmt="%.16e", delimiter=",")
        doc = {"kind": "sampled", "rho": symbol.rho, "G": G, "grid_csv": csv_path.name}
        path.write_text(canonical_json(doc))


def load_symbol_json(path: Union[str, Path]) -> Symbol:
    path = Path(path)
    doc = json.loads(path.read_text())
    if doc.get("kind") == "fourier":
        coeffs = {
            (int(r[0]), int(r[1])): complex(r[2], r[3]) for r in doc["coefficients"]
        }
        return Symbol(fourier=coeffs, rho=float(doc.get("rho", 0.0)))
    if doc.get("kind") == "sampled":
        grid_vals = np.loadtxt(path.parent / doc["grid_csv"], delimiter=",")
        G = int(doc["G"])
        if grid_vals.shape != (G, G):
            raise ConfigError(f"{path}: sampled grid shape {grid_vals.shape} != ({G},{G})")

        def fn(q, p, _vals=grid_vals, _G=G):
            qi = np.clip((np.asarray(q) * _G).astype(int), 0, _G - 1)
            pi = np.clip((np.asarray(p) * _G).astype(int), 0, _G - 1)
            return _vals[qi, pi]

        return Symbol(fn=fn, rho=float(doc.get("rho", 0.0)))
    raise ConfigError(f"{path}: unknown symbol kind {doc.get('kind')!r}")
