"""Plain-text and binary serialization of mode sets, BCPW sets and spectra.

Numbers are written with ``%.17g`` so a round trip through text is exact.
Files carry no timestamps, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io as _io
import json
import struct
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .cmsolver import ModeSet
from .cpwbuilder import BcpwSet, shift_orthogonality_residual, to_coeffs
from .errors import ShapeMismatch
from .lattice import build_grid

FORMAT_VERSION = 1

__all__ = [
    "FORMAT_VERSION",
    "fmt",
    "write_csv",
    "write_json",
    "save_modeset_csv",
    "load_modeset_csv",
    "save_modeset_bin",
    "load_modeset_bin",
    "save_bcpw",
    "load_bcpw",
    "save_spectra_csv",
    "save_coeffs_csv",
    "load_coeffs_csv",
]


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()) -> Path:
    """Write ``rows`` under ``header``; ``comments`` become leading ``# `` lines."""
    path = Path(path)
    buf = _io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        # round-trip representation, and keep non-finite values valid JSON
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    return obj


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _read_csv(path):
    comments, lines = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                lines.append(line)
    rows = list(csv.reader(lines))
    return comments, rows[0], rows[1:]


def _meta(comments) -> dict:
    out = {}
    for c in comments:
        if "=" in c:
            k, v = c.split("=", 1)
            out[k.strip()] = v.strip()
    return out


# mode sets ----------------------------------------------------------------


def save_modeset_csv(ms: ModeSet, path, figure: Optional[str] = None) -> Path:
    """One row per node: ``x, psi_1, ..., psi_N``; metadata in the comment header."""
    comments = [f"figure: {figure}"] if figure else []
    comments += [
        f"version = {FORMAT_VERSION}",
        f"L = {fmt(ms.grid.L)}",
        f"n = {ms.grid.n}",
        f"mu = {fmt(ms.mu)}",
        f"N = {ms.N}",
        f"objective = {fmt(ms.objective)}",
        f"converged = {fmt(ms.converged)}",
    ]
    header = ["x"] + [f"psi_{k + 1}" for k in range(ms.N)]
    rows = (np.concatenate([[x], row]) for x, row in zip(ms.grid.nodes, ms.modes))
    return write_csv(path, header, rows, comments)


def load_modeset_csv(path) -> ModeSet:
    comments, header, rows = _read_csv(path)
    meta = _meta(comments)
    data = np.array(rows, dtype=float)
    grid = build_grid(float(meta["L"]), int(meta["n"]))
    modes = data[:, 1:]
    if modes.shape != (grid.n, int(meta["N"])):
        raise ShapeMismatch(f"{path}: expected {grid.n} x {meta['N']} mode samples, found {modes.shape}")
    return ModeSet(
        grid=grid,
        modes=modes,
        mu=float(meta["mu"]),
        objective=float(meta["objective"]),
        converged=meta.get("converged", "true") == "true",
    )


_MAGIC = b"CMODESET"


def save_modeset_bin(ms: ModeSet, path) -> Path:
    """Versioned binary file: magic, header length, JSON header, little-endian float64 modes.

    Unlike ``.npz`` archives the bytes carry no timestamps.
    """
    header = json.dumps(
        {
            "version": FORMAT_VERSION,
            "L": ms.grid.L,
            "n": ms.grid.n,
            "N": ms.N,
            "mu": ms.mu,
            "objective": ms.objective,
            "converged": bool(ms.converged),
            "iterations": int(ms.iterations),
        },
        sort_keys=True,
    ).encode("utf-8")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(np.ascontiguousarray(ms.modes, dtype="<f8").tobytes())
    return path


def load_modeset_bin(path) -> ModeSet:
    raw = Path(path).read_bytes()
    if raw[: len(_MAGIC)] != _MAGIC:
        raise ValueError(f"{path}: not a mode-set file")
    off = len(_MAGIC)
    (hlen,) = struct.unpack("<I", raw[off : off + 4])
    meta = json.loads(raw[off + 4 : off + 4 + hlen])
    if meta["version"] > FORMAT_VERSION:
        raise ValueError(f"{path}: format version {meta['version']} is newer than supported {FORMAT_VERSION}")
    modes = np.frombuffer(raw[off + 4 + hlen :], dtype="<f8")
    if modes.size != meta["n"] * meta["N"]:
        raise ShapeMismatch(f"{path}: payload has {modes.size} values, expected {meta['n'] * meta['N']}")
    return ModeSet(
        grid=build_grid(meta["L"], meta["n"]),
        modes=modes.reshape(meta["n"], meta["N"]).astype(float),
        mu=meta["mu"],
        objective=meta["objective"],
        converged=meta["converged"],
        iterations=meta["iterations"],
    )


# BCPW sets ----------------------------------------------------------------


def save_bcpw(bcpw: BcpwSet, path, figure: Optional[str] = None) -> tuple[Path, Path]:
    """Samples as CSV (``x, psi^1..psi^levels``) plus a JSON sidecar with metadata."""
    path = Path(path)
    comments = [f"figure: {figure}"] if figure else []
    header = ["x"] + [f"psi^{k + 1}" for k in range(bcpw.levels)]
    rows = (np.concatenate([[x], col]) for x, col in zip(bcpw.grid.nodes, bcpw.modes.T))
    write_csv(path, header, rows, comments)
    sidecar = path.with_suffix(".json")
    residual = shift_orthogonality_residual(bcpw)
    write_json(
        sidecar,
        {
            "version": FORMAT_VERSION,
            "L": bcpw.grid.L,
            "n": bcpw.grid.n,
            "w": bcpw.w,
            "mu": bcpw.mu,
            "N0": bcpw.N0,
            "levels": bcpw.levels,
            "lambda_pen": bcpw.lambda_pen,
            "iterations": bcpw.iterations,
            "converged": bcpw.converged,
            "objectives": bcpw.objectives,
            "max_orthonormality_residual": float(np.abs(residual).max()),
        },
    )
    return path, sidecar


def load_bcpw(path) -> BcpwSet:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text(encoding="utf-8"))
    _, _, rows = _read_csv(path)
    modes = np.array(rows, dtype=float)[:, 1:].T.copy()
    grid = build_grid(meta["L"], meta["n"])
    return BcpwSet(
        grid=grid,
        w=meta["w"],
        mu=meta["mu"],
        lambda_pen=meta["lambda_pen"],
        coeffs=to_coeffs(modes.T, grid).T.copy(),
        modes=modes,
        iterations=list(meta.get("iterations", [])),
        converged=list(meta.get("converged", [])),
        objectives=list(meta.get("objectives", [])),
    )


# spectra and coefficients ---------------------------------------------------


def save_spectra_csv(path, values, reference, figure: Optional[str] = None, comments: Sequence[str] = ()) -> Path:
    values = np.asarray(values, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if values.shape != reference.shape:
        raise ShapeMismatch("spectrum and reference differ in length")
    head = ([f"figure: {figure}"] if figure else []) + list(comments)
    rows = ((i, v, r) for i, (v, r) in enumerate(zip(values, reference)))
    return write_csv(path, ["index", "value", "reference"], rows, head)


def save_coeffs_csv(path, values: np.ndarray, figure: Optional[str] = None) -> Path:
    """Rows ``(n, j, value)`` with 1-based level ``n`` and 0-based shift ``j``."""
    values = np.asarray(values, dtype=float)
    head = [f"figure: {figure}"] if figure else []
    rows = ((n + 1, j, values[n, j]) for n in range(values.shape[0]) for j in range(values.shape[1]))
    return write_csv(path, ["n", "j", "value"], rows, head)


def load_coeffs_csv(path) -> np.ndarray:
    _, _, rows = _read_csv(path)
    data = np.array(rows, dtype=float)
    levels = int(data[:, 0].max())
    N0 = int(data[:, 1].max()) + 1
    out = np.zeros((levels, N0))
    out[data[:, 0].astype(int) - 1, data[:, 1].astype(int)] = data[:, 2]
    return out
