"""Dense complex matrix primitives and matrix file I/O.

Matrices are plain square ``numpy`` arrays of complex128; every public
operation validates its input with :func:`require_matrix`. Two file formats
are supported: a JSON object ``{"n": int, "entries": [[re, im], ...]}``
(row-major, bit-exact round trip) and the Matrix Market
coordinate-complex-general text subset.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ParseError

__all__ = [
    "require_matrix", "require_vector", "operator_norm", "shifted",
    "SvdResult", "svd", "read_matrix", "write_matrix",
]


def require_matrix(a) -> np.ndarray:
    """Validate and return a square, finite complex128 matrix."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise InputError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise InputError("matrix entries must be finite (no NaN/Inf)")
    return m


def require_vector(v) -> np.ndarray:
    vec = np.asarray(v, dtype=np.complex128)
    if vec.ndim != 1 or vec.shape[0] < 1:
        raise InputError(f"expected a vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec.view(np.float64))):
        raise InputError("vector entries must be finite")
    return vec


def operator_norm(a) -> float:
    """Spectral norm (largest singular value)."""
    m = require_matrix(a)
    return float(np.linalg.norm(m, 2))


def shifted(a, mu: complex) -> np.ndarray:
    """Return ``A - mu*I``."""
    m = require_matrix(a)
    if not (np.isfinite(mu.real) and np.isfinite(complex(mu).imag)):
        raise InputError("shift must be finite")
    out = m.copy()
    idx = np.arange(m.shape[0])
    out[idx, idx] -= mu
    return out


@dataclass(frozen=True)
class SvdResult:
    """Singular values in descending order; right singular vectors, when
    requested, are the orthonormal columns of ``right_vectors``."""

    singular_values: np.ndarray
    right_vectors: np.ndarray | None = None


def svd(a, vectors: bool = False) -> SvdResult:
    """Full SVD of a validated matrix.

    Singular values come from LAPACK and are reported as computed; no
    flooring or clamping is applied, so callers see raw values down to
    roundoff.
    """
    m = require_matrix(a)
    if vectors:
        _, s, vh = np.linalg.svd(m)
        return SvdResult(s, vh.conj().T)
    return SvdResult(np.linalg.svd(m, compute_uv=False))


# ---------------------------------------------------------------------------
# File formats

_MM_HEADER = "%%MatrixMarket"


def _matrix_to_json_obj(m: np.ndarray) -> dict:
    entries = [[float(z.real), float(z.imag)] for z in m.ravel()]
    return {"n": int(m.shape[0]), "entries": entries}


def _matrix_from_json_obj(obj, path: str | None = None) -> np.ndarray:
    if not isinstance(obj, dict) or "n" not in obj or "entries" not in obj:
        raise ParseError("JSON matrix must be an object with 'n' and 'entries'", path)
    n = obj["n"]
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"matrix dimension must be a positive integer, got {n!r}", path)
    entries = obj["entries"]
    if len(entries) != n * n:
        raise ParseError(f"expected {n * n} entries for n={n}, got {len(entries)}", path)
    flat = np.empty(n * n, dtype=np.complex128)
    for i, pair in enumerate(entries):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ParseError(f"entry {i} is not a [re, im] pair", path)
        flat[i] = complex(pair[0], pair[1])
    m = flat.reshape(n, n)
    return require_matrix(m)


def _write_json(m: np.ndarray, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(_matrix_to_json_obj(m), fh)
        fh.write("\n")


def _read_json(path: str) -> np.ndarray:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", path, exc.lineno, exc.colno) from exc
    # gen bundles wrap the matrix under a "matrix" key
    if isinstance(obj, dict) and "matrix" in obj and "entries" not in obj:
        obj = obj["matrix"]
    return _matrix_from_json_obj(obj, path)


def _write_mm(m: np.ndarray, path: str) -> None:
    n = m.shape[0]
    rows, cols = np.nonzero(m)
    lines = [f"{_MM_HEADER} matrix coordinate complex general",
             f"{n} {n} {len(rows)}"]
    for i, j in zip(rows, cols):
        z = m[i, j]
        lines.append(f"{i + 1} {j + 1} {z.real!r} {z.imag!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _read_mm(path: str) -> np.ndarray:
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise ParseError("empty file", path, 1)
    header = raw[0].split()
    if not raw[0].startswith(_MM_HEADER) or len(header) < 5:
        raise ParseError("missing Matrix Market header", path, 1)
    kind = [w.lower() for w in header[1:5]]
    if kind != ["matrix", "coordinate", "complex", "general"]:
        raise ParseError("only 'matrix coordinate complex general' is supported", path, 1)
    lineno = 1
    dims = None
    entries = []
    for lineno, line in enumerate(raw[1:], start=2):
        text = line.strip()
        if not text or text.startswith("%"):
            continue
        fields = text.split()
        if dims is None:
            if len(fields) != 3:
                raise ParseError("dimension line must be 'rows cols nnz'", path, lineno)
            try:
                dims = tuple(int(f) for f in fields)
            except ValueError as exc:
                raise ParseError(f"bad dimension field: {exc}", path, lineno) from exc
            if dims[0] != dims[1]:
                raise ParseError(f"matrix must be square, got {dims[0]}x{dims[1]}", path, lineno)
            if dims[0] < 1:
                raise ParseError("matrix dimension must be at least 1", path, lineno)
            continue
        if len(fields) != 4:
            raise ParseError("entry line must be 'i j re im'", path, lineno, 1)
        try:
            i, j = int(fields[0]), int(fields[1])
            re, im = float(fields[2]), float(fields[3])
        except ValueError as exc:
            raise ParseError(f"bad entry field: {exc}", path, lineno) from exc
        entries.append((i, j, re, im, lineno))
    if dims is None:
        raise ParseError("missing dimension line", path, lineno)
    n, _, nnz = dims
    if len(entries) != nnz:
        raise ParseError(f"declared {nnz} entries but found {len(entries)}", path, lineno)
    m = np.zeros((n, n), dtype=np.complex128)
    seen = set()
    for i, j, re, im, ln in entries:
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"index ({i}, {j}) out of range for n={n}", path, ln)
        if (i, j) in seen:
            raise ParseError(f"duplicate entry ({i}, {j})", path, ln)
        seen.add((i, j))
        m[i - 1, j - 1] = complex(re, im)
    return require_matrix(m)


def _resolve_format(path: str, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("json", "matrix-market"):
            raise InputError(f"unknown matrix format {fmt!r}")
        return fmt
    ext = os.path.splitext(path)[1].lower()
    if ext in (".mtx", ".mm"):
        return "matrix-market"
    return "json"


def read_matrix(path: str, fmt: str | None = None) -> np.ndarray:
    """Read a matrix from ``path``; format from ``fmt`` or the extension."""
    if not os.path.exists(path):
        raise InputError(f"no such file: {path}")
    if _resolve_format(path, fmt) == "json":
        return _read_json(path)
    return _read_mm(path)


def write_matrix(a, path: str, fmt: str | None = None) -> None:
    m = require_matrix(a)
    if _resolve_format(path, fmt) == "json":
        _write_json(m, path)
    else:
        _write_mm(m, path)
