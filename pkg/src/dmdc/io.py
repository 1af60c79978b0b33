"""File formats: text and binary matrices, model records, ground truth.

All writers are atomic (write to a temp file, rename on success) and all
round trips are bitwise stable: CSV cells use shortest round-trip decimal
reprs, the binary format is little-endian float64, and structured records
store every scalar as an exact decimal-hex pair.
"""
from __future__ import annotations

import json
import math
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, LengthError, ParseError, SchemaError
from .linalg import as_matrix
from .synth import GroundTruth

BIN_MAGIC = b"DMDCMAT1"
MODEL_KINDS = ("dmd", "dmdc-known-b", "dmdc-unknown-b")


def _atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_text(path, text: str) -> None:
    _atomic_write_bytes(path, text.encode("utf-8"))


def write_text_atomic(path, text: str) -> None:
    """Write UTF-8 text with no partial output on failure."""
    _atomic_write_text(path, text)


def write_matrix_csv(m, path) -> None:
    """Write a matrix as CSV, one state row per line, snapshots as columns."""
    a = as_matrix(m, "matrix")
    lines = "\n".join(",".join(repr(float(v)) for v in row) for row in a)
    _atomic_write_text(path, lines + "\n")


def read_matrix_csv(path, transpose: bool = False) -> np.ndarray:
    """Read a CSV matrix; rows are state entries, columns snapshots.

    Raises FormatError for ragged rows (with the line number) and
    ParseError for cells that are not finite decimals (with coordinates).
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        raise FormatError(f"{path}: empty matrix file")
    width = None
    rows = []
    for i, line in enumerate(lines, start=1):
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise FormatError(
                f"{path}: line {i}: expected {width} cells, got {len(cells)}"
            )
        row = []
        for j, cell in enumerate(cells, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: line {i}, column {j}: not a number: {cell.strip()!r}"
                ) from None
            if not math.isfinite(v):
                raise ParseError(f"{path}: line {i}, column {j}: non-finite value")
            row.append(v)
        rows.append(row)
    a = np.array(rows, dtype=np.float64)
    return a.T.copy() if transpose else a


def write_matrix_bin(m, path) -> None:
    """Write the binary matrix format: magic, u64 dims, column-major f64."""
    a = as_matrix(m, "matrix")
    head = BIN_MAGIC + struct.pack("<QQ", a.shape[0], a.shape[1])
    _atomic_write_bytes(path, head + a.astype("<f8").tobytes(order="F"))


def read_matrix_bin(path) -> np.ndarray:
    """Read the binary matrix format written by write_matrix_bin."""
    data = Path(path).read_bytes()
    if len(data) < 8 or data[:8] != BIN_MAGIC:
        raise FormatError(f"{path}: bad magic bytes")
    if len(data) < 24:
        raise LengthError(f"{path}: truncated header")
    rows, cols = struct.unpack("<QQ", data[8:24])
    if rows < 1 or cols < 1:
        raise FormatError(f"{path}: non-positive dimensions {rows}x{cols}")
    expected = rows * cols * 8
    if len(data) - 24 != expected:
        raise LengthError(
            f"{path}: payload is {len(data) - 24} bytes, expected {expected}"
        )
    flat = np.frombuffer(data[24:], dtype="<f8")
    return flat.reshape((rows, cols), order="F").copy()


# --- exact scalar encoding -------------------------------------------------
#
# Every float is stored as a [decimal, hex] pair: the decimal is for human
# readers, the hex digits are the authoritative bit pattern. Readers verify
# that the two agree so hand edits cannot silently skew one of them.

def _enc_real(v) -> list:
    f = float(v)
    return [f, f.hex()]


def _dec_real(pair, where: str) -> float:
    if (
        not isinstance(pair, list)
        or len(pair) != 2
        or not isinstance(pair[0], (int, float))
        or isinstance(pair[0], bool)
        or not isinstance(pair[1], str)
    ):
        raise SchemaError(f"{where}: expected [decimal, hex] pair, got {pair!r}")
    try:
        h = float.fromhex(pair[1])
    except ValueError:
        raise SchemaError(f"{where}: bad hex float {pair[1]!r}") from None
    if float(pair[0]) != h:
        raise SchemaError(f"{where}: decimal {pair[0]!r} disagrees with hex")
    return h


def _enc_complex(z) -> list:
    z = complex(z)
    return [_enc_real(z.real), _enc_real(z.imag)]


def _dec_complex(pair, where: str) -> complex:
    if not isinstance(pair, list) or len(pair) != 2:
        raise SchemaError(f"{where}: expected (re, im) pair, got {pair!r}")
    return complex(_dec_real(pair[0], where), _dec_real(pair[1], where))


def _enc_real_matrix(m) -> list:
    return [[_enc_real(v) for v in row] for row in np.atleast_2d(np.asarray(m))]


def _dec_real_matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise SchemaError(f"{where}: expected a non-empty array of rows")
    out = [[_dec_real(p, where) for p in row] for row in rows]
    if len({len(r) for r in out}) != 1:
        raise SchemaError(f"{where}: ragged rows")
    return np.array(out, dtype=np.float64)


def _enc_complex_matrix(m) -> list:
    return [[_enc_complex(v) for v in row] for row in np.atleast_2d(np.asarray(m))]


def _dec_complex_matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise SchemaError(f"{where}: expected a non-empty array of rows")
    out = [[_dec_complex(p, where) for p in row] for row in rows]
    if len({len(r) for r in out}) != 1:
        raise SchemaError(f"{where}: ragged rows")
    return np.array(out, dtype=np.complex128)


@dataclass(frozen=True)
class ModelRecord:
    """Serializable snapshot of a fitted model plus its provenance."""

    kind: str
    rank_p: int
    rank_r: int
    dt: float
    a_tilde: np.ndarray
    b_tilde: np.ndarray | None
    basis: np.ndarray
    eigenvalues: np.ndarray
    modes: np.ndarray
    provenance: dict

    @classmethod
    def from_model(cls, model, provenance: dict | None = None) -> "ModelRecord":
        b_tilde = getattr(model, "b_tilde", None)
        if b_tilde is None:
            kind = "dmd"
            rank_p = rank_r = model.rank
        else:
            kind = "dmdc-known-b" if model.b_full is not None else "dmdc-unknown-b"
            rank_p, rank_r = model.input_rank, model.output_rank
        return cls(
            kind=kind,
            rank_p=rank_p,
            rank_r=rank_r,
            dt=model.dt,
            a_tilde=model.a_tilde,
            b_tilde=b_tilde,
            basis=model.basis,
            eigenvalues=model.eigen.values,
            modes=model.modes,
            provenance=provenance or {},
        )


def write_model(record: ModelRecord, path) -> None:
    """Serialize a model record as a structured JSON document."""
    if record.kind not in MODEL_KINDS:
        raise SchemaError(f"unknown model kind {record.kind!r}")
    doc = {
        "kind": record.kind,
        "rank_p": int(record.rank_p),
        "rank_r": int(record.rank_r),
        "dt": _enc_real(record.dt),
        "a_tilde": _enc_real_matrix(record.a_tilde),
        "b_tilde": None
        if record.b_tilde is None
        else _enc_real_matrix(record.b_tilde),
        "basis": _enc_real_matrix(record.basis),
        "eigenvalues": [_enc_complex(z) for z in record.eigenvalues],
        "modes": _enc_complex_matrix(record.modes),
        "provenance": record.provenance,
    }
    _atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def _require(doc: dict, key: str, path):
    if key not in doc:
        raise SchemaError(f"{path}: missing field {key!r}")
    return doc[key]


def read_model(path) -> ModelRecord:
    """Read a model record; raises SchemaError on structural problems."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not a valid model document: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    kind = _require(doc, "kind", path)
    if kind not in MODEL_KINDS:
        raise SchemaError(f"{path}: unknown model kind {kind!r}")
    rank_p = _require(doc, "rank_p", path)
    rank_r = _require(doc, "rank_r", path)
    if not all(isinstance(r, int) and not isinstance(r, bool) for r in (rank_p, rank_r)):
        raise SchemaError(f"{path}: ranks must be integers")
    b_raw = _require(doc, "b_tilde", path)
    eig_raw = _require(doc, "eigenvalues", path)
    if not isinstance(eig_raw, list):
        raise SchemaError(f"{path}: eigenvalues must be an array")
    record = ModelRecord(
        kind=kind,
        rank_p=rank_p,
        rank_r=rank_r,
        dt=_dec_real(_require(doc, "dt", path), f"{path}: dt"),
        a_tilde=_dec_real_matrix(_require(doc, "a_tilde", path), f"{path}: a_tilde"),
        b_tilde=None if b_raw is None else _dec_real_matrix(b_raw, f"{path}: b_tilde"),
        basis=_dec_real_matrix(_require(doc, "basis", path), f"{path}: basis"),
        eigenvalues=np.array(
            [_dec_complex(z, f"{path}: eigenvalues") for z in eig_raw],
            dtype=np.complex128,
        ),
        modes=_dec_complex_matrix(_require(doc, "modes", path), f"{path}: modes"),
        provenance=_require(doc, "provenance", path),
    )
    r = record.a_tilde.shape[0]
    if record.a_tilde.shape != (r, r):
        raise SchemaError(f"{path}: a_tilde must be square")
    if record.basis.shape[1] != r or record.modes.shape[1] != r:
        raise SchemaError(f"{path}: basis/modes width disagrees with a_tilde")
    if record.eigenvalues.shape[0] != r:
        raise SchemaError(f"{path}: eigenvalue count disagrees with a_tilde")
    return record


def write_truth(truth: GroundTruth, path, dt: float = 1.0) -> None:
    """Write ground truth: a JSON index plus sibling binary matrices."""
    path = Path(path)
    files: dict[str, str | None] = {}

    def _side(tag: str, mat) -> str | None:
        if mat is None:
            return None
        name = f"{path.stem}_{tag}.bin"
        write_matrix_bin(mat, path.parent / name)
        return name

    files["a_true"] = _side("a_true", truth.a_true)
    files["b_true"] = _side("b_true", truth.b_true)
    files["c_true"] = _side("c_true", truth.c_true)
    if truth.modes_true is not None:
        files["modes_true_re"] = _side("modes_re", truth.modes_true.real)
        files["modes_true_im"] = _side("modes_im", truth.modes_true.imag)
    else:
        files["modes_true_re"] = files["modes_true_im"] = None
    doc = {
        "kind": "ground-truth",
        "seed": int(truth.seed),
        "dt": _enc_real(dt),
        "eigenvalues": [_enc_complex(z) for z in truth.eigs_true],
        "files": files,
    }
    _atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def read_truth(path) -> tuple[GroundTruth, float]:
    """Read a ground-truth index and its sibling matrices."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not a valid truth document: {exc}") from None
    if not isinstance(doc, dict) or doc.get("kind") != "ground-truth":
        raise SchemaError(f"{path}: not a ground-truth document")
    files = _require(doc, "files", path)
    if not isinstance(files, dict):
        raise SchemaError(f"{path}: 'files' must be an object")
    seed = _require(doc, "seed", path)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise SchemaError(f"{path}: seed must be an integer")

    def _load(tag: str):
        name = files.get(tag)
        return None if name is None else read_matrix_bin(path.parent / name)

    modes = None
    re_part, im_part = _load("modes_true_re"), _load("modes_true_im")
    if re_part is not None and im_part is not None:
        modes = re_part + 1j * im_part
    truth = GroundTruth(
        a_true=_load("a_true"),
        b_true=_load("b_true"),
        c_true=_load("c_true"),
        eigs_true=np.array(
            [_dec_complex(z, f"{path}: eigenvalues") for z in
             _require(doc, "eigenvalues", path)],
            dtype=np.complex128,
        ),
        modes_true=modes,
        seed=seed,
    )
    return truth, _dec_real(_require(doc, "dt", path), f"{path}: dt")
