"""Readers and writers for CSV tables, PGM images, WAV audio and model files.

Only one sub-format of each binary type is supported: binary PGM (``P5``,
maxval 255) and mono 16-bit PCM WAV. Images and audio hold a single signal
per file.
"""

import csv
import io as _io
import json
import math
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, RaggedRows, SchemaMismatch, SingularMatrix, SizeMismatch, UnsupportedFormat
from .linalg import determinant, singular_tol

SCHEMA_VERSION = 1


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_csv(path):
    """Read a numeric CSV table; a first row with any non-numeric cell is a header."""
    text = Path(path).read_text(encoding="utf-8")
    rows = [r for r in csv.reader(_io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows and not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
        offset = 2
    else:
        offset = 1
    if not rows:
        raise ParseError("no data rows", row=offset)
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRows(f"expected {width} fields, got {len(row)}", row=i + offset)
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"not a number: {cell!r}", row=i + offset, column=j + 1) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value: {cell!r}", row=i + offset, column=j + 1)
            out[i, j] = v
    return out


def write_csv(X, path, header=None):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    lines = []
    if header is not None:
        lines.append(",".join(header))
    for row in X:
        lines.append(",".join(format(v, ".17g") for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _pgm_tokens(data):
    # header fields separated by whitespace; '#' comments run to end of line
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ParseError(f"truncated PGM header at byte {pos}")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte precedes the raster
    return tokens, pos + 1


def read_pgm(path, return_shape=False):
    """Read a binary PGM into a flat signal in ``[0, 1]`` (row-major)."""
    data = Path(path).read_bytes()
    if data[:2] != b"P5":
        raise UnsupportedFormat(f"only binary PGM (P5) is supported, got {data[:2]!r}")
    tokens, start = _pgm_tokens(data)
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise ParseError("malformed PGM header") from None
    if maxval != 255:
        raise UnsupportedFormat(f"only maxval 255 is supported, got {maxval}")
    raster = data[start:start + width * height]
    if len(raster) != width * height:
        raise ParseError(
            f"truncated PGM raster at byte {start + len(raster)}: expected {width * height} pixels, got {len(raster)}"
        )
    signal = np.frombuffer(raster, dtype=np.uint8).astype(np.float64) / 255.0
    if return_shape:
        return signal, (width, height)
    return signal


def write_pgm(signal, width, height, path):
    signal = np.asarray(signal, dtype=np.float64).ravel()
    if signal.size != width * height:
        raise SizeMismatch(f"{signal.size} samples do not fill a {width}x{height} image")
    pixels = np.rint(np.clip(signal, 0.0, 1.0) * 255.0).astype(np.uint8)
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (width, height) + pixels.tobytes())


def read_wav(path, return_rate=False):
    """Read mono 16-bit PCM audio scaled to ``[-1, 1)``."""
    try:
        with wave.open(str(path), "rb") as w:
            channels, width, rate, frames = w.getnchannels(), w.getsampwidth(), w.getframerate(), w.getnframes()
            if channels != 1:
                raise UnsupportedFormat(f"only mono audio is supported, got {channels} channels")
            if width != 2:
                raise UnsupportedFormat(f"only 16-bit samples are supported, got {8 * width}-bit")
            raw = w.readframes(frames)
    except wave.Error as exc:
        raise UnsupportedFormat(f"not a PCM WAV file: {exc}") from exc
    except EOFError as exc:
        raise ParseError(f"truncated WAV file: {exc}") from exc
    if len(raw) != 2 * frames:
        raise ParseError(f"truncated WAV data at sample {len(raw) // 2}: header declares {frames}")
    signal = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if return_rate:
        return signal, rate
    return signal


def write_wav(signal, sample_rate, path):
    signal = np.asarray(signal, dtype=np.float64).ravel()
    ints = np.clip(np.rint(signal * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(sample_rate))
        w.writeframes(ints.tobytes())


@dataclass
class ModelFile:
    m: np.ndarray
    W: np.ndarray
    sigma: np.ndarray
    tau: np.ndarray
    final_log_l: float
    n_train: int
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_fit(cls, result, n_train):
        p = result.params
        return cls(m=p.m, W=p.W, sigma=p.sigma, tau=p.tau, final_log_l=result.final_log_l, n_train=n_train)

    def to_params(self):
        from .gsn import GsnParams

        return GsnParams(m=self.m, W=self.W, sigma=self.sigma, tau=self.tau)


_MODEL_KEYS = ("schema_version", "m", "W", "sigma", "tau", "final_log_l", "n_train")


def save_model(model, path):
    doc = {
        "schema_version": int(model.schema_version),
        "m": [float(v) for v in np.asarray(model.m).ravel()],
        "W": [[float(v) for v in row] for row in np.asarray(model.W)],
        "sigma": [float(v) for v in np.asarray(model.sigma).ravel()],
        "tau": [float(v) for v in np.asarray(model.tau).ravel()],
        "final_log_l": float(model.final_log_l),
        "n_train": int(model.n_train),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_model(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", row=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict):
        raise SchemaMismatch("model file must hold a JSON object")
    missing = [k for k in _MODEL_KEYS if k not in doc]
    if missing:
        raise SchemaMismatch(f"model file is missing keys: {', '.join(missing)}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaMismatch(f"unsupported schema_version {doc['schema_version']!r}")
    try:
        m = np.array(doc["m"], dtype=np.float64)
        W = np.array(doc["W"], dtype=np.float64)
        sigma = np.array(doc["sigma"], dtype=np.float64)
        tau = np.array(doc["tau"], dtype=np.float64)
        final_log_l = float(doc["final_log_l"])
        n_train = int(doc["n_train"])
    except (TypeError, ValueError) as exc:
        raise SchemaMismatch(f"malformed model field: {exc}") from exc
    d = m.size
    if m.ndim != 1 or W.shape != (d, d) or sigma.shape != (d,) or tau.shape != (d,):
        raise SchemaMismatch("inconsistent model dimensions")
    if abs(determinant(W)) <= singular_tol(W):
        raise SingularMatrix("model unmixing matrix is singular")
    return ModelFile(m=m, W=W, sigma=sigma, tau=tau, final_log_l=final_log_l, n_train=n_train)


def read_trace(path):
    """Read a fit trace CSV (``iteration,log_l,grad_norm``) into an ``(k, 3)`` array."""
    try:
        arr = read_csv(path)
    except ParseError as exc:
        raise ParseError(f"invalid trace file: {exc}") from exc
    if arr.shape[1] != 3:
        raise ParseError(f"trace needs 3 columns, got {arr.shape[1]}")
    return arr


def write_trace(trace, path):
    lines = ["iteration,log_l,grad_norm"]
    lines += [f"{int(i)},{f:.17g},{g:.17g}" for i, f, g in trace]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
