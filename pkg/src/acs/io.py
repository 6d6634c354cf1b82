"""On-disk formats: binary matrices, versioned CSV, models, configs.

Matrix container ("ACS1"): little-endian, magic bytes ``ACS1``, one
dtype byte (1 = u8 payload for binary/small-integer states, 2 = f64 for
reals), u32 rows, u32 cols, then the row-major payload.  Models persist
as one container per tensor plus a JSON sidecar naming each tensor and
its dims.  CSV files carry a ``# key: value`` comment preamble with a
versioned schema tag, the config hash, and the seed, so every run is
reconstructible from its outputs; readers reject unknown major
versions.  Configs are JSON objects hashed over their canonical
serialization.
"""

import hashlib
import json
import os
import re
import struct

import numpy as np

__all__ = [
    "ConfigError",
    "VerificationError",
    "write_matrix",
    "read_matrix",
    "save_model",
    "load_model",
    "write_csv",
    "read_csv",
    "load_config",
    "config_hash",
    "write_json",
]

MAGIC = b"ACS1"
_DTYPE_U8 = 1
_DTYPE_F64 = 2


class ConfigError(Exception):
    """Invalid or unreadable run configuration."""


class VerificationError(Exception):
    """A theory verification asserted by a run failed."""


def write_matrix(path, arr, kind=None):
    """Write a 2-D array as an ACS1 container.

    Args:
        path: Destination file.
        arr: (rows, cols) array.
        kind: "u8" or "f64"; inferred from the dtype when None
            (integer/bool kinds map to u8).
    """
    arr = np.atleast_2d(np.asarray(arr))
    if arr.ndim != 2:
        raise ValueError("only 2-D matrices supported")
    if kind is None:
        kind = "u8" if arr.dtype.kind in "iub" else "f64"
    if kind == "u8":
        payload = arr.astype(np.uint8)
        if not np.array_equal(payload.astype(arr.dtype), arr):
            raise ValueError("values do not fit a u8 payload")
        code = _DTYPE_U8
    elif kind == "f64":
        payload = arr.astype("<f8")
        code = _DTYPE_F64
    else:
        raise ValueError("kind must be 'u8' or 'f64'")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BII", code, arr.shape[0], arr.shape[1]))
        fh.write(payload.tobytes(order="C"))


def read_matrix(path):
    """Read an ACS1 container; returns uint8 or float64 per the header."""
    with open(path, "rb") as fh:
        head = fh.read(13)
        if len(head) != 13 or head[:4] != MAGIC:
            raise ValueError("%s: not an ACS1 file" % (path,))
        code, rows, cols = struct.unpack("<BII", head[4:])
        if code == _DTYPE_U8:
            dt, itemsize = np.uint8, 1
        elif code == _DTYPE_F64:
            dt, itemsize = np.dtype("<f8"), 8
        else:
            raise ValueError("%s: unknown dtype code %d" % (path, code))
        payload = fh.read(rows * cols * itemsize)
    if len(payload) != rows * cols * itemsize:
        raise ValueError("%s: truncated payload" % (path,))
    return np.frombuffer(payload, dtype=dt).reshape(rows, cols).copy()


def save_model(base, model, meta=None):
    """Persist an RbmModel as per-tensor containers plus a JSON sidecar.

    Writes ``<base>.W.acs1``, ``<base>.a.acs1``, ``<base>.b.acs1`` and
    ``<base>.json``.  Vectors store as single-row matrices.

    Args:
        base: Path prefix (no extension).
        model: RbmModel.
        meta: Extra sidecar entries (e.g. config hash, seed).

    Returns:
        Path of the sidecar file.
    """
    tensors = {"W": model.W, "a": model.a[None, :], "b": model.b[None, :]}
    sidecar = {
        "format": "acs1-model",
        "version": "1.0",
        "dims": {"n_hidden": model.n_hidden, "n_visible": model.n_visible},
        "tensors": {},
    }
    for name, arr in tensors.items():
        fname = "%s.%s.acs1" % (os.path.basename(base), name)
        write_matrix(os.path.join(os.path.dirname(base) or ".", fname), arr, kind="f64")
        sidecar["tensors"][name] = {"file": fname, "rows": arr.shape[0], "cols": arr.shape[1]}
    if meta:
        sidecar.update(meta)
    path = base + ".json"
    write_json(path, sidecar)
    return path


def load_model(sidecar_path):
    """Load an RbmModel written by :func:`save_model`."""
    from acs.targets import RbmModel

    with open(sidecar_path) as fh:
        sidecar = json.load(fh)
    if sidecar.get("format") != "acs1-model":
        raise ValueError("%s: not a model sidecar" % (sidecar_path,))
    if sidecar.get("version", "").split(".")[0] != "1":
        raise ValueError("%s: unsupported model version" % (sidecar_path,))
    root = os.path.dirname(sidecar_path) or "."
    got = {}
    for name in ("W", "a", "b"):
        entry = sidecar["tensors"][name]
        arr = read_matrix(os.path.join(root, entry["file"]))
        if arr.shape != (entry["rows"], entry["cols"]):
            raise ValueError("tensor %s: shape mismatch" % (name,))
        got[name] = arr
    return RbmModel(got["W"], got["a"][0], got["b"][0])


def write_csv(path, schema, meta, header, rows):
    """Write a CSV with a comment preamble.

    Args:
        path: Destination file.
        schema: Versioned tag like "acs.sample.v1".
        meta: Ordered key/value preamble entries (config_sha256, seed, ...).
        header: Column names.
        rows: Iterable of row sequences; values format via str, floats
            via repr for round-trip exactness.
    """
    with open(path, "w") as fh:
        fh.write("# schema: %s\n" % (schema,))
        for key, value in meta.items():
            fh.write("# %s: %s\n" % (key, value))
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def read_csv(path, expect_family=None):
    """Read a CSV written by :func:`write_csv`.

    Args:
        path: Source file.
        expect_family: Schema name without version (e.g. "acs.sample");
            mismatched families or unknown major versions raise.

    Returns:
        (meta dict including "schema", header list, rows as lists of
        strings).
    """
    meta, header, rows = {}, None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                meta[key.strip()] = value.strip()
            elif header is None:
                header = line.split(",")
            elif line:
                rows.append(line.split(","))
    schema = meta.get("schema", "")
    m = re.fullmatch(r"(.+)\.v(\d+)", schema)
    if not m:
        raise ValueError("%s: missing schema tag" % (path,))
    if expect_family is not None and m.group(1) != expect_family:
        raise ValueError("%s: schema %s, expected %s.*" % (path, schema, expect_family))
    if int(m.group(2)) != 1:
        raise ValueError("%s: unsupported schema major version %s" % (path, m.group(2)))
    return meta, header, rows


def load_config(path):
    """Load a JSON config; raises ConfigError with line/column context."""
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            "%s: line %d column %d: %s" % (path, exc.lineno, exc.colno, exc.msg)
        ) from exc
    if not isinstance(cfg, dict):
        raise ConfigError("%s: top level must be an object" % (path,))
    return cfg


def config_hash(cfg):
    """sha256 of the canonical JSON serialization of a config dict."""
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def write_json(path, obj):
    """Deterministic JSON dump (sorted keys, trailing newline)."""
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
