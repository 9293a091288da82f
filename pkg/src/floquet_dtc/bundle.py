"""Result bundles: columnar text files plus a hashing manifest.

Every output file is plain tab-separated text with a one-line header and a
fixed column order, written atomically (temp file + rename).  Floats are
serialized with repr, which round-trips exactly, so re-running a scenario
reproduces every file byte for byte.  Timestamps exist only inside
manifest.json and are excluded from the input hash.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


class BundleError(RuntimeError):
    """Missing or malformed bundle content."""


def format_value(v) -> str:
    if isinstance(v, (np.floating, float)):
        x = float(v)
        if np.isnan(x):
            return "nan"
        return repr(x)
    if isinstance(v, (np.integer, int)):
        return str(int(v))
    return str(v)


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def table_text(header: list[str], columns: list) -> str:
    """Serialize equal-length columns under a one-line header."""
    cols = [np.asarray(c) for c in columns]
    if len(cols) != len(header):
        raise ValueError("header and column count differ")
    n = cols[0].shape[0] if cols else 0
    for c in cols:
        if c.shape[0] != n:
            raise ValueError("columns have unequal lengths")
    lines = ["\t".join(header)]
    for i in range(n):
        lines.append("\t".join(format_value(c[i]) for c in cols))
    return "\n".join(lines) + "\n"


def read_table(path) -> dict[str, np.ndarray]:
    """Read a columnar text file into name -> float array (strings stay objects)."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise BundleError(f"cannot read table {path}: {exc}") from exc
    if not lines:
        raise BundleError(f"empty table: {path}")
    header = lines[0].split("\t")
    raw_cols = [[] for _ in header]
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != len(header):
            raise BundleError(f"ragged row in {path}: {line!r}")
        for cell, col in zip(parts, raw_cols):
            col.append(cell)
    out = {}
    for name, col in zip(header, raw_cols):
        try:
            out[name] = np.array([float(c) for c in col])
        except ValueError:
            out[name] = np.array(col, dtype=object)
    return out


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sanitize_json(obj):
    """Make a payload strictly-JSON safe: numpy scalars to Python, NaN to null."""
    if isinstance(obj, dict):
        return {str(k): sanitize_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize_json(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    return obj


class BundleWriter:
    """Accumulates files for one scenario run and finishes with a manifest."""

    def __init__(self, out_dir):
        self.root = Path(out_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self._files: dict[str, str] = {}

    def write_text(self, relpath: str, text: str) -> None:
        atomic_write_text(self.root / relpath, text)
        self._files[relpath] = sha256_text(text)

    def write_table(self, relpath: str, header: list[str], columns: list) -> None:
        self.write_text(relpath, table_text(header, columns))

    def write_json(self, relpath: str, payload) -> None:
        self.write_text(relpath,
                        json.dumps(sanitize_json(payload), indent=2, sort_keys=True) + "\n")

    def finish(self, *, config_text: str, seed: int, extra: dict | None = None) -> dict:
        """Write manifest.json covering the config, seed and all emitted files."""
        from . import __version__

        manifest = {
            "schema_version": SCHEMA_VERSION,
            "package_version": __version__,
            "numpy_version": np.__version__,
            "created_utc": datetime.now(timezone.utc).isoformat(),
            "seed": int(seed),
            "config_sha256": sha256_text(config_text),
            "input_hash": sha256_text(f"{config_text}\nseed={int(seed)}"),
            "files": dict(sorted(self._files.items())),
        }
        if extra:
            manifest["summary"] = sanitize_json(extra)
        atomic_write_text(self.root / "manifest.json",
                          json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return manifest


def read_manifest(bundle_dir) -> dict:
    path = Path(bundle_dir) / "manifest.json"
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise BundleError(f"cannot read manifest: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BundleError(f"malformed manifest {path}: {exc}") from exc
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise BundleError(
            f"bundle {bundle_dir}: schema version {manifest.get('schema_version')} "
            f"!= expected {SCHEMA_VERSION}")
    return manifest


def verify_bundle(bundle_dir) -> list[str]:
    """Return relpaths whose content no longer matches the manifest hashes."""
    root = Path(bundle_dir)
    manifest = read_manifest(root)
    stale = []
    for rel, digest in manifest["files"].items():
        p = root / rel
        if not p.exists() or sha256_text(p.read_text(encoding="utf-8")) != digest:
            stale.append(rel)
    return stale
