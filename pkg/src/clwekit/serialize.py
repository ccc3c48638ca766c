"""Newline-delimited JSON sample files.

Line 1 is a header record carrying the format version, the sample kind, the
generation parameters and the seed; every following line is one sample record
{"a": [...], "b": ...} (vector-only streams omit "b"). Floats are written with
17 significant digits so files round-trip bit-faithfully and diff cleanly.
"""

import json

import numpy as np

from .distributions import ClweBatch, LweBatch

__all__ = [
    "FORMAT_VERSION",
    "dumps_record",
    "write_samples",
    "read_samples",
    "batch_to_records",
    "records_to_batch",
]

FORMAT_VERSION = 1


def _enc(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, np.ndarray):
        v = v.tolist()
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_enc(u) for u in v) + "]"
    if isinstance(v, dict):
        return "{" + ",".join(json.dumps(str(k)) + ":" + _enc(u) for k, u in v.items()) + "}"
    raise TypeError(f"cannot serialize {type(v)!r}")


def dumps_record(obj: dict) -> str:
    return _enc(obj)


def batch_to_records(batch):
    if isinstance(batch, LweBatch):
        meta = {"kind": "lwe", "q": batch.q, "a_domain": batch.a_domain, "b_domain": batch.b_domain}
        rows = ({"a": batch.a[i], "b": batch.b[i]} for i in range(batch.m))
    elif isinstance(batch, ClweBatch):
        meta = {"kind": "clwe"}
        rows = ({"a": batch.a[i], "b": batch.b[i]} for i in range(batch.m))
    else:
        arr = np.asarray(batch)
        meta = {"kind": "vector"}
        rows = ({"a": arr[i]} for i in range(arr.shape[0]))
    return meta, rows


def write_samples(path, batch, params: dict, seed) -> None:
    meta, rows = batch_to_records(batch)
    header = {"record": "header", "format_version": FORMAT_VERSION, "seed": int(seed)}
    header.update(meta)
    header["params"] = params
    with open(path, "w") as fh:
        fh.write(dumps_record(header) + "\n")
        for row in rows:
            fh.write(dumps_record(row) + "\n")


def read_samples(path):
    """Returns (header dict, batch). The batch type follows the header kind."""
    with open(path) as fh:
        header = json.loads(fh.readline())
        if header.get("record") != "header":
            raise ValueError(f"{path}: first line is not a header record")
        if header.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported format version {header.get('format_version')}")
        a_rows, b_rows = [], []
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            a_rows.append(rec["a"])
            if "b" in rec:
                b_rows.append(rec["b"])
    return header, _assemble(header, a_rows, b_rows)


def records_to_batch(header, a_rows, b_rows):
    return _assemble(header, a_rows, b_rows)


def _assemble(header, a_rows, b_rows):
    kind = header.get("kind")
    if kind == "vector":
        return np.asarray(a_rows, dtype=float)
    if kind == "clwe":
        return ClweBatch(np.asarray(a_rows, dtype=float), np.asarray(b_rows, dtype=float))
    if kind == "lwe":
        a_domain = header["a_domain"]
        b_domain = header["b_domain"]
        a = np.asarray(a_rows, dtype=np.int64 if a_domain == "zq" else float)
        b = np.asarray(b_rows, dtype=np.int64 if b_domain == "zq" else float)
        return LweBatch(a, b, header["q"], a_domain, b_domain)
    raise ValueError(f"unknown sample kind {kind!r}")
