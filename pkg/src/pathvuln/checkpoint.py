"""Deterministic binary checkpoints for model parameters.

Layout: a magic line, a JSON header line (sorted keys, compact
separators), then the raw little-endian float64 bytes of every array in
the order listed by the header's manifest. The same parameters always
serialize to identical bytes, which the byte-reproducibility tests rely
on; a zip-based container would time-stamp its members and break that.

The header records the vocabulary digest so a checkpoint can refuse to
run against tables other than the ones it was trained with.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import CheckpointError, VocabMismatch
from .network import FIELD_ORDER, ModelParams
from .optimizer import AdamState

MAGIC = b"#pathvuln-checkpoint 1\n"
FORMAT_VERSION = 1


def _manifest(params: ModelParams) -> list[dict]:
    entries = []
    arrays = params.arrays()
    for name in FIELD_ORDER:
        entries.append({"name": name, "shape": list(arrays[name].shape)})
    return entries


def save_checkpoint(
    path,
    params: ModelParams,
    adam: AdamState,
    *,
    vocab_digest: str,
    config: dict,
) -> None:
    header = {
        "adam_t": adam.t,
        "arrays": _manifest(params),
        "config": config,
        "format": FORMAT_VERSION,
        "vocab_digest": vocab_digest,
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":"))
    arrays = params.arrays()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(blob.encode("utf-8") + b"\n")
        for name in FIELD_ORDER:
            fh.write(np.ascontiguousarray(arrays[name], dtype="<f8").tobytes())
        for slot in (adam.m, adam.v):
            for name in FIELD_ORDER:
                fh.write(np.ascontiguousarray(slot[name], dtype="<f8").tobytes())


def load_checkpoint(path, *, expected_digest: str | None = None):
    """Read a checkpoint; returns (params, adam_state, header dict).

    When expected_digest is given, a mismatch against the stored
    vocabulary digest raises VocabMismatch naming both digests.
    """
    with open(path, "rb") as fh:
        magic = fh.readline()
        if magic != MAGIC:
            raise CheckpointError(f"{path}: not a model checkpoint (bad magic)")
        try:
            header = json.loads(fh.readline().decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CheckpointError(f"{path}: unreadable checkpoint header: {exc}") from None
        if header.get("format") != FORMAT_VERSION:
            raise CheckpointError(
                f"{path}: unsupported checkpoint format {header.get('format')!r}"
            )
        if expected_digest is not None and header.get("vocab_digest") != expected_digest:
            raise VocabMismatch(
                "checkpoint was trained against different vocabularies "
                f"(checkpoint digest {header.get('vocab_digest')}, "
                f"loaded tables digest {expected_digest})"
            )
        manifest = header.get("arrays")
        names = [entry.get("name") for entry in manifest or []]
        if names != list(FIELD_ORDER):
            raise CheckpointError(f"{path}: unexpected array manifest {names}")

        def read_arrays():
            out = {}
            for entry in manifest:
                shape = tuple(entry["shape"])
                count = int(np.prod(shape)) if shape else 1
                raw = fh.read(count * 8)
                if len(raw) != count * 8:
                    raise CheckpointError(f"{path}: truncated checkpoint")
                out[entry["name"]] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
            return out

        params = ModelParams(**read_arrays())
        adam = AdamState(m=read_arrays(), v=read_arrays(), t=int(header.get("adam_t", 0)))
        trailing = fh.read(1)
        if trailing:
            raise CheckpointError(f"{path}: trailing bytes after checkpoint payload")
    return params, adam, header
