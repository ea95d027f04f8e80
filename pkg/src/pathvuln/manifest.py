"""Run manifests: a JSON record of what a CLI invocation produced.

Manifests list every output file with its SHA-256 so a run can later be
checked for tampering or partial copies. They deliberately contain no
timestamps: two identical runs must produce identical manifests.
"""

from __future__ import annotations

import hashlib
import json
import os

from .errors import ArtifactMismatch

MANIFEST_VERSION = 1


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        while True:
            block = fh.read(1 << 20)
            if not block:
                break
            h.update(block)
    return h.hexdigest()


def write_manifest(path, *, command: str, settings: dict, outputs: list) -> dict:
    """Record command settings and output digests next to the outputs."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    for out in sorted(str(p) for p in outputs):
        entries.append(
            {
                "path": os.path.relpath(out, base),
                "sha256": file_sha256(out),
                "bytes": os.path.getsize(out),
            }
        )
    record = {
        "manifest_version": MANIFEST_VERSION,
        "command": command,
        "settings": settings,
        "outputs": entries,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return record


def verify_manifest(path) -> dict:
    """Re-hash every listed output; raises ArtifactMismatch on any drift."""
    with open(path, encoding="utf-8") as fh:
        record = json.load(fh)
    base = os.path.dirname(os.path.abspath(path))
    problems = []
    for entry in record.get("outputs", []):
        target = os.path.join(base, entry["path"])
        if not os.path.exists(target):
            problems.append(f"{entry['path']}: missing")
            continue
        actual = file_sha256(target)
        if actual != entry["sha256"]:
            problems.append(f"{entry['path']}: sha256 {actual} != recorded {entry['sha256']}")
    if problems:
        raise ArtifactMismatch("; ".join(problems))
    return record
