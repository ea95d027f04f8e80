"""Synthetic labeled corpus for end-to-end pipeline checks.

Generates small C functions where the vulnerable class always routes a
value through one of a fixed set of unsafe sink calls and the safe class
calls only benign helpers. The signal is fully recoverable from path
contexts, so a working pipeline should separate the classes almost
perfectly; a failure to do so points at the pipeline, not the data.
"""

from __future__ import annotations

import json
import os

import numpy as np

SINKS = (
    "copy_unchecked",
    "raw_memmove",
    "exec_shell",
    "write_past_end",
    "trust_length_field",
)

BENIGN = (
    "log_event",
    "update_stats",
    "checked_copy",
    "clamp_range",
    "emit_metric",
    "validate_input",
    "queue_push",
    "refresh_cache",
)

_VARS = ("acc", "len", "idx", "tmp", "count", "left", "size", "pos")
_FUNCS = ("handle_packet", "read_frame", "scan_entry", "merge_block",
          "fill_buffer", "parse_chunk", "apply_delta", "sync_state")
_TYPES = ("int", "long", "unsigned")


def _make_source(rng: np.random.Generator, index: int, vulnerable: bool) -> str:
    var = _VARS[rng.integers(len(_VARS))]
    other = _VARS[rng.integers(len(_VARS))]
    fname = f"{_FUNCS[rng.integers(len(_FUNCS))]}_{index}"
    rtype = _TYPES[rng.integers(len(_TYPES))]
    call = (SINKS if vulnerable else BENIGN)[
        rng.integers(len(SINKS) if vulnerable else len(BENIGN))
    ]
    k1 = int(rng.integers(1, 64))
    k2 = int(rng.integers(1, 64))
    template = int(rng.integers(4))
    if template == 0:
        body = (
            f"    {rtype} {var} = {k1};\n"
            f"    {var} = {var} + n;\n"
            f"    {call}({var});\n"
            f"    return {var};\n"
        )
    elif template == 1:
        body = (
            f"    {rtype} {var} = n;\n"
            f"    if ({var} > {k1}) {{\n"
            f"        {call}({var}, {k2});\n"
            f"    }}\n"
            f"    return {var};\n"
        )
    elif template == 2:
        body = (
            f"    {rtype} {var} = {k1};\n"
            f"    while ({var} < n) {{\n"
            f"        {var} = {var} * 2;\n"
            f"    }}\n"
            f"    {call}({var});\n"
            f"    return {var} - {k2};\n"
        )
    else:
        body = (
            f"    {rtype} {var} = n % {k1};\n"
            f"    {rtype} {other}2 = {call}({var});\n"
            f"    return {other}2 + {k2};\n"
        )
    return f"{rtype} {fname}({rtype} n) {{\n{body}}}\n"


def generate_corpus(count: int = 2000, *, seed: int = 7):
    """Build `count` labeled records, half vulnerable, deterministic in seed.

    Returns a list of {"idx", "func", "target"} dicts in id order.
    """
    rng = np.random.default_rng(seed)
    records = []
    for index in range(count):
        vulnerable = index % 2 == 1
        records.append(
            {
                "idx": index,
                "func": _make_source(rng, index, vulnerable),
                "target": int(vulnerable),
            }
        )
    return records


def split_records(records, *, train=0.8, valid=0.1):
    """Stratified split preserving id order inside each split."""
    by_class: dict[int, list] = {0: [], 1: []}
    for rec in records:
        by_class[rec["target"]].append(rec)
    out = {"train": [], "valid": [], "test": []}
    for recs in by_class.values():
        n = len(recs)
        n_train = int(n * train)
        n_valid = int(n * valid)
        out["train"].extend(recs[:n_train])
        out["valid"].extend(recs[n_train : n_train + n_valid])
        out["test"].extend(recs[n_train + n_valid :])
    for split in out.values():
        split.sort(key=lambda r: r["idx"])
    return out


def write_jsonl(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def write_synthetic_splits(out_dir, count: int = 2000, *, seed: int = 7) -> dict:
    """Generate and write train/valid/test JSONL files; returns their paths."""
    records = generate_corpus(count, seed=seed)
    splits = split_records(records)
    paths = {}
    for name, recs in splits.items():
        path = os.path.join(out_dir, f"{name}.jsonl")
        write_jsonl(recs, path)
        paths[name] = path
    return paths
