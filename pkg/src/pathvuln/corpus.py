"""Loading of labeled C function corpora in JSON Lines form.

Each line is a standalone JSON object in the CodeXGLUE defect-detection
convention: a ``func`` field with the function source, an integer
``target`` in {0, 1}, and an optional ``idx`` sample index. Integer labels
are mapped to the string tags ``safe`` (0) and ``vuln`` (1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import InvalidLabel, MalformedRecord

LABELS = ("safe", "vuln")
SAFE, VULN = LABELS


@dataclass(frozen=True)
class FunctionSample:
    """One labeled function: C source text, or an AST object when the
    corpus was loaded in AST-input mode."""

    id: int
    source_text: str | dict
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise InvalidLabel(f"label must be one of {LABELS}, got {self.label!r}")
        if not self.source_text:
            raise MalformedRecord("source_text is empty")


def load_split(path, split_name: str = "", *, ast_input: bool = False) -> list[FunctionSample]:
    """Load one split file; aborts loudly on the first malformed line.

    Ids come from the record's ``idx`` field when present, otherwise from
    the 0-based line index. Samples are returned in file order. With
    ast_input=True the ``func`` field must hold a JSON AST object (see
    parser.node_from_json) rather than source text.
    """
    where = f"{split_name or path}"
    samples = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"{where}: invalid JSON ({exc})", line_no) from exc
            if not isinstance(record, dict) or "func" not in record:
                raise MalformedRecord(f"{where}: record lacks 'func' field", line_no)
            if "target" not in record:
                raise MalformedRecord(f"{where}: record lacks 'target' field", line_no)
            target = record["target"]
            if isinstance(target, bool) or not isinstance(target, int) or target not in (0, 1):
                raise InvalidLabel(f"{where}: target must be 0 or 1, got {target!r}", line_no)
            func = record["func"]
            if ast_input:
                if not isinstance(func, dict) or not func:
                    raise MalformedRecord(f"{where}: 'func' must be an AST object", line_no)
            elif not isinstance(func, str) or not func:
                raise MalformedRecord(f"{where}: 'func' must be non-empty text", line_no)
            sample_id = record.get("idx", line_no - 1)
            if not isinstance(sample_id, int):
                raise MalformedRecord(f"{where}: 'idx' must be an integer", line_no)
            samples.append(FunctionSample(id=sample_id, source_text=func, label=LABELS[target]))
    return samples


def corpus_stats(samples) -> tuple[int, int]:
    """Return (vuln_count, safe_count) for a list of samples."""
    vuln = sum(1 for s in samples if s.label == VULN)
    return vuln, len(samples) - vuln


@dataclass
class SplitCorpus:
    """The three dataset splits, pairwise disjoint by sample id."""

    train: list[FunctionSample]
    validation: list[FunctionSample]
    test: list[FunctionSample]

    def __post_init__(self):
        seen: dict[int, str] = {}
        for name, split in self.items():
            for sample in split:
                if sample.id in seen:
                    raise MalformedRecord(
                        f"sample id {sample.id} appears in both {seen[sample.id]} and {name}"
                    )
                seen[sample.id] = name

    def items(self):
        return (("train", self.train), ("valid", self.validation), ("test", self.test))

    @classmethod
    def load(cls, train_path, valid_path, test_path, *, ast_input: bool = False) -> "SplitCorpus":
        return cls(
            train=load_split(train_path, "train", ast_input=ast_input),
            validation=load_split(valid_path, "valid", ast_input=ast_input),
            test=load_split(test_path, "test", ast_input=ast_input),
        )
