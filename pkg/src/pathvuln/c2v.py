"""Context-file serialization and the corpus-level extraction pipeline.

The .c2v text format: a header line `#c2v-format 1`, then one line per
function of the form

    <label> <start,path,end> <start,path,end> ...

Fields are space-separated and the three members of each context are
comma-separated, so tokens containing spaces or commas cannot be
represented; such contexts are dropped at write time with a warning.
"""

from __future__ import annotations

import logging
import multiprocessing
from collections import Counter
from dataclasses import dataclass

from .corpus import FunctionSample
from .errors import (
    EmptyBag,
    LexError,
    MalformedRecord,
    ParseError,
    ParseUnsupported,
)
from .lexer import tokenize
from .parser import ast_from_json, parse_function
from .paths import BagOfContexts, MiningLimits, PathContext, extract_bag
from .vocab import TAGS

log = logging.getLogger(__name__)

C2V_HEADER = "#c2v-format 1"


def _representable(token: str) -> bool:
    return not any(ch in token for ch in " ,\t\n\r")


def write_c2v(bags, path) -> int:
    """Write bags to a .c2v file; returns the number of dropped contexts."""
    dropped = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(C2V_HEADER + "\n")
        for bag in bags:
            fields = [bag.label]
            for ctx in bag.contexts:
                if _representable(ctx.start) and _representable(ctx.end):
                    fields.append(f"{ctx.start},{ctx.path},{ctx.end}")
                else:
                    dropped += 1
            fh.write(" ".join(fields) + "\n")
    if dropped:
        log.warning("dropped %d context(s) with unrepresentable tokens while writing %s",
                    dropped, path)
    return dropped


def read_c2v(path) -> list[BagOfContexts]:
    """Load a .c2v file; sample ids are assigned by file position."""
    bags = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != C2V_HEADER:
            raise MalformedRecord(f"{path}: unrecognized context-file header {header!r}", 1)
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split(" ")
            label = fields[0]
            if label not in TAGS:
                raise MalformedRecord(f"{path}: unknown label {label!r}", lineno)
            contexts = []
            for fieldno, item in enumerate(fields[1:], start=2):
                parts = item.split(",")
                if len(parts) != 3 or not all(parts):
                    raise MalformedRecord(
                        f"{path}: field {fieldno} is not a start,path,end triple", lineno
                    )
                contexts.append(PathContext(*parts))
            bags.append(
                BagOfContexts(sample_id=lineno - 2, label=label, contexts=tuple(contexts))
            )
    return bags


@dataclass
class ExtractionReport:
    """Bookkeeping from one split's extraction pass."""

    total: int = 0
    kept: int = 0
    skipped: Counter = None

    def __post_init__(self):
        if self.skipped is None:
            self.skipped = Counter()


def _mine_one(args):
    sample, limits, seed, from_ast_json = args
    try:
        if from_ast_json:
            ast = ast_from_json(sample.source_text)
        else:
            ast = parse_function(tokenize(sample.source_text))
        contexts = extract_bag(ast, limits, seed=seed, sample_id=sample.id)
    except LexError:
        return ("lex_error", None)
    except ParseUnsupported:
        return ("unsupported", None)
    except ParseError:
        return ("parse_error", None)
    except EmptyBag:
        return ("empty_bag", None)
    return (None, BagOfContexts(sample.id, sample.label, tuple(contexts)))


def extract_split(
    samples: list[FunctionSample],
    limits: MiningLimits = MiningLimits(),
    *,
    seed: int = 0,
    workers: int = 1,
    from_ast_json: bool = False,
) -> tuple[list[BagOfContexts], ExtractionReport]:
    """Mine every sample in a split, skipping the unparsable ones.

    Samples that fail lexing/parsing, use unsupported syntax, or yield no
    contexts are dropped and tallied in the report. Output order follows
    input order regardless of worker count.
    """
    report = ExtractionReport(total=len(samples))
    jobs = [(s, limits, seed, from_ast_json) for s in samples]
    if workers > 1 and len(jobs) > 1:
        with multiprocessing.Pool(processes=workers) as pool:
            outcomes = pool.map(_mine_one, jobs, chunksize=64)
    else:
        outcomes = [_mine_one(job) for job in jobs]
    bags = []
    for reason, bag in outcomes:
        if bag is None:
            report.skipped[reason] += 1
        else:
            bags.append(bag)
    report.kept = len(bags)
    return bags, report


def mine_sample(sample: FunctionSample, limits: MiningLimits = MiningLimits(),
                *, seed: int = 0, from_ast_json: bool = False) -> BagOfContexts:
    """Mine a single sample, raising instead of tallying on failure."""
    if from_ast_json:
        ast = ast_from_json(sample.source_text)
    else:
        ast = parse_function(tokenize(sample.source_text))
    contexts = extract_bag(ast, limits, seed=seed, sample_id=sample.id)
    return BagOfContexts(sample.id, sample.label, tuple(contexts))
