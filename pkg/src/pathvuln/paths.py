"""Mining of AST paths between terminal pairs.

A path runs from one terminal up to the lowest common ancestor and back
down to a second terminal. Its rendering joins node kinds with the
direction glyphs "↑" and "↓"; the rendered string is then collapsed to
an MD5 hex digest so downstream vocabularies store fixed-width keys.

Version history of the rendered format lives in PATH_FORMAT_VERSION:
bump it whenever node kinds, glyphs, or the hash change, because stored
context files and vocabularies are only comparable within one version.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import EmptyBag
from .parser import Ast, AstNode

PATH_FORMAT_VERSION = 1

UP = "↑"
DOWN = "↓"

#: Placeholder that replaces string-literal terminal values, so free text
#: never leaks into token vocabularies.
STRING_PLACEHOLDER = "STR"


@dataclass(frozen=True)
class MiningLimits:
    """Caps applied while mining paths from one AST.

    max_length: largest number of tree edges along a kept path.
    max_width: largest child-index spread between the two arms at the
        common ancestor.
    max_contexts: most contexts kept per function; larger yields are
        downsampled uniformly without replacement.
    """

    max_length: int = 8
    max_width: int = 3
    max_contexts: int = 200

    def __post_init__(self):
        if self.max_length < 1:
            raise ValueError(f"max_length must be >= 1, got {self.max_length}")
        if self.max_width < 1:
            raise ValueError(f"max_width must be >= 1, got {self.max_width}")
        if self.max_contexts < 1:
            raise ValueError(f"max_contexts must be >= 1, got {self.max_contexts}")


@dataclass(frozen=True)
class AstPath:
    """A terminal-to-terminal path.

    kinds holds every node kind along the walk, terminals included;
    lca indexes the common ancestor within kinds. start_index/end_index
    are the terminals' positions in source (preorder) order.
    """

    start: AstNode
    end: AstNode
    kinds: tuple[str, ...]
    lca: int
    start_index: int
    end_index: int
    width: int

    @property
    def length(self) -> int:
        """Edge count of the walk."""
        return len(self.kinds) - 1


class PathContext(NamedTuple):
    """One model input: two terminal values bridging a hashed path."""

    start: str
    path: str
    end: str


@dataclass(frozen=True)
class BagOfContexts:
    """All retained contexts for one labeled function."""

    sample_id: int
    label: str
    contexts: tuple[PathContext, ...]


def path_string(path: AstPath) -> str:
    """Render the walk as kind names joined by direction glyphs."""
    up = UP.join(path.kinds[: path.lca + 1])
    down = "".join(DOWN + kind for kind in path.kinds[path.lca + 1 :])
    return up + down


def hash_path(rendered: str) -> str:
    """MD5 hex digest of the rendered path string (UTF-8)."""
    return hashlib.md5(rendered.encode("utf-8")).hexdigest()


def terminal_token(node: AstNode) -> str:
    """Terminal value as used in contexts; string literals collapse to STR."""
    if node.kind == "StringLiteralExpr":
        return STRING_PLACEHOLDER
    return node.value


def enumerate_paths(ast: Ast, limits: MiningLimits = MiningLimits()) -> list[AstPath]:
    """All terminal pairs whose connecting path satisfies the limits.

    Pairs are ordered by source position: the earlier terminal is the
    start, and results sort by (start_index, end_index). An AST with
    fewer than two terminals yields the empty list.
    """
    # descend[id(node)] = list of (terminal, kinds-from-node-down-to-terminal,
    # terminal preorder index), pruned to depths that can still fit in a path.
    order: dict[int, int] = {}
    for idx, term in enumerate(ast.root.terminals()):
        order[id(term)] = idx

    results: list[AstPath] = []

    def collect(node: AstNode) -> list[tuple[AstNode, tuple[str, ...]]]:
        if node.is_terminal:
            return [(node, (node.kind,))]
        per_child = [collect(child) for child in node.children]
        for a in range(len(per_child)):
            for b in range(a + 1, min(len(per_child), a + limits.max_width + 1)):
                width = b - a
                for t1, kinds1 in per_child[a]:
                    up_len = len(kinds1)  # edges from t1 up to node
                    budget = limits.max_length - up_len
                    if budget < 1:
                        continue
                    for t2, kinds2 in per_child[b]:
                        if len(kinds2) > budget:
                            continue
                        kinds = kinds1 + (node.kind,) + tuple(reversed(kinds2))
                        results.append(
                            AstPath(
                                start=t1,
                                end=t2,
                                kinds=kinds,
                                lca=len(kinds1),
                                start_index=order[id(t1)],
                                end_index=order[id(t2)],
                                width=width,
                            )
                        )
        merged = []
        for rows in per_child:
            for term, kinds in rows:
                if len(kinds) + 1 <= limits.max_length:
                    merged.append((term, kinds + (node.kind,)))
        return merged

    collect(ast.root)
    results.sort(key=lambda p: (p.start_index, p.end_index))
    return results


def extract_bag(
    ast: Ast,
    limits: MiningLimits = MiningLimits(),
    *,
    seed: int = 0,
    sample_id: int = 0,
) -> list[PathContext]:
    """Mine one function's contexts, downsampling deterministically.

    When more than limits.max_contexts paths survive the caps, a subset
    is drawn uniformly without replacement using a stream keyed by
    (seed, sample_id), and the survivors keep enumeration order. Raises
    EmptyBag when nothing survives.
    """
    paths = enumerate_paths(ast, limits)
    if not paths:
        raise EmptyBag("no path contexts under the mining limits")
    if len(paths) > limits.max_contexts:
        rng = np.random.default_rng(np.random.SeedSequence([seed, sample_id]))
        keep = rng.choice(len(paths), size=limits.max_contexts, replace=False)
        paths = [paths[i] for i in sorted(keep.tolist())]
    return [
        PathContext(
            start=terminal_token(p.start),
            path=hash_path(path_string(p)),
            end=terminal_token(p.end),
        )
        for p in paths
    ]
