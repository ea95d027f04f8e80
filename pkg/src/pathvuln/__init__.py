"""Vulnerability detection for C functions via attention over AST paths."""

from .corpus import FunctionSample, SplitCorpus, load_split
from .errors import PathVulnError
from .evaluation import Metrics, evaluate
from .lexer import Token, tokenize
from .network import ModelParams, backward, forward, init_params
from .parser import Ast, AstNode, parse_function, parse_source
from .paths import BagOfContexts, MiningLimits, PathContext, enumerate_paths, extract_bag
from .training import TrainConfig, train
from .vocab import Vocabulary, build_vocabularies, encode_bag

__version__ = "0.1.0"

__all__ = [
    "Ast",
    "AstNode",
    "BagOfContexts",
    "FunctionSample",
    "Metrics",
    "MiningLimits",
    "ModelParams",
    "PathContext",
    "PathVulnError",
    "SplitCorpus",
    "Token",
    "TrainConfig",
    "Vocabulary",
    "backward",
    "build_vocabularies",
    "encode_bag",
    "enumerate_paths",
    "evaluate",
    "extract_bag",
    "forward",
    "init_params",
    "load_split",
    "parse_function",
    "parse_source",
    "tokenize",
    "train",
    "__version__",
]
