from .bias import BiasEntry, curate_bias_list, read_bias_list
from .graph import ROOT, ContextGraph, FusionCosts, build_graph
from .subword import (
    WORD_START,
    SubwordTokenizer,
    SubwordVocab,
    detokenize,
    tokenize,
    train_subwords,
)

__all__ = [
    "BiasEntry", "curate_bias_list", "read_bias_list", "ROOT", "ContextGraph",
    "FusionCosts", "build_graph", "WORD_START", "SubwordTokenizer", "SubwordVocab",
    "detokenize", "tokenize", "train_subwords",
]
