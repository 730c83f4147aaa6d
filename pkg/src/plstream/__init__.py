"""Streaming transducer prototyping toolkit.

Pseudo-label filtering and selection, word n-gram language models,
Aho-Corasick shallow fusion of LM weights and bias phrases, reference
RNN-T/CTC losses and chunk-wise streaming beam search over a toy
table-driven transducer.
"""

__version__ = "0.1.0"
