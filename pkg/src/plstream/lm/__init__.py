from .arpa import ArpaFormatError, format_arpa, parse_arpa, read_arpa, write_arpa
from .ngram import BOS, EOS, UNK, NGramLM, count_ngrams, logprob, perplexity, train

__all__ = [
    "ArpaFormatError", "format_arpa", "parse_arpa", "read_arpa", "write_arpa",
    "BOS", "EOS", "UNK", "NGramLM", "count_ngrams", "logprob", "perplexity", "train",
]
