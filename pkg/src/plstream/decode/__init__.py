from .config import (
    FRAME_MS,
    FULL,
    OFFLINE_LABEL,
    StreamingConfig,
    fuse_configs,
    sweep_labels,
)
from .search import (
    MAX_SYMBOLS_PER_FRAME,
    BeamHypothesis,
    BeamSearcher,
    ChunkTrace,
    DecodeResult,
    beam_search,
    greedy_search,
    streaming_decode,
)
from .sweep import (
    StreamingDecoder,
    SweepReport,
    SweepRow,
    decode_manifest,
    manifest_wer,
    sweep,
)

__all__ = [
    "FRAME_MS", "FULL", "OFFLINE_LABEL", "StreamingConfig", "fuse_configs", "sweep_labels",
    "MAX_SYMBOLS_PER_FRAME", "BeamHypothesis", "BeamSearcher", "ChunkTrace", "DecodeResult",
    "beam_search", "greedy_search", "streaming_decode", "StreamingDecoder", "SweepReport",
    "SweepRow", "decode_manifest", "manifest_wer", "sweep",
]
