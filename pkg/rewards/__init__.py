from .chunking import chunk_trajectory
from .export import export_instances, training_record
from .instance import CandidateInstance
from .scoring import filter_retain, score_and_mark, score_candidate
from .synthesis import SynthesisResult, synthesize_chain, synthesize_sequential

__all__ = [
    "CandidateInstance",
    "SynthesisResult",
    "chunk_trajectory",
    "export_instances",
    "filter_retain",
    "score_and_mark",
    "score_candidate",
    "synthesize_chain",
    "synthesize_sequential",
    "training_record",
]
