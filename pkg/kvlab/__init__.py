from .cache import ToyCache, attention_step, build_cache, excise_and_rotate
from .rope import RopeParams, rope_apply
from .verify import EquivalenceReport, random_configs, verify_equivalence

__all__ = [
    "EquivalenceReport",
    "RopeParams",
    "ToyCache",
    "attention_step",
    "build_cache",
    "excise_and_rotate",
    "random_configs",
    "rope_apply",
    "verify_equivalence",
]
