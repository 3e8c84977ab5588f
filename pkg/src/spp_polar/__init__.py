"""Sparsely pre-transformed polar codes: construction, encoding, list decoding and analysis."""

from .codec import CodeSpec, PreTransform, encode
from .construction import MergedPairs, RateProfile, rate_profile, select_type2_pairs
from .decoder import DecodeResult, scl_decode, scl_decode_batch
from .polar_core import Reliability, bec_reliability, ga_reliability, load_5g_sequence, polar_transform

__version__ = "0.1.0"

__all__ = [
    "CodeSpec",
    "DecodeResult",
    "MergedPairs",
    "PreTransform",
    "RateProfile",
    "Reliability",
    "bec_reliability",
    "encode",
    "ga_reliability",
    "load_5g_sequence",
    "polar_transform",
    "rate_profile",
    "scl_decode",
    "scl_decode_batch",
    "select_type2_pairs",
]
