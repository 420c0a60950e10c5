"""Python bindings for the ubar dialog toolkit."""

from ._core import (
    REGISTRY_VERSION,
    ConfigError,
    DataError,
    DecoderError,
    Error,
    bleu,
    cli,
    combined,
    corpus_summary,
    delexicalize,
    encode_act,
    encode_belief,
    joint_goal_accuracy,
    lexicalize,
    normalize_value,
    parse_act,
    parse_belief,
    registry,
)

__all__ = [
    "REGISTRY_VERSION",
    "ConfigError",
    "DataError",
    "DecoderError",
    "Error",
    "bleu",
    "cli",
    "combined",
    "corpus_summary",
    "delexicalize",
    "encode_act",
    "encode_belief",
    "joint_goal_accuracy",
    "lexicalize",
    "normalize_value",
    "parse_act",
    "parse_belief",
    "registry",
]
