"""Empathetic quarantine check-in dialogue core."""

from ._core import (
    DomainError,
    DuplicateSession,
    InvalidConfig,
    MissingSlot,
    NoraError,
    ProtocolError,
    binomial_tail,
    binomial_tail_exact,
    predict_expression,
    replay,
    sample_gaze,
    score_turn,
    select_gestures,
    significance_table,
    understand,
)

__all__ = [
    "DomainError",
    "DuplicateSession",
    "InvalidConfig",
    "MissingSlot",
    "NoraError",
    "ProtocolError",
    "binomial_tail",
    "binomial_tail_exact",
    "predict_expression",
    "replay",
    "sample_gaze",
    "score_turn",
    "select_gestures",
    "significance_table",
    "understand",
]
