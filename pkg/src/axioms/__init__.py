# Axioms package

from .garp import GarpResult, RevealedPreferenceRelation, check_garp, revealed_preference
from .sarseu import (
    BalancedSequence,
    SarseuResult,
    balanced_sequences,
    check_sarseu,
    default_max_pairs,
    is_balanced,
    sequence_product,
)
from .lp_oracle import LpOracleResult, ordered_pairs, sarseu_lp_oracle
