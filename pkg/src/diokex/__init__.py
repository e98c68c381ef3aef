"""Key exchange over a planted Diophantine relation and a trapdoor operator chain."""

from .polyring import Polynomial, RingSpec, poly_add, poly_eval, poly_format, poly_mul, poly_parse, poly_pow
from .quotient import Relation, ideal_equivalent, normal_form, randomize_representation
from .toperator import (
    OperatorChain,
    TOperator,
    apply_numeric,
    apply_symbolic,
    chain_apply_symbolic,
    chain_invert_numeric,
    integer_root,
    inverse_exponent,
    invert_numeric,
)
from .protocol import (
    ExchangeParams,
    Policy,
    Transcript,
    recipient_keygen,
    recipient_reply,
    run_exchange,
    sender_finish,
    sender_respond,
)
from .cryptanalysis import SearchRegion, brute_force_system, non_uniqueness_check

__version__ = "0.1.0"

__all__ = [
    "ExchangeParams",
    "OperatorChain",
    "Policy",
    "Polynomial",
    "Relation",
    "RingSpec",
    "SearchRegion",
    "TOperator",
    "Transcript",
    "apply_numeric",
    "apply_symbolic",
    "brute_force_system",
    "chain_apply_symbolic",
    "chain_invert_numeric",
    "ideal_equivalent",
    "integer_root",
    "inverse_exponent",
    "invert_numeric",
    "non_uniqueness_check",
    "normal_form",
    "poly_add",
    "poly_eval",
    "poly_format",
    "poly_mul",
    "poly_parse",
    "poly_pow",
    "randomize_representation",
    "recipient_keygen",
    "recipient_reply",
    "run_exchange",
    "sender_finish",
    "sender_respond",
]
