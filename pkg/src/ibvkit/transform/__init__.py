"""Constructive proof transformations for the deep systems.

Everything in this package rewrites checked derivations into checked
derivations: identity expansion and contraction, the deduction theorem,
context lifting, splitting, context reduction, elimination of upward
rules, and round-trip translation between sequent proofs and deep
proofs.  Each operation validates its input, builds the output through
`DerivationBuilder` (so every intermediate step is re-checked), and
raises a `TransformError` subclass when the input is not of the
promised shape.
"""

from .errors import (
    ContextReduceError,
    SplitError,
    TransformError,
    TranslationError,
)
from .builders import (
    derivation_between,
    imp_functorial,
    seq_functorial,
    tens_functorial,
    tensor_intro,
)
from .identity import contract_identity, derive_up_instance, expand_identity
from .deduction import deduction, lift_context, modus_ponens
from .splitting import SplitResult, atomic_split, recombine, split
from .contextred import DerivationTemplate, context_reduce
from .upelim import eliminate_up

__all__ = [
    "TransformError",
    "SplitError",
    "ContextReduceError",
    "TranslationError",
    "tensor_intro",
    "tens_functorial",
    "seq_functorial",
    "imp_functorial",
    "derivation_between",
    "expand_identity",
    "contract_identity",
    "derive_up_instance",
    "deduction",
    "modus_ponens",
    "lift_context",
    "split",
    "SplitResult",
    "recombine",
    "atomic_split",
    "context_reduce",
    "DerivationTemplate",
    "eliminate_up",
    "sequent_to_deep",
    "deep_to_sequent",
]
