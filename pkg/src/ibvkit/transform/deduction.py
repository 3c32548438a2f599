"""Deduction theorem, modus ponens, and context lifting."""

from ..derivations import DeepDerivation, DerivationBuilder, check_derivation, concat
from ..formulas import (
    HOLE,
    POSITIVE,
    context_sign,
    find_hole,
    render_formula,
    unit,
)
from .builders import imp_functorial, seq_functorial, tens_functorial
from .errors import TransformError
from .identity import contract_identity, expand_identity

CLOSE = "close"
OPEN = "open"


def deduction(direction: str, d: DeepDerivation) -> DeepDerivation:
    """Move between a derivation A => B and a proof of A -o B.

    `close` wraps a positively stated derivation into a proof of the
    implication; `open` unwraps a proof of an implication into a
    derivation from its antecedent.  Both directions live in the
    symmetric system: close grafts the derivation under an expanded
    identity, open cuts against a contracted one.
    """
    direction = direction.lower()
    if direction == CLOSE:
        return _close(d)
    if direction == OPEN:
        return _open(d)
    raise TransformError(f"unknown deduction direction {direction!r}")


def _checked(d: DeepDerivation, what: str) -> None:
    rep = check_derivation(d, "sibv")
    if not rep.ok:
        raise TransformError(f"{what} does not check: {rep.reason}")


def _close(d: DeepDerivation) -> DeepDerivation:
    if d.ambient != POSITIVE:
        raise TransformError("close needs a positively stated derivation")
    _checked(d, "close input")
    b = DerivationBuilder(unit(), "sibv")
    b.graft(expand_identity(d.premise), ())
    b.graft(d, (1,))
    return b.derivation()


def _open(d: DeepDerivation) -> DeepDerivation:
    if d.premise != unit() or d.ambient != POSITIVE:
        raise TransformError("open needs a proof of an implication")
    _checked(d, "open input")
    c = d.conclusion
    if c[0] != "impl":
        raise TransformError(f"open needs an implication, got {render_formula(c)}")
    a = c[1]
    b = DerivationBuilder(a, "sibv")
    b.step("u_down_tens")
    b.graft(d, (0,))
    b.step("comm_tens")
    b.step("s_L_pos")
    b.graft(contract_identity(a), (0,))
    b.step("u_up_imp")
    return b.derivation()


def modus_ponens(proof_impl: DeepDerivation, proof_arg: DeepDerivation) -> DeepDerivation:
    """Combine proofs of A -o B and A into a proof of B."""
    c = proof_impl.conclusion
    if c[0] != "impl":
        raise TransformError("modus ponens needs a proof of an implication")
    if proof_arg.conclusion != c[1]:
        raise TransformError(
            f"argument proves {render_formula(proof_arg.conclusion)}, "
            f"expected {render_formula(c[1])}"
        )
    _checked(proof_arg, "argument proof")
    return concat(proof_arg, _open(proof_impl), "sibv")


def lift_context(proof: DeepDerivation, ctx, sign: str) -> DeepDerivation:
    """Lift a proof of A -o B through a one-hole context.

    A positive context gives a proof of ctx[A] -o ctx[B]; a negative one
    flips the implication to ctx[B] -o ctx[A].  The construction pairs
    the lifted proof with expanded identities for the closed branches,
    one functorial builder per connective on the hole path.
    """
    hole = find_hole(ctx)
    if hole is None:
        raise TransformError("lift_context needs a context with a hole")
    if context_sign(ctx, hole) != sign:
        raise TransformError(f"context is not {sign} around its hole")
    rep = check_derivation(proof, "ibv")
    if not rep.ok or proof.premise != unit():
        raise TransformError("lift_context needs a checked downward proof")
    if proof.conclusion[0] != "impl":
        raise TransformError("lift_context needs a proof of an implication")
    return _lift(proof, ctx, sign == POSITIVE)


def _lift(proof: DeepDerivation, ctx, covariant: bool) -> DeepDerivation:
    if ctx == HOLE:
        return proof
    tag, l, r = ctx
    in_left = find_hole(l) is not None if tag in ("tens", "impl", "seq") else False
    if tag == "tens":
        if in_left:
            return tens_functorial(_lift(proof, l, covariant), expand_identity(r))
        return tens_functorial(expand_identity(l), _lift(proof, r, covariant))
    if tag == "seq":
        if in_left:
            return seq_functorial(_lift(proof, l, covariant), expand_identity(r))
        return seq_functorial(expand_identity(l), _lift(proof, r, covariant))
    if tag == "impl":
        if in_left:
            return imp_functorial(_lift(proof, l, not covariant), expand_identity(r))
        return imp_functorial(expand_identity(l), _lift(proof, r, covariant))
    raise TransformError(f"cannot lift through {render_formula(ctx)}")
