"""Identity expansion, identity contraction, and derivable up rules."""

from ..derivations import DeepDerivation, DerivationBuilder, dualize
from ..formulas import (
    NEGATIVE,
    atom,
    impl,
    render_formula,
    seq,
    tens,
    unit,
)
from .errors import TransformError


def expand_identity(f) -> DeepDerivation:
    """A proof of f -o f built by recursion on f, using only down rules.

    Every recursive case keeps the freshly introduced unit in an evenly
    signed position, so the whole construction stays inside the plain
    downward system.
    """
    b = DerivationBuilder(unit(), "ibv")
    _expand(b, f, ())
    return b.derivation()


def _expand(b: DerivationBuilder, f, at: tuple) -> None:
    # turns the unit at position `at` into f -o f
    tag = f[0]
    if tag == "atom":
        b.step("ai_down_pos", at, atom=f[1])
    elif tag == "unit":
        b.step("u_down_imp", at)
    elif tag == "seq":
        b.step("u_down_seq", at)
        _expand(b, f[1], at + (0,))
        _expand(b, f[2], at + (1,))
        b.step("q_down_pos", at)
    elif tag == "tens":
        _expand(b, f[1], at)
        b.step("u_down_tens", at + (1,))
        _expand(b, f[2], at + (1, 0))
        b.step("s_R_pos", at + (1,))
        b.step("ruc", at)
        b.step("comm_tens", at + (1,))
    elif tag == "impl":
        _expand(b, f[2], at)
        b.step("u_down_imp", at + (0,))
        _expand(b, f[1], at + (0, 0))
        b.step("s_L_neg", at + (0,))
        b.step("comm_tens", at + (0,))
        b.step("cur", at)
    else:
        raise TransformError(f"cannot expand identity over {render_formula(f)}")


def contract_identity(f) -> DeepDerivation:
    """The negatively signed derivation from f -o f down to the unit.

    This is the rule-by-rule dual of `expand_identity`, so it lives in
    the symmetric system and fires only at odd positions.
    """
    return dualize(expand_identity(f), "sibv")


_UP_OPERANDS = {
    "ai_up_neg": ("atom",),
    "q_up_pos": ("a", "b", "c", "d"),
    "q_up_neg": ("a", "b", "c", "d"),
}


def derive_up_instance(rule: str, operands) -> DeepDerivation:
    """Replay one instance of a non-primitive up rule in the extended system.

    The extended system has the unit up rules and identity contraction
    as primitives; the remaining up rules are derivable from those, and
    this returns the witnessing derivation for a single instance.  The
    derivation is stated at the ambient polarity the rule fires at, so
    it can be grafted at any position of matching sign.

    `operands` maps the rule's schematic names to formulas: `atom` for
    the atomic contraction, `a` to `d` for the two medial shuffles.
    """
    if rule not in _UP_OPERANDS:
        raise TransformError(f"no derivation recipe for rule {rule!r}")
    missing = [k for k in _UP_OPERANDS[rule] if k not in operands]
    if missing:
        raise TransformError(f"missing operands for {rule}: {', '.join(missing)}")

    if rule == "ai_up_neg":
        name = operands["atom"]
        if not isinstance(name, str):
            if name[0] != "atom":
                raise TransformError("atomic contraction needs an atom operand")
            name = name[1]
        b = DerivationBuilder(impl(atom(name), atom(name)), "ibv_plus_iup", NEGATIVE)
        b.step("i_up_neg")
        return b.derivation()

    a, c = operands["a"], operands["c"]
    bb, d = operands["b"], operands["d"]
    if rule == "q_up_pos":
        premise = tens(seq(a, c), seq(bb, d))
        contractum = seq(tens(a, bb), tens(c, d))
        b = DerivationBuilder(premise, "ibv_plus_iup")
        b.step("u_down_tens")
        b.graft(expand_identity(contractum), (0,))
        b.step("q_down_neg", (0, 0))
        b.step("comm_tens")
        b.step("s_L_pos")
        b.step("i_up_neg", (0,))
        b.step("u_up_imp")
        return b.derivation()

    # q_up_neg
    premise = impl(seq(a, c), seq(bb, d))
    contractum = seq(impl(a, bb), impl(c, d))
    b = DerivationBuilder(premise, "ibv_plus_iup", NEGATIVE)
    b.step("u_down_imp")
    b.graft(expand_identity(contractum), (0,))
    b.step("q_down_pos", (0, 1))
    b.step("s_L_neg")
    b.step("i_up_neg", (1,))
    b.step("comm_tens")
    b.step("u_up_tens")
    return b.derivation()
