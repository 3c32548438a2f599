"""Rule schemas for the deep systems.

A rule is a premise pattern and a conclusion pattern over metavariables,
plus a sign obligation:

    "positive"  applies only where the surrounding context is positive
    "negative"  applies only where it is negative
    None        the dotted rules: apply at either sign

Patterns use ("var", X) for arbitrary subformulas and ("avar", x) /
("navar", x) for an atom / negated-atom metavariable (both bind the same
atom name, so a rule mentioning ("avar","a") twice forces equal atoms).

Reading a rule downward rewrites a premise-shaped subformula into the
conclusion shape; reading it upward inverts that.  The atomic-interaction
rules lose their atom when read toward the unit, which is why applying them
can need an explicit atom argument; checking never does, because the stored
result determines the atom.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import Formula, POSITIVE, NEGATIVE

Pattern = tuple

_LEAF_TAGS = ("atom", "natom", "unit", "hole")


def _v(name: str) -> Pattern:
    return ("var", name)


_A, _B, _C, _D = _v("A"), _v("B"), _v("C"), _v("D")
_a = ("avar", "a")
_na = ("navar", "a")
_U = ("unit",)


class RuleAtomNeeded(ValueError):
    """An atomic rule was applied in the direction that forgets its atom."""


def match(pattern: Pattern, f: Formula, binds: dict | None = None) -> dict | None:
    """Match `f` against `pattern`, extending `binds`; None on failure."""
    if binds is None:
        binds = {}
    tag = pattern[0]
    if tag == "var":
        key = ("var", pattern[1])
        if key in binds:
            return binds if binds[key] == f else None
        binds[key] = f
        return binds
    if tag in ("avar", "navar"):
        want = "atom" if tag == "avar" else "natom"
        if f[0] != want:
            return None
        key = ("atomvar", pattern[1])
        if key in binds:
            return binds if binds[key] == f[1] else None
        binds[key] = f[1]
        return binds
    if tag in _LEAF_TAGS:
        return binds if f == pattern else None
    if f[0] != tag:
        return None
    binds = match(pattern[1], f[1], binds)
    if binds is None:
        return None
    return match(pattern[2], f[2], binds)


def instantiate(pattern: Pattern, binds: dict, atom: str | None = None) -> Formula:
    """Build a formula from a pattern under `binds`; `atom` fills a free avar."""
    tag = pattern[0]
    if tag == "var":
        key = ("var", pattern[1])
        if key not in binds:
            raise ValueError(f"unbound metavariable {pattern[1]}")
        return binds[key]
    if tag in ("avar", "navar"):
        key = ("atomvar", pattern[1])
        name = binds.get(key, atom)
        if name is None:
            raise RuleAtomNeeded(
                "rule instance does not determine its atom; pass one explicitly"
            )
        return ("atom" if tag == "avar" else "natom", name)
    if tag in _LEAF_TAGS:
        return pattern
    return (tag, instantiate(pattern[1], binds, atom), instantiate(pattern[2], binds, atom))


@dataclass(frozen=True)
class RuleSpec:
    """One deep-inference rule: name, patterns, and sign obligation."""

    name: str
    premise: Pattern | None  # None marks a premise-free axiom rule
    conclusion: Pattern
    sign: str | None  # POSITIVE / NEGATIVE / None (dotted)

    def rewrite_down(self, f: Formula, atom: str | None = None) -> Formula | None:
        """Apply the rule downward to the whole of `f`; None if no match."""
        if self.premise is None:
            raise ValueError(f"{self.name} is an axiom rule and cannot rewrite")
        binds = match(self.premise, f, {})
        if binds is None:
            return None
        return instantiate(self.conclusion, binds, atom)

    def rewrite_up(self, f: Formula, atom: str | None = None) -> Formula | None:
        """Invert the rule: `f` must match the conclusion shape."""
        if self.premise is None:
            raise ValueError(f"{self.name} is an axiom rule and cannot rewrite")
        binds = match(self.conclusion, f, {})
        if binds is None:
            return None
        return instantiate(self.premise, binds, atom)

    def check_step(self, before: Formula, after: Formula) -> bool:
        """Does this rule rewrite `before` into exactly `after` downward?"""
        if self.premise is None:
            return False
        binds = match(self.premise, before, {})
        if binds is None:
            return False
        binds = match(self.conclusion, after, binds)
        if binds is None:
            return False
        # Both sides must be fully reproduced; guards the linearity of the
        # patterns and pins any atom the premise alone did not determine.
        try:
            return (
                instantiate(self.premise, binds) == before
                and instantiate(self.conclusion, binds) == after
            )
        except RuleAtomNeeded:
            return False


def _mk(name, premise, conclusion, sign) -> RuleSpec:
    return RuleSpec(name, premise, conclusion, sign)


def T(l, r):
    return ("tens", l, r)


def P(l, r):
    return ("par", l, r)


def I(l, r):
    return ("impl", l, r)


def S(l, r):
    return ("seq", l, r)


# --- IBV ------------------------------------------------------------------

IBV_RULES = (
    _mk("ai_down_pos", _U, I(_a, _a), POSITIVE),
    _mk("u_down_seq", _A, S(_U, _A), POSITIVE),
    _mk("u_down_coseq", _A, S(_A, _U), POSITIVE),
    _mk("ref_pos", T(_A, _B), S(_A, _B), POSITIVE),
    _mk("ref_neg", S(_A, _B), T(_A, _B), NEGATIVE),
    _mk("s_L_pos", T(_A, I(_B, _C)), I(I(_A, _B), _C), POSITIVE),
    _mk("s_R_pos", T(I(_A, _B), _C), I(_A, T(_B, _C)), POSITIVE),
    _mk("s_L_neg", I(I(_A, _B), _C), T(_A, I(_B, _C)), NEGATIVE),
    _mk("s_R_neg", I(_A, T(_B, _C)), T(I(_A, _B), _C), NEGATIVE),
    _mk("sq_L_pos", S(I(_A, _B), _C), I(_A, S(_B, _C)), POSITIVE),
    _mk("sq_R_pos", S(_B, I(_A, _C)), I(_A, S(_B, _C)), POSITIVE),
    _mk("sq_L_neg", S(T(_A, _B), _C), T(_A, S(_B, _C)), NEGATIVE),
    _mk("sq_R_neg", S(_B, T(_A, _C)), T(_A, S(_B, _C)), NEGATIVE),
    _mk("q_down_pos", S(I(_A, _B), I(_C, _D)), I(S(_A, _C), S(_B, _D)), POSITIVE),
    _mk("q_down_neg", S(T(_A, _B), T(_C, _D)), T(S(_A, _C), S(_B, _D)), NEGATIVE),
    _mk("comm_tens", T(_A, _B), T(_B, _A), None),
    _mk("assoc_tens", T(T(_A, _B), _C), T(_A, T(_B, _C)), None),
    _mk("assoc_seq_L", S(S(_A, _B), _C), S(_A, S(_B, _C)), None),
    _mk("assoc_seq_R", S(_A, S(_B, _C)), S(S(_A, _B), _C), None),
    _mk("u_down_tens", _A, T(_U, _A), None),
    _mk("u_down_imp", _A, I(_U, _A), None),
    _mk("cur", I(T(_A, _B), _C), I(_A, I(_B, _C)), None),
    _mk("ruc", I(_A, I(_B, _C)), I(T(_A, _B), _C), None),
)

# --- SIBV: the up-rules added on top of IBV -------------------------------

SIBV_EXTRA_RULES = (
    _mk("ai_up_neg", I(_a, _a), _U, NEGATIVE),
    _mk("u_up_seq", S(_U, _A), _A, NEGATIVE),
    _mk("u_up_coseq", S(_A, _U), _A, NEGATIVE),
    _mk("u_up_tens", T(_U, _A), _A, None),
    _mk("u_up_imp", I(_U, _A), _A, None),
    _mk("q_up_pos", T(S(_A, _C), S(_B, _D)), S(T(_A, _B), T(_C, _D)), POSITIVE),
    _mk("q_up_neg", I(S(_A, _C), S(_B, _D)), S(I(_A, _B), I(_C, _D)), NEGATIVE),
)

# --- the unit-free intuitionistic system ----------------------------------
# Atomic interaction happens against explicit contexts instead of the unit;
# the remaining rules are the unit-free subset of IBV.

IBV_MINUS_AXIOM_RULES = (
    _mk("ai_down_pos_atom", None, I(_a, _a), POSITIVE),
    _mk("ai_down_tens_ctx", _B, T(I(_a, _a), _B), POSITIVE),
    _mk("ai_down_imp_ctx", _B, I(I(_a, _a), _B), NEGATIVE),
    _mk("ai_down_seq_ctx", _B, S(I(_a, _a), _B), POSITIVE),
    _mk("ai_down_coseq_ctx", _B, S(_B, I(_a, _a)), POSITIVE),
)

_UNIT_RULE_NAMES = ("ai_down_pos", "u_down_seq", "u_down_coseq", "u_down_tens", "u_down_imp")

IBV_MINUS_RULES = IBV_MINUS_AXIOM_RULES + tuple(
    r for r in IBV_RULES if r.name not in _UNIT_RULE_NAMES
)

# --- the classical unit-free system ---------------------------------------
# No sign discipline: every rule applies in any context.  The equivalence
# relation of the source system is decomposed into directed generator steps;
# one associativity direction plus commutativity generates the other for the
# commutative connectives, while seq needs both directions spelled out.

_AI_PAIR = P(_a, _na)

BV_MINUS_RULES = (
    _mk("bv_ai_empty", None, _AI_PAIR, None),
    _mk("bv_ai_seq", _B, S(_AI_PAIR, _B), None),
    _mk("bv_ai_coseq", _B, S(_B, _AI_PAIR), None),
    _mk("bv_ai_tens", _B, T(_AI_PAIR, _B), None),
    _mk("bv_mix", T(_A, _B), P(_A, _B), None),
    _mk("bv_s", T(_A, P(_B, _C)), P(T(_A, _B), _C), None),
    _mk("bv_sq_R", S(P(_A, _B), _C), P(_A, S(_B, _C)), None),
    _mk("bv_sq_L", S(_A, P(_B, _C)), P(S(_A, _C), _B), None),
    _mk("bv_q_down", S(P(_A, _B), P(_C, _D)), P(S(_A, _C), S(_B, _D)), None),
    _mk("bv_ref", S(_A, _B), P(_A, _B), None),
    _mk("bv_assoc_tens", T(T(_A, _B), _C), T(_A, T(_B, _C)), None),
    _mk("bv_comm_tens", T(_A, _B), T(_B, _A), None),
    _mk("bv_assoc_par", P(P(_A, _B), _C), P(_A, P(_B, _C)), None),
    _mk("bv_comm_par", P(_A, _B), P(_B, _A), None),
    _mk("bv_assoc_seq_L", S(S(_A, _B), _C), S(_A, S(_B, _C)), None),
    _mk("bv_assoc_seq_R", S(_A, S(_B, _C)), S(S(_A, _B), _C), None),
)

# --- internal general-identity rules --------------------------------------
# Not part of any named system's surface; used by the derived-rule and
# up-elimination constructions, and by the extended checking system that
# validates them.

INTERNAL_RULES = (
    _mk("i_down_pos", _U, I(_A, _A), POSITIVE),
    _mk("i_up_neg", I(_A, _A), _U, NEGATIVE),
)

ALL_RULES = IBV_RULES + SIBV_EXTRA_RULES + IBV_MINUS_AXIOM_RULES + BV_MINUS_RULES + INTERNAL_RULES

RULES_BY_NAME = {r.name: r for r in ALL_RULES}

# Step inverses with flipped sign, for turning a derivation A => B into one
# B => A.  assoc_tens is its own inverse only through a commutativity dance,
# handled where dualization is implemented; the four sq rules and the two
# q "same-connective" rules have no single-rule inverse at the opposite sign.

DUAL_RULE = {
    "ai_down_pos": "ai_up_neg",
    "ai_up_neg": "ai_down_pos",
    "u_down_seq": "u_up_seq",
    "u_up_seq": "u_down_seq",
    "u_down_coseq": "u_up_coseq",
    "u_up_coseq": "u_down_coseq",
    "u_down_tens": "u_up_tens",
    "u_up_tens": "u_down_tens",
    "u_down_imp": "u_up_imp",
    "u_up_imp": "u_down_imp",
    "ref_pos": "ref_neg",
    "ref_neg": "ref_pos",
    "s_L_pos": "s_L_neg",
    "s_L_neg": "s_L_pos",
    "s_R_pos": "s_R_neg",
    "s_R_neg": "s_R_pos",
    "q_down_pos": "q_up_neg",
    "q_up_neg": "q_down_pos",
    "q_down_neg": "q_up_pos",
    "q_up_pos": "q_down_neg",
    "cur": "ruc",
    "ruc": "cur",
    "comm_tens": "comm_tens",
    "assoc_seq_L": "assoc_seq_R",
    "assoc_seq_R": "assoc_seq_L",
    "i_down_pos": "i_up_neg",
    "i_up_neg": "i_down_pos",
}
