"""Deep-system definitions: rule sets, axioms, and name resolution.

A DeepSystem bundles an immutable rule tuple with the shape of its axiomatic
premise.  IBV and SIBV prove from the unit; the unit-free intuitionistic
system proves from `a -o a`; the classical unit-free system proves from an
`a | ~a` pair.  `exclude` produces the sub-systems used by the
associativity-removal comparisons, and `mix_enabled` switches the optional
classical mix rule on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formulas import Formula, INTUITIONISTIC, CLASSICAL_BV
from .rules import (
    BV_MINUS_RULES,
    IBV_MINUS_RULES,
    IBV_RULES,
    INTERNAL_RULES,
    RuleSpec,
    SIBV_EXTRA_RULES,
)

IBV = "ibv"
SIBV = "sibv"
IBV_MINUS = "ibv_minus"
BV_MINUS = "bv_minus"
IBV_PLUS_IUP = "ibv_plus_iup"  # internal: IBV + {i_up_neg, u_up_tens, u_up_imp}

_ALIAS = {
    "ibv": IBV,
    "sibv": SIBV,
    "ibvminus": IBV_MINUS,
    "bvminus": BV_MINUS,
    "ibvplusiup": IBV_PLUS_IUP,
}


def canonical_system_name(name: str) -> str:
    key = name.lower().replace("-", "").replace("_", "")
    if key not in _ALIAS:
        raise ValueError(f"unknown deep system {name!r}")
    return _ALIAS[key]


@dataclass(frozen=True)
class DeepSystem:
    name: str
    rules: tuple[RuleSpec, ...]
    axiom: str  # "unit" | "impl_refl" | "par_pair"
    dialect: str
    excluded: frozenset[str] = field(default_factory=frozenset)
    mix_enabled: bool = False

    @property
    def key(self) -> tuple:
        """Hashable identity for memo caches."""
        return (self.name, self.excluded, self.mix_enabled)

    def rule(self, name: str) -> RuleSpec | None:
        for r in self.rules:
            if r.name == name:
                return r
        return None

    def has_rule(self, name: str) -> bool:
        return self.rule(name) is not None

    def is_axiom_formula(self, f: Formula) -> bool:
        """Is `f` an acceptable premise for a proof in this system?"""
        if self.axiom == "unit":
            return f == ("unit",)
        if self.axiom == "impl_refl":
            return f[0] == "impl" and f[1][0] == "atom" and f[1] == f[2]
        # par_pair: the premise-free atomic interaction pair, either order
        if f[0] != "par":
            return False
        l, r = f[1], f[2]
        return (l[0] == "atom" and r == ("natom", l[1])) or (
            r[0] == "atom" and l == ("natom", r[1])
        )


def get_system(
    name: str,
    exclude: tuple[str, ...] = (),
    mix_enabled: bool = False,
) -> DeepSystem:
    name = canonical_system_name(name)
    if name == IBV:
        base, axiom, dialect = IBV_RULES, "unit", INTUITIONISTIC
    elif name == SIBV:
        base, axiom, dialect = IBV_RULES + SIBV_EXTRA_RULES, "unit", INTUITIONISTIC
    elif name == IBV_PLUS_IUP:
        extra = tuple(
            r for r in SIBV_EXTRA_RULES + INTERNAL_RULES
            if r.name in ("i_up_neg", "u_up_tens", "u_up_imp")
        )
        base, axiom, dialect = IBV_RULES + extra, "unit", INTUITIONISTIC
    elif name == IBV_MINUS:
        base, axiom, dialect = IBV_MINUS_RULES, "impl_refl", INTUITIONISTIC
    elif name == BV_MINUS:
        base, axiom, dialect = BV_MINUS_RULES, "par_pair", CLASSICAL_BV
        if not mix_enabled:
            base = tuple(r for r in base if r.name != "bv_mix")
    else:  # pragma: no cover
        raise AssertionError(name)
    if mix_enabled and name != BV_MINUS:
        raise ValueError("mix_enabled applies to the classical system only")
    known = {r.name for r in base}
    bad = [x for x in exclude if x not in known]
    if bad:
        raise ValueError(f"cannot exclude rules not in {name}: {bad}")
    rules = tuple(r for r in base if r.name not in exclude)
    return DeepSystem(
        name=name,
        rules=rules,
        axiom=axiom,
        dialect=dialect,
        excluded=frozenset(exclude),
        mix_enabled=mix_enabled,
    )
