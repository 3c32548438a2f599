"""Deep derivations: step lists, checking, application, and dualization.

A derivation is a premise formula plus an ordered list of downward steps,
each recording its rule, path, and full result formula.  Reading top to
bottom, every step rewrites the subformula at its path by one rule of the
ambient system.

Derivations additionally carry an ambient sign.  The default is positive
(the ordinary reading); a negative derivation is one intended for grafting
into a negatively-signed context, and its steps' sign obligations are
checked against the ambient xor the path parity.  Proofs are always
ambient-positive.

Up-direction rule instances exist for apply_rule_at and the search engine
only; a stored derivation is written downward, and checking rejects any
up step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from . import _core
from .formulas import (
    CLASSICAL_BV,
    Formula,
    INTUITIONISTIC,
    NEGATIVE,
    POSITIVE,
    Path,
    path_parity,
    replace_at,
    subformula_at,
    subformulas,
)
from .rules import DUAL_RULE, RuleAtomNeeded, RuleSpec
from .systems import DeepSystem, get_system

DOWN = "down"
UP = "up"


@dataclass(frozen=True)
class RuleInstance:
    rule: str
    path: Path
    direction: str = DOWN

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(self.path))


@dataclass(frozen=True)
class DeepDerivation:
    system: str
    premise: Formula
    steps: tuple[tuple[RuleInstance, Formula], ...] = ()
    ambient: str = POSITIVE

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1][1] if self.steps else self.premise

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    reason: str = ""
    step_index: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


class ApplyError(ValueError):
    """apply_rule_at failed: no match, sign violation, or unknown rule."""


class DualizeError(ValueError):
    """A step's rule has no inverse at the opposite sign."""


# ---------------------------------------------------------------------------
# prepared rule tables for the kernel

_SIGN_PARITY = {POSITIVE: 0, NEGATIVE: 1, None: -1}
_prepared_cache: dict[tuple, tuple] = {}


def _prepare_rules(system: DeepSystem) -> tuple:
    key = system.key
    prepared = _prepared_cache.get(key)
    if prepared is None:
        prepared = tuple(
            (r.name, r.premise, r.conclusion, _SIGN_PARITY[r.sign]) for r in system.rules
        )
        _prepared_cache[key] = prepared
    return prepared


def _ambient_parity(ambient: str) -> int:
    if ambient == POSITIVE:
        return 0
    if ambient == NEGATIVE:
        return 1
    raise ValueError(f"bad ambient sign {ambient!r}")


# ---------------------------------------------------------------------------
# single-step application and the upward neighborhood

def _resolve(system) -> DeepSystem:
    return system if isinstance(system, DeepSystem) else get_system(system)


def apply_rule_at(
    f: Formula,
    inst: RuleInstance,
    system: DeepSystem | str,
    ambient: str = POSITIVE,
    atom: str | None = None,
) -> Formula:
    """Rewrite `f` by one rule instance; raises ApplyError on any violation."""
    sys = _resolve(system)
    rule = sys.rule(inst.rule)
    if rule is None:
        raise ApplyError(f"rule not in system: {inst.rule}")
    parity = path_parity(f, inst.path) ^ _ambient_parity(ambient)
    if rule.sign is not None and _SIGN_PARITY[rule.sign] != parity:
        raise ApplyError(f"sign violation: {inst.rule} at {list(inst.path)}")
    sub = subformula_at(f, inst.path)
    try:
        if inst.direction == DOWN:
            new_sub = rule.rewrite_down(sub, atom)
        elif inst.direction == UP:
            new_sub = rule.rewrite_up(sub, atom)
        else:
            raise ApplyError(f"bad direction {inst.direction!r}")
    except RuleAtomNeeded as e:
        raise ApplyError(str(e)) from None
    if new_sub is None:
        raise ApplyError(
            f"pattern mismatch: {inst.rule} does not apply at {list(inst.path)}"
        )
    return replace_at(f, inst.path, new_sub)


def premises_at(
    f: Formula, system: DeepSystem | str, ambient: str = POSITIVE
) -> list[tuple[RuleInstance, Formula]]:
    """Every one-step upward neighbor of `f`: complete and duplicate-free."""
    sys = _resolve(system)
    raw = _core.enumerate_premises(f, _prepare_rules(sys), _ambient_parity(ambient))
    return [(RuleInstance(name, path, UP), g) for name, path, g in raw]


# ---------------------------------------------------------------------------
# checking

def _dialect_ok(f: Formula, dialect: str) -> bool:
    for g in subformulas(f):
        t = g[0]
        if t == "hole":
            return False
        if dialect == INTUITIONISTIC and t in ("natom", "par"):
            return False
        if dialect == CLASSICAL_BV and t in ("unit", "impl"):
            return False
    return True


def check_derivation(d: DeepDerivation, system: DeepSystem | str) -> CheckReport:
    """Replay every step; never raises, failures land in the report."""
    sys = _resolve(system)
    if not _dialect_ok(d.premise, sys.dialect):
        return CheckReport(False, "dialect violation", None, "premise")
    ambient = _ambient_parity(d.ambient)
    cur = d.premise
    for i, (inst, result) in enumerate(d.steps):
        if inst.direction != DOWN:
            return CheckReport(
                False, "rule not in system", i,
                "derivations are stored downward; up steps are search-only",
            )
        rule = sys.rule(inst.rule)
        if rule is None:
            return CheckReport(False, "rule not in system", i, inst.rule)
        try:
            sub_before = subformula_at(cur, inst.path)
            sub_after = subformula_at(result, inst.path)
        except ValueError:
            return CheckReport(False, "result mismatch", i, "path out of range")
        parity = path_parity(cur, inst.path) ^ ambient
        if rule.sign is not None and _SIGN_PARITY[rule.sign] != parity:
            return CheckReport(False, "sign violation", i, inst.rule)
        if not rule.check_step(sub_before, sub_after):
            return CheckReport(False, "pattern mismatch", i, inst.rule)
        if replace_at(cur, inst.path, sub_after) != result:
            return CheckReport(False, "result mismatch", i, inst.rule)
        if not _dialect_ok(result, sys.dialect):
            return CheckReport(False, "dialect violation", i, inst.rule)
        cur = result
    return CheckReport(True)


def is_proof(d: DeepDerivation, system: DeepSystem | str) -> bool:
    """A proof is an ambient-positive checked derivation from the axiom."""
    sys = _resolve(system)
    return (
        d.ambient == POSITIVE
        and sys.is_axiom_formula(d.premise)
        and check_derivation(d, sys).ok
    )


# ---------------------------------------------------------------------------
# construction

class DerivationBuilder:
    """Grow a derivation downward with validation at every append.

    step() applies a rule at a path (atom needed only for atomic rules read
    away from their determined side); graft() splices a whole checked
    sub-derivation at a path, requiring its ambient to equal the host
    ambient xor the graft path's parity; extend() concatenates a derivation
    whose premise is the current conclusion.
    """

    def __init__(
        self,
        premise: Formula,
        system: DeepSystem | str,
        ambient: str = POSITIVE,
    ):
        self.system = _resolve(system)
        self.premise = premise
        self.ambient = ambient
        self._parity = _ambient_parity(ambient)
        self._steps: list[tuple[RuleInstance, Formula]] = []
        self.current = premise

    def _append(self, inst: RuleInstance, result: Formula) -> None:
        self._steps.append((inst, result))
        self.current = result

    def step(self, rule: str, path: Iterable[int] = (), atom: str | None = None):
        inst = RuleInstance(rule, tuple(path), DOWN)
        result = apply_rule_at(self.current, inst, self.system, self.ambient, atom)
        self._append(inst, result)
        return self

    def graft(self, sub: DeepDerivation, at: Iterable[int] = ()):
        at = tuple(at)
        if subformula_at(self.current, at) != sub.premise:
            raise ValueError("graft point does not hold the sub-derivation's premise")
        want = _ambient_parity(sub.ambient)
        have = path_parity(self.current, at) ^ self._parity
        if want != have:
            raise ValueError("graft point sign does not match the sub-derivation")
        for inst, res in sub.steps:
            whole = replace_at(self.current, at, res)
            shifted = RuleInstance(inst.rule, at + inst.path, inst.direction)
            rule = self.system.rule(shifted.rule)
            if rule is None:
                raise ApplyError(f"rule not in system: {shifted.rule}")
            sub_b = subformula_at(self.current, shifted.path)
            sub_a = subformula_at(whole, shifted.path)
            parity = path_parity(self.current, shifted.path) ^ self._parity
            if rule.sign is not None and _SIGN_PARITY[rule.sign] != parity:
                raise ApplyError(f"sign violation grafting {shifted.rule}")
            if not rule.check_step(sub_b, sub_a):
                raise ApplyError(f"pattern mismatch grafting {shifted.rule}")
            self._append(shifted, whole)
        return self

    def extend(self, other: DeepDerivation):
        if other.premise != self.current:
            raise ValueError("extension premise is not the current conclusion")
        if other.ambient != self.ambient:
            raise ValueError("extension ambient differs")
        return self.graft(other, ())

    def derivation(self) -> DeepDerivation:
        return DeepDerivation(
            system=self.system.name,
            premise=self.premise,
            steps=tuple(self._steps),
            ambient=self.ambient,
        )


def concat(d1: DeepDerivation, d2: DeepDerivation, system: DeepSystem | str) -> DeepDerivation:
    """Vertical composition: d1's conclusion must be d2's premise."""
    b = DerivationBuilder(d1.premise, system, d1.ambient)
    b.extend(d1)
    b.extend(d2)
    return b.derivation()


# ---------------------------------------------------------------------------
# dualization

def dualize(d: DeepDerivation, system: DeepSystem | str = "sibv") -> DeepDerivation:
    """Turn a derivation A => B into one B => A at the opposite ambient.

    Each step is replaced by its inverse rule at the same path, in reverse
    order; assoc_tens inverts through a five-step commutativity dance.
    Raises DualizeError for steps with no inverse (the sq family).
    """
    sys = _resolve(system)
    flipped = NEGATIVE if d.ambient == POSITIVE else POSITIVE
    trace = [d.premise] + [res for _, res in d.steps]
    b = DerivationBuilder(d.conclusion, sys, flipped)
    for i in range(len(d.steps) - 1, -1, -1):
        inst, _ = d.steps[i]
        target = trace[i]
        if inst.rule == "assoc_tens":
            for r in ("comm_tens", "assoc_tens", "comm_tens", "assoc_tens", "comm_tens"):
                b.step(r, inst.path)
        else:
            dual = DUAL_RULE.get(inst.rule)
            if dual is None:
                raise DualizeError(f"no inverse rule for {inst.rule}")
            atom = None
            sub = subformula_at(target, inst.path)
            if dual == "ai_down_pos" and sub[0] == "impl" and sub[1][0] == "atom":
                atom = sub[1][1]
            b.step(dual, inst.path, atom=atom)
        if b.current != target:
            raise DualizeError(
                f"inverse of {inst.rule} did not restore the step's premise"
            )
    return b.derivation()
