"""Sequent calculi: imll, inml, nml_minus, and inml_acut.

Two-sided sequents hold a multiset of intuitionistic antecedents (stored
as an ordered tuple, exchange implicit) and one succedent.  One-sided
sequents hold a multiset of bv-dialect formulas and an empty antecedent.

Rule applications carry their instance data explicitly: which antecedent
occurrences go to which premise (by index into the conclusion), the
principal occurrence for left rules, the pointwise-split ordered pairs
for the two seq rules, and the cut formula for cut and the associative
cuts.  Checking recomputes each node's expected premises and compares
them to the stored subproof conclusions up to multiset equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .derivations import CheckReport
from .formulas import (
    CLASSICAL_BV,
    DialectError,
    Formula,
    INTUITIONISTIC,
    ParseError,
    dialect_of,
    parse_formula,
    render_formula,
    replace_at,
    seq,
    subformula_at,
    unit,
)

IMLL = "imll"
INML = "inml"
NML_MINUS = "nml_minus"
INML_ACUT = "inml_acut"

_TWO_SIDED = frozenset({IMLL, INML, INML_ACUT})

_ALIASES = {
    "imll": IMLL,
    "inml": INML,
    "nmlminus": NML_MINUS,
    "nml": NML_MINUS,
    "inmlacut": INML_ACUT,
}


@dataclass(frozen=True)
class Sequent:
    antecedent: tuple[Formula, ...]
    succedents: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(self.antecedent))
        object.__setattr__(self, "succedents", tuple(self.succedents))

    @property
    def succedent(self) -> Formula:
        if len(self.succedents) != 1:
            raise ValueError("one-sided sequent has no single succedent")
        return self.succedents[0]

    def key(self):
        """Canonical form for memoization: antecedent order forgotten."""
        return (tuple(sorted(self.antecedent)), tuple(sorted(self.succedents)))


def two_sided(antecedent, succedent: Formula) -> Sequent:
    return Sequent(tuple(antecedent), (succedent,))


def one_sided(succedents) -> Sequent:
    return Sequent((), tuple(succedents))


def parse_sequent(text: str, dialect: str = INTUITIONISTIC) -> Sequent:
    if "|-" not in text:
        raise ParseError("sequent needs a |- turnstile", 0)
    left, right = text.split("|-", 1)
    ant = tuple(
        parse_formula(part, dialect) for part in left.split(",") if part.strip()
    )
    if dialect == CLASSICAL_BV:
        if ant:
            raise ParseError("one-sided sequents have an empty antecedent", 0)
        sucs = tuple(
            parse_formula(part, dialect) for part in right.split(",") if part.strip()
        )
        if not sucs:
            raise ParseError("one-sided sequent needs succedents", 0)
        return one_sided(sucs)
    return two_sided(ant, parse_formula(right, dialect))


def render_sequent(s: Sequent) -> str:
    left = ", ".join(render_formula(f) for f in s.antecedent)
    right = ", ".join(render_formula(f) for f in s.succedents)
    return f"{left} |- {right}" if left else f"|- {right}"


# ---------------------------------------------------------------------------
# systems and rule applications

@dataclass(frozen=True)
class SequentSystem:
    name: str
    allow_cut: bool = False
    assoc_rewrite: bool = False
    acut_pool: frozenset = frozenset()

    @property
    def two_sided(self) -> bool:
        return self.name in _TWO_SIDED

    @property
    def dialect(self) -> str:
        return INTUITIONISTIC if self.two_sided else CLASSICAL_BV

    def rules(self) -> frozenset:
        base = {
            IMLL: _IMLL_RULES,
            INML: _IMLL_RULES | {"seq"},
            INML_ACUT: _IMLL_RULES | {"seq", "acut_L", "acut_R"},
            NML_MINUS: _NML_RULES,
        }[self.name]
        extra = set()
        if self.allow_cut and self.two_sided:
            extra.add("cut")
        if self.assoc_rewrite:
            extra.add("assoc_rw")
        return base | extra


_IMLL_RULES = frozenset(
    {"ax", "AX", "one_R", "one_L", "tens_L", "tens_R", "imp_R", "imp_L"}
)
_NML_RULES = frozenset({"nml_ax", "nml_par", "nml_tens", "nml_seq"})


def get_sequent_system(
    name: str,
    allow_cut: bool = False,
    assoc_rewrite: bool = False,
    acut_pool=frozenset(),
) -> SequentSystem:
    canon = _ALIASES.get(name.lower().replace("-", "").replace("_", ""))
    if canon is None:
        raise ValueError(f"unknown sequent system {name!r}")
    return SequentSystem(canon, allow_cut, assoc_rewrite, frozenset(acut_pool))


@dataclass(frozen=True)
class RuleApp:
    """One rule application's name and instance data.

    partition: index lists into the conclusion's antecedent (succedents
    for one-sided sequents), one list per context-splitting premise.
    principal: index of the principal occurrence for left/one-sided rules.
    n / seq_indices: the pointwise pairs of the seq rules, in pairing order.
    cut_formula: the formula proved by the first premise of cut/acut.
    loc/path/rw: the rewrite site for assoc_rw.
    """

    rule: str
    partition: tuple[tuple[int, ...], ...] = ()
    principal: int | None = None
    n: int | None = None
    seq_indices: tuple[int, ...] = ()
    cut_formula: Formula | None = None
    loc: tuple | None = None
    path: tuple[int, ...] = ()
    rw: str | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "partition", tuple(tuple(p) for p in self.partition)
        )
        object.__setattr__(self, "seq_indices", tuple(self.seq_indices))
        object.__setattr__(self, "path", tuple(self.path))


@dataclass(frozen=True)
class SequentProof:
    conclusion: Sequent
    app: RuleApp
    premises: tuple["SequentProof", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))

    @property
    def rule(self) -> str:
        return self.app.rule

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()

    def count(self, rule: str) -> int:
        return sum(1 for node in self.nodes() if node.rule == rule)


# ---------------------------------------------------------------------------
# checking

class _Bad(Exception):
    def __init__(self, reason, detail=""):
        self.reason = reason
        self.detail = detail


def _pick(items, indices, where):
    try:
        return tuple(items[i] for i in indices)
    except IndexError:
        raise _Bad("non-linear partition", f"index out of range at {where}")


def _need_cover(total: int, used, where: str):
    """Every occurrence used exactly once; anything else is non-linear."""
    flat = [i for part in used for i in part]
    if sorted(flat) != list(range(total)) or len(set(flat)) != len(flat):
        raise _Bad("non-linear partition", where)


def _two_premises_split(ctx, app, exclude, where):
    if len(app.partition) != 2:
        raise _Bad("non-linear partition", f"{where}: need a two-way partition")
    rest = [i for i in range(len(ctx)) if i not in exclude]
    flat = sorted(i for part in app.partition for i in part)
    if flat != sorted(rest):
        raise _Bad("non-linear partition", where)
    return _pick(ctx, app.partition[0], where), _pick(ctx, app.partition[1], where)


def _expected_premises(s: Sequent, app: RuleApp, system: SequentSystem):
    """The premise sequents this node must have, per its rule instance."""
    r = app.rule
    if system.two_sided:
        gamma, c = s.antecedent, s.succedent
        if r == "ax":
            if len(gamma) == 1 and gamma[0][0] == "atom" and gamma[0] == c:
                return []
            raise _Bad("pattern mismatch", "ax wants an atomic a |- a")
        if r == "AX":
            if len(gamma) == 1 and gamma[0] == c:
                return []
            raise _Bad("pattern mismatch", "AX wants A |- A")
        if r == "one_R":
            if not gamma and c == unit():
                return []
            raise _Bad("pattern mismatch", "one_R wants |- 1")
        if r == "one_L":
            i = app.principal
            if i is None or not 0 <= i < len(gamma) or gamma[i] != unit():
                raise _Bad("pattern mismatch", "one_L wants a unit occurrence")
            rest = gamma[:i] + gamma[i + 1:]
            return [two_sided(rest, c)]
        if r == "tens_L":
            i = app.principal
            if i is None or not 0 <= i < len(gamma) or gamma[i][0] != "tens":
                raise _Bad("pattern mismatch", "tens_L wants a tensor occurrence")
            a, b = gamma[i][1], gamma[i][2]
            rest = gamma[:i] + gamma[i + 1:]
            return [two_sided(rest + (a, b), c)]
        if r == "imp_R":
            if c[0] != "impl":
                raise _Bad("pattern mismatch", "imp_R wants an implication succedent")
            return [two_sided(gamma + (c[1],), c[2])]
        if r == "tens_R":
            if c[0] != "tens":
                raise _Bad("pattern mismatch", "tens_R wants a tensor succedent")
            g1, g2 = _two_premises_split(gamma, app, set(), "tens_R")
            return [two_sided(g1, c[1]), two_sided(g2, c[2])]
        if r == "imp_L":
            i = app.principal
            if i is None or not 0 <= i < len(gamma) or gamma[i][0] != "impl":
                raise _Bad("pattern mismatch", "imp_L wants an implication occurrence")
            a, b = gamma[i][1], gamma[i][2]
            g1, g2 = _two_premises_split(gamma, app, {i}, "imp_L")
            return [two_sided(g1, a), two_sided(g2 + (b,), c)]
        if r == "cut":
            f = app.cut_formula
            if f is None:
                raise _Bad("pattern mismatch", "cut needs its cut formula")
            g1, g2 = _two_premises_split(gamma, app, set(), "cut")
            return [two_sided(g1, f), two_sided(g2 + (f,), c)]
        if r == "seq":
            if c[0] != "seq":
                raise _Bad("pattern mismatch", "seq wants a ; succedent")
            n = app.n if app.n is not None else len(app.seq_indices)
            if n != len(app.seq_indices):
                raise _Bad("pattern mismatch", "seq: n disagrees with its indices")
            pairs = []
            for i in app.seq_indices:
                if not 0 <= i < len(gamma) or gamma[i][0] != "seq":
                    raise _Bad("pattern mismatch", "seq: pointwise occurrences must be ;")
                pairs.append((gamma[i][1], gamma[i][2]))
            g1, g2 = _two_premises_split(gamma, app, set(app.seq_indices), "seq")
            lefts = tuple(a for a, _ in pairs)
            rights = tuple(b for _, b in pairs)
            return [two_sided(g1 + lefts, c[1]), two_sided(g2 + rights, c[2])]
        if r in ("acut_L", "acut_R"):
            f = app.cut_formula
            shape_ok = (
                f is not None
                and f[0] == "seq"
                and (f[1][0] == "seq" if r == "acut_L" else f[2][0] == "seq")
            )
            if not shape_ok:
                raise _Bad(
                    "pattern mismatch",
                    f"{r} wants a cut formula bracketed to one side",
                )
            if r == "acut_L":
                (x, y), z = (f[1][1], f[1][2]), f[2]
                partner = seq(x, seq(y, z))
            else:
                x, (y, z) = f[1], (f[2][1], f[2][2])
                partner = seq(seq(x, y), z)
            g1, g2 = _two_premises_split(gamma, app, set(), r)
            return [two_sided(g1, f), two_sided(g2 + (partner,), c)]
        if r == "assoc_rw":
            return [_assoc_rw_premise(s, app, system)]
        raise _Bad("rule not in system", r)

    # one-sided
    ctx = s.succedents
    if r == "nml_ax":
        if len(ctx) == 2:
            a, b = ctx
            if (
                (a[0] == "atom" and b == ("natom", a[1]))
                or (a[0] == "natom" and b == ("atom", a[1]))
            ):
                return []
        raise _Bad("pattern mismatch", "nml_ax wants a dual atom pair")
    if r == "nml_par":
        i = app.principal
        if i is None or not 0 <= i < len(ctx) or ctx[i][0] != "par":
            raise _Bad("pattern mismatch", "nml_par wants a par occurrence")
        rest = ctx[:i] + ctx[i + 1:]
        return [one_sided(rest + (ctx[i][1], ctx[i][2]))]
    if r == "nml_tens":
        i = app.principal
        if i is None or not 0 <= i < len(ctx) or ctx[i][0] != "tens":
            raise _Bad("pattern mismatch", "nml_tens wants a tensor occurrence")
        g1, g2 = _two_premises_split(ctx, app, {i}, "nml_tens")
        return [one_sided(g1 + (ctx[i][1],)), one_sided(g2 + (ctx[i][2],))]
    if r == "nml_seq":
        n = app.n if app.n is not None else len(app.seq_indices)
        if n != len(app.seq_indices):
            raise _Bad("pattern mismatch", "nml_seq: n disagrees with its indices")
        pairs = []
        for i in app.seq_indices:
            if not 0 <= i < len(ctx) or ctx[i][0] != "seq":
                raise _Bad("pattern mismatch", "nml_seq: pointwise occurrences must be ;")
            pairs.append((ctx[i][1], ctx[i][2]))
        g1, g2 = _two_premises_split(ctx, app, set(app.seq_indices), "nml_seq")
        return [
            one_sided(g1 + tuple(a for a, _ in pairs)),
            one_sided(g2 + tuple(b for _, b in pairs)),
        ]
    if r == "assoc_rw":
        return [_assoc_rw_premise(s, app, system)]
    raise _Bad("rule not in system", r)


def _assoc_rw_premise(s: Sequent, app: RuleApp, system: SequentSystem) -> Sequent:
    if app.rw not in ("assoc_seq_L", "assoc_seq_R") or app.loc is None:
        raise _Bad("pattern mismatch", "assoc_rw needs a direction and a site")
    side, i = app.loc
    pool = s.antecedent if side == "ant" else s.succedents
    if not 0 <= i < len(pool):
        raise _Bad("pattern mismatch", "assoc_rw site out of range")
    f = pool[i]
    try:
        sub = subformula_at(f, app.path)
    except ValueError:
        raise _Bad("pattern mismatch", "assoc_rw path out of range")
    # reading downward, the conclusion holds the rewrite's result
    if app.rw == "assoc_seq_L":
        # (A;B);C  =>  A;(B;C): conclusion shows the right-nested form
        if sub[0] != "seq" or sub[2][0] != "seq":
            raise _Bad("pattern mismatch", "assoc_rw result shape")
        a, (b, c) = sub[1], (sub[2][1], sub[2][2])
        before = seq(seq(a, b), c)
    else:
        if sub[0] != "seq" or sub[1][0] != "seq":
            raise _Bad("pattern mismatch", "assoc_rw result shape")
        (a, b), c = (sub[1][1], sub[1][2]), sub[2]
        before = seq(a, seq(b, c))
    g = replace_at(f, app.path, before)
    if side == "ant":
        ant = s.antecedent[:i] + (g,) + s.antecedent[i + 1:]
        return Sequent(ant, s.succedents)
    sucs = s.succedents[:i] + (g,) + s.succedents[i + 1:]
    return Sequent(s.antecedent, sucs)


def _dialect_violations(s: Sequent, system: SequentSystem) -> bool:
    fs = s.antecedent + s.succedents
    if system.two_sided and len(s.succedents) != 1:
        return True
    if not system.two_sided and s.antecedent:
        return True
    for f in fs:
        d = dialect_of(f)
        if d is not None and d != system.dialect:
            return True
    return False


def check_sequent_proof(p: SequentProof, system: SequentSystem) -> CheckReport:
    """Replay the whole tree; first failure wins, reported with its node path."""
    stack = [(p, "")]
    while stack:
        node, where = stack.pop()
        if _dialect_violations(node.conclusion, system):
            return CheckReport(False, "dialect violation", None, where or "root")
        r = node.app.rule
        if r not in system.rules():
            return CheckReport(False, "rule not in system", None, f"{r} at {where or 'root'}")
        try:
            expected = _expected_premises(node.conclusion, node.app, system)
        except _Bad as bad:
            return CheckReport(
                False, bad.reason, None, f"{bad.detail} at {where or 'root'}"
            )
        if len(expected) != len(node.premises):
            return CheckReport(
                False, "result mismatch", None,
                f"premise count at {where or 'root'}",
            )
        for k, (want, have) in enumerate(zip(expected, node.premises)):
            if want.key() != have.conclusion.key():
                return CheckReport(
                    False, "result mismatch", None,
                    f"premise {k} at {where or 'root'}: "
                    f"expected {render_sequent(want)}, stored {render_sequent(have.conclusion)}",
                )
            stack.append((have, f"{where}.{k}" if where else str(k)))
    return CheckReport(True)


# ---------------------------------------------------------------------------
# the derivable general axiom

def derive_ax(f: Formula, system: SequentSystem) -> SequentProof:
    """A cut-free proof of f |- f by structural recursion."""
    if not system.two_sided:
        raise ValueError("derive_ax builds two-sided proofs only")
    d = dialect_of(f)
    if d == CLASSICAL_BV:
        raise DialectError("derive_ax needs an intuitionistic formula")
    return _derive_ax(f, system.name)


@lru_cache(maxsize=None)
def _derive_ax(f: Formula, system_name: str) -> SequentProof:
    goal = two_sided((f,), f)
    t = f[0]
    if t == "atom":
        return SequentProof(goal, RuleApp("ax"))
    if t == "unit":
        inner = SequentProof(two_sided((), f), RuleApp("one_R"))
        return SequentProof(goal, RuleApp("one_L", principal=0), (inner,))
    if t == "tens":
        a, b = f[1], f[2]
        split = SequentProof(
            two_sided((a, b), f),
            RuleApp("tens_R", partition=((0,), (1,))),
            (_derive_ax(a, system_name), _derive_ax(b, system_name)),
        )
        return SequentProof(goal, RuleApp("tens_L", principal=0), (split,))
    if t == "impl":
        a, b = f[1], f[2]
        body = SequentProof(
            two_sided((f, a), b),
            RuleApp("imp_L", principal=0, partition=((1,), ())),
            (_derive_ax(a, system_name), _derive_ax(b, system_name)),
        )
        return SequentProof(goal, RuleApp("imp_R"), (body,))
    if t == "seq":
        if system_name == IMLL:
            raise DialectError("imll has no rule for ; formulas")
        a, b = f[1], f[2]
        return SequentProof(
            goal,
            RuleApp("seq", n=1, seq_indices=(0,), partition=((), ())),
            (_derive_ax(a, system_name), _derive_ax(b, system_name)),
        )
    raise ValueError(f"derive_ax: unsupported formula tag {t}")
