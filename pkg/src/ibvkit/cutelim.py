"""Cut elimination for the two-sided sequent calculi.

The eliminator rewrites a checked proof with cut nodes into a cut-free
proof of the same end-sequent.  General-axiom nodes are expanded first,
then each topmost cut is removed by the usual admissibility recursion:
axiom cuts vanish, a cut whose left premise ends in a left rule commutes
upward on that side first, principal pairs reduce to cuts on strictly
smaller formulas, and everything else commutes into the right premise.

The one non-classical principal pair is two seq rules cut against a
; formula: they merge into a single seq rule carrying both rules'
pointwise pairs, with one smaller cut on each side.

Associative-cut nodes are rejected: they are not admissible, and cut
elimination is not defined for them.
"""

from __future__ import annotations

from .formulas import Formula, unit
from .sequents import (
    INML,
    RuleApp,
    Sequent,
    SequentProof,
    SequentSystem,
    check_sequent_proof,
    derive_ax,
    get_sequent_system,
    two_sided,
)

_LEFT_RULES = ("one_L", "tens_L", "imp_L")


class CutEliminationError(ValueError):
    pass


def _remove_one(ant: tuple, f: Formula) -> tuple:
    i = ant.index(f)  # raises ValueError if absent, which would be a bug
    return ant[:i] + ant[i + 1:]


def _height(p: SequentProof) -> int:
    return 1 + max((_height(q) for q in p.premises), default=0)


def _expand_ax(p: SequentProof, system: SequentSystem) -> SequentProof:
    if p.rule == "AX":
        return derive_ax(p.conclusion.antecedent[0], system)
    if not p.premises:
        return p
    return SequentProof(
        p.conclusion, p.app, tuple(_expand_ax(q, system) for q in p.premises)
    )


def eliminate_cut(
    p: SequentProof,
    system: SequentSystem | str = INML,
    stats: dict | None = None,
) -> SequentProof:
    """Cut-free proof of p's end-sequent; p must check with cuts allowed.

    `system` names the cut-free target; `stats`, if given, accumulates
    counts under the keys principal, principal_seq, commute, and axiom.
    """
    if isinstance(system, str):
        system = get_sequent_system(system)
    if system.name not in (INML, "imll"):
        raise CutEliminationError("cut elimination covers imll and inml proofs")
    for node in p.nodes():
        if node.rule in ("acut_L", "acut_R"):
            raise CutEliminationError("associative cuts are not admissible")
    with_cut = SequentSystem(system.name, allow_cut=True, assoc_rewrite=system.assoc_rewrite)
    report = check_sequent_proof(p, with_cut)
    if not report.ok:
        raise CutEliminationError(f"input does not check: {report.reason}")
    if stats is None:
        stats = {}
    for k in ("principal", "principal_seq", "commute", "axiom"):
        stats.setdefault(k, 0)

    out = _eliminate(_expand_ax(p, system), stats)
    final = check_sequent_proof(out, system)
    if not final.ok or out.conclusion.key() != p.conclusion.key():
        raise AssertionError(f"cut elimination broke the proof: {final.reason}")
    return out


def _eliminate(p: SequentProof, stats: dict) -> SequentProof:
    premises = tuple(_eliminate(q, stats) for q in p.premises)
    if p.rule != "cut":
        return SequentProof(p.conclusion, p.app, premises)
    left, right = premises
    f = p.app.cut_formula
    return _cut(left, right, f, stats)


def _cut(p1: SequentProof, p2: SequentProof, f: Formula, stats: dict) -> SequentProof:
    """Cut-free proof of  p1.ant, (p2.ant minus one f)  |-  p2's succedent.

    p1 proves f; p2 consumes one antecedent occurrence of f.  Occurrences
    of equal formulas are interchangeable (antecedents are multisets), so
    the occurrence is chosen by value.
    """
    if p1.rule == "ax":
        stats["axiom"] += 1
        return p2
    if p2.rule == "ax":
        stats["axiom"] += 1
        return p1
    if p1.rule in _LEFT_RULES:
        return _commute_left(p1, p2, f, stats)
    if _principal_on(p2, f):
        return _principal(p1, p2, f, stats)
    return _commute_right(p1, p2, f, stats)


def _principal_on(p2: SequentProof, f: Formula) -> bool:
    g = p2.conclusion.antecedent
    r = p2.rule
    if r == "one_L":
        return f == unit()
    if r == "tens_L":
        return f[0] == "tens" and g[p2.app.principal] == f
    if r == "imp_L":
        return f[0] == "impl" and g[p2.app.principal] == f
    if r == "seq":
        return f[0] == "seq" and any(g[i] == f for i in p2.app.seq_indices)
    return False


# -- commuting -------------------------------------------------------------

def _commute_left(p1: SequentProof, p2: SequentProof, f, stats) -> SequentProof:
    """p1 ends in a left rule; push the cut into its succedent premise."""
    stats["commute"] += 1
    g = p1.conclusion.antecedent
    c = p2.conclusion.succedent
    if p1.rule == "one_L":
        inner = _cut(p1.premises[0], p2, f, stats)
        ant = inner.conclusion.antecedent + (unit(),)
        return SequentProof(
            two_sided(ant, c),
            RuleApp("one_L", principal=len(ant) - 1),
            (inner,),
        )
    if p1.rule == "tens_L":
        principal = g[p1.app.principal]
        inner = _cut(p1.premises[0], p2, f, stats)
        stripped = _remove_one(
            _remove_one(inner.conclusion.antecedent, principal[1]), principal[2]
        )
        ant = stripped + (principal,)
        return SequentProof(
            two_sided(ant, c),
            RuleApp("tens_L", principal=len(ant) - 1),
            (inner,),
        )
    # imp_L: the cut formula lives in the right premise's succedent side
    principal = g[p1.app.principal]
    q_left, q_right = p1.premises
    inner = _cut(q_right, p2, f, stats)
    stripped = _remove_one(inner.conclusion.antecedent, principal[2])
    ant = q_left.conclusion.antecedent + stripped + (principal,)
    k = len(q_left.conclusion.antecedent)
    return SequentProof(
        two_sided(ant, c),
        RuleApp(
            "imp_L",
            principal=len(ant) - 1,
            partition=(tuple(range(k)), tuple(range(k, len(ant) - 1))),
        ),
        (q_left, inner),
    )


def _which_side(p2: SequentProof, f: Formula) -> int:
    """Which premise the partition sent a context occurrence of f to.

    Provenance matters: the premise on the other side may still contain
    an equal formula introduced by the rule itself (an implication's
    consequent, a seq pair's component), and cutting against that one
    would corrupt the context bookkeeping.
    """
    app = p2.app
    g = p2.conclusion.antecedent
    excluded = set(app.seq_indices)
    if app.principal is not None:
        excluded.add(app.principal)
    part0 = set(app.partition[0]) if app.partition else set()
    for j, formula in enumerate(g):
        if j not in excluded and formula == f:
            return 0 if j in part0 else 1
    raise CutEliminationError("cut formula occurrence not found in the context")


def _commute_right(p1: SequentProof, p2: SequentProof, f, stats) -> SequentProof:
    """The cut formula is a bystander in p2's last rule; push it upward."""
    stats["commute"] += 1
    r = p2.rule
    c = p2.conclusion.succedent
    g1 = p1.conclusion.antecedent
    if r == "one_L":
        inner = _cut(p1, p2.premises[0], f, stats)
        ant = inner.conclusion.antecedent + (unit(),)
        return SequentProof(
            two_sided(ant, c), RuleApp("one_L", principal=len(ant) - 1), (inner,)
        )
    if r == "tens_L":
        principal = p2.conclusion.antecedent[p2.app.principal]
        inner = _cut(p1, p2.premises[0], f, stats)
        stripped = _remove_one(
            _remove_one(inner.conclusion.antecedent, principal[1]), principal[2]
        )
        ant = stripped + (principal,)
        return SequentProof(
            two_sided(ant, c), RuleApp("tens_L", principal=len(ant) - 1), (inner,)
        )
    if r == "imp_R":
        inner = _cut(p1, p2.premises[0], f, stats)
        ant = _remove_one(inner.conclusion.antecedent, c[1])
        return SequentProof(two_sided(ant, c), RuleApp("imp_R"), (inner,))
    if r == "tens_R":
        which = _which_side(p2, f)
        inner = _cut(p1, p2.premises[which], f, stats)
        other = p2.premises[1 - which]
        first, second = (inner, other) if which == 0 else (other, inner)
        ant = first.conclusion.antecedent + second.conclusion.antecedent
        k = len(first.conclusion.antecedent)
        return SequentProof(
            two_sided(ant, c),
            RuleApp(
                "tens_R",
                partition=(tuple(range(k)), tuple(range(k, len(ant)))),
            ),
            (first, second),
        )
    if r == "imp_L":
        principal = p2.conclusion.antecedent[p2.app.principal]
        which = _which_side(p2, f)
        inner = _cut(p1, p2.premises[which], f, stats)
        if which == 0:
            first, second = inner, p2.premises[1]
        else:
            first, second = p2.premises[0], inner
        second_ctx = _remove_one(second.conclusion.antecedent, principal[2])
        ant = first.conclusion.antecedent + second_ctx + (principal,)
        k = len(first.conclusion.antecedent)
        return SequentProof(
            two_sided(ant, c),
            RuleApp(
                "imp_L",
                principal=len(ant) - 1,
                partition=(tuple(range(k)), tuple(range(k, len(ant) - 1))),
            ),
            (first, second),
        )
    if r == "seq":
        pairs = tuple(p2.conclusion.antecedent[i] for i in p2.app.seq_indices)
        which = _which_side(p2, f)
        inner = _cut(p1, p2.premises[which], f, stats)
        if which == 0:
            first, second = inner, p2.premises[1]
        else:
            first, second = p2.premises[0], inner
        ctx1 = first.conclusion.antecedent
        ctx2 = second.conclusion.antecedent
        for pair in pairs:
            ctx1 = _remove_one(ctx1, pair[1])
            ctx2 = _remove_one(ctx2, pair[2])
        ant = ctx1 + ctx2 + pairs
        k1, k2 = len(ctx1), len(ctx2)
        return SequentProof(
            two_sided(ant, c),
            RuleApp(
                "seq",
                n=len(pairs),
                seq_indices=tuple(range(k1 + k2, len(ant))),
                partition=(tuple(range(k1)), tuple(range(k1, k1 + k2))),
            ),
            (first, second),
        )
    raise CutEliminationError(f"cannot commute a cut past rule {r}")


# -- principal reductions --------------------------------------------------

def _principal(p1: SequentProof, p2: SequentProof, f, stats) -> SequentProof:
    if f == unit():
        # one_R against one_L: the cut evaporates
        stats["principal"] += 1
        return p2.premises[0]
    if f[0] == "tens":
        stats["principal"] += 1
        q_a, q_b = p1.premises
        inner = _cut(q_a, p2.premises[0], f[1], stats)
        return _cut(q_b, inner, f[2], stats)
    if f[0] == "impl":
        stats["principal"] += 1
        q_body = p1.premises[0]
        q_arg, q_use = p2.premises
        inner = _cut(q_arg, q_body, f[1], stats)
        return _cut(inner, q_use, f[2], stats)
    if f[0] == "seq":
        return _principal_seq(p1, p2, f, stats)
    raise CutEliminationError(f"no principal case for cut formula {f!r}")


def _principal_seq(p1: SequentProof, p2: SequentProof, f, stats) -> SequentProof:
    """Two seq rules meet on A;B: merge into one seq with both pair lists."""
    stats["principal_seq"] += 1
    c = p2.conclusion.succedent
    pairs1 = tuple(p1.conclusion.antecedent[i] for i in p1.app.seq_indices)
    pairs2_all = tuple(p2.conclusion.antecedent[i] for i in p2.app.seq_indices)
    pairs2 = _remove_one(pairs2_all, f)  # the cut occurrence drops out
    q1l, q1r = p1.premises
    q2l, q2r = p2.premises
    inner_l = _cut(q1l, q2l, f[1], stats)
    inner_r = _cut(q1r, q2r, f[2], stats)
    ctx_l = inner_l.conclusion.antecedent
    ctx_r = inner_r.conclusion.antecedent
    for pair in pairs1:
        ctx_l = _remove_one(ctx_l, pair[1])
        ctx_r = _remove_one(ctx_r, pair[2])
    for pair in pairs2:
        ctx_l = _remove_one(ctx_l, pair[1])
        ctx_r = _remove_one(ctx_r, pair[2])
    pairs = pairs1 + pairs2
    ant = ctx_l + ctx_r + pairs
    k1, k2 = len(ctx_l), len(ctx_r)
    return SequentProof(
        two_sided(ant, c),
        RuleApp(
            "seq",
            n=len(pairs),
            seq_indices=tuple(range(k1 + k2, len(ant))),
            partition=(tuple(range(k1)), tuple(range(k1, k1 + k2))),
        ),
        (inner_l, inner_r),
    )
