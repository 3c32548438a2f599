"""Low-level derivation combinators shared by the transformations.

The three functorial builders turn proofs of implications into a proof
of an implication between compound formulas, one per binary connective.
`tens_rearrange_steps` and `seq_rearrange_steps` compute the dotted
shuffle between two bracketings of the same operands, and
`derivation_between` searches for a derivation connecting two given
formulas at a fixed ambient polarity.
"""

from collections import deque

from ..derivations import DOWN, DeepDerivation, DerivationBuilder, RuleInstance
from ..formulas import POSITIVE, render_formula, unit
from ..systems import get_system
from .errors import TransformError


def _require_proof(d: DeepDerivation, what: str) -> None:
    if d.premise != unit() or d.ambient != POSITIVE:
        raise TransformError(f"{what} must be a proof (premise 1, positive ambient)")


def _conclusion_impl(d: DeepDerivation, what: str):
    c = d.conclusion
    if c[0] != "impl":
        raise TransformError(f"{what} must prove an implication, got {render_formula(c)}")
    return c[1], c[2]


def tensor_intro(p1: DeepDerivation, p2: DeepDerivation, system="ibv") -> DeepDerivation:
    """Combine proofs of A and B into a proof of A * B."""
    _require_proof(p1, "first input")
    _require_proof(p2, "second input")
    b = DerivationBuilder(unit(), system)
    b.step("u_down_tens")
    b.graft(p1, (0,))
    b.graft(p2, (1,))
    return b.derivation()


def tens_functorial(pl: DeepDerivation, pr: DeepDerivation, system="ibv") -> DeepDerivation:
    """From proofs of A -o B and C -o D build a proof of (A * C) -o (B * D)."""
    _require_proof(pl, "left input")
    _require_proof(pr, "right input")
    _conclusion_impl(pl, "left input")
    _conclusion_impl(pr, "right input")
    b = DerivationBuilder(unit(), system)
    b.step("u_down_tens")
    b.graft(pl, (0,))
    b.graft(pr, (1,))
    b.step("s_R_pos")
    b.step("comm_tens", (1,))
    b.step("s_R_pos", (1,))
    b.step("ruc")
    b.step("comm_tens", (1,))
    return b.derivation()


def seq_functorial(pl: DeepDerivation, pr: DeepDerivation, system="ibv") -> DeepDerivation:
    """From proofs of A -o B and C -o D build a proof of (A ; C) -o (B ; D)."""
    _require_proof(pl, "left input")
    _require_proof(pr, "right input")
    _conclusion_impl(pl, "left input")
    _conclusion_impl(pr, "right input")
    b = DerivationBuilder(unit(), system)
    b.step("u_down_seq")
    b.graft(pl, (0,))
    b.graft(pr, (1,))
    b.step("q_down_pos")
    return b.derivation()


def imp_functorial(pa: DeepDerivation, pb: DeepDerivation, system="ibv") -> DeepDerivation:
    """From proofs of X -o Y and U -o V build a proof of (Y -o U) -o (X -o V).

    The first argument feeds the contravariant slot: the left-hand sides
    of the output implication swap compared to the inputs.
    """
    _require_proof(pa, "first input")
    _require_proof(pb, "second input")
    _conclusion_impl(pa, "first input")
    _conclusion_impl(pb, "second input")
    b = DerivationBuilder(unit(), system)
    b.extend(pb)
    b.step("u_down_imp", (0,))
    b.graft(pa, (0, 0))
    b.step("s_L_neg", (0,))
    b.step("comm_tens", (0,))
    b.step("cur")
    return b.derivation()


# ---------------------------------------------------------------------------
# rebracketing shuffles

def _tens_spine(f) -> list:
    if f[0] == "tens":
        return _tens_spine(f[1]) + _tens_spine(f[2])
    return [f]


def _seq_spine(f) -> list:
    if f[0] == "seq":
        return _seq_spine(f[1]) + _seq_spine(f[2])
    return [f]


def _spine_positions(f, tag):
    """Paths of every `tag` node reachable through `tag` nodes only."""
    out = []
    if f[0] == tag:
        out.append(())
        for i in (0, 1):
            out.extend((i,) + q for q in _spine_positions(f[1 + i], tag))
    return out


def _replace(f, path, sub):
    if not path:
        return sub
    l, r = f[1], f[2]
    if path[0] == 0:
        return (f[0], _replace(l, path[1:], sub), r)
    return (f[0], l, _replace(r, path[1:], sub))


def _sub(f, path):
    for i in path:
        f = f[1 + i]
    return f


def _tens_moves(f):
    """One-step neighbors of a tensor tree, with the steps that get there."""
    for q in _spine_positions(f, "tens"):
        node = _sub(f, q)
        l, r = node[1], node[2]
        yield _replace(f, q, ("tens", r, l)), [("comm_tens", q)]
        if l[0] == "tens":
            yield (
                _replace(f, q, ("tens", l[1], ("tens", l[2], r))),
                [("assoc_tens", q)],
            )
        if r[0] == "tens":
            # reassociate to the left through five dotted steps
            yield (
                _replace(f, q, ("tens", ("tens", l, r[1]), r[2])),
                [(n, q) for n in ("comm_tens", "assoc_tens", "comm_tens", "assoc_tens", "comm_tens")],
            )


def _seq_moves(f):
    for q in _spine_positions(f, "seq"):
        node = _sub(f, q)
        l, r = node[1], node[2]
        if l[0] == "seq":
            yield _replace(f, q, ("seq", l[1], ("seq", l[2], r))), [("assoc_seq_L", q)]
        if r[0] == "seq":
            yield _replace(f, q, ("seq", ("seq", l, r[1]), r[2])), [("assoc_seq_R", q)]


def _rearrange(current, target, moves, cap=50000):
    if current == target:
        return []
    seen = {current}
    back = {}
    queue = deque([current])
    visited = 0
    while queue:
        f = queue.popleft()
        visited += 1
        if visited > cap:
            break
        for g, steps in moves(f):
            if g in seen:
                continue
            seen.add(g)
            back[g] = (f, steps)
            if g == target:
                chain = []
                node = g
                while node != current:
                    node, steps = back[node]
                    chain.append(steps)
                return [s for part in reversed(chain) for s in part]
            queue.append(g)
    raise TransformError(
        f"cannot rearrange {render_formula(current)} into {render_formula(target)}"
    )


def tens_rearrange_steps(current, target):
    """Steps (rule, relative path) turning one tensor bracketing into another.

    Both formulas must be tensor trees over the same multiset of
    operands; operands are treated as opaque.
    """
    cur_leaves = sorted(map(repr, _tens_spine(current)))
    tgt_leaves = sorted(map(repr, _tens_spine(target)))
    if cur_leaves != tgt_leaves:
        raise TransformError("tensor trees have different operands")
    return _rearrange(current, target, _tens_moves)


def seq_rearrange_steps(current, target):
    """Steps (rule, relative path) rebracketing a seq tree, order preserved."""
    if _seq_spine(current) != _seq_spine(target):
        raise TransformError("seq trees have different operand sequences")
    return _rearrange(current, target, _seq_moves)


# ---------------------------------------------------------------------------
# bounded upward search between two fixed endpoints

def derivation_between(
    premise,
    conclusion,
    ambient: str = POSITIVE,
    system="ibv",
    max_visited: int = 200_000,
) -> DeepDerivation | None:
    """A derivation from `premise` down to `conclusion`, or None.

    Explores upward neighbors of `conclusion` breadth-first at the given
    ambient polarity; because no rule of the downward systems shrinks a
    formula, the closure is finite and the search is complete for them.
    """
    from ..derivations import premises_at

    sys = get_system(system) if isinstance(system, str) else system
    if premise == conclusion:
        return DeepDerivation(sys.name, premise, (), ambient)
    link = {}
    seen = {conclusion}
    queue = deque([conclusion])
    visited = 0
    while queue:
        f = queue.popleft()
        visited += 1
        if visited > max_visited:
            return None
        for inst, g in premises_at(f, sys, ambient):
            if g in seen:
                continue
            seen.add(g)
            link[g] = (inst.rule, inst.path, f)
            if g == premise:
                steps = []
                cur = premise
                while cur != conclusion:
                    rule, path, below = link[cur]
                    steps.append((RuleInstance(rule, path, DOWN), below))
                    cur = below
                return DeepDerivation(sys.name, premise, tuple(steps), ambient)
            queue.append(g)
    return None
