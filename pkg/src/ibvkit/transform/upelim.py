"""Removal of up rules from symmetric-system proofs.

The loop walks the proof top down.  For the topmost up instance, the
part above it is a plain downward proof, so a context reduction turns
the surroundings of the redex into an implication against an
interpolant K plus a reusable derivation template.  The redex side of
that implication is then split along its main connective and
reassembled against the rule's conclusion with down rules only; the
template stitched back underneath restores the original context, and
the steps below the instance carry over unchanged.

Interpolation derivations may introduce fresh unit padding that a later
up instance merely undoes.  Those instances are eliminated by surgery
rather than reassembly: the erased unit is traced backwards through the
rule patterns to the step that created it, both steps are dropped, and
everything in between is replayed on the formulas with the pad
collapsed away, each replayed step re-verified.  Instances the surgery
cannot reach fall back to a direct, budget-capped decision of the
reduced implication.  A round budget caps the loop; on exhaustion, or
when a fallback decision gives out, the conclusion is re-proved from
scratch in the downward system rather than churning forever.
"""

from ..derivations import (
    ApplyError,
    DeepDerivation,
    DerivationBuilder,
    RuleInstance,
    UP,
    check_derivation,
    concat,
)
from ..formulas import (
    HOLE,
    NEGATIVE,
    POSITIVE,
    impl,
    path_parity,
    render_formula,
    replace_at,
    subformula_at,
    unit,
)
from ..prover import SearchBudget, decide_deep
from ..rules import RULES_BY_NAME
from ..systems import get_system
from .builders import imp_functorial, seq_functorial, tens_functorial
from .contextred import context_reduce
from .errors import ContextReduceError, SplitError, TransformError
from .identity import contract_identity, expand_identity
from .splitting import (
    FROM_ATOM,
    IMPL_RIGHT,
    SEQ_LEFT,
    SEQ_RIGHT,
    TENSOR_RIGHT,
    TO_ATOM,
    atomic_split,
    split,
)

_UP_RULES = frozenset(
    {
        "ai_up_neg",
        "u_up_seq",
        "u_up_coseq",
        "u_up_tens",
        "u_up_imp",
        "q_up_pos",
        "q_up_neg",
    }
)
_INTERNAL = frozenset({"i_down_pos", "i_up_neg"})
_ACCEPTED = frozenset({"ibv", "sibv", "ibv_plus_iup"})

# Up rules that erase a unit next to their survivor, keyed to the child
# slot the unit occupies in the redex.  These are candidates for the
# pad-cancellation surgery.
_UNIT_UPS = {"u_up_tens": 0, "u_up_imp": 0, "u_up_seq": 0, "u_up_coseq": 1}

# Caps for the decision-procedure fallbacks.  Everything these searches
# are asked for is either small or hopeless; bounded failure beats
# minutes of saturation.
_LOCAL_BUDGET = SearchBudget(max_visited=150_000)
_FINAL_BUDGET = SearchBudget(max_visited=600_000)

# How each elimination round was discharged.  `constructive` covers the
# split-and-reassemble path, `peephole` the padding cancellation,
# `local` a direct decision of the reduced implication, `root_special`
# instances at the root, `fallback` a re-proof of the whole step result,
# and `wholesale` the budget-exhausted re-proof of the conclusion.
ELIMINATION_COUNTS = {
    "constructive": 0,
    "peephole": 0,
    "local": 0,
    "root_special": 0,
    "fallback": 0,
    "wholesale": 0,
}


def eliminate_up(proof: DeepDerivation, max_rounds: int = 400) -> DeepDerivation:
    """Turn a proof in the symmetric system into a downward-only proof.

    The input must be a proof (unit premise, positive statement) in the
    downward, symmetric, or identity-extended system; the result proves
    the same conclusion in the downward system.  Raises TransformError
    for malformed input or when no round budget remains and the
    conclusion cannot be re-proved directly.
    """
    if proof.premise != unit() or proof.ambient != POSITIVE:
        raise TransformError("up-rule elimination needs a proof")
    if proof.system not in _ACCEPTED:
        raise TransformError(f"unsupported system {proof.system!r}")
    rep = check_derivation(proof, proof.system)
    if not rep.ok:
        raise TransformError(f"input does not check: {rep.reason}")

    if any(inst.rule in _INTERNAL for inst, _ in proof.steps):
        work = _splice_internal(proof)
    else:
        work = DeepDerivation("sibv", proof.premise, proof.steps, proof.ambient)

    rounds = 0
    while True:
        idx = _topmost_up(work)
        if idx is None:
            break
        rounds += 1
        if rounds > max_rounds:
            work = _wholesale(work)
            break
        try:
            work = _round(work, idx)
        except _SearchFailed:
            work = _wholesale(work)
            break

    out = DeepDerivation("ibv", work.premise, work.steps, work.ambient)
    rep = check_derivation(out, "ibv")
    if not rep.ok:
        raise TransformError(f"eliminated proof does not check: {rep.reason}")
    return out


def _topmost_up(d: DeepDerivation):
    for i, (inst, _) in enumerate(d.steps):
        if inst.rule in _UP_RULES:
            return i
    return None


def _splice_internal(proof: DeepDerivation) -> DeepDerivation:
    """Replace identity-introduction and -contraction steps by their
    defining derivations, so the rest of the loop only ever sees the
    symmetric system."""
    steps = []
    cur = proof.premise
    for inst, res in proof.steps:
        if inst.rule == "i_down_pos":
            body = subformula_at(res, inst.path)
            _splice(steps, cur, inst.path, expand_identity(body[1]))
        elif inst.rule == "i_up_neg":
            body = subformula_at(cur, inst.path)
            _splice(steps, cur, inst.path, contract_identity(body[1]))
        else:
            steps.append((inst, res))
        cur = res
    out = DeepDerivation("sibv", proof.premise, tuple(steps), proof.ambient)
    rep = check_derivation(out, "sibv")
    if not rep.ok:
        raise TransformError(f"identity splice does not check: {rep.reason}")
    return out


def _splice(steps, whole, at, sub: DeepDerivation) -> None:
    for inst, res in sub.steps:
        whole = replace_at(whole, at, res)
        steps.append((RuleInstance(inst.rule, at + inst.path, inst.direction), whole))


def _round(work: DeepDerivation, idx: int) -> DeepDerivation:
    inst, below = work.steps[idx]
    above = work.steps[idx - 1][1] if idx else work.premise
    q = inst.path

    if inst.rule in _UNIT_UPS:
        cancelled = _cancel_padding(work, idx)
        if cancelled is not None:
            ELIMINATION_COUNTS["peephole"] += 1
            return cancelled

    tail = work.steps[idx + 1 :]
    if q == ():
        head = _reprove(below)
        ELIMINATION_COUNTS["root_special"] += 1
    else:
        prefix = DeepDerivation("ibv", work.premise, work.steps[:idx], POSITIVE)
        try:
            head = _cut_out(prefix, inst.rule, above, below, q)
        except (ContextReduceError, SplitError, TransformError, ApplyError, ValueError):
            head = _reprove(below)
            ELIMINATION_COUNTS["fallback"] += 1
    out = DeepDerivation("sibv", work.premise, head.steps + tail, work.ambient)
    rep = check_derivation(out, "sibv")
    if not rep.ok:
        raise TransformError(
            f"round output does not check at step {rep.step_index}: {rep.reason}"
        )
    return out


def _cut_out(prefix: DeepDerivation, rule: str, above, below, q) -> DeepDerivation:
    """Rebuild a proof of `below` from the proof `prefix` of `above`,
    where the two differ by one application of `rule` at `q`."""
    ctx = replace_at(above, q, HOLE)
    sign = POSITIVE if path_parity(above, q) % 2 == 0 else NEGATIVE
    redex = subformula_at(above, q)
    contractum = subformula_at(below, q)

    k, template, proof_k = context_reduce(prefix, ctx, sign)
    if sign == POSITIVE:
        target = impl(k, contractum)
    else:
        target = impl(contractum, k)

    builder = _BRIDGES.get((rule, sign))
    bridge = None
    if builder is not None:
        try:
            bridge = builder(proof_k, redex, k)
            ELIMINATION_COUNTS["constructive"] += 1
        except (SplitError, TransformError, ApplyError, ValueError):
            bridge = None
    if bridge is None:
        bridge = _reprove(target)
        ELIMINATION_COUNTS["local"] += 1
    if bridge.conclusion != target:
        raise TransformError(
            f"bridge proves {render_formula(bridge.conclusion)}, "
            f"wanted {render_formula(target)}"
        )
    return concat(bridge, template.instantiate(contractum), "sibv")


class _SearchFailed(TransformError):
    """A fallback decision ran out of budget or found nothing."""


def _reprove(goal, budget: SearchBudget = _LOCAL_BUDGET) -> DeepDerivation:
    res = decide_deep("ibv", goal, budget=budget)
    if not res.provable:
        raise _SearchFailed(
            f"cannot re-prove {render_formula(goal)} in the downward system"
            f" ({res.status}, {res.visited} states)"
        )
    return res.proof


def _wholesale(work: DeepDerivation) -> DeepDerivation:
    ELIMINATION_COUNTS["wholesale"] += 1
    try:
        return _reprove(work.conclusion, _FINAL_BUDGET)
    except _SearchFailed as e:
        raise TransformError(f"up-rule elimination gave out: {e}") from None


# ---------------------------------------------------------------------------
# padding cancellation
#
# An up instance that erases a unit pad cancels against the step that
# created that unit, wherever the pad has wandered in between.  The unit
# is a leaf, and every rule pattern is linear, so its position maps
# deterministically backwards through each step: inside the rewritten
# part, follow the metavariable that carries it; outside, it stays put.
# Once the birth step is found, both steps are dropped and the steps in
# between are replayed on the collapsed formulas, each application
# re-verified; any step that genuinely consumed the pad pair makes the
# replay fail, and the surgery reports failure instead of guessing.


def _pattern_paths(pat, base=()):
    """Positions of the metavariables inside a rule pattern."""
    tag = pat[0]
    if tag == "var":
        return {pat[1]: base}
    if tag in ("tens", "par", "impl", "seq"):
        out = _pattern_paths(pat[1], base + (0,))
        out.update(_pattern_paths(pat[2], base + (1,)))
        return out
    return {}


def _descend(pat, s):
    """Walk pattern `pat` along path `s` to a metavariable or unit leaf."""
    tag = pat[0]
    if tag == "var":
        return ("var", pat[1], s)
    if tag in ("tens", "par", "impl", "seq"):
        if not s:
            return None
        return _descend(pat[1 + s[0]], s[1:])
    if tag == "unit":
        return ("unit",) if not s else None
    return None


def _step_io(inst: RuleInstance):
    spec = RULES_BY_NAME[inst.rule]
    if inst.direction == UP:
        return spec.conclusion, spec.premise
    return spec.premise, spec.conclusion


def _pull_back(pos, inst: RuleInstance):
    """Map a leaf position across one step, from result back to input.

    Returns the input position, "born" when the step created the leaf,
    or None when the position cannot be followed.
    """
    p = inst.path
    n = len(p)
    if pos[:n] != p:
        return None if p[: len(pos)] == pos else pos
    before_pat, after_pat = _step_io(inst)
    hit = _descend(after_pat, pos[n:])
    if hit is None:
        return None
    if hit[0] == "unit":
        return "born"
    home = _pattern_paths(before_pat).get(hit[1])
    if home is None:
        return None
    return p + home + hit[2]


def _collapse(f, u):
    """Remove the unit leaf at `u` together with its parent node."""
    sib = subformula_at(f, u[:-1] + (1 - u[-1],))
    return replace_at(f, u[:-1], sib)


def _shift(p, u):
    """Step path `p` on the formula with the pad at `u` collapsed away."""
    r = u[:-1]
    sib = r + (1 - u[-1],)
    if p[: len(sib)] == sib:
        return r + p[len(sib) :]
    if p[: len(u)] == u:
        return None
    return p


_SIBV_RULE_NAMES = tuple(r.name for r in get_system("sibv").rules)


def _diff_path(f, g):
    """Deepest path below which all of the difference between f and g lies."""
    if f[0] != g[0] or f[0] in ("atom", "natom", "unit", "hole"):
        return ()
    where = [i for i in (0, 1) if f[i + 1] != g[i + 1]]
    if len(where) != 1:
        return ()
    i = where[0]
    return (i,) + _diff_path(f[i + 1], g[i + 1])


def _find_step(cur, new_res, ambient):
    """A single rule instance turning `cur` into `new_res`, if one exists.

    Tried from the difference downwards-up, so the most local reading of
    the step wins.
    """
    d = _diff_path(cur, new_res)
    for i in range(len(d), -1, -1):
        for name in _SIBV_RULE_NAMES:
            inst = RuleInstance(name, d[:i])
            if _replay_ok(cur, inst, new_res, ambient):
                return inst
    return None


def _replay_ok(cur, inst: RuleInstance, new_res, ambient) -> bool:
    """Is `cur` -> `new_res` exactly one application of `inst`?

    Checker-style validation from both endpoints, so rules that forget
    their atom need no explicit atom argument.
    """
    spec = RULES_BY_NAME.get(inst.rule)
    if spec is None or spec.premise is None:
        return False
    p = inst.path
    try:
        before = subformula_at(cur, p)
        after = subformula_at(new_res, p)
    except (IndexError, TypeError, ValueError):
        return False
    if replace_at(cur, p, after) != new_res:
        return False
    if inst.direction == UP:
        before, after = after, before
    if not spec.check_step(before, after):
        return False
    if spec.sign is None:
        return True
    parity = path_parity(cur, p) ^ (0 if ambient == POSITIVE else 1)
    return (spec.sign == POSITIVE) == (parity % 2 == 0)


def _cancel_padding(work: DeepDerivation, idx: int):
    inst, below = work.steps[idx]
    pos = inst.path + (_UNIT_UPS[inst.rule],)
    track = {}
    born = None
    for t in range(idx - 1, -1, -1):
        track[t] = pos
        pos = _pull_back(pos, work.steps[t][0])
        if pos == "born":
            born = t
            break
        if pos is None:
            return None
    if born is None:
        return None  # the unit descends from the premise itself

    def stage(t):
        return work.steps[t][1] if t >= 0 else work.premise

    u_born = track[born]
    if not u_born or _collapse(stage(born), u_born) != stage(born - 1):
        return None

    steps = list(work.steps[:born])
    cur = stage(born - 1)
    for t in range(born + 1, idx):
        st, res = work.steps[t]
        u_prev, u_cur = track[t - 1], track[t]
        if not u_prev or not u_cur:
            return None
        new_res = _collapse(res, u_cur)
        if new_res == cur:
            continue  # the step only shuffled the pad around
        p = _shift(st.path, u_prev)
        moved = RuleInstance(st.rule, p, st.direction) if p is not None else None
        if moved is None or not _replay_ok(cur, moved, new_res, work.ambient):
            # With the pad gone the original rule may no longer fit; a
            # step fusing the pad with something else shrinks to a
            # smaller rule doing the remaining work.
            moved = _find_step(cur, new_res, work.ambient)
            if moved is None:
                return None
        steps.append((moved, new_res))
        cur = new_res
    if cur != below:
        return None
    steps.extend(work.steps[idx + 1 :])
    cand = DeepDerivation("sibv", work.premise, tuple(steps), work.ambient)
    rep = check_derivation(cand, "sibv")
    return cand if rep.ok else None


# ---------------------------------------------------------------------------
# per-rule reassembly
#
# Each builder receives the reduced implication flanking the redex and
# the interpolant K, splits along the redex's main connective, and
# rebuilds the implication against the rule's conclusion with down
# rules, the interpolation derivations grafted where they belong.


def _bridge_ai(proof_k: DeepDerivation, redex, k) -> DeepDerivation:
    # redex a -o a at an odd position; rebuild 1 -o K
    name = redex[1][1]
    res = split(proof_k, IMPL_RIGHT)
    d_l = atomic_split(res.proof_left, TO_ATOM)
    d_r = atomic_split(res.proof_right, FROM_ATOM)
    b = DerivationBuilder(unit(), "sibv")
    b.step("ai_down_pos", (), atom=name)
    b.graft(d_l, (0,))
    b.graft(d_r, (1,))
    b.graft(res.deriv_k, ())
    b.step("u_down_imp", ())
    return b.derivation()


def _bridge_useq(proof_k: DeepDerivation, redex, k) -> DeepDerivation:
    # redex 1 ; A at an odd position; rebuild A -o K
    res = split(proof_k, SEQ_LEFT)
    b = DerivationBuilder(unit(), "sibv")
    b.extend(res.proof_right)
    b.step("u_down_seq", (1,))
    b.graft(_reprove(res.k_left), (1, 0))
    b.graft(res.deriv_k, (1,))
    return b.derivation()


def _bridge_ucoseq(proof_k: DeepDerivation, redex, k) -> DeepDerivation:
    # redex A ; 1 at an odd position; rebuild A -o K
    res = split(proof_k, SEQ_LEFT)
    b = DerivationBuilder(unit(), "sibv")
    b.extend(res.proof_left)
    b.step("u_down_coseq", (1,))
    b.graft(_reprove(res.k_right), (1, 1))
    b.graft(res.deriv_k, (1,))
    return b.derivation()


def _bridge_qpos(proof_k: DeepDerivation, redex, k) -> DeepDerivation:
    # redex (A ; C) * (B ; D) at an even position; rebuild
    # K -o ((A * B) ; (C * D))
    res = split(proof_k, TENSOR_RIGHT)
    left = split(res.proof_left, SEQ_RIGHT)
    right = split(res.proof_right, SEQ_RIGHT)
    upper = tens_functorial(left.proof_left, right.proof_left)
    lower = tens_functorial(left.proof_right, right.proof_right)
    b = DerivationBuilder(unit(), "sibv")
    b.extend(seq_functorial(upper, lower))
    b.step("q_down_neg", (0,))
    b.graft(left.deriv_k, (0, 0))
    b.graft(right.deriv_k, (0, 1))
    b.graft(res.deriv_k, (0,))
    return b.derivation()


def _bridge_qneg(proof_k: DeepDerivation, redex, k) -> DeepDerivation:
    # redex (A ; C) -o (B ; D) at an odd position; rebuild
    # ((A -o B) ; (C -o D)) -o K
    res = split(proof_k, IMPL_RIGHT)
    left = split(res.proof_left, SEQ_RIGHT)
    right = split(res.proof_right, SEQ_LEFT)
    first = imp_functorial(left.proof_left, right.proof_left)
    second = imp_functorial(left.proof_right, right.proof_right)
    b = DerivationBuilder(unit(), "sibv")
    b.extend(seq_functorial(first, second))
    b.step("q_down_pos", (1,))
    b.graft(left.deriv_k, (1, 0))
    b.graft(right.deriv_k, (1, 1))
    b.graft(res.deriv_k, (1,))
    return b.derivation()


_BRIDGES = {
    ("ai_up_neg", NEGATIVE): _bridge_ai,
    ("u_up_seq", NEGATIVE): _bridge_useq,
    ("u_up_coseq", NEGATIVE): _bridge_ucoseq,
    ("q_up_pos", POSITIVE): _bridge_qpos,
    ("q_up_neg", NEGATIVE): _bridge_qneg,
}
