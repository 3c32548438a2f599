"""Interpolation of proofs against the shape of their conclusion.

Given a proof whose conclusion is an implication into a tensor or a
sequence, or out of an implication or a sequence, `split` extracts one
interpolant per component together with a connecting derivation and one
proof per component.  The connecting derivation may collapse padding
units, which no downward rule of the plain system can do, so it is
reported over the symmetric system; the component proofs are always
plain proofs.

The primary engine is a structural recursion on the bottommost step of
the proof.  Steps that act inside one of the zones determined by the
conclusion's shape are replayed onto the matching output; steps at the
juncture are handled case by case, recursing on the remaining prefix
(and, for regrouping steps, on proofs assembled from earlier answers).
Configurations outside the implemented case table fall back to a
bounded upward search for the interpolants, so `split` stays total on
everything the fallback can reach.  Either way the result is revalidated
before being returned.  `SPLIT_COUNTS` records which engine answered.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..derivations import (
    DOWN,
    ApplyError,
    DeepDerivation,
    RuleInstance,
    check_derivation,
    premises_at,
)
from ..formulas import (
    NEGATIVE,
    POSITIVE,
    impl,
    render_formula,
    replace_at,
    seq,
    size,
    subformula_at,
    tens,
    unit,
)
from ..prover import decide_deep
from ..systems import get_system
from .builders import (
    derivation_between,
    imp_functorial,
    seq_functorial,
    tens_functorial,
    tens_rearrange_steps,
    tensor_intro,
)
from .errors import SplitError, TransformError

TENSOR_RIGHT = "tensor_right"
IMPL_RIGHT = "impl_right"
SEQ_RIGHT = "seq_right_of_impl"
SEQ_LEFT = "seq_left_of_impl"

_SHAPES = (TENSOR_RIGHT, IMPL_RIGHT, SEQ_RIGHT, SEQ_LEFT)

#: how each engine has answered since import, for coverage monitoring
SPLIT_COUNTS = {"structural": 0, "search": 0}

_RECURSION_BUDGET = 400
_SEARCH_PAD = 8

# the plain system plus the two unit collapses of the equational fragment
_EXT = get_system("ibv_plus_iup", exclude=("i_up_neg",))


@dataclass(frozen=True)
class SplitResult:
    """Interpolants for one proof, with the derivations tying them back.

    `deriv_k` runs from the recombined interpolants down to the original
    antecedent (or up to the consequent, for the left-handed shapes); the
    two proofs relate each interpolant to its component.
    """

    shape: str
    k_left: object
    k_right: object
    deriv_k: DeepDerivation
    proof_left: DeepDerivation
    proof_right: DeepDerivation


# ---------------------------------------------------------------------------
# tuple-level surgery on derivations
#
# The assemblies below know every intermediate formula outright, so they
# build DeepDerivation tuples directly instead of going through the
# checked builder; the final validation replays the whole result.

def _append(d: DeepDerivation, rule: str, path, result) -> DeepDerivation:
    inst = RuleInstance(rule, tuple(path), DOWN)
    return DeepDerivation(d.system, d.premise, d.steps + ((inst, result),), d.ambient)


_APPLY_DOWN = {
    "comm_tens": lambda n: tens(n[2], n[1]),
    "assoc_tens": lambda n: tens(n[1][1], tens(n[1][2], n[2])),
    "assoc_seq_L": lambda n: seq(n[1][1], seq(n[1][2], n[2])),
    "assoc_seq_R": lambda n: seq(seq(n[1], n[2][1]), n[2][2]),
    "cur": lambda n: impl(n[1][1], impl(n[1][2], n[2])),
    "ruc": lambda n: impl(tens(n[1], n[2][1]), n[2][2]),
    "u_down_tens": lambda n: tens(unit(), n),
    "u_down_imp": lambda n: impl(unit(), n),
    "u_down_seq": lambda n: seq(unit(), n),
    "u_down_coseq": lambda n: seq(n, unit()),
    "u_up_tens": lambda n: n[2],
    "u_up_imp": lambda n: n[2],
    "u_up_seq": lambda n: n[2],
    "u_up_coseq": lambda n: n[1],
    "ref_neg": lambda n: tens(n[1], n[2]),
    "ref_pos": lambda n: seq(n[1], n[2]),
    "q_down_neg": lambda n: tens(seq(n[1][1], n[2][1]), seq(n[1][2], n[2][2])),
    "q_down_pos": lambda n: impl(seq(n[1][1], n[2][1]), seq(n[1][2], n[2][2])),
    "sq_L_neg": lambda n: tens(n[1][1], seq(n[1][2], n[2])),
    "sq_R_neg": lambda n: tens(n[2][1], seq(n[1], n[2][2])),
    "s_L_neg": lambda n: tens(n[1][1], impl(n[1][2], n[2])),
}


def _step_down(d: DeepDerivation, rule: str, at=()) -> DeepDerivation:
    """Append one step whose result follows from the rule's schema."""
    f = d.conclusion
    node = subformula_at(f, at)
    try:
        new_node = _APPLY_DOWN[rule](node)
    except (KeyError, IndexError, TypeError):
        raise SplitError(f"cannot apply {rule} at {at} during assembly")
    return _append(d, rule, at, replace_at(f, at, new_node))


def _graft(host: DeepDerivation, sub: DeepDerivation, at) -> DeepDerivation:
    """Append sub's steps to host, re-rooted at `at`."""
    f = host.conclusion
    if subformula_at(f, at) != sub.premise:
        raise SplitError("graft point does not carry the expected premise")
    steps = list(host.steps)
    for inst, res in sub.steps:
        f = replace_at(f, at, res)
        steps.append((RuleInstance(inst.rule, tuple(at) + tuple(inst.path), DOWN), f))
    return DeepDerivation(host.system, host.premise, tuple(steps), host.ambient)


def _prefix(d: DeepDerivation) -> DeepDerivation:
    return DeepDerivation(d.system, d.premise, d.steps[:-1], d.ambient)


def _neg_deriv(premise) -> DeepDerivation:
    return DeepDerivation("sibv", premise, (), NEGATIVE)


def _pos_deriv(premise) -> DeepDerivation:
    return DeepDerivation("sibv", premise, (), POSITIVE)


def _unit_proof() -> DeepDerivation:
    return DeepDerivation("ibv", unit(), (), POSITIVE)


def _unit_impl_proof() -> DeepDerivation:
    """A proof of 1 -o 1."""
    return _step_down(_unit_proof(), "u_down_imp")


def _lift_unit_left(p: DeepDerivation) -> DeepDerivation:
    """Turn a proof of A into a proof of 1 -o A."""
    return _graft(_unit_impl_proof(), p, (1,))


def _seq_intro(p1: DeepDerivation, p2: DeepDerivation) -> DeepDerivation:
    """Combine proofs of A and B into a proof of A ; B."""
    d = _step_down(_unit_proof(), "u_down_seq")
    d = _graft(d, p1, (0,))
    return _graft(d, p2, (1,))


# ---------------------------------------------------------------------------
# tensor bookkeeping helpers

def _tens_leaves(f) -> list:
    if f[0] == "tens":
        return _tens_leaves(f[1]) + _tens_leaves(f[2])
    return [f]


def _fold_tens(xs: list):
    if not xs:
        return unit()
    if len(xs) == 1:
        return xs[0]
    return tens(xs[0], _fold_tens(xs[1:]))


def _fold_pos(i: int, m: int) -> tuple:
    """Path of element i inside the right-nested fold of m elements."""
    if m == 1:
        return ()
    if i == m - 1:
        return (1,) * (m - 1)
    return (1,) * i + (0,)


def _dance(d: DeepDerivation, target, at=()) -> DeepDerivation:
    """Rebracket the tensor tree at `at` into `target` (same leaves)."""
    cur = subformula_at(d.conclusion, at)
    if cur == target:
        return d
    try:
        moves = tens_rearrange_steps(cur, target)
    except TransformError as exc:
        raise SplitError(str(exc))
    for rule, q in moves:
        d = _step_down(d, rule, tuple(at) + tuple(q))
    return d


def _units_to(d: DeepDerivation, target, at=()) -> DeepDerivation:
    """Like `_dance` but inserting or collapsing unit factors as needed."""
    cur = subformula_at(d.conclusion, at)
    if cur == target:
        return d
    have = _tens_leaves(cur)
    want = _tens_leaves(target)
    spare = len(have) - len(want)
    if spare > 0:
        shell = target
        for _ in range(spare):
            shell = tens(unit(), shell)
        d = _dance(d, shell, at)
        for _ in range(spare):
            d = _step_down(d, "u_up_tens", at)
        return d
    for _ in range(-spare):
        d = _step_down(d, "u_down_tens", at)
    return _dance(d, target, at)


def _spine_split(f, core_tag: str):
    """Decompose X1 -o (... -o (A op B)) against the given core tag."""
    xs = []
    while f[0] == "impl":
        xs.append(f[1])
        f = f[2]
    if f[0] != core_tag:
        return None
    return xs, f[1], f[2]


def _leading_ones(path) -> int:
    n = 0
    for c in path:
        if c != 1:
            break
        n += 1
    return n


def _spend(budget) -> None:
    if budget[0] <= 0:
        raise SplitError("splitting recursion budget exhausted")
    budget[0] -= 1


def _uncurry(proof: DeepDerivation, xs: list) -> DeepDerivation:
    """From a proof of X1 -o (... -o C) make a proof of fold(Xs) -o C."""
    d = proof
    for _ in range(len(xs) - 1):
        d = _step_down(d, "ruc")
    return _dance(d, _fold_tens(xs), (0,))


# ---------------------------------------------------------------------------
# proofs of a bare tensor or sequence, one component at a time

def _root_split(proof: DeepDerivation, tag: str, budget) -> tuple:
    """Proofs of the two components of a proof of A op B."""
    _spend(budget)
    conc = proof.conclusion
    if conc[0] != tag:
        raise SplitError("conclusion lost the expected root connective")
    a_part, b_part = conc[1], conc[2]
    if not proof.steps:
        raise SplitError("ran out of steps before the root connective appeared")
    inst, _ = proof.steps[-1]
    rule, path = inst.rule, tuple(inst.path)
    above = _prefix(proof)
    if path and path[0] == 0:
        pa, pb = _root_split(above, tag, budget)
        return _append(pa, rule, path[1:], a_part), pb
    if path and path[0] == 1:
        pa, pb = _root_split(above, tag, budget)
        return pa, _append(pb, rule, path[1:], b_part)
    if tag == "tens":
        if rule == "comm_tens":
            pb, pa = _root_split(above, tag, budget)
            return pa, pb
        if rule == "assoc_tens":
            ppq, pr = _root_split(above, tag, budget)
            pp, pq = _root_split(ppq, "tens", budget)
            return pp, tensor_intro(pq, pr)
        if rule == "u_down_tens":
            return _unit_proof(), above
    else:
        if rule == "assoc_seq_L":
            ppq, pr = _root_split(above, tag, budget)
            pp, pq = _root_split(ppq, "seq", budget)
            return pp, _seq_intro(pq, pr)
        if rule == "assoc_seq_R":
            pp, pqr = _root_split(above, tag, budget)
            pq, pr = _root_split(pqr, "seq", budget)
            return _seq_intro(pp, pq), pr
        if rule == "u_down_seq":
            return _unit_proof(), above
        if rule == "u_down_coseq":
            return above, _unit_proof()
        if rule == "ref_pos":
            return _root_split(above, "tens", budget)
    raise SplitError(f"no root-split case for {rule} at the juncture")


# ---------------------------------------------------------------------------
# right-handed shapes: conclusion X1 -o (... -o (A op B))
#
# Results are stated against K = fold(Xs): a negative derivation from
# K_A op K_B down to K, plus proofs of K_A -o A and K_B -o B.

def _split_right(proof: DeepDerivation, tag: str, budget) -> tuple:
    _spend(budget)
    conc = proof.conclusion
    sp = _spine_split(conc, tag)
    if sp is None:
        raise SplitError("conclusion lost the expected right-handed shape")
    xs, a_part, b_part = sp
    m = len(xs)
    if m == 0:
        pa, pb = _root_split(proof, tag, budget)
        mk = tens if tag == "tens" else seq
        collapse = "u_up_tens" if tag == "tens" else "u_up_seq"
        dk = _step_down(_neg_deriv(mk(unit(), unit())), collapse)
        return unit(), unit(), dk, _lift_unit_left(pa), _lift_unit_left(pb)
    if not proof.steps:
        raise SplitError("ran out of steps before the shape appeared")
    inst, _ = proof.steps[-1]
    rule, path = inst.rule, tuple(inst.path)
    above = _prefix(proof)
    lead = _leading_ones(path)

    if lead >= m and len(path) > m:
        # inside one half of the core
        ka, kb, dk, pa, pb = _split_right(above, tag, budget)
        rel = path[m + 1:]
        if path[m] == 0:
            pa = _append(pa, rule, (1,) + rel, impl(ka, a_part))
        else:
            pb = _append(pb, rule, (1,) + rel, impl(kb, b_part))
        return ka, kb, dk, pa, pb
    if lead < m and len(path) > lead:
        # inside one of the spine operands
        ka, kb, dk, pa, pb = _split_right(above, tag, budget)
        dk = _append(dk, rule, _fold_pos(lead, m) + path[lead + 1:], _fold_tens(xs))
        return ka, kb, dk, pa, pb
    if lead == m:
        return _right_core(above, rule, xs, tag, budget)
    return _right_spine(above, rule, lead, xs, tag, budget)


def _right_core(above, rule, xs, tag, budget):
    """Juncture step at the core connective itself."""
    m = len(xs)
    if rule == "comm_tens" and tag == "tens":
        kb, ka, dk1, pb, pa = _split_right(above, tag, budget)
        dk = _step_down(_neg_deriv(tens(ka, kb)), "comm_tens")
        return ka, kb, _graft(dk, dk1, ()), pa, pb
    if rule == "assoc_tens" and tag == "tens":
        # core regrouped from (P * Q) * R
        kpq, kr, dk1, ppq, pr = _split_right(above, tag, budget)
        kp, kq, dk2, pp, pq = _split_right(ppq, "tens", budget)
        dk = _neg_deriv(tens(kp, tens(kq, kr)))
        dk = _dance(dk, tens(tens(kp, kq), kr))
        dk = _graft(dk, dk2, (0,))
        dk = _graft(dk, dk1, ())
        return kp, tens(kq, kr), dk, pp, tens_functorial(pq, pr)
    if rule == "assoc_seq_L" and tag == "seq":
        kpq, kr, dk1, ppq, pr = _split_right(above, tag, budget)
        kp, kq, dk2, pp, pq = _split_right(ppq, "seq", budget)
        dk = _step_down(_neg_deriv(seq(kp, seq(kq, kr))), "assoc_seq_R")
        dk = _graft(dk, dk2, (0,))
        dk = _graft(dk, dk1, ())
        return kp, seq(kq, kr), dk, pp, seq_functorial(pq, pr)
    if rule == "assoc_seq_R" and tag == "seq":
        kp, kqr, dk1, pp, pqr = _split_right(above, tag, budget)
        kq, kr, dk2, pq, pr = _split_right(pqr, "seq", budget)
        dk = _step_down(_neg_deriv(seq(seq(kp, kq), kr)), "assoc_seq_L")
        dk = _graft(dk, dk2, (1,))
        dk = _graft(dk, dk1, ())
        return seq(kp, kq), kr, dk, seq_functorial(pp, pq), pr
    if rule == "ref_pos" and tag == "seq":
        ka, kb, dk1, pa, pb = _split_right(above, "tens", budget)
        dk = _step_down(_neg_deriv(seq(ka, kb)), "ref_neg")
        return ka, kb, _graft(dk, dk1, ()), pa, pb
    if rule in ("u_down_tens", "u_down_seq", "u_down_coseq"):
        want = "tens" if rule == "u_down_tens" else "seq"
        if want != tag:
            raise SplitError("unit introduction does not match the core")
        rest = _uncurry(above, xs)
        k = _fold_tens(xs)
        if rule == "u_down_coseq":
            dk = _step_down(_neg_deriv(seq(k, unit())), "u_up_coseq")
            return k, unit(), dk, rest, _unit_impl_proof()
        collapse = "u_up_tens" if tag == "tens" else "u_up_seq"
        mk = tens if tag == "tens" else seq
        dk = _step_down(_neg_deriv(mk(unit(), k)), collapse)
        return unit(), k, dk, _unit_impl_proof(), rest
    raise SplitError(f"no core case for {rule}")


def _right_spine(above, rule, j, xs, tag, budget):
    """Juncture step at spine node j (the node (1,)*j)."""
    m = len(xs)
    if rule in ("cur", "ruc"):
        ka, kb, dk, pa, pb = _split_right(above, tag, budget)
        return ka, kb, _dance(dk, _fold_tens(xs)), pa, pb
    if rule == "u_down_imp":
        # the spine operand X_{j+1} = 1 appeared here
        ka, kb, dk, pa, pb = _split_right(above, tag, budget)
        return ka, kb, _units_to(dk, _fold_tens(xs)), pa, pb
    if rule == "s_L_pos" and j == 0:
        # conclusion starts (P -o Q) -o ...; the prefix proves P * (Q -o ...)
        head = xs[0]
        pp, ptail = _root_split(above, "tens", budget)
        ka, kb, dk, pa, pb = _split_right(ptail, tag, budget)
        spot = _fold_pos(0, m)
        dk = _step_down(dk, "u_down_imp", spot)
        dk = _graft(dk, pp, spot + (0,))
        if dk.conclusion != _fold_tens(xs):
            raise SplitError("spine reassembly drifted off target")
        return ka, kb, dk, pa, pb
    if j == m - 1 and rule == "s_R_pos" and tag == "tens":
        # the last operand migrated in from the left half of the core
        ka1, kb, dk1, pa1, pb = _split_right(above, "tens", budget)
        last = xs[m - 1]
        ka = tens(ka1, last)
        dk = _dance(_neg_deriv(tens(ka, kb)), tens(tens(ka1, kb), last))
        dk = _graft(dk, dk1, (0,))
        dk = _units_to(dk, _fold_tens(xs))
        return ka, kb, dk, _step_down(pa1, "ruc"), pb
    if j == m - 1 and tag == "seq":
        last = xs[m - 1]
        if rule == "q_down_pos":
            # above core: (P -o A) ; (R -o B) with last = P ; R
            k1, k2, dk1, p1, p2 = _split_right(above, "seq", budget)
            ka, kb = tens(k1, last[1]), tens(k2, last[2])
            dk = _step_down(_neg_deriv(seq(ka, kb)), "q_down_neg")
            dk = _graft(dk, dk1, (0,))
            dk = _units_to(dk, _fold_tens(xs))
            return ka, kb, dk, _step_down(p1, "ruc"), _step_down(p2, "ruc")
        if rule == "sq_L_pos":
            # above core: (last -o A) ; B
            k1, kb, dk1, p1, pb = _split_right(above, "seq", budget)
            ka = tens(k1, last)
            dk = _step_down(_neg_deriv(seq(ka, kb)), "comm_tens", (0,))
            dk = _step_down(dk, "sq_L_neg")
            dk = _graft(dk, dk1, (1,))
            dk = _units_to(dk, _fold_tens(xs))
            return ka, kb, dk, _step_down(p1, "ruc"), pb
        if rule == "sq_R_pos":
            # above core: A ; (last -o B)
            ka, k2, dk1, pa, p2 = _split_right(above, "seq", budget)
            kb = tens(k2, last)
            dk = _step_down(_neg_deriv(seq(ka, kb)), "comm_tens", (1,))
            dk = _step_down(dk, "sq_R_neg")
            dk = _graft(dk, dk1, (1,))
            dk = _units_to(dk, _fold_tens(xs))
            return ka, kb, dk, pa, _step_down(p2, "ruc")
    raise SplitError(f"no spine case for {rule} at depth {j}")


# ---------------------------------------------------------------------------
# left-handed shapes: conclusion (A op B) -o K
#
# Results: a positive derivation from K_A op' K_B down to K, a proof
# relating K_A to A (direction depends on the shape) and one of B -o K_B.

def _split_left(proof: DeepDerivation, obj_tag: str, budget) -> tuple:
    _spend(budget)
    conc = proof.conclusion
    if conc[0] != "impl" or conc[1][0] != obj_tag:
        raise SplitError("conclusion lost the expected left-handed shape")
    obj, k_f = conc[1], conc[2]
    a_part, b_part = obj[1], obj[2]
    if not proof.steps:
        raise SplitError("ran out of steps before the shape appeared")
    inst, _ = proof.steps[-1]
    rule, path = inst.rule, tuple(inst.path)
    above = _prefix(proof)

    if path[:1] == (1,):
        ka, kb, dk, pa, pb = _split_left(above, obj_tag, budget)
        return ka, kb, _append(dk, rule, path[1:], k_f), pa, pb
    if path[:2] == (0, 0):
        ka, kb, dk, pa, pb = _split_left(above, obj_tag, budget)
        if obj_tag == "impl":
            pa = _append(pa, rule, (1,) + path[2:], impl(ka, a_part))
        else:
            pa = _append(pa, rule, (0,) + path[2:], impl(a_part, ka))
        return ka, kb, dk, pa, pb
    if path[:2] == (0, 1):
        ka, kb, dk, pa, pb = _split_left(above, obj_tag, budget)
        return ka, kb, dk, pa, _append(pb, rule, (0,) + path[2:], impl(b_part, kb))
    if path == (0,):
        return _left_object(proof, above, rule, obj_tag, k_f, budget)
    if path == ():
        return _left_root(proof, above, rule, obj_tag, obj, k_f, budget)
    raise SplitError("step fell outside every zone of the shape")


def _left_object(proof, above, rule, obj_tag, k_f, budget):
    """Juncture step rewriting the antecedent object itself."""
    if obj_tag == "impl":
        if rule == "u_down_imp":
            # object 1 -o X; the prefix already proves X -o K
            dk = _step_down(_pos_deriv(impl(unit(), k_f)), "u_up_imp")
            return unit(), k_f, dk, _unit_impl_proof(), above
        if rule == "ruc":
            # object (P * Q) -o C regrouped from P -o (Q -o C)
            ka1, kb1, dk1, pa1, pb1 = _split_left(above, "impl", budget)
            kq, kc, dk2, pq, pc = _split_left(pb1, "impl", budget)
            dk = _step_down(_pos_deriv(impl(tens(ka1, kq), kc)), "cur")
            dk = _graft(dk, dk2, (1,))
            dk = _graft(dk, dk1, ())
            return tens(ka1, kq), kc, dk, tens_functorial(pa1, pq), pc
        if rule == "cur":
            # object P -o (Q -o C) regrouped from (P * Q) -o C
            kpq, kc, dk1, ppq, pc = _split_left(above, "impl", budget)
            kp, kq, dk2, pp, pq = _split_right(ppq, "tens", budget)
            dk = _step_down(_pos_deriv(impl(kp, impl(kq, kc))), "ruc")
            dk = _graft(dk, dk2, (0,))
            dk = _graft(dk, dk1, ())
            return kp, impl(kq, kc), dk, pp, imp_functorial(pq, pc)
    else:
        if rule == "assoc_seq_L":
            # object P ; (Q ; R) regrouped from (P ; Q) ; R
            kpq, kr, dk1, ppq, pr = _split_left(above, "seq", budget)
            kp, kq, dk2, pp, pq = _split_left(ppq, "seq", budget)
            dk = _step_down(_pos_deriv(seq(kp, seq(kq, kr))), "assoc_seq_R")
            dk = _graft(dk, dk2, (0,))
            dk = _graft(dk, dk1, ())
            return kp, seq(kq, kr), dk, pp, seq_functorial(pq, pr)
        if rule == "assoc_seq_R":
            kp, kqr, dk1, pp, pqr = _split_left(above, "seq", budget)
            kq, kr, dk2, pq, pr = _split_left(pqr, "seq", budget)
            dk = _step_down(_pos_deriv(seq(seq(kp, kq), kr)), "assoc_seq_L")
            dk = _graft(dk, dk2, (1,))
            dk = _graft(dk, dk1, ())
            return seq(kp, kq), kr, dk, seq_functorial(pp, pq), pr
    raise SplitError(f"no object case for {rule}")


def _left_root(proof, above, rule, obj_tag, obj, k_f, budget):
    """Juncture step at the root implication."""
    if rule == "s_L_pos" and obj_tag == "impl":
        # prefix proves A * (B -o K)
        pa_raw, pbk = _root_split(above, "tens", budget)
        dk = _step_down(_pos_deriv(impl(unit(), k_f)), "u_up_imp")
        return unit(), k_f, dk, _lift_unit_left(pa_raw), pbk
    if rule == "q_down_pos" and obj_tag == "seq":
        if k_f[0] != "seq":
            raise SplitError("consequent of the pairing step is not a sequence")
        pab, pcd = _root_split(above, "seq", budget)
        return k_f[1], k_f[2], _pos_deriv(seq(k_f[1], k_f[2])), pab, pcd
    if rule == "s_R_pos":
        # K = B' * C'; prefix proves (obj -o B') * C'
        pob, pc = _root_split(above, "tens", budget)
        ka, kb, dk, pa, pb = _split_left(pob, obj_tag, budget)
        dk = _step_down(dk, "u_down_tens")
        dk = _step_down(dk, "comm_tens")
        return ka, kb, _graft(dk, pc, (1,)), pa, pb
    if rule == "sq_L_pos":
        pob, pc = _root_split(above, "seq", budget)
        ka, kb, dk, pa, pb = _split_left(pob, obj_tag, budget)
        dk = _step_down(dk, "u_down_coseq")
        return ka, kb, _graft(dk, pc, (1,)), pa, pb
    if rule == "sq_R_pos":
        pb_raw, poc = _root_split(above, "seq", budget)
        ka, kb, dk, pa, pb = _split_left(poc, obj_tag, budget)
        dk = _step_down(dk, "u_down_seq")
        return ka, kb, _graft(dk, pb_raw, (0,)), pa, pb
    raise SplitError(f"no root case for {rule}")


# ---------------------------------------------------------------------------
# fallback: bounded upward search for the interpolants

def _search(k, ambient: str, accept, max_visited: int):
    """Find g above k (in the extended system) with accept(g) truthy."""
    payload = accept(k)
    if payload is not None:
        return k, payload, DeepDerivation("sibv", k, (), ambient)
    cap = size(k) + _SEARCH_PAD
    seen = {k}
    queue = deque([k])
    visited = 0
    while queue:
        f = queue.popleft()
        visited += 1
        if visited > max_visited:
            break
        for _inst, g in premises_at(f, _EXT, ambient):
            if g in seen or size(g) > cap:
                continue
            seen.add(g)
            payload = accept(g)
            if payload is not None:
                d = derivation_between(g, k, ambient, system=_EXT,
                                       max_visited=max_visited)
                if d is None:
                    continue
                return g, payload, DeepDerivation("sibv", d.premise, d.steps, ambient)
            queue.append(g)
    raise SplitError(f"no interpolant found above {render_formula(k)}")


def _prove(goal):
    verdict = decide_deep("ibv", goal)
    return verdict.proof if verdict.provable else None


def _split_by_search(proof, shape, max_visited):
    conc = proof.conclusion
    if shape == TENSOR_RIGHT:
        k, core = conc[1], conc[2]
        a_part, b_part = core[1], core[2]

        def accept(g):
            if g[0] != "tens":
                return None
            pl = _prove(impl(g[1], a_part))
            if pl is None:
                return None
            pr = _prove(impl(g[2], b_part))
            return None if pr is None else (pl, pr)

        g, (pl, pr), dk = _search(k, NEGATIVE, accept, max_visited)
        return SplitResult(shape, g[1], g[2], dk, pl, pr)
    if shape == SEQ_RIGHT:
        k, core = conc[1], conc[2]
        a_part, b_part = core[1], core[2]

        def accept(g):
            if g[0] != "seq":
                return None
            pl = _prove(impl(g[1], a_part))
            if pl is None:
                return None
            pr = _prove(impl(g[2], b_part))
            return None if pr is None else (pl, pr)

        g, (pl, pr), dk = _search(k, NEGATIVE, accept, max_visited)
        return SplitResult(shape, g[1], g[2], dk, pl, pr)
    if shape == IMPL_RIGHT:
        obj, k = conc[1], conc[2]
        a_part, b_part = obj[1], obj[2]

        def accept(g):
            if g[0] != "impl":
                return None
            pl = _prove(impl(g[1], a_part))
            if pl is None:
                return None
            pr = _prove(impl(b_part, g[2]))
            return None if pr is None else (pl, pr)

        g, (pl, pr), dk = _search(k, POSITIVE, accept, max_visited)
        return SplitResult(shape, g[1], g[2], dk, pl, pr)
    obj, k = conc[1], conc[2]
    a_part, b_part = obj[1], obj[2]

    def accept(g):
        if g[0] != "seq":
            return None
        pl = _prove(impl(a_part, g[1]))
        if pl is None:
            return None
        pr = _prove(impl(b_part, g[2]))
        return None if pr is None else (pl, pr)

    g, (pl, pr), dk = _search(k, POSITIVE, accept, max_visited)
    return SplitResult(shape, g[1], g[2], dk, pl, pr)


# ---------------------------------------------------------------------------
# entry points

def _require_plain_proof(proof: DeepDerivation, what: str) -> None:
    if proof.ambient != POSITIVE:
        raise SplitError(f"{what} must live at positive ambient polarity")
    if proof.premise != unit():
        raise SplitError(f"{what} must start from the unit")
    report = check_derivation(proof, "ibv")
    if not report.ok:
        raise SplitError(f"{what} does not check: {report.reason}")


_SHAPE_INFO = {
    TENSOR_RIGHT: ("tens", False, NEGATIVE),
    SEQ_RIGHT: ("seq", False, NEGATIVE),
    IMPL_RIGHT: ("impl", True, POSITIVE),
    SEQ_LEFT: ("seq", True, POSITIVE),
}


def _shape_parts(conc, shape):
    core_tag, left_handed, _ = _SHAPE_INFO[shape]
    if conc[0] != "impl":
        raise SplitError("conclusion is not an implication")
    side = conc[1] if left_handed else conc[2]
    if side[0] != core_tag:
        raise SplitError(
            f"conclusion {render_formula(conc)} does not match shape {shape}"
        )
    return side[1], side[2]


def _validate_result(res: SplitResult, proof: DeepDerivation) -> None:
    conc = proof.conclusion
    core_tag, left_handed, ambient = _SHAPE_INFO[res.shape]
    a_part, b_part = _shape_parts(conc, res.shape)
    k = conc[2] if left_handed else conc[1]
    mk = {"tens": tens, "seq": seq, "impl": impl}[core_tag]
    dk = res.deriv_k
    if dk.ambient != ambient or dk.premise != mk(res.k_left, res.k_right):
        raise SplitError("connecting derivation has the wrong endpoints")
    if dk.conclusion != k:
        raise SplitError("connecting derivation misses the antecedent")
    report = check_derivation(dk, "sibv")
    if not report.ok:
        raise SplitError(f"connecting derivation does not check: {report.reason}")
    if res.shape in (TENSOR_RIGHT, SEQ_RIGHT):
        want_l = impl(res.k_left, a_part)
        want_r = impl(res.k_right, b_part)
    elif res.shape == IMPL_RIGHT:
        want_l = impl(res.k_left, a_part)
        want_r = impl(b_part, res.k_right)
    else:
        want_l = impl(a_part, res.k_left)
        want_r = impl(b_part, res.k_right)
    for p, want, name in (
        (res.proof_left, want_l, "left"),
        (res.proof_right, want_r, "right"),
    ):
        if p.conclusion != want:
            raise SplitError(f"{name} component proof proves the wrong formula")
        _require_plain_proof(p, f"{name} component proof")


def split(proof: DeepDerivation, shape: str, max_visited: int = 200_000) -> SplitResult:
    """Interpolate a proof against one of the four implication shapes.

    Tries the structural recursion first and falls back to the bounded
    search; raises SplitError when the conclusion does not match the
    shape or neither engine finds the interpolants.
    """
    if shape not in _SHAPES:
        raise SplitError(f"unknown shape {shape!r}")
    _require_plain_proof(proof, "input")
    conc = proof.conclusion
    _shape_parts(conc, shape)
    try:
        res = _structural(proof, shape)
        _validate_result(res, proof)
        SPLIT_COUNTS["structural"] += 1
        return res
    except (SplitError, TransformError, ApplyError, RecursionError):
        pass
    res = _split_by_search(proof, shape, max_visited)
    _validate_result(res, proof)
    SPLIT_COUNTS["search"] += 1
    return res


def _structural(proof: DeepDerivation, shape: str) -> SplitResult:
    budget = [_RECURSION_BUDGET]
    if shape == TENSOR_RIGHT:
        ka, kb, dk, pa, pb = _split_right(proof, "tens", budget)
    elif shape == SEQ_RIGHT:
        ka, kb, dk, pa, pb = _split_right(proof, "seq", budget)
    elif shape == IMPL_RIGHT:
        ka, kb, dk, pa, pb = _split_left(proof, "impl", budget)
    else:
        ka, kb, dk, pa, pb = _split_left(proof, "seq", budget)
    return SplitResult(shape, ka, kb, dk, pa, pb)


def recombine(res: SplitResult) -> DeepDerivation:
    """Reprove the split conclusion from the pieces of a SplitResult.

    The reassembled proof lives in the symmetric system because the
    connecting derivation may collapse padding units.
    """
    if res.shape == TENSOR_RIGHT:
        p = tens_functorial(res.proof_left, res.proof_right, system="sibv")
        return _graft_checked(p, res.deriv_k, (0,))
    if res.shape == SEQ_RIGHT:
        p = seq_functorial(res.proof_left, res.proof_right, system="sibv")
        return _graft_checked(p, res.deriv_k, (0,))
    if res.shape == IMPL_RIGHT:
        p = imp_functorial(res.proof_left, res.proof_right, system="sibv")
        return _graft_checked(p, res.deriv_k, (1,))
    p = seq_functorial(res.proof_left, res.proof_right, system="sibv")
    return _graft_checked(p, res.deriv_k, (1,))


def _graft_checked(p: DeepDerivation, sub: DeepDerivation, at) -> DeepDerivation:
    out = _graft(DeepDerivation("sibv", p.premise, p.steps, p.ambient), sub, at)
    report = check_derivation(out, "sibv")
    if not report.ok:
        raise SplitError(f"recombination does not check: {report.reason}")
    return out


# ---------------------------------------------------------------------------
# atomic interpolation: proofs of K -o a and a -o K

TO_ATOM = "to_atom"
FROM_ATOM = "from_atom"

ATOMIC_COUNTS = {"structural": 0, "search": 0}


def _atomic_to(proof: DeepDerivation, tail, budget) -> DeepDerivation:
    """Negative derivation from `tail` down to fold(Xs), where the proof
    concludes X1 -o (... -o tail) and tail is the atom or the unit."""
    _spend(budget)
    conc = proof.conclusion
    xs = []
    walk = conc
    while walk[0] == "impl":
        xs.append(walk[1])
        walk = walk[2]
    if walk != tail:
        raise SplitError("conclusion lost its atomic tail")
    m = len(xs)
    if m == 0:
        if tail == unit():
            return DeepDerivation("sibv", tail, (), NEGATIVE)
        raise SplitError("a bare atom cannot head a proof")
    if not proof.steps:
        raise SplitError("ran out of steps before the tail appeared")
    inst, _ = proof.steps[-1]
    rule, path = inst.rule, tuple(inst.path)
    above = _prefix(proof)
    lead = _leading_ones(path)
    if lead < m and len(path) > lead:
        d = _atomic_to(above, tail, budget)
        return _append(d, rule, _fold_pos(lead, m) + path[lead + 1:], _fold_tens(xs))
    if lead >= m:
        raise SplitError("step at the tail of an atomic shape")
    j = lead
    if rule in ("cur", "ruc"):
        return _dance(_atomic_to(above, tail, budget), _fold_tens(xs))
    if rule == "u_down_imp":
        return _units_to(_atomic_to(above, tail, budget), _fold_tens(xs))
    if rule == "s_L_pos" and j == 0:
        pp, ptail = _root_split(above, "tens", budget)
        d = _atomic_to(ptail, tail, budget)
        spot = _fold_pos(0, m)
        d = _step_down(d, "u_down_imp", spot)
        return _graft(d, pp, spot + (0,))
    if rule == "ai_down_pos" and j == m - 1:
        # the identity step minted  a -o a  at the end of the spine
        if m == 1:
            return DeepDerivation("sibv", tail, (), NEGATIVE)
        d1 = _atomic_to(above, unit(), budget)
        d = _step_down(DeepDerivation("sibv", tail, (), NEGATIVE), "u_down_tens")
        d = _graft(d, d1, (0,))
        return _dance(d, _fold_tens(xs))
    raise SplitError(f"no atomic case for {rule} at depth {j}")


def _atomic_from(proof: DeepDerivation, budget) -> DeepDerivation:
    """Positive derivation from the atom down to K, for a proof of a -o K."""
    _spend(budget)
    conc = proof.conclusion
    if conc[0] != "impl" or conc[1][0] != "atom":
        raise SplitError("conclusion lost the atom-first shape")
    a, k_f = conc[1], conc[2]
    if not proof.steps:
        raise SplitError("ran out of steps before the shape appeared")
    inst, _ = proof.steps[-1]
    rule, path = inst.rule, tuple(inst.path)
    above = _prefix(proof)
    if path[:1] == (1,):
        d = _atomic_from(above, budget)
        return _append(d, rule, path[1:], k_f)
    if path == ():
        if rule == "ai_down_pos":
            return DeepDerivation("sibv", a, (), POSITIVE)
        if rule == "s_R_pos":
            pak, pc = _root_split(above, "tens", budget)
            d = _atomic_from(pak, budget)
            d = _step_down(d, "u_down_tens")
            d = _step_down(d, "comm_tens")
            return _graft(d, pc, (1,))
        if rule == "sq_L_pos":
            pak, pc = _root_split(above, "seq", budget)
            d = _atomic_from(pak, budget)
            d = _step_down(d, "u_down_coseq")
            return _graft(d, pc, (1,))
        if rule == "sq_R_pos":
            pb, pak = _root_split(above, "seq", budget)
            d = _atomic_from(pak, budget)
            d = _step_down(d, "u_down_seq")
            return _graft(d, pb, (0,))
    raise SplitError(f"no atomic case for {rule}")


def atomic_split(proof: DeepDerivation, orientation: str,
                 max_visited: int = 200_000) -> DeepDerivation:
    """Pull the atom out of a proof of K -o a (or a -o K).

    Returns a derivation from the atom down to K; negative ambient for
    TO_ATOM, positive for FROM_ATOM.
    """
    _require_plain_proof(proof, "input")
    conc = proof.conclusion
    if conc[0] != "impl":
        raise SplitError("conclusion is not an implication")
    if orientation == TO_ATOM:
        k, a, ambient = conc[1], conc[2], NEGATIVE
    elif orientation == FROM_ATOM:
        a, k, ambient = conc[1], conc[2], POSITIVE
    else:
        raise SplitError(f"unknown orientation {orientation!r}")
    if a[0] != "atom":
        raise SplitError("the designated side is not an atom")
    try:
        budget = [_RECURSION_BUDGET]
        if orientation == TO_ATOM:
            d = _atomic_to(proof, a, budget)
        else:
            d = _atomic_from(proof, budget)
        _validate_atomic(d, a, k, ambient)
        ATOMIC_COUNTS["structural"] += 1
        return d
    except (SplitError, TransformError, ApplyError, RecursionError):
        pass
    d = derivation_between(a, k, ambient, system=_EXT, max_visited=max_visited)
    if d is None:
        raise SplitError(
            f"no derivation from {render_formula(a)} to {render_formula(k)}"
        )
    d = DeepDerivation("sibv", d.premise, d.steps, d.ambient)
    _validate_atomic(d, a, k, ambient)
    ATOMIC_COUNTS["search"] += 1
    return d


def _validate_atomic(d: DeepDerivation, a, k, ambient: str) -> None:
    if d.premise != a or d.conclusion != k or d.ambient != ambient:
        raise SplitError("atomic interpolation has the wrong endpoints")
    report = check_derivation(d, "sibv")
    if not report.ok:
        raise SplitError(f"atomic interpolation does not check: {report.reason}")


# ---------------------------------------------------------------------------
# unit-flavored interpolation against a tensor, sequence or cosequence

def unit_partner_search(kind: str, k, a, max_visited: int = 200_000):
    """Find X, Y with a derivation from X op Y down to K, a provable
    padding side and a proof of a -o (the other side).

    `kind` selects the connective and which side carries the padding:
    "tens" looks for X * Y with X provable, "seq" for X ; Y with X
    provable, "coseq" for X ; Y with Y provable.  Returns
    (x, y, deriv, proof_pad, proof_main).
    """
    if kind == "tens":
        shape, pad_left = "tens", True
    elif kind == "seq":
        shape, pad_left = "seq", True
    elif kind == "coseq":
        shape, pad_left = "seq", False
    else:
        raise SplitError(f"unknown partner kind {kind!r}")

    def accept(g):
        if g[0] != shape:
            return None
        pad, main = (g[1], g[2]) if pad_left else (g[2], g[1])
        p_pad = _prove(pad)
        if p_pad is None:
            return None
        p_main = _prove(impl(a, main))
        return None if p_main is None else (p_pad, p_main)

    g, (p_pad, p_main), d = _search(k, POSITIVE, accept, max_visited)
    return g[1], g[2], d, p_pad, p_main
