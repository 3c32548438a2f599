"""Reduce a one-hole context to a single implication flank.

`context_reduce` takes a proof of ctx[A] and produces a formula K, a
reusable derivation template, and a proof relating K to A.  For a
positive context the template turns any proof of K -o X into a
derivation ending in ctx[X] and the proof shows K -o A; for a negative
context the template consumes X -o K and the proof shows A -o K.

The recursion peels the context one connective at a time.  Connectives
on the far side of an implication are absorbed with a split of the
matching shape; tensors and implications nested on the near side are
first rotated into far-side position with the dotted currying moves.
A context whose hole sits under no implication at all has nothing to
curry against, and is rejected.
"""

from dataclasses import dataclass

from ..derivations import DeepDerivation, DerivationBuilder, check_derivation
from ..formulas import (
    HOLE,
    NEGATIVE,
    POSITIVE,
    atom,
    atoms_of,
    context_sign,
    fill_hole,
    find_hole,
    impl,
    render_formula,
    subformula_at,
    subst_atom,
    unit,
)
from ..prover import SearchBudget, decide_deep
from .errors import ContextReduceError, TransformError
from .splitting import split

# Interpolant components are small, so a saturation that gets anywhere
# near this bound is not going to close; give up instead of churning.
_PROVE_BUDGET = SearchBudget(max_visited=150_000)


@dataclass(frozen=True)
class DerivationTemplate:
    """A derivation skeleton over a placeholder atom.

    The skeleton runs from an implication flanking K and the
    placeholder down to the context filled with the placeholder;
    `instantiate` substitutes an arbitrary formula for the placeholder
    and re-checks the result.
    """

    skeleton: DeepDerivation
    hole_atom: str
    sign: str

    def instantiate(self, x) -> DeepDerivation:
        premise = subst_atom(self.skeleton.premise, self.hole_atom, x)
        steps = tuple(
            (inst, subst_atom(res, self.hole_atom, x)) for inst, res in self.skeleton.steps
        )
        out = DeepDerivation("sibv", premise, steps, self.skeleton.ambient)
        rep = check_derivation(out, "sibv")
        if not rep.ok:
            raise TransformError(
                f"template instantiation failed at step {rep.step_index}: {rep.reason}"
            )
        return out


def _fresh_atom(taken) -> str:
    i = 0
    while f"h{i}" in taken:
        i += 1
    return f"h{i}"


def _prove(goal) -> DeepDerivation:
    res = decide_deep("ibv", goal, budget=_PROVE_BUDGET)
    if not res.provable:
        raise ContextReduceError(f"component {render_formula(goal)} is not provable")
    return res.proof


def _after(pi: DeepDerivation, extra) -> DeepDerivation:
    b = DerivationBuilder(unit(), "ibv")
    b.extend(pi)
    for rule, path in extra:
        b.step(rule, path)
    return b.derivation()


def context_reduce(proof: DeepDerivation, ctx, sign: str):
    """Reduce `proof` of ctx[A] along `ctx`; returns (K, template, proof_k)."""
    hole = find_hole(ctx)
    if hole is None:
        raise TransformError("context_reduce needs a context with a hole")
    if context_sign(ctx, hole) != sign:
        raise TransformError(f"context is not {sign} around its hole")
    rep = check_derivation(proof, "ibv")
    if not rep.ok:
        raise TransformError(f"context_reduce input does not check: {rep.reason}")
    if proof.premise != unit() or proof.ambient != POSITIVE:
        raise TransformError("context_reduce input must be a proof")
    a = subformula_at(proof.conclusion, hole)
    if fill_hole(ctx, a) != proof.conclusion:
        raise TransformError("proof conclusion does not fill the context")

    taken = set(atoms_of(ctx) - {"hole"}) | set(atoms_of(proof.conclusion))
    for _, res in proof.steps:
        taken |= atoms_of(res)
    h = _fresh_atom(taken)

    k, skeleton, proof_k = _reduce(proof, ctx, h)
    template = DerivationTemplate(skeleton, h, sign)
    if sign == POSITIVE:
        want = impl(k, atom(h))
    else:
        want = impl(atom(h), k)
    if skeleton.premise != want or skeleton.conclusion != fill_hole(ctx, atom(h)):
        raise TransformError("template endpoints drifted during reduction")
    return k, template, proof_k


def _retag(pi: DeepDerivation) -> DeepDerivation:
    return DeepDerivation("sibv", pi.premise, pi.steps, pi.ambient)


def _reduce(pi: DeepDerivation, ctx, h: str):
    hole = find_hole(ctx)
    if hole == ():
        raise ContextReduceError("hole reaches the root with no implication above it")
    tag = ctx[0]

    if tag in ("tens", "seq"):
        in_left = find_hole(ctx[1]) is not None
        hole_side = ctx[1] if in_left else ctx[2]
        closed = ctx[2] if in_left else ctx[1]
        comp = pi.conclusion[1] if in_left else pi.conclusion[2]
        p_hole = _prove(comp)
        p_closed = _prove(closed)
        k, skel, proof_k = _reduce(p_hole, hole_side, h)
        b = DerivationBuilder(skel.premise, "sibv")
        b.extend(skel)
        if tag == "tens" and in_left:
            b.step("u_down_tens")
            b.step("comm_tens")
            b.graft(p_closed, (1,))
        elif tag == "tens":
            b.step("u_down_tens")
            b.graft(p_closed, (0,))
        elif in_left:
            b.step("u_down_coseq")
            b.graft(p_closed, (1,))
        else:
            b.step("u_down_seq")
            b.graft(p_closed, (0,))
        return k, b.derivation(), proof_k

    if tag != "impl":
        raise ContextReduceError(f"cannot reduce through {render_formula(ctx)}")

    l, r = ctx[1], ctx[2]
    if r == HOLE:
        skel = DeepDerivation("sibv", impl(l, atom(h)), (), POSITIVE)
        return l, skel, _retag(pi)
    if l == HOLE:
        skel = DeepDerivation("sibv", impl(atom(h), r), (), POSITIVE)
        return r, skel, _retag(pi)

    if find_hole(r) is not None:
        return _reduce_far(pi, l, r, h)
    return _reduce_near(pi, l, r, h)


def _reduce_far(pi: DeepDerivation, l, r, h: str):
    """Hole on the right of the implication: ctx = l -o r[hole]."""
    rtag = r[0]
    in_l2 = find_hole(r[1]) is not None

    if rtag == "tens":
        res = split(pi, "tensor_right")
        if in_l2:
            inner, skel_of = res.proof_left, res.k_left
            k, skel, proof_k = _reduce(inner, impl(skel_of, r[1]), h)
            b = DerivationBuilder(skel.premise, "sibv")
            b.extend(skel)
            b.step("u_down_tens", (1,))
            b.graft(res.proof_right, (1, 0))
            b.step("s_R_pos", (1,))
            b.step("comm_tens", (1, 1))
            b.step("ruc")
            b.graft(res.deriv_k, (0,))
            return k, b.derivation(), proof_k
        inner, skel_of = res.proof_right, res.k_right
        k, skel, proof_k = _reduce(inner, impl(skel_of, r[2]), h)
        b = DerivationBuilder(skel.premise, "sibv")
        b.extend(skel)
        b.step("u_down_tens", (1,))
        b.graft(res.proof_left, (1, 0))
        b.step("s_R_pos", (1,))
        b.step("ruc")
        b.step("comm_tens", (0,))
        b.graft(res.deriv_k, (0,))
        return k, b.derivation(), proof_k

    if rtag == "seq":
        res = split(pi, "seq_right_of_impl")
        if in_l2:
            k, skel, proof_k = _reduce(res.proof_left, impl(res.k_left, r[1]), h)
            b = DerivationBuilder(skel.premise, "sibv")
            b.extend(skel)
            b.step("u_down_coseq")
            b.graft(res.proof_right, (1,))
            b.step("q_down_pos")
            b.graft(res.deriv_k, (0,))
            return k, b.derivation(), proof_k
        k, skel, proof_k = _reduce(res.proof_right, impl(res.k_right, r[2]), h)
        b = DerivationBuilder(skel.premise, "sibv")
        b.extend(skel)
        b.step("u_down_seq")
        b.graft(res.proof_left, (0,))
        b.step("q_down_pos")
        b.graft(res.deriv_k, (0,))
        return k, b.derivation(), proof_k

    if rtag == "impl":
        if in_l2:
            # rotate the inner antecedent out: l -o (p[.] -o r2)
            pi2 = _after(pi, [("ruc", ()), ("comm_tens", (0,)), ("cur", ())])
            ctx2 = impl(r[1], impl(l, r[2]))
            k, skel, proof_k = _reduce(pi2, ctx2, h)
            b = DerivationBuilder(skel.premise, "sibv")
            b.extend(skel)
            b.step("ruc")
            b.step("comm_tens", (0,))
            b.step("cur")
            return k, b.derivation(), proof_k
        pi2 = _after(pi, [("ruc", ())])
        ctx2 = impl(("tens", l, r[1]), r[2])
        k, skel, proof_k = _reduce(pi2, ctx2, h)
        b = DerivationBuilder(skel.premise, "sibv")
        b.extend(skel)
        b.step("cur")
        return k, b.derivation(), proof_k

    raise ContextReduceError(f"cannot reduce past {render_formula(r)}")


def _reduce_near(pi: DeepDerivation, l, r, h: str):
    """Hole on the left of the implication: ctx = l[hole] -o r."""
    ltag = l[0]
    in_l1 = find_hole(l[1]) is not None

    if ltag == "impl":
        res = split(pi, "impl_right")
        if in_l1:
            k, skel, proof_k = _reduce(res.proof_left, impl(res.k_left, l[1]), h)
            b = DerivationBuilder(skel.premise, "sibv")
            b.extend(skel)
            b.step("u_down_tens", (1,))
            b.step("comm_tens", (1,))
            b.graft(res.proof_right, (1, 1))
            b.step("s_L_pos", (1,))
            b.step("ruc")
            b.step("comm_tens", (0,))
            b.step("cur")
            b.graft(res.deriv_k, (1,))
            return k, b.derivation(), proof_k
        k, skel, proof_k = _reduce(res.proof_right, impl(l[2], res.k_right), h)
        b = DerivationBuilder(skel.premise, "sibv")
        b.extend(skel)
        b.step("u_down_imp", (0,))
        b.graft(res.proof_left, (0, 0))
        b.step("s_L_neg", (0,))
        b.step("comm_tens", (0,))
        b.step("cur")
        b.graft(res.deriv_k, (1,))
        return k, b.derivation(), proof_k

    if ltag == "seq":
        res = split(pi, "seq_left_of_impl")
        if in_l1:
            k, skel, proof_k = _reduce(res.proof_left, impl(l[1], res.k_left), h)
            b = DerivationBuilder(skel.premise, "sibv")
            b.extend(skel)
            b.step("u_down_coseq")
            b.graft(res.proof_right, (1,))
            b.step("q_down_pos")
            b.graft(res.deriv_k, (1,))
            return k, b.derivation(), proof_k
        k, skel, proof_k = _reduce(res.proof_right, impl(l[2], res.k_right), h)
        b = DerivationBuilder(skel.premise, "sibv")
        b.extend(skel)
        b.step("u_down_seq")
        b.graft(res.proof_left, (0,))
        b.step("q_down_pos")
        b.graft(res.deriv_k, (1,))
        return k, b.derivation(), proof_k

    if ltag == "tens":
        if in_l1:
            pi2 = _after(pi, [("cur", ())])
            ctx2 = impl(l[1], impl(l[2], r))
            k, skel, proof_k = _reduce(pi2, ctx2, h)
            b = DerivationBuilder(skel.premise, "sibv")
            b.extend(skel)
            b.step("ruc")
            return k, b.derivation(), proof_k
        pi2 = _after(pi, [("comm_tens", (0,)), ("cur", ())])
        ctx2 = impl(l[2], impl(l[1], r))
        k, skel, proof_k = _reduce(pi2, ctx2, h)
        b = DerivationBuilder(skel.premise, "sibv")
        b.extend(skel)
        b.step("ruc")
        b.step("comm_tens", (0,))
        return k, b.derivation(), proof_k

    raise ContextReduceError(f"cannot reduce past {render_formula(l)}")
