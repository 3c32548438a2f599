"""Complete backward proof search for the sequent calculi.

Cut-free rules of imll, inml, and nml_minus all shrink the total sequent
size premise-by-premise, so plain recursion with per-call memoization
terminates.  inml_acut adds the associative cuts, whose premises grow;
those searches stay finite through three devices: cut formulas come from
a finite rebracketing pool, each branch spends a bounded number of acut
applications, and sequents repeated along a branch are pruned.  Failures
influenced by a prune are not memoized, so caching stays sound.

An atom-balance filter rejects sequents whose signed atom counts do not
cancel; every rule of every system here preserves balance, and the
axioms are balanced, so the filter never loses a provable sequent.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .formulas import Formula, replace_at, seq
from .sequents import (
    INML_ACUT,
    RuleApp,
    Sequent,
    SequentProof,
    SequentSystem,
    one_sided,
    two_sided,
)

PROVABLE = "provable"
UNPROVABLE = "unprovable"
BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class SeqBudget:
    max_visited: int = 500_000
    max_acut_per_branch: int | None = None  # default: size of the acut pool


@dataclass(frozen=True)
class SeqSearchResult:
    status: str
    goal: Sequent
    system: str
    visited: int
    proof: SequentProof | None = None

    @property
    def provable(self) -> bool:
        return self.status == PROVABLE


class _OutOfBudget(Exception):
    pass


# ---------------------------------------------------------------------------
# atom balance

@lru_cache(maxsize=None)
def _signed_atoms(f: Formula) -> tuple:
    """Sorted (atom, net count) pairs; antecedent use flips the sign."""
    c: Counter = Counter()
    stack = [(f, 0)]
    while stack:
        g, parity = stack.pop()
        t = g[0]
        if t == "atom":
            c[g[1]] += 1 if parity == 0 else -1
        elif t == "natom":
            c[g[1]] += -1 if parity == 0 else 1
        elif t == "impl":
            stack.append((g[1], parity ^ 1))
            stack.append((g[2], parity))
        elif t in ("tens", "par", "seq"):
            stack.append((g[1], parity))
            stack.append((g[2], parity))
    return tuple(sorted(c.items()))


def _balanced(s: Sequent) -> bool:
    total: Counter = Counter()
    for g in s.antecedent:
        for a, k in _signed_atoms(g):
            total[a] -= k
    for g in s.succedents:
        for a, k in _signed_atoms(g):
            total[a] += k
    return all(v == 0 for v in total.values())


# ---------------------------------------------------------------------------
# candidate rule applications, in a pinned deterministic order

def _subsets(indices):
    """All sub-lists by increasing bitmask; bit i selects indices[i]."""
    n = len(indices)
    for mask in range(1 << n):
        chosen = tuple(indices[i] for i in range(n) if mask >> i & 1)
        rest = tuple(indices[i] for i in range(n) if not mask >> i & 1)
        yield chosen, rest


def _assoc_sites(s: Sequent):
    sides = [("ant", i, f) for i, f in enumerate(s.antecedent)]
    sides += [("suc", i, f) for i, f in enumerate(s.succedents)]
    for side, i, f in sides:
        stack = [((), f)]
        while stack:
            path, g = stack.pop()
            if g[0] in ("tens", "par", "impl", "seq"):
                stack.append((path + (1,), g[2]))
                stack.append((path + (0,), g[1]))
            if g[0] != "seq":
                continue
            if g[2][0] == "seq":
                # conclusion shows A;(B;C): the L-rule's result
                before = seq(seq(g[1], g[2][1]), g[2][2])
                yield side, i, path, "assoc_seq_L", before
            if g[1][0] == "seq":
                before = seq(g[1][1], seq(g[1][2], g[2]))
                yield side, i, path, "assoc_seq_R", before
    return


def _rewrite_site(s: Sequent, side: str, i: int, path, before) -> Sequent:
    if side == "ant":
        f = replace_at(s.antecedent[i], path, before)
        return Sequent(s.antecedent[:i] + (f,) + s.antecedent[i + 1:], s.succedents)
    f = replace_at(s.succedents[i], path, before)
    return Sequent(s.antecedent, s.succedents[:i] + (f,) + s.succedents[i + 1:])


def _candidates_two_sided(s: Sequent, system: SequentSystem, acut_ok: bool):
    gamma, c = s.antecedent, s.succedent
    idx = tuple(range(len(gamma)))
    if len(gamma) == 1 and gamma[0][0] == "atom" and gamma[0] == c:
        yield RuleApp("ax"), []
    if not gamma and c == ("unit",):
        yield RuleApp("one_R"), []
    for i in idx:
        if gamma[i] == ("unit",):
            rest = gamma[:i] + gamma[i + 1:]
            yield RuleApp("one_L", principal=i), [two_sided(rest, c)]
    for i in idx:
        if gamma[i][0] == "tens":
            rest = gamma[:i] + gamma[i + 1:]
            yield (
                RuleApp("tens_L", principal=i),
                [two_sided(rest + (gamma[i][1], gamma[i][2]), c)],
            )
    if c[0] == "impl":
        yield RuleApp("imp_R"), [two_sided(gamma + (c[1],), c[2])]
    if c[0] == "tens":
        for left, right in _subsets(idx):
            yield (
                RuleApp("tens_R", partition=(left, right)),
                [two_sided(tuple(gamma[i] for i in left), c[1]),
                 two_sided(tuple(gamma[i] for i in right), c[2])],
            )
    for i in idx:
        if gamma[i][0] == "impl":
            others = tuple(j for j in idx if j != i)
            a, b = gamma[i][1], gamma[i][2]
            for left, right in _subsets(others):
                yield (
                    RuleApp("imp_L", principal=i, partition=(left, right)),
                    [two_sided(tuple(gamma[j] for j in left), a),
                     two_sided(tuple(gamma[j] for j in right) + (b,), c)],
                )
    if c[0] == "seq" and "seq" in system.rules():
        seq_idx = tuple(i for i in idx if gamma[i][0] == "seq")
        for chosen, _ in _subsets(seq_idx):
            others = tuple(j for j in idx if j not in chosen)
            lefts = tuple(gamma[j][1] for j in chosen)
            rights = tuple(gamma[j][2] for j in chosen)
            for left, right in _subsets(others):
                yield (
                    RuleApp(
                        "seq", n=len(chosen), seq_indices=chosen,
                        partition=(left, right),
                    ),
                    [two_sided(tuple(gamma[j] for j in left) + lefts, c[1]),
                     two_sided(tuple(gamma[j] for j in right) + rights, c[2])],
                )
    if acut_ok and system.name == INML_ACUT:
        for f in sorted(system.acut_pool):
            for rule in ("acut_L", "acut_R"):
                if rule == "acut_L":
                    if f[0] != "seq" or f[1][0] != "seq":
                        continue
                    partner = seq(f[1][1], seq(f[1][2], f[2]))
                else:
                    if f[0] != "seq" or f[2][0] != "seq":
                        continue
                    partner = seq(seq(f[1], f[2][1]), f[2][2])
                for left, right in _subsets(idx):
                    yield (
                        RuleApp(rule, cut_formula=f, partition=(left, right)),
                        [two_sided(tuple(gamma[j] for j in left), f),
                         two_sided(
                             tuple(gamma[j] for j in right) + (partner,), c
                         )],
                    )
    if system.assoc_rewrite:
        for side, i, path, rw, before in _assoc_sites(s):
            yield (
                RuleApp("assoc_rw", loc=(side, i), path=path, rw=rw),
                [_rewrite_site(s, side, i, path, before)],
            )


def _candidates_one_sided(s: Sequent, system: SequentSystem):
    ctx = s.succedents
    idx = tuple(range(len(ctx)))
    if len(ctx) == 2:
        a, b = ctx
        if (a[0] == "atom" and b == ("natom", a[1])) or (
            a[0] == "natom" and b == ("atom", a[1])
        ):
            yield RuleApp("nml_ax"), []
    for i in idx:
        if ctx[i][0] == "par":
            rest = ctx[:i] + ctx[i + 1:]
            yield (
                RuleApp("nml_par", principal=i),
                [one_sided(rest + (ctx[i][1], ctx[i][2]))],
            )
    for i in idx:
        if ctx[i][0] == "tens":
            others = tuple(j for j in idx if j != i)
            for left, right in _subsets(others):
                yield (
                    RuleApp("nml_tens", principal=i, partition=(left, right)),
                    [one_sided(tuple(ctx[j] for j in left) + (ctx[i][1],)),
                     one_sided(tuple(ctx[j] for j in right) + (ctx[i][2],))],
                )
    seq_idx = tuple(i for i in idx if ctx[i][0] == "seq")
    for chosen, _ in _subsets(seq_idx):
        others = tuple(j for j in idx if j not in chosen)
        lefts = tuple(ctx[j][1] for j in chosen)
        rights = tuple(ctx[j][2] for j in chosen)
        for left, right in _subsets(others):
            if not chosen and (not left or not right):
                # a bare mix with an empty side just restates the sequent
                continue
            yield (
                RuleApp(
                    "nml_seq", n=len(chosen), seq_indices=chosen,
                    partition=(left, right),
                ),
                [one_sided(tuple(ctx[j] for j in left) + lefts),
                 one_sided(tuple(ctx[j] for j in right) + rights)],
            )
    if system.assoc_rewrite:
        for side, i, path, rw, before in _assoc_sites(s):
            yield (
                RuleApp("assoc_rw", loc=(side, i), path=path, rw=rw),
                [_rewrite_site(s, side, i, path, before)],
            )


# ---------------------------------------------------------------------------
# the search

def default_acut_pool(goal: Sequent) -> frozenset:
    """Rebracketing closure of every subformula of the goal sequent."""
    from .formulas import seq_rebracketings, subformulas

    pool = set()
    for f in goal.antecedent + goal.succedents:
        for g in subformulas(f):
            pool.update(seq_rebracketings(g))
    return frozenset(p for p in pool if p[0] == "seq")


def prove_sequent(
    system: SequentSystem,
    goal: Sequent,
    budget: SeqBudget | None = None,
) -> SeqSearchResult:
    """Exhaustive backward search; Provable results carry a checked proof."""
    if system.allow_cut:
        raise ValueError("search is cut-free; build cut proofs by hand")
    if budget is None:
        budget = SeqBudget()
    if system.name == INML_ACUT and not system.acut_pool:
        system = SequentSystem(
            system.name, system.allow_cut, system.assoc_rewrite,
            default_acut_pool(goal),
        )
    acut_cap = budget.max_acut_per_branch
    if acut_cap is None:
        acut_cap = len(system.acut_pool) if system.name == INML_ACUT else 0

    # memo: success -> (True, proof); clean failure -> (False, None).
    # unclean failures (influenced by branch pruning or the acut cap) are
    # never cached: they may not hold under a different ancestor set.
    memo: dict = {}
    state = {"visited": 0}
    needs_pruning = system.name == INML_ACUT or system.assoc_rewrite

    def search(s: Sequent, ancestors: frozenset, acuts_left: int):
        """Returns (proof | None, clean); clean failures are cacheable."""
        state["visited"] += 1
        if state["visited"] > budget.max_visited:
            raise _OutOfBudget
        key = s.key()
        hit = memo.get(key)
        if hit is not None:
            return hit[1], True
        if not _balanced(s):
            memo[key] = (False, None)
            return None, True
        if needs_pruning and key in ancestors:
            return None, False
        kids = ancestors | {key} if needs_pruning else ancestors
        clean = True
        gen = (
            _candidates_two_sided(s, system, acuts_left > 0)
            if system.two_sided
            else _candidates_one_sided(s, system)
        )
        for app, premises in gen:
            spent = acuts_left - 1 if app.rule in ("acut_L", "acut_R") else acuts_left
            subproofs = []
            branch_clean = True
            for prem in premises:
                sub, sub_clean = search(prem, kids, spent)
                branch_clean = branch_clean and sub_clean
                if sub is None:
                    subproofs = None
                    break
                subproofs.append(sub)
            if subproofs is not None:
                proof = SequentProof(s, app, tuple(subproofs))
                memo[key] = (True, proof)
                return proof, True
            clean = clean and branch_clean
        if clean:
            memo[key] = (False, None)
        return None, False

    try:
        proof, _ = search(goal, frozenset(), acut_cap)
    except _OutOfBudget:
        return SeqSearchResult(
            BUDGET_EXCEEDED, goal, system.name, state["visited"]
        )
    if proof is not None:
        return SeqSearchResult(
            PROVABLE, goal, system.name, state["visited"], proof
        )
    return SeqSearchResult(UNPROVABLE, goal, system.name, state["visited"])
