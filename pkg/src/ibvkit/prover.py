"""Bottom-up proof search for the deep systems.

The search walks upward from the goal through premises_at with a visited
set on exact formula trees.  In ibv, ibv_minus, and bv_minus every rule's
premise is no larger than its conclusion, so the reachable state space is
finite and an exhausted frontier is a definitive Unprovable answer.  sibv
and ibv_plus_iup contain up-rules whose inverses grow formulas; for those
systems the search is bounded and never answers Unprovable.

Results are memoized in a process-wide cache shared across calls (and
threads), keyed by the system's identity.  A provable formula keeps a
link to one premise step, so proofs are reconstructed on demand; when a
frontier is exhausted, every formula of the explored closure is recorded
as unprovable at once.
"""

from __future__ import annotations

import itertools
import threading
import time
from collections import deque
from dataclasses import dataclass, replace

from .derivations import (
    DOWN,
    DeepDerivation,
    RuleInstance,
    check_derivation,
    premises_at,
)
from .formulas import (
    DialectError,
    Formula,
    NEGATIVE,
    POSITIVE,
    all_paths,
    atoms_of,
    dialect_of,
    path_parity,
    replace_at,
    subformula_at,
    subformulas,
)
from .rules import match, instantiate
from .systems import BV_MINUS, DeepSystem, IBV, IBV_MINUS, get_system

PROVABLE = "provable"
UNPROVABLE = "unprovable"
BUDGET_EXCEEDED = "budget_exceeded"

# systems whose rules are all size-nonincreasing premise-to-conclusion,
# hence finite upward closure and definitive negative answers
_COMPLETE = frozenset({IBV, IBV_MINUS, BV_MINUS})


@dataclass(frozen=True)
class SearchBudget:
    max_visited: int = 10**6
    max_seconds: float | None = None

    def __post_init__(self):
        if self.max_visited <= 0:
            raise ValueError("max_visited must be positive")


@dataclass(frozen=True)
class SearchResult:
    status: str
    goal: Formula
    system: str
    visited: int
    proof: DeepDerivation | None = None
    definitive: bool = False
    audited_closure: int | None = None

    @property
    def provable(self) -> bool:
        return self.status == PROVABLE


class _SystemCache:
    def __init__(self):
        self.lock = threading.Lock()
        self.status: dict[Formula, bool] = {}
        # for provable formulas: None at an axiom, else (rule, path, premise)
        self.link: dict[Formula, tuple | None] = {}


_caches: dict[tuple, _SystemCache] = {}
_caches_lock = threading.Lock()


def _cache_for(system: DeepSystem) -> _SystemCache:
    with _caches_lock:
        c = _caches.get(system.key)
        if c is None:
            c = _caches[system.key] = _SystemCache()
        return c


def clear_caches() -> None:
    with _caches_lock:
        _caches.clear()


# ---------------------------------------------------------------------------
# premise enumeration, including rules the kernel cannot invert on its own

def _pattern_vars(p) -> tuple[frozenset, frozenset]:
    """(formula metavariables, atom metavariables) of a pattern."""
    fvars, avars = set(), set()
    stack = [p]
    while stack:
        q = stack.pop()
        t = q[0]
        if t == "var":
            fvars.add(q[1])
        elif t in ("avar", "navar"):
            avars.add(q[1])
        elif len(q) == 3:
            stack.extend((q[1], q[2]))
    return frozenset(fvars), frozenset(avars)


def _underdetermined(system: DeepSystem):
    """Rules whose premise mentions variables the conclusion does not bind.

    The kernel skips these when enumerating upward; the prover synthesizes
    candidate instantiations for them from the goal's material.
    """
    out = []
    for r in system.rules:
        if r.premise is None:
            continue
        pf, pa = _pattern_vars(r.premise)
        cf, ca = _pattern_vars(r.conclusion)
        if pf - cf or pa - ca:
            out.append((r, tuple(sorted(pf - cf)), tuple(sorted(pa - ca))))
    return tuple(out)


_SIGN_PARITY = {POSITIVE: 0, NEGATIVE: 1, None: -1}


def _synthesized_premises(f, system, free_rules, formula_pool, atom_pool):
    """Upward steps for underdetermined rules, candidates from the goal."""
    out = []
    for rule, missing_f, missing_a in free_rules:
        want = _SIGN_PARITY[rule.sign]
        for path in all_paths(f):
            if want != -1 and path_parity(f, path) != want:
                continue
            base = match(rule.conclusion, subformula_at(f, path))
            if base is None:
                continue
            choices = [
                [(("var", v), g) for g in formula_pool] for v in missing_f
            ] + [
                [(("atomvar", v), a) for a in atom_pool] for v in missing_a
            ]
            for combo in itertools.product(*choices):
                binds = dict(base)
                ok = True
                for key, val in combo:
                    if key[0] == "var":
                        binds[("var", key[1])] = val
                    else:
                        k = ("atomvar", key[1])
                        if k in binds and binds[k] != val:
                            ok = False
                            break
                        binds[k] = val
                if not ok:
                    continue
                new_sub = instantiate(rule.premise, binds)
                out.append((rule.name, path, replace_at(f, path, new_sub)))
    return out


def _expansions(f, system, free_rules, formula_pool, atom_pool):
    det = [(name, path, g) for name, path, g in _raw_premises(f, system)]
    if free_rules:
        det.extend(_synthesized_premises(f, system, free_rules, formula_pool, atom_pool))
    return det


def _raw_premises(f, system):
    for inst, g in premises_at(f, system):
        yield inst.rule, inst.path, g


# ---------------------------------------------------------------------------
# the search itself

def _reconstruct_from_link(cache: _SystemCache, f: Formula):
    """Chain of downward steps proving f, read off the cached links."""
    rev = []
    cur = f
    while True:
        link = cache.link[cur]
        if link is None:
            break
        rule, path, g = link
        rev.append((RuleInstance(rule, path, DOWN), cur))
        cur = g
    return cur, list(reversed(rev))


def decide_deep(
    system: DeepSystem | str,
    goal: Formula,
    budget: SearchBudget | None = None,
    audit: bool = False,
) -> SearchResult:
    """Decide provability of `goal`; complete for ibv, ibv_minus, bv_minus.

    Provable results carry a checked derivation.  Unprovable is returned
    only when the finite upward closure was fully explored; bounded
    systems (sibv, ibv_plus_iup) report BudgetExceeded instead.
    """
    sys = system if isinstance(system, DeepSystem) else get_system(system)
    if budget is None:
        budget = SearchBudget()
    goal_dialect = dialect_of(goal)
    if goal_dialect is not None and goal_dialect != sys.dialect:
        raise DialectError(
            f"goal is not in the {sys.dialect} dialect of system {sys.name}"
        )
    complete = sys.name in _COMPLETE
    cache = _cache_for(sys)

    free_rules = _underdetermined(sys)
    formula_pool = tuple(dict.fromkeys(subformulas(goal))) if free_rules else ()
    atom_pool = ()
    if free_rules:
        atom_pool = tuple(sorted(set(atoms_of(goal)) | {"a"}))

    deadline = None
    if budget.max_seconds is not None:
        deadline = time.monotonic() + budget.max_seconds

    frontier = deque([goal])
    parent: dict[Formula, tuple | None] = {goal: None}
    visited = 0
    found: Formula | None = None

    with cache.lock:
        while frontier:
            f = frontier.popleft()
            visited += 1
            known = cache.status.get(f)
            if known is False:
                continue  # exhausted dead end from an earlier call
            if known is True or sys.is_axiom_formula(f):
                found = f
                break
            if visited >= budget.max_visited:
                return SearchResult(BUDGET_EXCEEDED, goal, sys.name, visited)
            if deadline is not None and visited % 256 == 0 and time.monotonic() > deadline:
                return SearchResult(BUDGET_EXCEEDED, goal, sys.name, visited)
            for rule, path, g in _expansions(f, sys, free_rules, formula_pool, atom_pool):
                if g not in parent:
                    parent[g] = (rule, path, f)
                    frontier.append(g)

        if found is None:
            if not complete:
                return SearchResult(BUDGET_EXCEEDED, goal, sys.name, visited)
            for f in parent:
                cache.status[f] = False
            result = SearchResult(
                UNPROVABLE, goal, sys.name, visited, definitive=True
            )
        else:
            if cache.status.get(found) is True:
                premise, steps = _reconstruct_from_link(cache, found)
            else:
                premise, steps = found, []
            cur = found
            while parent[cur] is not None:
                rule, path, below = parent[cur]
                steps.append((RuleInstance(rule, path, DOWN), below))
                cur = below
            proof = DeepDerivation(sys.name, premise, tuple(steps))
            # record the whole spine in the cache
            prev = premise
            if prev not in cache.link:
                cache.link[prev] = None
            cache.status[prev] = True
            for inst, res in proof.steps:
                cache.status[res] = True
                if res not in cache.link:
                    cache.link[res] = (inst.rule, inst.path, prev)
                prev = res
            report = check_derivation(proof, sys)
            if not report.ok or proof.conclusion != goal:
                raise AssertionError(
                    f"search produced an invalid proof: {report.reason}"
                )
            result = SearchResult(
                PROVABLE, goal, sys.name, visited, proof=proof, definitive=True
            )

    if audit:
        result = _audit(result, sys)
    return result


def _audit(result: SearchResult, sys: DeepSystem) -> SearchResult:
    """Re-verify the verdict without consulting the cache.

    For Unprovable: rebuild the closure from scratch and confirm it is
    closed under premise-taking and axiom-free.  For Provable: recheck
    the derivation.  Bounded verdicts have nothing to certify.
    """
    if result.status == PROVABLE:
        if not check_derivation(result.proof, sys).ok:
            raise AssertionError("audit: stored proof fails checking")
        return replace(result, audited_closure=len(result.proof.steps))
    if result.status != UNPROVABLE:
        return result
    seen = {result.goal}
    frontier = deque([result.goal])
    while frontier:
        f = frontier.popleft()
        if sys.is_axiom_formula(f):
            raise AssertionError("audit: closure contains an axiom")
        for _, _, g in _raw_premises(f, sys):
            if g not in seen:
                seen.add(g)
                frontier.append(g)
    return replace(result, audited_closure=len(seen))
