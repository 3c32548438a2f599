"""Pure-Python search kernel: the one-step upward neighborhood of a formula.

This is the inner loop of every decision procedure in the package, so it is
written in a deliberately low-level style (explicit stacks, no closures in
the hot path) and kept in lockstep with the compiled twin in engine_cy.pyx.
Formulas are the nested tuples of ibvkit.formulas; rules arrive as the
prepared tuples produced by ibvkit.derivations._prepare_rules.

A prepared rule is (name, premise_pattern, conclusion_pattern, sign_parity)
with sign_parity 0 (positive-only), 1 (negative-only) or -1 (either).
Patterns are formula tuples extended with ("var", name), ("avar", name) and
("navar", name).
"""

__all__ = ["subformula_positions", "enumerate_premises"]

_LEAVES = ("atom", "natom", "unit", "hole")


def subformula_positions(f):
    """All (path, subformula, parity) triples, preorder, parity 0 at the root."""
    out = []
    stack = [((), f, 0)]
    while stack:
        path, g, parity = stack.pop()
        out.append((path, g, parity))
        tag = g[0]
        if tag not in _LEAVES:
            flip = 1 if tag == "impl" else 0
            # push right first so the left child pops first (preorder)
            stack.append((path + (1,), g[2], parity))
            stack.append((path + (0,), g[1], parity ^ flip))
    out.sort(key=lambda t: t[0])
    return out


def _match(pattern, f, binds):
    """Extend binds to match f against pattern; None on failure."""
    tag = pattern[0]
    if tag == "var":
        key = pattern[1]
        prev = binds.get(key)
        if prev is None:
            binds[key] = f
            return binds
        return binds if prev == f else None
    if tag == "avar" or tag == "navar":
        want = "atom" if tag == "avar" else "natom"
        if f[0] != want:
            return None
        key = "@" + pattern[1]
        prev = binds.get(key)
        if prev is None:
            binds[key] = f[1]
            return binds
        return binds if prev == f[1] else None
    if tag in _LEAVES:
        return binds if f == pattern else None
    if f[0] != tag:
        return None
    binds = _match(pattern[1], f[1], binds)
    if binds is None:
        return None
    return _match(pattern[2], f[2], binds)


def _instantiate(pattern, binds):
    tag = pattern[0]
    if tag == "var":
        return binds[pattern[1]]
    if tag == "avar":
        return ("atom", binds["@" + pattern[1]])
    if tag == "navar":
        return ("natom", binds["@" + pattern[1]])
    if tag in _LEAVES:
        return pattern
    return (tag, _instantiate(pattern[1], binds), _instantiate(pattern[2], binds))


def _replace(f, path, i, sub):
    if i == len(path):
        return sub
    if path[i] == 0:
        return (f[0], _replace(f[1], path, i + 1, sub), f[2])
    return (f[0], f[1], _replace(f[2], path, i + 1, sub))


def enumerate_premises(f, prepared_rules, ambient_parity):
    """All (rule_name, path, premise_formula): ways f concludes one rule.

    Deterministic order: rule-table order first, then path lexicographic.
    Axiom rules (premise None) never appear; sign obligations are checked
    against ambient_parity xor the path's left-of-impl parity.
    """
    positions = subformula_positions(f)
    out = []
    for name, premise, conclusion, sign_parity in prepared_rules:
        if premise is None:
            continue
        for path, sub, parity in positions:
            if sign_parity != -1 and (parity ^ ambient_parity) != sign_parity:
                continue
            binds = _match(conclusion, sub, {})
            if binds is None:
                continue
            try:
                new_sub = _instantiate(premise, binds)
            except KeyError:
                # premise mentions a metavariable the conclusion does not
                # determine; no such rule exists in the shipped tables
                continue
            out.append((name, path, _replace(f, path, 0, new_sub)))
    return out
