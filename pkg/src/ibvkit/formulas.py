"""Formula trees, concrete syntax, contexts, and polarity.

Formulas are immutable nested tuples:

    ("atom", name)        positive atom, name matches [a-z][a-z0-9_]*
    ("natom", name)       negated atom (classical dialect only)
    ("unit",)             the unit 1 (intuitionistic dialect only)
    ("tens", l, r)        multiplicative conjunction  *
    ("par", l, r)         multiplicative disjunction  |  (classical only)
    ("impl", l, r)        linear implication  -o  (intuitionistic only)
    ("seq", l, r)         the non-commutative seq connective  ;
    ("hole",)             context hole (internal; never parsed or rendered)

Nothing here normalizes anything: what you parse is the tree you get, and
every transformation elsewhere in the package manipulates these trees
explicitly, one rewrite at a time.

Concrete syntax: ';' binds tightest, then '*' and '|', then '-o' (right
associative).  ';' is non-associative: 'a ; b ; c' is a parse error and must
be parenthesized, since the two readings are not interchangeable in the
sequent systems.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterator, Sequence

INTUITIONISTIC = "intuitionistic"
CLASSICAL_BV = "bv"

POSITIVE = "positive"
NEGATIVE = "negative"
UNPOLARISABLE = "unpolarisable"

Formula = tuple
Path = tuple

HOLE = ("hole",)


class ParseError(ValueError):
    """Raised on malformed or dialect-violating concrete syntax."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DialectError(ValueError):
    """Raised when a formula is used outside its dialect."""


def atom(name: str) -> Formula:
    return ("atom", name)


def natom(name: str) -> Formula:
    return ("natom", name)


def unit() -> Formula:
    return ("unit",)


def tens(l: Formula, r: Formula) -> Formula:
    return ("tens", l, r)


def par(l: Formula, r: Formula) -> Formula:
    return ("par", l, r)


def impl(l: Formula, r: Formula) -> Formula:
    return ("impl", l, r)


def seq(l: Formula, r: Formula) -> Formula:
    return ("seq", l, r)


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<atom>[a-z][a-z0-9_]*)|(?P<unit>1)|(?P<impl>-o)"
    r"|(?P<op>[*|;~()])|(?P<bad>\S))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        if m.group("bad") is not None:
            raise ParseError(f"unexpected character {m.group('bad')!r}", m.start("bad"))
        for kind in ("atom", "unit", "impl", "op"):
            if m.group(kind) is not None:
                label = kind if kind != "op" else m.group("op")
                tokens.append((label, m.group(kind), m.start(kind)))
                break
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]], dialect: str):
        self.tokens = tokens
        self.i = 0
        self.dialect = dialect

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse_impl(self) -> Formula:
        left = self.parse_tens()
        if self.peek()[0] == "impl":
            tok = self.next()
            if self.dialect == CLASSICAL_BV:
                raise ParseError("dialect violation: '-o' is not a bv connective", tok[2])
            right = self.parse_impl()
            return ("impl", left, right)
        return left

    def parse_tens(self) -> Formula:
        left = self.parse_seq()
        while self.peek()[0] in ("*", "|"):
            tok = self.next()
            if tok[0] == "|" and self.dialect == INTUITIONISTIC:
                raise ParseError(
                    "dialect violation: '|' is not an intuitionistic connective", tok[2]
                )
            right = self.parse_seq()
            left = ("tens" if tok[0] == "*" else "par", left, right)
        return left

    def parse_seq(self) -> Formula:
        left = self.parse_atomic()
        if self.peek()[0] == ";":
            self.next()
            right = self.parse_atomic()
            if self.peek()[0] == ";":
                raise ParseError("ambiguous ◁ chain: parenthesize", self.peek()[2])
            return ("seq", left, right)
        return left

    def parse_atomic(self) -> Formula:
        tok = self.next()
        if tok[0] == "atom":
            return ("atom", tok[1])
        if tok[0] == "unit":
            if self.dialect == CLASSICAL_BV:
                raise ParseError("dialect violation: '1' is not a bv formula", tok[2])
            return ("unit",)
        if tok[0] == "~":
            if self.dialect == INTUITIONISTIC:
                raise ParseError(
                    "dialect violation: '~' is not intuitionistic syntax", tok[2]
                )
            nxt = self.next()
            if nxt[0] != "atom":
                raise ParseError("expected atom after '~'", nxt[2])
            return ("natom", nxt[1])
        if tok[0] == "(":
            inner = self.parse_impl()
            self.expect(")")
            return inner
        raise ParseError(f"expected a formula, found {tok[1]!r}", tok[2])


def parse_formula(text: str, dialect: str = INTUITIONISTIC) -> Formula:
    """Parse concrete syntax into a formula tree.  No normalization."""
    if dialect not in (INTUITIONISTIC, CLASSICAL_BV):
        raise ValueError(f"unknown dialect {dialect!r}")
    parser = _Parser(_tokenize(text), dialect)
    f = parser.parse_impl()
    end = parser.peek()
    if end[0] != "end":
        raise ParseError(f"trailing input {end[1]!r}", end[2])
    return f


# ---------------------------------------------------------------------------
# rendering

_PREC = {"seq": 3, "tens": 2, "par": 2, "impl": 1}
_OPTEXT = {"seq": ";", "tens": "*", "par": "|", "impl": "-o"}


def render_formula(f: Formula) -> str:
    """Render with the fewest parentheses that still round-trip exactly."""
    tag = f[0]
    if tag == "atom":
        return f[1]
    if tag == "natom":
        return "~" + f[1]
    if tag == "unit":
        return "1"
    if tag == "hole":
        raise ValueError("cannot render a context hole")
    l, r = f[1], f[2]
    ls, rs = render_formula(l), render_formula(r)
    lp = _needs_parens(l, tag, left_side=True)
    rp = _needs_parens(r, tag, left_side=False)
    if lp:
        ls = "(" + ls + ")"
    if rp:
        rs = "(" + rs + ")"
    return f"{ls} {_OPTEXT[tag]} {rs}"


def _needs_parens(child: Formula, parent_tag: str, left_side: bool) -> bool:
    if child[0] not in _PREC:
        return False
    cp, pp = _PREC[child[0]], _PREC[parent_tag]
    if parent_tag == "seq":
        # ';' is non-associative, so nested seqs always get brackets.
        return cp < pp or child[0] == "seq"
    if parent_tag in ("tens", "par"):
        return cp < pp if left_side else cp <= pp
    # impl: right-associative
    return cp <= pp if left_side else False


# ---------------------------------------------------------------------------
# structure

def size(f: Formula) -> int:
    """Node count: leaves are 1, a binary node is 1 + both sides."""
    if f[0] in ("atom", "natom", "unit", "hole"):
        return 1
    return 1 + size(f[1]) + size(f[2])


def atoms_of(f: Formula) -> frozenset[str]:
    if f[0] in ("atom", "natom"):
        return frozenset((f[1],))
    if f[0] in ("unit", "hole"):
        return frozenset()
    return atoms_of(f[1]) | atoms_of(f[2])


def subformula_at(f: Formula, path: Sequence[int]) -> Formula:
    for step in path:
        if f[0] in ("atom", "natom", "unit", "hole"):
            raise ValueError(f"path {list(path)} leaves the formula")
        f = f[1 + step]
    return f


def replace_at(f: Formula, path: Sequence[int], sub: Formula) -> Formula:
    if not path:
        return sub
    if f[0] in ("atom", "natom", "unit", "hole"):
        raise ValueError(f"path {list(path)} leaves the formula")
    head, rest = path[0], path[1:]
    if head == 0:
        return (f[0], replace_at(f[1], rest, sub), f[2])
    if head == 1:
        return (f[0], f[1], replace_at(f[2], rest, sub))
    raise ValueError(f"bad path step {head!r}")


def all_paths(f: Formula) -> Iterator[Path]:
    """Every valid path in preorder, root first."""
    yield ()
    if f[0] not in ("atom", "natom", "unit", "hole"):
        for side in (0, 1):
            for p in all_paths(f[1 + side]):
                yield (side,) + p


def subformulas(f: Formula) -> Iterator[Formula]:
    for p in all_paths(f):
        yield subformula_at(f, p)


def context_sign(f: Formula, path: Sequence[int]) -> str:
    """Sign of the context around `path`: flips at each left-of-impl descent."""
    sign = POSITIVE
    cur = f
    for step in path:
        if cur[0] in ("atom", "natom", "unit", "hole"):
            raise ValueError(f"path {list(path)} leaves the formula")
        if cur[0] == "impl" and step == 0:
            sign = NEGATIVE if sign == POSITIVE else POSITIVE
        cur = cur[1 + step]
    return sign


def path_parity(f: Formula, path: Sequence[int]) -> int:
    """0 if the context at `path` is positive, 1 if negative."""
    return 0 if context_sign(f, path) == POSITIVE else 1


def subst_atom(f: Formula, name: str, repl: Formula) -> Formula:
    """Replace every positive atom occurrence of `name` by `repl`."""
    if f[0] == "atom" and f[1] == name:
        return repl
    if f[0] in ("atom", "natom", "unit", "hole"):
        return f
    return (f[0], subst_atom(f[1], name, repl), subst_atom(f[2], name, repl))


def find_hole(ctx: Formula) -> Path | None:
    """Path of the unique hole in a context, or None if there is no hole."""
    found = [p for p in all_paths(ctx) if subformula_at(ctx, p) == HOLE]
    if not found:
        return None
    if len(found) > 1:
        raise ValueError("context has more than one hole")
    return found[0]


def fill_hole(ctx: Formula, sub: Formula) -> Formula:
    p = find_hole(ctx)
    if p is None:
        raise ValueError("context has no hole")
    return replace_at(ctx, p, sub)


def dialect_of(f: Formula) -> str | None:
    """The dialect a formula commits to, or None if it fits both."""
    tags = {g[0] for g in subformulas(f)}
    classical = bool(tags & {"natom", "par"})
    intuit = bool(tags & {"unit", "impl"})
    if classical and intuit:
        raise DialectError("formula mixes intuitionistic and bv connectives")
    if classical:
        return CLASSICAL_BV
    if intuit:
        return INTUITIONISTIC
    return None


def is_unit_free(f: Formula) -> bool:
    return all(g[0] != "unit" for g in subformulas(f))


def is_seq_free(f: Formula) -> bool:
    return all(g[0] != "seq" for g in subformulas(f))


# ---------------------------------------------------------------------------
# the classical side: negation, embedding, polarity

def negate(f: Formula) -> Formula:
    """De Morgan dual of a bv formula.  Involutive; seq is self-dual."""
    tag = f[0]
    if tag == "atom":
        return ("natom", f[1])
    if tag == "natom":
        return ("atom", f[1])
    if tag == "tens":
        return ("par", negate(f[1]), negate(f[2]))
    if tag == "par":
        return ("tens", negate(f[1]), negate(f[2]))
    if tag == "seq":
        return ("seq", negate(f[1]), negate(f[2]))
    raise DialectError(f"negate: {tag!r} is not a bv connective")


def embed(f: Formula) -> Formula:
    """Map a unit-free intuitionistic formula into the classical dialect.

    Homomorphic on atoms, * and ;; an implication A -o B becomes
    negate(embed(A)) | embed(B).
    """
    tag = f[0]
    if tag == "atom":
        return f
    if tag == "unit":
        raise DialectError("embed: the unit has no classical image here")
    if tag == "tens":
        return ("tens", embed(f[1]), embed(f[2]))
    if tag == "seq":
        return ("seq", embed(f[1]), embed(f[2]))
    if tag == "impl":
        return ("par", negate(embed(f[1])), embed(f[2]))
    raise DialectError(f"embed: {tag!r} is not intuitionistic")


def classify_polarity(f: Formula) -> str:
    """Positive / negative / unpolarisable trichotomy of bv formulas.

    The mixed clauses are ordered: a tensor is negative only as
    positive * negative, a par is positive only as negative | positive,
    and seq requires both sides alike.
    """
    tag = f[0]
    if tag == "atom":
        return POSITIVE
    if tag == "natom":
        return NEGATIVE
    if tag in ("unit", "impl", "hole"):
        raise DialectError(f"classify_polarity: {tag!r} is not a bv formula")
    l = classify_polarity(f[1])
    r = classify_polarity(f[2])
    if UNPOLARISABLE in (l, r):
        return UNPOLARISABLE
    if tag == "tens":
        if l == POSITIVE:
            return POSITIVE if r == POSITIVE else NEGATIVE
        return UNPOLARISABLE
    if tag == "par":
        if l == NEGATIVE:
            return POSITIVE if r == POSITIVE else NEGATIVE
        return UNPOLARISABLE
    # seq
    return l if l == r else UNPOLARISABLE


# ---------------------------------------------------------------------------
# sequent interpretation and seq rebracketing

def formula_interpretation(antecedent: Sequence[Formula], succedent: Formula) -> Formula:
    """(B1 * ... * Bn) -o A with left-nested *; no antecedent gives A alone."""
    if not antecedent:
        return succedent
    acc = antecedent[0]
    for b in antecedent[1:]:
        acc = ("tens", acc, b)
    return ("impl", acc, succedent)


def _seq_spine(f: Formula) -> list[Formula]:
    if f[0] == "seq":
        return _seq_spine(f[1]) + _seq_spine(f[2])
    return [f]


@lru_cache(maxsize=None)
def _bracketings(leaves: tuple) -> frozenset:
    if len(leaves) == 1:
        return frozenset((leaves[0],))
    out = set()
    for cut in range(1, len(leaves)):
        for l in _bracketings(leaves[:cut]):
            for r in _bracketings(leaves[cut:]):
                out.add(("seq", l, r))
    return frozenset(out)


def seq_rebracketings(f: Formula) -> frozenset[Formula]:
    """All reassociations of every maximal ;-spine in every subterm."""
    tag = f[0]
    if tag in ("atom", "natom", "unit", "hole"):
        return frozenset((f,))
    if tag == "seq":
        leaf_variant_sets = [seq_rebracketings(leaf) for leaf in _seq_spine(f)]
        out = set()
        for combo in _product(leaf_variant_sets):
            out |= _bracketings(tuple(combo))
        return frozenset(out)
    out = set()
    for l in seq_rebracketings(f[1]):
        for r in seq_rebracketings(f[2]):
            out.add((tag, l, r))
    return frozenset(out)


def _product(sets: list) -> Iterator[list]:
    if not sets:
        yield []
        return
    for head in sorted(sets[0]):
        for rest in _product(sets[1:]):
            yield [head] + rest
