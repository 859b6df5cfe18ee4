"""LTL formulas: parsing, printing, negation normal form, lasso semantics.

Grammar, loosest binding first::

    expr   := or ('->' expr)?              right-assoc
    or     := and ('||' and)*
    and    := temp ('&&' temp)*
    temp   := unary (('U' | 'R') temp)?    right-assoc
    unary  := ('!' | 'X' | 'F' | 'G' | '[]' | '<>') unary | atom | '(' expr ')'

``&``, ``|``, ``~`` and ``=>`` are accepted as aliases.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError

ATOM, TRUE, FALSE = "atom", "true", "false"
NOT, AND, OR, IMPLIES = "not", "and", "or", "implies"
NEXT, UNTIL, RELEASE, EVENTUALLY, ALWAYS = "next", "until", "release", "eventually", "always"

_UNARY = {NOT, NEXT, EVENTUALLY, ALWAYS}
_BINARY = {AND, OR, IMPLIES, UNTIL, RELEASE}


@dataclass(frozen=True)
class Formula:
    kind: str
    children: tuple = ()
    name: str | None = None

    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return f"Formula({to_string(self)!r})"

    # Operator sugar keeps tests and demos readable.
    def __and__(self, other):
        return Formula(AND, (self, other))

    def __or__(self, other):
        return Formula(OR, (self, other))

    def __invert__(self):
        return Formula(NOT, (self,))


def atom(name):
    return Formula(ATOM, name=name)


TT = Formula(TRUE)
FF = Formula(FALSE)


def neg(f):
    return Formula(NOT, (f,))


def conj(a, b):
    return Formula(AND, (a, b))


def disj(a, b):
    return Formula(OR, (a, b))


def implies(a, b):
    return Formula(IMPLIES, (a, b))


def nxt(f):
    return Formula(NEXT, (f,))


def until(a, b):
    return Formula(UNTIL, (a, b))


def release(a, b):
    return Formula(RELEASE, (a, b))


def eventually(f):
    return Formula(EVENTUALLY, (f,))


def always(f):
    return Formula(ALWAYS, (f,))


# -- lexer / parser ------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op>&&|\|\||->|=>|<->|\[\]|<>|[!~&|()])
  | (?P<quoted>"[^"]*")
  | (?P<word>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<num>[01]\b)
""", re.VERBOSE)

_OP_ALIASES = {"&": "&&", "|": "||", "~": "!", "=>": "->", "[]": "G", "<>": "F"}


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", position=pos)
        kind = m.lastgroup
        val = m.group()
        if kind == "op":
            if val == "<->":
                raise ParseError("equivalence '<->' is not supported", position=pos)
            tokens.append(("op", _OP_ALIASES.get(val, val), pos))
        elif kind == "quoted":
            tokens.append(("qatom", val[1:-1], pos))
        elif kind == "num":
            tokens.append(("atom", "true" if val == "1" else "false", pos))
        elif kind == "word":
            if val in ("X", "F", "G", "U", "R"):
                tokens.append(("op", val, pos))
            elif set(val) <= set("XFG"):
                # "GF" written without a space
                for k, ch in enumerate(val):
                    tokens.append(("op", ch, pos + k))
            else:
                tokens.append(("atom", val, pos))
        pos = m.end()
    tokens.append(("eof", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at_op(self, *ops):
        kind, val, _ = self.peek()
        return kind == "op" and val in ops

    def parse(self):
        if self.peek()[0] == "eof":
            raise ParseError("empty formula", position=0)
        f = self.expr()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {val!r}", position=pos)
        return f

    def expr(self):
        left = self.or_()
        if self.at_op("->"):
            self.take()
            return implies(left, self.expr())
        return left

    def or_(self):
        # right-nested so that printing and reparsing agree
        left = self.and_()
        if self.at_op("||"):
            self.take()
            return disj(left, self.or_())
        return left

    def and_(self):
        left = self.temporal()
        if self.at_op("&&"):
            self.take()
            return conj(left, self.and_())
        return left

    def temporal(self):
        left = self.unary()
        if self.at_op("U", "R"):
            op = self.take()[1]
            right = self.temporal()
            return until(left, right) if op == "U" else release(left, right)
        return left

    def unary(self):
        kind, val, pos = self.take()
        if kind == "op":
            if val == "!":
                return neg(self.unary())
            if val == "X":
                return nxt(self.unary())
            if val == "F":
                return eventually(self.unary())
            if val == "G":
                return always(self.unary())
            if val == "(":
                inner = self.expr()
                k2, v2, p2 = self.take()
                if (k2, v2) != ("op", ")"):
                    raise ParseError("expected ')'", position=p2)
                return inner
            raise ParseError(f"unexpected operator {val!r}", position=pos)
        if kind == "qatom":
            return atom(val)
        if kind == "atom":
            if val == "true":
                return TT
            if val == "false":
                return FF
            return atom(val)
        raise ParseError("unexpected end of formula", position=pos)


def parse_ltl(text):
    """Parse an LTL formula string."""
    return _Parser(text).parse()


_SYMBOL = {AND: "&&", OR: "||", IMPLIES: "->", UNTIL: "U", RELEASE: "R",
           NOT: "!", NEXT: "X", EVENTUALLY: "F", ALWAYS: "G"}


def to_string(f):
    """Print ``f`` so that ``parse_ltl(to_string(f)) == f``."""
    k = f.kind
    if k == ATOM:
        return f.name if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*", f.name) and \
            f.name not in ("X", "F", "G", "U", "R", "true", "false") and \
            not set(f.name) <= set("XFG") else f'"{f.name}"'
    if k == TRUE:
        return "true"
    if k == FALSE:
        return "false"
    if k in _UNARY:
        return f"{_SYMBOL[k]} {to_string(f.children[0])}"
    a, b = f.children
    return f"({to_string(a)} {_SYMBOL[k]} {to_string(b)})"


# -- normal form ------------------------------------------------------------------

def to_nnf(f):
    """Negation normal form over {atom, !atom, true, false, and, or, X, U, R}."""
    return _nnf(f, False)


def _nnf(f, negated):
    k = f.kind
    if k == ATOM:
        return neg(f) if negated else f
    if k == TRUE:
        return FF if negated else TT
    if k == FALSE:
        return TT if negated else FF
    if k == NOT:
        return _nnf(f.children[0], not negated)
    if k == AND or k == OR:
        a, b = (_nnf(c, negated) for c in f.children)
        flip = (k == AND) == negated
        return disj(a, b) if flip else conj(a, b)
    if k == IMPLIES:
        a, b = f.children
        return _nnf(disj(neg(a), b), negated)
    if k == NEXT:
        return nxt(_nnf(f.children[0], negated))
    if k == UNTIL or k == RELEASE:
        a, b = (_nnf(c, negated) for c in f.children)
        if (k == UNTIL) != negated:
            return until(a, b)
        return release(a, b)
    if k == EVENTUALLY:
        body = _nnf(f.children[0], negated)
        return release(FF, body) if negated else until(TT, body)
    if k == ALWAYS:
        body = _nnf(f.children[0], negated)
        return until(TT, body) if negated else release(FF, body)
    raise ValueError(f"unknown formula kind {k!r}")


def is_nnf(f):
    k = f.kind
    if k in (ATOM, TRUE, FALSE):
        return True
    if k == NOT:
        return f.children[0].kind == ATOM
    if k in (AND, OR, NEXT, UNTIL, RELEASE):
        return all(is_nnf(c) for c in f.children)
    return False


def atoms(f):
    """Atomic proposition names in order of first occurrence."""
    seen = {}

    def walk(g):
        if g.kind == ATOM:
            seen.setdefault(g.name, None)
        for c in g.children:
            walk(c)

    walk(f)
    return tuple(seen)


def subformulas(f):
    """Distinct subformulas, children before parents."""
    out = {}

    def walk(g):
        for c in g.children:
            walk(c)
        out.setdefault(g, None)

    walk(f)
    return list(out)


def size(f):
    return 1 + sum(size(c) for c in f.children)


# -- lasso semantics -------------------------------------------------------------

@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``prefix . cycle^omega``; letters are sets of propositions."""
    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        if len(self.cycle) < 1:
            raise ValueError("lasso cycle must be nonempty")
        object.__setattr__(self, "prefix", tuple(frozenset(x) for x in self.prefix))
        object.__setattr__(self, "cycle", tuple(frozenset(x) for x in self.cycle))

    def __len__(self):
        return len(self.prefix) + len(self.cycle)

    def letter(self, i):
        n = len(self.prefix)
        if i < n:
            return self.prefix[i]
        return self.cycle[(i - n) % len(self.cycle)]

    def successor(self, i):
        """Position after ``i`` on the folded lasso of ``len(self)`` positions."""
        return i + 1 if i + 1 < len(self) else len(self.prefix)


def eval_lasso(f, w):
    """Does ``w`` satisfy ``f`` at position 0?

    Truth values are computed per subformula over the folded lasso positions;
    until is a least and release a greatest fixpoint around the loop.
    """
    n = len(w)
    succ = [w.successor(i) for i in range(n)]
    letters = [w.letter(i) for i in range(n)]
    val = {}
    for g in subformulas(f):
        k = g.kind
        if k == ATOM:
            row = [g.name in letters[i] for i in range(n)]
        elif k == TRUE:
            row = [True] * n
        elif k == FALSE:
            row = [False] * n
        elif k == NOT:
            row = [not x for x in val[g.children[0]]]
        elif k == AND:
            a, b = (val[c] for c in g.children)
            row = [x and y for x, y in zip(a, b)]
        elif k == OR:
            a, b = (val[c] for c in g.children)
            row = [x or y for x, y in zip(a, b)]
        elif k == IMPLIES:
            a, b = (val[c] for c in g.children)
            row = [(not x) or y for x, y in zip(a, b)]
        elif k == NEXT:
            a = val[g.children[0]]
            row = [a[succ[i]] for i in range(n)]
        elif k in (UNTIL, EVENTUALLY):
            if k == UNTIL:
                a, b = (val[c] for c in g.children)
            else:
                a, b = [True] * n, val[g.children[0]]
            row = _fixpoint(n, succ, lambda i, r: b[i] or (a[i] and r[succ[i]]), False)
        elif k in (RELEASE, ALWAYS):
            if k == RELEASE:
                a, b = (val[c] for c in g.children)
            else:
                a, b = [False] * n, val[g.children[0]]
            row = _fixpoint(n, succ, lambda i, r: b[i] and (a[i] or r[succ[i]]), True)
        else:
            raise ValueError(f"unknown formula kind {k!r}")
        val[g] = row
    return val[f][0]


def _fixpoint(n, succ, step, init):
    row = [init] * n
    changed = True
    while changed:
        changed = False
        for i in reversed(range(n)):
            v = step(i, row)
            if v != row[i]:
                row[i] = v
                changed = True
    return row
