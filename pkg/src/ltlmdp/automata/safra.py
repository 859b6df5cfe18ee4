"""Safra's determinization of Büchi automata into Rabin automata.

A Safra tree is stored frozen as nested tuples
``(name, label, marked, children)`` with children oldest first. Two trees
are the same DRA state iff the tuples are equal. New nodes receive the
smallest free names in preorder, so construction is deterministic.
"""
from __future__ import annotations

from ..errors import CapacityError
from .rabin import RabinAutomaton, drop_useless_pairs

DEFAULT_STATE_CAP = 10**6


class _N:
    __slots__ = ("name", "label", "marked", "children")

    def __init__(self, name, label, marked, children):
        self.name = name
        self.label = label
        self.marked = marked
        self.children = children


def _thaw(t):
    name, label, marked, children = t
    return _N(name, set(label), marked, [_thaw(c) for c in children])


def _freeze(n):
    return (n.name, frozenset(n.label), n.marked, tuple(_freeze(c) for c in n.children))


def _preorder(n):
    yield n
    for c in n.children:
        yield from _preorder(c)


def tree_names(t):
    if t is None:
        return
    yield t[0]
    for c in t[3]:
        yield from tree_names(c)


def marked_names(t):
    if t is None:
        return
    if t[2]:
        yield t[0]
    for c in t[3]:
        yield from marked_names(c)


def safra_step(nba, tree, symbol):
    """Successor of a frozen Safra tree (``None`` is the empty tree)."""
    if tree is None:
        return None
    root = _thaw(tree)
    nodes = list(_preorder(root))
    used = {n.name for n in nodes}
    free = (i for i in range(1, 2 * nba.n_states + 2) if i not in used)
    acc = nba.accepting
    for n in nodes:
        n.marked = False
        branch = n.label & acc
        if branch:
            n.children.append(_N(next(free), set(branch), False, []))
    for n in _preorder(root):
        n.label = set(nba.post(n.label, symbol))
    _hmerge(root)
    if not root.label:
        return None
    _prune(root)
    _vmerge(root)
    return _freeze(root)


def _hmerge(node):
    taken = set()
    for c in node.children:
        c.label &= node.label
        c.label -= taken
        taken |= c.label
        _hmerge(c)


def _prune(node):
    node.children = [c for c in node.children if c.label]
    for c in node.children:
        _prune(c)


def _vmerge(node):
    if node.children:
        union = set().union(*(c.label for c in node.children))
        if union == node.label:
            node.children = []
            node.marked = True
            return
    for c in node.children:
        _vmerge(c)


def nba_to_dra(nba, cap=DEFAULT_STATE_CAP):
    """Determinize ``nba`` over its own alphabet.

    Each node name ``i`` yields a pair: L_i holds trees without node ``i``,
    K_i trees where ``i`` is marked. Pairs with empty K are dropped.
    """
    init = (1, frozenset(nba.initial), False, ()) if nba.initial else None
    index = {init: 0}
    trees = [init]
    delta = {}
    for tree in trees:
        q = index[tree]
        for sym in nba.alphabet:
            t = safra_step(nba, tree, sym)
            if t not in index:
                if len(trees) >= cap:
                    raise CapacityError(f"Safra construction exceeded {cap} states")
                index[t] = len(trees)
                trees.append(t)
            delta[(q, sym)] = index[t]
    present = [set(tree_names(t)) for t in trees]
    marked = [set(marked_names(t)) for t in trees]
    names = sorted(set().union(*present)) if present else []
    pairs = []
    for i in names:
        L = frozenset(q for q, p in enumerate(present) if i not in p)
        K = frozenset(q for q, m in enumerate(marked) if i in m)
        pairs.append((L, K))
    dra = RabinAutomaton(len(trees), nba.propositions, nba.alphabet, delta, 0,
                         tuple(pairs), tuple(trees))
    return drop_useless_pairs(dra)
