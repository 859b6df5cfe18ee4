"""Tableau translation of LTL to nondeterministic Büchi automata.

The tableau produces a generalized Büchi automaton with one acceptance set
per until-subformula; a round-robin counter then reduces it to a single
acceptance set. Transitions are expanded over an explicit alphabet of
proposition sets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .. import ltl
from ..errors import InputError


@dataclass(frozen=True)
class BuchiAutomaton:
    """States are ``0..n_states-1``; ``transitions[(q, symbol)]`` is a frozenset."""
    n_states: int
    propositions: tuple
    alphabet: tuple
    transitions: dict
    initial: frozenset
    accepting: frozenset

    @property
    def states(self):
        return range(self.n_states)

    def post(self, states, symbol):
        out = set()
        for q in states:
            out |= self.transitions.get((q, symbol), frozenset())
        return frozenset(out)


def all_symbols(propositions):
    """Every subset of ``propositions``, ordered by membership vector."""
    return tuple(
        frozenset(p for p, bit in zip(propositions, bits) if bit)
        for bits in itertools.product((False, True), repeat=len(propositions))
    )


def project(symbol, propositions):
    return frozenset(symbol) & frozenset(propositions)


class _Node:
    __slots__ = ("id", "incoming", "new", "old", "next")

    def __init__(self, id, incoming, new, old, next):
        self.id = id
        self.incoming = incoming
        self.new = new
        self.old = old
        self.next = next


def _key(f):
    return (ltl.size(f), ltl.to_string(f))


def _tableau(f):
    """Fully expanded tableau nodes for NNF formula ``f``.

    Incoming id 0 marks the nodes that may start a run.
    """
    counter = itertools.count(1)
    done = []
    stack = [_Node(next(counter), {0}, {f}, set(), set())]
    while stack:
        node = stack.pop()
        if not node.new:
            for other in done:
                if other.old == node.old and other.next == node.next:
                    other.incoming |= node.incoming
                    break
            else:
                done.append(node)
                stack.append(_Node(next(counter), {node.id}, set(node.next), set(), set()))
            continue
        eta = min(node.new, key=_key)
        node.new.discard(eta)
        k = eta.kind
        if k in (ltl.ATOM, ltl.TRUE, ltl.FALSE, ltl.NOT):
            if k == ltl.FALSE:
                continue
            if k == ltl.ATOM and ltl.neg(eta) in node.old:
                continue
            if k == ltl.NOT and eta.children[0] in node.old:
                continue
            node.old.add(eta)
            stack.append(node)
            continue
        node.old.add(eta)
        if k == ltl.AND:
            node.new |= {c for c in eta.children if c not in node.old}
            stack.append(node)
        elif k == ltl.NEXT:
            node.next.add(eta.children[0])
            stack.append(node)
        elif k in (ltl.OR, ltl.UNTIL, ltl.RELEASE):
            a, b = eta.children
            if k == ltl.OR:
                new1, next1, new2 = {a}, set(), {b}
            elif k == ltl.UNTIL:
                new1, next1, new2 = {a}, {eta}, {b}
            else:
                new1, next1, new2 = {b}, {eta}, {a, b}
            n1 = _Node(next(counter), set(node.incoming),
                       node.new | (new1 - node.old), set(node.old), node.next | next1)
            n2 = _Node(next(counter), set(node.incoming),
                       node.new | (new2 - node.old), set(node.old), set(node.next))
            # n1 is expanded first
            stack.append(n2)
            stack.append(n1)
        else:
            raise InputError(f"formula is not in negation normal form: {eta}")
    return done


def ltl_to_nba(f, propositions=None, alphabet=None):
    """Translate an NNF formula to a Büchi automaton over ``alphabet``.

    ``propositions`` defaults to the atoms of ``f``; ``alphabet`` defaults to
    all subsets of ``propositions``.
    """
    if not ltl.is_nnf(f):
        raise InputError("ltl_to_nba expects a formula in negation normal form")
    if propositions is None:
        propositions = ltl.atoms(f)
    propositions = tuple(propositions)
    missing = set(ltl.atoms(f)) - set(propositions)
    if missing:
        raise InputError(f"formula uses undeclared propositions {sorted(missing)}")
    if alphabet is None:
        alphabet = all_symbols(propositions)
    alphabet = tuple(frozenset(s) for s in alphabet)

    nodes = _tableau(f)
    index = {nd.id: i for i, nd in enumerate(nodes)}
    untils = [g for g in ltl.subformulas(f) if g.kind == ltl.UNTIL]
    acc_sets = [
        {index[nd.id] for nd in nodes if u not in nd.old or u.children[1] in nd.old}
        for u in untils
    ]
    # a node reads the letter at its own position, so guards sit on sources
    guards = []
    for nd in nodes:
        pos = frozenset(g.name for g in nd.old if g.kind == ltl.ATOM)
        negs = frozenset(g.children[0].name for g in nd.old if g.kind == ltl.NOT)
        guards.append((pos, negs))
    succ = [[] for _ in nodes]
    starts = []
    for nd in nodes:
        for src in sorted(nd.incoming):
            if src == 0:
                starts.append(index[nd.id])
            elif src in index:
                succ[index[src]].append(index[nd.id])

    # degeneralize: states (node, counter)
    k = len(acc_sets)
    order = {}
    queue = []
    for q in starts:
        order[(q, 0)] = len(order)
        queue.append((q, 0))
    trans = {}
    for qc in queue:
        q, c = qc
        c2 = (c + 1) % k if k and q in acc_sets[c] else c
        pos, negs = guards[q]
        for sym in alphabet:
            if not pos <= sym or negs & sym:
                continue
            targets = set()
            for t in succ[q]:
                nxt = (t, c2)
                if nxt not in order:
                    order[nxt] = len(order)
                    queue.append(nxt)
                targets.add(order[nxt])
            if targets:
                trans[(order[qc], sym)] = frozenset(targets)
    if k:
        accepting = {i for (q, c), i in order.items() if c == 0 and q in acc_sets[0]}
    else:
        accepting = set(order.values())
    if not order:
        return BuchiAutomaton(1, propositions, alphabet, {}, frozenset({0}), frozenset())
    nba = BuchiAutomaton(len(order), propositions, alphabet, trans,
                         frozenset(range(len(starts))), frozenset(accepting))
    return trim(nba)


def trim(nba):
    """Drop states that are unreachable or cannot reach an accepting cycle."""
    n = nba.n_states
    succ = [set() for _ in range(n)]
    for (q, _), ts in nba.transitions.items():
        succ[q] |= ts
    reach = set(nba.initial)
    stack = list(nba.initial)
    while stack:
        q = stack.pop()
        for t in succ[q]:
            if t not in reach:
                reach.add(t)
                stack.append(t)
    sccs = _sccs(n, succ)
    good = set()
    for comp in sccs:
        cyc = len(comp) > 1 or any(q in succ[q] for q in comp)
        if cyc and comp & nba.accepting:
            good |= comp
    pred = [set() for _ in range(n)]
    for q in range(n):
        for t in succ[q]:
            pred[t].add(q)
    live = set(good)
    stack = list(good)
    while stack:
        q = stack.pop()
        for p in pred[q]:
            if p not in live:
                live.add(p)
                stack.append(p)
    keep = sorted(reach & live)
    if not keep:
        # empty language: one non-accepting state with no transitions
        return BuchiAutomaton(1, nba.propositions, nba.alphabet, {}, frozenset({0}), frozenset())
    renum = {q: i for i, q in enumerate(keep)}
    trans = {}
    for (q, sym), ts in nba.transitions.items():
        if q in renum:
            kept = frozenset(renum[t] for t in ts if t in renum)
            if kept:
                trans[(renum[q], sym)] = kept
    return BuchiAutomaton(
        len(keep), nba.propositions, nba.alphabet, trans,
        frozenset(renum[q] for q in nba.initial if q in renum),
        frozenset(renum[q] for q in nba.accepting if q in renum),
    )


def _sccs(n, succ):
    """Strongly connected components (iterative Tarjan) as a list of sets."""
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    out = []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, iter(sorted(succ[root])))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(sorted(succ[w]))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.add(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def nba_accepts_lasso(nba, w):
    """Membership of a lasso word, by searching for an accepting cycle in the run graph."""
    n = len(w)
    syms = [project(w.letter(i), nba.propositions) for i in range(n)]
    nodes = {}
    succ = []
    start = [(q, 0) for q in sorted(nba.initial)]
    stack = []
    for s in start:
        nodes[s] = len(nodes)
        succ.append(set())
        stack.append(s)
    while stack:
        q, i = stack.pop()
        j = w.successor(i)
        for t in nba.transitions.get((q, syms[i]), ()):
            node = (t, j)
            if node not in nodes:
                nodes[node] = len(nodes)
                succ.append(set())
                stack.append(node)
            succ[nodes[(q, i)]].add(nodes[node])
    for comp in _sccs(len(nodes), succ):
        cyc = len(comp) > 1 or any(v in succ[v] for v in comp)
        if not cyc:
            continue
        inv = [key for key, idx in nodes.items() if idx in comp]
        if any(q in nba.accepting for q, _ in inv):
            return True
    return False
