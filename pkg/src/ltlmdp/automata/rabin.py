"""Deterministic Rabin automata over explicit proposition-set alphabets."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InputError
from .buchi import project


@dataclass(frozen=True)
class RabinAutomaton:
    """A DRA with states ``0..n_states-1``.

    ``delta[(q, symbol)]`` is the successor; ``pairs`` is a tuple of
    ``(L, K)`` frozensets. A run is accepting if for some pair it visits L
    finitely often and K infinitely often. Symbols are frozensets of
    proposition names; letters of a word are first projected onto
    ``propositions``.
    """
    n_states: int
    propositions: tuple
    alphabet: tuple
    delta: dict
    initial: int
    pairs: tuple
    labels: tuple = field(default=(), compare=False)

    @property
    def states(self):
        return range(self.n_states)

    def step(self, q, symbol):
        sym = project(symbol, self.propositions)
        try:
            return self.delta[(q, sym)]
        except KeyError:
            raise InputError(
                f"symbol {sorted(sym)} is not in the automaton alphabet") from None

    def n_transitions(self):
        return len(self.delta)

    def check(self):
        """Assert determinism/completeness and that pairs reference states."""
        syms = set(self.alphabet)
        if len(syms) != len(self.alphabet):
            raise InputError("duplicate alphabet symbols")
        if not 0 <= self.initial < self.n_states:
            raise InputError("initial state out of range")
        for q in self.states:
            for s in self.alphabet:
                t = self.delta.get((q, s))
                if t is None or not 0 <= t < self.n_states:
                    raise InputError(f"transition from {q} on {sorted(s)} is missing")
        for (q, s) in self.delta:
            if s not in syms:
                raise InputError(f"transition on symbol {sorted(s)} outside the alphabet")
        for L, K in self.pairs:
            if any(not 0 <= q < self.n_states for q in L | K):
                raise InputError("accepting pair references an unknown state")


def dra_accepts_lasso(d, w):
    """Rabin acceptance of the unique run on ``w``."""
    q = d.initial
    for letter in w.prefix:
        q = d.step(q, letter)
    c = len(w.cycle)
    seen = {}
    trail = []
    i = 0
    while (q, i) not in seen:
        seen[(q, i)] = len(trail)
        trail.append(q)
        q = d.step(q, w.cycle[i])
        i = (i + 1) % c
    loop = set(trail[seen[(q, i)]:])
    return any(not (loop & L) and (loop & K) for L, K in d.pairs)


def restrict_alphabet(d, realizable):
    """Drop transitions on non-realizable symbols, then unreachable states.

    States are renumbered breadth-first from the initial state, in alphabet
    order; accepting pairs are intersected with the surviving states.
    """
    wanted = {project(s, d.propositions) for s in realizable}
    alphabet = tuple(s for s in d.alphabet if s in wanted)
    if not alphabet:
        raise InputError("no realizable symbol is in the automaton alphabet")
    order = {d.initial: 0}
    queue = [d.initial]
    for q in queue:
        for s in alphabet:
            t = d.delta[(q, s)]
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    delta = {(order[q], s): order[d.delta[(q, s)]] for q in queue for s in alphabet}
    pairs = tuple(
        (frozenset(order[q] for q in L if q in order), frozenset(order[q] for q in K if q in order))
        for L, K in d.pairs
    )
    labels = tuple(d.labels[q] for q in queue) if d.labels else ()
    return RabinAutomaton(len(order), d.propositions, alphabet, delta, 0, pairs, labels)


def drop_useless_pairs(d):
    """Remove pairs whose K set is empty; they can never accept."""
    pairs = tuple((L, K) for L, K in d.pairs if K)
    return RabinAutomaton(d.n_states, d.propositions, d.alphabet, d.delta,
                          d.initial, pairs, d.labels)


def isomorphic(a, b):
    """Exact isomorphism check; both automata are deterministic so the
    bijection is fixed by a joint traversal from the initial states."""
    if (a.n_states, set(a.alphabet), set(a.propositions)) != \
            (b.n_states, set(b.alphabet), set(b.propositions)):
        return False
    m = {a.initial: b.initial}
    queue = [a.initial]
    for q in queue:
        for s in a.alphabet:
            t, u = a.delta[(q, s)], b.delta[(m[q], s)]
            if t in m:
                if m[t] != u:
                    return False
            else:
                m[t] = u
                queue.append(t)
    if len(m) != a.n_states or len(set(m.values())) != a.n_states:
        return False
    mapped = {(frozenset(m[q] for q in L), frozenset(m[q] for q in K)) for L, K in a.pairs}
    return mapped == set(b.pairs)
