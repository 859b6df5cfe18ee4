"""Product of a labeled MDP with a deterministic Rabin automaton."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .automata.buchi import project
from .errors import InputError
from .mdp import choice_matrix


@dataclass(frozen=True)
class ProductMDP:
    """Product states are indices; ``states[p] == (s, q)`` is the back-map.

    ``pairs`` lifts each Rabin pair ``(L, K)`` to the product state sets
    ``{p : q in L}`` and ``{p : q in K}``.
    """
    states: tuple
    actions: tuple
    enabled: tuple
    kernel: dict
    initial: dict
    pairs: tuple
    mdp: object
    automaton: object

    @property
    def n_states(self):
        return len(self.states)

    def index(self):
        return {st: i for i, st in enumerate(self.states)}

    def choice_matrix(self):
        return choice_matrix(self.n_states, self.enabled, self.kernel)

    def successors(self, p):
        out = set()
        for u in self.enabled[p]:
            out.update(t for t, _ in self.kernel[(p, u)])
        return out

    def describe(self, p):
        """``(vertex, observed set, automaton state)`` of product state ``p``."""
        s, q = self.states[p]
        v, z = self.mdp.states[s]
        return v, z, q


def _label_symbols(m, d):
    alphabet = frozenset(d.alphabet)
    out = []
    for s in range(m.n_states):
        sym = project(m.label(s), d.propositions)
        if sym not in alphabet:
            raise InputError(
                f"label {sorted(m.label(s))} of MDP state {s} ({m.states[s][0]!r}) "
                "is not in the automaton alphabet")
        out.append(sym)
    return out


def build_product(m, d, prune=True):
    """Synchronous product ``m x d``.

    With ``prune`` only states reachable from the initial support are
    built, numbered breadth-first; successors are visited in (MDP state,
    automaton state) order. Without it all ``|S| x |Q|`` states exist, the
    unreachable ones appended after the reachable ones in lexicographic order.
    """
    sym = _label_symbols(m, d)
    init = {}
    for s in sorted(m.initial):
        if m.initial[s] > 0.0:
            key = (s, d.delta[(d.initial, sym[s])])
            init[key] = init.get(key, 0.0) + m.initial[s]
    order = {}
    queue = deque()
    for key in sorted(init):
        order[key] = len(order)
        queue.append(key)
    kernel_keys = {}
    while queue:
        s, q = queue.popleft()
        succs = []
        for u in m.enabled[s]:
            row = []
            for t, p in m.kernel[(s, u)]:
                row.append(((t, d.delta[(q, sym[t])]), p))
            kernel_keys[((s, q), u)] = row
            succs.extend(k for k, _ in row)
        for key in sorted(set(succs)):
            if key not in order:
                order[key] = len(order)
                queue.append(key)
    if not prune:
        for s in range(m.n_states):
            for q in range(d.n_states):
                key = (s, q)
                if key not in order:
                    order[key] = len(order)
                    for u in m.enabled[s]:
                        kernel_keys[(key, u)] = [
                            ((t, d.delta[(q, sym[t])]), p) for t, p in m.kernel[(s, u)]]
    states = tuple(sorted(order, key=order.get))
    enabled = tuple(m.enabled[s] for s, _ in states)
    kernel = {}
    for (key, u), row in kernel_keys.items():
        kernel[(order[key], u)] = tuple((order[k], p) for k, p in row)
    initial = {order[k]: v for k, v in init.items()}
    pairs = tuple(
        (frozenset(i for i, (_, q) in enumerate(states) if q in L),
         frozenset(i for i, (_, q) in enumerate(states) if q in K))
        for L, K in d.pairs
    )
    return ProductMDP(states, m.actions, enabled, kernel, initial, pairs, m, d)


def product_stats(p):
    lines = [f"states {p.n_states}", f"pairs {len(p.pairs)}"]
    for i, (L, K) in enumerate(p.pairs):
        lines.append(f"pair {i} L {len(L)} K {len(K)}")
    return "\n".join(lines) + "\n"
