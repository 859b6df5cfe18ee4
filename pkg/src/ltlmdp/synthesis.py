"""Optimal strategy synthesis on the product MDP.

Pipeline: accepting maximal end components (AMECs) give the target set B;
states that cannot reach B form C; value iteration computes the maximal
probability of reaching B; inside AMECs the policy rotates through every
allowed action so that all AMEC states recur.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve

from .errors import ObservationError, SolverError

logger = logging.getLogger(__name__)

VI_EPS = 1e-10
VI_MAX_ITER = 10**6
OPT_TOL = 1e-8

TRANSIENT, DEAD = "TRANSIENT", "DEAD"


@dataclass(frozen=True)
class EndComponent:
    states: frozenset
    actions: dict
    pair: int | None = None

    def key(self):
        return min(self.states)


def _scc_labels(nodes, edges):
    """SCC label per node (dict) for the graph on ``nodes`` with ``edges``."""
    nodes = sorted(nodes)
    pos = {v: i for i, v in enumerate(nodes)}
    rows = [pos[a] for a, b in edges]
    cols = [pos[b] for a, b in edges]
    g = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes)))
    _, labels = connected_components(g, directed=True, connection="strong")
    return {v: labels[pos[v]] for v in nodes}


def find_mecs(p, restrict_states=None, forbidden=()):
    """Maximal end components of the sub-MDP on ``restrict_states - forbidden``.

    Iterated SCC refinement: drop actions that can leave the current SCC,
    drop states left without actions, repeat until nothing changes.
    """
    alive = set(range(p.n_states) if restrict_states is None else restrict_states)
    alive -= set(forbidden)
    acts = {}
    for s in alive:
        acts[s] = [u for u in p.enabled[s]
                   if all(t in alive for t, _ in p.kernel[(s, u)])]
    while True:
        changed = False
        # remove states without actions and propagate
        queue = [s for s in alive if not acts[s]]
        while queue:
            dead = set(queue)
            alive -= dead
            for s in dead:
                acts.pop(s, None)
            queue = []
            for s in alive:
                kept = [u for u in acts[s]
                        if not any(t in dead for t, _ in p.kernel[(s, u)])]
                if len(kept) != len(acts[s]):
                    acts[s] = kept
                    changed = True
                    if not kept:
                        queue.append(s)
        if not alive:
            return []
        edges = [(s, t) for s in alive for u in acts[s] for t, _ in p.kernel[(s, u)]]
        label = _scc_labels(alive, edges)
        for s in alive:
            kept = [u for u in acts[s]
                    if all(label[t] == label[s] for t, _ in p.kernel[(s, u)])]
            if len(kept) != len(acts[s]):
                acts[s] = kept
                changed = True
        if not changed:
            break
    groups = {}
    for s in sorted(alive):
        groups.setdefault(label[s], []).append(s)
    mecs = [EndComponent(frozenset(g), {s: tuple(acts[s]) for s in g})
            for g in groups.values()]
    return sorted(mecs, key=EndComponent.key)


def accepting_mecs(p):
    """AMECs for every Rabin pair (in pair order) and their union B."""
    out = []
    for i, (L, K) in enumerate(p.pairs):
        for ec in find_mecs(p, forbidden=L):
            if ec.states & K:
                out.append(EndComponent(ec.states, ec.actions, pair=i))
    target = frozenset().union(*(ec.states for ec in out)) if out else frozenset()
    return out, target


def dead_states(p, target):
    """States with no path to ``target`` under any action choice."""
    pred = [[] for _ in range(p.n_states)]
    for (s, u), row in p.kernel.items():
        for t, _ in row:
            pred[t].append(s)
    seen = set(target)
    queue = deque(target)
    while queue:
        t = queue.popleft()
        for s in pred[t]:
            if s not in seen:
                seen.add(s)
                queue.append(s)
    return frozenset(range(p.n_states)) - seen


@dataclass
class ReachabilitySolution:
    values: np.ndarray
    target: frozenset
    dead: frozenset
    action: dict
    iterations: int = 0
    residual: float = 0.0
    monotone: bool = True
    polished: bool = False
    product: object = field(default=None, repr=False)


def bellman(P, row_state, row_starts, x):
    """Per-state maximum over actions of the expected next value."""
    q = P @ x
    return q, np.maximum.reduceat(q, row_starts)


def _row_starts(row_state, n):
    starts = np.searchsorted(row_state, np.arange(n))
    return starts


def max_reachability(p, target, dead, eps=VI_EPS, max_iter=VI_MAX_ITER, polish=True):
    """Maximal probability of reaching ``target`` and an optimal stationary action.

    Value iteration from zero (the least fixpoint, i.e. the LP optimum),
    then a proper tie-break among optimal actions and an exact linear solve
    of the selected policy.
    """
    target = frozenset(target)
    dead = frozenset(dead)
    if target & dead:
        raise ValueError("target and dead sets must be disjoint")
    n = p.n_states
    P, row_state, row_action = p.choice_matrix()
    starts = _row_starts(row_state, n)
    x = np.zeros(n)
    tgt = np.zeros(n, dtype=bool)
    tgt[list(target)] = True
    dd = np.zeros(n, dtype=bool)
    dd[list(dead)] = True
    free = ~(tgt | dd)
    x[tgt] = 1.0
    monotone = True
    it = 0
    delta = np.inf
    while it < max_iter:
        it += 1
        _, v = bellman(P, row_state, starts, x)
        x_new = np.where(free, v, x)
        if np.any(x_new < x - 1e-15):
            monotone = False
        delta = float(np.max(np.abs(x_new - x))) if n else 0.0
        x = x_new
        if delta < eps:
            break
    else:
        raise SolverError(f"value iteration did not converge in {max_iter} iterations",
                          residual=delta)
    action = _select_actions(p, P, row_state, row_action, starts, x, free, tgt)
    polished = False
    if polish:
        xp = _policy_values(p, action, free, tgt)
        if xp is not None and np.all(xp >= x - 1e-12) and \
                _residual(P, row_state, starts, xp, free) <= OPT_TOL:
            x = xp
            polished = True
            action = _select_actions(p, P, row_state, row_action, starts, x, free, tgt)
    res = _residual(P, row_state, starts, x, free)
    logger.debug("value iteration: %d iterations, residual %.3g, polished %s", it, res, polished)
    return ReachabilitySolution(x, target, dead, action, it, res, monotone, polished, p)


def _residual(P, row_state, starts, x, free):
    if not free.any():
        return 0.0
    _, v = bellman(P, row_state, starts, x)
    return float(np.max(np.abs(v[free] - x[free])))


def _select_actions(p, P, row_state, row_action, starts, x, free, tgt):
    """Optimal action per free state, preferring actions that get closer to the target.

    Distance is measured in the graph that only uses actions within
    OPT_TOL of the optimum; ties go to the earliest declared action.
    """
    q, v = bellman(P, row_state, starts, x)
    n = p.n_states
    optimal = q >= v[row_state] - OPT_TOL
    # backward BFS over optimal actions
    pred = [[] for _ in range(n)]
    indptr, indices = P.indptr, P.indices
    for r in np.flatnonzero(optimal):
        s = row_state[r]
        if not free[s]:
            continue
        for t in indices[indptr[r]:indptr[r + 1]]:
            pred[t].append(s)
    dist = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    queue = deque(np.flatnonzero(tgt).tolist())
    dist[tgt] = 0
    while queue:
        t = queue.popleft()
        for s in pred[t]:
            if dist[s] > dist[t] + 1:
                dist[s] = dist[t] + 1
                queue.append(s)
    action = {}
    order = {u: i for i, u in enumerate(p.actions)}
    for s in np.flatnonzero(free):
        best = None
        for r in range(starts[s], starts[s + 1] if s + 1 < n else len(row_state)):
            if not optimal[r]:
                continue
            succ = indices[indptr[r]:indptr[r + 1]]
            d = int(dist[succ].min()) if len(succ) else np.iinfo(np.int64).max
            k = (d, order[row_action[r]])
            if best is None or k < best[0]:
                best = (k, row_action[r])
        action[int(s)] = best[1]
    return action


def _policy_values(p, action, free, tgt):
    """Exact reachability values of a stationary policy, or None if singular."""
    idx = np.flatnonzero(free)
    if len(idx) == 0:
        return np.where(tgt, 1.0, 0.0)
    pos = {int(s): i for i, s in enumerate(idx)}
    rows, cols, vals = [], [], []
    b = np.zeros(len(idx))
    for s in idx:
        i = pos[int(s)]
        for t, pr in p.kernel[(int(s), action[int(s)])]:
            if t in pos:
                rows.append(i)
                cols.append(pos[t])
                vals.append(pr)
            elif tgt[t]:
                b[i] += pr
    A = sp.identity(len(idx), format="csr") - sp.csr_matrix((vals, (rows, cols)), shape=(len(idx),) * 2)
    with np.errstate(all="ignore"):
        try:
            sol = spsolve(A.tocsc(), b)
        except RuntimeError:
            return None
    sol = np.atleast_1d(sol)
    if not np.all(np.isfinite(sol)) or np.any(sol < -1e-12) or np.any(sol > 1 + 1e-12):
        return None
    x = np.where(tgt, 1.0, 0.0)
    x[idx] = np.clip(sol, 0.0, 1.0)
    return x


# -- policies --------------------------------------------------------------------

@dataclass(frozen=True)
class ProductPolicy:
    """Stationary actions off the AMECs, round-robin lists inside them."""
    stationary: dict
    rotation: dict
    region: dict
    values: np.ndarray = field(repr=False)
    amecs: tuple = ()

    def action(self, p, visits=0):
        rot = self.rotation.get(p)
        if rot is not None:
            return rot[visits % len(rot)]
        return self.stationary[p]


def build_product_policy(sol, amecs, product=None):
    """Assemble the optimal product policy.

    A state lying in AMECs of several pairs uses the first one listed.
    """
    p = product if product is not None else sol.product
    rotation = {}
    region = {}
    for k, ec in enumerate(amecs):
        for s in sorted(ec.states):
            if s not in rotation:
                rotation[s] = ec.actions[s]
                region[s] = f"AMEC{k}"
    stationary = {}
    for s in range(p.n_states):
        if s in rotation:
            continue
        if s in sol.dead:
            stationary[s] = p.enabled[s][0]
            region[s] = DEAD
        elif s in sol.action:
            stationary[s] = sol.action[s]
            region[s] = TRANSIENT
        else:
            # in B but not in a listed AMEC; only happens with a foreign target
            stationary[s] = p.enabled[s][0]
            region[s] = TRANSIENT
    return ProductPolicy(stationary, rotation, region, sol.values, tuple(amecs))


def dump_policy(pp, p):
    """One line per product state: index, (v, Z, q), region, action(s), value."""
    lines = []
    props = p.mdp.propositions
    for s in range(p.n_states):
        v, z, q = p.describe(s)
        zs = "{" + ",".join(x for x in props if x in z) + "}"
        if s in pp.rotation:
            acts = "[" + ",".join(pp.rotation[s]) + "]"
        else:
            acts = pp.stationary[s]
        lines.append(f"{s} ({v},{zs},{q}) {pp.region[s]} {acts} {pp.values[s]:.6f}")
    return "\n".join(lines) + "\n"


class ControlStrategy:
    """Reactive strategy on the environment: (vertex, observation) -> action.

    Memory is the current automaton state plus per-product-state visit
    counters that drive the AMEC rotations.
    """

    def __init__(self, policy, product):
        self.policy = policy
        self.product = product
        self._mdp_index = product.mdp.index()
        self._prod_index = product.index()
        self.reset()

    def reset(self):
        self.q = None
        self.state = None
        self.visits = {}

    def spawn(self):
        """Fresh strategy sharing the immutable tables."""
        other = object.__new__(ControlStrategy)
        other.policy = self.policy
        other.product = self.product
        other._mdp_index = self._mdp_index
        other._prod_index = self._prod_index
        other.reset()
        return other

    def defined(self, v, z):
        return (v, frozenset(z)) in self._mdp_index

    def observe(self, v, z):
        """Advance the automaton on observation ``z`` at ``v``; return the product state."""
        z = frozenset(z)
        s = self._mdp_index.get((v, z))
        if s is None:
            raise ObservationError(f"observation {sorted(z)} is impossible at vertex {v!r}")
        d = self.product.automaton
        q = d.step(d.initial if self.q is None else self.q, z)
        p = self._prod_index.get((s, q))
        if p is None:
            raise ObservationError(f"product state for ({v!r}, {sorted(z)}, {q}) was never built")
        self.q = q
        self.state = p
        return p

    def act(self, v, z):
        """Observe, then return the action to apply at ``v``."""
        p = self.observe(v, z)
        n = self.visits.get(p, 0)
        self.visits[p] = n + 1
        return self.policy.action(p, n)

    @property
    def region(self):
        return None if self.state is None else self.policy.region[self.state]

    @property
    def in_amec(self):
        return self.state is not None and self.state in self.policy.rotation


def induce_and_project(pp, p):
    return ControlStrategy(pp, p)


@dataclass
class SynthesisResult:
    mdp: object
    automaton: object
    product: object
    amecs: list
    target: frozenset
    dead: frozenset
    solution: ReachabilitySolution
    policy: ProductPolicy
    probability: float

    def strategy(self):
        return induce_and_project(self.policy, self.product)


def initial_value(p, x):
    return float(sum(w * x[s] for s, w in p.initial.items()))


def max_satisfaction_probability(p, eps=VI_EPS):
    amecs, target = accepting_mecs(p)
    dead = dead_states(p, target)
    sol = max_reachability(p, target, dead, eps=eps)
    return initial_value(p, sol.values)


def solve_product(p, eps=VI_EPS):
    amecs, target = accepting_mecs(p)
    dead = dead_states(p, target)
    sol = max_reachability(p, target, dead, eps=eps)
    pp = build_product_policy(sol, amecs, p)
    return amecs, target, dead, sol, pp


def translate_for_model(model, formula, cap=None):
    """DRA for ``formula`` over the observation sets the model can produce.

    The alphabet is built from the formula's own propositions, so labels are
    projected onto them in the product.
    """
    from . import ltl
    from .automata import ltl_to_dra
    from .automata.buchi import project
    from .automata.safra import DEFAULT_STATE_CAP
    from .env import realizable_symbols
    from .errors import InputError

    env, _, om = model
    f = ltl.parse_ltl(formula) if isinstance(formula, str) else formula
    unknown = [a for a in ltl.atoms(f) if a not in env.propositions]
    if unknown:
        raise InputError(f"formula uses undeclared propositions {unknown}")
    props = tuple(a for a in env.propositions if a in ltl.atoms(f))
    alphabet = []
    for z in realizable_symbols(env, om):
        sym = project(z, props)
        if sym not in alphabet:
            alphabet.append(sym)
    return ltl_to_dra(f, props, alphabet, cap=cap or DEFAULT_STATE_CAP)


def synthesize(model, formula=None, dra=None, prune=True, eps=VI_EPS):
    """Run the whole pipeline; exactly one of ``formula`` / ``dra`` is required."""
    from .automata import restrict_alphabet
    from .env import realizable_symbols
    from .mdp import build_mdp

    if (formula is None) == (dra is None):
        raise ValueError("pass exactly one of formula or dra")
    m = build_mdp(*model)
    if dra is None:
        dra = translate_for_model(model, formula)
    else:
        dra = restrict_alphabet(dra, realizable_symbols(model.env, model.obs))
    from .product import build_product

    prod = build_product(m, dra, prune=prune)
    amecs, target, dead, sol, pp = solve_product(prod, eps=eps)
    return SynthesisResult(m, dra, prod, amecs, target, dead, sol, pp,
                           initial_value(prod, sol.values))
