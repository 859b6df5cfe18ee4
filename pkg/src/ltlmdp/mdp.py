"""Labeled MDPs and their construction from an environment model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .env import ENUMERATION_CAP, enumerate_observations
from .errors import InputError


@dataclass(frozen=True)
class LabeledMDP:
    """States are indices ``0..n-1``; ``states[i]`` is the pair ``(v, Z)``.

    ``kernel[(s, u)]`` is a tuple of ``(successor, probability)`` with
    positive probabilities only. ``enabled[s]`` lists action names in
    declaration order.
    """
    states: tuple
    actions: tuple
    enabled: tuple
    kernel: dict
    initial: dict
    propositions: tuple

    @property
    def n_states(self):
        return len(self.states)

    def label(self, s):
        return self.states[s][1]

    def index(self):
        return {st: i for i, st in enumerate(self.states)}

    def prob(self, s, u, t):
        for t2, p in self.kernel.get((s, u), ()):
            if t2 == t:
                return p
        return 0.0

    def choice_matrix(self):
        """Sparse matrix with one row per (state, enabled action), in state order."""
        return choice_matrix(self.n_states, self.enabled, self.kernel)


def choice_matrix(n, enabled, kernel):
    """Return (P, row_state, row_action) for a sparse kernel."""
    rows, cols, vals = [], [], []
    row_state, row_action = [], []
    r = 0
    for s in range(n):
        for u in enabled[s]:
            for t, p in kernel[(s, u)]:
                rows.append(r)
                cols.append(t)
                vals.append(p)
            row_state.append(s)
            row_action.append(u)
            r += 1
    P = sp.csr_matrix((vals, (rows, cols)), shape=(r, n))
    return P, np.asarray(row_state, dtype=np.int64), row_action


def build_mdp(env, mm, om, cap=ENUMERATION_CAP):
    """Product of motion and observation models: states are (vertex, observed set)."""
    obs = {v: enumerate_observations(env, om, v, cap) for v in env.vertices}
    states = []
    index = {}
    for v in env.vertices:
        for z in obs[v]:
            index[(v, z.observed)] = len(states)
            states.append((v, z.observed))
    enabled = []
    kernel = {}
    for s, (v, _) in enumerate(states):
        acts = tuple(u for u in mm.primitives if u in mm.enabled[v])
        enabled.append(acts)
        for u in acts:
            row = []
            for w, pm in mm.distribution(v, u, env.vertices):
                for z in obs[w]:
                    row.append((index[(w, z.observed)], pm * z.probability))
            kernel[(s, u)] = tuple(row)
    initial = {index[(env.initial_vertex, z.observed)]: z.probability
               for z in obs[env.initial_vertex]}
    return LabeledMDP(tuple(states), tuple(mm.primitives), tuple(enabled), kernel,
                      initial, tuple(env.propositions))


def check_mdp(m, tol=1e-9):
    """Verify stochasticity of rows and of the initial distribution."""
    for s in range(m.n_states):
        if not m.enabled[s]:
            raise InputError(f"state {s} has no enabled action")
        for u in m.enabled[s]:
            total = math.fsum(p for _, p in m.kernel[(s, u)])
            if abs(total - 1.0) > tol:
                raise InputError(f"row ({s}, {u!r}) sums to {total}")
    for (s, u) in m.kernel:
        if u not in m.enabled[s]:
            raise InputError(f"kernel row for disabled action ({s}, {u!r})")
    total = math.fsum(m.initial.values())
    if abs(total - 1.0) > tol:
        raise InputError(f"initial distribution sums to {total}")


@dataclass(frozen=True)
class FinitePath:
    states: tuple
    actions: tuple = ()

    def __post_init__(self):
        if len(self.states) != len(self.actions) + 1:
            raise InputError("a path of n+1 states needs n actions")


def path_probability(m, path):
    """Cylinder probability: initial mass times the transition probabilities."""
    s0 = path.states[0]
    p = m.initial.get(s0, 0.0)
    if p <= 0.0:
        raise InputError(f"path starts in state {s0} which has no initial mass")
    for i, u in enumerate(path.actions):
        s, t = path.states[i], path.states[i + 1]
        if u not in m.enabled[s]:
            raise InputError(f"action {u!r} is not enabled in state {s}")
        q = m.prob(s, u, t)
        if q <= 0.0:
            raise InputError(f"step {i}: transition {s} -{u}-> {t} has probability 0")
        p *= q
    return p


def _fmt_set(z, props):
    return "{" + ",".join(p for p in props if p in z) + "}"


def dump_mdp(m):
    """Deterministic text listing used for golden-file regression."""
    lines = [f"states {m.n_states}", f"actions {' '.join(m.actions)}"]
    for s, (v, z) in enumerate(m.states):
        lines.append(f"state {s} {v} {_fmt_set(z, m.propositions)} "
                     f"init {m.initial.get(s, 0.0):.6f}")
        for u in m.enabled[s]:
            row = " ".join(f"{t}:{p:.6f}" for t, p in m.kernel[(s, u)])
            lines.append(f"  {u} -> {row}")
    return "\n".join(lines) + "\n"
