"""Monte-Carlo execution of control strategies.

Episode ``k`` of a batch seeded with ``seed`` draws from
``numpy.random.Generator(PCG64(seed + k))``, so every trace can be
replayed on any platform from its seed alone.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from .env import enumerate_observations

GENERATOR = "numpy.random.PCG64"


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class Step:
    t: int
    vertex: str
    observed: frozenset
    action: str
    product_state: int
    back: tuple
    region: str


@dataclass
class Trace:
    seed: int
    steps: list = field(default_factory=list)
    entered_amec: int | None = None

    @property
    def word(self):
        return [s.observed for s in self.steps]

    def to_text(self, propositions):
        lines = [f"# seed {self.seed} generator {GENERATOR}"]
        for st in self.steps:
            obs = "{" + ",".join(p for p in propositions if p in st.observed) + "}"
            v, z, q = st.back
            zs = "{" + ",".join(p for p in propositions if p in z) + "}"
            lines.append(f"{st.t} {st.vertex} {obs} {st.action} ({v},{zs},{q}) {st.region}")
        return "\n".join(lines) + "\n"


class _Sampler:
    """Cumulative tables for motion and observation draws."""

    def __init__(self, model):
        env, mm, om = model
        self.obs = {}
        for v in env.vertices:
            zs = enumerate_observations(env, om, v)
            self.obs[v] = ([z.observed for z in zs], np.cumsum([z.probability for z in zs]))
        self.motion = {}
        for v in env.vertices:
            for u in mm.enabled[v]:
                dist = mm.distribution(v, u, env.vertices)
                self.motion[(v, u)] = ([w for w, _ in dist], np.cumsum([p for _, p in dist]))

    @staticmethod
    def _draw(table, rng):
        items, cum = table
        i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        return items[min(i, len(items) - 1)]

    def observe(self, v, rng):
        return self._draw(self.obs[v], rng)

    def move(self, v, u, rng):
        return self._draw(self.motion[(v, u)], rng)


def _run(model, strategy, sampler, seed, horizon, record=True, stop_on_entry=False):
    rng = make_rng(seed)
    strategy.reset()
    trace = Trace(seed)
    product = strategy.product
    v = model[0].initial_vertex
    z = sampler.observe(v, rng)
    for t in range(horizon):
        u = strategy.act(v, z)
        p = strategy.state
        if strategy.in_amec and trace.entered_amec is None:
            trace.entered_amec = t
        if record:
            trace.steps.append(Step(t, v, z, u, p, product.describe(p), strategy.region))
        if stop_on_entry and trace.entered_amec is not None:
            break
        v = sampler.move(v, u, rng)
        z = sampler.observe(v, rng)
    return trace


def simulate(model, strategy, seed, horizon):
    """One trajectory of ``horizon`` steps under ``strategy``."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    return _run(model, strategy, _Sampler(model), seed, horizon)


@dataclass(frozen=True)
class Estimate:
    fraction: float
    half_width: float
    successes: int
    episodes: int

    def wilson(self, confidence=0.95):
        ci = binomtest(self.successes, self.episodes).proportion_ci(confidence, method="wilson")
        return ci.low, ci.high


def wilson_half_width(successes, n, confidence=0.95):
    ci = binomtest(successes, n).proportion_ci(confidence, method="wilson")
    return float((ci.high - ci.low) / 2.0)


def estimate_satisfaction(model, strategy, n_episodes, horizon, seed):
    """Fraction of episodes reaching an accepting end component within ``horizon``.

    Reaching one is the finite-horizon proxy for satisfaction: from there the
    rotation policy satisfies the mission with probability 1.
    """
    if n_episodes < 1:
        raise ValueError("n_episodes must be at least 1")
    sampler = _Sampler(model)
    hits = 0
    for k in range(n_episodes):
        tr = _run(model, strategy.spawn(), sampler, seed + k, horizon,
                  record=False, stop_on_entry=True)
        hits += tr.entered_amec is not None
    return Estimate(hits / n_episodes, wilson_half_width(hits, n_episodes), hits, n_episodes)


def write_traces(traces, directory, propositions):
    os.makedirs(directory, exist_ok=True)
    paths = []
    for k, tr in enumerate(traces):
        path = os.path.join(directory, f"trace_{k:05d}.txt")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(tr.to_text(propositions))
        paths.append(path)
    return paths
