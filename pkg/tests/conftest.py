import itertools
import json
import sys

import numpy as np
import pytest

from ltlmdp import ltl
from ltlmdp.env import load_environment
from ltlmdp.product import ProductMDP
from ltlmdp import load_case_study, CASE_STUDY_FORMULA


def model_doc(vertices, motion, propositions=(), initial=None, actions=None):
    """Model JSON from a compact description.

    vertices: {id: (edges, enabled, obs)}; motion: [(from, action, to, prob)].
    """
    ids = list(vertices)
    acts = actions or sorted({u for _, u, _, _ in motion})
    return json.dumps({
        "vertices": [{"id": v, "edges": list(e), "enabled": list(a), "obs": dict(o)}
                     for v, (e, a, o) in vertices.items()],
        "actions": list(acts),
        "propositions": list(propositions),
        "initial": initial or ids[0],
        "motion": [{"from": a, "action": u, "to": b, "prob": p} for a, u, b, p in motion],
    })


def make_model(*args, **kw):
    return load_environment(model_doc(*args, **kw))


def coin_flip_model():
    """v0's only action lands in a trap (labelled bad) half the time."""
    return make_model(
        {"v0": (["safe", "trap"], ["go"], {}),
         "safe": (["safe"], ["go"], {}),
         "trap": (["trap"], ["go"], {"bad": 1.0})},
        [("v0", "go", "safe", 0.5), ("v0", "go", "trap", 0.5),
         ("safe", "go", "safe", 1.0), ("trap", "go", "trap", 1.0)],
        propositions=["bad"])


def choice_model():
    """Two actions at v0: 'risky' is fair, 'careful' succeeds 90% of the time.

    Visiting a then b forever from the good region needs a rotation.
    """
    return make_model(
        {"v0": (["ga", "trap"], ["risky", "careful"], {}),
         "ga": (["ga", "gb"], ["stay", "move"], {"a": 1.0}),
         "gb": (["ga", "gb"], ["stay", "move"], {"b": 1.0}),
         "trap": (["trap"], ["stay"], {})},
        [("v0", "risky", "ga", 0.5), ("v0", "risky", "trap", 0.5),
         ("v0", "careful", "ga", 0.9), ("v0", "careful", "trap", 0.1),
         ("ga", "stay", "ga", 1.0), ("ga", "move", "gb", 1.0),
         ("gb", "stay", "gb", 1.0), ("gb", "move", "ga", 1.0),
         ("trap", "stay", "trap", 1.0)],
        propositions=["a", "b"], actions=["risky", "careful", "stay", "move"])


CHOICE_FORMULA = "G F a && G F b"


@pytest.fixture(scope="session")
def case_study():
    return load_case_study()


@pytest.fixture(scope="session")
def case_result(case_study):
    from ltlmdp import synthesize
    return synthesize(case_study, CASE_STUDY_FORMULA)


# -- abstract MDPs ----------------------------------------------------------------

def random_mdp(rng, n_states, actions=("a", "b"), p_enable=0.7, p_edge=0.4):
    """(enabled, kernel) with every state having at least one action."""
    enabled, kernel = [], {}
    for s in range(n_states):
        acts = tuple(u for u in actions if rng.random() < p_enable) or (actions[0],)
        enabled.append(acts)
        for u in acts:
            succ = [t for t in range(n_states) if rng.random() < p_edge]
            if not succ:
                succ = [int(rng.integers(n_states))]
            w = rng.integers(1, 5, size=len(succ)).astype(float)
            w /= w.sum()
            kernel[(s, u)] = tuple(zip(succ, w.tolist()))
    return tuple(enabled), kernel


def abstract_product(enabled, kernel, pairs=(), initial=None, actions=("a", "b")):
    """A ProductMDP that is just an MDP (automaton state always 0)."""
    n = len(enabled)
    return ProductMDP(tuple((s, 0) for s in range(n)), tuple(actions), tuple(enabled),
                      dict(kernel), initial or {0: 1.0}, tuple(pairs), None, None)


# -- words and formulas -------------------------------------------------------------

def lassos(symbols, max_prefix, max_cycle):
    for lp in range(max_prefix + 1):
        for prefix in itertools.product(symbols, repeat=lp):
            for lc in range(1, max_cycle + 1):
                for cycle in itertools.product(symbols, repeat=lc):
                    yield ltl.LassoWord(prefix, cycle)


def random_lasso(rng, symbols, max_prefix=4, max_cycle=4):
    pick = lambda: symbols[int(rng.integers(len(symbols)))]
    return ltl.LassoWord(tuple(pick() for _ in range(int(rng.integers(max_prefix + 1)))),
                         tuple(pick() for _ in range(int(rng.integers(1, max_cycle + 1)))))


def random_nnf(rng, props, size):
    """Random NNF formula with exactly ``size`` nodes (negated atoms count 2)."""
    if size <= 1:
        k = rng.integers(len(props) + 2)
        if k == len(props):
            return ltl.TT
        if k == len(props) + 1:
            return ltl.FF
        return ltl.atom(props[k])
    if size == 2 and rng.random() < 0.5:
        return ltl.neg(ltl.atom(props[int(rng.integers(len(props)))]))
    if size == 2 or rng.random() < 0.35:
        op = [ltl.nxt, ltl.eventually, ltl.always][int(rng.integers(3))]
        return op(random_nnf(rng, props, size - 1))
    left = int(rng.integers(1, size - 1))
    op = [ltl.conj, ltl.disj, ltl.until, ltl.release][int(rng.integers(4))]
    return op(random_nnf(rng, props, left), random_nnf(rng, props, size - 1 - left))


def random_formula(rng, props, depth):
    """Random formula over the full syntax, including implication and negation."""
    if depth == 0 or rng.random() < 0.25:
        return ltl.atom(props[int(rng.integers(len(props)))])
    k = int(rng.integers(9))
    sub = lambda: random_formula(rng, props, depth - 1)
    if k == 0:
        return ltl.neg(sub())
    if k < 4:
        return [ltl.nxt, ltl.eventually, ltl.always][k - 1](sub())
    return [ltl.conj, ltl.disj, ltl.implies, ltl.until, ltl.release][k - 4](sub(), sub())


def brute_eval(f, w):
    """Position-by-position semantics; looks ahead one prefix plus one period."""
    np_, c = len(w.prefix), len(w.cycle)
    horizon = np_ + c

    def norm(i):
        return i if i < np_ else np_ + (i - np_) % c

    memo = {}

    def sat(g, i):
        i = norm(i)
        key = (g, i)
        if key in memo:
            return memo[key]
        k = g.kind
        if k == ltl.ATOM:
            r = g.name in w.letter(i)
        elif k == ltl.TRUE:
            r = True
        elif k == ltl.FALSE:
            r = False
        elif k == ltl.NOT:
            r = not sat(g.children[0], i)
        elif k == ltl.AND:
            r = sat(g.children[0], i) and sat(g.children[1], i)
        elif k == ltl.OR:
            r = sat(g.children[0], i) or sat(g.children[1], i)
        elif k == ltl.IMPLIES:
            r = not sat(g.children[0], i) or sat(g.children[1], i)
        elif k == ltl.NEXT:
            r = sat(g.children[0], i + 1)
        elif k == ltl.EVENTUALLY:
            r = any(sat(g.children[0], j) for j in range(i, i + horizon))
        elif k == ltl.ALWAYS:
            r = all(sat(g.children[0], j) for j in range(i, i + horizon))
        elif k == ltl.UNTIL:
            a, b = g.children
            r = False
            for j in range(i, i + horizon):
                if sat(b, j):
                    r = True
                    break
                if not sat(a, j):
                    break
        elif k == ltl.RELEASE:
            a, b = g.children
            r = True
            for j in range(i, i + horizon):
                if not sat(b, j):
                    r = False
                    break
                if sat(a, j):
                    break
        else:
            raise AssertionError(k)
        memo[key] = r
        return r

    return sat(f, 0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(mod.RESULTS):
            terminalreporter.write_line(mod.RESULTS[n])
