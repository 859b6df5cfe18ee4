import numpy as np
import pytest

from ltlmdp import CASE_STUDY_FORMULA, synthesize
from ltlmdp.automata.rabin import RabinAutomaton
from ltlmdp.errors import ObservationError
from ltlmdp.mdp import build_mdp
from ltlmdp.product import build_product
from ltlmdp.sim import simulate
from ltlmdp.synthesis import (accepting_mecs, bellman, dead_states,
                              dump_policy, find_mecs, induce_and_project, max_reachability,
                              max_satisfaction_probability, solve_product)

from conftest import (CHOICE_FORMULA, abstract_product, choice_model, coin_flip_model,
                      make_model, random_mdp)
from oracles import max_reach, maximal_end_components, policy_reach


def as_sets(mecs):
    return {(ec.states, frozenset((s, u) for s in ec.states for u in ec.actions[s]))
            for ec in mecs}


def check_end_component(p, ec):
    for s in ec.states:
        assert ec.actions[s]
        for u in ec.actions[s]:
            assert u in p.enabled[s]
            assert all(t in ec.states for t, _ in p.kernel[(s, u)])
    for root in ec.states:
        seen, stack = {root}, [root]
        while stack:
            x = stack.pop()
            for u in ec.actions[x]:
                for t, _ in p.kernel[(x, u)]:
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
        assert seen == set(ec.states)


class TestMecs:
    def test_self_loop(self):
        p = abstract_product([("a",)], {(0, "a"): ((0, 1.0),)})
        (ec,) = find_mecs(p)
        assert ec.states == {0} and ec.actions == {0: ("a",)}

    def test_two_cycle(self):
        p = abstract_product([("a",), ("a",)], {(0, "a"): ((1, 1.0),), (1, "a"): ((0, 1.0),)})
        (ec,) = find_mecs(p)
        assert ec.states == {0, 1}

    def test_transient_state_excluded(self):
        kernel = {(0, "a"): ((1, 1.0),), (1, "a"): ((1, 1.0),)}
        p = abstract_product([("a",), ("a",)], kernel)
        assert [ec.states for ec in find_mecs(p)] == [frozenset({1})]

    @pytest.mark.parametrize("seed", range(120))
    def test_matches_exhaustive_search(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 6))
        enabled, kernel = random_mdp(rng, n)
        p = abstract_product(enabled, kernel)
        forbidden = {s for s in range(n) if rng.random() < 0.2}
        restrict = {s for s in range(n) if rng.random() < 0.9}
        mecs = find_mecs(p, restrict_states=restrict, forbidden=forbidden)
        assert as_sets(mecs) == maximal_end_components(enabled, kernel, restrict - forbidden)
        for ec in mecs:
            check_end_component(p, ec)
        seen = set()
        for ec in mecs:
            assert not ec.states & seen
            seen |= ec.states
        keys = [min(ec.states) for ec in mecs]
        assert keys == sorted(keys)


class TestAccepting:
    def test_false_formula(self):
        r = synthesize(coin_flip_model(), "false")
        assert r.amecs == [] and r.target == frozenset()
        assert r.probability == 0.0

    def test_k_singleton_self_loop(self):
        kernel = {(0, "a"): ((1, 0.5), (0, 0.5)), (1, "a"): ((1, 1.0),)}
        p = abstract_product([("a",), ("a",)], kernel, pairs=[(frozenset(), frozenset({1}))])
        amecs, target = accepting_mecs(p)
        assert [ec.states for ec in amecs] == [frozenset({1})]
        assert target == {1}

    def test_l_states_are_excluded(self):
        kernel = {(0, "a"): ((1, 1.0),), (1, "a"): ((0, 1.0),)}
        pairs = [(frozenset({0}), frozenset({1})), (frozenset(), frozenset({0}))]
        p = abstract_product([("a",), ("a",)], kernel, pairs=pairs)
        amecs, target = accepting_mecs(p)
        assert [(ec.states, ec.pair) for ec in amecs] == [(frozenset({0, 1}), 1)]

    def test_case_study_has_amec(self, case_result):
        assert len(case_result.amecs) >= 1
        assert case_result.target
        for ec in case_result.amecs:
            check_end_component(case_result.product, ec)


class TestDeadStates:
    def chain(self, reverse=False):
        # states a=0, b=1, B=2
        if reverse:
            kernel = {(0, "a"): ((0, 1.0),), (1, "a"): ((0, 1.0),), (2, "a"): ((1, 1.0),)}
        else:
            kernel = {(0, "a"): ((1, 1.0),), (1, "a"): ((2, 1.0),), (2, "a"): ((2, 1.0),)}
        return abstract_product([("a",)] * 3, kernel)

    def test_boundaries(self):
        p = self.chain()
        assert dead_states(p, frozenset(range(3))) == frozenset()
        assert dead_states(p, frozenset()) == frozenset(range(3))

    def test_chain(self):
        assert dead_states(self.chain(), frozenset({2})) == frozenset()
        assert dead_states(self.chain(reverse=True), frozenset({2})) == frozenset({0, 1})


class TestReachability:
    def test_boundary_values(self):
        kernel = {(0, "a"): ((1, 0.5), (2, 0.5)), (1, "a"): ((1, 1.0),), (2, "a"): ((2, 1.0),)}
        p = abstract_product([("a",)] * 3, kernel)
        target = frozenset({1})
        sol = max_reachability(p, target, dead_states(p, target))
        assert sol.values.tolist() == [0.5, 1.0, 0.0]

    def test_geometric_retry(self):
        kernel = {(0, "a"): ((0, 0.7), (1, 0.3)), (1, "a"): ((1, 1.0),)}
        p = abstract_product([("a",), ("a",)], kernel)
        sol = max_reachability(p, frozenset({1}), frozenset())
        assert sol.values[0] == pytest.approx(1.0, abs=1e-12)
        assert sol.polished

    @pytest.mark.parametrize("seed", range(120))
    def test_matches_policy_enumeration(self, seed):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(2, 6))
        enabled, kernel = random_mdp(rng, n)
        target = frozenset(s for s in range(n) if rng.random() < 0.3) or frozenset({n - 1})
        p = abstract_product(enabled, kernel)
        sol = max_reachability(p, target, dead_states(p, target))
        np.testing.assert_allclose(sol.values, max_reach(enabled, kernel, target), atol=1e-7)
        assert sol.monotone and sol.residual < 1e-8
        # the extracted actions realise the values
        policy = {s: sol.action.get(s, enabled[s][0]) for s in range(n)}
        np.testing.assert_allclose(policy_reach(enabled, kernel, target, policy), sol.values,
                                   atol=1e-8)

    def test_fixpoint(self, case_result):
        p, sol = case_result.product, case_result.solution
        P, row_state, row_action = p.choice_matrix()
        starts = np.searchsorted(row_state, np.arange(p.n_states))
        _, fx = bellman(P, row_state, starts, sol.values)
        free = [s for s in range(p.n_states) if s not in sol.target and s not in sol.dead]
        assert np.max(np.abs(fx[free] - sol.values[free]), initial=0.0) < 1e-8

    def test_prefers_progress_over_self_loop(self):
        # 'wait' keeps the value at 1 without ever reaching the target
        kernel = {(0, "wait"): ((0, 1.0),), (0, "go"): ((1, 1.0),), (1, "wait"): ((1, 1.0),)}
        p = abstract_product([("wait", "go"), ("wait",)], kernel, actions=("wait", "go"))
        sol = max_reachability(p, frozenset({1}), frozenset())
        assert sol.action[0] == "go"


class TestPolicy:
    def test_transient_maximizer(self):
        r = synthesize(choice_model(), CHOICE_FORMULA)
        assert r.probability == pytest.approx(0.9, abs=1e-9)
        v0 = [i for i in range(r.product.n_states) if r.product.describe(i)[0] == "v0"]
        assert v0 and all(r.policy.stationary[i] == "careful" for i in v0)

    def test_rotation(self):
        r = synthesize(choice_model(), CHOICE_FORMULA)
        rot = [(i, r.policy.rotation[i]) for i in sorted(r.policy.rotation)
               if len(r.policy.rotation[i]) == 2]
        assert rot
        i, acts = rot[0]
        assert [r.policy.action(i, k) for k in range(5)] == [acts[0], acts[1]] * 2 + [acts[0]]

    def test_dead_states_take_first_action(self):
        r = synthesize(choice_model(), CHOICE_FORMULA)
        for i in r.dead:
            assert r.policy.stationary[i] == r.product.enabled[i][0]
            assert r.policy.region[i] == "DEAD"

    def test_dump_is_reproducible(self, case_study):
        a = synthesize(case_study, CASE_STUDY_FORMULA)
        b = synthesize(case_study, CASE_STUDY_FORMULA)
        assert dump_policy(a.policy, a.product) == dump_policy(b.policy, b.product)

    def test_every_rotation_action_used(self, case_study, case_result):
        strategy = case_result.strategy()
        trace = simulate(case_study, strategy, seed=11, horizon=10_000)
        used = {}
        for st in trace.steps:
            used.setdefault(st.product_state, set()).add(st.action)
        rot = case_result.policy.rotation
        recurrent = [p for p in rot if p in used]
        assert set(recurrent) == set(rot)
        for p in recurrent:
            assert used[p] == set(rot[p])


class TestStrategy:
    def test_trivial_automaton(self, case_study):
        m = build_mdp(*case_study)
        delta = {(0, frozenset()): 0}
        d = RabinAutomaton(1, (), (frozenset(),), delta, 0, ((frozenset(), frozenset({0})),))
        p = build_product(m, d)
        _, _, _, _, pp = solve_product(p)
        strat = induce_and_project(pp, p)
        idx = p.index()
        for s, (v, z) in enumerate(m.states):
            assert strat.spawn().act(v, z) == pp.action(idx[(s, 0)])

    def test_impossible_observation(self, case_result):
        strat = case_result.strategy()
        assert not strat.defined("v1", {"pickup"})
        with pytest.raises(ObservationError):
            strat.act("v1", {"pickup"})

    def test_memory_matters(self):
        # after visiting one spoke the hub must send the robot to the other
        model = make_model(
            {"h": (["A", "B"], ["toA", "toB"], {}),
             "A": (["h"], ["back"], {"a": 1.0}),
             "B": (["h"], ["back"], {"b": 1.0})},
            [("h", "toA", "A", 1.0), ("h", "toB", "B", 1.0),
             ("A", "back", "h", 1.0), ("B", "back", "h", 1.0)],
            propositions=["a", "b"], actions=["toA", "toB", "back"])
        r = synthesize(model, "F a && F b")
        assert r.probability == pytest.approx(1.0)
        strat = r.strategy()
        first = strat.act("h", set())
        spoke = "A" if first == "toA" else "B"
        assert strat.act(spoke, {spoke.lower()}) == "back"
        assert strat.act("h", set()) != first

    def test_actions_are_enabled(self, case_study, case_result):
        strat = case_result.strategy()
        tr = simulate(case_study, strat, seed=3, horizon=300)
        for st in tr.steps:
            assert st.action in case_study.motion.enabled[st.vertex]


class TestProbability:
    def test_case_study(self, case_result):
        assert case_result.probability == pytest.approx(1.0, abs=1e-6)
        assert max_satisfaction_probability(case_result.product) == pytest.approx(1.0, abs=1e-6)

    def test_coin_flip(self):
        assert synthesize(coin_flip_model(), "G !bad").probability == pytest.approx(0.5, abs=1e-12)

    def test_unpruned_agrees(self, case_study):
        r = synthesize(case_study, CASE_STUDY_FORMULA, prune=False)
        assert r.probability == pytest.approx(1.0, abs=1e-6)
