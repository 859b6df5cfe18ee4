import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltlmdp import ltl
from ltlmdp.ltl import (LassoWord, atom, always, conj, disj, eval_lasso, eventually, implies,
                        neg, nxt, parse_ltl, release, to_nnf, to_string, until)
from ltlmdp.errors import ParseError

from conftest import brute_eval, random_formula, random_lasso

a, b, c = atom("a"), atom("b"), atom("c")
E = frozenset()
A, B, AB = frozenset("a"), frozenset("b"), frozenset("ab")
SYMS = [E, A, B, AB]


class TestParse:
    def test_surveillance(self):
        assert parse_ltl("G F pickup") == always(eventually(atom("pickup")))

    def test_until_binds_tighter_than_and(self):
        assert parse_ltl("a U b && c") == conj(until(a, b), c)

    def test_task_conjunct(self):
        got = parse_ltl("G(pickup && !observe9 -> X(!pickup U event7))")
        p, o, e = atom("pickup"), atom("observe9"), atom("event7")
        assert got == always(implies(conj(p, neg(o)), nxt(until(neg(p), e))))

    def test_right_associative(self):
        assert parse_ltl("a U b U c") == until(a, until(b, c))
        assert parse_ltl("a -> b -> c") == implies(a, implies(b, c))
        assert parse_ltl("a R b R c") == release(a, release(b, c))

    def test_or_looser_than_and(self):
        assert parse_ltl("a || b && c") == disj(a, conj(b, c))
        assert parse_ltl("a && b || c -> a") == implies(disj(conj(a, b), c), a)

    def test_unary_binds_tightest(self):
        assert parse_ltl("!a U b") == until(neg(a), b)
        assert parse_ltl("X a && b") == conj(nxt(a), b)

    def test_aliases(self):
        assert parse_ltl("[]<> a") == parse_ltl("G F a")
        assert parse_ltl("a & ~b | c => a") == parse_ltl("a && !b || c -> a")

    def test_stacked_operators(self):
        assert parse_ltl("GF a") == always(eventually(a))
        assert parse_ltl("XX a") == nxt(nxt(a))
        # a word with other letters is an ordinary identifier
        assert parse_ltl("XXa") == atom("XXa")

    def test_literals(self):
        assert parse_ltl("true U false") == until(ltl.TT, ltl.FF)

    @pytest.mark.parametrize("text", ["", "   ", "a &&", "(a", "a b", "U a", "a ) "])
    def test_syntax_errors(self, text):
        with pytest.raises(ParseError):
            parse_ltl(text)

    def test_error_position(self):
        with pytest.raises(ParseError) as exc:
            parse_ltl("a && $b")
        assert exc.value.position == 5


class TestNnf:
    def test_not_eventually(self):
        assert to_nnf(neg(eventually(a))) == release(ltl.FF, neg(a))

    def test_not_until(self):
        assert to_nnf(neg(until(a, b))) == release(neg(a), neg(b))

    def test_idempotent(self):
        f = until(conj(a, neg(b)), release(nxt(a), disj(b, ltl.TT)))
        assert ltl.is_nnf(f)
        assert to_nnf(f) == f

    def test_rewrites_sugar(self):
        f = to_nnf(parse_ltl("G(a -> F b)"))
        kinds = {g.kind for g in ltl.subformulas(f)}
        assert not kinds & {ltl.IMPLIES, ltl.EVENTUALLY, ltl.ALWAYS}
        assert ltl.is_nnf(f)


class TestLasso:
    def test_eventually_on_empty(self):
        assert not eval_lasso(eventually(a), LassoWord((), (E,)))

    def test_two_recurrences(self):
        f = conj(always(eventually(a)), always(eventually(b)))
        assert eval_lasso(f, LassoWord((), (A, B)))
        assert not eval_lasso(f, LassoWord((), (A,)))

    def test_until_blocked(self):
        p, q = atom("p"), atom("q")
        w = LassoWord((frozenset("p"),), (frozenset("q"),))
        assert not eval_lasso(until(neg(p), q), w)
        assert brute_eval(until(neg(p), q), w) is False

    def test_next_crosses_into_cycle(self):
        assert eval_lasso(nxt(nxt(a)), LassoWord((E,), (E, A)))
        assert not eval_lasso(nxt(nxt(nxt(a))), LassoWord((E,), (E, A)))

    def test_release_holds_forever(self):
        assert eval_lasso(release(ltl.FF, a), LassoWord((A,), (A, A)))

    def test_empty_cycle_rejected(self):
        with pytest.raises(ValueError):
            LassoWord((A,), ())


def test_oracle_agreement_random():
    rng = np.random.default_rng(7)
    for _ in range(600):
        f = random_formula(rng, ["a", "b"], 4)
        w = random_lasso(rng, SYMS)
        assert eval_lasso(f, w) == brute_eval(f, w), (to_string(f), w)


formulas = st.builds(lambda s, d: random_formula(np.random.default_rng(s), ["a", "b"], d),
                     st.integers(0, 2**32 - 1), st.integers(0, 4))
words = st.builds(LassoWord,
                  st.lists(st.sampled_from(SYMS), max_size=3).map(tuple),
                  st.lists(st.sampled_from(SYMS), min_size=1, max_size=3).map(tuple))


@settings(max_examples=300, deadline=None)
@given(formulas, words)
def test_nnf_preserves_semantics(f, w):
    g = to_nnf(f)
    assert ltl.is_nnf(g)
    assert eval_lasso(f, w) == eval_lasso(g, w)


@settings(max_examples=300, deadline=None)
@given(formulas)
def test_print_parse_round_trip(f):
    assert parse_ltl(to_string(f)) == f


@settings(max_examples=300, deadline=None)
@given(formulas, words)
def test_dualities(f, w):
    assert eval_lasso(neg(always(f)), w) == eval_lasso(eventually(neg(f)), w)
    assert eval_lasso(neg(eventually(f)), w) == eval_lasso(always(neg(f)), w)
    assert eval_lasso(neg(nxt(f)), w) == eval_lasso(nxt(neg(f)), w)
    assert eval_lasso(eventually(f), w) == eval_lasso(until(ltl.TT, f), w)


def test_quoted_keyword_atoms():
    f = parse_ltl('"true" && G "X"')
    assert ltl.atoms(f) == ("true", "X")
    assert parse_ltl(to_string(f)) == f
