"""Formula to Rabin automaton, HOA export, and membership on lasso words."""
from ltlmdp import LassoWord, eval_lasso, parse_ltl, to_nnf, to_string
from ltlmdp.automata import dra_accepts_lasso, export_hoa, import_hoa, ltl_to_dra

FORMULAS = ["F a", "G F a && G F b", "a U b", "F G !a"]
WORDS = [
    LassoWord((), (frozenset({"a"}),)),
    LassoWord((frozenset(),), (frozenset({"a"}), frozenset({"b"}))),
    LassoWord((frozenset({"a"}),), (frozenset(),)),
]


def show(word):
    fmt = lambda xs: " ".join("{" + ",".join(sorted(z)) + "}" for z in xs)
    return f"{fmt(word.prefix)} ({fmt(word.cycle)})^w".strip()


def main():
    for text in FORMULAS:
        f = parse_ltl(text)
        d = ltl_to_dra(f, propositions=("a", "b"))
        print(f"{text:<16} nnf: {to_string(to_nnf(f)):<24} "
              f"states {d.n_states}, pairs {len(d.pairs)}")
        for w in WORDS:
            got, want = dra_accepts_lasso(d, w), eval_lasso(f, w)
            print(f"    {show(w):<28} automaton {got!s:<5} semantics {want}")

    d = ltl_to_dra("G F a && G F b", propositions=("a", "b"))
    text = export_hoa(d)
    print("\nHOA for G F a && G F b:\n" + text)
    back = import_hoa(text)
    print("re-imported:", back.n_states, "states")


if __name__ == "__main__":
    main()
