"""LTL to deterministic Rabin automata, plus HOA interchange."""
from .. import ltl
from .buchi import BuchiAutomaton, all_symbols, ltl_to_nba, nba_accepts_lasso, project
from .hoa import export_hoa, import_hoa
from .rabin import RabinAutomaton, dra_accepts_lasso, isomorphic, restrict_alphabet
from .safra import DEFAULT_STATE_CAP, nba_to_dra


def ltl_to_dra(f, propositions=None, alphabet=None, cap=DEFAULT_STATE_CAP):
    """Full translation: NNF, tableau NBA, Safra determinization.

    ``f`` may be a string or a Formula. When ``alphabet`` is given the DRA is
    built directly over those symbols, which equals translating over the full
    alphabet and then calling ``restrict_alphabet``.
    """
    if isinstance(f, str):
        f = ltl.parse_ltl(f)
    nba = ltl_to_nba(ltl.to_nnf(f), propositions, alphabet)
    return nba_to_dra(nba, cap=cap)


__all__ = [
    "BuchiAutomaton", "RabinAutomaton", "all_symbols", "dra_accepts_lasso",
    "export_hoa", "import_hoa", "isomorphic", "ltl_to_dra", "ltl_to_nba",
    "nba_accepts_lasso", "nba_to_dra", "project", "restrict_alphabet",
]
