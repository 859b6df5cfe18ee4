"""HOA v1 import/export for deterministic Rabin automata.

Only the subset needed to exchange complete deterministic Rabin automata
with state-based acceptance is supported.
"""
from __future__ import annotations

import re

from ..errors import ParseError, UnsupportedFeatureError
from .buchi import all_symbols
from .rabin import RabinAutomaton


def export_hoa(d, name=None):
    """HOA text for ``d``.

    HOA automata are complete over 2^AP, so when ``d`` has a restricted
    alphabet the missing symbols lead to an extra rejecting sink state.
    """
    aps = list(d.propositions)
    symbols = all_symbols(aps)
    known = set(d.alphabet)
    sink = d.n_states if len(known) < len(symbols) else None
    lines = ["HOA: v1"]
    if name:
        lines.append(f'name: "{name}"')
    lines.append(f"States: {d.n_states + (sink is not None)}")
    lines.append(f"Start: {d.initial}")
    lines.append(f"AP: {len(aps)}" + "".join(f' "{p}"' for p in aps))
    k = len(d.pairs)
    lines.append(f"acc-name: Rabin {k}")
    if k:
        acc = " | ".join(f"(Fin({2 * i})&Inf({2 * i + 1}))" for i in range(k))
    else:
        acc = "f"
    lines.append(f"Acceptance: {2 * k} {acc}")
    lines.append("properties: trans-labels explicit-labels state-acc deterministic complete")
    lines.append("--BODY--")

    def label(s):
        lits = [str(j) if p in s else f"!{j}" for j, p in enumerate(aps)]
        return "&".join(lits) if lits else "t"

    for q in d.states:
        sets = []
        for i, (L, K) in enumerate(d.pairs):
            if q in L:
                sets.append(2 * i)
            if q in K:
                sets.append(2 * i + 1)
        acc_part = " {" + " ".join(map(str, sets)) + "}" if sets else ""
        lines.append(f"State: {q}{acc_part}")
        for s in symbols:
            lines.append(f"[{label(s)}] {d.delta[(q, s)] if s in known else sink}")
    if sink is not None:
        lines.append(f"State: {sink}")
        lines.append(f"[t] {sink}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


_TOK = re.compile(r'\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<int>\d+)|(?P<id>[A-Za-z_@][\w.-]*)|(?P<p>[\[\]{}()&|!:]))')


def _label_eval(expr, bits):
    """Evaluate an HOA label expression (``t``, ``f``, ints, ``! & |``, parens)."""
    toks = re.findall(r"\d+|[tf]|[!&|()]", expr)
    if "".join(toks) != re.sub(r"\s+", "", expr):
        raise ParseError(f"unsupported label expression [{expr}]")
    pos = 0

    def disj():
        nonlocal pos
        v = conj()
        while pos < len(toks) and toks[pos] == "|":
            pos += 1
            v = conj() or v
        return v

    def conj():
        nonlocal pos
        v = unary()
        while pos < len(toks) and toks[pos] == "&":
            pos += 1
            v = unary() and v
        return v

    def unary():
        nonlocal pos
        if pos >= len(toks):
            raise ParseError(f"truncated label expression [{expr}]")
        tok = toks[pos]
        pos += 1
        if tok == "!":
            return not unary()
        if tok == "(":
            v = disj()
            if pos >= len(toks) or toks[pos] != ")":
                raise ParseError(f"unbalanced label expression [{expr}]")
            pos += 1
            return v
        if tok == "t":
            return True
        if tok == "f":
            return False
        if tok.isdigit():
            i = int(tok)
            if i >= len(bits):
                raise ParseError(f"AP index {i} out of range in [{expr}]")
            return bits[i]
        raise ParseError(f"unexpected token {tok!r} in label [{expr}]")

    v = disj()
    if pos != len(toks):
        raise ParseError(f"trailing tokens in label [{expr}]")
    return v


def _parse_acceptance(text, n_sets):
    """Parse ``Fin(a)&Inf(b) | ...`` into a list of (fin set, inf set)."""
    body = re.sub(r"\s+", "", text)
    if body in ("f", ""):
        return []
    pairs = []
    for disjunct in body.split("|"):
        d = disjunct
        while d.startswith("(") and d.endswith(")"):
            d = d[1:-1]
        m = re.fullmatch(r"Fin\((\d+)\)&Inf\((\d+)\)", d)
        if m is None:
            m2 = re.fullmatch(r"Inf\((\d+)\)&Fin\((\d+)\)", d)
            if m2 is None:
                raise UnsupportedFeatureError(
                    f"Acceptance: condition {disjunct!r} is not a Rabin pair")
            pairs.append((int(m2.group(2)), int(m2.group(1))))
        else:
            pairs.append((int(m.group(1)), int(m.group(2))))
    for a, b in pairs:
        if a >= n_sets or b >= n_sets:
            raise ParseError("Acceptance: set index out of range")
    return pairs


def import_hoa(text):
    """Parse a deterministic, complete Rabin automaton in HOA v1 format."""
    header, sep, rest = text.partition("--BODY--")
    if not sep:
        raise ParseError("missing --BODY--")
    body, sep, _ = rest.partition("--END--")
    if not sep:
        raise ParseError("missing --END--")
    info = {}
    for lineno, raw in enumerate(header.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        m = re.match(r"([A-Za-z@][\w-]*):\s*(.*)$", line)
        if m is None:
            raise ParseError(f"malformed header line {line!r}", line=lineno)
        info.setdefault(m.group(1), []).append(m.group(2))
    if info.get("HOA", [None])[0] != "v1":
        raise UnsupportedFeatureError("HOA: only version v1 is supported")
    for key in ("States", "Start", "AP", "Acceptance"):
        if key not in info:
            raise ParseError(f"missing header {key}:")
    if len(info["Start"]) != 1 or not re.fullmatch(r"\d+", info["Start"][0].strip()):
        raise UnsupportedFeatureError("Start: exactly one initial state is required")
    acc_name = info.get("acc-name", [""])[0].split()
    if not acc_name or acc_name[0] != "Rabin":
        raise UnsupportedFeatureError(
            f"acc-name: {' '.join(acc_name) or '<missing>'} is not Rabin")
    n = int(info["States"][0])
    initial = int(info["Start"][0])
    ap_tokens = re.findall(r'"((?:[^"\\]|\\.)*)"', info["AP"][0])
    n_ap = int(info["AP"][0].split()[0])
    if len(ap_tokens) != n_ap:
        raise ParseError("AP: count does not match the listed names")
    acc_fields = info["Acceptance"][0].split(None, 1)
    n_sets = int(acc_fields[0])
    pairs_idx = _parse_acceptance(acc_fields[1] if len(acc_fields) > 1 else "", n_sets)
    if len(acc_name) > 1 and int(acc_name[1]) != len(pairs_idx):
        raise ParseError("acc-name: Rabin count differs from Acceptance:")
    for prop in info.get("properties", []):
        if "trans-acc" in prop.split():
            raise UnsupportedFeatureError("properties: trans-acc is not supported")

    aps = tuple(ap_tokens)
    alphabet = all_symbols(aps)
    bitsets = [tuple(p in s for p in aps) for s in alphabet]
    delta = {}
    state_sets = {}
    current = None
    for raw in body.splitlines():
        line = raw.strip()
        if not line:
            continue
        m = re.fullmatch(r'State:\s*(?:\[([^\]]*)\]\s*)?(\d+)(?:\s+"[^"]*")?\s*(?:\{([\d\s]*)\})?', line)
        if m:
            if m.group(1) is not None:
                raise UnsupportedFeatureError("State: state labels are not supported")
            current = int(m.group(2))
            if current >= n:
                raise ParseError(f"State: {current} out of range")
            state_sets[current] = {int(x) for x in (m.group(3) or "").split()}
            continue
        m = re.fullmatch(r"\[([^\]]*)\]\s*(\d+)\s*(\{[\d\s]*\})?", line)
        if m is None:
            if re.fullmatch(r"\d+(\s+\d+)*", line):
                raise UnsupportedFeatureError("implicit edge labels are not supported")
            raise ParseError(f"malformed edge line {line!r}")
        if current is None:
            raise ParseError("edge before any State:")
        if m.group(3):
            raise UnsupportedFeatureError("transition-based acceptance is not supported")
        target = int(m.group(2))
        if target >= n:
            raise ParseError(f"edge target {target} out of range")
        for s, bits in zip(alphabet, bitsets):
            if _label_eval(m.group(1), bits):
                if (current, s) in delta and delta[(current, s)] != target:
                    raise UnsupportedFeatureError(
                        "properties: automaton is not deterministic "
                        f"(state {current}, symbol {sorted(s)})")
                delta[(current, s)] = target
    for q in range(n):
        for s in alphabet:
            if (q, s) not in delta:
                raise UnsupportedFeatureError(
                    f"properties: automaton is not complete (state {q}, symbol {sorted(s)})")
    pairs = tuple(
        (frozenset(q for q in range(n) if fin in state_sets.get(q, ())),
         frozenset(q for q in range(n) if inf in state_sets.get(q, ())))
        for fin, inf in pairs_idx
    )
    return RabinAutomaton(n, aps, alphabet, delta, initial, pairs)
