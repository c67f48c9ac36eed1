"""Integral semantics of timed automata as finite automata over events + TICK.

An integer-timed word ``(a1,n1)(a2,n2)...`` is written as
``TICK^n1 a1 TICK^(n2-n1) a2 ...``.  Clock values are integers capped at
``cmax + 1``, which every constraint treats as "larger than any constant".
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from digitization.errors import DomainError, ResourceError
from digitization.timed_automata import TICK, TimedAutomaton, TimedWord, holds_all

DEFAULT_STATE_CAP = 10**6

TickWord = tuple  # tuple[str, ...]


@dataclass
class NFA:
    """Finite automaton over finite words, possibly nondeterministic."""

    alphabet: frozenset
    initial: frozenset
    accepting: frozenset
    delta: dict = field(default_factory=dict)  # (state, symbol) -> tuple of states
    states: list = field(default_factory=list)

    def step(self, current: Iterable[Hashable], symbol: str) -> frozenset:
        out = set()
        for s in current:
            out.update(self.delta.get((s, symbol), ()))
        return frozenset(out)

    def successors(self, state) -> list[tuple[str, Hashable]]:
        return [(a, t) for a in sorted(self.alphabet) for t in self.delta.get((state, a), ())]


@dataclass
class TickAutomaton(NFA):
    clocks: tuple = ()
    cmax: int = 0

    @staticmethod
    def location_of(state) -> str:
        return state[0]


def _capped(values, cap):
    return tuple(min(v, cap) for v in values)


def build_tick_automaton(A: TimedAutomaton, state_cap: int = DEFAULT_STATE_CAP) -> TickAutomaton:
    """Reachable part of the integral-time automaton of *A*."""
    clocks = A.clocks
    cmax = A.max_constant()
    cap = cmax + 1
    alphabet = frozenset(A.alphabet) | {TICK}

    def vals(v):
        return dict(zip(clocks, v))

    start = (A.initial, tuple(0 for _ in clocks))
    initial = frozenset([start]) if holds_all(A.invariant(A.initial), vals(start[1])) else frozenset()
    states = list(initial)
    seen = set(initial)
    delta: dict = {}
    queue = deque(initial)
    while queue:
        state = queue.popleft()
        loc, v = state
        succ = []
        ticked = _capped((x + 1 for x in v), cap)
        if holds_all(A.invariant(loc), vals(ticked)):
            succ.append((TICK, (loc, ticked)))
        for e in A.outgoing(loc):
            if not holds_all(e.guard, vals(v)):
                continue
            nv = tuple(0 if x in e.resets else val for x, val in zip(clocks, v))
            if holds_all(A.invariant(e.target), vals(nv)):
                succ.append((e.action, (e.target, nv)))
        for symbol, nxt in succ:
            targets = delta.setdefault((state, symbol), [])
            if nxt not in targets:
                targets.append(nxt)
            if nxt not in seen:
                if len(seen) >= state_cap:
                    raise ResourceError("tick automaton construction", state_cap)
                seen.add(nxt)
                states.append(nxt)
                queue.append(nxt)
    accepting = frozenset(s for s in states if s[0] in A.accepting)
    return TickAutomaton(
        alphabet,
        initial,
        accepting,
        {k: tuple(v) for k, v in delta.items()},
        states,
        clocks,
        cmax,
    )


def encode_integer_word(w) -> TickWord:
    """Unary TICK encoding of an integer-timed word of ``(action, time)`` pairs."""
    out = []
    now = 0
    for action, t in w:
        t = Fraction(t)
        if t.denominator != 1:
            raise DomainError(f"integer timestamps required, got {t}")
        if t < now:
            raise DomainError("timestamps must be weakly monotone")
        out.extend([TICK] * int(t - now))
        out.append(action)
        now = int(t)
    return tuple(out)


def decode_tick_word(u: Sequence[str]) -> TimedWord:
    """Inverse of :func:`encode_integer_word`; trailing TICKs carry no event and are dropped."""
    now = 0
    pairs = []
    for symbol in u:
        if symbol == TICK:
            now += 1
        else:
            pairs.append((symbol, Fraction(now)))
    return TimedWord(tuple(pairs))


def nfa_accepts(N: NFA, u: Sequence[str]) -> bool:
    current = N.initial
    for symbol in u:
        if symbol not in N.alphabet:
            raise DomainError(f"symbol {symbol!r} is not in the automaton's alphabet")
        current = N.step(current, symbol)
        if not current:
            return False
    return bool(current & N.accepting)


def emptiness(N: NFA) -> TickWord | None:
    """None if L(N) is empty, otherwise a shortest accepted word."""
    parent = {s: None for s in N.initial}
    queue = deque(sorted(N.initial, key=repr))
    while queue:
        s = queue.popleft()
        if s in N.accepting:
            word = []
            while parent[s] is not None:
                s, symbol = parent[s]
                word.append(symbol)
            return tuple(reversed(word))
        for symbol, t in N.successors(s):
            if t not in parent:
                parent[t] = (s, symbol)
                queue.append(t)
    return None


def language_inclusion(N1: NFA, N2: NFA, state_cap: int = DEFAULT_STATE_CAP) -> TickWord | None:
    """None if L(N1) is a subset of L(N2), otherwise a shortest word in L(N1) minus L(N2).

    Explores the product of N1 with the on-the-fly subset construction of N2.
    """
    alphabet = sorted(N1.alphabet | N2.alphabet)
    start2 = frozenset(N2.initial)
    subsets = {start2}
    parent = {}
    queue = deque()
    for q in sorted(N1.initial, key=repr):
        node = (q, start2)
        if node not in parent:
            parent[node] = None
            queue.append(node)
    while queue:
        node = queue.popleft()
        q, S = node
        if q in N1.accepting and not (S & N2.accepting):
            word = []
            while parent[node] is not None:
                node, symbol = parent[node]
                word.append(symbol)
            return tuple(reversed(word))
        for symbol in alphabet:
            S2 = N2.step(S, symbol)
            if S2 not in subsets:
                if len(subsets) >= state_cap:
                    raise ResourceError("subset construction", state_cap)
                subsets.add(S2)
            for q2 in N1.delta.get((q, symbol), ()):
                nxt = (q2, S2)
                if nxt not in parent:
                    parent[nxt] = (node, symbol)
                    queue.append(nxt)
    return None


def accepted_words(N: NFA, bound: int) -> list[TickWord]:
    """Every accepted word of length at most *bound*, shortest first then lexicographic."""
    alphabet = sorted(N.alphabet)
    out = []
    layer = [((), frozenset(N.initial))]
    for depth in range(bound + 1):
        nxt = []
        for word, current in layer:
            if current & N.accepting:
                out.append(word)
            if depth == bound:
                continue
            for symbol in alphabet:
                S = N.step(current, symbol)
                if S:
                    nxt.append((word + (symbol,), S))
        layer = nxt
    return out


def reachable_locations_tick(A: TimedAutomaton, state_cap: int = DEFAULT_STATE_CAP) -> set[str]:
    N = build_tick_automaton(A, state_cap)
    return {s[0] for s in N.states}


def _node_label(state) -> str:
    loc, v = state
    return f"{loc}|{','.join(map(str, v))}"


def export_dot(N: TickAutomaton) -> str:
    """Graphviz rendering with deterministic node order (construction order)."""
    ids = {s: f"n{i}" for i, s in enumerate(N.states)}
    lines = ["digraph tick {", "  rankdir=LR;"]
    for s in N.states:
        shape = "doublecircle" if s in N.accepting else "circle"
        lines.append(f'  {ids[s]} [label="{_node_label(s)}", shape={shape}];')
    for s in N.initial:
        lines.append(f"  start [shape=point];")
        lines.append(f"  start -> {ids[s]};")
    for s in N.states:
        for symbol, t in N.successors(s):
            label = "✓" if symbol == TICK else symbol
            lines.append(f'  {ids[s]} -> {ids[t]} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
