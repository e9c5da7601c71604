"""Compilation of regex trees into trimmed, total DFAs and language analyses."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import regex as rx
from .errors import AlphabetMismatch, EnumerationOverflow

Word = tuple[str, ...]


@dataclass(frozen=True)
class LanguageProfile:
    """Shape of a DFA's language, used to pick the right algorithm."""

    is_empty: bool
    is_finite: bool
    max_word_length: Optional[int]  # None when empty or infinite
    short2: bool


class Dfa:
    """Deterministic automaton with a total transition function.

    State 0 is always the dead (absorbing, non-accepting) state.  ``useful``
    holds the states both reachable from the start and co-reachable to an
    accepting state; the dead state is never useful.
    """

    def __init__(
        self,
        states: Iterable[int],
        alphabet: Iterable[str],
        transition: dict[tuple[int, str], int],
        start: int,
        accepting: Iterable[int],
    ):
        self.states = frozenset(states)
        self.alphabet = frozenset(alphabet)
        self.transition = dict(transition)
        self.start = start
        self.accepting = frozenset(accepting)
        self.useful = self._useful_states()

    def step(self, state: int, symbol: str) -> int:
        return self.transition.get((state, symbol), 0)

    def run(self, word: Sequence[str]) -> int:
        state = self.start
        for symbol in word:
            state = self.step(state, symbol)
        return state

    def _useful_states(self) -> frozenset[int]:
        reachable = {self.start}
        frontier = deque((self.start,))
        while frontier:
            q = frontier.popleft()
            for a in self.alphabet:
                nxt = self.step(q, a)
                if nxt not in reachable:
                    reachable.add(nxt)
                    frontier.append(nxt)
        predecessors: dict[int, set[int]] = {q: set() for q in self.states}
        for (q, _a), nxt in self.transition.items():
            predecessors.setdefault(nxt, set()).add(q)
        co_reachable = set(self.accepting)
        frontier = deque(self.accepting)
        while frontier:
            q = frontier.popleft()
            for p in predecessors.get(q, ()):
                if p not in co_reachable:
                    co_reachable.add(p)
                    frontier.append(p)
        return frozenset((reachable & co_reachable) - {0})


def accepts(d: Dfa, word: Sequence[str]) -> bool:
    """True iff the word is in the automaton's language."""
    return d.run(word) in d.accepting


# --- Thompson construction -------------------------------------------------

class _Nfa:
    """Fragment automaton with epsilon moves; built once per compile call."""

    def __init__(self):
        self.count = 0
        self.eps: dict[int, set[int]] = {}
        self.moves: dict[tuple[int, str], set[int]] = {}

    def new_state(self) -> int:
        self.count += 1
        return self.count - 1

    def add_eps(self, a: int, b: int) -> None:
        self.eps.setdefault(a, set()).add(b)

    def add_move(self, a: int, symbol: str, b: int) -> None:
        self.moves.setdefault((a, symbol), set()).add(b)


def _build(nfa: _Nfa, ast: rx.RegexAst, alphabet: frozenset[str]) -> tuple[int, int]:
    """Return (entry, exit) states of the fragment for ast."""
    if isinstance(ast, rx.EmptyLanguage):
        return nfa.new_state(), nfa.new_state()
    if isinstance(ast, rx.Epsilon):
        s = nfa.new_state()
        t = nfa.new_state()
        nfa.add_eps(s, t)
        return s, t
    if isinstance(ast, rx.Symbol):
        if ast.label not in alphabet:
            raise AlphabetMismatch(f"symbol {ast.label!r} not in alphabet")
        s = nfa.new_state()
        t = nfa.new_state()
        nfa.add_move(s, ast.label, t)
        return s, t
    if isinstance(ast, rx.AnySymbol):
        s = nfa.new_state()
        t = nfa.new_state()
        for a in alphabet:
            nfa.add_move(s, a, t)
        return s, t
    if isinstance(ast, rx.Union):
        s = nfa.new_state()
        t = nfa.new_state()
        for side in (ast.left, ast.right):
            fs, ft = _build(nfa, side, alphabet)
            nfa.add_eps(s, fs)
            nfa.add_eps(ft, t)
        return s, t
    if isinstance(ast, rx.Concat):
        ls, lt = _build(nfa, ast.left, alphabet)
        rs, rt = _build(nfa, ast.right, alphabet)
        nfa.add_eps(lt, rs)
        return ls, rt
    if isinstance(ast, rx.Star):
        s = nfa.new_state()
        t = nfa.new_state()
        fs, ft = _build(nfa, ast.inner, alphabet)
        nfa.add_eps(s, fs)
        nfa.add_eps(ft, t)
        nfa.add_eps(s, t)
        nfa.add_eps(ft, fs)
        return s, t
    raise TypeError(f"unknown ast node {ast!r}")


def _eps_closure(nfa: _Nfa, states: frozenset[int]) -> frozenset[int]:
    closure = set(states)
    stack = list(states)
    while stack:
        q = stack.pop()
        for nxt in nfa.eps.get(q, ()):
            if nxt not in closure:
                closure.add(nxt)
                stack.append(nxt)
    return frozenset(closure)


def compile(ast: rx.RegexAst, alphabet: Iterable[str]) -> Dfa:
    """Compile a regex tree into a trimmed total DFA over the given alphabet."""
    sigma = frozenset(alphabet)
    if not sigma:
        raise AlphabetMismatch("alphabet must be nonempty")
    nfa = _Nfa()
    entry, exit_ = _build(nfa, ast, sigma)

    start_set = _eps_closure(nfa, frozenset((entry,)))
    numbering: dict[frozenset[int], int] = {frozenset(): 0}
    transition: dict[tuple[int, str], int] = {}
    accepting: set[int] = set()

    def number_of(s: frozenset[int]) -> int:
        if s not in numbering:
            numbering[s] = len(numbering)
        return numbering[s]

    start = number_of(start_set)
    worklist = deque((start_set,))
    done = {frozenset(), start_set}
    if exit_ in start_set:
        accepting.add(start)
    while worklist:
        current = worklist.popleft()
        cid = number_of(current)
        for a in sigma:
            target = set()
            for q in current:
                target.update(nfa.moves.get((q, a), ()))
            target_set = _eps_closure(nfa, frozenset(target))
            tid = number_of(target_set)
            transition[(cid, a)] = tid
            if exit_ in target_set:
                accepting.add(tid)
            if target_set not in done:
                done.add(target_set)
                worklist.append(target_set)
    # total via the implicit dead state 0 (step() defaults to it)
    for a in sigma:
        transition.setdefault((0, a), 0)
    return Dfa(range(len(numbering)), sigma, transition, start, accepting)


# --- language analyses -----------------------------------------------------

def language_profile(d: Dfa) -> LanguageProfile:
    """Finiteness and word-length analysis over the useful subautomaton."""
    if d.start not in d.useful:
        # start itself accepting covers the {epsilon} language, where the
        # start is useful; otherwise no accepting state is reachable.
        if d.start in d.accepting:
            return LanguageProfile(False, True, 0, True)
        return LanguageProfile(True, False, None, False)
    edges = {
        q: {d.step(q, a) for a in d.alphabet if d.step(q, a) in d.useful}
        for q in d.useful
    }
    order, cyclic = _topological_order(edges)
    if cyclic:
        return LanguageProfile(False, False, None, False)
    longest = {q: 0 if q in d.accepting else None for q in d.useful}
    for q in reversed(order):
        for nxt in edges[q]:
            if longest[nxt] is not None:
                candidate = longest[nxt] + 1
                if longest[q] is None or candidate > longest[q]:
                    longest[q] = candidate
    max_len = longest[d.start]
    assert max_len is not None
    return LanguageProfile(False, True, max_len, max_len <= 2)


def _topological_order(edges: dict[int, set[int]]) -> tuple[list[int], bool]:
    """Topological order of the useful-state graph; flags cycle presence."""
    order: list[int] = []
    color: dict[int, int] = {}

    def visit(root: int) -> bool:
        stack = [(root, iter(sorted(edges[root])))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                c = color.get(nxt)
                if c == 1:
                    return True
                if c is None:
                    color[nxt] = 1
                    stack.append((nxt, iter(sorted(edges[nxt]))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                order.append(node)
                stack.pop()
        return False

    for q in sorted(edges):
        if q not in color:
            if visit(q):
                return [], True
    order.reverse()
    return order, False


def words_up_to(d: Dfa, n: int, cap: int = 100_000) -> set[Word]:
    """Exactly the accepted words of length at most n."""
    found: set[Word] = set()
    frontier: list[tuple[int, Word]] = [(d.start, ())]
    if d.start in d.accepting:
        found.add(())
    for _length in range(n):
        nxt: list[tuple[int, Word]] = []
        seen: set[tuple[int, Word]] = set()
        for state, word in frontier:
            for a in sorted(d.alphabet):
                target = d.step(state, a)
                if target not in d.useful and target not in d.accepting:
                    continue
                item = (target, word + (a,))
                if item in seen:
                    continue
                seen.add(item)
                if target in d.accepting:
                    found.add(item[1])
                    if len(found) > cap:
                        raise EnumerationOverflow(f"more than {cap} words")
                nxt.append(item)
        frontier = nxt
    return found
