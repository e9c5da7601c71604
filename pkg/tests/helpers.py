"""Independent oracles used to pin expected values.

Everything here recomputes results from first principles (direct language
semantics, path enumeration, subset enumeration, the textbook subset-form
Shapley sum) so the tests never trust the code paths they check.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from pathshap import regex as rx
from pathshap.graph import Edge, LabeledGraph


def ast_matches(ast, word: tuple[str, ...], alphabet: frozenset[str]) -> bool:
    """Direct recursive language semantics of a regex tree."""
    if isinstance(ast, rx.EmptyLanguage):
        return False
    if isinstance(ast, rx.Epsilon):
        return word == ()
    if isinstance(ast, rx.Symbol):
        return word == (ast.label,)
    if isinstance(ast, rx.AnySymbol):
        return len(word) == 1 and word[0] in alphabet
    if isinstance(ast, rx.Union):
        return ast_matches(ast.left, word, alphabet) or ast_matches(ast.right, word, alphabet)
    if isinstance(ast, rx.Concat):
        return any(
            ast_matches(ast.left, word[:i], alphabet)
            and ast_matches(ast.right, word[i:], alphabet)
            for i in range(len(word) + 1)
        )
    if isinstance(ast, rx.Star):
        if word == ():
            return True
        return any(
            ast_matches(ast.inner, word[:i], alphabet)
            and ast_matches(ast, word[i:], alphabet)
            for i in range(1, len(word) + 1)
        )
    raise TypeError(ast)


def all_words(alphabet, max_len: int):
    for length in range(max_len + 1):
        yield from itertools.product(sorted(alphabet), repeat=length)


def random_ast(rng: random.Random, alphabet, depth: int = 3):
    choices = ["symbol", "symbol", "epsilon", "any"]
    if depth > 0:
        choices += ["union", "concat", "concat", "star"]
    kind = rng.choice(choices)
    if kind == "symbol":
        return rx.Symbol(rng.choice(sorted(alphabet)))
    if kind == "epsilon":
        return rx.Epsilon()
    if kind == "any":
        return rx.AnySymbol()
    if kind == "union":
        return rx.Union(random_ast(rng, alphabet, depth - 1), random_ast(rng, alphabet, depth - 1))
    if kind == "concat":
        return rx.Concat(random_ast(rng, alphabet, depth - 1), random_ast(rng, alphabet, depth - 1))
    return rx.Star(random_ast(rng, alphabet, depth - 1))


def words_of_paths(g: LabeledGraph, s: str, t: str, max_len: int):
    """Label words of all s-to-t walks of bounded length, by frontier iteration."""
    words = set()
    frontier = {(s, ())}
    if s == t:
        words.add(())
    for _ in range(max_len):
        nxt = set()
        for v, w in frontier:
            for e in g.out_edges(v):
                item = (e.target, w + (e.label,))
                nxt.add(item)
                if e.target == t:
                    words.add(item[1])
        frontier = nxt
    return words


def path_oracle_eval(g: LabeledGraph, s: str, t: str, dfa, ast=None, alphabet=None) -> bool:
    """Bounded walk enumeration checked against direct word acceptance."""
    bound = len(g.vertices) * len(dfa.states)
    bound = min(bound, 12)  # keeps the enumeration feasible on dense graphs
    for word in words_of_paths(g, s, t, bound):
        if ast is not None:
            if ast_matches(ast, word, alphabet):
                return True
        elif dfa.run(word) in dfa.accepting:
            return True
    return False


def short_match_present(g: LabeledGraph, s: str, t: str, words) -> bool:
    """Is there an s-to-t walk of length one or two matching one of the words?
    A self-loop may be traversed twice."""
    wordset = set(words)
    for e1 in g.out_edges(s):
        if e1.target == t and (e1.label,) in wordset:
            return True
        for e2 in g.out_edges(e1.target):
            if e2.target == t and (e1.label, e2.label) in wordset:
                return True
    return False


def brute_enabling_count(g: LabeledGraph, s: str, t: str, words, k: int) -> int:
    """Enumerate every size-k endogenous subset and test it directly."""
    endo = sorted(g.endo_edges)
    count = 0
    for combo in itertools.combinations(endo, k):
        keep = set(combo) | g.exo_edges
        sub = LabeledGraph(
            g.vertices,
            (e for e in g.edges if e.id in keep),
            set(combo),
            g.endo_vertices,
        )
        if short_match_present(sub, s, t, words):
            count += 1
    return count


def brute_shapley(players, valuation) -> dict[str, Fraction]:
    """Textbook subset-form Shapley sum over an explicit valuation."""
    players = list(players)
    n = len(players)
    values = {}
    for a in players:
        others = [p for p in players if p != a]
        total = Fraction(0)
        for size in range(n):
            for combo in itertools.combinations(others, size):
                b = frozenset(combo)
                weight = Fraction(
                    math.factorial(size) * math.factorial(n - size - 1),
                    math.factorial(n),
                )
                total += weight * (valuation(b | {a}) - valuation(b))
        values[a] = total
    return values


def random_monotone_game(rng: random.Random, players):
    """Random monotone 0/1 valuation given by random minimal winning sets."""
    players = list(players)
    n_sets = rng.randint(0, 4)
    winners = [
        frozenset(rng.sample(players, rng.randint(1, len(players))))
        for _ in range(n_sets)
    ]

    def valuation(coalition: frozenset[str]) -> int:
        return 1 if any(w <= coalition for w in winners) else 0

    return valuation


def random_labeled_graph(
    rng: random.Random,
    n_vertices: int,
    n_edges: int,
    labels=("a", "b"),
    exo_prob: float = 0.25,
    allow_self_loops: bool = False,
) -> LabeledGraph:
    vertices = [f"u{i}" for i in range(n_vertices)]
    pairs = [
        (x, y)
        for x in vertices
        for y in vertices
        if allow_self_loops or x != y
    ]
    rng.shuffle(pairs)
    chosen = pairs[: min(n_edges, len(pairs))]
    edges = []
    endo = set()
    for src, dst in chosen:
        eid = f"{src}->{dst}"
        edges.append(Edge(eid, src, rng.choice(labels), dst))
        if rng.random() >= exo_prob:
            endo.add(eid)
    return LabeledGraph(vertices, edges, endo, vertices)
