"""RPQ and CRPQ evaluation over labeled graphs.

Atom evaluation is breadth-first reachability over the product of the graph
and the atom's DFA.  A pair (u, u) answers an atom whose language contains
the empty word via the empty path; this convention is isolated behind
``EPSILON_SELF_ANSWER`` so it can be flipped in one place.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from . import automata, regex as rx
from .automata import Dfa, LanguageProfile
from .errors import EnumerationOverflow, QuerySyntaxError, UnknownVertex
from .graph import LabeledGraph

# Whether (u, u) is an answer of an epsilon-accepting atom via the empty path.
EPSILON_SELF_ANSWER = True


@dataclass(frozen=True)
class RpqAtom:
    source_var: str
    dfa: Dfa
    target_var: str
    profile: LanguageProfile
    text: str = ""


@dataclass(frozen=True)
class Crpq:
    variables: tuple[str, ...]
    atoms: tuple[RpqAtom, ...]


@dataclass(frozen=True)
class Assignment:
    binding: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, var: str) -> str:
        return self.binding[var]


def parse_crpq_text(text: str) -> list[tuple[str, str, str]]:
    """Split '(x, a*, y) & (y, b c, z)' into (source_var, regex, target_var) triples."""
    atoms = []
    for chunk in _split_atoms(text):
        chunk = chunk.strip()
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise QuerySyntaxError(f"atom must be parenthesized: {chunk!r}")
        body = chunk[1:-1]
        first = body.find(",")
        last = body.rfind(",")
        if first < 0 or first == last:
            raise QuerySyntaxError(f"atom needs two commas: {chunk!r}")
        src = body[:first].strip()
        expr = body[first + 1:last].strip()
        dst = body[last + 1:].strip()
        if not src.isidentifier() or not dst.isidentifier():
            raise QuerySyntaxError(f"bad variable name in atom {chunk!r}")
        if not expr:
            raise QuerySyntaxError(f"empty expression in atom {chunk!r}")
        atoms.append((src, expr, dst))
    if not atoms:
        raise QuerySyntaxError("query must have at least one atom")
    return atoms


def _split_atoms(text: str) -> list[str]:
    parts = []
    depth = 0
    current = []
    for c in text:
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
            if depth < 0:
                raise QuerySyntaxError("unbalanced parentheses in query")
        if c == "&" and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(c)
    if depth != 0:
        raise QuerySyntaxError("unbalanced parentheses in query")
    last = "".join(current)
    if last.strip() or not parts:
        parts.append(last)
    return parts


def compile_crpq(text: str, graph_alphabet: Iterable[str]) -> Crpq:
    """Parse and compile a query; the alphabet is the union of the graph's
    labels and the labels mentioned by the query."""
    triples = parse_crpq_text(text)
    asts = [(src, rx.parse_regex(expr), expr, dst) for src, expr, dst in triples]
    alphabet = frozenset(graph_alphabet)
    for _, ast, _, _ in asts:
        alphabet |= rx.symbols_of(ast)
    if not alphabet:
        # no labels anywhere: wildcard-free queries still need a symbol space
        alphabet = frozenset(("_",))
    variables: list[str] = []
    atoms: list[RpqAtom] = []
    for src, ast, expr, dst in asts:
        for var in (src, dst):
            if var not in variables:
                variables.append(var)
        dfa = automata.compile(ast, alphabet)
        atoms.append(RpqAtom(src, dfa, dst, automata.language_profile(dfa), expr))
    return Crpq(tuple(variables), tuple(atoms))


def parse_binding(text: str, q: Crpq) -> Assignment:
    """Parse 'x=v1,y=v2' and check it is total on the query's variables."""
    binding: dict[str, str] = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise QuerySyntaxError(f"binding piece {piece!r} is not var=vertex")
        var, _, vertex = piece.partition("=")
        var, vertex = var.strip(), vertex.strip()
        if var in binding:
            raise QuerySyntaxError(f"variable {var} bound twice")
        binding[var] = vertex
    missing = set(q.variables) - set(binding)
    if missing:
        raise QuerySyntaxError(f"unbound variables: {sorted(missing)}")
    return Assignment(binding)


# --- evaluation ------------------------------------------------------------

def _product_reach(
    g: LabeledGraph,
    s: str,
    d: Dfa,
    edge_ok: Optional[Callable[[str], bool]] = None,
) -> set[tuple[str, int]]:
    """All (vertex, state) pairs reachable from (s, start) in the product."""
    start = (s, d.start)
    seen = {start}
    frontier = deque((start,))
    while frontier:
        v, q = frontier.popleft()
        for e in g.out_edges(v):
            if edge_ok is not None and not edge_ok(e.id):
                continue
            nxt = (e.target, d.step(q, e.label))
            if nxt[1] in d.useful or nxt[1] in d.accepting:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
    return seen


def eval_rpq(
    g: LabeledGraph,
    s: str,
    t: str,
    d: Dfa,
    edge_ok: Optional[Callable[[str], bool]] = None,
) -> bool:
    """True iff some path from s to t (possibly empty) matches the automaton."""
    for v in (s, t):
        if v not in g.vertices:
            raise UnknownVertex(v)
    if EPSILON_SELF_ANSWER and s == t and d.start in d.accepting:
        return True
    for v, q in _product_reach(g, s, d, edge_ok):
        if v == t and q in d.accepting:
            return True
    return False


def eval_crpq_bound(
    g: LabeledGraph,
    q: Crpq,
    mu: Assignment,
    edge_ok: Optional[Callable[[str], bool]] = None,
) -> bool:
    """A fully bound conjunction decomposes atom-wise."""
    return all(
        eval_rpq(g, mu[a.source_var], mu[a.target_var], a.dfa, edge_ok)
        for a in q.atoms
    )


def atom_relation(g: LabeledGraph, d: Dfa) -> set[tuple[str, str]]:
    """All (s, t) pairs the atom connects; one product sweep per source."""
    pairs: set[tuple[str, str]] = set()
    for s in g.vertices:
        if EPSILON_SELF_ANSWER and d.start in d.accepting:
            pairs.add((s, s))
        for v, q in _product_reach(g, s, d):
            if q in d.accepting:
                pairs.add((s, v))
    return pairs


def enumerate_answers(g: LabeledGraph, q: Crpq, cap: int = 100_000) -> list[tuple[str, ...]]:
    """All satisfying assignments as tuples in the query's variable order,
    sorted lexicographically."""
    relations = [
        (atom.source_var, atom.target_var, atom_relation(g, atom.dfa))
        for atom in q.atoms
    ]
    relations.sort(key=lambda item: len(item[2]))
    partial: list[dict[str, str]] = [{}]
    for src, dst, rel in relations:
        grown: list[dict[str, str]] = []
        for row in partial:
            for s, t in rel:
                if src in row and row[src] != s:
                    continue
                if dst in row and row[dst] != t:
                    continue
                if src == dst and s != t:
                    continue
                nxt = dict(row)
                nxt[src] = s
                nxt[dst] = t
                grown.append(nxt)
                if len(grown) > cap:
                    raise EnumerationOverflow(f"more than {cap} intermediate rows")
        partial = grown
    answers = sorted({tuple(row[v] for v in q.variables) for row in partial})
    if len(answers) > cap:
        raise EnumerationOverflow(f"more than {cap} answers")
    return answers
