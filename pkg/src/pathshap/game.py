"""Generic Shapley machinery over monotone 0/1 coalition games.

Coalitions are frozensets of player ids on the public surface and bitmasks
internally.  Valuations are memoized per game (bounded LRU), since
permutation prefixes repeat heavily.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence, Union

from .errors import EnumerationOverflow

SUBSET_CAP = 22
PERMUTATION_CAP = 9
VALUATION_CACHE_SIZE = 1 << 20


class CoalitionGame:
    """Ordered players plus a 0/1 valuation over coalitions.

    The valuation must satisfy v(empty) == 0 (baseline shifts belong to the
    instantiating code) and is assumed monotone.
    """

    def __init__(self, players: Sequence[str], valuation: Callable[[frozenset[str]], int]):
        self.players = tuple(players)
        self.valuation = valuation
        self._index = {p: i for i, p in enumerate(self.players)}
        self._cache: dict[int, int] = {}

    def value_of_mask(self, mask: int) -> int:
        cached = self._cache.get(mask)
        if cached is not None:
            return cached
        coalition = frozenset(
            p for i, p in enumerate(self.players) if mask & (1 << i)
        )
        value = 1 if self.valuation(coalition) else 0
        if len(self._cache) >= VALUATION_CACHE_SIZE:
            self._cache.clear()
        self._cache[mask] = value
        return value

    def value(self, coalition: Iterable[str]) -> int:
        mask = 0
        for p in coalition:
            mask |= 1 << self._index[p]
        return self.value_of_mask(mask)

    def player_bit(self, player: str) -> int:
        return 1 << self._index[player]


@dataclass(frozen=True)
class SampledEstimate:
    """Monte-Carlo success ratio with its (eps, delta) contract."""

    successes: int
    samples: int
    eps: float
    delta: float
    seed: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.successes, self.samples)


@dataclass(frozen=True)
class ShapleyReport:
    method: str  # exact-subset | exact-permutation | exact-poly | mc-additive | mc-multiplicative
    values: dict[str, Union[Fraction, SampledEstimate]]
    flags: tuple[str, ...] = ()


def sample_count(eps: float, delta: float) -> int:
    """Hoeffding trial count for an additive (eps, delta) guarantee."""
    return math.ceil(math.log(2.0 / delta) / (2.0 * eps * eps))


def shapley_exact_subset(g: CoalitionGame, a: str, cap: int = SUBSET_CAP) -> Fraction:
    """Subset-form exact value with big-integer factorial weights."""
    n = len(g.players)
    if n > cap:
        raise EnumerationOverflow(f"{n} players exceeds subset enumeration cap {cap}")
    bit = g.player_bit(a)
    others = [1 << i for i, p in enumerate(g.players) if p != a]
    total = Fraction(0)
    fact = [math.factorial(i) for i in range(n + 1)]
    for size in range(n):
        weight = Fraction(fact[size] * fact[n - size - 1], fact[n])
        for combo in itertools.combinations(others, size):
            mask = 0
            for b in combo:
                mask |= b
            marginal = g.value_of_mask(mask | bit) - g.value_of_mask(mask)
            if marginal:
                total += weight * marginal
    return total


def shapley_exact_subset_all(g: CoalitionGame, cap: int = SUBSET_CAP) -> dict[str, Fraction]:
    """Subset-form values for every player in one sweep over all coalitions."""
    n = len(g.players)
    if n > cap:
        raise EnumerationOverflow(f"{n} players exceeds subset enumeration cap {cap}")
    fact = [math.factorial(i) for i in range(n + 1)]
    totals = {p: Fraction(0) for p in g.players}
    for mask in range(1 << n):
        size = mask.bit_count()
        if size == n:
            continue
        weight = Fraction(fact[size] * fact[n - size - 1], fact[n])
        base = g.value_of_mask(mask)
        for i, p in enumerate(g.players):
            bit = 1 << i
            if mask & bit:
                continue
            marginal = g.value_of_mask(mask | bit) - base
            if marginal:
                totals[p] += weight * marginal
    return totals


def shapley_exact_permutation(g: CoalitionGame, a: str, cap: int = PERMUTATION_CAP) -> Fraction:
    """Permutation-form exact value (enumeration oracle role)."""
    return shapley_exact_permutation_all(g, cap)[a]


def shapley_exact_permutation_all(g: CoalitionGame, cap: int = PERMUTATION_CAP) -> dict[str, Fraction]:
    n = len(g.players)
    if n > cap:
        raise EnumerationOverflow(f"{n} players exceeds permutation enumeration cap {cap}")
    counts = {p: 0 for p in g.players}
    bits = [1 << i for i in range(n)]
    for perm in itertools.permutations(range(n)):
        mask = 0
        previous = 0
        for i in perm:
            mask |= bits[i]
            current = g.value_of_mask(mask)
            if current != previous:
                counts[g.players[i]] += current - previous
            previous = current
    total_perms = math.factorial(n)
    return {p: Fraction(c, total_perms) for p, c in counts.items()}


def _trial_rng(seed: int, player: str, trial: int) -> random.Random:
    # string seeding hashes via sha512 in CPython: stable across runs/platforms
    return random.Random(f"{seed}:{player}:{trial}")


def _fisher_yates(rng: random.Random, items: list) -> None:
    for i in range(len(items) - 1, 0, -1):
        j = rng.randrange(i + 1)
        items[i], items[j] = items[j], items[i]


def shapley_mc(
    g: CoalitionGame,
    a: str,
    eps: float,
    delta: float,
    seed: int,
) -> SampledEstimate:
    """Additive Monte-Carlo estimate over Hoeffding-many permutation trials.

    Each trial draws an independent uniform permutation from its own
    deterministic substream, takes the prefix before the player as the
    coalition, and scores whether the player's marginal contribution is 1.
    """
    if not (0 < eps < 1 and 0 < delta < 1):
        raise ValueError("eps and delta must lie in (0, 1)")
    n = sample_count(eps, delta)
    bit = g.player_bit(a)
    successes = 0
    order_template = [1 << i for i in range(len(g.players))]
    for trial in range(n):
        order = list(order_template)
        _fisher_yates(_trial_rng(seed, a, trial), order)
        mask = 0
        for b in order:
            if b == bit:
                break
            mask |= b
        if g.value_of_mask(mask | bit) - g.value_of_mask(mask) == 1:
            successes += 1
    return SampledEstimate(successes, n, eps, delta, seed)


def shapley_nonzero(
    g: CoalitionGame,
    a: str,
    supports: Iterator[frozenset[str]],
) -> bool:
    """Positivity via minimal-winning-coalition witnesses.

    The supplied enumerator must cover every minimal winning coalition; for a
    monotone game the value is positive iff the player lies in one of them.
    """
    for s in supports:
        if a not in s:
            continue
        if g.value(s) == 1 and g.value(s - {a}) == 0:
            return True
    return False
