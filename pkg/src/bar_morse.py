"""
Trivial-coefficient bar complex, its Morse matching, and path-weight transfers.

Bar vertices are tuples of reduced nonempty words; Anick chains are tuples of
generator indices. Positions reported in MorseClass are 1-based, as are merge positions
in the bar differential sign (-1)^i.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Set, Tuple

from sympy import QQ

from src.exact_linalg import Rational, StructuralError, to_rational
from src.rewrite_core import (
    FamilySpec,
    LinComb,
    Word,
    accumulate,
    derive_word,
    is_obstruction,
    word_normal_form,
)

logger = logging.getLogger(__name__)

BarVertex = Tuple[Word, ...]
AnickChain = Tuple[int, ...]
Terms = Dict[BarVertex, Rational]


class MorseCycleError(StructuralError):
    """The matched graph contains a directed cycle."""


class MorseKind(str, Enum):
    CRITICAL = "critical"
    MERGED_END = "merged_end"
    SPLIT_END = "split_end"


@dataclass(frozen=True)
class MorseClass:
    kind: MorseKind
    position: Optional[int] = None

    @property
    def is_critical(self) -> bool:
        return self.kind is MorseKind.CRITICAL


CRITICAL = MorseClass(MorseKind.CRITICAL)


# --- chains ---------------------------------------------------------------------------


def chain_predicate(f: FamilySpec, t: AnickChain) -> bool:
    if not t or any(i < 0 for i in t):
        return False
    return all(is_obstruction(f, t[j], t[j + 1]) for j in range(len(t) - 1))


def explicit_chain_form(f: FamilySpec, t: AnickChain) -> bool:
    """Closed description of chains: U3 corollary form, U2 form p_1..p_{n-1} >= 1."""
    if not t or any(i < 0 for i in t):
        return False
    n = len(t)
    if f.name == "U3":
        if n == 1:
            return True
        if any(i < 2 for i in t[: n - 2]):
            return False
        return t[n - 2] >= 2 or (t[n - 2], t[n - 1]) == (1, 0)
    if f.name == "U2":
        return all(i >= 1 for i in t[:-1])
    raise ValueError(f"no explicit chain form for family {f.name}")


@lru_cache(maxsize=None)
def enumerate_chains(f: FamilySpec, n: int, d: int) -> Tuple[AnickChain, ...]:
    if n < 1:
        raise ValueError("chain length must be at least 1")
    if d < 0:
        return ()
    out: List[AnickChain] = []
    prefix: List[int] = []

    def extend(remaining: int) -> None:
        if len(prefix) == n:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for i in range(remaining + 1):
            if prefix and not f.obstruction(prefix[-1], i):
                continue
            prefix.append(i)
            extend(remaining - i)
            prefix.pop()

    extend(d)
    return tuple(out)


def chain_to_vertex(c: AnickChain) -> BarVertex:
    return tuple((i,) for i in c)


def vertex_to_chain(f: FamilySpec, b: BarVertex) -> Optional[AnickChain]:
    if any(len(w) != 1 for w in b):
        return None
    t = tuple(w[0] for w in b)
    return t if chain_predicate(f, t) else None


def project_chains(f: FamilySpec, x: LinComb) -> LinComb:
    """The projection onto the chain basis: non-chain vertices are dropped."""
    return x.map_keys(lambda b: vertex_to_chain(f, b))


# --- matching -------------------------------------------------------------------------


@lru_cache(maxsize=None)
def classify(f: FamilySpec, b: BarVertex) -> MorseClass:
    m = len(b)
    prefix = 0
    while (
        prefix < m
        and len(b[prefix]) == 1
        and (prefix == 0 or f.obstruction(b[prefix - 1][0], b[prefix][0]))
    ):
        prefix += 1
    if prefix == m:
        return CRITICAL
    nxt = b[prefix]
    if len(nxt) >= 2 and (prefix == 0 or f.obstruction(b[prefix - 1][0], nxt[0])):
        return MorseClass(MorseKind.MERGED_END, prefix + 1)
    return MorseClass(MorseKind.SPLIT_END, prefix)


def partner(f: FamilySpec, b: BarVertex) -> Optional[BarVertex]:
    cls = classify(f, b)
    if cls.kind is MorseKind.MERGED_END:
        k = cls.position - 1
        word = b[k]
        return b[:k] + (word[:1], word[1:]) + b[k + 1 :]
    if cls.kind is MorseKind.SPLIT_END:
        k = cls.position - 1
        return b[:k] + (b[k] + b[k + 1],) + b[k + 2 :]
    return None


def matching_involution_holds(f: FamilySpec, b: BarVertex) -> bool:
    cls = classify(f, b)
    other = partner(f, b)
    if other is None:
        return cls.is_critical
    back = classify(f, other)
    complementary = {MorseKind.MERGED_END: MorseKind.SPLIT_END, MorseKind.SPLIT_END: MorseKind.MERGED_END}
    return back.kind is complementary[cls.kind] and partner(f, other) == b


# --- bar differential -----------------------------------------------------------------


@lru_cache(maxsize=None)
def _bar_diff_terms(f: FamilySpec, b: BarVertex) -> Tuple[Tuple[BarVertex, Rational], ...]:
    acc: Terms = {}
    for i in range(len(b) - 1):
        sign = -1 if i % 2 == 0 else 1
        for word, c in word_normal_form(f, b[i] + b[i + 1]):
            accumulate(acc, b[:i] + (word,) + b[i + 2 :], sign * c)
    return tuple(sorted(acc.items()))


def bar_diff(f: FamilySpec, b: BarVertex) -> LinComb:
    return LinComb(_bar_diff_terms(f, b))


def slotwise_derive(f: FamilySpec, x: LinComb) -> LinComb:
    """Leibniz extension of the derivation across bar components."""
    acc: Terms = {}
    for b, coeff in x.as_dict().items():
        for i, word in enumerate(b):
            for w, c in derive_word(f, word):
                accumulate(acc, b[:i] + (w,) + b[i + 1 :], coeff * c)
    return LinComb(acc)


# --- path weights ---------------------------------------------------------------------


class MorseGraph:
    """
    The matched graph: unmatched differential edges pointing down and reversed matching
    edges pointing up, with path sums memoized per vertex.

    Traversals for a start in degree n are confined to degrees n and n-1 by `floor`:
    once a path drops below n-1 it can only climb back to split vertices of degree n-1,
    never to degree n, so no path that leaves the band ends on a vertex of the band.
    """

    def __init__(self, family: FamilySpec, prune_zeros: bool = False) -> None:
        self.family = family
        self.prune_zeros = prune_zeros
        self._critical_memo: Dict[int, Dict[BarVertex, Terms]] = {}
        self._level_memo: Dict[int, Dict[BarVertex, Terms]] = {}

    def down_edges(self, b: BarVertex) -> List[Tuple[BarVertex, Rational]]:
        cls = classify(self.family, b)
        matched = partner(self.family, b) if cls.kind is MorseKind.SPLIT_END else None
        return [(t, c) for t, c in _bar_diff_terms(self.family, b) if t != matched]

    def up_edge(self, b: BarVertex) -> Optional[Tuple[BarVertex, Rational]]:
        if classify(self.family, b).kind is not MorseKind.MERGED_END:
            return None
        split = partner(self.family, b)
        coeff = dict(_bar_diff_terms(self.family, split)).get(b)
        if coeff not in (1, -1):
            raise StructuralError(f"matching edge {split} -> {b} has coefficient {coeff}")
        return split, -1 / to_rational(coeff)

    def _collect(
        self,
        b: BarVertex,
        terminal: Callable[[BarVertex], bool],
        floor: Optional[int],
        memo: Dict[BarVertex, Terms],
        stack: Set[BarVertex],
        prune: bool,
    ) -> Terms:
        cached = memo.get(b)
        if cached is not None:
            return cached
        if b in stack:
            raise MorseCycleError(f"directed cycle through {b}")
        acc: Terms = {}
        is_terminal = terminal(b)
        if is_terminal:
            acc[b] = QQ(1)
        elif prune and b[0][0] == 0:
            memo[b] = acc
            return acc
        stack.add(b)
        edges: List[Tuple[BarVertex, Rational]] = []
        if floor is None or len(b) > floor:
            edges.extend(self.down_edges(b))
        up = self.up_edge(b)
        if up is not None:
            edges.append(up)
        for target, weight in edges:
            for t, c in self._collect(target, terminal, floor, memo, stack, prune).items():
                accumulate(acc, t, weight * c)
        stack.discard(b)
        memo[b] = acc
        return acc

    def paths(
        self,
        start: BarVertex,
        terminal: Callable[[BarVertex], bool],
        floor: Optional[int] = None,
    ) -> LinComb:
        return LinComb(self._collect(start, terminal, floor, {}, set(), False))

    def to_critical(self, start: BarVertex) -> Terms:
        """Weighted zigzags from start to critical cells one degree down."""
        floor = len(start) - 1
        memo = self._critical_memo.setdefault(floor, {})
        family = self.family

        def terminal(b: BarVertex) -> bool:
            return len(b) == floor and classify(family, b).is_critical

        result = self._collect(start, terminal, floor, memo, set(), self.prune_zeros)
        logger.debug("%s critical memo at floor %d: %d vertices", family.name, floor, len(memo))
        return result

    def to_level(self, start: BarVertex) -> Terms:
        """Weighted zigzags from start ending in its own degree, trivial path included."""
        level = len(start)
        memo = self._level_memo.setdefault(level, {})
        return self._collect(start, lambda b: len(b) == level, level - 1, memo, set(), False)

    def band_vertices(self, start: BarVertex) -> Set[BarVertex]:
        """Every vertex a zigzag from start can visit in degrees n and n-1."""
        floor = len(start) - 1
        seen: Set[BarVertex] = set()
        todo = [start]
        while todo:
            b = todo.pop()
            if b in seen:
                continue
            seen.add(b)
            if len(b) > floor:
                todo.extend(t for t, _ in self.down_edges(b))
            up = self.up_edge(b)
            if up is not None:
                todo.append(up[0])
        return seen


@lru_cache(maxsize=None)
def morse_graph(f: FamilySpec, prune_zeros: bool = False) -> MorseGraph:
    return MorseGraph(f, prune_zeros)


def morse_paths(
    f: FamilySpec,
    start: BarVertex,
    terminal: Callable[[BarVertex], bool],
    floor: Optional[int] = None,
) -> LinComb:
    return morse_graph(f).paths(start, terminal, floor)


def anick_diff_paths(f: FamilySpec, c: AnickChain, prune_zeros: bool = True) -> LinComb:
    if len(c) < 2:
        raise ValueError("the differential is defined on chains of length >= 2")
    if not chain_predicate(f, c):
        raise ValueError(f"{c} is not an Anick chain of {f.name}")
    terms = morse_graph(f, prune_zeros).to_critical(chain_to_vertex(c))
    return project_chains(f, LinComb(terms))


def g_map(f: FamilySpec, c: AnickChain) -> LinComb:
    if not chain_predicate(f, c):
        raise ValueError(f"{c} is not an Anick chain of {f.name}")
    return LinComb(morse_graph(f).to_level(chain_to_vertex(c)))


def tilde_partial_general(f: FamilySpec, c: AnickChain) -> LinComb:
    return project_chains(f, slotwise_derive(f, g_map(f, c)))
