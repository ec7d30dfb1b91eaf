"""Linear combinations, the U(2) and U(3) rewriting systems, and the derivation on words."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Any, Callable, Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Tuple

from sympy import QQ

from src.exact_linalg import Rational, RationalLike, to_rational

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
RuleTerms = Tuple[Tuple[Word, Rational], ...]

STRATEGIES = ("leftmost", "rightmost")


def deglex_key(word: Word) -> Tuple[int, Word]:
    return len(word), word


def accumulate(acc: Dict[Hashable, Rational], key: Hashable, coeff: Rational) -> None:
    """Add coeff to acc[key] in place, dropping the key when it cancels."""
    if not coeff:
        return
    total = acc.get(key)
    total = coeff if total is None else total + coeff
    if total:
        acc[key] = total
    else:
        del acc[key]


class LinComb:
    """
    Formal linear combination with exact rational coefficients.

    Keys are any hashable basis labels (words, bar vertices, chains, tensor monomials).
    Zero coefficients are never stored and instances are not mutated after construction.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Hashable, RationalLike] | Iterable[Tuple[Hashable, RationalLike]]] = None):
        acc: Dict[Hashable, Rational] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for key, coeff in items:
                if coeff:
                    accumulate(acc, key, to_rational(coeff))
        self._terms = acc

    @classmethod
    def _wrap(cls, terms: Dict[Hashable, Rational]) -> "LinComb":
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def basis(cls, key: Hashable, coeff: RationalLike = 1) -> "LinComb":
        return cls({key: coeff})

    def coefficient(self, key: Hashable) -> Rational:
        return self._terms.get(key, QQ(0))

    def keys(self) -> List[Hashable]:
        return [k for k, _ in self.items()]

    def items(self, key: Optional[Callable[[Hashable], Any]] = None) -> List[Tuple[Hashable, Rational]]:
        """Terms in canonical order (lexicographic on keys unless a sort key is given)."""
        return sorted(self._terms.items(), key=(lambda kv: key(kv[0])) if key else (lambda kv: kv[0]))

    def as_dict(self) -> Dict[Hashable, Rational]:
        return dict(self._terms)

    def map_keys(self, fn: Callable[[Hashable], Optional[Hashable]]) -> "LinComb":
        """Relabel every key; keys mapped to None are dropped."""
        acc: Dict[Hashable, Rational] = {}
        for k, c in self._terms.items():
            new_key = fn(k)
            if new_key is not None:
                accumulate(acc, new_key, c)
        return LinComb._wrap(acc)

    def filter(self, keep: Callable[[Hashable], bool]) -> "LinComb":
        return LinComb._wrap({k: c for k, c in self._terms.items() if keep(k)})

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self.keys())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __contains__(self, key: Hashable) -> bool:
        return key in self._terms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LinComb):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: "LinComb") -> "LinComb":
        acc = dict(self._terms)
        for k, c in other._terms.items():
            accumulate(acc, k, c)
        return LinComb._wrap(acc)

    def __neg__(self) -> "LinComb":
        return LinComb._wrap({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "LinComb") -> "LinComb":
        return self + (-other)

    def __mul__(self, scalar: RationalLike) -> "LinComb":
        factor = to_rational(scalar)
        if not factor:
            return LinComb()
        return LinComb._wrap({k: c * factor for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if not self._terms:
            return "LinComb(0)"
        body = " + ".join(f"({c})*{k}" for k, c in self.items())
        return f"LinComb({body})"


def extend_linearly(fn: Callable[[Hashable], LinComb], x: LinComb) -> LinComb:
    """Apply a basis-level map to every term of x."""
    acc: Dict[Hashable, Rational] = {}
    for key, coeff in x.as_dict().items():
        for k, c in fn(key).as_dict().items():
            accumulate(acc, k, coeff * c)
    return LinComb(acc)


# --- families -------------------------------------------------------------------------


def _u3_obstruction(a: int, b: int) -> bool:
    return a >= 2 or (a == 1 and b == 0)


def _u3_rule(a: int, b: int) -> RuleTerms:
    if a == 1 and b == 0:
        return (((0, 1), QQ(1)), ((0,), QQ(1)))
    s = a + b - 1
    terms = (
        ((1, s), QQ(a * b, s)),
        ((0, a + b), -QQ((a - 1) * (b - 1), s)),
        ((s,), QQ(a * (a - 1), s)),
    )
    return tuple((w, c) for w, c in terms if c)


def _u3_shape(word: Word) -> bool:
    i = 0
    while i < len(word) and word[i] == 0:
        i += 1
    j = i
    while j < len(word) and word[j] == 1:
        j += 1
    rest = word[j:]
    if len(rest) > 1:
        return False
    return not (rest and rest[0] == 0 and j > i)


def _u2_obstruction(a: int, b: int) -> bool:
    return a >= 1


def _u2_rule(a: int, b: int) -> RuleTerms:
    return (((0, a + b), QQ(1)), ((a + b - 1,), QQ(a)))


def _u2_shape(word: Word) -> bool:
    i = 0
    while i < len(word) and word[i] == 0:
        i += 1
    return len(word) - i <= 1


@dataclass(frozen=True)
class FamilySpec:
    """
    A quadratic rewriting system for a coefficient algebra generated by v(n), n >= 0.

    `rule(a, b)` returns the right-hand side of v(a)v(b) as (word, coefficient) pairs and
    is only called on pairs accepted by `obstruction`. `locality` is the N of the
    binomial locality relation used by check_defining_relations.
    """

    name: str
    locality: int
    obstruction: Callable[[int, int], bool] = field(repr=False)
    rule: Callable[[int, int], RuleTerms] = field(repr=False)
    reduced_shape: Callable[[Word], bool] = field(repr=False)


U3 = FamilySpec("U3", 3, _u3_obstruction, _u3_rule, _u3_shape)
U2 = FamilySpec("U2", 2, _u2_obstruction, _u2_rule, _u2_shape)

FAMILIES = {"U2": U2, "U3": U3}


def family_by_name(name: str) -> FamilySpec:
    try:
        return FAMILIES[name.upper()]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; expected one of {sorted(FAMILIES)}") from None


def is_obstruction(f: FamilySpec, a: int, b: int) -> bool:
    return f.obstruction(a, b)


def rewrite_pair(f: FamilySpec, a: int, b: int) -> LinComb:
    if a < 0 or b < 0:
        raise ValueError("generator indices must be nonnegative")
    if not f.obstruction(a, b):
        raise ValueError(f"v({a})v({b}) is not an obstruction of {f.name}")
    return LinComb(f.rule(a, b))


def is_reduced_shape(f: FamilySpec, word: Word) -> bool:
    return f.reduced_shape(tuple(word))


def _find_obstruction(f: FamilySpec, word: Word, rightmost: bool) -> Optional[int]:
    positions = range(len(word) - 2, -1, -1) if rightmost else range(len(word) - 1)
    for i in positions:
        if f.obstruction(word[i], word[i + 1]):
            return i
    return None


@lru_cache(maxsize=None)
def word_normal_form(f: FamilySpec, word: Word, strategy: str = "leftmost") -> RuleTerms:
    """Normal form of a single word as sorted (word, coefficient) pairs."""
    rightmost = strategy == "rightmost"
    done: Dict[Word, Rational] = {}
    pending: Dict[Word, Rational] = {tuple(word): QQ(1)}
    while pending:
        current, coeff = pending.popitem()
        pos = _find_obstruction(f, current, rightmost)
        if pos is None:
            accumulate(done, current, coeff)
            continue
        head, tail = current[:pos], current[pos + 2 :]
        for replacement, c in f.rule(current[pos], current[pos + 1]):
            accumulate(pending, head + replacement + tail, coeff * c)
    return tuple(sorted(done.items(), key=lambda kv: deglex_key(kv[0])))


def normal_form(f: FamilySpec, x: LinComb, strategy: str = "leftmost") -> LinComb:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    return extend_linearly(lambda w: LinComb(word_normal_form(f, w, strategy)), x)


def multiply(f: FamilySpec, x: LinComb, y: LinComb) -> LinComb:
    acc: Dict[Word, Rational] = {}
    for u, a in x.as_dict().items():
        for v, b in y.as_dict().items():
            for w, c in word_normal_form(f, u + v):
                accumulate(acc, w, a * b * c)
    return LinComb(acc)


@lru_cache(maxsize=None)
def derive_word(f: FamilySpec, word: Word) -> RuleTerms:
    acc: Dict[Word, Rational] = {}
    for j, letter in enumerate(word):
        if letter:
            shifted = word[:j] + (letter - 1,) + word[j + 1 :]
            for w, c in word_normal_form(f, shifted):
                accumulate(acc, w, letter * c)
    return tuple(sorted(acc.items(), key=lambda kv: deglex_key(kv[0])))


def derive(f: FamilySpec, x: LinComb) -> LinComb:
    return extend_linearly(lambda w: LinComb(derive_word(f, w)), x)


def v(*indices: int) -> LinComb:
    """The word v(i1)v(i2)... as a combination with coefficient 1."""
    return LinComb.basis(tuple(indices))


@dataclass
class RelationFailure:
    relation: str
    n: int
    m: int
    residual: LinComb

    def as_dict(self) -> Dict[str, object]:
        return {
            "relation": self.relation,
            "n": self.n,
            "m": self.m,
            "residual": {str(w): str(c) for w, c in self.residual.items(deglex_key)},
        }


@dataclass
class RelationReport:
    family: str
    n_max: int
    checked: int = 0
    failures: List[RelationFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_defining_relations(f: FamilySpec, n_max: int) -> RelationReport:
    """
    Normalize the defining relations of the family and collect nonzero residues.

    Locality: sum_s (-1)^s C(N,s) v(n-s)v(m+s) = 0 for n >= N.
    Commutator: v(n)v(m) - v(m)v(n) - (n-m)v(n+m-1) = 0 for n > m.
    """
    if n_max < 3:
        raise ValueError("n_max must be at least 3")
    report = RelationReport(family=f.name, n_max=n_max)
    big_n = f.locality
    for n in range(big_n, n_max + 1):
        for m in range(n_max + 1):
            relation = LinComb(
                {(n - s, m + s): (-1) ** s * comb(big_n, s) for s in range(big_n + 1)}
            )
            residual = normal_form(f, relation)
            report.checked += 1
            if residual:
                report.failures.append(RelationFailure("locality", n, m, residual))
    for n in range(1, n_max + 1):
        for m in range(n):
            relation = v(n, m) - v(m, n) - (n - m) * v(n + m - 1)
            residual = normal_form(f, relation)
            report.checked += 1
            if residual:
                report.failures.append(RelationFailure("commutator", n, m, residual))
    if report.failures:
        logger.warning("%s: %d defining relations do not reduce to 0", f.name, len(report.failures))
    return report
