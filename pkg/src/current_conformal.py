"""
Trivial-coefficient cohomology of current conformal algebras Cur A.

Cochains of length n live in k[y_1..y_{n-1}] (x) A^{(x)n}; the differential sets one
y-variable to zero and merges the matching tensor slots by the product of A. For
y-degree 0 this is the ordinary complex of A' = A + k with A acting trivially.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from joblib import Parallel, delayed
from sympy import QQ

from src.exact_linalg import (
    Rational,
    RationalVector,
    SparseRationalMatrix,
    nullspace_basis,
    rank,
    span_rank,
    to_rational,
)
from src.reporting import CellRecord, CohomologyReport
from src.rewrite_core import LinComb, accumulate

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
TensorWord = Tuple[int, ...]
DecoratedWord = Tuple[Tuple[int, int], ...]
Substitution = Callable[[Sequence[sp.Symbol]], Sequence[sp.Expr]]


class NonAssociativeError(ValueError):
    def __init__(self, triple: Tuple[int, int, int]):
        self.triple = triple
        super().__init__(f"structure constants are not associative at (i, j, l) = {triple}")


def _associativity_defect(table: np.ndarray) -> Optional[Tuple[int, int, int]]:
    # left[i,j,l,u] = sum_t c_ij^t c_tl^u ; right[i,j,l,u] = sum_t c_jl^t c_it^u
    left = np.tensordot(table, table, axes=([2], [0]))
    right = np.tensordot(table, table, axes=([1], [2])).transpose(0, 2, 3, 1)
    bad = np.argwhere(left != right)
    if len(bad):
        i, j, l, _ = (int(x) for x in bad[0])
        return i, j, l
    return None


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """A finite-dimensional associative algebra, possibly without identity."""

    name: str
    labels: Tuple[str, ...]
    table: np.ndarray = field(repr=False)
    _products: Dict[Tuple[int, int], Tuple[Tuple[int, Rational], ...]] = field(
        init=False, repr=False
    )

    def __post_init__(self) -> None:
        k = len(self.labels)
        if self.table.shape != (k, k, k):
            raise ValueError(f"structure table must have shape {(k, k, k)}, got {self.table.shape}")
        products = {}
        for i, j in np.ndindex(k, k):
            products[(i, j)] = tuple(
                (t, self.table[i, j, t]) for t in range(k) if self.table[i, j, t]
            )
        object.__setattr__(self, "_products", products)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def product(self, i: int, j: int) -> Tuple[Tuple[int, Rational], ...]:
        return self._products[(i, j)]

    def check_associative(self) -> None:
        triple = _associativity_defect(self.table)
        if triple is not None:
            raise NonAssociativeError(triple)

    def square_codim(self) -> int:
        """dim A/A^2."""
        vectors = [
            RationalVector(self.dim, self.product(i, j)) for i, j in np.ndindex(self.dim, self.dim)
        ]
        return self.dim - span_rank(vectors)


def _empty_table(k: int) -> np.ndarray:
    return np.full((k, k, k), QQ(0), dtype=object)


def mat(k: int) -> FiniteAlgebra:
    """Full matrix algebra on the matrix units E_ab (index a*k + b)."""
    if k < 1:
        raise ValueError("matrix size must be at least 1")
    table = _empty_table(k * k)
    for a, b, c in np.ndindex(k, k, k):
        table[a * k + b, b * k + c, a * k + c] = QQ(1)
    labels = tuple(f"E{a + 1}{b + 1}" for a, b in np.ndindex(k, k))
    return FiniteAlgebra(f"mat({k})", labels, table)


def trunc_poly(big_n: int) -> FiniteAlgebra:
    """x k[x] / (x^N) on the basis x, x^2, ..., x^(N-1)."""
    if big_n < 2:
        raise ValueError("N must be at least 2")
    k = big_n - 1
    table = _empty_table(k)
    for p, q in np.ndindex(k, k):
        if p + q + 2 < big_n:
            table[p, q, p + q + 1] = QQ(1)
    labels = tuple("x" if p == 1 else f"x^{p}" for p in range(1, big_n))
    return FiniteAlgebra(f"trunc_poly({big_n})", labels, table)


def _entry(value: object) -> Rational:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"rational entries are [num, den] pairs, got {value!r}")
        return to_rational((int(value[0]), int(value[1])))
    if isinstance(value, (int, str)):
        return to_rational(value) if isinstance(value, int) else QQ.from_sympy(sp.Rational(value))
    raise ValueError(f"cannot read structure constant {value!r}")


def algebra_from_document(doc: Mapping[str, object], name: str = "custom") -> FiniteAlgebra:
    try:
        k = int(doc["dim"])
        raw = doc["table"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"structure document needs 'dim' and 'table': {exc}") from None
    labels = tuple(doc.get("labels") or (f"e{i + 1}" for i in range(k)))
    if len(labels) != k:
        raise ValueError("label count does not match dim")
    table = _empty_table(k)
    try:
        for i, j, t in np.ndindex(k, k, k):
            table[i, j, t] = _entry(raw[i][j][t])
    except (IndexError, TypeError) as exc:
        raise ValueError(f"structure table is not {k}x{k}x{k}: {exc}") from None
    return FiniteAlgebra(str(doc.get("name", name)), labels, table)


def load_algebra(spec: Union[str, Path, Mapping[str, object]]) -> FiniteAlgebra:
    """
    builtin:mat:k, builtin:truncpoly:N, a path to a structure-constant JSON document, or
    the document itself. The result is checked for associativity.
    """
    if isinstance(spec, Mapping):
        algebra = algebra_from_document(spec)
    elif str(spec).startswith("builtin:"):
        parts = str(spec).split(":")
        if len(parts) != 3 or parts[1] not in ("mat", "truncpoly"):
            raise ValueError(f"unknown builtin algebra {spec!r}")
        try:
            size = int(parts[2])
        except ValueError:
            raise ValueError(f"builtin size must be an integer: {spec!r}") from None
        algebra = mat(size) if parts[1] == "mat" else trunc_poly(size)
    else:
        path = Path(spec)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read algebra document {path}: {exc}") from None
        algebra = algebra_from_document(doc, name=path.stem)
    algebra.check_associative()
    return algebra


# --- cochains -------------------------------------------------------------------------


def _compositions(parts: int, total: int) -> List[Tuple[int, ...]]:
    if parts == 0:
        return [()] if total == 0 else []
    if parts == 1:
        return [(total,)]
    out = []
    for first in range(total, -1, -1):
        out.extend((first,) + rest for rest in _compositions(parts - 1, total - first))
    return out


@lru_cache(maxsize=None)
def y_monomials(n: int, d: int) -> Tuple[Exponents, ...]:
    """Exponent vectors over y_1..y_{n-1} of total degree d."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if d < 0:
        return ()
    return tuple(_compositions(n - 1, d))


@dataclass(frozen=True)
class CurrentCochain:
    length: int
    degree: int
    terms: LinComb = field(default_factory=LinComb)

    def __post_init__(self) -> None:
        for exps, word in self.terms:
            if len(exps) != self.length - 1 or sum(exps) != self.degree:
                raise ValueError(f"y-exponents {exps} do not match length {self.length}, degree {self.degree}")
            if len(word) != self.length:
                raise ValueError(f"tensor word {word} is not of length {self.length}")

    @classmethod
    def monomial(cls, exps: Exponents, word: TensorWord, coeff: object = 1) -> "CurrentCochain":
        return cls(len(word), sum(exps), LinComb.basis((tuple(exps), tuple(word)), coeff))

    def __add__(self, other: "CurrentCochain") -> "CurrentCochain":
        return CurrentCochain(self.length, self.degree, self.terms + other.terms)

    def is_zero(self) -> bool:
        return not self.terms


@lru_cache(maxsize=None)
def _current_basis(algebra: FiniteAlgebra, n: int, d: int) -> Tuple[Tuple[Exponents, TensorWord], ...]:
    words = list(np.ndindex(*([algebra.dim] * n)))
    return tuple((exps, tuple(int(i) for i in w)) for exps in y_monomials(n, d) for w in words)


def _merge(algebra: FiniteAlgebra, word: TensorWord, i: int) -> List[Tuple[TensorWord, Rational]]:
    """Slots i, i+1 (1-based) replaced by their product."""
    head, tail = word[: i - 1], word[i + 1 :]
    return [(head + (t,) + tail, c) for t, c in algebra.product(word[i - 1], word[i])]


def _diff_terms(algebra: FiniteAlgebra, exps: Exponents, word: TensorWord) -> Dict[Tuple[Exponents, TensorWord], Rational]:
    acc: Dict[Tuple[Exponents, TensorWord], Rational] = {}
    n = len(word)
    for i in range(1, n):
        if exps[i - 1]:
            continue
        lowered = exps[: i - 1] + exps[i:]
        sign = -1 if i % 2 else 1
        for merged, c in _merge(algebra, word, i):
            accumulate(acc, (lowered, merged), sign * c)
    return acc


def current_diff(algebra: FiniteAlgebra, n: int, u: CurrentCochain) -> CurrentCochain:
    if n < 2:
        raise ValueError("n must be at least 2")
    if u.length != n:
        raise ValueError(f"cochain has length {u.length}, expected {n}")
    acc: Dict[Tuple[Exponents, TensorWord], Rational] = {}
    for (exps, word), coeff in u.terms.items():
        for key, c in _diff_terms(algebra, exps, word).items():
            accumulate(acc, key, coeff * c)
    return CurrentCochain(n - 1, u.degree, LinComb(acc))


@lru_cache(maxsize=None)
def current_diff_matrix(algebra: FiniteAlgebra, n: int, d: int) -> SparseRationalMatrix:
    source = _current_basis(algebra, n, d)
    if n == 1:
        return SparseRationalMatrix.zero(0, len(source))
    target = {key: i for i, key in enumerate(_current_basis(algebra, n - 1, d))}
    items = []
    for j, (exps, word) in enumerate(source):
        for key, c in _diff_terms(algebra, exps, word).items():
            items.append(((target[key], j), c))
    return SparseRationalMatrix(len(target), len(source), tuple(items))


def current_cell(algebra: FiniteAlgebra, n: int, d: int) -> CellRecord:
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    size = len(_current_basis(algebra, n, d))
    rank_out = rank(current_diff_matrix(algebra, n, d))
    rank_in = rank(current_diff_matrix(algebra, n + 1, d))
    return CellRecord(
        n=n,
        d=d,
        dim_space=size,
        dim_kernel=size,
        dim_ker_delta=size - rank_out,
        dim_im_delta=rank_in,
        cohomology=size - rank_out - rank_in,
    )


def current_cohomology_dim(algebra: FiniteAlgebra, n: int, d: int) -> int:
    return current_cell(algebra, n, d).cohomology


def _unital_product(algebra: FiniteAlgebra, i: int, j: int) -> Tuple[Tuple[int, Rational], ...]:
    """Product in A' = A + k, where index algebra.dim is the adjoined identity."""
    unit = algebra.dim
    if i == unit:
        return ((j, QQ(1)),)
    if j == unit:
        return ((i, QQ(1)),)
    return algebra.product(i, j)


@lru_cache(maxsize=None)
def _unital_bar_matrix(algebra: FiniteAlgebra, n: int) -> SparseRationalMatrix:
    """b_n on A'^{(x)n} -> A'^{(x)(n-1)}, augmentation terms at both ends included."""
    size = algebra.dim + 1
    unit = algebra.dim
    source = list(np.ndindex(*([size] * n)))
    target = {tuple(int(i) for i in w): k for k, w in enumerate(np.ndindex(*([size] * (n - 1))))}
    items = []
    for col, raw in enumerate(source):
        word = tuple(int(i) for i in raw)
        if word[0] == unit:
            items.append(((target[word[1:]], col), QQ(1)))
        for i in range(1, n):
            sign = -1 if i % 2 else 1
            for t, c in _unital_product(algebra, word[i - 1], word[i]):
                items.append(((target[word[: i - 1] + (t,) + word[i + 1 :]], col), sign * c))
        if word[-1] == unit:
            items.append(((target[word[:-1]], col), QQ(1 if n % 2 == 0 else -1)))
    return SparseRationalMatrix(len(target), len(source), tuple(items))


def ordinary_hochschild_dim(algebra: FiniteAlgebra, n: int) -> int:
    """dim H^n(A', k), computed from the unnormalized bar complex of A' = A + k."""
    if n < 1:
        raise ValueError("n must be at least 1")
    size = (algebra.dim + 1) ** n
    return size - rank(_unital_bar_matrix(algebra, n)) - rank(_unital_bar_matrix(algebra, n + 1))


def current_cohomology_table(
    algebra: FiniteAlgebra, n_max: int, d_max: int, *, jobs: int = 1
) -> CohomologyReport:
    if n_max < 1 or d_max < 0:
        raise ValueError("need n_max >= 1 and d_max >= 0")
    cells = [(n, d) for n in range(1, n_max + 1) for d in range(d_max + 1)]
    if jobs == 1:
        records = [current_cell(algebra, n, d) for n, d in cells]
    else:
        records = Parallel(n_jobs=jobs)(delayed(current_cell)(algebra, n, d) for n, d in cells)
    for record in records:
        logger.info("Cur %s (n=%d, d=%d): H=%d", algebra.name, record.n, record.d, record.cohomology)
    return CohomologyReport(
        family=f"Cur {algebra.name}",
        n_max=n_max,
        deg_max=d_max,
        entries=sorted(records, key=lambda r: (r.n, r.d)),
    )


# --- decorated bar words --------------------------------------------------------------


def default_substitution(xs: Sequence[sp.Symbol]) -> List[sp.Expr]:
    return [xs[i] - xs[i + 1] for i in range(len(xs) - 1)]


def _x_symbols(n: int) -> Tuple[sp.Symbol, ...]:
    return sp.symbols(f"x1:{n + 1}")


def _expand_monomial(exps: Exponents, n: int, substitution: Substitution) -> List[Tuple[Tuple[int, ...], Rational]]:
    xs = _x_symbols(n)
    ys = list(substitution(xs))
    expr = sp.Integer(1)
    for y, e in zip(ys, exps):
        expr *= y**e
    return [(tuple(m), QQ.convert(c)) for m, c in sp.Poly(expr, *xs, domain=QQ).terms()]


def expand_to_bar(u: CurrentCochain, substitution: Optional[Substitution] = None) -> LinComb:
    """Rewrite y-polynomials in the x variables; x_i^m on slot i becomes a(m)."""
    substitution = substitution or default_substitution
    acc: Dict[DecoratedWord, Rational] = {}
    for (exps, word), coeff in u.terms.items():
        for powers, c in _expand_monomial(exps, u.length, substitution):
            accumulate(acc, tuple(zip(word, powers)), coeff * c)
    return LinComb(acc)


def e_m(a: int, b: int, m: int) -> LinComb:
    """sum_s (-1)^s C(m, s) [a(m-s)|b(s)]."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return LinComb({((a, m - s), (b, s)): (-1) ** s * comb(m, s) for s in range(m + 1)})


def slotwise_derive_bar(x: LinComb) -> LinComb:
    acc: Dict[DecoratedWord, Rational] = {}
    for word, coeff in x.items():
        for i, (label, power) in enumerate(word):
            if power:
                lowered = word[:i] + ((label, power - 1),) + word[i + 1 :]
                accumulate(acc, lowered, coeff * power)
    return LinComb(acc)


def bar_word_diff(algebra: FiniteAlgebra, x: LinComb) -> LinComb:
    """Bar differential on decorated words with a(p)b(q) = (ab)(p+q)."""
    acc: Dict[DecoratedWord, Rational] = {}
    for word, coeff in x.items():
        for i in range(1, len(word)):
            (a, p), (b, q) = word[i - 1], word[i]
            sign = -1 if i % 2 else 1
            for t, c in algebra.product(a, b):
                merged = word[: i - 1] + ((t, p + q),) + word[i + 1 :]
                accumulate(acc, merged, sign * coeff * c)
    return LinComb(acc)


def d_kernel_oracle(n: int, deg_max: int, substitution: Optional[Substitution] = None) -> bool:
    """Compare Ker(sum d/dx_i) on k[x_1..x_n] with the span of substituted y-monomials."""
    if n < 2:
        raise ValueError("n must be at least 2")
    substitution = substitution or default_substitution
    for g in range(deg_max + 1):
        source = _compositions(n, g)
        index = {m: i for i, m in enumerate(source)}
        target = {m: i for i, m in enumerate(_compositions(n, g - 1))} if g else {}
        items = []
        for j, m in enumerate(source):
            for pos, e in enumerate(m):
                if e:
                    lowered = m[:pos] + (e - 1,) + m[pos + 1 :]
                    items.append(((target[lowered], j), e))
        d_matrix = SparseRationalMatrix(len(target), len(source), tuple(items))
        kernel_dim = len(nullspace_basis(d_matrix))
        y_vectors = []
        for exps in y_monomials(n, g):
            entries = []
            for powers, c in _expand_monomial(exps, n, substitution):
                if powers not in index:
                    return False
                entries.append((index[powers], c))
            y_vectors.append(RationalVector(len(source), tuple(entries)))
        if any(not d_matrix.matvec(vec).is_zero() for vec in y_vectors):
            return False
        if span_rank(y_vectors) != kernel_dim:
            return False
    return True


# --- theorem comparisons --------------------------------------------------------------


@dataclass
class Comparison:
    name: str
    left: int
    right: int
    status: str

    def as_dict(self) -> Dict[str, object]:
        return {"name": self.name, "left": self.left, "right": self.right, "status": self.status}


@dataclass
class TheoremReport:
    algebra: str
    n_max: int
    deg_max: int
    comparisons: List[Comparison] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.comparisons)

    def as_dict(self) -> Dict[str, object]:
        return {
            "algebra": self.algebra,
            "caps": {"n_max": self.n_max, "deg_max": self.deg_max},
            "comparisons": [c.as_dict() for c in self.comparisons],
            "ok": self.ok,
        }


def _compare(name: str, left: int, right: int) -> Comparison:
    return Comparison(name, left, right, "pass" if left == right else "fail")


def theorem_check(algebra: FiniteAlgebra, n_max: int, d_max: int) -> TheoremReport:
    """
    H^1 total against dim A/A^2, and, while every lower ordinary group vanishes, the
    current H^n against ordinary H^n at y-degree 0 and against 0 above it.
    """
    if n_max < 1 or d_max < 1:
        raise ValueError("caps must be at least 1")
    report = TheoremReport(algebra.name, n_max, d_max)
    h1_total = sum(current_cohomology_dim(algebra, 1, d) for d in range(d_max + 1))
    report.comparisons.append(_compare("H1 total vs dim A/A^2", h1_total, algebra.square_codim()))
    lower_vanish = True
    for n in range(1, n_max + 1):
        ordinary = ordinary_hochschild_dim(algebra, n)
        at_zero = current_cohomology_dim(algebra, n, 0)
        if lower_vanish:
            report.comparisons.append(_compare(f"H{n} at d=0 vs ordinary", at_zero, ordinary))
            for d in range(1, d_max + 1):
                report.comparisons.append(
                    _compare(f"H{n} at d={d} vs 0", current_cohomology_dim(algebra, n, d), 0)
                )
        else:
            report.comparisons.append(Comparison(f"H{n} at d=0 vs ordinary", at_zero, ordinary, "reported"))
            for d in range(1, d_max + 1):
                value = current_cohomology_dim(algebra, n, d)
                report.comparisons.append(Comparison(f"H{n} at d={d}", value, 0, "reported"))
        lower_vanish = lower_vanish and ordinary == 0
    failed = [c.name for c in report.comparisons if c.status == "fail"]
    if failed:
        logger.warning("%s: comparisons failed: %s", algebra.name, ", ".join(failed))
    return report
