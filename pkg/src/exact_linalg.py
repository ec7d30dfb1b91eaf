"""Exact sparse linear algebra over QQ: rank, nullspaces and quotient dimensions."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.matrices.ddm import DDM
from sympy.polys.matrices.sdm import SDM

logger = logging.getLogger(__name__)

# Below this size (both dimensions) elimination runs on the dense DDM path.
DENSE_CUTOFF = 64

Rational = Any
RationalLike = Union[int, Tuple[int, int], Rational]


class StructuralError(RuntimeError):
    """An internal invariant of the homological pipeline was violated."""


def to_rational(value: RationalLike) -> Rational:
    """Coerce ints, (num, den) pairs and sympy numbers into a QQ element."""
    if isinstance(value, QQ.dtype):
        return value
    if isinstance(value, tuple):
        num, den = value
        if int(den) == 0:
            raise ZeroDivisionError("denominator must be nonzero")
        return QQ(int(num), int(den))
    return QQ.convert(value)


def _clean_items(items: Iterable[Tuple[Any, Any]]) -> Dict[Any, Rational]:
    acc: Dict[Any, Rational] = {}
    for key, value in items:
        if not value:
            continue
        total = acc.get(key, QQ(0)) + to_rational(value)
        if total:
            acc[key] = total
        else:
            acc.pop(key, None)
    return acc


@dataclass(frozen=True)
class RationalVector:
    length: int
    entries: Tuple[Tuple[int, Rational], ...] = ()

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("vector length must be nonnegative")
        raw = self.entries.items() if isinstance(self.entries, Mapping) else self.entries
        cleaned = _clean_items(raw)
        for index in cleaned:
            if not 0 <= index < self.length:
                raise ValueError(f"index {index} out of range for length {self.length}")
        object.__setattr__(self, "entries", tuple(sorted(cleaned.items())))

    @classmethod
    def from_dense(cls, values: Sequence[RationalLike]) -> "RationalVector":
        return cls(len(values), tuple(enumerate(values)))

    def as_dict(self) -> Dict[int, Rational]:
        return dict(self.entries)

    def get(self, index: int) -> Rational:
        return self.as_dict().get(index, QQ(0))

    def to_dense(self) -> List[Rational]:
        dense = [QQ(0)] * self.length
        for index, value in self.entries:
            dense[index] = value
        return dense

    def scale(self, factor: RationalLike) -> "RationalVector":
        factor = to_rational(factor)
        return RationalVector(self.length, tuple((i, v * factor) for i, v in self.entries))

    def __add__(self, other: "RationalVector") -> "RationalVector":
        if other.length != self.length:
            raise ValueError("vector lengths differ")
        return RationalVector(self.length, self.entries + other.entries)

    def is_zero(self) -> bool:
        return not self.entries


@dataclass(frozen=True)
class SparseRationalMatrix:
    row_count: int
    col_count: int
    entries: Tuple[Tuple[Tuple[int, int], Rational], ...] = ()

    def __post_init__(self) -> None:
        if self.row_count < 0 or self.col_count < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        raw = self.entries.items() if isinstance(self.entries, Mapping) else self.entries
        cleaned = _clean_items(raw)
        for row, col in cleaned:
            if not (0 <= row < self.row_count and 0 <= col < self.col_count):
                raise ValueError(f"entry ({row}, {col}) outside {self.row_count}x{self.col_count}")
        object.__setattr__(self, "entries", tuple(sorted(cleaned.items())))

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[RationalLike]]) -> "SparseRationalMatrix":
        row_count = len(rows)
        col_count = len(rows[0]) if rows else 0
        items = [((i, j), v) for i, row in enumerate(rows) for j, v in enumerate(row)]
        return cls(row_count, col_count, tuple(items))

    @classmethod
    def from_columns(cls, row_count: int, columns: Sequence[RationalVector]) -> "SparseRationalMatrix":
        items = []
        for j, column in enumerate(columns):
            if column.length != row_count:
                raise ValueError("column length does not match row count")
            items.extend(((i, j), v) for i, v in column.entries)
        return cls(row_count, len(columns), tuple(items))

    @classmethod
    def from_rows(cls, col_count: int, rows: Sequence[RationalVector]) -> "SparseRationalMatrix":
        items = []
        for i, row in enumerate(rows):
            if row.length != col_count:
                raise ValueError("row length does not match column count")
            items.extend(((i, j), v) for j, v in row.entries)
        return cls(len(rows), col_count, tuple(items))

    @classmethod
    def zero(cls, row_count: int, col_count: int) -> "SparseRationalMatrix":
        return cls(row_count, col_count, ())

    def as_dict(self) -> Dict[Tuple[int, int], Rational]:
        return dict(self.entries)

    def row_dicts(self) -> Dict[int, Dict[int, Rational]]:
        rows: Dict[int, Dict[int, Rational]] = {}
        for (i, j), v in self.entries:
            rows.setdefault(i, {})[j] = v
        return rows

    def columns(self) -> List[RationalVector]:
        cols: Dict[int, List[Tuple[int, Rational]]] = {}
        for (i, j), v in self.entries:
            cols.setdefault(j, []).append((i, v))
        return [RationalVector(self.row_count, tuple(cols.get(j, ()))) for j in range(self.col_count)]

    def transpose(self) -> "SparseRationalMatrix":
        return SparseRationalMatrix(
            self.col_count, self.row_count, tuple(((j, i), v) for (i, j), v in self.entries)
        )

    def matvec(self, vector: RationalVector) -> RationalVector:
        if vector.length != self.col_count:
            raise ValueError("vector length does not match column count")
        values = vector.as_dict()
        out: List[Tuple[int, Rational]] = []
        for (i, j), v in self.entries:
            x = values.get(j)
            if x:
                out.append((i, v * x))
        return RationalVector(self.row_count, tuple(out))

    def matmul(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        if self.col_count != other.row_count:
            raise ValueError("inner dimensions differ")
        if not self.entries or not other.entries:
            return SparseRationalMatrix.zero(self.row_count, other.col_count)
        product = self.to_sdm().matmul(other.to_sdm())
        items = [((i, j), v) for i, row in product.items() for j, v in row.items()]
        return SparseRationalMatrix(self.row_count, other.col_count, tuple(items))

    def is_zero(self) -> bool:
        return not self.entries

    def to_sdm(self) -> SDM:
        return SDM(self.row_dicts(), (self.row_count, self.col_count), QQ)

    def to_ddm(self) -> DDM:
        dense = [[QQ(0)] * self.col_count for _ in range(self.row_count)]
        for (i, j), v in self.entries:
            dense[i][j] = v
        return DDM(dense, (self.row_count, self.col_count), QQ)


def _rref(m: SparseRationalMatrix) -> Tuple[Dict[int, Dict[int, Rational]], List[int]]:
    """
    Reduced row echelon form as (pivot rows, pivot columns).

    Row k of the result holds the pivot in column pivots[k]. Both elimination paths
    pick pivots deterministically, so repeated calls give identical bases.
    """
    if not m.entries:
        return {}, []
    if m.row_count < DENSE_CUTOFF and m.col_count < DENSE_CUTOFF:
        reduced, pivots = m.to_ddm().rref()
        rows = {k: {j: v for j, v in enumerate(reduced[k]) if v} for k in range(len(pivots))}
    else:
        reduced, pivots = m.to_sdm().rref()
        rows = {k: dict(reduced.get(k, {})) for k in range(len(pivots))}
    return rows, list(pivots)


def rank(m: SparseRationalMatrix) -> int:
    _, pivots = _rref(m)
    return len(pivots)


def nullspace_and_free_columns(
    m: SparseRationalMatrix,
) -> Tuple[List[RationalVector], List[int]]:
    """
    Nullspace basis in reduced echelon parametrization, plus the free columns.

    The k-th basis vector has a 1 at free_columns[k] and 0 at every other free column,
    so the coordinates of any nullspace vector are its values at the free columns.
    """
    rows, pivots = _rref(m)
    pivot_set = set(pivots)
    free = [j for j in range(m.col_count) if j not in pivot_set]
    basis = []
    for j in free:
        items = [(j, QQ(1))]
        for k, p in enumerate(pivots):
            a = rows[k].get(j)
            if a:
                items.append((p, -a))
        basis.append(RationalVector(m.col_count, tuple(items)))
    return basis, free


def nullspace_basis(m: SparseRationalMatrix) -> List[RationalVector]:
    basis, _ = nullspace_and_free_columns(m)
    return basis


def span_rank(vectors: Sequence[RationalVector]) -> int:
    if not vectors:
        return 0
    return rank(SparseRationalMatrix.from_rows(vectors[0].length, vectors))


def quotient_dim(
    kernel_basis: Sequence[RationalVector], image_generators: Sequence[RationalVector]
) -> int:
    """dim span(kernel) - rank(images), after checking images lie in the kernel span."""
    images = [v for v in image_generators if not v.is_zero()]
    if not kernel_basis:
        if images:
            raise StructuralError("image generators present but kernel is zero")
        return 0
    kernel_rank = span_rank(kernel_basis)
    if images:
        if span_rank(list(kernel_basis) + images) != kernel_rank:
            raise StructuralError("image generators are not contained in the kernel span")
    return kernel_rank - span_rank(images)
