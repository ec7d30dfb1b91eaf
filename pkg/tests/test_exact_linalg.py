import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import QQ

from src.exact_linalg import (
    RationalVector,
    SparseRationalMatrix,
    StructuralError,
    nullspace_and_free_columns,
    quotient_dim,
    rank,
    span_rank,
    to_rational,
)


def small_matrices(max_rows=6, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r
            )
        )
    )


def test_to_rational_accepts_pairs_and_ints():
    assert to_rational((1, 2)) == QQ(1, 2)
    assert to_rational(3) == QQ(3)
    with pytest.raises(ZeroDivisionError):
        to_rational((1, 0))


def test_vector_drops_zero_entries():
    vec = RationalVector(3, ((0, 0), (2, 5)))
    assert vec.entries == ((2, QQ(5)),)
    assert RationalVector.from_dense([1, -1, 0]) + RationalVector.from_dense([-1, 1, 0]) == RationalVector(3)


def test_matrix_rejects_entries_out_of_range():
    with pytest.raises(ValueError):
        SparseRationalMatrix(2, 2, (((2, 0), 1),))


def test_rank_of_dependent_rows():
    m = SparseRationalMatrix.from_dense([[1, 2], [2, 4]])
    assert rank(m) == 1


def test_nullspace_is_parametrized_by_free_columns():
    m = SparseRationalMatrix.from_dense([[1, 1, 0], [0, 0, 1]])
    basis, free = nullspace_and_free_columns(m)
    assert free == [1]
    assert basis[0].as_dict() == {0: QQ(-1), 1: QQ(1)}


def test_sparse_path_matches_dense_path():
    # 70 columns forces the sparse elimination
    rows = [[(i + j) % 3 for j in range(70)] for i in range(4)]
    m = SparseRationalMatrix.from_dense(rows)
    small = SparseRationalMatrix.from_dense([row[:5] for row in rows])
    assert rank(m) == rank(m.transpose()) == rank(small) == 3
    for vec in nullspace_and_free_columns(m)[0]:
        assert m.matvec(vec).is_zero()


@given(small_matrices())
def test_rank_plus_nullity(rows):
    m = SparseRationalMatrix.from_dense(rows)
    basis, free = nullspace_and_free_columns(m)
    assert rank(m) + len(basis) == m.col_count
    for vec, j in zip(basis, free):
        assert m.matvec(vec).is_zero()
        assert vec.get(j) == 1
        assert all(vec.get(k) == 0 for k in free if k != j)


@given(small_matrices())
def test_rank_is_invariant_under_transpose(rows):
    m = SparseRationalMatrix.from_dense(rows)
    assert rank(m) == rank(m.transpose())


@given(st.data())
def test_matmul_agrees_with_columns(data):
    entries = st.integers(-3, 3)
    inner = data.draw(st.integers(1, 4))
    outer = data.draw(st.integers(1, 4))
    left = data.draw(st.lists(st.lists(entries, min_size=inner, max_size=inner), min_size=1, max_size=4))
    right = data.draw(st.lists(st.lists(entries, min_size=outer, max_size=outer), min_size=inner, max_size=inner))
    a = SparseRationalMatrix.from_dense(left)
    b = SparseRationalMatrix.from_dense(right)
    product = a.matmul(b)
    for j, column in enumerate(b.columns()):
        assert product.columns()[j] == a.matvec(column)


def test_quotient_dim_counts_cycles_modulo_boundaries():
    kernel = [RationalVector.from_dense([1, 0, 0]), RationalVector.from_dense([0, 1, 0])]
    images = [RationalVector.from_dense([2, 0, 0]), RationalVector(3)]
    assert quotient_dim(kernel, images) == 1
    assert span_rank(kernel) == 2


def test_quotient_dim_rejects_images_outside_kernel():
    kernel = [RationalVector.from_dense([1, 0])]
    with pytest.raises(StructuralError):
        quotient_dim(kernel, [RationalVector.from_dense([0, 1])])
    with pytest.raises(StructuralError):
        quotient_dim([], [RationalVector.from_dense([0, 1])])
