import itertools
import json

import pytest
from sympy import QQ

from src.current_conformal import (
    CurrentCochain,
    NonAssociativeError,
    bar_word_diff,
    current_cohomology_dim,
    current_cohomology_table,
    current_diff,
    d_kernel_oracle,
    e_m,
    expand_to_bar,
    load_algebra,
    mat,
    ordinary_hochschild_dim,
    slotwise_derive_bar,
    theorem_check,
    trunc_poly,
    y_monomials,
)
from src.rewrite_core import LinComb

NON_ASSOCIATIVE = {
    "dim": 2,
    "table": [
        [[0, 1], [0, 0]],
        [[1, 0], [0, 0]],
    ],
}


def monomials(algebra, n, d):
    for exps in y_monomials(n, d):
        for word in itertools.product(range(algebra.dim), repeat=n):
            yield CurrentCochain.monomial(exps, word)


def test_builtin_algebras():
    m2 = load_algebra("builtin:mat:2")
    assert m2.dim == 4
    assert m2.square_codim() == 0
    t3 = load_algebra("builtin:truncpoly:3")
    assert t3.labels == ("x", "x^2")
    assert t3.product(0, 0) == ((1, 1),)
    assert t3.product(0, 1) == ()
    assert t3.square_codim() == 1


def test_non_associative_table_is_rejected():
    with pytest.raises(NonAssociativeError) as excinfo:
        load_algebra(NON_ASSOCIATIVE)
    assert excinfo.value.triple == (0, 0, 0)


def test_document_with_rational_entries(tmp_path):
    doc = {"dim": 1, "labels": ["e"], "table": [[[[1, 2]]]]}
    path = tmp_path / "half.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    algebra = load_algebra(path)
    assert algebra.name == "half"
    assert algebra.product(0, 0) == ((0, QQ(1, 2)),)


@pytest.mark.parametrize("spec", ["builtin:cube:2", "builtin:mat:x", "does/not/exist.json"])
def test_bad_algebra_specs(spec):
    with pytest.raises(ValueError):
        load_algebra(spec)


def test_y_monomials():
    assert y_monomials(1, 0) == ((),)
    assert y_monomials(1, 2) == ()
    assert set(y_monomials(3, 2)) == {(2, 0), (1, 1), (0, 2)}


def test_length_two_differential():
    t3 = trunc_poly(3)
    assert current_diff(t3, 2, CurrentCochain.monomial((2,), (0, 0))).is_zero()
    out = current_diff(t3, 2, CurrentCochain.monomial((0,), (0, 0)))
    assert out.terms == LinComb({((), (1,)): -1})


def test_length_three_differential_keeps_only_unkilled_variables():
    t3 = trunc_poly(3)
    out = current_diff(t3, 3, CurrentCochain.monomial((0, 2), (0, 0, 0)))
    assert out.terms == LinComb({((2,), (1, 0)): -1})
    out = current_diff(t3, 3, CurrentCochain.monomial((2, 0), (0, 0, 0)))
    assert out.terms == LinComb({((2,), (0, 1)): 1})


@pytest.mark.parametrize("algebra", [mat(2), trunc_poly(3)], ids=["mat2", "trunc3"])
def test_differential_squares_to_zero_and_keeps_degree(algebra):
    for n in (3, 4):
        for d in range(3):
            for u in monomials(algebra, n, d):
                once = current_diff(algebra, n, u)
                assert once.degree == d
                assert current_diff(algebra, n - 1, once).is_zero()


def test_ordinary_hochschild():
    assert ordinary_hochschild_dim(mat(2), 1) == 0
    assert ordinary_hochschild_dim(mat(2), 2) == 0
    assert ordinary_hochschild_dim(trunc_poly(3), 1) == 1
    assert ordinary_hochschild_dim(trunc_poly(3), 2) == 1
    assert [ordinary_hochschild_dim(trunc_poly(2), n) for n in (1, 2, 3)] == [1, 1, 1]
    assert ordinary_hochschild_dim(mat(2), 3) == 0


def test_current_cohomology_cells():
    assert current_cohomology_dim(mat(2), 1, 0) == 0
    assert current_cohomology_dim(mat(2), 2, 1) == 0
    assert current_cohomology_dim(trunc_poly(3), 1, 0) == 1
    for d in range(4):
        assert current_cohomology_dim(trunc_poly(2), 2, d) == 1


@pytest.mark.parametrize("name", ["builtin:mat:2", "builtin:truncpoly:2", "builtin:truncpoly:3"])
def test_first_cohomology_total(name):
    algebra = load_algebra(name)
    total = sum(current_cohomology_dim(algebra, 1, d) for d in range(4))
    assert total == algebra.square_codim()


def test_matrix_current_table_vanishes_small():
    report = current_cohomology_table(mat(2), 2, 2)
    assert report.totals == {1: 0, 2: 0}
    assert report.family == "Cur mat(2)"


@pytest.mark.slow
def test_matrix_current_table_vanishes():
    report = current_cohomology_table(mat(2), 3, 3)
    assert report.totals == {1: 0, 2: 0, 3: 0}


def test_e_m_matches_expansion():
    assert expand_to_bar(CurrentCochain.monomial((0,), (0, 1))) == e_m(0, 1, 0)
    assert e_m(0, 1, 1) == LinComb({((0, 1), (1, 0)): 1, ((0, 0), (1, 1)): -1})
    assert expand_to_bar(CurrentCochain.monomial((1,), (0, 1))) == e_m(0, 1, 1)
    assert e_m(0, 1, 2) == LinComb({((0, 2), (1, 0)): 1, ((0, 1), (1, 1)): -2, ((0, 0), (1, 2)): 1})
    assert expand_to_bar(CurrentCochain.monomial((2,), (0, 1))) == e_m(0, 1, 2)


def test_bar_differential_of_e_m():
    t3 = trunc_poly(3)
    assert bar_word_diff(t3, e_m(0, 0, 0)) == LinComb({((1, 0),): -1})
    for m in range(1, 5):
        assert bar_word_diff(t3, e_m(0, 0, m)) == 0


@pytest.mark.parametrize("algebra", [mat(2), trunc_poly(3)], ids=["mat2", "trunc3"])
def test_expansion_intertwines_differentials(algebra):
    for n in (2, 3):
        for d in range(3):
            for u in monomials(algebra, n, d):
                image = expand_to_bar(u)
                assert slotwise_derive_bar(image) == 0
                assert bar_word_diff(algebra, image) == expand_to_bar(current_diff(algebra, n, u))


@pytest.mark.parametrize("n, deg", [(2, 3), (3, 2), (4, 2)])
def test_kernel_of_total_derivative(n, deg):
    assert d_kernel_oracle(n, deg)


def test_kernel_oracle_rejects_wrong_substitution():
    assert not d_kernel_oracle(2, 3, substitution=lambda xs: [xs[0] + xs[1]])


def test_theorem_for_matrices_small():
    report = theorem_check(mat(2), 2, 2)
    assert report.ok
    assert all(c.status == "pass" for c in report.comparisons)


def test_theorem_for_truncated_polynomials():
    report = theorem_check(trunc_poly(3), 1, 3)
    assert report.ok
    first = report.comparisons[0]
    assert (first.left, first.right) == (1, 1)
    report = theorem_check(trunc_poly(2), 2, 2)
    assert report.ok
    assert any(c.status == "reported" for c in report.comparisons)
