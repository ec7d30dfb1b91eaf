import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.bar_morse import (
    CRITICAL,
    MorseClass,
    MorseKind,
    anick_diff_paths,
    bar_diff,
    chain_predicate,
    chain_to_vertex,
    classify,
    enumerate_chains,
    explicit_chain_form,
    g_map,
    matching_involution_holds,
    morse_graph,
    morse_paths,
    partner,
    project_chains,
    vertex_to_chain,
)
from src.rewrite_core import U2, U3, LinComb, extend_linearly

families = st.sampled_from([U2, U3])


def window(family, n_max, d_max, n_min=2):
    for n in range(n_min, n_max + 1):
        for d in range(d_max + 1):
            yield from enumerate_chains(family, n, d)


def test_enumerate_chains_is_lexicographic():
    assert enumerate_chains(U3, 2, 3) == ((2, 1), (3, 0))
    assert enumerate_chains(U3, 3, 3) == ((2, 1, 0),)
    assert enumerate_chains(U3, 2, -1) == ()


def test_u2_chains():
    assert enumerate_chains(U2, 2, 1) == ((1, 0),)
    assert not chain_predicate(U2, (0, 1))


@given(families, st.lists(st.integers(0, 5), min_size=1, max_size=4).map(tuple))
def test_chain_predicate_matches_explicit_form(family, t):
    assert chain_predicate(family, t) == explicit_chain_form(family, t)


def test_chain_vertex_conversion():
    assert vertex_to_chain(U3, chain_to_vertex((2, 1, 0))) == (2, 1, 0)
    assert vertex_to_chain(U3, ((2,), (0, 1))) is None
    assert vertex_to_chain(U3, ((1,), (1,))) is None


def test_classify_and_partner():
    assert classify(U3, ((2,), (1,), (0,))) is CRITICAL
    merged = ((2,), (0, 1))
    split = ((2,), (0,), (1,))
    assert classify(U3, merged) == MorseClass(MorseKind.MERGED_END, 2)
    assert partner(U3, merged) == split
    assert classify(U3, split) == MorseClass(MorseKind.SPLIT_END, 2)
    assert partner(U3, split) == merged
    assert partner(U3, ((3,), (0,))) is None


def test_bar_differential_of_one_zero():
    expected = LinComb({((0, 1),): -1, ((0,),): -1})
    assert bar_diff(U3, ((1,), (0,))) == expected


@pytest.mark.parametrize("family", [U2, U3])
def test_matching_is_an_involution_on_visited_vertices(family):
    graph = morse_graph(family)
    for c in window(family, 3, 5):
        for b in graph.band_vertices(chain_to_vertex(c)):
            assert matching_involution_holds(family, b)


@pytest.mark.parametrize("family", [U2, U3])
def test_matching_edges_are_invertible(family):
    graph = morse_graph(family)
    for c in window(family, 3, 5):
        for b in graph.band_vertices(chain_to_vertex(c)):
            up = graph.up_edge(b)
            if up is not None:
                assert up[1] in (1, -1)


@pytest.mark.slow
@pytest.mark.parametrize("family", [U2, U3])
def test_matching_is_an_involution_full_window(family):
    graph = morse_graph(family)
    for c in window(family, 5, 10):
        for b in graph.band_vertices(chain_to_vertex(c)):
            assert matching_involution_holds(family, b), b


def test_anick_differential_by_paths_on_small_chains():
    assert anick_diff_paths(U3, (1, 0)) == LinComb({(0,): -1})
    assert anick_diff_paths(U3, (2, 2, 0)) == LinComb({(2, 1): 2, (3, 0): (-2, 3)})
    assert anick_diff_paths(U2, (2, 1, 0)) == LinComb({(1, 1): 2, (2, 0): -1})
    assert anick_diff_paths(U2, (1, 1, 0)) == LinComb()


@pytest.mark.parametrize("n, m", list(itertools.product(range(2, 5), range(0, 4))))
def test_delta_two_by_paths(n, m):
    expected = LinComb({(n + m - 1,): (-n * (n - 1), n + m - 1)})
    assert anick_diff_paths(U3, (n, m)) == expected


@pytest.mark.parametrize("family", [U2, U3])
def test_zero_pruning_keeps_differentials(family):
    for c in window(family, 4, 6):
        assert anick_diff_paths(family, c, prune_zeros=True) == anick_diff_paths(family, c, prune_zeros=False)


@pytest.mark.slow
@pytest.mark.parametrize("family", [U2, U3])
def test_zero_pruning_keeps_differentials_full_window(family):
    for c in window(family, 5, 10):
        assert anick_diff_paths(family, c, prune_zeros=True) == anick_diff_paths(family, c, prune_zeros=False), c


def test_paths_reject_non_chains():
    with pytest.raises(ValueError):
        anick_diff_paths(U3, (1, 1))
    with pytest.raises(ValueError):
        anick_diff_paths(U3, (3,))


def test_g_map_fixes_the_chain_itself():
    for c in window(U3, 3, 5):
        assert g_map(U3, c).coefficient(chain_to_vertex(c)) == 1


def test_projection_drops_non_chains():
    x = LinComb({((2,), (1,)): 1, ((1,), (1,)): 5, ((2,), (0, 1)): 7})
    assert project_chains(U3, x) == LinComb({(2, 1): 1})


def test_morse_paths_to_critical_cells():
    def terminal(b):
        return len(b) == 1 and classify(U3, b).is_critical

    paths = morse_paths(U3, chain_to_vertex((1, 0)), terminal, floor=1)
    assert paths == LinComb({((0,),): -1})


@pytest.mark.parametrize("family", [U2, U3])
def test_morse_paths_from_two_zero(family):
    def terminal(b):
        return len(b) == 1 and classify(family, b).is_critical

    paths = morse_paths(family, chain_to_vertex((2, 0)), terminal, floor=1)
    assert paths == LinComb({((1,),): -2})


@pytest.mark.parametrize("family", [U2, U3])
def test_g_map_on_two_zero(family):
    assert g_map(family, (2, 0)) == LinComb({((2,), (0,)): 1, ((0,), (2,)): -1})


def test_u2_up_step_splits_the_first_word():
    graph = morse_graph(U2)
    assert graph.up_edge(((0, 3), (0,))) == (((0,), (3,), (0,)), 1)


def test_classify_named_cells():
    assert classify(U2, ((0, 3), (0,))) == MorseClass(MorseKind.MERGED_END, 1)
    assert classify(U3, ((2,), (1,), (1,))) == MorseClass(MorseKind.SPLIT_END, 2)


def _squares_to_zero(family, n_max, d_max):
    for c in window(family, n_max, d_max, n_min=3):
        once = anick_diff_paths(family, c)
        assert extend_linearly(lambda t: anick_diff_paths(family, t), once) == 0, c


@pytest.mark.parametrize("family", [U2, U3])
def test_anick_differential_squares_to_zero(family):
    _squares_to_zero(family, 4, 6)


@pytest.mark.slow
@pytest.mark.parametrize("family", [U2, U3])
def test_anick_differential_squares_to_zero_full_window(family):
    _squares_to_zero(family, 5, 10)
