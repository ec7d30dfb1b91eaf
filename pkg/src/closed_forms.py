"""Closed-form differentials and derivations for U(3) and U(2), and explicit kernel elements."""
from __future__ import annotations

import logging
from math import comb
from typing import Dict, Iterable

from sympy import QQ

from src.bar_morse import AnickChain, anick_diff_paths, chain_predicate, tilde_partial_general
from src.exact_linalg import Rational
from src.rewrite_core import U2, U3, FamilySpec, LinComb, accumulate, extend_linearly

logger = logging.getLogger(__name__)

DIFF_METHODS = ("closed", "paths")
DERIVATIONS = ("fast", "general")


def _sign(j: int) -> int:
    return 1 if j % 2 == 0 else -1


def _project(f: FamilySpec, acc: Dict[AnickChain, Rational]) -> LinComb:
    return LinComb({t: c for t, c in acc.items() if chain_predicate(f, t)})


def _merge_terms(acc: Dict[AnickChain, Rational], c: AnickChain, positions: Iterable[int]) -> None:
    """
    Contributions of merging slots j, j+1 (1-based, left index >= 2).

    Direct term a(a-1)/s at [..|s|..] with s = a+b-1; a v(0) travelling left from slot j
    lands on each earlier slot t as i_t(a-1)(b-1)/s [..|i_t-1|..|a+b|..]; a v(1) travelling
    left contributes ab(i_t-1)/s back on [..|s|..].
    """
    for j in positions:
        a, b = c[j - 1], c[j]
        s = a + b - 1
        head, tail = c[: j - 1], c[j + 1 :]
        sign = _sign(j)
        merged = head + (s,) + tail
        accumulate(acc, merged, sign * QQ(a * (a - 1), s))
        for t in range(1, j):
            it = c[t - 1]
            travelling_zero = QQ(it * (a - 1) * (b - 1), s)
            if travelling_zero:
                lowered = head[: t - 1] + (it - 1,) + head[t:]
                accumulate(acc, lowered + (a + b,) + tail, -sign * travelling_zero)
            travelling_one = QQ(a * b * (it - 1), s)
            if travelling_one:
                accumulate(acc, merged, sign * travelling_one)


def u3_diff(c: AnickChain) -> LinComb:
    """Closed-form Anick differential of U(3) on one chain, projected to chains."""
    c = tuple(c)
    if len(c) < 2:
        raise ValueError("the differential is defined on chains of length >= 2")
    if not chain_predicate(U3, c):
        raise ValueError(f"{c} is not a U3 chain")
    acc: Dict[AnickChain, Rational] = {}
    n = len(c) - 1
    if c[-2] != 1:
        _merge_terms(acc, c, range(1, n + 1))
        return _project(U3, acc)
    # chains ending in |1|0
    prefix = c[:-2]
    _merge_terms(acc, c, range(1, n - 1))
    for t in range(1, n):
        lowered = prefix[: t - 1] + (prefix[t - 1] - 1,) + prefix[t:]
        accumulate(acc, lowered + (1,), _sign(n) * QQ(prefix[t - 1]))
        accumulate(acc, prefix + (0,), _sign(n - 1) * QQ(prefix[t - 1] - 1))
    accumulate(acc, prefix + (0,), QQ(_sign(n)))
    return _project(U3, acc)


def u2_diff3(c: AnickChain) -> LinComb:
    c = tuple(c)
    if len(c) != 3 or not chain_predicate(U2, c):
        raise ValueError(f"{c} is not a U2 chain of length 3")
    n, m, p = c
    acc: Dict[AnickChain, Rational] = {}
    accumulate(acc, (n + m - 1, p), QQ(-n))
    accumulate(acc, (n, m + p - 1), QQ(m))
    accumulate(acc, (n - 1, m + p), QQ(n))
    return _project(U2, acc)


def anick_diff(
    f: FamilySpec, c: AnickChain, method: str = "closed", prune_zeros: bool = True
) -> LinComb:
    """Anick differential by closed forms where they exist, by paths otherwise."""
    if method not in DIFF_METHODS:
        raise ValueError(f"unknown differential method {method!r}")
    if method == "closed":
        if f.name == "U3":
            return u3_diff(c)
        if f.name == "U2" and len(c) == 3:
            return u2_diff3(c)
    return anick_diff_paths(f, tuple(c), prune_zeros=prune_zeros)


def tilde_partial_fast(f: FamilySpec, c: AnickChain) -> LinComb:
    if f.name not in ("U2", "U3"):
        return tilde_partial_general(f, c)
    acc: Dict[AnickChain, Rational] = {}
    for j, i in enumerate(c):
        if i:
            accumulate(acc, c[:j] + (i - 1,) + c[j + 1 :], QQ(i))
    return _project(f, acc)


def tilde_partial(f: FamilySpec, c: AnickChain, derivation: str = "fast") -> LinComb:
    if derivation not in DERIVATIONS:
        raise ValueError(f"unknown derivation {derivation!r}")
    if derivation == "fast":
        return tilde_partial_fast(f, tuple(c))
    return tilde_partial_general(f, tuple(c))


def k2_basis_explicit(d: int) -> LinComb:
    if d < 0:
        raise ValueError("degree must be nonnegative")
    if d == 1:
        return LinComb.basis((1, 0))
    if d in (0, 2):
        return LinComb()
    return LinComb({(d - s, s): (-1) ** s * comb(d, s) for s in range(d - 1)})


def f3_element() -> LinComb:
    return LinComb({(2, 2, 0): 1, (3, 1, 0): QQ(-2, 3)})


def append_index(x: LinComb, index: int) -> LinComb:
    return x.map_keys(lambda t: tuple(t) + (index,))


def _check_append_one_input(n: int, d: int, v: LinComb) -> None:
    if n < 2:
        raise ValueError("n must be at least 2")
    for t in v:
        if len(t) != n - 1 or sum(t) != d:
            raise ValueError(f"{t} is not of length {n - 1} and degree {d}")
        if not chain_predicate(U3, t) or t[-1] < 2:
            raise ValueError(f"{t} is not a U3 chain with last index >= 2")


def append_one_identity_check(n: int, d: int, v: LinComb) -> bool:
    """Check delta_n[v|1] = [delta_{n-1}(v)|1] + (-1)^(n-1) (d-n+1) v."""
    _check_append_one_input(n, d, v)
    lhs = extend_linearly(u3_diff, append_index(v, 1))
    lower = extend_linearly(u3_diff, v) if n >= 3 else LinComb()
    rhs = append_index(lower, 1).filter(lambda t: chain_predicate(U3, t)) + _sign(n - 1) * (d - n + 1) * v
    return lhs == rhs
