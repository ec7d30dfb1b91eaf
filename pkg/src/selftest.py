"""Named invariant suites runnable from the command line."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from src.bar_morse import (
    anick_diff_paths,
    chain_predicate,
    chain_to_vertex,
    enumerate_chains,
    explicit_chain_form,
    matching_involution_holds,
    morse_graph,
    tilde_partial_general,
)
from src.closed_forms import anick_diff, k2_basis_explicit, tilde_partial_fast
from src.current_conformal import (
    CurrentCochain,
    current_diff,
    d_kernel_oracle,
    load_algebra,
    theorem_check,
    y_monomials,
)
from src.exact_linalg import StructuralError, span_rank
from src.kernel_cohomology import (
    chain_space,
    composition_check,
    derivation_commutes,
    kernel_basis,
)
from src.rewrite_core import FAMILIES, U2, U3, check_defining_relations, is_reduced_shape, word_normal_form

logger = logging.getLogger(__name__)

SUITES = ("all", "rewrite", "morse", "derivation", "kernels", "current")

Detail = Optional[str]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: Detail = None

    def as_dict(self) -> Dict[str, object]:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteReport:
    suite: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> Dict[str, object]:
        return {"suite": self.suite, "ok": self.ok, "checks": [c.as_dict() for c in self.checks]}

    def render(self) -> str:
        lines = [f"[{'PASS' if c.passed else 'FAIL'}] {c.name}" + (f": {c.detail}" if c.detail else "") for c in self.checks]
        lines.append(f"{self.suite}: {sum(c.passed for c in self.checks)}/{len(self.checks)} passed")
        return "\n".join(lines) + "\n"


def _first_failure(cases, predicate) -> Detail:
    for case in cases:
        if not predicate(case):
            return f"fails at {case}"
    return None


def _chains(f, n_max: int, d_max: int, n_min: int = 2):
    for n in range(n_min, n_max + 1):
        for d in range(d_max + 1):
            yield from enumerate_chains(f, n, d)


# --- rewrite --------------------------------------------------------------------------


def _relations() -> Detail:
    for f in FAMILIES.values():
        report = check_defining_relations(f, 6)
        if not report.ok:
            first = report.failures[0]
            return f"{f.name} {first.relation} at ({first.n}, {first.m})"
    return None


def _words(max_len: int, max_index: int):
    for length in range(1, max_len + 1):
        yield from itertools.product(range(max_index + 1), repeat=length)


def _confluence() -> Detail:
    return _first_failure(
        ((f, w) for f in FAMILIES.values() for w in _words(3, 4)),
        lambda case: word_normal_form(case[0], case[1], "leftmost") == word_normal_form(case[0], case[1], "rightmost"),
    )


def _reduced_shapes() -> Detail:
    return _first_failure(
        ((f, w) for f in FAMILIES.values() for w in _words(3, 4)),
        lambda case: all(is_reduced_shape(case[0], u) for u, _ in word_normal_form(*case)),
    )


# --- morse ----------------------------------------------------------------------------


def _chain_forms() -> Detail:
    return _first_failure(
        ((f, t) for f in FAMILIES.values() for t in itertools.product(range(4), repeat=3)),
        lambda case: chain_predicate(*case) == explicit_chain_form(*case),
    )


def _involution() -> Detail:
    def holds(case) -> bool:
        f, c = case
        graph = morse_graph(f)
        return all(matching_involution_holds(f, b) for b in graph.band_vertices(chain_to_vertex(c)))

    return _first_failure(((f, c) for f in FAMILIES.values() for c in _chains(f, 3, 5)), holds)


def _paths_vs_closed() -> Detail:
    u3 = ((U3, c) for c in _chains(U3, 4, 7))
    u2 = ((U2, c) for d in range(8) for c in enumerate_chains(U2, 3, d))
    return _first_failure(
        itertools.chain(u3, u2),
        lambda case: anick_diff(*case, method="closed") == anick_diff(*case, method="paths"),
    )


def _pruning() -> Detail:
    return _first_failure(
        ((f, c) for f in FAMILIES.values() for c in _chains(f, 4, 6)),
        lambda case: anick_diff_paths(*case, prune_zeros=True) == anick_diff_paths(*case, prune_zeros=False),
    )


# --- derivation -----------------------------------------------------------------------


def _fast_vs_general() -> Detail:
    return _first_failure(
        ((f, c) for f in FAMILIES.values() for c in _chains(f, 3, 6, n_min=1)),
        lambda case: tilde_partial_fast(*case) == tilde_partial_general(*case),
    )


def _chain_map() -> Detail:
    return _first_failure(
        ((f, c) for f in FAMILIES.values() for c in _chains(f, 3, 6)),
        lambda case: derivation_commutes(*case),
    )


# --- kernels --------------------------------------------------------------------------


def _k3_dims() -> Detail:
    return _first_failure(range(4, 9), lambda d: kernel_basis(U3, 3, d).dim == d - 3)


def _k2_explicit() -> Detail:
    def spans(d: int) -> bool:
        kernel = kernel_basis(U3, 2, d)
        explicit = chain_space(U3, 2, d).coordinates(k2_basis_explicit(d))
        return kernel.dim == 1 and span_rank(list(kernel.vectors) + [explicit]) == 1

    return _first_failure([1] + list(range(3, 9)), spans)


def _restricted_squares() -> Detail:
    return _first_failure(
        ((f, n, d) for f in FAMILIES.values() for n in range(2, 5) for d in range(8)),
        lambda case: composition_check(*case),
    )


# --- current --------------------------------------------------------------------------


def _current_square() -> Detail:
    algebra = load_algebra("builtin:truncpoly:3")

    def vanishes(case) -> bool:
        n, d = case
        for exps in y_monomials(n, d):
            for word in itertools.product(range(algebra.dim), repeat=n):
                u = CurrentCochain.monomial(exps, word)
                if not current_diff(algebra, n - 1, current_diff(algebra, n, u)).is_zero():
                    return False
        return True

    return _first_failure(((n, d) for n in range(3, 5) for d in range(3)), vanishes)


def _oracle() -> Detail:
    return _first_failure(range(2, 4), lambda n: d_kernel_oracle(n, 3))


def _current_theorem() -> Detail:
    failures = []
    for spec, n_max in (("builtin:mat:2", 2), ("builtin:truncpoly:3", 2)):
        report = theorem_check(load_algebra(spec), n_max, 2)
        failures.extend(f"{report.algebra}: {c.name}" for c in report.comparisons if c.status == "fail")
    return "; ".join(failures) or None


CheckFn = Callable[[], Detail]

CHECKS: Dict[str, List[Tuple[str, CheckFn]]] = {
    "rewrite": [
        ("defining relations reduce to zero", _relations),
        ("leftmost and rightmost normal forms agree", _confluence),
        ("normal forms have reduced shape", _reduced_shapes),
    ],
    "morse": [
        ("chain predicate matches explicit form", _chain_forms),
        ("matching is an involution", _involution),
        ("closed forms equal path sums", _paths_vs_closed),
        ("zero pruning leaves differentials unchanged", _pruning),
    ],
    "derivation": [
        ("fast and general derivations agree", _fast_vs_general),
        ("derivation commutes with the differential", _chain_map),
    ],
    "kernels": [
        ("dim K3 = d - 3", _k3_dims),
        ("explicit K2 basis spans the kernel", _k2_explicit),
        ("restricted differentials compose to zero", _restricted_squares),
    ],
    "current": [
        ("current differential squares to zero", _current_square),
        ("kernel of the total derivative is generated by differences", _oracle),
        ("current cohomology matches ordinary cohomology", _current_theorem),
    ],
}


def _run(name: str, check: CheckFn) -> CheckResult:
    try:
        detail = check()
    except StructuralError as exc:
        return CheckResult(name, False, f"structural error: {exc}")
    logger.info("%s: %s", name, "ok" if detail is None else detail)
    return CheckResult(name, detail is None, detail)


def run_suite(name: str) -> SuiteReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    groups = [s for s in SUITES if s != "all"] if name == "all" else [name]
    report = SuiteReport(name)
    for group in groups:
        for check_name, check in CHECKS[group]:
            report.checks.append(_run(f"{group}: {check_name}", check))
    return report
