"""Kernel complex of the derivation and its per-degree cohomology."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Mapping, Tuple

from joblib import Parallel, delayed
from sympy import QQ

from src.bar_morse import AnickChain, chain_predicate, enumerate_chains
from src.closed_forms import anick_diff, append_index, tilde_partial
from src.exact_linalg import (
    RationalVector,
    SparseRationalMatrix,
    StructuralError,
    nullspace_and_free_columns,
    nullspace_basis,
    quotient_dim,
    span_rank,
)
from src.reporting import CellRecord, CohomologyReport
from src.rewrite_core import U3, FamilySpec, LinComb, extend_linearly, family_by_name

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GradedChainSpace:
    family: FamilySpec
    length: int
    degree: int
    basis: Tuple[AnickChain, ...]
    _index: Dict[AnickChain, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.basis)})

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, c: AnickChain) -> int:
        try:
            return self._index[c]
        except KeyError:
            raise StructuralError(
                f"{c} is not a chain of length {self.length} and degree {self.degree}"
            ) from None

    def coordinates(self, x: LinComb) -> RationalVector:
        return RationalVector(self.dim, tuple((self.index(c), coeff) for c, coeff in x.items()))

    def combination(self, vec: RationalVector) -> LinComb:
        return LinComb({self.basis[i]: value for i, value in vec.entries})


@lru_cache(maxsize=None)
def chain_space(f: FamilySpec, n: int, d: int) -> GradedChainSpace:
    return GradedChainSpace(f, n, d, enumerate_chains(f, n, d))


@dataclass(frozen=True)
class KernelSpace:
    """
    Basis of Ker d~ inside a chain space.

    Vectors are in reduced echelon parametrization: vector k is 1 at free_columns[k]
    and 0 at the other free columns.
    """

    space: GradedChainSpace
    vectors: Tuple[RationalVector, ...]
    free_columns: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def elements(self) -> List[LinComb]:
        return [self.space.combination(vec) for vec in self.vectors]

    def coordinates(self, vec: RationalVector) -> RationalVector:
        coords = [vec.get(j) for j in self.free_columns]
        rebuilt = RationalVector(self.space.dim)
        for value, basis_vec in zip(coords, self.vectors):
            if value:
                rebuilt = rebuilt + basis_vec.scale(value)
        if rebuilt != vec:
            raise StructuralError(
                f"vector leaves the kernel at n={self.space.length}, d={self.space.degree}"
            )
        return RationalVector.from_dense(coords)


# --- matrices -------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _delta_of_chain(f: FamilySpec, c: AnickChain, method: str, prune_zeros: bool) -> LinComb:
    return anick_diff(f, c, method=method, prune_zeros=prune_zeros)


def tilde_matrix(f: FamilySpec, n: int, d: int, derivation: str = "fast") -> SparseRationalMatrix:
    source = chain_space(f, n, d)
    target = chain_space(f, n, d - 1)
    columns = [target.coordinates(tilde_partial(f, c, derivation)) for c in source.basis]
    return SparseRationalMatrix.from_columns(target.dim, columns)


def delta_matrix(
    f: FamilySpec, n: int, d: int, method: str = "closed", prune_zeros: bool = True
) -> SparseRationalMatrix:
    source = chain_space(f, n, d)
    if n == 1:
        return SparseRationalMatrix.zero(0, source.dim)
    target = chain_space(f, n - 1, d - 1)
    columns = [target.coordinates(_delta_of_chain(f, c, method, prune_zeros)) for c in source.basis]
    return SparseRationalMatrix.from_columns(target.dim, columns)


@lru_cache(maxsize=None)
def kernel_basis(f: FamilySpec, n: int, d: int, *, derivation: str = "fast") -> KernelSpace:
    if n < 1:
        raise ValueError("chain length must be at least 1")
    space = chain_space(f, n, d)
    vectors, free = nullspace_and_free_columns(tilde_matrix(f, n, d, derivation))
    logger.debug("%s K_%d^(%d): %d of %d", f.name, n, d, len(vectors), space.dim)
    return KernelSpace(space, tuple(vectors), tuple(free))


@lru_cache(maxsize=None)
def restricted_diff_matrix(
    f: FamilySpec,
    n: int,
    d: int,
    *,
    method: str = "closed",
    derivation: str = "fast",
    prune_zeros: bool = True,
) -> SparseRationalMatrix:
    """delta_n restricted to K_n^(d) -> K_{n-1}^(d-1), in kernel coordinates."""
    source = kernel_basis(f, n, d, derivation=derivation)
    if n == 1:
        return SparseRationalMatrix.zero(0, source.dim)
    target = kernel_basis(f, n - 1, d - 1, derivation=derivation)
    columns = []
    for element in source.elements():
        image = extend_linearly(lambda c: _delta_of_chain(f, c, method, prune_zeros), element)
        columns.append(target.coordinates(target.space.coordinates(image)))
    return SparseRationalMatrix.from_columns(target.dim, columns)


def _kernel_and_images(
    f: FamilySpec, n: int, d: int, method: str, derivation: str, prune_zeros: bool
) -> Tuple[KernelSpace, List[RationalVector], List[RationalVector]]:
    opts = dict(method=method, derivation=derivation, prune_zeros=prune_zeros)
    space = kernel_basis(f, n, d, derivation=derivation)
    cycles = nullspace_basis(restricted_diff_matrix(f, n, d, **opts))
    images = restricted_diff_matrix(f, n + 1, d + 1, **opts).columns()
    return space, cycles, images


def cohomology_dim(
    f: FamilySpec,
    n: int,
    d: int,
    *,
    method: str = "closed",
    derivation: str = "fast",
    prune_zeros: bool = True,
) -> CellRecord:
    if n < 1:
        raise ValueError("n must be at least 1")
    space, cycles, images = _kernel_and_images(f, n, d, method, derivation, prune_zeros)
    coh = quotient_dim(cycles, images)
    return CellRecord(
        n=n,
        d=d,
        dim_space=space.space.dim,
        dim_kernel=space.dim,
        dim_ker_delta=len(cycles),
        dim_im_delta=span_rank(images),
        cohomology=coh,
    )


def _cell(name: str, n: int, d: int, method: str, derivation: str, prune_zeros: bool) -> CellRecord:
    f = family_by_name(name)
    record = cohomology_dim(f, n, d, method=method, derivation=derivation, prune_zeros=prune_zeros)
    logger.info("%s (n=%d, d=%d): H=%d", name, n, d, record.cohomology)
    return record


def cohomology_table(
    f: FamilySpec,
    n_max: int,
    d_max: int,
    *,
    method: str = "closed",
    derivation: str = "fast",
    prune_zeros: bool = True,
    jobs: int = 1,
) -> CohomologyReport:
    if n_max < 1 or d_max < 1:
        raise ValueError("n_max and d_max must be at least 1")
    cells = [(n, d) for n in range(1, n_max + 1) for d in range(d_max + 1)]
    if jobs == 1:
        records = [_cell(f.name, n, d, method, derivation, prune_zeros) for n, d in cells]
    else:
        records = Parallel(n_jobs=jobs)(
            delayed(_cell)(f.name, n, d, method, derivation, prune_zeros) for n, d in cells
        )
    report = CohomologyReport(
        family=f.name,
        n_max=n_max,
        deg_max=d_max,
        entries=sorted(records, key=lambda r: (r.n, r.d)),
        settings={"method": method, "derivation": derivation, "prune_zeros": prune_zeros},
    )
    return report


# --- explicit descriptions ------------------------------------------------------------


def is_regular(c: AnickChain) -> bool:
    return all(i >= 2 for i in c)


def regular_dim(f: FamilySpec, n: int, d: int) -> int:
    if n < 1:
        raise ValueError("chain length must be at least 1")
    return sum(1 for c in enumerate_chains(f, n, d) if is_regular(c))


def seed_basis(n: int, d: int) -> List[Dict[int, LinComb]]:
    """One seed per regular chain in an admissible slot (j = 1 or j >= 3)."""
    if n < 3:
        raise ValueError("seeds exist for n >= 3")
    seeds = []
    for j in [1] + list(range(3, d + 1)):
        for c in enumerate_chains(U3, n - 2, d - j):
            if is_regular(c):
                seeds.append({j: LinComb.basis(c)})
    return seeds


def _check_seed(n: int, d: int, seed: Mapping[int, LinComb]) -> None:
    for j, part in seed.items():
        if j < 1 or j == 2:
            raise ValueError(f"slot {j} cannot carry a seed; use 1 or j >= 3")
        for c in part:
            if len(c) != n - 2 or sum(c) != d - j:
                raise ValueError(f"seed {c} at slot {j} is not of length {n - 2} and degree {d - j}")
            if not is_regular(c):
                raise ValueError(f"seed {c} at slot {j} is not a regular chain")


def _drop_last(x: LinComb) -> LinComb:
    return x.map_keys(lambda t: t[:-1])


def _tilde(f: FamilySpec, x: LinComb) -> LinComb:
    return _tilde_with(f, x, "fast")


def _chains_only(f: FamilySpec, x: LinComb) -> LinComb:
    return x.filter(lambda t: chain_predicate(f, t))


def reconstruct_from_seed(f: FamilySpec, n: int, d: int, seed: Mapping[int, LinComb]) -> LinComb:
    """
    Rebuild the element of K_n^(d) determined by a regular seed.

    The element is written as sum_i [a_i|i] grouped by last index. a_0 carries the seed,
    and each a_{i+1} is forced by the chains ending in i.
    """
    if f is not U3:
        raise ValueError("seed reconstruction is implemented for U3 only")
    if n < 3:
        raise ValueError("n must be at least 3")
    _check_seed(n, d, seed)
    v1 = seed.get(1, LinComb())
    v2 = _drop_last(_chains_only(f, append_index(_tilde(f, v1), 1))) * QQ(-1, 2)
    a = append_index(v1, 1) + append_index(v2, 2)
    for j, part in sorted(seed.items()):
        if j >= 3:
            a = a + append_index(part, j)
    element = LinComb()
    i = 0
    while a and i <= d:
        element = element + append_index(a, i)
        forced = _drop_last(_chains_only(f, append_index(_tilde(f, a), i)))
        a = forced * QQ(-1, i + 1)
        i += 1
    residue = _tilde(f, element)
    if residue:
        raise StructuralError(f"reconstructed element is not in the kernel: {residue}")
    return element


def cohomology_representatives(
    f: FamilySpec,
    n: int,
    d: int,
    *,
    method: str = "closed",
    derivation: str = "fast",
    prune_zeros: bool = True,
) -> List[LinComb]:
    """Chain combinations whose classes form a basis of Ker delta~_n / Im delta~_{n+1}."""
    space, cycles, images = _kernel_and_images(f, n, d, method, derivation, prune_zeros)
    spanned = [v for v in images if not v.is_zero()]
    current = span_rank(spanned)
    chosen: List[RationalVector] = []
    for cycle in cycles:
        if span_rank(spanned + [cycle]) > current:
            spanned.append(cycle)
            current += 1
            chosen.append(cycle)
    out = []
    for coords in chosen:
        vec = RationalVector(space.space.dim)
        for k, value in coords.entries:
            vec = vec + space.vectors[k].scale(value)
        out.append(space.space.combination(vec))
    return out


def filtration_check(f: FamilySpec, n: int, k: int, d: int, method: str = "closed") -> bool:
    """delta_n maps chains with last index >= k to combinations of such chains."""
    if n < 2:
        raise ValueError("n must be at least 2")
    for c in enumerate_chains(f, n, d):
        if c[-1] < k:
            continue
        image = _delta_of_chain(f, c, method, True)
        if any(t[-1] < k for t in image):
            logger.warning("%s: delta%s leaves the filtration level %d", f.name, c, k)
            return False
    return True


def composition_check(
    f: FamilySpec,
    n: int,
    d: int,
    *,
    method: str = "closed",
    derivation: str = "fast",
    prune_zeros: bool = True,
) -> bool:
    """delta~_{n-1} after delta~_n vanishes on K_n^(d)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    opts = dict(method=method, derivation=derivation, prune_zeros=prune_zeros)
    upper = restricted_diff_matrix(f, n, d, **opts)
    lower = restricted_diff_matrix(f, n - 1, d - 1, **opts)
    return lower.matmul(upper).is_zero()


def _tilde_with(f: FamilySpec, x: LinComb, derivation: str) -> LinComb:
    return extend_linearly(lambda c: tilde_partial(f, c, derivation), x)


def _delta_all(f: FamilySpec, x: LinComb, method: str) -> LinComb:
    return extend_linearly(lambda c: _delta_of_chain(f, c, method, True), x)


def derivation_commutes(
    f: FamilySpec, c: AnickChain, derivation: str = "fast", method: str = "closed"
) -> bool:
    """delta(d~ c) == d~(delta c) for one chain of length >= 2."""
    if len(c) < 2:
        raise ValueError("chain length must be at least 2")
    lhs = _delta_all(f, tilde_partial(f, c, derivation), method)
    rhs = _tilde_with(f, _delta_of_chain(f, c, method, True), derivation)
    return lhs == rhs
