"""Shifted group codes, quasi group codes, and nested pairs with bins.

A shifted group code is the image of ``u -> u G + b`` over all of
``Z_{p^r}^k``.  A quasi group code (QGC) restricts the same map to a
typicality-built index set; nested QGCs pair an inner code with an outer
shift code, and each outer index ``v`` defines the bin = inner codebook
shifted by ``v G_out + b_out``.

Random ensembles draw every entry of ``G`` (row-major) and then ``b``
i.i.d. uniformly from a caller-supplied seeded generator, so codebooks are
reproducible across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .prob import Pmf
from .typical import (
    IndexSetSpec,
    enumerate_index_set,
    index_set_log_size,
    index_set_membership,
    index_set_size,
)
from .zring import Modulus


@dataclass(frozen=True)
class GroupCode:
    """Generator matrix ``G`` (``k x n``) and translation vector ``b`` (``n``)."""

    g: np.ndarray
    b: np.ndarray
    mod: Modulus

    def __post_init__(self) -> None:
        g = np.asarray(self.g, dtype=np.int64) % self.mod.m
        b = np.asarray(self.b, dtype=np.int64) % self.mod.m
        if g.ndim != 2 or b.ndim != 1 or g.shape[1] != b.shape[0]:
            raise ValidationError(
                f"inconsistent shapes: G {g.shape}, b {b.shape}"
            )
        g.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "b", b)

    @property
    def k(self) -> int:
        return self.g.shape[0]

    @property
    def n(self) -> int:
        return self.g.shape[1]


@dataclass(frozen=True)
class Qgc:
    """A quasi group code: a shifted group code restricted to an index set."""

    code: GroupCode
    index: IndexSetSpec

    def __post_init__(self) -> None:
        if self.index.k != self.code.k:
            raise ValidationError(
                f"index length {self.index.k} != generator rows {self.code.k}"
            )

    @property
    def mod(self) -> Modulus:
        return self.code.mod

    @property
    def n(self) -> int:
        return self.code.n


@dataclass(frozen=True)
class NestedQgc:
    """Inner code plus outer shift code over the same ambient space."""

    inner: Qgc
    outer_shift: Qgc

    def __post_init__(self) -> None:
        if self.inner.n != self.outer_shift.n or self.inner.mod != self.outer_shift.mod:
            raise ValidationError("nested components must share n and modulus")


@dataclass(frozen=True)
class Bin:
    """One bin of a nested code: outer index ``v`` and its shift vector."""

    v: Tuple[int, ...]
    shift: Tuple[int, ...]


def sample_code(rng: np.random.Generator, k: int, n: int, mod: Modulus) -> GroupCode:
    """Draw ``G`` (row-major) then ``b`` with i.i.d. uniform entries."""
    if k < 1 or n < 1:
        raise ValidationError(f"k={k}, n={n} must be >= 1")
    g = rng.integers(0, mod.m, size=(k, n), dtype=np.int64)
    b = rng.integers(0, mod.m, size=n, dtype=np.int64)
    return GroupCode(g, b, mod)


def encode(c: Qgc, u: Sequence[int], check: bool = True) -> Tuple[int, ...]:
    """Codeword ``u G + b`` for an index-set member ``u``."""
    if check and not index_set_membership(u, c.index):
        raise ValidationError("index sequence is not a member of the index set")
    word = (np.asarray(u, dtype=np.int64) @ c.code.g + c.code.b) % c.mod.m
    return tuple(int(x) for x in word)


def enumerate_codebook(c: Qgc) -> Dict[Tuple[int, ...], int]:
    """Distinct codewords with multiplicities (collisions of the index map)."""
    book: Dict[Tuple[int, ...], int] = {}
    for u in enumerate_index_set(c.index):
        word = encode(c, u, check=False)
        book[word] = book.get(word, 0) + 1
    return book


def rate(c: Qgc) -> Tuple[float, float]:
    """``(codeword_rate, index_rate)`` in bits per symbol.

    The codeword rate uses the deduplicated codebook size; the index rate
    uses the exact index-set size.  The former never exceeds the latter.
    """
    book = enumerate_codebook(c)
    n = c.n
    codeword_rate = float(np.log2(len(book))) / n if book else float("-inf")
    index_rate = index_set_log_size(c.index) / n
    return codeword_rate, index_rate


def sum_index_specs(s1: IndexSetSpec, s2: IndexSetSpec) -> IndexSetSpec:
    """Index set of a code sum: blocks of both specs, re-weighted by length.

    The combined selector ranges over pairs (source code, original ``q``)
    with weight ``k_i/(k_1+k_2)`` times the original weight, matching the
    stacked-rows layout of the summed generator.
    """
    k = s1.k + s2.k
    weights: List[Fraction] = []
    laws: List[Pmf] = []
    for spec, ki in ((s1, s1.k), (s2, s2.k)):
        for w, law in zip(spec.q_weights, spec.cond_u):
            weights.append(w * Fraction(ki, k))
            laws.append(law)
    eps = max(s1.eps, s2.eps)
    return IndexSetSpec(tuple(weights), tuple(laws), k, eps)


def sum_codes(c1: Qgc, c2: Qgc) -> Qgc:
    """The code of pairwise sums: stacked generators, summed translations."""
    if c1.n != c2.n or c1.mod != c2.mod:
        raise ValidationError("summands must share n and modulus")
    g = np.vstack([c1.code.g, c2.code.g])
    b = (c1.code.b + c2.code.b) % c1.mod.m
    return Qgc(GroupCode(g, b, c1.mod), sum_index_specs(c1.index, c2.index))


def bin_of(nc: NestedQgc, v: Sequence[int]) -> Bin:
    """The bin handle for outer index ``v``: its shift ``v G_out + b_out``."""
    if not index_set_membership(v, nc.outer_shift.index):
        raise ValidationError("v is not a member of the outer index set")
    shift = encode(nc.outer_shift, v, check=False)
    return Bin(tuple(int(x) for x in v), shift)


def bin_members(nc: NestedQgc, v: Sequence[int]) -> set:
    """All codewords of the bin: inner codebook shifted by the bin shift."""
    shift = np.asarray(bin_of(nc, v).shift, dtype=np.int64)
    m = nc.inner.mod.m
    return {
        tuple(int(x) for x in (np.asarray(word, dtype=np.int64) + shift) % m)
        for word in enumerate_codebook(nc.inner)
    }


def injectivity_probe(c: Qgc, rng: np.random.Generator, trials: int) -> float:
    """Fraction of sampled index members whose codeword has a unique preimage."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    members = list(enumerate_index_set(c.index))
    book = enumerate_codebook(c)
    hits = 0
    for _ in range(trials):
        u = members[int(rng.integers(0, len(members)))]
        if book[encode(c, u, check=False)] == 1:
            hits += 1
    return hits / trials


def transversal_index_spec(
    mod: Modulus, level_counts: Sequence[Tuple[int, int]]
) -> IndexSetSpec:
    """Index set of a transversal group code.

    ``level_counts`` lists ``(s, count)`` pairs; the index set is the
    Cartesian product of ``count`` uniform draws from the transversal
    ``T_s = {0, ..., p^s - 1}`` for each listed level.  Levels with ``s = 0``
    would contribute only the zero letter and are rejected (use a point-mass
    block explicitly if needed).
    """
    weights: List[Fraction] = []
    laws: List[Pmf] = []
    k = sum(count for _, count in level_counts)
    if k < 1:
        raise ValidationError("transversal code needs at least one index letter")
    for s, count in level_counts:
        mod.check_level(s)
        if s < 1:
            raise ValidationError("transversal blocks need level s >= 1")
        if count < 1:
            raise ValidationError("block counts must be >= 1")
        size = mod.p**s
        law = Pmf(
            tuple(1.0 / size if a < size else 0.0 for a in range(mod.m))
        )
        weights.append(Fraction(count, k))
        laws.append(law)
    # a slack of the full alphabet size admits every sequence over the support
    return IndexSetSpec(tuple(weights), tuple(laws), k, float(mod.m))


def full_index_spec(mod: Modulus, k: int) -> IndexSetSpec:
    """Index set admitting all of ``Z_{p^r}^k`` (uniform law, maximal slack)."""
    return IndexSetSpec(
        (Fraction(1),), (Pmf.uniform(mod.m),), k, float(mod.m)
    )
