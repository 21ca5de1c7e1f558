"""Letter-typical sets and Cartesian-product index sets.

A length-``n`` sequence ``x`` over a finite alphabet is ``eps``-typical for a
PMF ``P`` when every letter frequency satisfies
``|N(a|x)/n - P(a)| <= eps/|alphabet|`` *and* no zero-probability letter
occurs.  Counting and enumeration work by the method of types: admissible
letter-count vectors are walked directly, so exact counts never materialize
sequences.

An :class:`IndexSetSpec` describes the index set of a quasi group code: the
total length ``k`` is split into per-``q`` blocks of exact length
``P_Q(q) * k`` (the weights are exact fractions so the split is integral by
construction), and the set is the Cartesian product of the per-block typical
sets, concatenated in declared block order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .errors import GuardExceeded, ValidationError
from .prob import JointPmf, Pmf

#: Guard on the number of letter-count vectors examined by exact counting.
COMPOSITION_GUARD = 10_000_000
#: Guard on the number of sequences materialized by enumeration.
ENUMERATION_GUARD = 1_000_000
#: Absolute slack absorbing float error in the frequency-bound comparison.
_BOUND_SLOP = 1e-9


@dataclass(frozen=True)
class TypicalSpec:
    """Typicality parameters: a PMF, a blocklength, and a slack ``eps > 0``."""

    pmf: Pmf
    n: int
    eps: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"blocklength n={self.n} must be >= 1")
        if not self.eps > 0:
            raise ValidationError(f"eps={self.eps} must be > 0")


def type_bounds(pmf: Pmf, n: int, eps: float) -> List[Tuple[int, int]]:
    """Per-letter inclusive count bounds ``[lo_a, hi_a]`` for typicality.

    Zero-probability letters get the forced bound ``(0, 0)``.
    """
    size = len(pmf)
    slack = eps / size
    bounds: List[Tuple[int, int]] = []
    for a in range(size):
        pa = pmf[a]
        if pa == 0.0:
            bounds.append((0, 0))
            continue
        lo = math.ceil(n * (pa - slack) - _BOUND_SLOP)
        hi = math.floor(n * (pa + slack) + _BOUND_SLOP)
        bounds.append((max(lo, 0), min(hi, n)))
    return bounds


def is_typical(seq: Sequence[int], spec: TypicalSpec) -> bool:
    """Letter-typicality check for a single sequence."""
    if len(seq) != spec.n:
        raise ValidationError(
            f"sequence length {len(seq)} does not match n={spec.n}"
        )
    size = len(spec.pmf)
    counts = [0] * size
    for a in seq:
        if not 0 <= a < size:
            raise ValidationError(f"letter {a} outside alphabet of size {size}")
        counts[a] += 1
    bounds = type_bounds(spec.pmf, spec.n, spec.eps)
    return all(lo <= c <= hi for c, (lo, hi) in zip(counts, bounds))


def _check_composition_guard(bounds: Sequence[Tuple[int, int]]) -> None:
    budget = 1
    for lo, hi in bounds:
        budget *= max(hi - lo + 1, 1)
        if budget > COMPOSITION_GUARD:
            raise GuardExceeded(
                f"type-composition budget {budget} exceeds {COMPOSITION_GUARD}"
            )


def _admissible_types(
    bounds: Sequence[Tuple[int, int]], n: int
) -> Iterator[Tuple[int, ...]]:
    """All letter-count vectors within bounds summing to ``n`` (lexicographic)."""
    size = len(bounds)
    suffix_lo = [0] * (size + 1)
    suffix_hi = [0] * (size + 1)
    for a in range(size - 1, -1, -1):
        suffix_lo[a] = suffix_lo[a + 1] + bounds[a][0]
        suffix_hi[a] = suffix_hi[a + 1] + bounds[a][1]
    counts = [0] * size

    def walk(a: int, remaining: int) -> Iterator[Tuple[int, ...]]:
        if a == size:
            if remaining == 0:
                yield tuple(counts)
            return
        lo, hi = bounds[a]
        lo = max(lo, remaining - suffix_hi[a + 1])
        hi = min(hi, remaining - suffix_lo[a + 1])
        for c in range(lo, hi + 1):
            counts[a] = c
            yield from walk(a + 1, remaining - c)
        counts[a] = 0

    return walk(0, n)


def _multinomial(n: int, counts: Sequence[int]) -> int:
    out = 1
    rem = n
    for c in counts:
        out *= math.comb(rem, c)
        rem -= c
    return out


def typical_count(spec: TypicalSpec) -> Tuple[int, float]:
    """Exact typical-set size (big integer) and its log2.

    Counts by summing multinomial coefficients over admissible types; no
    sequence is ever materialized.  Raises :class:`GuardExceeded` when the
    number of candidate types passes the composition guard.
    """
    bounds = type_bounds(spec.pmf, spec.n, spec.eps)
    _check_composition_guard(bounds)
    total = 0
    for counts in _admissible_types(bounds, spec.n):
        total += _multinomial(spec.n, counts)
    log2 = float(math.log2(total)) if total > 0 else float("-inf")
    return total, log2


def enumerate_typical(spec: TypicalSpec) -> Iterator[Tuple[int, ...]]:
    """Yield every typical sequence in lexicographic order.

    The exact count must not exceed the enumeration guard.
    """
    count, _ = typical_count(spec)
    if count > ENUMERATION_GUARD:
        raise GuardExceeded(
            f"typical set of size {count} exceeds the {ENUMERATION_GUARD} guard"
        )
    bounds = type_bounds(spec.pmf, spec.n, spec.eps)
    size = len(spec.pmf)
    counts = [0] * size
    seq: List[int] = []

    def feasible(pos: int) -> bool:
        remaining = spec.n - pos
        need = 0
        for a in range(size):
            lo, hi = bounds[a]
            if counts[a] > hi:
                return False
            need += max(lo - counts[a], 0)
        return need <= remaining

    def walk(pos: int) -> Iterator[Tuple[int, ...]]:
        if pos == spec.n:
            if all(bounds[a][0] <= counts[a] for a in range(size)):
                yield tuple(seq)
            return
        for a in range(size):
            counts[a] += 1
            seq.append(a)
            if feasible(pos + 1):
                yield from walk(pos + 1)
            seq.pop()
            counts[a] -= 1

    return walk(0)


def joint_spec(joint: JointPmf, n: int, eps: float) -> TypicalSpec:
    """Typicality spec over the flattened pair alphabet of a 2-axis joint."""
    if joint.table.ndim != 2:
        raise ValidationError("joint_spec expects a two-axis joint law")
    return TypicalSpec(Pmf(tuple(joint.table.ravel())), n, eps)


def is_jointly_typical(
    x: Sequence[int], y: Sequence[int], joint: JointPmf, eps: float
) -> bool:
    """Pair-sequence typicality for a two-axis joint law."""
    if len(x) != len(y):
        raise ValidationError("paired sequences must have equal length")
    ny = joint.table.shape[1]
    flat = [a * ny + b for a, b in zip(x, y)]
    return is_typical(flat, joint_spec(joint, len(x), eps))


def conditional_typical_set(
    y: Sequence[int], joint: JointPmf, eps: float
) -> List[Tuple[int, ...]]:
    """All ``x`` with ``(x, y)`` jointly typical, for a fixed ``y``.

    The first axis of ``joint`` is the free coordinate; the second is the
    conditioning sequence's alphabet.  Enumerates by depth-first search over
    positions with per-pair count-bound pruning; guarded by the enumeration
    budget.
    """
    n = len(y)
    nx, ny = joint.table.shape
    bounds_flat = type_bounds(Pmf(tuple(joint.table.ravel())), n, eps)
    bounds = [[bounds_flat[a * ny + b] for b in range(ny)] for a in range(nx)]
    counts = [[0] * ny for _ in range(nx)]
    out: List[Tuple[int, ...]] = []
    seq: List[int] = []

    def deficit() -> int:
        need = 0
        for a in range(nx):
            for b in range(ny):
                need += max(bounds[a][b][0] - counts[a][b], 0)
        return need

    def walk(pos: int) -> None:
        if pos == n:
            if deficit() == 0:
                out.append(tuple(seq))
                if len(out) > ENUMERATION_GUARD:
                    raise GuardExceeded(
                        "conditional typical set exceeds the enumeration guard"
                    )
            return
        b = y[pos]
        for a in range(nx):
            lo, hi = bounds[a][b]
            if counts[a][b] + 1 > hi:
                continue
            counts[a][b] += 1
            seq.append(a)
            if deficit() <= n - pos - 1:
                walk(pos + 1)
            seq.pop()
            counts[a][b] -= 1

    walk(0)
    return out


@dataclass(frozen=True)
class IndexSetSpec:
    """Cartesian-product index set: per-``q`` typical blocks of exact length.

    ``q_weights`` are exact fractions summing to 1 with every weight positive;
    ``cond_u[q]`` is the per-``q`` law of the index letter; the block for
    ``q`` has length ``q_weights[q] * k``, which must be a nonnegative
    integer.  Blocks are concatenated in declared order.
    """

    q_weights: Tuple[Fraction, ...]
    cond_u: Tuple[Pmf, ...]
    k: int
    eps: float

    def __post_init__(self) -> None:
        if len(self.q_weights) != len(self.cond_u):
            raise ValidationError("one index-letter law per Q value required")
        if not self.q_weights:
            raise ValidationError("at least one Q value required")
        object.__setattr__(
            self, "q_weights", tuple(Fraction(w) for w in self.q_weights)
        )
        if any(w <= 0 for w in self.q_weights):
            raise ValidationError("every Q weight must be positive")
        if sum(self.q_weights) != 1:
            raise ValidationError(
                f"Q weights sum to {sum(self.q_weights)}, expected 1"
            )
        if self.k < 1:
            raise ValidationError(f"index length k={self.k} must be >= 1")
        if not self.eps > 0:
            raise ValidationError(f"eps={self.eps} must be > 0")
        for q, w in enumerate(self.q_weights):
            if (w * self.k).denominator != 1:
                raise ValidationError(
                    f"block length {w} * {self.k} for q={q} is not an integer"
                )

    @property
    def block_lengths(self) -> Tuple[int, ...]:
        return tuple(int(w * self.k) for w in self.q_weights)

    def block_specs(self) -> Tuple[TypicalSpec, ...]:
        return tuple(
            TypicalSpec(law, kq, self.eps)
            for law, kq in zip(self.cond_u, self.block_lengths)
            if kq > 0
        )

    def _blocks(self, u: Sequence[int]) -> List[Sequence[int]]:
        if len(u) != self.k:
            raise ValidationError(f"index length {len(u)} != k={self.k}")
        out = []
        start = 0
        for kq in self.block_lengths:
            out.append(u[start : start + kq])
            start += kq
        return out

    def mixture_weight_entropy_pairs(self) -> List[Tuple[float, Pmf]]:
        """(weight, per-q law) pairs, for rate accounting."""
        return [(float(w), law) for w, law in zip(self.q_weights, self.cond_u)]


def index_set_membership(u: Sequence[int], spec: IndexSetSpec) -> bool:
    """Whether every per-``q`` block of ``u`` is typical for its block law."""
    blocks = spec._blocks(u)
    for block, law, kq in zip(blocks, spec.cond_u, spec.block_lengths):
        if kq == 0:
            continue
        if not is_typical(block, TypicalSpec(law, kq, spec.eps)):
            return False
    return True


def index_set_log_size(spec: IndexSetSpec) -> float:
    """``log2`` of the index-set size: sum of per-block typical-count logs."""
    total = 0.0
    for block_spec in spec.block_specs():
        count, log2 = typical_count(block_spec)
        if count == 0:
            return float("-inf")
        total += log2
    return total


def index_set_size(spec: IndexSetSpec) -> int:
    """Exact index-set size (product of per-block typical counts)."""
    total = 1
    for block_spec in spec.block_specs():
        count, _ = typical_count(block_spec)
        total *= count
    return total


def enumerate_index_set(spec: IndexSetSpec) -> Iterator[Tuple[int, ...]]:
    """Yield all index sequences (per-block lexicographic, blocks nested)."""
    if index_set_size(spec) > ENUMERATION_GUARD:
        raise GuardExceeded("index set exceeds the enumeration guard")

    block_specs = spec.block_specs()

    def walk(i: int, prefix: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        if i == len(block_specs):
            yield prefix
            return
        for block in enumerate_typical(block_specs[i]):
            yield from walk(i + 1, prefix + block)

    return walk(0, ())


def index_set_as_array(spec: IndexSetSpec) -> np.ndarray:
    """Materialize the index set as an ``(N, k)`` integer array."""
    rows = list(enumerate_index_set(spec))
    return np.array(rows, dtype=np.int64).reshape(len(rows), spec.k)
