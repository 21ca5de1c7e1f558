"""Exact arithmetic over the ring of integers modulo a prime power.

The ambient alphabet everywhere in this package is ``Z_{p^r}`` for a prime
``p`` and exponent ``r``.  Alongside plain modular arithmetic this module
exposes the subgroup chain ``H_s = p^s * Z_{p^r}``, the transversal
``T_s = {0, ..., p^s - 1}``, and the projection ``proj(a, s) = a mod p^s``
which together decompose every ring element uniquely as ``a = t + h`` with
``t`` in ``T_s`` and ``h`` in ``H_s``.

All values are stored as eagerly reduced machine integers; moduli above
``2**32`` are rejected.  Every type is immutable and every operation is pure,
so values can be freely shared across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

from .errors import ValidationError

#: Largest permitted modulus p^r.
MAX_MODULUS = 2**32


def _is_prime(n: int) -> bool:
    """Deterministic trial-division primality check (moduli are tiny)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class Modulus:
    """A prime-power modulus ``m = p^r`` with its subgroup-chain helpers."""

    p: int
    r: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or not _is_prime(self.p):
            raise ValidationError(f"modulus base must be prime, got p={self.p}")
        if not isinstance(self.r, int) or self.r < 1:
            raise ValidationError(f"modulus exponent must be >= 1, got r={self.r}")
        if self.p**self.r > MAX_MODULUS:
            raise ValidationError(
                f"modulus {self.p}^{self.r} exceeds the 2^32 limit"
            )

    @property
    def m(self) -> int:
        """The modulus value ``p^r``."""
        return self.p**self.r

    def check_level(self, s: int) -> None:
        if not 0 <= s <= self.r:
            raise ValidationError(f"level s={s} outside [0, {self.r}]")

    def subgroup_size(self, s: int) -> int:
        """``|H_s| = p^(r-s)``."""
        self.check_level(s)
        return self.p ** (self.r - s)


@dataclass(frozen=True)
class RingElem:
    """A single reduced residue in ``Z_{p^r}``."""

    value: int
    mod: Modulus

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.mod.m:
            raise ValidationError(
                f"ring value {self.value} outside [0, {self.mod.m})"
            )

    def __add__(self, other: "RingElem") -> "RingElem":
        return add(self, other)

    def __neg__(self) -> "RingElem":
        return RingElem((-self.value) % self.mod.m, self.mod)

    def __sub__(self, other: "RingElem") -> "RingElem":
        return self + (-other)


@dataclass(frozen=True)
class RingVec:
    """An immutable vector of reduced residues sharing one modulus."""

    values: Tuple[int, ...]
    mod: Modulus

    def __post_init__(self) -> None:
        if len(self.values) < 1:
            raise ValidationError("ring vector must have length >= 1")
        m = self.mod.m
        for v in self.values:
            if not 0 <= v < m:
                raise ValidationError(f"vector entry {v} outside [0, {m})")

    def __len__(self) -> int:
        return len(self.values)

    @staticmethod
    def of(values: Iterable[int], mod: Modulus) -> "RingVec":
        m = mod.m
        return RingVec(tuple(int(v) % m for v in values), mod)


@dataclass(frozen=True)
class RingMatrix:
    """An immutable ``k x n`` matrix of reduced residues."""

    rows: Tuple[Tuple[int, ...], ...]
    mod: Modulus

    def __post_init__(self) -> None:
        if len(self.rows) < 1 or len(self.rows[0]) < 1:
            raise ValidationError("matrix must be at least 1x1")
        width = len(self.rows[0])
        m = self.mod.m
        for row in self.rows:
            if len(row) != width:
                raise ValidationError("matrix rows must have equal length")
            for v in row:
                if not 0 <= v < m:
                    raise ValidationError(f"matrix entry {v} outside [0, {m})")

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.rows), len(self.rows[0]))

    @staticmethod
    def of(rows: Iterable[Iterable[int]], mod: Modulus) -> "RingMatrix":
        m = mod.m
        return RingMatrix(
            tuple(tuple(int(v) % m for v in row) for row in rows), mod
        )


def _require_same_mod(a_mod: Modulus, b_mod: Modulus) -> None:
    if a_mod != b_mod:
        raise ValidationError(f"modulus mismatch: {a_mod} vs {b_mod}")


def add(a: RingElem, b: RingElem) -> RingElem:
    """Modular sum of two ring elements."""
    _require_same_mod(a.mod, b.mod)
    return RingElem((a.value + b.value) % a.mod.m, a.mod)


def vec_add(u: RingVec, v: RingVec) -> RingVec:
    """Component-wise modular sum of two equal-length vectors."""
    _require_same_mod(u.mod, v.mod)
    if len(u) != len(v):
        raise ValidationError(f"vector length mismatch: {len(u)} vs {len(v)}")
    m = u.mod.m
    return RingVec(tuple((a + b) % m for a, b in zip(u.values, v.values)), u.mod)


def scalar_mul(c: int, u: RingVec) -> RingVec:
    """Scalar multiple of a vector, reduced modulo ``p^r``."""
    m = u.mod.m
    return RingVec(tuple((c * a) % m for a in u.values), u.mod)


def vec_mat_mul(u: RingVec, g: RingMatrix) -> RingVec:
    """Row-vector times matrix product ``u G`` with all sums reduced."""
    _require_same_mod(u.mod, g.mod)
    k, n = g.shape
    if len(u) != k:
        raise ValidationError(f"shape mismatch: vector length {len(u)} vs {k} rows")
    m = u.mod.m
    out = [0] * n
    for i, ui in enumerate(u.values):
        if ui == 0:
            continue
        row = g.rows[i]
        for j in range(n):
            out[j] = (out[j] + ui * row[j]) % m
    return RingVec(tuple(out), u.mod)


def proj(a: int | RingElem, s: int, mod: Modulus | None = None) -> int:
    """Project onto the transversal: the unique ``t = a mod p^s`` in ``T_s``."""
    if isinstance(a, RingElem):
        mod = a.mod
        a = a.value
    assert mod is not None
    mod.check_level(s)
    return a % (mod.p**s)


def decompose(a: int | RingElem, s: int, mod: Modulus | None = None) -> Tuple[int, int]:
    """Split ``a = t + h`` with ``t`` in ``T_s`` and ``h`` a multiple of ``p^s``."""
    if isinstance(a, RingElem):
        mod = a.mod
        a = a.value
    assert mod is not None
    t = proj(a, s, mod)
    return (t, a - t)


def subgroup_contains(a: int | RingElem, s: int, mod: Modulus | None = None) -> bool:
    """Membership in ``H_s``, i.e. whether ``p^s`` divides the value."""
    if isinstance(a, RingElem):
        mod = a.mod
        a = a.value
    assert mod is not None
    mod.check_level(s)
    return a % (mod.p**s) == 0


def enumerate_subgroup(mod: Modulus, s: int) -> Tuple[int, ...]:
    """All elements of ``H_s`` in ascending order."""
    mod.check_level(s)
    step = mod.p**s
    return tuple(range(0, mod.m, step))


def max_subgroup_level(a: int | RingElem, mod: Modulus | None = None) -> int:
    """Largest ``s`` in ``[0, r-1]`` with ``a`` in ``H_s`` (base-p valuation, capped).

    Rejects ``a = 0``: by convention the zero element/vector carries no level
    and is excluded by callers that classify nonzero differences.
    """
    if isinstance(a, RingElem):
        mod = a.mod
        a = a.value
    assert mod is not None
    if a == 0:
        raise ValidationError("max_subgroup_level undefined for the zero element")
    s = 0
    while s < mod.r - 1 and a % (mod.p ** (s + 1)) == 0:
        s += 1
    return s


def vec_max_subgroup_level(values: Sequence[int], mod: Modulus) -> int:
    """Level of a vector: minimum level over its nonzero coordinates."""
    levels = [max_subgroup_level(v, mod) for v in values if v != 0]
    if not levels:
        raise ValidationError("max_subgroup_level undefined for the zero vector")
    return min(levels)
