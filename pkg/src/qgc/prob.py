"""Finite probability distributions and information measures in bits.

Provides plain and joint PMFs over tiny indexed alphabets, Shannon entropy
and (conditional) mutual information in base 2, pushforwards through
deterministic maps (used to build laws of modular sums and projections),
circular convolution over ``Z_m``, and the exact characterization of when
circular convolution preserves the entropy of one argument (the convolution
equals a cyclic shift of that argument).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .zring import Modulus, proj

#: Construction-time normalization: inputs whose total mass deviates from 1 by
#: more than this are rejected outright.
NORMALIZE_REJECT_TOL = 1e-6
#: Deviations below this need no renormalization at all.
NORMALIZE_EXACT_TOL = 1e-9


def _normalize(probs: Sequence[float], what: str) -> Tuple[float, ...]:
    arr = [float(x) for x in probs]
    for x in arr:
        if x < -1e-12:
            raise ValidationError(f"{what}: negative probability {x}")
    arr = [max(x, 0.0) for x in arr]
    total = sum(arr)
    if abs(total - 1.0) > NORMALIZE_REJECT_TOL:
        raise ValidationError(f"{what}: probabilities sum to {total}, not 1")
    if abs(total - 1.0) > NORMALIZE_EXACT_TOL:
        arr = [x / total for x in arr]
    return tuple(arr)


@dataclass(frozen=True)
class Pmf:
    """A probability mass function over the indexed alphabet ``0..len-1``."""

    probs: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", _normalize(self.probs, "Pmf"))

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, i: int) -> float:
        return self.probs[i]

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.probs) if x > 0.0)

    @staticmethod
    def uniform(size: int) -> "Pmf":
        return Pmf(tuple(1.0 / size for _ in range(size)))

    @staticmethod
    def point_mass(at: int, size: int) -> "Pmf":
        return Pmf(tuple(1.0 if i == at else 0.0 for i in range(size)))


@dataclass(frozen=True)
class JointPmf:
    """A dense joint distribution over named finite axes."""

    axes: Tuple[str, ...]
    table: np.ndarray

    def __post_init__(self) -> None:
        if len(set(self.axes)) != len(self.axes):
            raise ValidationError(f"duplicate axis names in {self.axes}")
        arr = np.asarray(self.table, dtype=float)
        if arr.ndim != len(self.axes):
            raise ValidationError(
                f"table rank {arr.ndim} does not match {len(self.axes)} axes"
            )
        if (arr < -1e-12).any():
            raise ValidationError("JointPmf: negative probability entry")
        arr = np.clip(arr, 0.0, None)
        total = float(arr.sum())
        if abs(total - 1.0) > NORMALIZE_REJECT_TOL:
            raise ValidationError(f"JointPmf mass {total} not within 1e-6 of 1")
        if abs(total - 1.0) > NORMALIZE_EXACT_TOL:
            arr = arr / total
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)

    def axis_index(self, name: str) -> int:
        try:
            return self.axes.index(name)
        except ValueError:
            raise ValidationError(f"unknown axis {name!r}; have {self.axes}") from None

    def marginal(self, names: Sequence[str]) -> "JointPmf":
        """Marginal joint over the given axes, in the given order."""
        keep = [self.axis_index(n) for n in names]
        drop = tuple(i for i in range(len(self.axes)) if i not in keep)
        arr = self.table.sum(axis=drop) if drop else self.table
        # reorder remaining axes to the requested order
        remaining = [i for i in range(len(self.axes)) if i not in drop]
        perm = [remaining.index(i) for i in keep]
        return JointPmf(tuple(names), np.transpose(arr, perm))

    def marginal_pmf(self, name: str) -> Pmf:
        return Pmf(tuple(self.marginal([name]).table))

    def pushforward(
        self, axis: str, mapping: Sequence[int], new_axis: str, new_size: int
    ) -> "JointPmf":
        """Replace one axis by its image under a total deterministic map."""
        ax = self.axis_index(axis)
        if len(mapping) != self.table.shape[ax]:
            raise ValidationError(
                f"map covers {len(mapping)} values, axis {axis!r} has "
                f"{self.table.shape[ax]}"
            )
        if any(not 0 <= int(v) < new_size for v in mapping):
            raise ValidationError("map image outside the new alphabet")
        moved = np.moveaxis(self.table, ax, 0)
        out = np.zeros((new_size,) + moved.shape[1:])
        for old, new in enumerate(mapping):
            out[int(new)] += moved[old]
        axes = self.axes[:ax] + (new_axis,) + self.axes[ax + 1 :]
        return JointPmf(axes, np.moveaxis(out, 0, ax))

    def add_sum_axis(self, axis_a: str, axis_b: str, m: int, new_axis: str) -> "JointPmf":
        """Adjoin the modulo-``m`` sum of two existing axes as a new axis."""
        ia, ib = self.axis_index(axis_a), self.axis_index(axis_b)
        na, nb = self.table.shape[ia], self.table.shape[ib]
        out = np.zeros(self.table.shape + (m,))
        for a in range(na):
            for b in range(nb):
                idx = [slice(None)] * self.table.ndim
                idx[ia], idx[ib] = a, b
                out[tuple(idx) + ((a + b) % m,)] += self.table[tuple(idx)]
        return JointPmf(self.axes + (new_axis,), out)


@dataclass(frozen=True)
class CondPmf:
    """A conditional distribution: one ``Pmf`` row per conditioning value."""

    rows: Tuple[Pmf, ...]

    def __post_init__(self) -> None:
        if not self.rows:
            raise ValidationError("CondPmf needs at least one row")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ValidationError("CondPmf rows must share one target alphabet")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def target_size(self) -> int:
        return len(self.rows[0])

    def __getitem__(self, given: int) -> Pmf:
        return self.rows[given]


def entropy(p: Pmf | Sequence[float] | np.ndarray) -> float:
    """Shannon entropy in bits, with the ``0 log 0 = 0`` convention."""
    if isinstance(p, Pmf):
        arr = np.asarray(p.probs)
    else:
        arr = np.asarray(p, dtype=float).ravel()
    nz = arr[arr > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def joint_entropy(j: JointPmf, names: Sequence[str] | None = None) -> float:
    """Entropy of the joint law of the named axes (all axes by default)."""
    if names is None or tuple(names) == j.axes:
        return entropy(j.table)
    return entropy(j.marginal(list(names)).table)


def conditional_entropy(
    j: JointPmf, target: Sequence[str], given: Sequence[str]
) -> float:
    """``H(target | given) = H(target, given) - H(given)`` in bits."""
    target = list(target)
    given = list(given)
    if set(target) & set(given):
        raise ValidationError("target and conditioning axes must be disjoint")
    if not given:
        return joint_entropy(j, target)
    return joint_entropy(j, target + given) - joint_entropy(j, given)


def mutual_info(j: JointPmf, a: Sequence[str], b: Sequence[str]) -> float:
    """``I(a; b) = H(a) - H(a | b)`` in bits."""
    return joint_entropy(j, list(a)) - conditional_entropy(j, list(a), list(b))


def conditional_mutual_info(
    j: JointPmf, a: Sequence[str], b: Sequence[str], c: Sequence[str]
) -> float:
    """``I(a; b | c) = H(a | c) - H(a | b, c)`` in bits."""
    return conditional_entropy(j, list(a), list(c)) - conditional_entropy(
        j, list(a), list(b) + list(c)
    )


def project_pmf(p: Pmf, mod: Modulus, s: int) -> Pmf:
    """Pushforward of a PMF over ``Z_{p^r}`` through ``a -> a mod p^s``."""
    if len(p) != mod.m:
        raise ValidationError(
            f"pmf has {len(p)} atoms, alphabet Z_{mod.m} expected"
        )
    mod.check_level(s)
    out = [0.0] * (mod.p**s)
    for a, mass in enumerate(p.probs):
        out[proj(a, s, mod)] += mass
    return Pmf(tuple(out))


def pushforward_pmf(p: Pmf, mapping: Sequence[int], new_size: int) -> Pmf:
    """Image of a PMF under a total deterministic map of its alphabet."""
    if len(mapping) != len(p):
        raise ValidationError("map must cover the whole alphabet")
    out = [0.0] * new_size
    for a, mass in enumerate(p.probs):
        out[int(mapping[a])] += mass
    return Pmf(tuple(out))


def circ_conv(p: Pmf, q: Pmf) -> Pmf:
    """Circular convolution: the law of the modulo-``m`` sum of independent draws."""
    m = len(p)
    if len(q) != m:
        raise ValidationError(f"alphabet mismatch: {m} vs {len(q)}")
    out = [0.0] * m
    for j, pj in enumerate(p.probs):
        if pj == 0.0:
            continue
        for k in range(m):
            out[k] += pj * q.probs[(k - j) % m]
    return Pmf(tuple(out))


def cyclic_shift(q: Pmf, steps: int) -> Pmf:
    """Apply the single-step cyclic shift ``steps`` times.

    One step sends ``(q_0, ..., q_{m-1})`` to ``(q_{m-1}, q_0, ..., q_{m-2})``,
    i.e. shifted ``q'_k = q_{(k - steps) mod m}``.
    """
    m = len(q)
    return Pmf(tuple(q.probs[(k - steps) % m] for k in range(m)))


def entropy_preserved_by_conv(p: Pmf, q: Pmf, tol: float = 1e-9) -> bool:
    """Whether ``p (*) q`` equals some cyclic shift of ``q`` in max norm.

    This is the exact condition under which the modular sum has the same
    entropy as the ``q`` argument.
    """
    m = len(p)
    if len(q) != m:
        raise ValidationError(f"alphabet mismatch: {m} vs {len(q)}")
    conv = circ_conv(p, q)
    for i in range(1, m + 1):
        shifted = cyclic_shift(q, i)
        if max(abs(a - b) for a, b in zip(conv.probs, shifted.probs)) <= tol:
            return True
    return False


def product_joint(pmfs: Dict[str, Pmf]) -> JointPmf:
    """Joint law of independent axes given per-axis marginals."""
    names = tuple(pmfs.keys())
    arr = np.array(1.0)
    for n in names:
        arr = np.multiply.outer(arr, np.asarray(pmfs[n].probs))
    return JointPmf(names, arr)
