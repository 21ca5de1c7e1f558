"""Monte Carlo simulation of the coding schemes at small blocklength.

Implements ensemble-averaged (codebooks resampled every trial) simulations:

* distributed sum compression with nested quasi group codes — two encoders
  map their source blocks to outer-shift (bin) indices, the decoder searches
  the sum-indexed code for the unique shifted codeword typical for the sum
  law;
* sum computation over a two-sender channel — messages pick bins, encoders
  cover with inner codewords typical for their input law, the decoder
  searches the sum of the two outer codebooks for the unique sequence
  jointly typical with the channel output;
* empirical covering and packing probes for random quasi-group ensembles.

Randomness is fully deterministic: trial ``t`` of a run with seed ``s`` uses
``numpy.random.default_rng([s, t])``, and each trial draws, in order, the
generator matrices (row-major), the translation vectors, the source/message
randomness, and finally any channel noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import GuardExceeded, ValidationError
from .prob import CondPmf, JointPmf, Pmf, circ_conv, entropy, project_pmf
from .regions import SourcePairConfig
from .typical import (
    ENUMERATION_GUARD,
    IndexSetSpec,
    index_set_as_array,
    index_set_log_size,
    type_bounds,
)
from .zring import Modulus


def wilson_interval(hits: int, total: int, z: float = 1.959963984540054) -> Tuple[float, float, float]:
    """Empirical rate with a 95% Wilson score interval ``(p, lo, hi)``."""
    if total == 0:
        return (float("nan"), 0.0, 1.0)
    p = hits / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2 * total)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / total + z * z / (4 * total * total))
    return (p, max(center - half, 0.0), min(center + half, 1.0))


@dataclass(frozen=True)
class SimReport:
    """Per-event counts and empirical rates from a Monte Carlo run."""

    scheme: str
    trials: int
    counts: Dict[str, int]
    rates: Dict[str, Tuple[float, float, float]]
    realized: Dict[str, float] = field(default_factory=dict)
    config_echo: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {
            "scheme": self.scheme,
            "trials": self.trials,
            "counts": dict(self.counts),
            "rates": {
                k: {"estimate": v[0], "lo": v[1], "hi": v[2]}
                for k, v in self.rates.items()
            },
            "realized": dict(self.realized),
            "config": dict(self.config_echo),
        }


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _counts_within(rows: np.ndarray, size: int, bounds: Sequence[Tuple[int, int]]) -> np.ndarray:
    """Vectorized per-row letter-typicality check against count bounds."""
    ok = np.ones(rows.shape[0], dtype=bool)
    for a in range(size):
        c = (rows == a).sum(axis=1)
        lo, hi = bounds[a]
        ok &= (c >= lo) & (c <= hi)
    return ok


def _seq_counts_ok(seq: np.ndarray, size: int, bounds: Sequence[Tuple[int, int]]) -> bool:
    return bool(_counts_within(seq[None, :], size, bounds)[0])


def _sample_rows(rng: np.random.Generator, rows: np.ndarray) -> np.ndarray:
    """One categorical draw per row of a row-stochastic matrix."""
    cdf = np.cumsum(rows, axis=1)
    u = rng.random(rows.shape[0])
    return (u[:, None] > cdf).sum(axis=1).astype(np.int64)


# ---------------------------------------------------------------------------
# distributed sum compression
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KmSimConfig:
    """One blocklength row of a distributed-sum-compression simulation.

    ``k`` is the inner index length (law ``w_pmf`` with slack ``eps_w``),
    ``l`` the outer binary bin-index length (all binary strings are
    admitted), ``eps_x`` the encoders' own-source typicality slack (0 allowed
    for exact-type encoding) and ``eps_z`` the decoder's slack for the sum
    law.  The decoder index set uses the sum law of two independent
    ``w_pmf`` draws with slack ``eps_d``.
    """

    source: SourcePairConfig
    n: int
    k: int
    l: int
    w_pmf: Pmf
    eps_w: float
    eps_d: float
    eps_x: float
    eps_z: float
    trials: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1 or self.k < 1 or self.l < 1 or self.trials < 1:
            raise ValidationError("n, k, l, trials must all be >= 1")
        if min(self.eps_x, self.eps_z, self.eps_w, self.eps_d) < 0:
            raise ValidationError("typicality slacks must be >= 0")
        if len(self.w_pmf) != self.source.mod.m:
            raise ValidationError("w law must live on the ring alphabet")


def _binary_half_words(
    g_half: np.ndarray, m: int
) -> np.ndarray:
    """Words ``v G`` for all binary ``v`` over the given generator rows."""
    lh = g_half.shape[0]
    if lh == 0:
        return np.zeros((1, g_half.shape[1]), dtype=np.int64)
    bits = ((np.arange(2**lh)[:, None] >> np.arange(lh)[None, :]) & 1).astype(np.int64)
    return (bits @ g_half) % m


def _pack(words: np.ndarray, m: int) -> np.ndarray:
    n = words.shape[1]
    weights = (m ** np.arange(n)).astype(np.int64)
    return words @ weights


def _find_decomposition(
    target: np.ndarray,
    u_rows: np.ndarray,
    g: np.ndarray,
    packs_a_sorted: np.ndarray,
    order_a: np.ndarray,
    words_b: np.ndarray,
    m: int,
) -> Optional[Tuple[int, int, int]]:
    """Search ``w G + v_a G_a + v_b G_b = target`` over all binary ``v``.

    Returns ``(w_row, va_index, vb_index)`` for the first hit in scan order
    (inner-index enumeration order, then smallest ``v_b``, then smallest
    ``v_a``), or ``None``.
    """
    for wi in range(u_rows.shape[0]):
        t = (target - u_rows[wi] @ g) % m
        rem = (t[None, :] - words_b) % m
        packs = _pack(rem, m)
        pos = np.searchsorted(packs_a_sorted, packs)
        ok = (pos < packs_a_sorted.shape[0]) & (
            packs_a_sorted[np.minimum(pos, packs_a_sorted.shape[0] - 1)] == packs
        )
        hits = np.flatnonzero(ok)
        if hits.size:
            vb = int(hits[0])
            p = packs[vb]
            lo = int(np.searchsorted(packs_a_sorted, p, side="left"))
            hi = int(np.searchsorted(packs_a_sorted, p, side="right"))
            va = int(order_a[lo:hi].min())
            return (wi, va, vb)
    return None


def simulate_km(cfg: KmSimConfig) -> SimReport:
    """Ensemble-averaged distributed-sum-compression run at one blocklength.

    Per trial: draw the shared inner generator/translation and the shared
    outer generator with two translations, draw the source block pair, run
    both encoders (own-source typicality plus exact bin decomposition), then
    let the decoder search the sum-indexed code, shifted by both bin shifts,
    for the unique word typical for the sum law.  A decode error is declared
    when the candidate count differs from one, even if the truth is among
    the candidates.  Trials whose true inner sum index falls outside the
    decoder's index set are decode errors too and are also counted
    separately.
    """
    mod, m = cfg.source.mod, cfg.source.mod.m
    n, k, l = cfg.n, cfg.k, cfg.l

    w_spec = IndexSetSpec((1,), (cfg.w_pmf,), k, cfg.eps_w) if cfg.eps_w > 0 else None
    if w_spec is None:
        raise ValidationError("eps_w must be positive (inner index set)")
    u_rows = index_set_as_array(w_spec)
    d_law = circ_conv(cfg.w_pmf, cfg.w_pmf)
    d_spec = IndexSetSpec((1,), (d_law,), k, cfg.eps_d)
    d_rows = index_set_as_array(d_spec)
    if u_rows.shape[0] == 0 or d_rows.shape[0] == 0:
        # degenerate index sets: every trial is a structural failure
        counts = {
            "structural": cfg.trials,
            "e1": 0,
            "e2": 0,
            "ed": 0,
            "success": 0,
            "enc_ok": 0,
            "true_sum_outside_cd": 0,
            "source_atypical": 0,
        }
        return SimReport("km", cfg.trials, counts, {}, {}, {"n": n, "k": k, "l": l})
    d_pack_index = {tuple(row): i for i, row in enumerate(d_rows)}

    x1_law = Pmf(tuple(cfg.source.joint.table.sum(axis=1)))
    x2_law = Pmf(tuple(cfg.source.joint.table.sum(axis=0)))
    z_law = cfg.source.sum_law()
    x_bounds = [type_bounds(x1_law, n, cfg.eps_x), type_bounds(x2_law, n, cfg.eps_x)]
    z_bounds = type_bounds(z_law, n, cfg.eps_z)

    flat = cfg.source.joint.table.ravel()
    la = l // 2

    counts = {
        "structural": 0,
        "e1": 0,
        "e2": 0,
        "ed": 0,
        "ed_no_candidate": 0,
        "ed_multiple": 0,
        "ed_wrong_unique": 0,
        "success": 0,
        "enc_ok": 0,
        "true_sum_outside_cd": 0,
        "source_atypical": 0,
        "enc1_fail": 0,
        "enc2_fail": 0,
    }

    for trial in range(cfg.trials):
        rng = _trial_rng(cfg.seed, trial)
        g = rng.integers(0, m, size=(k, n), dtype=np.int64)
        b = rng.integers(0, m, size=n, dtype=np.int64)
        g_bar = rng.integers(0, m, size=(l, n), dtype=np.int64)
        b_bar1 = rng.integers(0, m, size=n, dtype=np.int64)
        b_bar2 = rng.integers(0, m, size=n, dtype=np.int64)

        pair_idx = rng.choice(m * m, size=n, p=flat)
        x1 = (pair_idx // m).astype(np.int64)
        x2 = (pair_idx % m).astype(np.int64)

        words_a = _binary_half_words(g_bar[:la], m)
        words_b = _binary_half_words(g_bar[la:], m)
        packs_a = _pack(words_a, m)
        order_a = np.argsort(packs_a, kind="stable")
        packs_a_sorted = packs_a[order_a]

        enc_fail = [False, False]
        atypical = False
        decomp: List[Optional[Tuple[int, int, int]]] = [None, None]
        for i, (x, b_bar) in enumerate(((x1, b_bar1), (x2, b_bar2))):
            if not _seq_counts_ok(x, m, x_bounds[i]):
                enc_fail[i] = True
                atypical = True
                continue
            target = (x - b - b_bar) % m
            found = _find_decomposition(
                target, u_rows, g, packs_a_sorted, order_a, words_b, m
            )
            if found is None:
                enc_fail[i] = True
            else:
                decomp[i] = found
        if atypical:
            counts["source_atypical"] += 1
        if enc_fail[0]:
            counts["enc1_fail"] += 1
        if enc_fail[1]:
            counts["enc2_fail"] += 1
        if enc_fail[0]:
            counts["e1"] += 1
            continue
        if enc_fail[1]:
            counts["e2"] += 1
            continue
        counts["enc_ok"] += 1

        shifts = []
        for i, b_bar in enumerate((b_bar1, b_bar2)):
            _, va, vb = decomp[i]  # type: ignore[misc]
            bits_a = ((va >> np.arange(la)) & 1).astype(np.int64)
            bits_b = ((vb >> np.arange(l - la)) & 1).astype(np.int64)
            shifts.append((bits_a @ g_bar[:la] + bits_b @ g_bar[la:] + b_bar) % m)
        shift_sum = (shifts[0] + shifts[1]) % m

        candidates = (d_rows @ g + (2 * b) % m + shift_sum) % m
        ok = _counts_within(candidates, m, z_bounds)
        distinct = {tuple(row) for row in candidates[ok]}

        w_sum = tuple(
            int(v) for v in (u_rows[decomp[0][0]] + u_rows[decomp[1][0]]) % m  # type: ignore[index]
        )
        if w_sum not in d_pack_index:
            counts["true_sum_outside_cd"] += 1

        if len(distinct) != 1:
            counts["ed"] += 1
            counts["ed_no_candidate" if not distinct else "ed_multiple"] += 1
            continue
        reconstruction = next(iter(distinct))
        truth = tuple(int(v) for v in (x1 + x2) % m)
        if reconstruction == truth:
            counts["success"] += 1
        else:
            counts["ed"] += 1
            counts["ed_wrong_unique"] += 1

    rates = {
        "ed_given_enc_ok": wilson_interval(counts["ed"], counts["enc_ok"]),
        "success_given_enc_ok": wilson_interval(counts["success"], counts["enc_ok"]),
        "enc_ok": wilson_interval(counts["enc_ok"], cfg.trials),
    }
    realized = {
        "bin_index_rate": l / n,
        "inner_index_rate": index_set_log_size(w_spec) / n,
        "decoder_index_rate": index_set_log_size(d_spec) / n,
    }
    echo = {"n": n, "k": k, "l": l, "trials": cfg.trials, "seed": cfg.seed,
            "eps_w": cfg.eps_w, "eps_d": cfg.eps_d, "eps_x": cfg.eps_x,
            "eps_z": cfg.eps_z}
    return SimReport("km", cfg.trials, counts, rates, realized, echo)


# ---------------------------------------------------------------------------
# sum computation over a two-sender channel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompMacSimConfig:
    """Simulation of sum computation over a channel with nested codes.

    Both senders share the inner generator (law ``u_pmf``, slack ``eps_u``)
    and the outer generator (law ``v_pmf``, slack ``eps_v``) with their own
    translations.  ``eps_x`` is the encoders' input-law typicality slack,
    ``eps_y`` the decoder's joint-typicality slack.
    """

    mod: Modulus
    channel: CondPmf
    n: int
    k: int
    l: int
    u_pmf: Pmf
    v_pmf: Pmf
    eps_u: float
    eps_v: float
    eps_x: float
    eps_y: float
    trials: int
    seed: int = 0
    inputs: Optional[Tuple[Pmf, Pmf]] = None

    def input_laws(self) -> Tuple[Pmf, Pmf]:
        if self.inputs is not None:
            return self.inputs
        return (Pmf.uniform(self.mod.m), Pmf.uniform(self.mod.m))


def simulate_comp_mac(cfg: CompMacSimConfig) -> SimReport:
    """Ensemble-averaged sum-computation run.

    Per trial: messages pick one outer (bin) index per sender uniformly;
    each encoder searches its bin for an inner codeword making the channel
    input typical for its input law; the decoder searches the element-wise
    sums of the two outer codebooks for the unique sequence jointly typical
    with the received block under the (input-sum, output) law.  Success
    means that unique sequence equals the true modular input sum; candidate
    counts other than one are decode errors, with the no-candidate /
    multiple-candidate split reported separately.
    """
    mod, m = cfg.mod, cfg.mod.m
    n, k, l = cfg.n, cfg.k, cfg.l
    ny = cfg.channel.target_size

    u_spec = IndexSetSpec((1,), (cfg.u_pmf,), k, cfg.eps_u)
    v_spec = IndexSetSpec((1,), (cfg.v_pmf,), l, cfg.eps_v)
    u_rows = index_set_as_array(u_spec)
    v_rows = index_set_as_array(v_spec)
    if u_rows.shape[0] * v_rows.shape[0] > ENUMERATION_GUARD:
        raise GuardExceeded("outer codebook exceeds the enumeration guard")
    if (u_rows.shape[0] * v_rows.shape[0]) ** 2 > ENUMERATION_GUARD:
        raise GuardExceeded("decoder sum-codebook search exceeds the guard")

    p_in1, p_in2 = cfg.input_laws()
    x_bounds = [
        type_bounds(p_in1, n, cfg.eps_x),
        type_bounds(p_in2, n, cfg.eps_x),
    ]

    # joint law of (X1 + X2, Y)
    j_xy = np.zeros((m, ny))
    for a in range(m):
        for bb in range(m):
            j_xy[(a + bb) % m] += p_in1[a] * p_in2[bb] * np.asarray(
                cfg.channel[a * m + bb].probs
            )
    pair_bounds = type_bounds(Pmf(tuple(j_xy.ravel())), n, cfg.eps_y)

    chan_rows = np.array(
        [cfg.channel[i].probs for i in range(m * m)]
    )

    counts = {
        "e1": 0,
        "e2": 0,
        "ed": 0,
        "success": 0,
        "enc_ok": 0,
        "no_candidate": 0,
        "multiple_candidates": 0,
    }

    for trial in range(cfg.trials):
        rng = _trial_rng(cfg.seed, trial)
        g = rng.integers(0, m, size=(k, n), dtype=np.int64)
        b = rng.integers(0, m, size=n, dtype=np.int64)
        g_bar = rng.integers(0, m, size=(l, n), dtype=np.int64)
        b_bar1 = rng.integers(0, m, size=n, dtype=np.int64)
        b_bar2 = rng.integers(0, m, size=n, dtype=np.int64)

        msg = [int(rng.integers(0, v_rows.shape[0])) for _ in range(2)]
        inner_words = (u_rows @ g) % m  # (NU, n)

        xs = []
        enc_fail = [False, False]
        for i, b_bar in enumerate((b_bar1, b_bar2)):
            shift = (v_rows[msg[i]] @ g_bar + b + b_bar) % m
            cands = (inner_words + shift) % m
            ok = _counts_within(cands, m, x_bounds[i])
            hit = np.flatnonzero(ok)
            if hit.size == 0:
                enc_fail[i] = True
                xs.append(None)
            else:
                xs.append(cands[int(hit[0])])
        if enc_fail[0]:
            counts["e1"] += 1
            continue
        if enc_fail[1]:
            counts["e2"] += 1
            continue
        counts["enc_ok"] += 1

        x1, x2 = xs[0], xs[1]
        y = _sample_rows(rng, chan_rows[x1 * m + x2])

        # decoder: sums of the two outer codebooks
        book1 = (inner_words[:, None, :] + ((v_rows @ g_bar) % m)[None, :, :] + b + b_bar1) % m
        book1 = book1.reshape(-1, n)
        book2_shift = (((v_rows @ g_bar) % m) + b + b_bar2) % m
        sums = (book1[:, None, :] + inner_words[None, :, :]) % m
        # add every outer shift of sender 2
        candidates = set()
        pair_flat = None
        for shift2 in book2_shift:
            block = (sums + shift2) % m
            block = block.reshape(-1, n)
            pair_rows = block * ny + y[None, :]
            ok = _counts_within(pair_rows, m * ny, pair_bounds)
            for row in block[ok]:
                candidates.add(tuple(int(v) for v in row))
        if len(candidates) == 0:
            counts["no_candidate"] += 1
            counts["ed"] += 1
            continue
        if len(candidates) > 1:
            counts["multiple_candidates"] += 1
            counts["ed"] += 1
            continue
        truth = tuple(int(v) for v in (x1 + x2) % m)
        if next(iter(candidates)) == truth:
            counts["success"] += 1
        else:
            counts["ed"] += 1

    unique_trials = (
        counts["enc_ok"] - counts["no_candidate"] - counts["multiple_candidates"]
    )
    rates = {
        "success_given_unique": wilson_interval(counts["success"], unique_trials),
        "ed_given_enc_ok": wilson_interval(counts["ed"], counts["enc_ok"]),
        "unique_failure": wilson_interval(
            counts["no_candidate"] + counts["multiple_candidates"], counts["enc_ok"]
        ),
    }
    realized = {
        "message_rate": float(np.log2(max(v_rows.shape[0], 1))) / n,
        "inner_index_rate": index_set_log_size(u_spec) / n,
    }
    echo = {"n": n, "k": k, "l": l, "trials": cfg.trials, "seed": cfg.seed}
    return SimReport("comp-mac", cfg.trials, counts, rates, realized, echo)


# ---------------------------------------------------------------------------
# covering and packing probes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoveringSimConfig:
    """Covering probe: does a random code hit every source block's typical fiber?

    ``joint`` has axes ``("x", "xhat")`` with the second over the ring; the
    code's index letters follow ``u_pmf`` with slack ``eps_u``.
    """

    mod: Modulus
    joint: JointPmf
    n: int
    k: int
    u_pmf: Pmf
    eps_u: float
    eps: float
    trials: int
    seed: int = 0


def covering_bound(cfg: CoveringSimConfig) -> float:
    """Rate threshold above which random codes cover with high probability.

    ``max over s in [1, r]`` of ``[H(U)/H([U]_s)] * (s log2 p - H([Xhat]_s | X))``.
    """
    mod = cfg.mod
    h_u = entropy(cfg.u_pmf)
    table = cfg.joint.table  # (nx, m)
    h_x = entropy(table.sum(axis=1))
    best = -np.inf
    for s in range(1, mod.r + 1):
        size = mod.p**s
        proj = np.zeros((table.shape[0], size))
        for a in range(mod.m):
            proj[:, a % size] += table[:, a]
        h_xhat_s_given_x = entropy(proj) - h_x
        h_us = entropy(project_pmf(cfg.u_pmf, mod, s))
        if h_us <= 1e-12:
            continue
        best = max(best, (h_u / h_us) * (s * math.log2(mod.p) - h_xhat_s_given_x))
    return float(best)


def empirical_covering(cfg: CoveringSimConfig) -> SimReport:
    """Fraction of (codebook, source block) samples with no typical codeword."""
    mod, m = cfg.mod, cfg.mod.m
    n = cfg.n
    nx = cfg.joint.table.shape[0]
    u_spec = IndexSetSpec((1,), (cfg.u_pmf,), cfg.k, cfg.eps_u)
    u_rows = index_set_as_array(u_spec)
    pair_bounds = type_bounds(Pmf(tuple(cfg.joint.table.ravel())), n, cfg.eps)
    x_flat = cfg.joint.table.sum(axis=1)

    failures = 0
    for trial in range(cfg.trials):
        rng = _trial_rng(cfg.seed, trial)
        g = rng.integers(0, m, size=(cfg.k, n), dtype=np.int64)
        b = rng.integers(0, m, size=n, dtype=np.int64)
        x = rng.choice(nx, size=n, p=x_flat)
        words = (u_rows @ g + b) % m
        pair_rows = x[None, :] * m + words
        ok = _counts_within(pair_rows, nx * m, pair_bounds)
        if not ok.any():
            failures += 1

    bound = covering_bound(cfg)
    realized_rate = index_set_log_size(u_spec) / n
    rates = {"failure": wilson_interval(failures, cfg.trials)}
    realized = {
        "index_rate": realized_rate,
        "covering_bound": bound,
        "margin": realized_rate - bound,
    }
    echo = {"n": n, "k": cfg.k, "trials": cfg.trials, "seed": cfg.seed}
    return SimReport(
        "covering", cfg.trials, {"failures": failures}, rates, realized, echo
    )


@dataclass(frozen=True)
class PackingSimConfig:
    """Packing probe: how often a non-transmitted codeword looks typical.

    ``joint`` has axes ``("x", "y")`` with the first over the ring.
    """

    mod: Modulus
    joint: JointPmf
    n: int
    k: int
    u_pmf: Pmf
    eps_u: float
    eps: float
    trials: int
    seed: int = 0


def packing_bound(cfg: PackingSimConfig) -> float:
    """Rate threshold below which spurious typical codewords are rare.

    ``min over s in [0, r-1]`` of ``[H(U)/H(U|[U]_s)] * (log2 p^{r-s}
    - H(X | Y, [X]_s))``.
    """
    mod = cfg.mod
    h_u = entropy(cfg.u_pmf)
    table = cfg.joint.table  # (m, ny)
    h_xy = entropy(table)
    best = np.inf
    for s in range(mod.r):
        size = mod.p**s
        proj = np.zeros((size, table.shape[1]))
        for a in range(mod.m):
            proj[a % size] += table[a]
        h_x_given_ys = h_xy - entropy(proj)
        denom = entropy(cfg.u_pmf) - entropy(project_pmf(cfg.u_pmf, mod, s))
        if denom <= 1e-12:
            continue
        best = min(best, (h_u / denom) * ((mod.r - s) * math.log2(mod.p) - h_x_given_ys))
    return float(best)


def empirical_packing(cfg: PackingSimConfig) -> SimReport:
    """Fraction of trials where some other codeword is jointly typical."""
    mod, m = cfg.mod, cfg.mod.m
    n = cfg.n
    ny = cfg.joint.table.shape[1]
    u_spec = IndexSetSpec((1,), (cfg.u_pmf,), cfg.k, cfg.eps_u)
    u_rows = index_set_as_array(u_spec)
    pair_bounds = type_bounds(Pmf(tuple(cfg.joint.table.ravel())), n, cfg.eps)
    x_marg = cfg.joint.table.sum(axis=1)
    cond_y = cfg.joint.table / np.where(x_marg[:, None] > 0, x_marg[:, None], 1.0)

    false_events = 0
    for trial in range(cfg.trials):
        rng = _trial_rng(cfg.seed, trial)
        g = rng.integers(0, m, size=(cfg.k, n), dtype=np.int64)
        b = rng.integers(0, m, size=n, dtype=np.int64)
        theta = int(rng.integers(0, u_rows.shape[0]))
        words = (u_rows @ g + b) % m
        sent = words[theta]
        y = _sample_rows(rng, cond_y[sent])
        others = words[~(words == sent).all(axis=1)]
        if others.size == 0:
            continue
        pair_rows = others * ny + y[None, :]
        ok = _counts_within(pair_rows, m * ny, pair_bounds)
        if ok.any():
            false_events += 1

    bound = packing_bound(cfg)
    realized_rate = index_set_log_size(u_spec) / n
    rates = {"false_candidate": wilson_interval(false_events, cfg.trials)}
    realized = {
        "index_rate": realized_rate,
        "packing_bound": bound,
        "margin": bound - realized_rate,
    }
    echo = {"n": n, "k": cfg.k, "trials": cfg.trials, "seed": cfg.seed}
    return SimReport(
        "packing",
        cfg.trials,
        {"false_candidates": false_events},
        rates,
        realized,
        echo,
    )
