"""Typical-set enumeration and index-set construction tests."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgc.errors import GuardExceeded, ValidationError
from qgc.prob import JointPmf, Pmf, product_joint
from qgc.typical import (
    IndexSetSpec,
    TypicalSpec,
    conditional_typical_set,
    enumerate_index_set,
    enumerate_typical,
    index_set_log_size,
    index_set_membership,
    index_set_size,
    is_jointly_typical,
    is_typical,
    joint_spec,
    type_bounds,
    typical_count,
)

FAIR_COIN = Pmf((0.5, 0.5))


def test_typical_count_frozen():
    count, log2 = typical_count(TypicalSpec(FAIR_COIN, 10, 0.2))
    # per-letter slack 0.1: counts in [4, 6] -> C(10,4)+C(10,5)+C(10,6)
    assert count == 672
    assert log2 == pytest.approx(math.log2(672), abs=1e-12)


def test_type_bounds_frozen():
    assert type_bounds(FAIR_COIN, 10, 0.2) == [(4, 6), (4, 6)]
    # zero-probability letters must never appear
    skew = Pmf((0.9, 0.1, 0.0, 0.0))
    bounds = type_bounds(skew, 10, 0.4)
    assert bounds[2] == (0, 0) and bounds[3] == (0, 0)


def test_is_typical_examples():
    spec = TypicalSpec(FAIR_COIN, 10, 0.2)
    assert is_typical((0, 1) * 5, spec)
    assert not is_typical((0,) * 10, spec)
    with pytest.raises(ValidationError):
        is_typical((0, 1), spec)  # wrong length


def test_zero_slack_rejected():
    with pytest.raises(ValidationError):
        TypicalSpec(FAIR_COIN, 4, 0.0)


def test_enumeration_guard():
    with pytest.raises(GuardExceeded):
        list(enumerate_typical(TypicalSpec(Pmf.uniform(4), 20, 4.0)))


@given(
    st.integers(0, 5000),
    st.integers(3, 6),
    st.floats(0.3, 2.0),
)
@settings(max_examples=40, deadline=None)
def test_enumeration_matches_count_and_membership(seed, n, eps):
    rng = np.random.default_rng(seed)
    pmf = Pmf(tuple(rng.dirichlet(np.ones(3))))
    spec = TypicalSpec(pmf, n, eps)
    seqs = list(enumerate_typical(spec))
    count, log2 = typical_count(spec)
    assert len(seqs) == count
    assert len(set(seqs)) == count
    assert all(is_typical(s, spec) for s in seqs)
    if count:
        assert log2 == pytest.approx(math.log2(count), abs=1e-9)
    # exhaustive complement check at small sizes
    if 3**n <= 3**6:
        import itertools

        brute = sum(
            1 for s in itertools.product(range(3), repeat=n) if is_typical(s, spec)
        )
        assert brute == count


def test_joint_and_conditional_typicality():
    joint = product_joint({"x": Pmf((0.7, 0.3)), "y": Pmf((0.5, 0.5))})
    joint = JointPmf(("x", "y"), joint.table)
    n, eps = 6, 1.2
    spec = joint_spec(joint, n, eps)
    assert spec.n == n
    x = (0, 0, 0, 0, 1, 1)
    y = (0, 1, 0, 1, 0, 1)
    expect = is_typical(tuple(a * 2 + b for a, b in zip(x, y)), spec)
    assert is_jointly_typical(x, y, joint, eps) == expect
    fiber = conditional_typical_set(y, joint, eps)
    assert all(is_jointly_typical(xx, y, joint, eps) for xx in fiber)
    # the fiber is exactly the jointly typical completions
    import itertools

    brute = [
        xx
        for xx in itertools.product(range(2), repeat=n)
        if is_jointly_typical(xx, y, joint, eps)
    ]
    assert sorted(fiber) == sorted(brute)


def test_index_set_basic():
    spec = IndexSetSpec(
        q_weights=(Fraction(1, 2), Fraction(1, 2)),
        cond_u=(Pmf((0.5, 0.5, 0.0, 0.0)), Pmf.uniform(4)),
        k=4,
        eps=4.0,
    )
    rows = list(enumerate_index_set(spec))
    assert len(rows) == index_set_size(spec)
    assert index_set_log_size(spec) == pytest.approx(
        math.log2(len(rows)), abs=1e-12
    )
    assert all(index_set_membership(u, spec) for u in rows)
    # first block only uses letters {0, 1}
    assert all(set(u[:2]) <= {0, 1} for u in rows)
    assert not index_set_membership((2, 2, 0, 0), spec)


def test_index_set_weight_validation():
    with pytest.raises(ValidationError):
        IndexSetSpec((Fraction(1, 3),), (Pmf.uniform(4),), 3, 1.0)
    with pytest.raises(ValidationError):
        # blocks must have integer lengths
        IndexSetSpec(
            (Fraction(1, 2), Fraction(1, 2)),
            (Pmf.uniform(4), Pmf.uniform(4)),
            3,
            1.0,
        )
