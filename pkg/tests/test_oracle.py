"""Brute-force verification suite tests: every default check must pass."""

from fractions import Fraction

import numpy as np
import pytest

from qgc import oracle
from qgc.errors import GuardExceeded
from qgc.prob import JointPmf, Pmf
from qgc.typical import IndexSetSpec


@pytest.mark.parametrize(
    "p,r,k,n",
    [(2, 2, 1, 1), (2, 2, 1, 2), (2, 2, 2, 1), (3, 1, 1, 2)],
)
def test_random_map_distribution_exact(p, r, k, n):
    verdict = oracle.verify_pphi(p, r, k, n)
    assert verdict.passed, verdict.witness


def test_random_map_guard():
    with pytest.raises(GuardExceeded):
        oracle.verify_pphi(2, 2, 3, 4)


@pytest.mark.parametrize("s", [0, 1, 2])
def test_typical_intersection_sandwich(s):
    joint = JointPmf(
        ("x", "y"), np.outer([0.4, 0.3, 0.2, 0.1], [0.6, 0.4])
    )
    verdict = oracle.verify_typical_intersection(2, 2, joint, 4, s, 1.2)
    assert verdict.passed, verdict.witness


def test_typical_intersection_longer_block():
    joint = JointPmf(
        ("x", "y"), np.outer([0.4, 0.3, 0.2, 0.1], [0.6, 0.4])
    )
    verdict = oracle.verify_typical_intersection(2, 2, joint, 5, 1, 1.2)
    assert verdict.passed, verdict.witness


@pytest.mark.parametrize(
    "p_x,p_y,n,eps",
    [
        ((0.5, 0.3, 0.1, 0.1), (0.25, 0.25, 0.25, 0.25), 5, 1.0),
        ((0.7, 0.1, 0.1, 0.1), (0.4, 0.2, 0.2, 0.2), 6, 1.5),
        ((1.0, 0.0, 0.0, 0.0), (0.0, 1.0, 0.0, 0.0), 4, 0.5),
    ],
)
def test_sum_typical_inclusion(p_x, p_y, n, eps):
    verdict = oracle.verify_sum_typical(Pmf(p_x), Pmf(p_y), 4, n, eps)
    assert verdict.passed, verdict.witness


def test_entropy_convolution_both_directions():
    verdict = oracle.verify_entropy_conv(4)
    assert verdict.passed, verdict.witness
    assert verdict.details["instances"] >= 1000


def test_noise_entropy_bound_margin():
    verdict = oracle.verify_noise_entropy_bound()
    assert verdict.passed, verdict.witness
    assert verdict.details["margin"] > 0.001
    assert verdict.details["noiseless_equality_gap"] < 1e-9


def test_claim_decompositions_exact():
    verdict = oracle.verify_claim_decompositions()
    assert verdict.passed, verdict.witness


def test_injectivity_condition_both_regimes():
    binary = Pmf((0.5, 0.5, 0.0, 0.0))

    def build_binary(k):
        return IndexSetSpec((Fraction(1),), (binary,), k, 4.0)

    def build_full(k):
        return IndexSetSpec((Fraction(1),), (Pmf.uniform(4),), k, 4.0)

    ok = oracle.verify_injectivity_condition(2, 2, 0.5, build_binary, [6, 10, 14])
    assert ok.passed, ok.witness
    bad = oracle.verify_injectivity_condition(2, 2, 2.0, build_full, [2, 3])
    assert bad.passed, bad.witness
    assert bad.details["fractions"][-1] <= 0.5
    assert any(v <= -0.3 for v in bad.details["margins"].values())


def test_verdict_shape():
    v = oracle.verify_pphi(3, 1, 1, 2)
    assert v.check and isinstance(v.params, dict) and v.passed
