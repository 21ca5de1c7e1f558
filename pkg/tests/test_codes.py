"""Shifted group codes, quasi group restrictions, and nested binning tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgc.codes import (
    GroupCode,
    NestedQgc,
    Qgc,
    bin_members,
    bin_of,
    encode,
    enumerate_codebook,
    full_index_spec,
    injectivity_probe,
    rate,
    sample_code,
    sum_codes,
    transversal_index_spec,
)
from qgc.errors import ValidationError
from qgc.typical import enumerate_index_set, index_set_size
from qgc.zring import Modulus

MOD4 = Modulus(2, 2)


def _full_qgc(rng, k, n, mod=MOD4):
    return Qgc(sample_code(rng, k, n, mod), full_index_spec(mod, k))


def test_encode_is_affine():
    rng = np.random.default_rng(0)
    c = _full_qgc(rng, 2, 5)
    u = (1, 3)
    v = (2, 2)
    wu = np.array(encode(c, u))
    wv = np.array(encode(c, v))
    wsum = np.array(encode(c, tuple((a + b) % 4 for a, b in zip(u, v))))
    # affine: E(u) + E(v) - E(u+v) == b for every pair
    assert (((wu + wv - wsum) % 4) == c.code.b).all()


def test_encode_rejects_non_member():
    rng = np.random.default_rng(1)
    spec = transversal_index_spec(MOD4, [(1, 2)])  # letters in {0, 1} only
    c = Qgc(sample_code(rng, 2, 4, MOD4), spec)
    with pytest.raises(ValidationError):
        encode(c, (2, 0))


def test_full_code_is_translated_subgroup():
    rng = np.random.default_rng(2)
    c = _full_qgc(rng, 2, 3)
    book = set(enumerate_codebook(c))
    b = tuple(int(x) for x in c.code.b)
    shifted = {tuple((np.array(w) - b) % 4) for w in book}
    # the de-translated codebook is closed under addition (a subgroup image)
    for w1 in shifted:
        for w2 in shifted:
            assert tuple((np.array(w1) + np.array(w2)) % 4) in shifted
    assert tuple([0, 0, 0]) in shifted


def test_rate_orderings():
    rng = np.random.default_rng(3)
    c = _full_qgc(rng, 2, 4)
    codeword_rate, index_rate = rate(c)
    assert codeword_rate <= index_rate + 1e-12
    assert index_rate == pytest.approx(2 * 2 / 4, abs=1e-12)  # k log2(4) / n


def test_sum_codes_codebook():
    rng = np.random.default_rng(4)
    c1 = _full_qgc(rng, 1, 3)
    c2 = _full_qgc(rng, 1, 3)
    csum = sum_codes(c1, c2)
    words = {
        tuple((np.array(w1) + np.array(w2)) % 4)
        for w1 in enumerate_codebook(c1)
        for w2 in enumerate_codebook(c2)
    }
    assert set(enumerate_codebook(csum)) == words


def test_sum_index_spec_size():
    rng = np.random.default_rng(5)
    c1 = _full_qgc(rng, 1, 3)
    c2 = _full_qgc(rng, 2, 3)
    csum = sum_codes(c1, c2)
    assert index_set_size(csum.index) == index_set_size(c1.index) * index_set_size(
        c2.index
    )


def test_bins_partition_translates():
    rng = np.random.default_rng(6)
    inner = _full_qgc(rng, 1, 3)
    outer = _full_qgc(rng, 1, 3)
    nc = NestedQgc(inner, outer)
    inner_book = set(enumerate_codebook(inner))
    for v in enumerate_index_set(outer.index):
        shift = np.array(bin_of(nc, v).shift)
        members = bin_members(nc, v)
        assert members == {
            tuple((np.array(w) + shift) % 4) for w in inner_book
        }
        assert len(members) == len(inner_book)


def test_transversal_spec_respects_levels():
    spec = transversal_index_spec(MOD4, [(1, 2), (2, 1)])
    rows = list(enumerate_index_set(spec))
    assert len(rows) == 2 * 2 * 4
    assert all(set(u[:2]) <= {0, 1} for u in rows)
    with pytest.raises(ValidationError):
        transversal_index_spec(MOD4, [(0, 2)])


def test_injectivity_probe_detects_collisions():
    mod = MOD4
    # rank-deficient generator: both index letters map through the same row
    g = np.array([[1, 1, 1], [1, 1, 1]])
    b = np.zeros(3, dtype=int)
    c = Qgc(GroupCode(g, b, mod), full_index_spec(mod, 2))
    rng = np.random.default_rng(7)
    assert injectivity_probe(c, rng, 200) == 0.0
    # identity-like generator at low rate: every codeword has one preimage
    g2 = np.array([[1, 0, 0], [0, 1, 0]])
    c2 = Qgc(GroupCode(g2, b, mod), full_index_spec(mod, 2))
    assert injectivity_probe(c2, rng, 200) == 1.0


@given(st.integers(0, 1000), st.integers(1, 2), st.integers(2, 4))
@settings(max_examples=30, deadline=None)
def test_codebook_size_divides_index_size(seed, k, n):
    rng = np.random.default_rng(seed)
    c = _full_qgc(rng, k, n)
    book = enumerate_codebook(c)
    total = index_set_size(c.index)
    assert sum(book.values()) == total
    # image of a group homomorphism: codebook size divides the index count
    assert total % len(book) == 0
