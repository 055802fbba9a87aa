import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from masmc.errors import AuthFailure, EmptyShareVector, InvalidFragmentCount, NonceReuse
from masmc.ring_crypto import (
    DEFAULT_MODULUS,
    SMALL_MODULUS,
    Channel,
    ChannelKey,
    OutputPad,
    SealedMessage,
    apply_pad,
    channel_open,
    channel_seal,
    check_modulus,
    issue_pads,
    recombine_shares,
    remove_pad,
    split_into_shares,
)

M = DEFAULT_MODULUS
KEY = ChannelKey.derive(99, (("party", 0), ("dm", 1)))


def test_single_fragment_is_the_value():
    assert split_into_shares(5, 1, random.Random(0)) == [5]


@pytest.mark.parametrize("seed", range(20))
def test_split_recombine_42(seed):
    shares = split_into_shares(42, 5, random.Random(seed))
    assert len(shares) == 5
    assert all(0 <= s < M for s in shares)
    assert recombine_shares(shares) == 42


def test_zero_fragments_rejected():
    with pytest.raises(InvalidFragmentCount):
        split_into_shares(5, 0, random.Random(0))


def test_recombine_examples():
    assert recombine_shares([5]) == 5
    assert recombine_shares([250, 2], modulus=251) == 1  # 252 mod 251
    with pytest.raises(EmptyShareVector):
        recombine_shares([])


def test_recombine_split_1000_random(rng):
    for _ in range(1000):
        v, r = rng.randrange(M), rng.randint(1, 8)
        assert recombine_shares(split_into_shares(v, r, rng)) == v


@given(st.integers(0, M - 1), st.integers(1, 16), st.integers(0, 2**32))
def test_roundtrip_property(v, r, seed):
    assert recombine_shares(split_into_shares(v, r, random.Random(seed))) == v


@pytest.mark.parametrize("r,position", [(2, 0), (3, 0), (3, 1)])
def test_proper_prefix_shares_uniform(r, position):
    rng = random.Random(777)
    counts = [0] * SMALL_MODULUS
    for _ in range(100_000):
        counts[split_into_shares(0, r, rng, SMALL_MODULUS)[position]] += 1
    assert chisquare(counts).pvalue > 0.001


def test_modulus_must_be_prime():
    assert check_modulus(251) == 251
    for bad in (0, 1, 250, 2**61):
        with pytest.raises(ValueError):
            check_modulus(bad)


# -- sealing ------------------------------------------------------------------


def test_seal_open_round_trip():
    sm = channel_seal(b"fragment payload", KEY, 0)
    assert sm.body != b"fragment payload"
    assert channel_open(sm, KEY) == b"fragment payload"


def test_every_single_bit_flip_detected():
    sm = channel_seal(b"short msg", KEY, 3)
    for field in ("body", "tag"):
        raw = getattr(sm, field)
        for i in range(len(raw) * 8):
            flipped = bytearray(raw)
            flipped[i // 8] ^= 1 << (i % 8)
            kw = {"nonce": sm.nonce, "body": sm.body, "tag": sm.tag, field: bytes(flipped)}
            with pytest.raises(AuthFailure):
                channel_open(SealedMessage(**kw), KEY)


def test_nonce_change_detected():
    sm = channel_seal(b"abc", KEY, 3)
    with pytest.raises(AuthFailure):
        channel_open(SealedMessage(4, sm.body, sm.tag), KEY)


def test_wrong_key_rejected():
    sm = channel_seal(b"abc", KEY, 0)
    other = ChannelKey.derive(99, (("party", 1), ("dm", 1)))
    with pytest.raises(AuthFailure):
        channel_open(sm, other)


def test_truncated_body_rejected(rng):
    for _ in range(200):
        msg = rng.randbytes(rng.randint(1, 80))
        sm = channel_seal(msg, KEY, rng.randrange(1000))
        cut = rng.randrange(len(msg))
        with pytest.raises(AuthFailure):
            channel_open(SealedMessage(sm.nonce, sm.body[:cut], sm.tag), KEY)


def test_distinct_nonces_give_distinct_ciphertexts(rng):
    seen = set()
    for i in range(1000):
        msg = rng.randbytes(rng.randint(8, 48))
        a = channel_seal(msg, KEY, 2 * i)
        b = channel_seal(msg, KEY, 2 * i + 1)
        assert a.body != b.body
        seen.update((a.body, b.body))
    assert len(seen) == 2000


def test_channel_key_derivation_is_deterministic():
    cid = (("party", 2), ("dm", 0))
    assert ChannelKey.derive(5, cid) == ChannelKey.derive(5, cid)
    assert ChannelKey.derive(5, cid).key_bytes != ChannelKey.derive(6, cid).key_bytes
    reverse = (("dm", 0), ("party", 2))
    assert ChannelKey.derive(5, cid).key_bytes != ChannelKey.derive(5, reverse).key_bytes


def test_channel_counter_and_nonce_reuse():
    ch = Channel(KEY)
    a, b = ch.seal(b"x"), ch.seal(b"x")
    assert (a.nonce, b.nonce) == (0, 1)
    with pytest.raises(NonceReuse):
        ch.seal(b"y", nonce=0)
    assert ch.seal(b"z", nonce=10).nonce == 10
    assert ch.seal(b"z").nonce == 11


# -- pads ---------------------------------------------------------------------


def test_zero_pad_identity():
    assert apply_pad(7, OutputPad(0)) == 7


def test_pad_inverse(rng):
    for _ in range(1000):
        v, p = rng.randrange(M), OutputPad(rng.randrange(M))
        assert remove_pad(apply_pad(v, p), p) == v


def test_pad_additivity(rng):
    for _ in range(1000):
        a, b = rng.randrange(M), rng.randrange(M)
        p1, p2 = OutputPad(rng.randrange(M)), OutputPad(rng.randrange(M))
        lhs = (apply_pad(a, p1) + apply_pad(b, p2)) % M
        assert lhs == ((a + b) + (p1.pad + p2.pad)) % M
        assert remove_pad(lhs, OutputPad((p1.pad + p2.pad) % M)) == (a + b) % M


@settings(max_examples=50)
@given(st.integers(1, 10), st.integers(0, 2**32))
def test_issued_pads_sum_to_master(count, seed):
    pads, master = issue_pads(count, random.Random(seed))
    assert sum(p.pad for p in pads) % M == master.pad
    assert all(p.opener_id == master.opener_id for p in pads)
