"""Fragmenting a private input and masking a result.

Walks through the ring layer: additive shares, why a partial set of shares
tells you nothing, sealed channels, and output pads.
"""
import random

from masmc.errors import AuthFailure
from masmc.ring_crypto import (
    DEFAULT_MODULUS,
    SMALL_MODULUS,
    ChannelKey,
    SealedMessage,
    apply_pad,
    channel_open,
    channel_seal,
    decode_ints,
    encode_ints,
    issue_pads,
    recombine_shares,
    remove_pad,
    split_into_shares,
)

rng = random.Random(2024)

# %% A citizen's income record, split into 4 fragments
income = 48_250
shares = split_into_shares(income, 4, rng)
print("shares:", shares)
print("recombined:", recombine_shares(shares))
print("sum of the first three alone:", sum(shares[:3]) % DEFAULT_MODULUS)

# %% In a tiny ring you can see that one share is uniform whatever the secret
for secret in (0, 200):
    hist = [0] * SMALL_MODULUS
    for _ in range(50_000):
        hist[split_into_shares(secret, 2, rng, SMALL_MODULUS)[0]] += 1
    print(f"secret={secret}: min/max bucket of first share = {min(hist)}/{max(hist)}")

# %% Fragments travel over sealed channels, one key per (party, decision maker)
key = ChannelKey.derive(master_seed=1, channel_id=(("party", 0), ("dm", 2)))
sealed = channel_seal(encode_ints(0, 2, shares[2]), key, nonce=0)
print("ciphertext:", sealed.body.hex()[:32], "...")
print("opened (party, fragment, share):", decode_ints(channel_open(sealed, key)))

flipped = SealedMessage(sealed.nonce, bytes([sealed.body[0] ^ 0x80]) + sealed.body[1:], sealed.tag)
try:
    channel_open(flipped, key)
except AuthFailure as exc:
    print("tampering detected:", exc)

# %% Output pads: each decision maker adds its own pad, the opener removes the sum
pads, master = issue_pads(3, rng)
partials = [100, 250, 300]
masked_total = sum(apply_pad(v, pad) for v, pad in zip(partials, pads)) % DEFAULT_MODULUS
print("masked total:", masked_total)
print("opened total:", remove_pad(masked_total, master))
