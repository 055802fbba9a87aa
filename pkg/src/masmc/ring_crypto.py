"""Modular-ring arithmetic, additive fragmentation, channel sealing and output pads.

Inputs live in the prime ring Z_M. A value is split into ``r`` additive
fragments, the first ``r - 1`` uniform and the last fixing the sum, so any
proper subset of fragments is uniformly distributed and reveals nothing.

Channel sealing is a toy authenticated cipher built from HMAC-SHA256: a
keystream in counter mode XORed with the plaintext, followed by a
truncated HMAC tag over ``nonce || ciphertext``. It is deterministic from
``(master seed, channel id, nonce)`` and exists to give the simulator a
confidential, authenticated, nonce-unique channel contract to test
against. It is not production cryptography.
"""

from __future__ import annotations

import hashlib
import hmac
import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache

from sympy import isprime

from .errors import (
    AuthFailure,
    ConfigError,
    EmptyShareVector,
    InvalidFragmentCount,
    NonceReuse,
)

DEFAULT_MODULUS = 2**61 - 1
SMALL_MODULUS = 251  # only for chi-square uniformity tests

KEY_BYTES = 32
TAG_BYTES = 16
NONCE_BYTES = 8


@lru_cache(maxsize=64)
def check_modulus(modulus: int) -> int:
    if modulus < 2 or not isprime(modulus):
        raise ConfigError(f"modulus must be a prime >= 2, got {modulus}")
    return modulus


def to_ring(value: int, modulus: int = DEFAULT_MODULUS) -> int:
    """Validate that ``value`` is a ring element (no silent reduction)."""
    if not 0 <= value < modulus:
        raise ConfigError(f"value {value} outside ring [0, {modulus})")
    return value


def split_into_shares(
    value: int, r: int, rng: random.Random, modulus: int = DEFAULT_MODULUS
) -> list[int]:
    """Split ``value`` into ``r`` additive shares mod ``modulus``."""
    if r < 1:
        raise InvalidFragmentCount(f"fragment count must be >= 1, got {r}")
    to_ring(value, modulus)
    shares = [rng.randrange(modulus) for _ in range(r - 1)]
    shares.append((value - sum(shares)) % modulus)
    return shares


def recombine_shares(shares: Sequence[int], modulus: int = DEFAULT_MODULUS) -> int:
    if len(shares) == 0:
        raise EmptyShareVector("cannot recombine an empty share vector")
    return sum(shares) % modulus


# -- output pads --------------------------------------------------------------


@dataclass(frozen=True)
class OutputPad:
    pad: int
    opener_id: str = "opener"


def apply_pad(value: int, pad: OutputPad, modulus: int = DEFAULT_MODULUS) -> int:
    return (value + pad.pad) % modulus


def remove_pad(value: int, pad: OutputPad, modulus: int = DEFAULT_MODULUS) -> int:
    return (value - pad.pad) % modulus


def issue_pads(
    count: int, rng: random.Random, modulus: int = DEFAULT_MODULUS, opener_id: str = "opener"
) -> tuple[list[OutputPad], OutputPad]:
    """Draw one uniform pad per decision maker plus the opener's master pad.

    The master pad is the ring sum of the individual pads, which is what the
    opener subtracts from a masked aggregate.
    """
    pads = [OutputPad(rng.randrange(modulus), opener_id) for _ in range(count)]
    master = OutputPad(sum(p.pad for p in pads) % modulus, opener_id)
    return pads, master


# -- sealed channels ----------------------------------------------------------

Endpoint = tuple[str, int]  # (role, index), e.g. ("party", 2)
ChannelId = tuple[Endpoint, Endpoint]


@dataclass(frozen=True)
class ChannelKey:
    key_bytes: bytes
    channel_id: ChannelId

    @classmethod
    def derive(cls, master_seed: int, channel_id: ChannelId) -> ChannelKey:
        (s_role, s_ix), (r_role, r_ix) = channel_id
        label = f"{int(master_seed)}|{s_role}:{s_ix}->{r_role}:{r_ix}".encode()
        key = hmac.new(b"masmc-channel-key", label, hashlib.sha256).digest()
        return cls(key, channel_id)


@dataclass(frozen=True)
class SealedMessage:
    nonce: int
    body: bytes
    tag: bytes

    def hex(self) -> str:
        return f"{self.nonce:x}:{self.body.hex()}:{self.tag.hex()}"


def _subkeys(key: ChannelKey) -> tuple[bytes, bytes]:
    enc = hmac.new(key.key_bytes, b"enc", hashlib.sha256).digest()
    mac = hmac.new(key.key_bytes, b"mac", hashlib.sha256).digest()
    return enc, mac


def _keystream(enc_key: bytes, nonce: bytes, length: int) -> bytes:
    out = bytearray()
    block = 0
    while len(out) < length:
        out += hmac.new(enc_key, nonce + block.to_bytes(8, "big"), hashlib.sha256).digest()
        block += 1
    return bytes(out[:length])


def _tag(mac_key: bytes, nonce: bytes, body: bytes) -> bytes:
    return hmac.new(mac_key, nonce + body, hashlib.sha256).digest()[:TAG_BYTES]


def channel_seal(plaintext: bytes, key: ChannelKey, nonce: int) -> SealedMessage:
    """Encrypt and authenticate ``plaintext`` under ``(key, nonce)``.

    This function is stateless; callers that need nonce-reuse protection go
    through :class:`Channel`.
    """
    enc_key, mac_key = _subkeys(key)
    nb = nonce.to_bytes(NONCE_BYTES, "big")
    stream = _keystream(enc_key, nb, len(plaintext))
    body = bytes(a ^ b for a, b in zip(plaintext, stream))
    return SealedMessage(nonce, body, _tag(mac_key, nb, body))


def channel_open(sm: SealedMessage, key: ChannelKey) -> bytes:
    enc_key, mac_key = _subkeys(key)
    try:
        nb = sm.nonce.to_bytes(NONCE_BYTES, "big")
    except OverflowError as exc:
        raise AuthFailure("malformed nonce") from exc
    if not hmac.compare_digest(_tag(mac_key, nb, sm.body), sm.tag):
        raise AuthFailure(f"tag mismatch on channel {key.channel_id}")
    stream = _keystream(enc_key, nb, len(sm.body))
    return bytes(a ^ b for a, b in zip(sm.body, stream))


@dataclass
class Channel:
    """Sender side of one ordered channel; hands out nonces from a counter."""

    key: ChannelKey
    next_nonce: int = 0
    used: set[int] = field(default_factory=set)

    def seal(self, plaintext: bytes, nonce: int | None = None) -> SealedMessage:
        if nonce is None:
            nonce = self.next_nonce
        if nonce in self.used:
            raise NonceReuse(f"nonce {nonce} already used on {self.key.channel_id}")
        self.used.add(nonce)
        self.next_nonce = max(self.next_nonce, nonce + 1)
        return channel_seal(plaintext, self.key, nonce)


def encode_ints(*values: int) -> bytes:
    """Fixed-width big-endian encoding used for channel payloads."""
    return b"".join(v.to_bytes(16, "big") for v in values)


def decode_ints(data: bytes) -> tuple[int, ...]:
    if len(data) % 16:
        raise AuthFailure("payload length is not a multiple of 16")
    return tuple(int.from_bytes(data[i : i + 16], "big") for i in range(0, len(data), 16))
