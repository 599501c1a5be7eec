"""Deterministic Schnorr signatures over a :class:`GroupParams`.

The nonce is derived from (sk, msg) so signatures are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from zkfl.crypto.groups import GroupElement, GroupParams
from zkfl.crypto.transcript import Transcript
from zkfl.errors import EncodingError

_SIG_DOMAIN = b"zkfl/schnorr-signature/v1"


@dataclass(frozen=True)
class KeyPair:
    params: GroupParams
    sk: int
    pk: GroupElement


@dataclass(frozen=True)
class Signature:
    R: GroupElement
    z: int

    def to_bytes(self) -> bytes:
        return self.R.to_bytes() + self.R.group.scalar_to_bytes(self.z)

    @classmethod
    def from_bytes(cls, params: GroupParams, data: bytes) -> "Signature":
        if len(data) != params.element_size + params.scalar_size:
            raise EncodingError("bad signature length")
        R = params.element_from_bytes(data[:params.element_size])
        return cls(R, params.scalar_from_bytes(data[params.element_size:]))


def signature_size(params: GroupParams) -> int:
    return params.element_size + params.scalar_size


def _nonzero_scalar(params: GroupParams, *parts: bytes) -> int:
    counter = 0
    while True:
        k = params.hash_to_scalar(*parts, counter.to_bytes(4, "little"))
        if k:
            return k
        counter += 1


def keygen(params: GroupParams, seed: bytes) -> KeyPair:
    if not seed:
        raise ValueError("keygen seed must be nonempty")
    sk = _nonzero_scalar(params, b"zkfl/keygen", params.group_id.encode(), seed)
    return KeyPair(params, sk, params.g ** sk)


def _challenge(pk: GroupElement, R: GroupElement, msg: bytes) -> int:
    t = Transcript(_SIG_DOMAIN)
    t.append(b"group", pk.group.group_id.encode())
    t.append(b"pk", pk.to_bytes())
    t.append(b"R", R.to_bytes())
    t.append(b"msg", msg)
    return t.challenge(b"c", pk.group.order)


def sign(key: KeyPair, msg: bytes) -> Signature:
    params = key.params
    k = _nonzero_scalar(params, b"zkfl/nonce", params.scalar_to_bytes(key.sk), msg)
    R = params.g ** k
    c = _challenge(key.pk, R, msg)
    return Signature(R, (k + c * key.sk) % params.order)


def verify_sig(pk: GroupElement, msg: bytes, sig: Signature) -> bool:
    params = pk.group
    if sig.R.group is not params or not 0 <= sig.z < params.order:
        return False
    if pk.is_identity():
        return False
    c = _challenge(pk, sig.R, msg)
    return params.g ** sig.z == sig.R * pk ** c
