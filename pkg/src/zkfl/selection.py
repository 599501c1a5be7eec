"""Verifiable random selection of the n participating clients for a round.

Each registered client evaluates a VRF on the public round seed and
publishes the output. The VRF proof is a deterministic Schnorr signature
over the seed and the pseudorandom output is its hash. The round's cohort
is the n clients with the smallest outputs, ties broken by client id, so
anyone holding the seed, the public keys and the outputs can recompute it.

Limitation: a Schnorr signature is unique only because the nonce is derived
deterministically; a client that deviates from the nonce derivation could
produce other valid proofs for the same seed. A full ECVRF closes that gap.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

from zkfl.crypto.groups import GroupElement
from zkfl.crypto.schnorr import KeyPair, Signature, sign, verify_sig
from zkfl.errors import InvalidVrf, NotEnoughClients

_VRF_DOMAIN = b"zkfl/vrf/v1"


@dataclass(frozen=True)
class VrfOutput:
    beta: bytes
    pi_vrf: Signature
    input: bytes


def _beta(pi: Signature) -> bytes:
    return hashlib.sha256(_VRF_DOMAIN + b"/beta" + pi.to_bytes()).digest()


def vrf_eval(key: KeyPair, input: bytes) -> VrfOutput:
    if not input:
        raise ValueError("VRF input must be nonempty")
    pi = sign(key, _VRF_DOMAIN + input)
    return VrfOutput(_beta(pi), pi, input)


def vrf_verify(pk: GroupElement, input: bytes, out: VrfOutput) -> bool:
    if out.input != input or not input:
        return False
    if out.beta != _beta(out.pi_vrf):
        return False
    return verify_sig(pk, _VRF_DOMAIN + input, out.pi_vrf)


def round_seed(prev_block_hash: bytes, round: int) -> bytes:
    return hashlib.sha256(b"zkfl/round-seed" + prev_block_hash + round.to_bytes(8, "little")).digest()


@dataclass(frozen=True)
class RegistryEntry:
    client_id: str
    pk: GroupElement
    output: VrfOutput


@dataclass(frozen=True)
class SelectionResult:
    round: int
    seed: bytes
    chosen: list[str]
    per_client_outputs: list[VrfOutput]

    def to_bytes(self) -> bytes:
        out = [self.round.to_bytes(8, "little"), len(self.seed).to_bytes(4, "little"), self.seed]
        for cid, vo in zip(self.chosen, self.per_client_outputs):
            raw = cid.encode()
            out += [len(raw).to_bytes(4, "little"), raw, vo.beta, vo.pi_vrf.to_bytes()]
        return b"".join(out)


def select_clients(
    round_seed: bytes,
    registry: Sequence[RegistryEntry],
    n: int,
    round: int = 0,
) -> SelectionResult:
    """Pick the n registered clients with the lexicographically smallest VRF outputs."""
    if n < 1 or n > len(registry):
        raise NotEnoughClients(f"cannot select {n} of {len(registry)} registered clients")
    ids = [e.client_id for e in registry]
    if len(set(ids)) != len(ids):
        raise ValueError("registry contains duplicate client ids")
    for entry in registry:
        if not vrf_verify(entry.pk, round_seed, entry.output):
            raise InvalidVrf(entry.client_id)
    ranked = sorted(registry, key=lambda e: (e.output.beta, e.client_id))[:n]
    return SelectionResult(
        round=round,
        seed=round_seed,
        chosen=[e.client_id for e in ranked],
        per_client_outputs=[e.output for e in ranked],
    )
