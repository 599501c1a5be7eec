"""Aggregation relation, prover, verifiers and the HVZK simulator.

The relation the aggregator proves for a round is

    (i)   Enc(w_i)[j] = g^{w_i[j]} h^{s_i[j]}   for every client i, coordinate j
    (ii)  w = sum_i w_i
    (iii) sig_i is client i's signature over (client_id, round, Enc(w_i)).

Condition (iii) is checked directly on the public statement. Conditions (i)
and (ii) reduce, by the homomorphism of Pedersen commitments, to the public
product check Enc(w)[j] = prod_i Enc(w_i)[j], plus a proof of knowledge of an
opening of the compressed aggregate C = prod_j Enc(w)[j]^(rho^j), where rho
is a Fiat-Shamir challenge over the statement. The proof of knowledge is a
Schnorr-style sigma protocol made non-interactive with the transcript.

``verify_miner`` sees only the statement and the proof. ``verify_client``
additionally receives the opening of the aggregate (w, sum_i s_i) and the
client's own bundle.
"""

from __future__ import annotations

import random
import secrets
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from zkfl.crypto import encoding as enc
from zkfl.crypto.codec import FixedPointCodec
from zkfl.crypto.groups import GroupElement, GroupParams, get_group
from zkfl.crypto.pedersen import batch_open_check, commit_vector
from zkfl.crypto.schnorr import KeyPair, Signature, sign, signature_size, verify_sig
from zkfl.crypto.transcript import (
    Transcript,
    oracle_programming_enabled,
    program_challenge,
)
from zkfl.errors import (
    BadSignature,
    DimensionMismatch,
    EncodingError,
    RelationUnsatisfied,
    SimulationUnavailable,
)

_BUNDLE_DOMAIN = b"zkfl/update-signature/v1"
_PROOF_DOMAIN = b"zkfl/aggregation-proof/v1"

# diagnostic codes reported by verify_miner_diagnostics
STRUCTURE = "structure"
UNAUTHORIZED = "unauthorized-client"
MISSING = "missing-client"
SIGNATURE = "signature"
PRODUCT = "product"
CHALLENGE = "challenge"
POK = "proof-of-knowledge"


def signed_message(client_id: str, round: int, enc_w: Sequence[GroupElement]) -> bytes:
    return _BUNDLE_DOMAIN + enc.lp_str(client_id) + enc.u64(round) + enc.element_vector(enc_w)


@dataclass(frozen=True)
class UpdateCommitmentBundle:
    """What a client sends the aggregator: (w_i, s_i, Enc(w_i), sig_i) plus its identity."""

    client_id: str
    round: int
    pk: GroupElement
    w_q: list[int]
    s: list[int]
    enc_w: list[GroupElement]
    sig: Signature

    @property
    def dim(self) -> int:
        return len(self.enc_w)

    def signature_ok(self) -> bool:
        return verify_sig(self.pk, signed_message(self.client_id, self.round, self.enc_w), self.sig)


def make_bundle(
    key: KeyPair,
    client_id: str,
    round: int,
    w_q: Sequence[int],
    rng: Optional[random.Random] = None,
    blinds: Optional[Sequence[int]] = None,
) -> UpdateCommitmentBundle:
    """Commit to a quantized update with fresh blinders and sign the commitments."""
    params = key.params
    q = params.order
    w_q = [int(v) % q for v in w_q]
    if blinds is None:
        draw = (lambda: rng.randrange(q)) if rng is not None else (lambda: secrets.randbelow(q))
        blinds = [draw() for _ in w_q]
    s = [int(v) % q for v in blinds]
    enc_w = commit_vector(params, w_q, s)
    sig = sign(key, signed_message(client_id, round, enc_w))
    return UpdateCommitmentBundle(client_id, round, key.pk, w_q, s, enc_w, sig)


@dataclass(frozen=True)
class AggregationStatement:
    params: GroupParams
    round: int
    client_ids: list[str]
    enc_updates: list[list[GroupElement]]
    sigs: list[Signature]
    client_pks: list[GroupElement]
    enc_agg: list[GroupElement]

    @property
    def n(self) -> int:
        return len(self.enc_updates)

    @property
    def d(self) -> int:
        return len(self.enc_agg)

    def to_bytes(self) -> bytes:
        parts = [enc.lp_str(self.params.group_id), enc.u64(self.round)]
        parts.append(enc.u32(len(self.client_ids)))
        parts.extend(enc.lp_str(cid) for cid in self.client_ids)
        parts.append(enc.u32(len(self.enc_updates)))
        parts.extend(enc.element_vector(v) for v in self.enc_updates)
        parts.append(enc.u32(len(self.sigs)))
        parts.extend(sig.to_bytes() for sig in self.sigs)
        parts.append(enc.u32(len(self.client_pks)))
        parts.extend(pk.to_bytes() for pk in self.client_pks)
        parts.append(enc.element_vector(self.enc_agg))
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> "AggregationStatement":
        r = enc.Reader(data)
        try:
            params = get_group(r.lp_str())
        except ValueError as exc:
            raise EncodingError(str(exc)) from None
        round = r.u64()
        client_ids = [r.lp_str() for _ in range(r.u32())]
        enc_updates = [r.element_vector(params) for _ in range(r.u32())]
        sig_len = signature_size(params)
        sigs = [Signature.from_bytes(params, r.take(sig_len)) for _ in range(r.u32())]
        client_pks = [r.element(params) for _ in range(r.u32())]
        enc_agg = r.element_vector(params)
        r.finish()
        return cls(params, round, client_ids, enc_updates, sigs, client_pks, enc_agg)


@dataclass(frozen=True)
class AggregationWitness:
    updates: list[list[int]]
    blinds: list[list[int]]
    agg: list[int]
    agg_blind: list[int]


@dataclass(frozen=True)
class AggregationProof:
    A: GroupElement
    z_m: int
    z_r: int
    rho: int
    c: int

    def to_bytes(self) -> bytes:
        p = self.A.group
        return self.A.to_bytes() + b"".join(p.scalar_to_bytes(x) for x in (self.z_m, self.z_r, self.rho, self.c))

    @classmethod
    def from_bytes(cls, params: GroupParams, data: bytes) -> "AggregationProof":
        r = enc.Reader(data)
        A = r.element(params)
        z_m, z_r, rho, c = (r.scalar(params) for _ in range(4))
        r.finish()
        return cls(A, z_m, z_r, rho, c)


def proof_size(params: GroupParams) -> int:
    return params.element_size + 4 * params.scalar_size


@dataclass(frozen=True)
class ClientOpening:
    """Aggregate sent to clients: the quantized sum w and the summed blinders."""

    agg: list[int]
    agg_blind: list[int]

    @classmethod
    def from_plain(cls, w_plain: Sequence[float], agg_blind: Sequence[int], codec: FixedPointCodec) -> "ClientOpening":
        return cls(codec.quantize(w_plain), list(agg_blind))

    def plain(self, codec: FixedPointCodec, n_summed: int):
        return codec.dequantize_vector(self.agg, n_summed)


def aggregate(bundles: Sequence[UpdateCommitmentBundle]) -> tuple[AggregationStatement, AggregationWitness]:
    """Sum the plaintext updates and multiply their commitments coordinate-wise."""
    if not bundles:
        raise DimensionMismatch("need at least one bundle")
    params = bundles[0].pk.group
    q = params.order
    d = bundles[0].dim
    round = bundles[0].round
    for b in bundles:
        if not (len(b.w_q) == len(b.s) == b.dim == d):
            raise DimensionMismatch(f"client {b.client_id!r} has dimension {b.dim}, expected {d}")
        if b.round != round or b.pk.group is not params:
            raise DimensionMismatch(f"client {b.client_id!r} belongs to a different round or group")
    for b in bundles:
        if not b.signature_ok():
            raise BadSignature(b.client_id)
    agg = [sum(col) % q for col in zip(*(b.w_q for b in bundles))]
    agg_blind = [sum(col) % q for col in zip(*(b.s for b in bundles))]
    enc_agg = [params.product(col) for col in zip(*(b.enc_w for b in bundles))]
    statement = AggregationStatement(
        params=params,
        round=round,
        client_ids=[b.client_id for b in bundles],
        enc_updates=[list(b.enc_w) for b in bundles],
        sigs=[b.sig for b in bundles],
        client_pks=[b.pk for b in bundles],
        enc_agg=enc_agg,
    )
    witness = AggregationWitness(
        updates=[list(b.w_q) for b in bundles],
        blinds=[list(b.s) for b in bundles],
        agg=agg,
        agg_blind=agg_blind,
    )
    return statement, witness


def _structure_ok(st: AggregationStatement) -> bool:
    n, d = st.n, st.d
    if n < 1 or not (len(st.client_ids) == len(st.sigs) == len(st.client_pks) == n):
        return False
    if any(len(v) != d for v in st.enc_updates):
        return False
    if len(set(st.client_ids)) != n:
        return False
    params = st.params
    elems = [pk for pk in st.client_pks] + st.enc_agg + [e for v in st.enc_updates for e in v]
    elems += [sig.R for sig in st.sigs]
    return all(e.group is params for e in elems)


def relation_diagnostics(st: AggregationStatement, wit: AggregationWitness) -> list[str]:
    """Which of the relation's conditions the (statement, witness) pair violates."""
    if not _structure_ok(st):
        return [STRUCTURE]
    params = st.params
    q = params.order
    if not (len(wit.updates) == len(wit.blinds) == st.n and len(wit.agg) == len(wit.agg_blind) == st.d):
        return [STRUCTURE]
    if any(len(u) != st.d for u in wit.updates) or any(len(s) != st.d for s in wit.blinds):
        return [STRUCTURE]
    failed = []
    flat_m = [m for u in wit.updates for m in u]
    flat_r = [r for b in wit.blinds for r in b]
    flat_e = [e for v in st.enc_updates for e in v]
    if not batch_open_check(params, flat_m, flat_r, flat_e):
        failed.append("commitment-opening")
    if [sum(col) % q for col in zip(*wit.updates)] != [a % q for a in wit.agg]:
        failed.append("sum")
    if [sum(col) % q for col in zip(*wit.blinds)] != [a % q for a in wit.agg_blind]:
        failed.append("blind-sum")
    if not batch_open_check(params, wit.agg, wit.agg_blind, st.enc_agg):
        failed.append("aggregate-opening")
    for cid, pk, e, sig in zip(st.client_ids, st.client_pks, st.enc_updates, st.sigs):
        if not verify_sig(pk, signed_message(cid, st.round, e), sig):
            failed.append(f"{SIGNATURE}:{cid}")
    return failed


def _statement_transcript(st: AggregationStatement) -> Transcript:
    t = Transcript(_PROOF_DOMAIN)
    t.append(b"group", st.params.group_id.encode())
    t.append(b"statement", st.to_bytes())
    return t


def _powers(rho: int, d: int, q: int) -> list[int]:
    out = [1] * d
    for j in range(1, d):
        out[j] = out[j - 1] * rho % q
    return out


def _compressed_aggregate(st: AggregationStatement, rho: int) -> GroupElement:
    return st.params.multi_exp(st.enc_agg, _powers(rho, st.d, st.params.order))


def prove(
    statement: AggregationStatement,
    witness: AggregationWitness,
    rng: Optional[random.Random] = None,
) -> AggregationProof:
    """Prove the aggregation relation; refuses if the witness does not satisfy it."""
    failed = relation_diagnostics(statement, witness)
    if failed:
        raise RelationUnsatisfied("witness violates: " + ", ".join(failed))
    return prove_unchecked(statement, witness.agg, witness.agg_blind, rng)


def prove_unchecked(
    statement: AggregationStatement,
    agg: Sequence[int],
    agg_blind: Sequence[int],
    rng: Optional[random.Random] = None,
) -> AggregationProof:
    """Sigma-protocol step alone, with no relation check.

    A malicious aggregator skips the tripwire in :func:`prove`; the adversary
    harness uses this to produce the best proof it can for a tampered statement.
    """
    params = statement.params
    q = params.order
    t = _statement_transcript(statement)
    rho = t.challenge(b"rho", q)
    powers = _powers(rho, statement.d, q)
    m = sum(p * a for p, a in zip(powers, agg)) % q
    r = sum(p * b for p, b in zip(powers, agg_blind)) % q
    draw = (lambda: rng.randrange(q)) if rng is not None else (lambda: secrets.randbelow(q))
    a, b = draw(), draw()
    A = params.commit(a, b)
    t.append(b"A", A.to_bytes())
    c = t.challenge(b"c", q)
    return AggregationProof(A=A, z_m=(a + c * m) % q, z_r=(b + c * r) % q, rho=rho, c=c)


def public_diagnostics(
    statement: AggregationStatement,
    roster: Optional[Mapping[str, GroupElement]] = None,
) -> list[str]:
    """Signature, membership and product checks that need no proof at all.

    ``roster`` maps each client expected in this round to its public key.
    """
    st = statement
    if not _structure_ok(st):
        return [STRUCTURE]
    failed = []
    if roster is not None:
        if any(roster.get(cid) != pk for cid, pk in zip(st.client_ids, st.client_pks)):
            failed.append(UNAUTHORIZED)
        if set(roster) - set(st.client_ids):
            failed.append(MISSING)
    for cid, pk, e, sig in zip(st.client_ids, st.client_pks, st.enc_updates, st.sigs):
        if not verify_sig(pk, signed_message(cid, st.round, e), sig):
            failed.append(f"{SIGNATURE}:{cid}")
    params = st.params
    for j in range(st.d):
        if params.product([v[j] for v in st.enc_updates]) != st.enc_agg[j]:
            failed.append(PRODUCT)
            break
    return failed


def verify_miner_diagnostics(
    statement: AggregationStatement,
    proof: AggregationProof,
    roster: Optional[Mapping[str, GroupElement]] = None,
) -> list[str]:
    """Every failed check; an empty list means the proof is accepted."""
    failed = public_diagnostics(statement, roster)
    if failed == [STRUCTURE]:
        return failed
    params = statement.params
    q = params.order
    if proof.A.group is not params or not all(0 <= x < q for x in (proof.z_m, proof.z_r, proof.rho, proof.c)):
        return failed + [STRUCTURE]
    t = _statement_transcript(statement)
    rho = t.challenge(b"rho", q)
    t.append(b"A", proof.A.to_bytes())
    c = t.challenge(b"c", q)
    if rho != proof.rho or c != proof.c:
        return failed + [CHALLENGE]
    C = _compressed_aggregate(statement, rho)
    if params.commit(proof.z_m, proof.z_r) != proof.A * C ** c:
        failed.append(POK)
    return failed


def verify_miner(
    statement: AggregationStatement,
    proof: AggregationProof,
    roster: Optional[Mapping[str, GroupElement]] = None,
) -> bool:
    """Witness-free verification: statement and proof only."""
    return not verify_miner_diagnostics(statement, proof, roster)


def verify_client(
    statement: AggregationStatement,
    proof: AggregationProof,
    opening: ClientOpening,
    my_bundle: UpdateCommitmentBundle,
    roster: Optional[Mapping[str, GroupElement]] = None,
) -> bool:
    return not verify_client_diagnostics(statement, proof, opening, my_bundle, roster)


def verify_client_diagnostics(
    statement: AggregationStatement,
    proof: AggregationProof,
    opening: ClientOpening,
    my_bundle: UpdateCommitmentBundle,
    roster: Optional[Mapping[str, GroupElement]] = None,
) -> list[str]:
    failed = verify_miner_diagnostics(statement, proof, roster)
    mine = [e.to_bytes() for e in my_bundle.enc_w]
    if not any([e.to_bytes() for e in v] == mine for v in statement.enc_updates):
        failed.append("own-update-missing")
    params = statement.params
    if len(opening.agg) != statement.d or len(opening.agg_blind) != statement.d:
        failed.append("opening")
    elif not batch_open_check(params, opening.agg, opening.agg_blind, statement.enc_agg):
        failed.append("opening")
    return failed


def simulate_proof(statement: AggregationStatement, rng: Optional[random.Random] = None) -> AggregationProof:
    """Witness-free proof for a statement, by programming the Schnorr challenge.

    Only available inside ``programmable_oracle()``; the returned proof
    verifies there and nowhere else.
    """
    if not oracle_programming_enabled():
        raise SimulationUnavailable("challenge programming hook is disabled")
    failed = public_diagnostics(statement)
    if failed:
        raise SimulationUnavailable("statement fails public checks: " + ", ".join(failed))
    params = statement.params
    q = params.order
    draw = (lambda: rng.randrange(q)) if rng is not None else (lambda: secrets.randbelow(q))
    t = _statement_transcript(statement)
    rho = t.challenge(b"rho", q)
    C = _compressed_aggregate(statement, rho)
    c, z_m, z_r = draw(), draw(), draw()
    A = params.commit(z_m, z_r) * (C ** c).inverse()
    t.append(b"A", A.to_bytes())
    program_challenge(t.challenge_key(b"c"), c)
    return AggregationProof(A=A, z_m=z_m, z_r=z_r, rho=rho, c=c)
