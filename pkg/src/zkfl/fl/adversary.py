"""Malicious aggregator behaviours: abandon, replace and insert.

Each attack comes in two flavours. A *naive* aggregator tampers with the
statement after producing the honest proof, leaving Enc(w) untouched. An
*adaptive* aggregator rebuilds Enc(w) and the proof so that the tampered
statement is internally consistent; what remains to catch it is the
signatures and the public round roster.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from zkfl.aggproof import (
    AggregationProof,
    AggregationStatement,
    ClientOpening,
    UpdateCommitmentBundle,
    aggregate,
    make_bundle,
    prove,
    prove_unchecked,
)
from zkfl.crypto.codec import FixedPointCodec
from zkfl.crypto.pedersen import commit_vector
from zkfl.crypto.schnorr import keygen, sign
from zkfl.errors import ConfigError

ATTACK_KINDS = ("abandon", "replace", "insert")


@dataclass(frozen=True)
class AttackScript:
    kind: str
    round: int
    client: Optional[str] = None
    fake_update: Optional[tuple[float, ...]] = None
    adaptive: bool = True

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise ConfigError(f"unknown attack kind {self.kind!r}; expected one of {ATTACK_KINDS}")
        if self.round < 1:
            raise ConfigError("attack round must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "AttackScript":
        unknown = set(d) - {"kind", "round", "client", "fake_update", "adaptive"}
        if unknown:
            raise ConfigError(f"unknown attack fields: {sorted(unknown)}")
        try:
            fake = d.get("fake_update")
            return cls(
                kind=d["kind"],
                round=int(d["round"]),
                client=d.get("client"),
                fake_update=tuple(float(v) for v in fake) if fake is not None else None,
                adaptive=bool(d.get("adaptive", True)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad attack entry {d!r}: {exc}") from None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "round": self.round, "adaptive": self.adaptive}
        if self.client is not None:
            out["client"] = self.client
        if self.fake_update is not None:
            out["fake_update"] = list(self.fake_update)
        return out


@dataclass(frozen=True)
class AggregatorOutput:
    """What the aggregator publishes: statement and proof, plus the opening sent to clients."""

    statement: AggregationStatement
    proof: AggregationProof
    opening: ClientOpening


def honest_aggregation(bundles: Sequence[UpdateCommitmentBundle], rng: Optional[random.Random] = None) -> AggregatorOutput:
    statement, witness = aggregate(bundles)
    proof = prove(statement, witness, rng)
    return AggregatorOutput(statement, proof, ClientOpening(witness.agg, witness.agg_blind))


def _rebuild(statement: AggregationStatement, **changes) -> AggregationStatement:
    """Statement with replaced entries and Enc(w) recomputed from the new enc_updates."""
    st = replace(statement, **changes)
    enc_agg = [st.params.product(col) for col in zip(*st.enc_updates)] if st.enc_updates else []
    return replace(st, enc_agg=enc_agg)


def _fake_update(attack: AttackScript, d: int, q: int, rng: random.Random, codec: Optional[FixedPointCodec]) -> list[int]:
    if attack.fake_update is not None:
        if codec is None:
            raise ConfigError("a real-valued fake update needs a codec")
        if len(attack.fake_update) != d:
            raise ConfigError(f"fake update has dimension {len(attack.fake_update)}, model has {d}")
        return codec.quantize(attack.fake_update)
    return [rng.randrange(-(1 << 16), 1 << 16) % q for _ in range(d)]


def _target_index(bundles: Sequence[UpdateCommitmentBundle], client: Optional[str]) -> int:
    ids = [b.client_id for b in bundles]
    if client is None:
        return min(1, len(ids) - 1)
    if client not in ids:
        raise ConfigError(f"attack targets {client!r}, which is not in this round's cohort")
    return ids.index(client)


def malicious_aggregation(
    bundles: Sequence[UpdateCommitmentBundle],
    attack: AttackScript,
    rng: random.Random,
    codec: Optional[FixedPointCodec] = None,
) -> AggregatorOutput:
    """Carry out ``attack`` on an honest round's bundles."""
    honest = honest_aggregation(bundles, rng)
    st, proof = honest.statement, honest.proof
    params = st.params
    q = params.order
    n, d = st.n, st.d

    def sums(updates, blinds):
        return [sum(c) % q for c in zip(*updates)], [sum(c) % q for c in zip(*blinds)]

    if attack.kind == "abandon":
        j = _target_index(bundles, attack.client)
        keep = [i for i in range(n) if i != j]
        pick = lambda xs: [xs[i] for i in keep]  # noqa: E731
        if not attack.adaptive or not keep:
            bad = replace(st, client_ids=pick(st.client_ids), enc_updates=pick(st.enc_updates),
                          sigs=pick(st.sigs), client_pks=pick(st.client_pks))
            return AggregatorOutput(bad, proof, honest.opening)
        return honest_aggregation([bundles[i] for i in keep], rng)

    if attack.kind == "replace":
        j = _target_index(bundles, attack.client)
        fake = _fake_update(attack, d, q, rng, codec)
        blinds = [rng.randrange(q) for _ in range(d)]
        enc_fake = commit_vector(params, fake, blinds)
        enc_updates = list(st.enc_updates)
        enc_updates[j] = enc_fake
        if not attack.adaptive:
            return AggregatorOutput(replace(st, enc_updates=enc_updates), proof, honest.opening)
        bad = _rebuild(st, enc_updates=enc_updates)
        updates = [b.w_q for b in bundles]
        all_blinds = [b.s for b in bundles]
        updates[j], all_blinds[j] = fake, blinds
        agg, agg_blind = sums(updates, all_blinds)
        return AggregatorOutput(bad, prove_unchecked(bad, agg, agg_blind, rng), ClientOpening(agg, agg_blind))

    # insert
    sybil = keygen(params, b"sybil:" + rng.randbytes(16))
    sybil_id = f"sybil-{rng.randrange(1 << 32):08x}"
    fake = _fake_update(attack, d, q, rng, codec)
    fake_bundle = make_bundle(sybil, sybil_id, st.round, fake, rng)
    if not attack.adaptive:
        # fabricated pair: signature made with a key other than the one listed
        forger = keygen(params, b"forger:" + rng.randbytes(16))
        bad_sig = sign(forger, b"not-the-statement")
        bad = replace(
            st,
            client_ids=st.client_ids + [sybil_id],
            enc_updates=st.enc_updates + [fake_bundle.enc_w],
            sigs=st.sigs + [bad_sig],
            client_pks=st.client_pks + [sybil.pk],
        )
        return AggregatorOutput(bad, proof, honest.opening)
    return honest_aggregation(list(bundles) + [fake_bundle], rng)
