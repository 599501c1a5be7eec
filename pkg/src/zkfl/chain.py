"""In-process blockchain on which miners accept aggregation proofs.

A block stores the encrypted aggregate, the proof and the hash of the full
statement; the statement itself is kept off-chain. A submission is appended
once at least ceil((2k+1)/3) of the k miners accept it.

On disk a run directory holds two files, one lowercase-hex canonical
encoding per line:

    chain.log        blocks, genesis first
    statements.log   the off-chain statements, one per non-genesis block
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

from zkfl.aggproof import (
    AggregationProof,
    AggregationStatement,
    verify_miner_diagnostics,
)
from zkfl.crypto import encoding as enc
from zkfl.crypto.groups import GroupElement, GroupParams, get_group
from zkfl.errors import DuplicateRound, EncodingError, Rejection

CHAIN_FILE = "chain.log"
STATEMENTS_FILE = "statements.log"
HASH_LEN = 32
GENESIS_MINER = "genesis"


def statement_hash(statement: AggregationStatement) -> bytes:
    return hashlib.sha256(b"zkfl/statement" + statement.to_bytes()).digest()


@dataclass(frozen=True)
class Block:
    height: int
    prev_hash: bytes
    round: int
    enc_agg: list[GroupElement]
    proof: Optional[AggregationProof]
    statement_hash: bytes
    miner_id: str
    block_hash: bytes = b""

    def header_bytes(self, params: GroupParams) -> bytes:
        parts = [
            enc.u64(self.height),
            self.prev_hash,
            enc.u64(self.round),
            enc.lp_str(params.group_id),
            enc.element_vector(self.enc_agg),
        ]
        if self.proof is None:
            parts.append(b"\x00")
        else:
            parts += [b"\x01", self.proof.to_bytes()]
        parts += [self.statement_hash, enc.lp_str(self.miner_id)]
        return b"".join(parts)

    def compute_hash(self, params: GroupParams) -> bytes:
        return hashlib.sha256(b"zkfl/block" + self.header_bytes(params)).digest()

    def to_bytes(self, params: GroupParams) -> bytes:
        return self.header_bytes(params) + self.block_hash

    @classmethod
    def from_bytes(cls, data: bytes) -> tuple["Block", GroupParams]:
        r = enc.Reader(data)
        height = r.u64()
        prev_hash = r.take(HASH_LEN)
        round = r.u64()
        try:
            params = get_group(r.lp_str())
        except ValueError as exc:
            raise EncodingError(str(exc)) from None
        enc_agg = r.element_vector(params)
        flag = r.u8()
        if flag == 0:
            proof = None
        elif flag == 1:
            proof = AggregationProof.from_bytes(params, r.take(params.element_size + 4 * params.scalar_size))
        else:
            raise EncodingError("bad proof flag")
        st_hash = r.take(HASH_LEN)
        miner_id = r.lp_str()
        block_hash = r.take(HASH_LEN)
        r.finish()
        return cls(height, prev_hash, round, enc_agg, proof, st_hash, miner_id, block_hash), params


def genesis_block(params: GroupParams) -> Block:
    b = Block(0, bytes(HASH_LEN), 0, [], None, bytes(HASH_LEN), GENESIS_MINER)
    return replace(b, block_hash=b.compute_hash(params))


@dataclass
class Miner:
    """A verifying node. ``behaviour`` overrides verification for fault-injection tests."""

    miner_id: str
    behaviour: Optional[Callable[[AggregationStatement, AggregationProof], list[str]]] = None

    def check(
        self,
        statement: AggregationStatement,
        proof: AggregationProof,
        roster: Optional[Mapping[str, GroupElement]] = None,
    ) -> list[str]:
        if self.behaviour is not None:
            return self.behaviour(statement, proof)
        return verify_miner_diagnostics(statement, proof, roster)


def quorum_threshold(k: int) -> int:
    return math.ceil((2 * k + 1) / 3)


@dataclass
class Chain:
    params: GroupParams
    blocks: list[Block] = field(default_factory=list)
    statements: dict[int, AggregationStatement] = field(default_factory=dict)

    def __post_init__(self):
        if not self.blocks:
            self.blocks.append(genesis_block(self.params))

    @property
    def genesis(self) -> Block:
        return self.blocks[0]

    @property
    def tip(self) -> Block:
        return self.blocks[-1]

    def submit(
        self,
        statement: AggregationStatement,
        proof: AggregationProof,
        quorum: Sequence[Miner],
        roster: Optional[Mapping[str, GroupElement]] = None,
    ) -> Block:
        """Append a block if enough miners accept; otherwise raise Rejection."""
        if statement.round in self.statements or statement.round == 0:
            raise DuplicateRound(f"round {statement.round} already on chain")
        if statement.params is not self.params:
            raise Rejection({m.miner_id: ["wrong-group"] for m in quorum})
        verdicts = {m.miner_id: m.check(statement, proof, roster) for m in quorum}
        accepting = [mid for mid, failed in verdicts.items() if not failed]
        if not quorum or len(accepting) < quorum_threshold(len(quorum)):
            raise Rejection({mid: failed for mid, failed in verdicts.items() if failed})
        tip = self.tip
        block = Block(
            height=tip.height + 1,
            prev_hash=tip.block_hash,
            round=statement.round,
            enc_agg=list(statement.enc_agg),
            proof=proof,
            statement_hash=statement_hash(statement),
            miner_id=accepting[0],
        )
        block = replace(block, block_hash=block.compute_hash(self.params))
        self.blocks.append(block)
        self.statements[statement.round] = statement
        return block

    def read_round(self, round: int) -> Optional[Block]:
        for b in self.blocks[1:]:
            if b.round == round:
                return b
        return None

    def audit(self) -> list[str]:
        return audit_blocks(self.params, self.blocks, self.statements)

    # persistence
    def chain_bytes(self) -> bytes:
        return b"".join(b.to_bytes(self.params).hex().encode() + b"\n" for b in self.blocks)

    def statements_bytes(self) -> bytes:
        return b"".join(
            self.statements[b.round].to_bytes().hex().encode() + b"\n" for b in self.blocks[1:]
        )

    def save(self, run_dir: Path) -> None:
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        (run_dir / CHAIN_FILE).write_bytes(self.chain_bytes())
        (run_dir / STATEMENTS_FILE).write_bytes(self.statements_bytes())


def read_round(chain: Chain, round: int) -> Optional[Block]:
    return chain.read_round(round)


def _parse_hex_lines(data: bytes, what: str) -> list[bytes]:
    if not data.endswith(b"\n"):
        raise EncodingError(f"{what}: missing final newline")
    out = []
    for i, line in enumerate(data[:-1].split(b"\n")):
        try:
            raw = bytes.fromhex(line.decode("ascii"))
        except (UnicodeDecodeError, ValueError):
            raise EncodingError(f"{what}: line {i} is not hex") from None
        if raw.hex().encode() != line:
            raise EncodingError(f"{what}: line {i} is not canonical lowercase hex")
        out.append(raw)
    return out


def load_chain(run_dir: Path) -> Chain:
    """Parse a persisted chain; raises EncodingError on any malformed byte."""
    run_dir = Path(run_dir)
    lines = _parse_hex_lines((run_dir / CHAIN_FILE).read_bytes(), CHAIN_FILE)
    blocks = []
    params = None
    for raw in lines:
        b, p = Block.from_bytes(raw)
        if params is None:
            params = p
        elif p is not params:
            raise EncodingError("blocks from different groups")
        blocks.append(b)
    if params is None:
        raise EncodingError("empty chain file")
    st_path = run_dir / STATEMENTS_FILE
    statements = {}
    if st_path.exists():
        for raw in _parse_hex_lines(st_path.read_bytes(), STATEMENTS_FILE) if st_path.stat().st_size else []:
            st = AggregationStatement.from_bytes(raw)
            statements[st.round] = st
    chain = Chain(params, blocks, statements)
    if chain.chain_bytes() != (run_dir / CHAIN_FILE).read_bytes():
        raise EncodingError("chain file is not in canonical form")
    return chain


def audit_blocks(
    params: GroupParams,
    blocks: Sequence[Block],
    statements: Mapping[int, AggregationStatement],
    verify_proofs: bool = True,
) -> list[str]:
    """Structural checks first; proofs are replayed only on a well-formed chain."""
    failures = []
    if not blocks or blocks[0] != genesis_block(params):
        failures.append("genesis block mismatch")
    seen_rounds = set()
    for i, b in enumerate(blocks):
        if b.height != i:
            failures.append(f"block {i}: height {b.height}")
        if b.block_hash != b.compute_hash(params):
            failures.append(f"block {i}: hash mismatch")
        if i > 0:
            if b.prev_hash != blocks[i - 1].block_hash:
                failures.append(f"block {i}: broken link")
            if b.round in seen_rounds or b.round == 0:
                failures.append(f"block {i}: duplicate round {b.round}")
            seen_rounds.add(b.round)
            if b.proof is None:
                failures.append(f"block {i}: missing proof")
            st = statements.get(b.round)
            if st is None:
                failures.append(f"block {i}: statement for round {b.round} missing")
            elif statement_hash(st) != b.statement_hash:
                failures.append(f"block {i}: statement hash mismatch")
            elif [e.to_bytes() for e in st.enc_agg] != [e.to_bytes() for e in b.enc_agg]:
                failures.append(f"block {i}: enc_agg differs from statement")
    if failures or not verify_proofs:
        return failures
    for b in blocks[1:]:
        failed = verify_miner_diagnostics(statements[b.round], b.proof)
        if failed:
            failures.append(f"round {b.round}: proof rejected ({', '.join(failed)})")
    return failures


def _raw_link_failures(data: bytes) -> list[str]:
    """Hash links checked on the raw lines, before any group element is decoded."""
    failures = []
    prev = bytes(HASH_LEN)
    for i, raw in enumerate(_parse_hex_lines(data, CHAIN_FILE)):
        if len(raw) < 8 + 3 * HASH_LEN:
            return [f"block {i}: truncated"]
        header, stored = raw[:-HASH_LEN], raw[-HASH_LEN:]
        if hashlib.sha256(b"zkfl/block" + header).digest() != stored:
            failures.append(f"block {i}: hash mismatch")
        if raw[8 : 8 + HASH_LEN] != prev:
            failures.append(f"block {i}: broken link")
        prev = stored
    return failures


def audit_run_dir(run_dir: Path, verify_proofs: bool = True) -> tuple[list[str], int]:
    """Re-validate a persisted chain. Returns (failures, number of blocks)."""
    try:
        failures = _raw_link_failures((Path(run_dir) / CHAIN_FILE).read_bytes())
        if failures:
            return failures, 0
        chain = load_chain(run_dir)
    except (EncodingError, OSError) as exc:
        return [f"unreadable chain: {exc}"], 0
    return audit_blocks(chain.params, chain.blocks, chain.statements, verify_proofs), len(chain.blocks)
