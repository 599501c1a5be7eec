import random
from dataclasses import fields, replace

import pytest

from zkfl.aggproof import aggregate, make_bundle, prove
from zkfl.chain import (
    CHAIN_FILE,
    STATEMENTS_FILE,
    Block,
    Chain,
    Miner,
    audit_run_dir,
    load_chain,
    quorum_threshold,
    read_round,
)
from zkfl.crypto import keygen
from zkfl.errors import DuplicateRound, Rejection


def honest_round(params, round, n=3, d=4, seed=0):
    rng = random.Random(seed * 1000 + round)
    bundles = [
        make_bundle(keygen(params, f"chain:{i}".encode()), f"c{i}", round,
                    [rng.randrange(params.order) for _ in range(d)], rng)
        for i in range(n)
    ]
    st, wit = aggregate(bundles)
    return st, prove(st, wit, rng), {b.client_id: b.pk for b in bundles}


def miners(k):
    return [Miner(f"m{i}") for i in range(k)]


@pytest.mark.parametrize("k,t", [(1, 1), (2, 2), (3, 3), (4, 3), (5, 4), (6, 5), (7, 5), (10, 7)])
def test_quorum_threshold(k, t):
    assert quorum_threshold(k) == t


def test_honest_append(group):
    chain = Chain(group)
    st, proof, roster = honest_round(group, 1)
    block = chain.submit(st, proof, miners(3), roster)
    assert block.height == chain.genesis.height + 1 == 1
    assert block.prev_hash == chain.genesis.block_hash
    assert read_round(chain, 1) is block
    assert block.enc_agg == st.enc_agg
    assert read_round(chain, 2) is None
    assert chain.audit() == []


def test_dropped_client_rejected_by_all_miners(pg):
    chain = Chain(pg)
    st, proof, _ = honest_round(pg, 1)
    bad = replace(st, client_ids=st.client_ids[1:], enc_updates=st.enc_updates[1:],
                  sigs=st.sigs[1:], client_pks=st.client_pks[1:])
    with pytest.raises(Rejection) as exc:
        chain.submit(bad, proof, miners(3))
    assert set(exc.value.reasons) == {"m0", "m1", "m2"}
    assert all("product" in r for r in exc.value.reasons.values())
    assert len(chain.blocks) == 1


def test_duplicate_round(pg):
    chain = Chain(pg)
    st, proof, roster = honest_round(pg, 1)
    chain.submit(st, proof, miners(3), roster)
    with pytest.raises(DuplicateRound):
        chain.submit(st, proof, miners(3), roster)


def test_quorum_tolerates_minority_faults(pg):
    st, proof, roster = honest_round(pg, 1)
    faulty = Miner("bad", behaviour=lambda s, p: ["always-no"])
    chain = Chain(pg)
    chain.submit(st, proof, miners(3) + [faulty], roster)  # 4 of 5 >= 4
    chain2 = Chain(pg)
    with pytest.raises(Rejection):
        chain2.submit(st, proof, miners(2) + [faulty, faulty], roster)  # 2 of 4 < 3


def test_block_holds_no_witness_scalars():
    names = {f.name for f in fields(Block)}
    assert names == {"height", "prev_hash", "round", "enc_agg", "proof", "statement_hash", "miner_id", "block_hash"}


def _small_chain(params, rounds, tmp_path, d=2):
    chain = Chain(params)
    for r in range(1, rounds + 1):
        st, proof, roster = honest_round(params, r, d=d)
        chain.submit(st, proof, miners(3), roster)
    chain.save(tmp_path)
    return chain


def test_persist_and_audit(group, tmp_path):
    chain = _small_chain(group, 3, tmp_path)
    loaded = load_chain(tmp_path)
    assert [b.block_hash for b in loaded.blocks] == [b.block_hash for b in chain.blocks]
    assert audit_run_dir(tmp_path) == ([], 4)


def test_every_chain_byte_mutation_detected(pg, tmp_path):
    _small_chain(pg, 2, tmp_path, d=1)
    path = tmp_path / CHAIN_FILE
    original = path.read_bytes()
    rng = random.Random(0)
    for pos in range(len(original)):
        mutated = bytearray(original)
        mutated[pos] = rng.choice([b for b in range(256) if b != original[pos]])
        path.write_bytes(bytes(mutated))
        failures, _ = audit_run_dir(tmp_path)
        assert failures, f"mutation at byte {pos} went unnoticed"
    path.write_bytes(original)
    assert audit_run_dir(tmp_path)[0] == []


def test_uppercase_hex_rejected(pg, tmp_path):
    _small_chain(pg, 1, tmp_path)
    path = tmp_path / CHAIN_FILE
    path.write_bytes(path.read_bytes().upper())
    assert audit_run_dir(tmp_path)[0]


def test_statement_tamper_detected(pg, tmp_path):
    _small_chain(pg, 2, tmp_path)
    path = tmp_path / STATEMENTS_FILE
    data = bytearray(path.read_bytes())
    data[100] = ord("0") if data[100] != ord("0") else ord("1")
    path.write_bytes(bytes(data))
    assert audit_run_dir(tmp_path)[0]


def test_missing_statement_detected(pg, tmp_path):
    _small_chain(pg, 2, tmp_path)
    path = tmp_path / STATEMENTS_FILE
    path.write_bytes(path.read_bytes().split(b"\n")[0] + b"\n")
    failures, _ = audit_run_dir(tmp_path)
    assert any("missing" in f for f in failures)


def test_truncated_chain_file(pg, tmp_path):
    _small_chain(pg, 2, tmp_path)
    path = tmp_path / CHAIN_FILE
    path.write_bytes(path.read_bytes()[:-10])
    assert audit_run_dir(tmp_path)[0]


def test_missing_dir(tmp_path):
    failures, n = audit_run_dir(tmp_path / "nope")
    assert failures and n == 0
