import hashlib
import struct

import pytest

from zkfl.crypto import Signature, keygen, sign, transcript_challenge, verify_sig
from zkfl.crypto.transcript import Transcript
from zkfl.errors import EncodingError


def flip(data: bytes, bit: int) -> bytes:
    b = bytearray(data)
    b[bit // 8] ^= 1 << (bit % 8)
    return bytes(b)


def test_roundtrip(group):
    kp = keygen(group, b"alice")
    sig = sign(kp, b"hello")
    assert verify_sig(kp.pk, b"hello", sig)


def test_deterministic(group):
    kp = keygen(group, b"alice")
    assert keygen(group, b"alice") == kp
    assert sign(kp, b"m") == sign(kp, b"m")


def test_wrong_pk(pg):
    a, b = keygen(pg, b"alice"), keygen(pg, b"bob")
    assert not verify_sig(b.pk, b"hello", sign(a, b"hello"))


def test_flipped_message_byte(pg):
    kp = keygen(pg, b"alice")
    sig = sign(kp, b"hello world")
    assert not verify_sig(kp.pk, b"hellp world", sig)


def test_keygen_requires_seed(pg):
    with pytest.raises(ValueError):
        keygen(pg, b"")


def test_single_bit_mutations_fail(pg):
    kp = keygen(pg, b"fuzz")
    msgs = [b"", b"x", b"round-7|client-3|" + bytes(range(64))]
    for msg in msgs:
        sig = sign(kp, msg)
        raw = sig.to_bytes()
        assert verify_sig(kp.pk, msg, sig)
        for bit in range(len(msg) * 8):
            assert not verify_sig(kp.pk, flip(msg, bit), sig)
        for bit in range(len(raw) * 8):
            try:
                mutated = Signature.from_bytes(pg, flip(raw, bit))
            except EncodingError:
                continue
            assert not verify_sig(kp.pk, msg, mutated)
        pk_raw = kp.pk.to_bytes()
        for bit in range(len(pk_raw) * 8):
            try:
                pk2 = pg.element_from_bytes(flip(pk_raw, bit))
            except EncodingError:
                continue
            assert not verify_sig(pk2, msg, sig)


def test_signature_encoding_roundtrip(group):
    kp = keygen(group, b"enc")
    sig = sign(kp, b"payload")
    assert Signature.from_bytes(group, sig.to_bytes()) == sig


def test_transcript_deterministic(pg):
    pairs = [(b"a", b"1"), (b"b", b"22")]
    assert transcript_challenge(pg.order, *pairs) == transcript_challenge(pg.order, *pairs)


def test_transcript_label_sensitivity(pg):
    c1 = transcript_challenge(pg.order, (b"a", b"1"))
    c2 = transcript_challenge(pg.order, (b"b", b"1"))
    c3 = transcript_challenge(pg.order, (b"a", b"2"))
    assert len({c1, c2, c3}) == 3


def test_transcript_framing_prevents_concatenation_collisions(pg):
    c1 = transcript_challenge(pg.order, (b"ab", b"c"))
    c2 = transcript_challenge(pg.order, (b"a", b"bc"))
    assert c1 != c2


def test_empty_transcript_stable(pg):
    c = Transcript(b"zkfl").challenge(b"c", pg.order)
    assert c == Transcript(b"zkfl").challenge(b"c", pg.order)
    # recomputed straight from the framing rules with hashlib
    framed = struct.pack("<I", 7) + b"dom-sep" + struct.pack("<I", 4) + b"zkfl"
    digest = hashlib.sha512(framed + b"challenge" + struct.pack("<I", 1) + b"c").digest()
    assert c == int.from_bytes(digest, "little") % pg.order
    assert c == 6321571022694774426214773982828852669085683162892904458696887975229127160082


def test_successive_challenges_differ(pg):
    t = Transcript(b"zkfl")
    assert t.challenge(b"c", pg.order) != t.challenge(b"c", pg.order)
