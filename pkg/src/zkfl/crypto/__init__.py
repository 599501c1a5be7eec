from zkfl.crypto.codec import FixedPointCodec, Quantized, dequantize_vector, quantize_vector
from zkfl.crypto.groups import GroupElement, GroupParams, Ristretto255, Scalar, TestGroup, get_group
from zkfl.crypto.pedersen import commit, commit_vector, open_check
from zkfl.crypto.schnorr import KeyPair, Signature, keygen, sign, verify_sig
from zkfl.crypto.transcript import Transcript, programmable_oracle, transcript_challenge

__all__ = [
    "FixedPointCodec", "Quantized", "quantize_vector", "dequantize_vector",
    "GroupElement", "GroupParams", "Ristretto255", "TestGroup", "Scalar", "get_group",
    "commit", "commit_vector", "open_check",
    "KeyPair", "Signature", "keygen", "sign", "verify_sig",
    "Transcript", "programmable_oracle", "transcript_challenge",
]
