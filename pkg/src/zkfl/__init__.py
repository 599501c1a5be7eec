"""Verifiable federated aggregation with Pedersen commitments and Fiat-Shamir proofs."""

__version__ = "0.1.0"
