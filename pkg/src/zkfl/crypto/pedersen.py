"""Pedersen commitments ``g^m * h^r``, one group element per coordinate."""

from __future__ import annotations

import secrets
from typing import Sequence

from zkfl.crypto.groups import GroupElement, GroupParams
from zkfl.errors import DimensionMismatch


def commit(params: GroupParams, m: int, r: int) -> GroupElement:
    return params.commit(m % params.order, r % params.order)


def open_check(params: GroupParams, m: int, r: int, cm: GroupElement) -> bool:
    """True iff ``cm`` opens to message ``m`` with randomness ``r``."""
    if cm.group is not params:
        return False
    return params.commit(m % params.order, r % params.order) == cm


def commit_vector(params: GroupParams, ms: Sequence[int], rs: Sequence[int]) -> list[GroupElement]:
    if len(ms) != len(rs):
        raise DimensionMismatch(f"{len(ms)} messages but {len(rs)} blinders")
    return [commit(params, m, r) for m, r in zip(ms, rs)]


def batch_open_check(
    params: GroupParams,
    ms: Sequence[int],
    rs: Sequence[int],
    cms: Sequence[GroupElement],
    weight_bits: int = 128,
) -> bool:
    """Check every ``cms[j]`` opens to ``(ms[j], rs[j])``.

    Large batches in big groups use one random linear combination (false
    accept probability at most 2^-weight_bits); otherwise each opening is
    checked directly.
    """
    if not len(ms) == len(rs) == len(cms):
        return False
    if any(cm.group is not params for cm in cms):
        return False
    if len(cms) < 8 or params.order.bit_length() <= weight_bits:
        return all(open_check(params, m, r, cm) for m, r, cm in zip(ms, rs, cms))
    q = params.order
    weights = [secrets.randbits(weight_bits) | 1 for _ in cms]
    m_sum = sum(w * m for w, m in zip(weights, ms)) % q
    r_sum = sum(w * r for w, r in zip(weights, rs)) % q
    return params.multi_exp(cms, weights) == params.commit(m_sum, r_sum)
