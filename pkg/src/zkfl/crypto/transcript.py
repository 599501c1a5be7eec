"""Fiat-Shamir transcript over SHA-512.

Every append is framed as ``len(label) || label || len(data) || data`` so
distinct append sequences never collide by concatenation. Challenges are the
SHA-512 digest of the running state, reduced mod the group order.

For zero-knowledge testing the challenge oracle can be *programmed*: inside
``programmable_oracle()`` a simulator may fix the challenge returned for a
particular transcript state. Outside that context programming is impossible,
so production verification always uses the hash.
"""

from __future__ import annotations

import contextlib
import contextvars
import hashlib
from typing import Iterator

from zkfl.crypto.encoding import u32

_programmed: contextvars.ContextVar[dict[bytes, int] | None] = contextvars.ContextVar(
    "zkfl_programmed_oracle", default=None
)


@contextlib.contextmanager
def programmable_oracle() -> Iterator[dict[bytes, int]]:
    """Enable challenge programming for the current context (test harness hook)."""
    table: dict[bytes, int] = {}
    token = _programmed.set(table)
    try:
        yield table
    finally:
        _programmed.reset(token)


def oracle_programming_enabled() -> bool:
    return _programmed.get() is not None


def program_challenge(key: bytes, value: int) -> None:
    table = _programmed.get()
    if table is None:
        raise RuntimeError("challenge programming is disabled outside programmable_oracle()")
    table[key] = value


class Transcript:
    def __init__(self, domain: bytes):
        self._state = hashlib.sha512()
        self.append(b"dom-sep", domain)

    def append(self, label: bytes, data: bytes) -> None:
        self._state.update(u32(len(label)) + label + u32(len(data)) + data)

    def challenge_key(self, label: bytes) -> bytes:
        """Digest the challenge for ``label`` is derived from, without consuming it."""
        h = self._state.copy()
        h.update(b"challenge" + u32(len(label)) + label)
        return h.digest()

    def challenge(self, label: bytes, order: int) -> int:
        key = self.challenge_key(label)
        table = _programmed.get()
        if table is not None and key in table:
            c = table[key] % order
        else:
            c = int.from_bytes(key, "little") % order
        width = (order.bit_length() + 7) // 8
        self.append(b"challenge:" + label, c.to_bytes(width, "little"))
        return c


def transcript_challenge(order: int, *pairs: tuple[bytes, bytes], domain: bytes = b"zkfl") -> int:
    """One-shot challenge over a sequence of (label, data) appends."""
    t = Transcript(domain)
    for label, data in pairs:
        t.append(label, data)
    return t.challenge(b"c", order)
