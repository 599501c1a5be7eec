"""Canonical little-endian, length-prefixed byte encoding helpers."""

from __future__ import annotations

import struct
from typing import Sequence

from zkfl.crypto.groups import GroupElement, GroupParams
from zkfl.errors import EncodingError


def u32(n: int) -> bytes:
    return struct.pack("<I", n)


def u64(n: int) -> bytes:
    return struct.pack("<Q", n)


def lp_bytes(data: bytes) -> bytes:
    return u32(len(data)) + data


def lp_str(s: str) -> bytes:
    return lp_bytes(s.encode("utf-8"))


def element_vector(elems: Sequence[GroupElement]) -> bytes:
    return u32(len(elems)) + b"".join(e.to_bytes() for e in elems)


def scalar_vector(params: GroupParams, scalars: Sequence[int]) -> bytes:
    return u32(len(scalars)) + b"".join(params.scalar_to_bytes(k) for k in scalars)


class Reader:
    """Cursor over a canonical encoding; every read is bounds-checked."""

    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise EncodingError("truncated encoding")
        out = bytes(self.data[self.pos:self.pos + n])
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def lp_bytes(self) -> bytes:
        return self.take(self.u32())

    def lp_str(self) -> str:
        try:
            return self.lp_bytes().decode("utf-8")
        except UnicodeDecodeError:
            raise EncodingError("invalid utf-8") from None

    def element(self, params: GroupParams) -> GroupElement:
        return params.element_from_bytes(self.take(params.element_size))

    def scalar(self, params: GroupParams) -> int:
        return params.scalar_from_bytes(self.take(params.scalar_size))

    def element_vector(self, params: GroupParams) -> list[GroupElement]:
        n = self.u32()
        if n * params.element_size > len(self.data) - self.pos:
            raise EncodingError("truncated encoding")
        return [self.element(params) for _ in range(n)]

    def scalar_vector(self, params: GroupParams) -> list[int]:
        n = self.u32()
        if n * params.scalar_size > len(self.data) - self.pos:
            raise EncodingError("truncated encoding")
        return [self.scalar(params) for _ in range(n)]

    def finish(self) -> None:
        if self.pos != len(self.data):
            raise EncodingError("trailing bytes after encoding")
