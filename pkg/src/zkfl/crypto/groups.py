"""Prime-order groups used by every protocol layer.

Two backends share one interface:

* ``test``: the order-11 subgroup of (Z/23Z)^*, with g = 2 and h = 3. Small
  enough for exhaustive oracles. The discrete log of h base g is trivially
  computable here, so binding only holds under the convention that nobody
  uses it; this group is for tests only.
* ``prod``: ristretto255 (~126-bit security). g is the standard basepoint and
  h is hashed onto the group from a domain-separation string.

Group elements are written multiplicatively: ``a * b`` is the group
operation and ``a ** k`` is exponentiation by an integer scalar.
"""

from __future__ import annotations

import hashlib
from typing import Sequence

from zkfl.crypto import ristretto
from zkfl.errors import EncodingError

Scalar = int


class GroupElement:
    """Immutable group element bound to its group."""

    __slots__ = ("group", "rep", "_bytes")

    def __init__(self, group: "GroupParams", rep):
        self.group = group
        self.rep = rep
        self._bytes = None

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.group, self.group._op(self.rep, other.rep))

    def __pow__(self, k: int) -> "GroupElement":
        return self.group.exp(self, k)

    def __truediv__(self, other: "GroupElement") -> "GroupElement":
        return self * other.inverse()

    def inverse(self) -> "GroupElement":
        return GroupElement(self.group, self.group._neg(self.rep))

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.group is other.group and self.group._eq(self.rep, other.rep)

    def __hash__(self) -> int:
        return hash(self.to_bytes())

    def to_bytes(self) -> bytes:
        if self._bytes is None:
            self._bytes = self.group._encode(self.rep)
        return self._bytes

    def is_identity(self) -> bool:
        return self == self.group.identity

    def __repr__(self) -> str:
        return f"GroupElement({self.group.group_id}, {self.to_bytes().hex()})"


class GroupParams:
    """Group description plus the two Pedersen bases ``g`` and ``h``."""

    group_id: str
    order: int
    element_size: int
    scalar_size: int

    def __init__(self):
        self.identity = GroupElement(self, self._identity_rep())
        self.g = GroupElement(self, self._g_rep())
        self.h = GroupElement(self, self._h_rep())

    # backend hooks
    def _identity_rep(self): raise NotImplementedError
    def _g_rep(self): raise NotImplementedError
    def _h_rep(self): raise NotImplementedError
    def _op(self, a, b): raise NotImplementedError
    def _neg(self, a): raise NotImplementedError
    def _eq(self, a, b) -> bool: raise NotImplementedError
    def _encode(self, a) -> bytes: raise NotImplementedError
    def _decode(self, data: bytes): raise NotImplementedError
    def _exp(self, base: GroupElement, k: int): raise NotImplementedError

    def exp(self, base: GroupElement, k: int) -> GroupElement:
        return GroupElement(self, self._exp(base, k % self.order))

    def multi_exp(self, bases: Sequence[GroupElement], scalars: Sequence[int]) -> GroupElement:
        """Product of bases[j] ** scalars[j]."""
        acc = self.identity
        for b, k in zip(bases, scalars):
            acc = acc * (b ** k)
        return acc

    def product(self, elements: Sequence[GroupElement]) -> GroupElement:
        acc = self.identity.rep
        for e in elements:
            acc = self._op(acc, e.rep)
        return GroupElement(self, acc)

    def commit(self, m: int, r: int) -> GroupElement:
        return self.g ** m * self.h ** r

    def element_from_bytes(self, data: bytes) -> GroupElement:
        if len(data) != self.element_size:
            raise EncodingError(f"expected {self.element_size} bytes for a {self.group_id} element")
        try:
            rep = self._decode(bytes(data))
        except ValueError as exc:
            raise EncodingError(str(exc)) from None
        elem = GroupElement(self, rep)
        elem._bytes = bytes(data)
        return elem

    def scalar_to_bytes(self, k: int) -> bytes:
        return (k % self.order).to_bytes(self.scalar_size, "little")

    def scalar_from_bytes(self, data: bytes) -> int:
        if len(data) != self.scalar_size:
            raise EncodingError(f"expected {self.scalar_size} bytes for a scalar")
        k = int.from_bytes(data, "little")
        if k >= self.order:
            raise EncodingError("non-canonical scalar")
        return k

    def hash_to_scalar(self, *parts: bytes) -> int:
        h = hashlib.sha512()
        for part in parts:
            h.update(len(part).to_bytes(4, "little"))
            h.update(part)
        return int.from_bytes(h.digest(), "little") % self.order

    def __repr__(self) -> str:
        return f"<GroupParams {self.group_id} q={self.order}>"


class TestGroup(GroupParams):
    """Order-11 subgroup of (Z/23Z)^*."""

    __test__ = False  # not a pytest class

    group_id = "test"
    modulus = 23
    order = 11
    element_size = 1
    scalar_size = 1

    def _identity_rep(self):
        return 1

    def _g_rep(self):
        return 2

    def _h_rep(self):
        return 3

    def _op(self, a, b):
        return a * b % self.modulus

    def _neg(self, a):
        return pow(a, -1, self.modulus)

    def _eq(self, a, b):
        return a == b

    def _encode(self, a):
        return a.to_bytes(self.element_size, "little")

    def _decode(self, data):
        x = int.from_bytes(data, "little")
        if not 0 < x < self.modulus or pow(x, self.order, self.modulus) != 1:
            raise ValueError("not an element of the order-11 subgroup")
        return x

    def _exp(self, base, k):
        return pow(base.rep, k, self.modulus)


class Ristretto255(GroupParams):
    group_id = "prod"
    order = ristretto.ORDER
    element_size = 32
    scalar_size = 32
    H_DOMAIN = b"zkfl/pedersen/h/ristretto255"
    BASE_WINDOW = 11

    # bases exponentiated at least this often get a comb table
    HOT_THRESHOLD = 24
    _MAX_TABLES = 64

    def __init__(self):
        self._tables: dict[bytes, ristretto.FixedBaseTable] = {}
        self._uses: dict[bytes, int] = {}
        super().__init__()
        self._tables[self.g.to_bytes()] = self._g_table = ristretto.FixedBaseTable(self.g.rep, self.BASE_WINDOW)
        self._tables[self.h.to_bytes()] = self._h_table = ristretto.FixedBaseTable(self.h.rep, self.BASE_WINDOW)

    def _identity_rep(self):
        return ristretto.IDENTITY

    def _g_rep(self):
        return ristretto.BASEPOINT

    def _h_rep(self):
        return ristretto.from_uniform_bytes(hashlib.sha512(self.H_DOMAIN).digest())

    def _op(self, a, b):
        return ristretto.add(a, b)

    def _neg(self, a):
        return ristretto.neg(a)

    def _eq(self, a, b):
        return ristretto.equal(a, b)

    def _encode(self, a):
        return ristretto.encode(a)

    def _decode(self, data):
        return ristretto.decode(data)

    def _exp(self, base, k):
        key = base.to_bytes()
        table = self._tables.get(key)
        if table is not None:
            return table.mult(k)
        uses = self._uses.get(key, 0) + 1
        if uses >= self.HOT_THRESHOLD and len(self._tables) < self._MAX_TABLES:
            self._uses.pop(key, None)
            table = self._tables[key] = ristretto.FixedBaseTable(base.rep)
            return table.mult(k)
        if len(self._uses) > 8192:
            self._uses.clear()
        self._uses[key] = uses
        return ristretto.scalar_mult(base.rep, k)

    def commit(self, m: int, r: int) -> GroupElement:
        q = self.order
        return GroupElement(self, ristretto.add(self._g_table.mult(m % q), self._h_table.mult(r % q)))

    def multi_exp(self, bases, scalars):
        return GroupElement(self, ristretto.multi_scalar_mult([b.rep for b in bases], list(scalars)))


_GROUPS: dict[str, GroupParams] = {}


def get_group(group_id: str) -> GroupParams:
    """Shared group instance for ``"test"`` or ``"prod"``."""
    if group_id not in _GROUPS:
        if group_id == "test":
            _GROUPS[group_id] = TestGroup()
        elif group_id == "prod":
            _GROUPS[group_id] = Ristretto255()
        else:
            raise ValueError(f"unknown group {group_id!r}; expected 'test' or 'prod'")
    return _GROUPS[group_id]
