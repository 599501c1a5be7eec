"""Ristretto255 prime-order group over edwards25519.

Points are kept internally in extended twisted Edwards coordinates
(X:Y:Z:T) with x = X/Z, y = Y/Z, x*y = T/Z, using gmpy2 integers. Encoding,
decoding, equality and the one-way map follow the ristretto255 construction
(RFC 9496). Nothing here is constant-time.
"""

from __future__ import annotations

from gmpy2 import invert, mpz, powmod

P = mpz(2**255 - 19)
ORDER = 2**252 + 27742317777372353535851937790883648493
D = mpz(-121665) * invert(mpz(121666), P) % P
D2 = 2 * D % P

_ZERO = mpz(0)
_ONE = mpz(1)


def _is_negative(x) -> bool:
    return bool(x & 1)


def _abs(x):
    return (P - x) % P if x & 1 else x


def _sqrt_ratio_m1(u, v):
    """Return (was_square, r) with r = +sqrt(u/v), or +sqrt(i*u/v) if u/v is not square."""
    v3 = v * v % P * v % P
    v7 = v3 * v3 % P * v % P
    r = u * v3 % P * powmod(u * v7 % P, (P - 5) // 8, P) % P
    check = v * r % P * r % P
    neg_u = (-u) % P
    correct = check == u % P
    flipped = check == neg_u
    flipped_i = check == neg_u * SQRT_M1 % P
    if flipped or flipped_i:
        r = r * SQRT_M1 % P
    return correct or flipped, _abs(r)


# sqrt(-1); the root with even low bit is the canonical one.
SQRT_M1 = powmod(mpz(2), (P - 1) // 4, P)
SQRT_M1 = _abs(SQRT_M1)
# The map uses the odd root of a*d - 1.
SQRT_AD_MINUS_ONE = P - _sqrt_ratio_m1((-D - 1) % P, _ONE)[1]
INVSQRT_A_MINUS_D = _sqrt_ratio_m1(_ONE, (-1 - D) % P)[1]
ONE_MINUS_D_SQ = (1 - D * D) % P
D_MINUS_ONE_SQ = (D - 1) * (D - 1) % P

IDENTITY = (_ZERO, _ONE, _ONE, _ZERO)

_BASE_Y = mpz(4) * invert(mpz(5), P) % P


def _recover_x(y):
    # x^2 = (y^2 - 1) / (d y^2 + 1); pick the even root.
    yy = y * y % P
    ok, x = _sqrt_ratio_m1((yy - 1) % P, (D * yy + 1) % P)
    assert ok
    return x


_BASE_X = _recover_x(_BASE_Y)
BASEPOINT = (_BASE_X, _BASE_Y, _ONE, _BASE_X * _BASE_Y % P)


def add(p1, p2):
    X1, Y1, Z1, T1 = p1
    X2, Y2, Z2, T2 = p2
    a = (Y1 - X1) * (Y2 - X2) % P
    b = (Y1 + X1) * (Y2 + X2) % P
    c = T1 * D2 % P * T2 % P
    d = 2 * Z1 * Z2 % P
    e = b - a
    f = d - c
    g = d + c
    h = b + a
    return (e * f % P, g * h % P, f * g % P, e * h % P)


def double(p1):
    X1, Y1, Z1, _ = p1
    a = X1 * X1 % P
    b = Y1 * Y1 % P
    c = 2 * Z1 * Z1 % P
    e = ((X1 + Y1) * (X1 + Y1) - a - b) % P
    g = b - a
    f = g - c
    h = -a - b
    return (e * f % P, g * h % P, f * g % P, e * h % P)


def madd(p1, niels):
    """Add an affine point given as (y+x, y-x, 2*d*x*y)."""
    X1, Y1, Z1, T1 = p1
    yplusx, yminusx, xy2d = niels
    a = (Y1 - X1) * yminusx % P
    b = (Y1 + X1) * yplusx % P
    c = T1 * xy2d % P
    d = 2 * Z1
    e = b - a
    f = d - c
    g = d + c
    h = b + a
    return (e * f % P, g * h % P, f * g % P, e * h % P)


def neg(p1):
    X1, Y1, Z1, T1 = p1
    return ((-X1) % P, Y1, Z1, (-T1) % P)


def equal(p1, p2) -> bool:
    X1, Y1, _, _ = p1
    X2, Y2, _, _ = p2
    return X1 * Y2 % P == Y1 * X2 % P or Y1 * Y2 % P == X1 * X2 % P


def scalar_mult(pt, k: int):
    """Variable-base multiplication with a 4-bit fixed window."""
    k %= ORDER
    if k == 0:
        return IDENTITY
    if k > ORDER // 2:
        return neg(scalar_mult(pt, ORDER - k))
    table = [IDENTITY, pt]
    for _ in range(14):
        table.append(add(table[-1], pt))
    acc = IDENTITY
    nibbles = (k.bit_length() + 3) // 4
    for i in range(nibbles - 1, -1, -1):
        acc = double(double(double(double(acc))))
        digit = (k >> (4 * i)) & 15
        if digit:
            acc = add(acc, table[digit])
    return acc


def to_niels_batch(points):
    """Normalize points to affine (y+x, y-x, 2dxy) with one shared inversion."""
    zs = [pt[2] for pt in points]
    prefix = []
    acc = _ONE
    for z in zs:
        prefix.append(acc)
        acc = acc * z % P
    inv = invert(acc, P)
    out = [None] * len(points)
    for i in range(len(points) - 1, -1, -1):
        zinv = inv * prefix[i] % P
        inv = inv * zs[i] % P
        X, Y, _, _ = points[i]
        x = X * zinv % P
        y = Y * zinv % P
        out[i] = ((y + x) % P, (y - x) % P, D2 * x % P * y % P)
    return out


class FixedBaseTable:
    """Comb table of digit * 2^(window*i) * base for unsigned window digits."""

    def __init__(self, base, window: int = 8):
        self.window = window
        windows = (ORDER.bit_length() + window - 1) // window
        width = 2**window - 1
        rows = []
        cur = base
        for _ in range(windows):
            row = [cur]
            for _ in range(width - 1):
                row.append(add(row[-1], cur))
            rows.append(row)
            nxt = cur
            for _ in range(window):
                nxt = double(nxt)
            cur = nxt
        flat = to_niels_batch([pt for row in rows for pt in row])
        self.rows = [flat[i * width:(i + 1) * width] for i in range(windows)]

    def mult(self, k: int):
        k %= ORDER
        if k > ORDER // 2:
            return neg(self._mult(ORDER - k))
        return self._mult(k)

    def _mult(self, k: int):
        acc = IDENTITY
        i = 0
        rows = self.rows
        w = self.window
        mask = (1 << w) - 1
        while k:
            digit = k & mask
            if digit:
                acc = madd(acc, rows[i][digit - 1])
            k >>= w
            i += 1
        return acc


def multi_scalar_mult(points, scalars):
    """Pippenger bucket method for sum_j scalars[j] * points[j]."""
    n = len(points)
    if n == 0:
        return IDENTITY
    if n < 4:
        acc = IDENTITY
        for pt, k in zip(points, scalars):
            acc = add(acc, scalar_mult(pt, k))
        return acc
    scalars = [k % ORDER for k in scalars]
    bits = max(max(k.bit_length() for k in scalars), 1)
    # per window: one add per point plus about 2^(c+1) for the bucket sums
    c = min(range(2, 17), key=lambda c: -(-bits // c) * (n + (2 << c)))
    windows = (bits + c - 1) // c
    mask = (1 << c) - 1
    acc = IDENTITY
    for w in range(windows - 1, -1, -1):
        for _ in range(c):
            acc = double(acc)
        buckets = [None] * (1 << c)
        shift = w * c
        for pt, k in zip(points, scalars):
            digit = (k >> shift) & mask
            if digit:
                b = buckets[digit]
                buckets[digit] = pt if b is None else add(b, pt)
        running = IDENTITY
        total = IDENTITY
        for digit in range(mask, 0, -1):
            b = buckets[digit]
            if b is not None:
                running = add(running, b)
            total = add(total, running)
        acc = add(acc, total)
    return acc


def encode(pt) -> bytes:
    X0, Y0, Z0, T0 = pt
    u1 = (Z0 + Y0) * (Z0 - Y0) % P
    u2 = X0 * Y0 % P
    _, invsqrt = _sqrt_ratio_m1(_ONE, u1 * u2 % P * u2 % P)
    den1 = invsqrt * u1 % P
    den2 = invsqrt * u2 % P
    z_inv = den1 * den2 % P * T0 % P
    if _is_negative(T0 * z_inv % P):
        x = Y0 * SQRT_M1 % P
        y = X0 * SQRT_M1 % P
        den_inv = den1 * INVSQRT_A_MINUS_D % P
    else:
        x, y, den_inv = X0, Y0, den2
    if _is_negative(x * z_inv % P):
        y = (-y) % P
    s = _abs(den_inv * (Z0 - y) % P)
    return int(s).to_bytes(32, "little")


def decode(data: bytes):
    """Decode a canonical 32-byte encoding; raises ValueError if invalid."""
    if len(data) != 32:
        raise ValueError("ristretto255 encoding must be 32 bytes")
    s = mpz(int.from_bytes(data, "little"))
    if s >= P or _is_negative(s):
        raise ValueError("non-canonical ristretto255 encoding")
    ss = s * s % P
    u1 = (1 - ss) % P
    u2 = (1 + ss) % P
    u2_sqr = u2 * u2 % P
    v = (-(D * u1 % P * u1) - u2_sqr) % P
    was_square, invsqrt = _sqrt_ratio_m1(_ONE, v * u2_sqr % P)
    den_x = invsqrt * u2 % P
    den_y = invsqrt * den_x % P * v % P
    x = _abs(2 * s * den_x % P)
    y = u1 * den_y % P
    t = x * y % P
    if not was_square or _is_negative(t) or y == 0:
        raise ValueError("invalid ristretto255 encoding")
    return (x, y, _ONE, t)


def _map(t):
    r = SQRT_M1 * t % P * t % P
    u = (r + 1) * ONE_MINUS_D_SQ % P
    v = (-1 - r * D) * (r + D) % P
    was_square, s = _sqrt_ratio_m1(u, v)
    s_prime = (-_abs(s * t % P)) % P
    if was_square:
        c = P - 1
    else:
        s = s_prime
        c = r
    n = (c * (r - 1) % P * D_MINUS_ONE_SQ - v) % P
    w0 = 2 * s * v % P
    w1 = n * SQRT_AD_MINUS_ONE % P
    ss = s * s % P
    w2 = (1 - ss) % P
    w3 = (1 + ss) % P
    return (w0 * w3 % P, w2 * w1 % P, w1 * w3 % P, w0 * w2 % P)


def from_uniform_bytes(data: bytes):
    """One-way map from 64 uniform bytes to the group."""
    if len(data) != 64:
        raise ValueError("expected 64 bytes")
    mask = (1 << 255) - 1
    t1 = mpz(int.from_bytes(data[:32], "little") & mask) % P
    t2 = mpz(int.from_bytes(data[32:], "little") & mask) % P
    return add(_map(t1), _map(t2))


def to_ed25519_bytes(pt) -> bytes:
    """Standard compressed edwards25519 encoding of the internal representative."""
    X, Y, Z, _ = pt
    zinv = invert(Z, P)
    x = X * zinv % P
    y = Y * zinv % P
    return int(y | ((x & 1) << 255)).to_bytes(32, "little")
