import secrets

import pytest
from hypothesis import given, settings, strategies as st

from zkfl.crypto import commit, get_group, open_check, ristretto
from zkfl.errors import EncodingError

P_TEST, Q_TEST = 23, 11


def oracle_commit(m, r):
    """Independent modular-exponentiation oracle over the p=23 test group."""
    return pow(2, m, P_TEST) * pow(3, r, P_TEST) % P_TEST


def test_test_group_parameters(tg):
    assert tg.order == Q_TEST
    assert pow(2, 11, 23) == 1 and pow(3, 11, 23) == 1
    assert tg.g.rep == 2 and tg.h.rep == 3


@pytest.mark.parametrize("m,r,expected", [(2, 3, 16), (0, 0, 1), (1, 1, 6), (3, 4, 4)])
def test_commit_test_vectors(tg, m, r, expected):
    assert oracle_commit(m, r) == expected
    assert commit(tg, m, r).rep == expected


def test_commit_homomorphic_vector(tg):
    assert (commit(tg, 1, 1) * commit(tg, 2, 3)).rep == 4 == oracle_commit(3, 4)


def test_commit_identity(group):
    assert commit(group, 0, 0) == group.identity


@pytest.mark.parametrize("m,r,ok", [(2, 3, True), (2, 4, False)])
def test_open_check_vectors(tg, m, r, ok):
    cm = tg.element_from_bytes(bytes([16]))
    assert open_check(tg, m, r, cm) is ok


def test_open_check_identity(group):
    assert open_check(group, 0, 0, group.identity)


def test_exhaustive_commit_matches_oracle(tg):
    for m in range(11):
        for r in range(11):
            assert commit(tg, m, r).rep == oracle_commit(m, r)


def test_binding_exhaustive(tg):
    # dlog of h base g, found by brute force; only someone using it finds collisions
    x = next(k for k in range(11) if pow(2, k, 23) == 3)
    table = {}
    for m in range(11):
        for r in range(11):
            table.setdefault(commit(tg, m, r).rep, []).append((m, r))
    for r in range(11):
        assert len({commit(tg, m, r).rep for m in range(11)}) == 11
    for pairs in table.values():
        for m, r in pairs:
            for m2, r2 in pairs:
                if (m, r) != (m2, r2):
                    assert m != m2 and r != r2
                    assert (m2 - m) % 11 == (x * (r - r2)) % 11


def test_hiding_exhaustive(tg):
    subgroup = {pow(2, k, 23) for k in range(11)}
    for m in range(11):
        outs = [commit(tg, m, r).rep for r in range(11)]
        assert sorted(outs) == sorted(subgroup)


def test_test_group_decode_rejects_non_members(tg):
    with pytest.raises(EncodingError):
        tg.element_from_bytes(bytes([5]))  # 5 generates the full group of order 22
    with pytest.raises(EncodingError):
        tg.element_from_bytes(bytes([0]))


# RFC 9496 encodings of small multiples of the ristretto255 generator
RISTRETTO_MULTIPLES = [
    "0000000000000000000000000000000000000000000000000000000000000000",
    "e2f2ae0a6abc4e71a884a961c500515f58e30b6aa582dd8db6a65945e08d2d76",
    "6a493210f7499cd17fecb510ae0cea23a110e8d5b901f8acadd3095c73a3b919",
    "94741f5d5d52755ece4f23f044ee27d5d1ea1e2bd196b462166b16152a9d0259",
]


@pytest.mark.parametrize("k", range(len(RISTRETTO_MULTIPLES)))
def test_ristretto_generator_multiples(pg, k):
    assert (pg.g ** k).to_bytes().hex() == RISTRETTO_MULTIPLES[k]


def test_ristretto_matches_libsodium_edwards():
    nacl = pytest.importorskip("nacl.bindings")
    for _ in range(25):
        k = secrets.randbelow(ristretto.ORDER - 1) + 1
        ours = ristretto.to_ed25519_bytes(ristretto.scalar_mult(ristretto.BASEPOINT, k))
        assert ours == nacl.crypto_scalarmult_ed25519_base_noclamp(k.to_bytes(32, "little"))


def test_ristretto_rejects_noncanonical(pg):
    p = 2**255 - 19
    with pytest.raises(EncodingError):
        pg.element_from_bytes(p.to_bytes(32, "little"))
    with pytest.raises(EncodingError):
        pg.element_from_bytes((1).to_bytes(32, "little"))  # odd s is "negative"
    with pytest.raises(EncodingError):
        pg.element_from_bytes(b"\x00" * 31)


def test_fixed_base_and_msm_agree_with_naive(pg):
    pts = [pg.g ** secrets.randbelow(pg.order) for _ in range(9)]
    ks = [secrets.randbelow(pg.order) for _ in range(9)]
    naive = pg.identity
    for p_, k in zip(pts, ks):
        naive = naive * p_ ** k
    assert pg.multi_exp(pts, ks) == naive
    k = secrets.randbelow(pg.order)
    assert pg.commit(k, 0) == pg.identity * pg.g ** k
    assert pg.h ** k == pg.identity * pg.h ** k


def test_h_is_hashed_not_a_known_multiple(pg):
    assert pg.h != pg.g and not pg.h.is_identity()
    assert pg.h ** pg.order == pg.identity
    for k in range(1, 64):
        assert pg.g ** k != pg.h


def test_element_serialization_roundtrip(group):
    for k in range(group.order if group.order < 100 else 50):
        e = group.g ** (k * 7919 + 1)
        back = group.element_from_bytes(e.to_bytes())
        assert back == e and back.to_bytes() == e.to_bytes()


scalars = st.integers(min_value=0, max_value=ristretto.ORDER - 1)


@settings(max_examples=1_000, deadline=None)
@given(scalars, scalars, scalars, scalars)
def test_homomorphism_prod(m1, r1, m2, r2):
    pg = get_group("prod")
    q = pg.order
    assert commit(pg, m1, r1) * commit(pg, m2, r2) == commit(pg, (m1 + m2) % q, (r1 + r2) % q)


def test_homomorphism_test_group_exhaustive(tg):
    for m1 in range(11):
        for r1 in range(11):
            for m2 in range(0, 11, 3):
                for r2 in range(0, 11, 4):
                    lhs = commit(tg, m1, r1) * commit(tg, m2, r2)
                    assert lhs == commit(tg, (m1 + m2) % 11, (r1 + r2) % 11)
