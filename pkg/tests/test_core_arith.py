"""Unit tests for the word-level arithmetic primitives.

The heavyweight exhaustive/statistical sweeps live in test_acceptance.py;
here we pin the documented examples, boundary cases, and rejection of
malformed inputs, plus moderately sized random cross-checks.
"""

import random

import pytest

from kdntt.core_arith import (
    DILITHIUM,
    DILITHIUM_SINGLE,
    GUARD_SEL,
    KYBER,
    KYBER_PAIR,
    SCHEMES,
    from_mont,
    mod_add,
    mod_add_half,
    mod_sub,
    mont_mul,
    mont_redc,
    pack_lanes,
    shared_add_sub,
    to_mont,
    unpack_lanes,
)

RNG = random.Random(20260819)


def test_scheme_constants():
    assert KYBER.q == 3329 and KYBER.root == 17 and KYBER.layers == 7
    assert DILITHIUM.q == 8380417 and DILITHIUM.root == 1753
    assert DILITHIUM.q == 2**23 - 2**13 + 1
    assert DILITHIUM.layers == 8
    assert KYBER.r == 4096 and DILITHIUM.r == 2**23
    # q' satisfies q*q' == -1 (mod R) by construction; spot the known values.
    assert KYBER.q_prime == 3327
    assert DILITHIUM.q_prime == 8380415
    assert KYBER.min_len == 2 and DILITHIUM.min_len == 1


def test_root_orders():
    # Kyber's 17 is a 256th root (17^128 == -1); Dilithium's 1753 a 512th.
    assert pow(17, 128, 3329) == 3328
    assert pow(1753, 256, 8380417) == 8380416


def test_mont_identities():
    for p in SCHEMES.values():
        assert mont_mul(0, p.q - 1, p) == 0
        assert to_mont(1, p) == p.r_mod_q
        assert from_mont(to_mont(123, p), p) == 123
    # R * R * R^-1 == R: the element R mod q is a fixed point of squaring.
    assert KYBER.r_mod_q == 767
    assert mont_mul(767, 767, KYBER) == 767


def test_mont_mul_random_vs_wide_int():
    for p in SCHEMES.values():
        rinv = pow(p.r, -1, p.q)
        for _ in range(20_000):
            a = RNG.randrange(p.q)
            b = RNG.randrange(p.q)
            assert mont_mul(a, b, p) == a * b * rinv % p.q
            assert mont_mul(a, to_mont(b, p), p) == a * b % p.q


def test_mont_redc_full_range_edges():
    for p in SCHEMES.values():
        rinv = pow(p.r, -1, p.q)
        for t in (0, 1, p.q - 1, p.q, p.r - 1, p.r, p.r * p.q - 1):
            assert mont_redc(t, p) == t * rinv % p.q


def test_mod_add_examples():
    assert mod_add(0, 0, 3329) == 0
    # 2000+1400 = 3400: top bit of the 12-bit sum is NOT set even though
    # the sum exceeds q, so a plain bit-12 test would miss the reduction.
    assert mod_add(2000, 1400, 3329) == 71
    assert mod_add(3328, 3328, 3329) == 3327


def test_mod_sub_examples():
    assert mod_sub(5, 5, 3329) == 0
    assert mod_sub(1, 2, 3329) == 3328
    assert mod_sub(1, 2, 8380417) == 8380416


def test_mod_add_half_examples():
    assert mod_add_half(0, 0, 3329) == 0
    assert mod_add_half(3, 4, 3329) == 1668      # (7+3329)/2
    assert mod_add_half(2000, 2000, 3329) == 2000  # even sum, direct shift
    # The tie sum == q is odd (q odd) and must land on 0.
    assert mod_add_half(1, 3328, 3329) == 0
    assert mod_add_half(1664, 1665, 3329) == 0


def test_mod_ops_random_all_schemes():
    for p in SCHEMES.values():
        q = p.q
        inv2 = p.inv2
        for _ in range(20_000):
            a = RNG.randrange(q)
            b = RNG.randrange(q)
            assert mod_add(a, b, q) == (a + b) % q
            assert mod_sub(a, b, q) == (a - b) % q
            assert mod_add_half(a, b, q) == (a + b) * inv2 % q


def test_dilithium_add_sub_bulk():
    # The module contract asks for >= 1e7 random Dilithium pairs.
    q = DILITHIUM.q
    rng = random.Random(0xD1)
    bits = rng.getrandbits
    checked = 0
    for _ in range(10_000_000):
        a = bits(23) % q
        b = bits(23) % q
        if mod_add(a, b, q) != (a + b) % q:
            raise AssertionError(f"add broken at ({a}, {b})")
        if mod_sub(a, b, q) != (a - b) % q:
            raise AssertionError(f"sub broken at ({a}, {b})")
        checked += 1
    assert checked == 10_000_000


def test_pack_unpack_lanes():
    assert pack_lanes(0, 0) == 0
    assert pack_lanes(0xFFF, 0) == 0xFFF
    assert pack_lanes(0, 1) == 1 << 12
    assert unpack_lanes(pack_lanes(123, 456)) == (123, 456)
    with pytest.raises(AssertionError):
        pack_lanes(4096, 0)
    with pytest.raises(AssertionError):
        pack_lanes(0, -1)


def test_guard_sel_covers_all_cases():
    assert set(GUARD_SEL) == {
        ("add", KYBER_PAIR), ("sub", KYBER_PAIR),
        ("add", DILITHIUM_SINGLE), ("sub", DILITHIUM_SINGLE),
    }
    # Kyber sub and Dilithium add share the inserted-1 pattern; the other
    # two share the inserted-0 pattern.
    assert GUARD_SEL[("sub", KYBER_PAIR)] == GUARD_SEL[("add", DILITHIUM_SINGLE)]
    assert GUARD_SEL[("add", KYBER_PAIR)] == GUARD_SEL[("sub", DILITHIUM_SINGLE)]


def test_shared_add_sub_documented_lanes():
    x = pack_lanes(3328, 5)
    y = pack_lanes(1, 10)
    out = shared_add_sub(x, y, KYBER_PAIR, "add", KYBER)
    # lane 0 wraps to 0; its carry must not leak into lane 1's 15
    assert unpack_lanes(out) == (0, 15)
    assert shared_add_sub(pack_lanes(0, 0), pack_lanes(0, 0),
                          KYBER_PAIR, "add", KYBER) == 0
    assert shared_add_sub(1, 2, DILITHIUM_SINGLE, "sub", DILITHIUM) == 8380416


def test_shared_add_sub_random_lanes():
    q = KYBER.q
    for _ in range(20_000):
        x0, x1, y0, y1 = (RNG.randrange(q) for _ in range(4))
        for op, ref in (("add", mod_add), ("sub", mod_sub)):
            out = shared_add_sub(pack_lanes(x0, x1), pack_lanes(y0, y1),
                                 KYBER_PAIR, op, KYBER)
            assert unpack_lanes(out) == (ref(x0, y0, q), ref(x1, y1, q))
    q = DILITHIUM.q
    for _ in range(20_000):
        x = RNG.randrange(q)
        y = RNG.randrange(q)
        assert shared_add_sub(x, y, DILITHIUM_SINGLE, "add", DILITHIUM) == \
            mod_add(x, y, q)
        assert shared_add_sub(x, y, DILITHIUM_SINGLE, "sub", DILITHIUM) == \
            mod_sub(x, y, q)


def test_shared_add_sub_boundary_lanes():
    """All combinations of extreme lane values, both ops."""
    edge = (0, 1, KYBER.q - 1)
    for x0 in edge:
        for x1 in edge:
            for y0 in edge:
                for y1 in edge:
                    for op, ref in (("add", mod_add), ("sub", mod_sub)):
                        out = shared_add_sub(
                            pack_lanes(x0, x1), pack_lanes(y0, y1),
                            KYBER_PAIR, op, KYBER)
                        assert unpack_lanes(out) == (
                            ref(x0, y0, KYBER.q), ref(x1, y1, KYBER.q))
    edge = (0, 1, 0xFFF, 0x1000, DILITHIUM.q - 1)
    for x in edge:
        for y in edge:
            assert shared_add_sub(x, y, DILITHIUM_SINGLE, "add", DILITHIUM) \
                == mod_add(x, y, DILITHIUM.q)
            assert shared_add_sub(x, y, DILITHIUM_SINGLE, "sub", DILITHIUM) \
                == mod_sub(x, y, DILITHIUM.q)


def test_shared_add_sub_rejects_malformed():
    with pytest.raises(AssertionError):
        shared_add_sub(pack_lanes(3329, 0), pack_lanes(0, 0),
                       KYBER_PAIR, "add", KYBER)  # lane >= q
    with pytest.raises(AssertionError):
        shared_add_sub(DILITHIUM.q, 0, DILITHIUM_SINGLE, "add", DILITHIUM)
    with pytest.raises(AssertionError):
        shared_add_sub(0, 0, KYBER_PAIR, "add", DILITHIUM)  # scheme mismatch
    with pytest.raises(AssertionError):
        shared_add_sub(0, 0, DILITHIUM_SINGLE, "xor", DILITHIUM)


def test_out_of_range_inputs_rejected():
    with pytest.raises(AssertionError):
        mod_add(3329, 0, 3329)
    with pytest.raises(AssertionError):
        mod_sub(0, -1, 3329)
    with pytest.raises(AssertionError):
        mont_mul(KYBER.q, 1, KYBER)
    with pytest.raises(AssertionError):
        mont_redc(KYBER.r * KYBER.q, KYBER)
