"""Entropy accounting for block and online generators."""

import random
from fractions import Fraction

import pytest

from dcrlab.generators import (
    BlockGenerator,
    GeneratorError,
    OnlineGenerator,
    Transcript,
    accessible_entropy,
    accessible_sample_entropy,
    check_consistent,
    coin_echo_online,
    constant_generator,
    identity_generator,
    online_support,
    real_entropy,
    real_min_entropy_check,
    real_sample_entropy,
    sample_transcript,
    silent_online,
    validate_transcript,
    xor_generator,
)

PARITY = (0, 1, 1, 0)  # truth table of 2-bit parity


def parity_two_block() -> BlockGenerator:
    """G(z, x) = (parity(x), x) with a single trivial parameter."""
    return BlockGenerator("parity-2block", (0,), 2, (1, 2),
                          lambda z, x: (PARITY[x], x))


def honest_wrap_parity() -> OnlineGenerator:
    """Draws x with the first block's coins, emits parity(x) then x."""
    return OnlineGenerator(
        "honest-parity", (0,), (4, 1), (1, 2),
        lambda z, coins: PARITY[coins[0]] if len(coins) == 1 else coins[0])


# ------------------------------------------------------------------ real entropy

def test_real_sample_entropy_identity():
    g = identity_generator(3)
    for x in range(8):
        assert real_sample_entropy(g, 0, ((x,))) == pytest.approx(3, abs=1e-12)


def test_real_sample_entropy_constant():
    g = constant_generator(3)
    assert real_sample_entropy(g, 0, (0,)) == 0.0


def test_real_sample_entropy_parity_prefix():
    g = parity_two_block()
    # First block carries 1 bit; the seed given parity 0 carries 1 more.
    assert real_sample_entropy(g, 0, (0,)) == pytest.approx(1, abs=1e-12)
    assert real_sample_entropy(g, 0, (0, 0)) == pytest.approx(2, abs=1e-12)


def test_real_entropy_toy_generators():
    assert real_entropy(identity_generator(4)) == pytest.approx(4, abs=1e-12)
    assert real_entropy(constant_generator(4)) == pytest.approx(0, abs=1e-12)
    assert real_entropy(xor_generator(3)) == pytest.approx(3, abs=1e-12)
    assert real_entropy(parity_two_block()) == pytest.approx(2, abs=1e-12)


def test_real_min_entropy_diagnostic():
    g = parity_two_block()
    # Block 0 always has sample-entropy exactly 1.
    prob, ok = real_min_entropy_check(g, block=0, k_bits=0.5, fail_prob=0.0)
    assert prob == 0.0 and ok
    prob, ok = real_min_entropy_check(g, block=0, k_bits=1.5, fail_prob=0.0)
    assert prob == 1.0 and not ok


# ------------------------------------------------------------------- transcripts

def test_sample_and_validate_transcript():
    gt = honest_wrap_parity()
    rand = random.Random(42)
    for _ in range(50):
        t = sample_transcript(gt, rand)
        assert validate_transcript(gt, t)
        assert t.blocks[0] == PARITY[t.blocks[1]]


def test_validate_rejects_tampered_transcript():
    gt = honest_wrap_parity()
    t = sample_transcript(gt, random.Random(1))
    bad = Transcript(z=t.z, coins=t.coins, blocks=(1 - t.blocks[0], t.blocks[1]))
    assert not validate_transcript(gt, bad)


# ------------------------------------------------------------ accessible entropy

def test_accessible_sample_entropy_deterministic_generator():
    gt = silent_online(3)
    rand = random.Random(0)
    for _ in range(10):
        t = sample_transcript(gt, rand)
        assert accessible_sample_entropy(gt, t) == 0.0


def test_accessible_sample_entropy_coin_echo():
    gt = coin_echo_online(4, coin_bits=1)
    t = sample_transcript(gt, random.Random(2))
    assert accessible_sample_entropy(gt, t) == pytest.approx(4, abs=1e-12)


def test_accessible_entropy_three_generators():
    assert accessible_entropy(silent_online(3)) == pytest.approx(0, abs=1e-12)
    assert accessible_entropy(coin_echo_online(3)) == pytest.approx(3, abs=1e-12)
    assert accessible_entropy(honest_wrap_parity()) == pytest.approx(1, abs=1e-12)


def test_accessible_sample_entropy_honest_parity_split():
    gt = honest_wrap_parity()
    t = Transcript(z=0, coins=(0, 0), blocks=(PARITY[0], 0))
    # Block 1 carries H(parity) = 1 bit; block 2 is then determined.
    assert accessible_sample_entropy(gt, t) == pytest.approx(1, abs=1e-12)
    law2 = gt.block_law(0, (0,))
    assert law2.prob(0) == Fraction(1)


# ------------------------------------------------------------------- consistency

def test_honest_wrap_is_consistent():
    assert check_consistent(honest_wrap_parity(), parity_two_block())


def test_wrong_length_block_inconsistent():
    gt = OnlineGenerator("cheat-length", (0,), (4, 1), (1, 2),
                         lambda z, coins: PARITY[coins[0]] if len(coins) == 1 else coins[0] + 4)
    g = parity_two_block()
    assert not check_consistent(gt, g)


def test_mismatched_pair_found_by_enumeration():
    # Emits (y, x) with parity(x) != y on exactly one coin value.
    def block(z, coins):
        if len(coins) == 1:
            return PARITY[coins[0]]
        return coins[0] ^ 1 if coins[0] == 0 else coins[0]

    gt = OnlineGenerator("mismatch", (0,), (4, 1), (1, 2), block)
    g = parity_two_block()
    assert not check_consistent(gt, g)
    bad = [t for t in online_support(gt, 0) if t not in g.support(0)]
    assert bad == [(0, 1)]


def test_accessible_at_most_real_for_consistent_suite():
    g = parity_two_block()
    suite = [honest_wrap_parity(), silent_wrap_parity()]
    for gt in suite:
        assert check_consistent(gt, g)
        assert accessible_entropy(gt) <= real_entropy(g) + 1e-9


def silent_wrap_parity() -> OnlineGenerator:
    """Always outputs the (parity(0), 0) execution; consistent, zero access."""
    return OnlineGenerator("silent-parity", (0,), (1, 1), (1, 2),
                           lambda z, coins: PARITY[0] if len(coins) == 1 else 0)


# ----------------------------------------------------------------------- errors

def test_out_of_range_block_raises():
    g = BlockGenerator("bad", (0,), 1, (1,), lambda z, x: (2,))
    with pytest.raises(GeneratorError):
        g.run(0, 0)


def test_law_requires_enumerable_coin_space():
    gt = OnlineGenerator("huge", (0,), (2**40,), (1,), lambda z, coins: 0)
    with pytest.raises(GeneratorError):
        gt.block_law(0, ())
