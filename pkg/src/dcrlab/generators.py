"""Block generators, online generators, and exact entropy accounting.

A block generator maps a public parameter z and a seed x to a tuple of
output blocks.  An online generator tosses fresh coins before each block;
block i may read only the coins of blocks 1..i.  Per-block coin spaces are
finite uniform ranges of arbitrary integer size, which lets reference
generators hit non-dyadic conditional laws (e.g. uniform over a preimage
set of size 3) exactly.

Two entropy functionals are computed, always by full enumeration:

* real entropy       H(Y | Z)                    of a block generator,
* accessible entropy sum_i H(Y_i | Z, R_{<i})    of an online generator.

Each is evaluated along two independent routes (conditional-entropy
machinery vs expected sample-entropy) and the routes are asserted to agree
to 1e-9, which checks the textbook identities the accounting rests on.
"""

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from dcrlab.probkit import Dist, JointDist, SupportError, cond_entropy, log2_number

ROUTE_TOL = 1e-9
LAW_ENUM_CAP = 2**20      # largest single coin space enumerated by counting
PREFIX_ENUM_CAP = 2**22   # largest product of coin spaces walked as prefixes


class GeneratorError(ValueError):
    """A generator was queried outside its declared contract."""


class BlockGenerator:
    """A deterministic m-block generator over an enumerable (z, x) space.

    ``param_space`` lists the public-parameter values (sampled uniformly);
    ``seed_bits`` is the seed length s; ``block_bits`` declares the length
    of each output block; ``fn(z, x)`` returns the m-tuple of blocks.
    """

    def __init__(self, name: str, param_space: Sequence, seed_bits: int,
                 block_bits: Sequence[int], fn: Callable):
        self.name = name
        self.param_space = tuple(param_space)
        self.seed_bits = seed_bits
        self.block_bits = tuple(block_bits)
        self.fn = fn
        self._law_cache: dict[int, Dist] = {}

    @property
    def m_blocks(self) -> int:
        return len(self.block_bits)

    @property
    def param_bits(self) -> int:
        return max(1, (len(self.param_space) - 1).bit_length())

    def run(self, z, x: int) -> tuple:
        out = tuple(self.fn(z, x))
        if len(out) != self.m_blocks:
            raise GeneratorError(f"{self.name}: expected {self.m_blocks} blocks, got {len(out)}")
        for y, bits in zip(out, self.block_bits):
            if not 0 <= y < 2**bits:
                raise GeneratorError(f"{self.name}: block value {y} outside {bits} bits")
        return out

    def output_dist(self, z) -> Dist:
        """Exact law of the output tuple for a fixed z (seed uniform)."""
        if z in self._law_cache:
            return self._law_cache[z]
        if 2**self.seed_bits > PREFIX_ENUM_CAP:
            raise GeneratorError("seed space beyond enumeration cap")
        counts: dict[tuple, int] = {}
        for x in range(2**self.seed_bits):
            y = self.run(z, x)
            counts[y] = counts.get(y, 0) + 1
        law = Dist({y: Fraction(c, 2**self.seed_bits) for y, c in counts.items()})
        self._law_cache[z] = law
        return law

    def support(self, z) -> frozenset:
        return frozenset(self.output_dist(z).support())


def real_sample_entropy(g: BlockGenerator, z, y_prefix: Sequence) -> float:
    """sum_j H_{Y_j | Z, Y_<j}(y_j | z, y_<j) for an output prefix.

    Each term is -log2 of the conditional probability of block j given the
    earlier blocks, under the exact law of g(z, uniform seed).
    """
    law = g.output_dist(z)
    prefix = tuple(y_prefix)
    total = 0.0
    prev = Fraction(1)
    for j in range(1, len(prefix) + 1):
        cur = sum(p for y, p in law.items() if y[:j] == prefix[:j])
        if cur == 0:
            raise SupportError(f"prefix {prefix[:j]} not in support for z={z!r}")
        total += -log2_number(cur / prev)
        prev = cur
    return total


def real_entropy(g: BlockGenerator) -> float:
    """H(Y | Z) of the generator, seeds and parameters uniform.

    Computed as a conditional Shannon entropy of the (output, parameter)
    joint law, then re-derived as the expected real sample-entropy over
    (z, y); the two routes must agree to 1e-9.
    """
    k = len(g.param_space)
    joint = JointDist({
        (y, zi): Fraction(1, k) * p
        for zi, z in enumerate(g.param_space)
        for y, p in g.output_dist(z).items()
    })
    via_cond = cond_entropy(joint)

    via_samples = 0.0
    for z in g.param_space:
        for y, p in g.output_dist(z).items():
            via_samples += float(p) / k * real_sample_entropy(g, z, y)
    if abs(via_cond - via_samples) > ROUTE_TOL:
        raise AssertionError(
            f"real-entropy routes disagree: {via_cond} vs {via_samples}")
    return via_cond


def real_min_entropy_check(g: BlockGenerator, block: int, k_bits: float,
                           fail_prob: float) -> tuple[float, bool]:
    """Diagnostic: Pr[(z,y)] that block ``block`` has sample-entropy < k_bits.

    Returns the measured probability and whether it stays at or below the
    supplied failure threshold.
    """
    kparams = len(g.param_space)
    bad = 0.0
    for z in g.param_space:
        law = g.output_dist(z)
        for y, p in law.items():
            h_terms = real_sample_entropy(g, z, y[: block + 1]) - (
                real_sample_entropy(g, z, y[:block]) if block else 0.0)
            if h_terms < k_bits:
                bad += float(p) / kparams
    return bad, bad <= fail_prob


# ------------------------------------------------------------ online generators

class OnlineGenerator:
    """An m-block generator tossing fresh coins per block.

    ``coin_spaces[i]`` is the size of block i's uniform coin range; block i
    sees only coins 1..i.  ``block(z, coins)`` with ``len(coins) == i``
    returns block i.  ``block_law`` gives the exact conditional law of
    block i given (z, earlier coins); the default implementation counts
    over the block's coin range, subclasses with oversized coin spaces
    override it analytically.
    """

    def __init__(self, name: str, param_space: Sequence, coin_spaces: Sequence[int],
                 block_bits: Sequence[int], block_fn: Callable,
                 law_fn: Callable | None = None):
        self.name = name
        self.param_space = tuple(param_space)
        self.coin_spaces = tuple(int(v) for v in coin_spaces)
        self.block_bits = tuple(block_bits)
        self.block_fn = block_fn
        self.law_fn = law_fn
        if any(v < 1 for v in self.coin_spaces):
            raise GeneratorError("coin spaces must be non-empty")
        if len(self.coin_spaces) != len(self.block_bits):
            raise GeneratorError("one coin space per block required")

    @property
    def m_blocks(self) -> int:
        return len(self.block_bits)

    def block(self, z, coins: Sequence[int]):
        i = len(coins) - 1
        if not 0 <= i < self.m_blocks:
            raise GeneratorError("coin prefix length out of range")
        return self.block_fn(z, tuple(coins))

    def block_law(self, z, r_prefix: Sequence[int]) -> Dist:
        i = len(r_prefix)
        if self.law_fn is not None:
            return self.law_fn(z, tuple(r_prefix))
        space = self.coin_spaces[i]
        if space > LAW_ENUM_CAP:
            raise GeneratorError(
                f"{self.name}: coin space {space} not enumerable; analytic law required")
        counts: dict[object, int] = {}
        prefix = tuple(r_prefix)
        for r in range(space):
            y = self.block(z, prefix + (r,))
            counts[y] = counts.get(y, 0) + 1
        return Dist({y: Fraction(c, space) for y, c in counts.items()})

    def coin_prefixes(self, upto: int):
        """All coin tuples for blocks 1..upto (exclusive of block upto+1)."""
        total = 1
        for v in self.coin_spaces[:upto]:
            total *= v
        if total > PREFIX_ENUM_CAP:
            raise GeneratorError(f"{self.name}: prefix space {total} beyond cap")
        return itertools.product(*(range(v) for v in self.coin_spaces[:upto]))


@dataclass(frozen=True)
class Transcript:
    """One execution record: (z, r_1, y_1, ..., r_m, y_m)."""

    z: object
    coins: tuple
    blocks: tuple


def sample_transcript(gt: OnlineGenerator, rand: random.Random) -> Transcript:
    z = gt.param_space[rand.randrange(len(gt.param_space))]
    coins: list[int] = []
    blocks = []
    for i in range(gt.m_blocks):
        coins.append(rand.randrange(gt.coin_spaces[i]))
        blocks.append(gt.block(z, coins))
    return Transcript(z=z, coins=tuple(coins), blocks=tuple(blocks))


def validate_transcript(gt: OnlineGenerator, t: Transcript) -> bool:
    """Every recorded block must be recomputable from z and its coin prefix."""
    if len(t.coins) != gt.m_blocks or len(t.blocks) != gt.m_blocks:
        return False
    return all(
        gt.block(t.z, t.coins[: i + 1]) == t.blocks[i] for i in range(gt.m_blocks)
    )


def accessible_sample_entropy(gt: OnlineGenerator, t: Transcript) -> float:
    """sum_i H_{Y_i | Z, R_<i}(y_i | z, r_<i) for one transcript."""
    if not validate_transcript(gt, t):
        raise GeneratorError("invalid transcript")
    total = 0.0
    for i in range(gt.m_blocks):
        law = gt.block_law(t.z, t.coins[:i])
        p = law.prob(t.blocks[i])
        if p <= 0:
            raise SupportError("transcript block outside its conditional law")
        total += -log2_number(p)
    return total


def accessible_entropy(gt: OnlineGenerator) -> float:
    """sum_i H(Y_i | Z, R_{<i}), parameters and coins uniform.

    Route one conditions through the joint law of (block, context); route
    two takes the transcript expectation of the per-block sample
    entropies.  Agreement to 1e-9 is asserted.
    """
    k = len(gt.param_space)
    via_cond = 0.0
    via_expect = 0.0
    for i in range(gt.m_blocks):
        mass: dict[tuple, Fraction] = {}
        expect_i = 0.0
        prefix_list = list(gt.coin_prefixes(i))
        prefix_count = len(prefix_list)
        for zi, z in enumerate(gt.param_space):
            for prefix in prefix_list:
                law = gt.block_law(z, prefix)
                w = Fraction(1, k * prefix_count)
                for y, p in law.items():
                    key = (y, (zi, prefix))
                    mass[key] = mass.get(key, 0) + w * p
                    expect_i += float(w * p) * -log2_number(p)
        via_cond += cond_entropy(JointDist(mass))
        via_expect += expect_i
    if abs(via_cond - via_expect) > ROUTE_TOL:
        raise AssertionError(
            f"accessible-entropy routes disagree: {via_cond} vs {via_expect}")
    return via_cond


def online_support(gt: OnlineGenerator, z) -> frozenset:
    """All output tuples the online generator can emit for a fixed z."""
    tuples: set[tuple] = set()
    for prefix in gt.coin_prefixes(gt.m_blocks - 1):
        partial = tuple(gt.block(z, prefix[: i + 1]) for i in range(len(prefix)))
        last_law = gt.block_law(z, prefix)
        for y in last_law.support():
            tuples.add(partial + (y,))
    return frozenset(tuples)


def check_consistent(gt: OnlineGenerator, g: BlockGenerator) -> bool:
    """True iff for every z the online generator's output support sits
    inside the block generator's support (so its outputs are always valid
    g-executions)."""
    if gt.param_space != g.param_space or gt.m_blocks != g.m_blocks:
        return False
    return all(online_support(gt, z) <= g.support(z) for z in g.param_space)


# ----------------------------------------------------------------- toy builders

def identity_generator(seed_bits: int) -> BlockGenerator:
    """One block: G(z, x) = x."""
    return BlockGenerator("identity", (0,), seed_bits, (seed_bits,), lambda z, x: (x,))


def constant_generator(seed_bits: int, out_bits: int = 1) -> BlockGenerator:
    return BlockGenerator("constant", (0,), seed_bits, (out_bits,), lambda z, x: (0,))


def xor_generator(bits: int) -> BlockGenerator:
    """One block: G(z, x) = x xor z with matching parameter and seed length."""
    return BlockGenerator("xor-mask", tuple(range(2**bits)), bits, (bits,),
                          lambda z, x: (z ^ x,))


def coin_echo_online(m_blocks: int, coin_bits: int = 1) -> OnlineGenerator:
    """Emits its own fresh coins: y_i = r_i."""
    return OnlineGenerator("coin-echo", (0,), (2**coin_bits,) * m_blocks,
                           (coin_bits,) * m_blocks, lambda z, coins: coins[-1])


def silent_online(m_blocks: int, coin_bits: int = 1) -> OnlineGenerator:
    """Ignores its coins entirely: y_i = 0."""
    return OnlineGenerator("silent", (0,), (2**coin_bits,) * m_blocks,
                           (1,) * m_blocks, lambda z, coins: 0)
