"""Enumerable hash-function families and the random-collision game.

Inputs and outputs are bit strings represented as ints: an n-bit input is
an integer in [0, 2^n).  Every function is stored as a full truth table so
preimage sets, the ideal collision finder Col, and adversary output
distributions are all exact objects.

Col(h) samples x1 uniformly, then x2 uniformly from the preimage set
h^-1(h(x1)) (x1 = x2 is allowed).  The game value against an adversary A
is E_h  TV(A(h), Col(h)), computed as an exact average over the family's
enumerated key space.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from dcrlab.probkit import Dist, JointDist, mixture, stat_distance

ENUM_CAP_DEFAULT = 14   # largest n enumerated without protest
ENUM_CAP_HARD = 20      # absolute ceiling on 2^n enumeration
TAPE_CAP_BITS = 24      # largest adversary tape space enumerated exactly


class EnumerationCap(RuntimeError):
    """An exact enumeration was requested beyond the configured cap."""


def _check_cap(n: int, cap: int = ENUM_CAP_DEFAULT) -> None:
    if n > min(cap, ENUM_CAP_HARD):
        raise EnumerationCap(f"n={n} exceeds enumeration cap {min(cap, ENUM_CAP_HARD)}")


@dataclass(frozen=True)
class HashFunction:
    """A total function {0,1}^n -> {0,1}^m given by its truth table."""

    n: int
    m: int
    table: tuple[int, ...]
    key: object = None

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be >= 1")
        _check_cap(self.n, ENUM_CAP_HARD)
        if len(self.table) != 2**self.n:
            raise ValueError("truth table has wrong length")
        if any(not 0 <= y < 2**self.m for y in self.table):
            raise ValueError("table entry outside output range")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def to_csv(self) -> str:
        """Hex rows 'input_index,output_index', one per input."""
        return "\n".join(f"{x:x},{y:x}" for x, y in enumerate(self.table)) + "\n"

    @classmethod
    def from_csv(cls, text: str, n: int, m: int, key=None) -> "HashFunction":
        rows = [line.split(",") for line in text.strip().splitlines()]
        table = [0] * 2**n
        for xs, ys in rows:
            table[int(xs, 16)] = int(ys, 16)
        return cls(n=n, m=m, table=tuple(table), key=key)


class HashFamily:
    """A finite, explicitly enumerated key space of hash functions.

    Families built from a seed sample their key list once at construction;
    the declared key space is that list and all game expectations average
    over it uniformly.
    """

    def __init__(self, name: str, functions: Sequence[HashFunction]):
        if not functions:
            raise ValueError("family needs at least one function")
        n, m = functions[0].n, functions[0].m
        if any(h.n != n or h.m != m for h in functions):
            raise ValueError("mixed parameters inside one family")
        self.name = name
        self.n = n
        self.m = m
        self.functions = tuple(functions)

    @property
    def key_bits(self) -> int:
        """Description length of a key in bits (index into the key list)."""
        return max(1, (len(self.functions) - 1).bit_length())

    def sample(self, rng: np.random.Generator) -> HashFunction:
        return self.functions[int(rng.integers(len(self.functions)))]

    def __iter__(self):
        return iter(self.functions)

    def __len__(self):
        return len(self.functions)

    def __repr__(self):
        return f"HashFamily({self.name!r}, n={self.n}, m={self.m}, keys={len(self.functions)})"


# ------------------------------------------------------------- built-in families

def identity_family(n: int) -> HashFamily:
    _check_cap(n)
    h = HashFunction(n=n, m=n, table=tuple(range(2**n)), key="id")
    return HashFamily(f"identity[n={n}]", [h])


def constant_family(n: int, m: int, num_keys: int = 4, seed: int = 0) -> HashFamily:
    _check_cap(n)
    rng = np.random.default_rng(seed)
    count = min(num_keys, 2**m)
    values = rng.choice(2**m, size=count, replace=False)
    fns = [HashFunction(n=n, m=m, table=(int(v),) * 2**n, key=int(v)) for v in values]
    return HashFamily(f"constant[n={n},m={m}]", fns)


def affine_family(n: int, m: int, num_keys: int = 4, seed: int = 0) -> HashFamily:
    """x -> Ax + b over GF(2), with (A, b) sampled per key."""
    _check_cap(n)
    rng = np.random.default_rng(seed)
    xs = np.arange(2**n, dtype=np.uint64)
    bits = ((xs[:, None] >> np.arange(n, dtype=np.uint64)) & 1).astype(np.uint8)
    fns = []
    for k in range(num_keys):
        rows = rng.integers(0, 2, size=(m, n), dtype=np.uint8)
        b = rng.integers(0, 2, size=m, dtype=np.uint8)
        out_bits = (bits @ rows.T + b) % 2
        table = (out_bits.astype(np.uint64) << np.arange(m, dtype=np.uint64)).sum(axis=1)
        fns.append(HashFunction(n=n, m=m, table=tuple(int(y) for y in table), key=k))
    return HashFamily(f"affine[n={n},m={m}]", fns)


def uniform_random_family(n: int, m: int, num_keys: int = 4, seed: int = 0) -> HashFamily:
    """Each key is an independent uniformly random truth table."""
    _check_cap(n)
    rng = np.random.default_rng(seed)
    fns = []
    for k in range(num_keys):
        table = rng.integers(0, 2**m, size=2**n)
        fns.append(HashFunction(n=n, m=m, table=tuple(int(y) for y in table), key=k))
    return HashFamily(f"uniform_random[n={n},m={m}]", fns)


def degree2_family(n: int, m: int, num_keys: int = 4, seed: int = 0) -> HashFamily:
    """Random quadratic maps over GF(2): each output bit is a degree-2
    polynomial in the input bits.  Provided as a generic test subject; no
    hardness is claimed for it."""
    _check_cap(n)
    rng = np.random.default_rng(seed)
    xs = np.arange(2**n, dtype=np.uint64)
    bits = ((xs[:, None] >> np.arange(n, dtype=np.uint64)) & 1).astype(np.uint8)
    pair_idx = [(j, l) for j in range(n) for l in range(j + 1, n)]
    pair_terms = np.array(
        [bits[:, j] & bits[:, l] for (j, l) in pair_idx], dtype=np.uint8
    ).T if pair_idx else np.zeros((2**n, 0), dtype=np.uint8)
    fns = []
    for k in range(num_keys):
        lin = rng.integers(0, 2, size=(m, n), dtype=np.uint8)
        quad = rng.integers(0, 2, size=(m, len(pair_idx)), dtype=np.uint8)
        const = rng.integers(0, 2, size=m, dtype=np.uint8)
        out_bits = (bits @ lin.T + pair_terms @ quad.T + const) % 2
        table = (out_bits.astype(np.uint64) << np.arange(m, dtype=np.uint64)).sum(axis=1)
        fns.append(HashFunction(n=n, m=m, table=tuple(int(y) for y in table), key=k))
    return HashFamily(f"degree2[n={n},m={m}]", fns)


def builtin_families(n: int, num_keys: int = 4, seed: int = 0) -> list[HashFamily]:
    """The five stock families at one input length, spanning injective,
    constant, regular, and generic behavior."""
    m = max(1, n - 1)
    return [
        identity_family(n),
        constant_family(n, n, num_keys=num_keys, seed=seed),
        affine_family(n, m, num_keys=num_keys, seed=seed + 1),
        uniform_random_family(n, m, num_keys=num_keys, seed=seed + 2),
        degree2_family(n, m, num_keys=num_keys, seed=seed + 3),
    ]


# -------------------------------------------------------------- collision finder

@lru_cache(maxsize=64)
def input_domain(n: int) -> tuple[int, ...]:
    """The shared domain tuple for {0,1}^n, cached so dists can alias it."""
    _check_cap(n, ENUM_CAP_HARD)
    return tuple(range(2**n))


@lru_cache(maxsize=64)
def pair_domain(n: int) -> tuple[tuple[int, int], ...]:
    """The shared domain tuple for ({0,1}^n)^2."""
    _check_cap(2 * n, 2 * ENUM_CAP_HARD)
    side = range(2**n)
    return tuple((x1, x2) for x1 in side for x2 in side)


@lru_cache(maxsize=4096)
def preimage_sets(h: HashFunction) -> dict[int, tuple[int, ...]]:
    """All fibers of h: output -> sorted tuple of inputs mapping to it."""
    _check_cap(h.n, ENUM_CAP_HARD)
    fibers: dict[int, list[int]] = {}
    for x, y in enumerate(h.table):
        fibers.setdefault(y, []).append(x)
    return {y: tuple(xs) for y, xs in fibers.items()}


def preimage_set(h: HashFunction, y: int) -> tuple[int, ...]:
    """{x : h(x) = y}, sorted; empty tuple when y misses the image."""
    return preimage_sets(h).get(y, ())


@lru_cache(maxsize=512)
def col_distribution(h: HashFunction) -> JointDist:
    """Exact law of Col(h): P(x1, x2) = 2^-n / |h^-1(h(x1))| on collisions."""
    total = Fraction(1, 2**h.n)
    mass: dict[tuple[int, int], Fraction] = {}
    for fiber in preimage_sets(h).values():
        p = total / len(fiber)
        for x1 in fiber:
            for x2 in fiber:
                mass[(x1, x2)] = p
    return JointDist(mass, domain=pair_domain(h.n))


def col_sample(h: HashFunction, rng: np.random.Generator) -> tuple[int, int]:
    """One draw from Col(h): uniform x1, then uniform preimage of h(x1)."""
    x1 = int(rng.integers(2**h.n))
    fiber = preimage_set(h, h(x1))
    x2 = fiber[int(rng.integers(len(fiber)))]
    return x1, x2


# ------------------------------------------------------------------- adversaries

class Adversary:
    """A deterministic collision-search strategy driven by a finite tape.

    ``tape_space(h)`` is the size of the uniform tape space (it may depend
    on h so strategies like the Col sampler can index fibers exactly);
    ``run`` maps (h, tape index) to an output pair.  Strategies whose tape
    space is too large to enumerate may provide ``exact_distribution``.
    """

    name = "adversary"

    def tape_space(self, h: HashFunction) -> int:
        raise NotImplementedError

    def run(self, h: HashFunction, tape: int) -> tuple[int, int]:
        raise NotImplementedError

    def exact_distribution(self, h: HashFunction) -> JointDist | None:
        return None


class ColAdversary(Adversary):
    """Plays the ideal finder exactly: the tape enumerates (x1, fiber slot)
    over a space whose size is a common multiple of all fiber sizes."""

    name = "ideal-col"

    def tape_space(self, h: HashFunction) -> int:
        sizes = {len(f) for f in preimage_sets(h).values()}
        return 2**h.n * math.lcm(*sizes)

    def run(self, h, tape):
        lcm = self.tape_space(h) // 2**h.n
        x1, slot = divmod(tape, lcm)
        fiber = preimage_set(h, h(x1))
        return x1, fiber[slot % len(fiber)]

    def exact_distribution(self, h):
        return col_distribution(h)


class FixedPairAdversary(Adversary):
    """Ignores both the tape and the function; outputs one fixed pair."""

    def __init__(self, pair: tuple[int, int]):
        self.pair = pair
        self.name = f"fixed{pair}"

    def tape_space(self, h):
        return 1

    def run(self, h, tape):
        return self.pair


class DiagonalAdversary(Adversary):
    """Uniform x1 with x2 := x1 (always a trivial collision)."""

    name = "diagonal"

    def tape_space(self, h):
        return 2**h.n

    def run(self, h, tape):
        return tape, tape


class FunctionAdversary(Adversary):
    """Wraps an arbitrary (h, tape) -> pair map over 2^t tapes."""

    def __init__(self, name: str, tape_bits: int, fn: Callable[[HashFunction, int], tuple[int, int]]):
        self.name = name
        self.tape_bits = tape_bits
        self.fn = fn

    def tape_space(self, h):
        return 2**self.tape_bits

    def run(self, h, tape):
        return self.fn(h, tape)


def adversary_distribution(
    a: Adversary,
    h: HashFunction,
    mode: str = "exact",
    samples: int = 0,
    rng: np.random.Generator | None = None,
    enum_threshold: int = 2**16,
) -> JointDist:
    """The adversary's output law on h.

    Exact mode enumerates the whole tape space; strategies with an analytic
    law use it once the tape space passes ``enum_threshold`` (the two routes
    are interchangeable and are cross-checked in the test suite).
    Monte-Carlo mode returns the empirical distribution of ``samples`` runs.
    """
    if mode == "exact":
        space = a.tape_space(h)
        exact = a.exact_distribution(h)
        if exact is not None and space > enum_threshold:
            return exact
        if space <= 2**TAPE_CAP_BITS:
            counts: dict[tuple[int, int], int] = {}
            for t in range(space):
                out = a.run(h, t)
                counts[out] = counts.get(out, 0) + 1
            return JointDist({pair: Fraction(c, space) for pair, c in counts.items()},
                             domain=pair_domain(h.n))
        raise EnumerationCap(f"tape space {space} exceeds 2^{TAPE_CAP_BITS} and no analytic law given")
    if mode == "monte-carlo":
        if rng is None or samples <= 0:
            raise ValueError("monte-carlo mode needs rng and samples")
        space = a.tape_space(h)
        counts = {}
        for _ in range(samples):
            t = int(rng.integers(space)) if space <= 2**63 else rng_bigint(rng, space)
            out = a.run(h, t)
            counts[out] = counts.get(out, 0) + 1
        return JointDist({pair: c / samples for pair, c in counts.items()},
                         domain=pair_domain(h.n))
    raise ValueError(f"unknown mode {mode!r}")


def rng_bigint(rng: np.random.Generator, space: int) -> int:
    """Uniform draw from range(space) for spaces beyond int64."""
    nbits = space.bit_length() + 16
    while True:
        val = int.from_bytes(rng.bytes((nbits + 7) // 8), "big") % (1 << nbits)
        if val < (1 << nbits) // space * space:
            return val % space


# ------------------------------------------------------------------ game report

@dataclass
class GameReport:
    """Result of the distributional-collision game for one (family, adversary)."""

    family: str
    adversary: str
    distance: float
    per_h: dict = field(default_factory=dict)
    mode: str = "exact"
    samples: int = 0
    ci_half_width: float = 0.0
    p_inv: float | None = None
    joint_equality_gap: float = 0.0

    @property
    def beats_threshold(self) -> bool | None:
        """Whether the measured distance stays below the 1/p threshold."""
        if self.p_inv is None:
            return None
        return self.distance <= self.p_inv


def mc_ci_half_width(samples: int, domain_size: int, confidence: float = 0.99) -> float:
    """99% half-width for the empirical-TV estimate.

    McDiarmid controls deviation of the estimator from its mean
    (sqrt(ln(2/d)/2N)); the empirical-measure bias is bounded by
    (1/2) sqrt(|domain|/N).
    """
    delta = 1 - confidence
    return math.sqrt(math.log(2 / delta) / (2 * samples)) + 0.5 * math.sqrt(domain_size / samples)


def dcrh_distance(
    family: HashFamily,
    a: Adversary,
    mode: str = "exact",
    samples: int = 0,
    rng: np.random.Generator | None = None,
    p_inv: float | None = None,
) -> GameReport:
    """E_h TV(A(h), Col(h)) over the family's enumerated key space.

    In exact mode the report also re-derives the same value from the joint
    law over (key, pair) — TV((h, A(h)), (h, Col(h))) — and records the
    (zero) discrepancy between the two routes.
    """
    per_h = {}
    dists = []
    for idx, h in enumerate(family):
        adv = adversary_distribution(a, h, mode=mode, samples=samples, rng=rng)
        delta = stat_distance(adv, col_distribution(h))
        per_h[idx] = float(delta)
        dists.append((idx, adv, delta))
    k = len(family)
    distance = sum(d for _, _, d in dists) / k
    if mode == "exact":
        # Second route: TV between the joint laws of (key, pair), which the
        # conditional-expectation identity says equals the per-key average.
        w = Fraction(1, k)
        joint_adv = mixture([(w, _tag(adv, idx)) for idx, adv, _ in dists])
        joint_col = mixture([(w, _tag(col_distribution(h), idx)) for idx, h in enumerate(family)])
        union = set(joint_adv.support()) | set(joint_col.support())
        joint_delta = sum(abs(joint_adv.prob(x) - joint_col.prob(x)) for x in union) / 2
        gap = abs(float(joint_delta) - float(distance))
        report = GameReport(family.name, a.name, float(distance), per_h, "exact",
                            p_inv=p_inv, joint_equality_gap=gap)
        assert gap <= 1e-12, "joint and per-key game values disagree"
        return report
    domain_size = max(len(adv.support()) + len(col_distribution(family.functions[i]).support())
                      for i, adv, _ in dists)
    return GameReport(family.name, a.name, float(distance), per_h, "monte-carlo",
                      samples=samples, ci_half_width=mc_ci_half_width(samples, domain_size),
                      p_inv=p_inv)


def _tag(d: Dist, idx: int) -> Dist:
    return Dist({(idx, x): p for x, p in d.items()})
