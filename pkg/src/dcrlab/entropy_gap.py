"""From a hash family to an entropy gap, and back to a collision sampler.

The two-block generator of a family emits (h(x), x) for a uniform seed;
its real entropy is the seed length n.  Any consistent online generator
can be rewound into a collision-searching adversary: run the first block
once to fix y, run the second block twice to get x1, x2 with
h(x1) = h(x2).  The distance of that adversary from the ideal finder is
controlled by the generator's entropy gap through a
Pinsker / chain-rule / Jensen chain, and every link of the chain is
checked numerically here:

    E_h TV(A(h), Col(h))  <=  sqrt(kl1) + sqrt(kl2)  <=  2 sqrt(gap)

with kl1 = E_h D(X1 || uniform), kl2 = E_{h,x1} D(X2|x1 || uniform on the
fiber of x1), and gap = n - accessible entropy.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from dcrlab.generators import (
    BlockGenerator,
    OnlineGenerator,
    accessible_entropy,
    check_consistent,
    real_entropy,
)
from dcrlab.hashfam import (
    Adversary,
    HashFamily,
    HashFunction,
    dcrh_distance,
    input_domain,
    pair_domain,
    preimage_set,
    preimage_sets,
)
from dcrlab.probkit import Dist, JointDist, kl_divergence, mixture, shannon_entropy
from dcrlab.reporting import csv_line

TOL = 1e-9
SWEEP_TOL = 1e-6  # tolerance pinned for the full-grid sweep's float chains


class ConsistencyError(ValueError):
    """An online generator was supplied where a consistent one is required."""


def build_two_block_generator(family: HashFamily) -> BlockGenerator:
    """G(h, x) = (h(x), x) with the family's keys as public parameters."""
    return BlockGenerator(
        f"two-block[{family.name}]",
        family.functions,
        family.n,
        (family.m, family.n),
        lambda h, x: (h(x), x),
    )


# ---------------------------------------------------------- online generator zoo

def honest_online(family: HashFamily) -> OnlineGenerator:
    """Runs the generator honestly: x is drawn with the first block's coins."""
    def block(h, coins):
        return h(coins[0]) if len(coins) == 1 else coins[0]
    return OnlineGenerator("honest", family.functions, (2**family.n, 1),
                           (family.m, family.n), block)


def ideal_online(family: HashFamily) -> OnlineGenerator:
    """Brute-force reference generator: y = h(u) for uniform u, then x
    uniform over h^-1(y) via fresh coins.

    The second block's coin range is the lcm of every fiber size in the
    family, so indexing coins mod the fiber size is exactly uniform; its
    conditional laws are also supplied analytically, which keeps the
    accounting exact when the lcm is too large to enumerate.
    """
    sizes = {len(f) for h in family for f in preimage_sets(h).values()}
    v2 = math.lcm(*sizes)

    def block(h, coins):
        if len(coins) == 1:
            return h(coins[0])
        fiber = preimage_set(h, h(coins[0]))
        return fiber[coins[1] % len(fiber)]

    def law(h, prefix):
        if not prefix:
            n = h.n
            return Dist({y: Fraction(len(f), 2**n) for y, f in preimage_sets(h).items()})
        return Dist.uniform(preimage_set(h, h(prefix[0])))

    return OnlineGenerator("ideal", family.functions, (2**family.n, v2),
                           (family.m, family.n), block, law_fn=law)


def lazy_online(family: HashFamily) -> OnlineGenerator:
    """Fully deterministic: one fixed first block, one fixed preimage."""
    def block(h, coins):
        y0 = h(0)
        return y0 if len(coins) == 1 else min(preimage_set(h, y0))
    return OnlineGenerator("lazy", family.functions, (1, 1),
                           (family.m, family.n), block)


def skewed_online(family: HashFamily, fixed_bits: int = 1) -> OnlineGenerator:
    """Honest on a biased seed: the top ``fixed_bits`` of x are forced to 0,
    skewing the first block away from the honest law."""
    mask = 2 ** max(family.n - fixed_bits, 0) - 1

    def block(h, coins):
        u = coins[0] & mask
        return h(u) if len(coins) == 1 else u

    return OnlineGenerator(f"skewed{fixed_bits}", family.functions,
                           (2**family.n, 1), (family.m, family.n), block)


def cheating_length_online(family: HashFamily) -> OnlineGenerator:
    """Emits an out-of-range second block; never consistent."""
    def block(h, coins):
        return h(coins[0]) if len(coins) == 1 else coins[0] + 2**family.n
    return OnlineGenerator("cheating-length", family.functions, (2**family.n, 1),
                           (family.m, family.n + 1), block)


def mismatched_online(family: HashFamily) -> OnlineGenerator:
    """Honest except on one tape, where the revealed seed is flipped and no
    longer explains the first block; consistency checking must find the
    counterexample by enumeration, and rewinding it can emit non-colliding
    pairs."""
    def block(h, coins):
        if len(coins) == 1:
            return h(coins[0])
        if coins[0] == 0 and coins[1] == 1:
            return coins[0] ^ 1
        return coins[0]
    return OnlineGenerator("mismatched", family.functions, (2**family.n, 2),
                           (family.m, family.n), block)


def consistent_suite(family: HashFamily) -> list[OnlineGenerator]:
    """The stock consistent generators, from zero gap (ideal) to maximal
    (lazy)."""
    return [honest_online(family), ideal_online(family), lazy_online(family),
            skewed_online(family)]


# ------------------------------------------------------------ rewinding adversary

class RewindingAdversary(Adversary):
    """Rewinds an online generator at its second block to emit a collision.

    The tape packs (r, r1, r2): run block one on r, then block two twice on
    the fresh coins r1 and r2.  Consistency of the generator guarantees
    both outputs land in the same fiber.
    """

    def __init__(self, gt: OnlineGenerator, family: HashFamily, *, _checked=False):
        g = build_two_block_generator(family)
        if not _checked and not check_consistent(gt, g):
            raise ConsistencyError(f"{gt.name} is not consistent with {g.name}")
        self.gt = gt
        self.family = family
        self.name = f"rewind[{gt.name}]"

    def tape_space(self, h: HashFunction) -> int:
        v1, v2 = self.gt.coin_spaces
        return v1 * v2 * v2

    def run(self, h: HashFunction, tape: int):
        v1, v2 = self.gt.coin_spaces
        r, rem = divmod(tape, v2 * v2)
        r1, r2 = divmod(rem, v2)
        x1 = self.gt.block(h, (r, r1))
        x2 = self.gt.block(h, (r, r2))
        return x1, x2

    def exact_distribution(self, h: HashFunction) -> JointDist:
        """Group first-block coins by the induced second-block law; the
        output law is the mixture of law (x) law over the groups."""
        v1 = self.gt.coin_spaces[0]
        groups: dict[Dist, int] = {}
        for r in range(v1):
            law = self.gt.block_law(h, (r,))
            groups[law] = groups.get(law, 0) + 1
        mass: dict[tuple, Fraction] = {}
        for law, count in groups.items():
            w = Fraction(count, v1)
            for x1, p1 in law.items():
                for x2, p2 in law.items():
                    key = (x1, x2)
                    mass[key] = mass.get(key, 0) + w * p1 * p2
        return JointDist(mass, domain=pair_domain(h.n))

    def first_block_marginal(self, h: HashFunction) -> Dist:
        v1 = self.gt.coin_spaces[0]
        laws = [(Fraction(1, v1), self.gt.block_law(h, (r,))) for r in range(v1)]
        mixed = mixture(laws)
        return Dist(dict(mixed.items()), domain=input_domain(h.n))


def rewinding_adversary(gt: OnlineGenerator, family: HashFamily) -> RewindingAdversary:
    return RewindingAdversary(gt, family)


def collision_rate(adv: RewindingAdversary) -> Fraction:
    """Probability (averaged over keys) that the adversary's pair collides."""
    total = Fraction(0)
    for h in adv.family:
        d = adv.exact_distribution(h)
        total += sum(p for (x1, x2), p in d.items() if h(x1) == h(x2))
    return total / len(adv.family)


# --------------------------------------------------------------- per-term bounds

@dataclass
class DivergenceCheck:
    """One averaged divergence with its entropy-route twin and gap bound."""

    value: float
    via_entropy: float
    gap: float
    per_h: dict = field(default_factory=dict)
    depends_only_on_y: bool | None = None


def first_block_kl(gt: OnlineGenerator, family: HashFamily) -> DivergenceCheck:
    """E_h D(X1 || uniform), which the gap upper-bounds.

    Computed directly as an average divergence and again as
    n - E_h H(X1); the routes must agree to 1e-9 and the value must stay
    at or below the measured entropy gap.
    """
    return _first_block_kl(RewindingAdversary(gt, family), entropy_gap(gt, family))


def _first_block_kl(adv: RewindingAdversary, gap: float) -> DivergenceCheck:
    family = adv.family
    uniform = Dist.uniform(input_domain(family.n))
    per_h = {}
    direct = 0.0
    mean_entropy = 0.0
    for idx, h in enumerate(family):
        marg = adv.first_block_marginal(h)
        d = kl_divergence(marg, uniform)
        per_h[idx] = d
        direct += d / len(family)
        mean_entropy += shannon_entropy(marg) / len(family)
    via_entropy = family.n - mean_entropy
    if abs(direct - via_entropy) > TOL:
        raise AssertionError(f"first-block KL routes disagree: {direct} vs {via_entropy}")
    if direct > gap + TOL:
        raise AssertionError(f"first-block KL {direct} exceeds gap {gap}")
    return DivergenceCheck(direct, via_entropy, gap, per_h)


def second_block_kl(gt: OnlineGenerator, family: HashFamily) -> DivergenceCheck:
    """E_{h, x1} D(X2 | x1  ||  uniform over h^-1(h(x1))).

    Also records whether the conditional law of x2 depends only on
    y = h(x1) (it does for the ideal generator, and can fail for
    degenerate ones); the gap bound holds either way.
    """
    return _second_block_kl(RewindingAdversary(gt, family), entropy_gap(gt, family))


def _second_block_kl(adv: RewindingAdversary, gap: float) -> DivergenceCheck:
    family = adv.family
    per_h = {}
    total = 0.0
    y_only = True
    for idx, h in enumerate(family):
        joint = adv.exact_distribution(h)
        rows: dict[int, dict[int, Fraction]] = {}
        for (x1, x2), p in joint.items():
            rows.setdefault(x1, {})[x2] = p
        contribution = 0.0
        by_y: dict[int, dict] = {}
        for x1, row in rows.items():
            px1 = sum(row.values())
            fiber = preimage_set(h, h(x1))
            cond_mass = {x2: p / px1 for x2, p in row.items()}
            cond = Dist(cond_mass, domain=fiber)
            contribution += float(px1) * kl_divergence(cond, Dist.uniform(fiber))
            seen = by_y.setdefault(h(x1), cond_mass)
            if seen != cond_mass:
                y_only = False
        per_h[idx] = contribution
        total += contribution / len(family)
    if total > gap + TOL:
        raise AssertionError(f"second-block KL {total} exceeds gap {gap}")
    return DivergenceCheck(total, total, gap, per_h, depends_only_on_y=y_only)


def entropy_gap(gt: OnlineGenerator, family: HashFamily) -> float:
    """n minus the generator's accessible entropy (not clamped)."""
    return family.n - accessible_entropy(gt)


# ------------------------------------------------------------------- gap report

@dataclass
class GapReport:
    """All measured quantities of the distance-vs-gap chain for one case.

    Invariants (asserted at construction):
      distance <= bound + tol, kl1 <= gap + tol, kl2 <= gap + tol,
      bound <= 2 sqrt(max(gap, 0)) + tol.
    """

    family: str
    generator: str
    n: int
    gap: float
    kl1: float
    kl2: float
    distance: float
    bound: float
    q_inv: float | None = None
    real: float = 0.0
    accessible: float = 0.0
    depends_only_on_y: bool | None = None
    tol: float = TOL

    def __post_init__(self):
        checks = [
            ("distance <= bound", self.distance <= self.bound + self.tol),
            ("kl1 <= gap", self.kl1 <= self.gap + self.tol),
            ("kl2 <= gap", self.kl2 <= self.gap + self.tol),
            ("bound <= 2 sqrt(gap)",
             self.bound <= 2 * math.sqrt(max(self.gap, 0.0)) + self.tol),
        ]
        failed = [name for name, ok in checks if not ok]
        if failed:
            raise AssertionError(f"gap-report invariants violated: {failed} on {self}")

    @property
    def headline_ok(self) -> bool:
        """distance <= 2 sqrt(gap), the composed statement."""
        return self.distance <= 2 * math.sqrt(max(self.gap, 0.0)) + self.tol

    def csv_row(self) -> str:
        return csv_line([self.family, self.generator, self.n,
                         self.gap, self.kl1, self.kl2, self.distance, self.bound])


GAP_CSV_HEADER = "family,generator,n,gap,kl1,kl2,distance,bound"


def gap_bound_report(gt: OnlineGenerator, family: HashFamily,
                     tol: float = TOL, q_inv: float | None = None) -> GapReport:
    """Measure every quantity in the chain and assert the four invariants."""
    adv = RewindingAdversary(gt, family)
    accessible = accessible_entropy(gt)
    raw_gap = family.n - accessible
    c1 = _first_block_kl(adv, raw_gap)
    c2 = _second_block_kl(adv, raw_gap)
    game = dcrh_distance(family, adv)
    kl1 = max(c1.value, 0.0)
    kl2 = max(c2.value, 0.0)
    return GapReport(
        family=family.name,
        generator=gt.name,
        n=family.n,
        gap=max(raw_gap, 0.0),
        kl1=kl1,
        kl2=kl2,
        distance=game.distance,
        bound=math.sqrt(kl1) + math.sqrt(kl2),
        q_inv=q_inv,
        real=real_entropy(build_two_block_generator(family)),
        accessible=accessible,
        depends_only_on_y=c2.depends_only_on_y,
        tol=tol,
    )


def threshold_consistency(report: GapReport, p_inv: float, tol: float = TOL) -> bool:
    """Pure threshold arithmetic: with q = 4 p^2, a gap at or below 1/q
    forces the bound to at most 2 sqrt(1/q) = 1/p."""
    q_inv = p_inv**2 / 4
    if report.gap <= q_inv:
        return report.bound <= p_inv + tol
    return True
