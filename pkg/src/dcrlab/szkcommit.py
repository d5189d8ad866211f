"""A constant-round hiding commitment built from a hard promise problem,
with its hiding and binding arguments checked by exhaustive enumeration.

Ingredients (all desk-scale):

* a promise problem over function tables: YES instances are lossy tables
  (every occupied output has a fiber of size >= 2 containing both
  plaintext bits, with a measured plaintext imbalance), NO instances are
  injective tables; the sampler derives an instance deterministically from
  an n-bit coin string;
* an instance-dependent commitment: commit(b; r) = g_x(b || r), perfectly
  binding on NO instances, hiding to a measured epsilon on YES instances;
* an ideal statement-verdict proof for the preamble consistency claim, and
  a statistically binding commitment for the receiver's coin shares
  (ideal ledger by default, an injective-table variant for slack
  experiments).

Protocol for one message bit m: the receiver commits to 2n coin shares
rho_{i,b}, the sender returns sigma_{i,b}, instances are sampled from
r = rho xor sigma, the receiver proves one column consistent, and the
sender XOR-shares m across 2n instance-dependent commitments.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from dcrlab.probkit import Dist, stat_distance

YES, NO, OUTSIDE = "yes", "no", "outside"

TOL = 1e-9


class ProtocolError(RuntimeError):
    """A session was driven outside its phase contract."""


# ------------------------------------------------------------- promise problem

@dataclass(frozen=True)
class Instance:
    """A total function g : {0,1}^(1+k) -> {0,1}^out_bits as a table."""

    k: int
    out_bits: int
    table: tuple[int, ...]

    def commit(self, bit: int, coins: int) -> int:
        return self.table[(bit << self.k) | coins]

    def fibers(self) -> dict[int, list[tuple[int, int]]]:
        """output value -> list of (bit, coins) preimages."""
        out: dict[int, list[tuple[int, int]]] = {}
        for idx, value in enumerate(self.table):
            out.setdefault(value, []).append((idx >> self.k, idx & (2**self.k - 1)))
        return out


@lru_cache(maxsize=None)
def idc_epsilon(inst: Instance) -> Fraction:
    """Exact hiding distance of the instance-dependent commitment:
    TV between g(0 || uniform) and g(1 || uniform)."""
    zero = Dist.from_counts(_count_values(inst, 0), domain=range(2**inst.out_bits))
    one = Dist.from_counts(_count_values(inst, 1), domain=range(2**inst.out_bits))
    return stat_distance(zero, one)


def _count_values(inst: Instance, bit: int) -> dict[int, int]:
    counts: dict[int, int] = {}
    for r in range(2**inst.k):
        v = inst.commit(bit, r)
        counts[v] = counts.get(v, 0) + 1
    return counts


def idc_verify(inst: Instance, commit_value: int, bit: int, coins: int) -> bool:
    """Canonical verification: replay the commit computation."""
    if not (0 <= bit <= 1 and 0 <= coins < 2**inst.k):
        return False
    return inst.commit(bit, coins) == commit_value


def idc_equivocation(inst: Instance, commit_value: int, bit: int) -> int | None:
    """Coins opening ``commit_value`` to ``bit``, or None when impossible."""
    for r in range(2**inst.k):
        if inst.commit(bit, r) == commit_value:
            return r
    return None


class TablePromiseProblem:
    """(Pi_Y, Pi_N) over function tables, with a deterministic sampler.

    The sampler reads an n-bit coin string: the low ``yes_bits`` choose the
    class (YES iff they fall below ``yes_num``, so the YES rate is exactly
    yes_num / 2^yes_bits), the rest seed the table construction.  YES
    tables are built by pairing fibers across the two plaintext halves and
    then applying a bounded number of imbalance moves, so every fiber keeps
    at least one preimage of each bit and the measured epsilon stays at or
    below ``balance_tol``.  NO tables are injective.
    """

    def __init__(self, k: int = 4, out_bits_choices: Sequence[int] = (2, 3, 4, 5, 6),
                 yes_num: int = 1, yes_bits: int = 1,
                 balance_tol: Fraction | None = None, salt: int = 0):
        self.k = k
        self.out_bits_choices = tuple(out_bits_choices)
        self.no_choices = tuple(m for m in self.out_bits_choices if 2**m >= 2 ** (1 + k))
        if not self.no_choices:
            raise ValueError("no injective-capable output width in the choices")
        if not 0 < yes_num <= 2**yes_bits:
            raise ValueError("yes rate must be in (0, 1]")
        self.yes_num = yes_num
        self.yes_bits = yes_bits
        self.balance_tol = Fraction(1, 4) if balance_tol is None else Fraction(balance_tol)
        self.salt = salt
        self._cache: dict[tuple[int, int], Instance] = {}
        self._labels: dict[Instance, str] = {}

    @property
    def yes_rate(self) -> Fraction:
        return Fraction(self.yes_num, 2**self.yes_bits)

    # -- classification ----------------------------------------------------

    def classify(self, inst: Instance) -> str:
        if inst in self._labels:
            return self._labels[inst]
        fibers = inst.fibers()
        if all(len(members) == 1 for members in fibers.values()):
            label = NO
        else:
            lossy = all(len(members) >= 2 for members in fibers.values())
            both_bits = all(
                {b for b, _ in members} == {0, 1} for members in fibers.values()
            )
            if lossy and both_bits and idc_epsilon(inst) <= self.balance_tol:
                label = YES
            else:
                label = OUTSIDE
        self._labels[inst] = label
        return label

    # -- sampling ----------------------------------------------------------

    def sample(self, coins: int, coin_bits: int) -> Instance:
        """Deterministic instance for one coin string."""
        if coin_bits < self.yes_bits:
            raise ValueError("coin string shorter than the class selector")
        if not 0 <= coins < 2**coin_bits:
            raise ValueError("coins outside the declared space")
        key = (coins, coin_bits)
        if key in self._cache:
            return self._cache[key]
        want_yes = (coins & (2**self.yes_bits - 1)) < self.yes_num
        rng = np.random.default_rng((self.salt, coin_bits, coins))
        inst = self._build_yes(rng) if want_yes else self._build_no(rng)
        label = self.classify(inst)
        expected = YES if want_yes else NO
        if label != expected:
            raise AssertionError(f"constructed a {label} table while aiming for {expected}")
        self._cache[key] = inst
        return inst

    def _build_no(self, rng) -> Instance:
        out_bits = int(rng.choice(self.no_choices))
        table = rng.choice(2**out_bits, size=2 ** (1 + self.k), replace=False)
        return Instance(self.k, out_bits, tuple(int(v) for v in table))

    def _build_yes(self, rng) -> Instance:
        out_bits = int(rng.choice(self.out_bits_choices))
        half = 2**self.k
        groups = int(rng.integers(1, min(2**out_bits, half) + 1))
        part0 = _random_partition(rng, half, groups)
        part1 = [list(part) for part in part0]
        # Each move changes the imbalance by at most 1/2^k, so a budget of
        # balance_tol * 2^k moves keeps the measured epsilon within tolerance.
        max_moves = int(self.balance_tol * half)
        if groups > 1 and max_moves > 0:
            for _ in range(int(rng.integers(0, max_moves + 1))):
                src, dst = (int(v) for v in rng.choice(groups, size=2, replace=False))
                if len(part1[src]) > 1:
                    part1[dst].append(part1[src].pop())
        outputs = rng.permutation(2**out_bits)[:groups]
        table = [0] * (2 * half)
        for g in range(groups):
            for r in part0[g]:
                table[r] = int(outputs[g])
            for r in part1[g]:
                table[half + r] = int(outputs[g])
        return Instance(self.k, out_bits, tuple(table))

    def measured_yes_rate(self, coin_bits: int) -> Fraction:
        hits = sum(
            self.classify(self.sample(c, coin_bits)) == YES
            for c in range(2**coin_bits)
        )
        return Fraction(hits, 2**coin_bits)


def _random_partition(rng, total: int, groups: int) -> list[list[int]]:
    """Split range(total) into ``groups`` nonempty lists."""
    order = [int(v) for v in rng.permutation(total)]
    if groups == 1:
        return [order]
    cuts = sorted(int(c) + 1 for c in rng.choice(total - 1, size=groups - 1, replace=False))
    parts = []
    prev = 0
    for cut in cuts + [total]:
        parts.append(order[prev:cut])
        prev = cut
    return parts


# ------------------------------------------------- statistically binding shares

class IdealSBC:
    """Trusted-ledger commitment: handles carry no information at all and
    the committed value is perfectly bound (the session keeps the ledger)."""

    coin_bits = 0
    name = "ideal-sbc"

    def commit(self, slot, value: int, coins: int):
        return ("sbc", slot)

    def hiding_slack(self, value_bits: int) -> float:
        return 0.0


class InjectiveSBC:
    """Injective random table over (value, coins): perfectly binding, and
    the handle fully leaks the pair, so the hiding slack is 1."""

    name = "injective-sbc"

    def __init__(self, value_bits: int, coin_bits: int = 1, seed: int = 0):
        self.value_bits = value_bits
        self.coin_bits = coin_bits
        size = 2 ** (value_bits + coin_bits)
        rng = np.random.default_rng(seed)
        self._table = tuple(int(v) for v in rng.permutation(2 ** (value_bits + coin_bits + 1))[:size])

    def commit(self, slot, value: int, coins: int):
        return self._table[(value << self.coin_bits) | coins]

    def hiding_slack(self, value_bits: int) -> float:
        return 1.0


# ------------------------------------------------------------ ideal WI verdict

@dataclass(frozen=True)
class WIProof:
    """Record of one verdict-only consistency proof.

    The ideal functionality evaluates the statement (some column of sent
    instances is explained by the committed-and-revealed coins) and reveals
    the verdict alone; the witness column is recorded for audit but leaves
    no trace in the transcript.
    """

    statement_true: bool
    witness_column: int
    verdict: bool


def wi_statement_true(ledger: dict, sigma: dict, sent: dict, problem: TablePromiseProblem,
                      n: int) -> bool:
    """There is a column b whose every sent instance matches the sampler on
    the committed-and-revealed coins."""
    return any(wi_column_consistent(ledger, sigma, sent, problem, n, b) for b in (0, 1))


def wi_column_consistent(ledger: dict, sigma: dict, sent: dict,
                         problem: TablePromiseProblem, n: int, column: int) -> bool:
    return all(
        sent[(i, column)] == problem.sample(ledger[(i, column)] ^ sigma[(i, column)], n)
        for i in range(n)
    )


# ------------------------------------------------------------ protocol session

class ProtocolSession:
    """One execution of the commitment protocol, phase by phase.

    The session is a single-owner state machine; experiments drive it with
    explicit coin values so whole coin spaces can be enumerated.  Messages
    are recorded as (phase, index, payload) triples.
    """

    def __init__(self, n: int, problem: TablePromiseProblem, sbc=None):
        self.n = n
        self.problem = problem
        self.sbc = sbc if sbc is not None else IdealSBC()
        self.slots = [(i, b) for i in range(n) for b in (0, 1)]
        self.phase = "coin-toss"
        self.rho: dict = {}
        self.ledger: dict = {}
        self.handles: dict = {}
        self.sigma: dict = {}
        self.r: dict = {}
        self.instances: dict = {}
        self.wi_proof: WIProof | None = None
        self.wi_verdict: bool | None = None
        self.wi_witness: int | None = None
        self.shares: dict | None = None
        self.idc_coins: dict | None = None
        self.commits: dict = {}
        self.plaintext: int | None = None
        self.transcript: list[tuple[str, int, object]] = []

    def _record(self, phase: str, index: int, payload) -> None:
        self.transcript.append((phase, index, payload))

    def _need_phase(self, expected: str) -> None:
        if self.phase != expected:
            raise ProtocolError(f"expected phase {expected}, session is in {self.phase}")

    def coin_toss_phase(self, rho: dict, sigma: dict, sbc_coins: dict | None = None,
                        ledger_override: dict | None = None) -> "ProtocolSession":
        """Receiver commits its coin shares, sender reveals its own; the
        receiver-side joint coins r = rho xor sigma are fixed here.

        ``ledger_override`` substitutes the value actually bound inside a
        commitment (used by the hybrid experiments); the handle the sender
        sees is computed from the bound value.
        """
        self._need_phase("coin-toss")
        self.rho = dict(rho)
        self.sigma = dict(sigma)
        sbc_coins = sbc_coins or {slot: 0 for slot in self.slots}
        for idx, slot in enumerate(self.slots):
            bound = rho[slot] if ledger_override is None else ledger_override.get(slot, rho[slot])
            self.ledger[slot] = bound
            self.handles[slot] = self.sbc.commit(slot, bound, sbc_coins[slot])
            self._record("coin-toss", idx, self.handles[slot])
        for idx, slot in enumerate(self.slots):
            self._record("coin-toss", len(self.slots) + idx, sigma[slot])
            self.r[slot] = self.rho[slot] ^ sigma[slot]
        self.phase = "instance-gen"
        return self

    def instance_gen_phase(self, substitutions: dict | None = None,
                           wi_witness: int = 0) -> "ProtocolSession":
        """Receiver sends the sampled instances (with optional adversarial
        or experiment-driven substitutions) and proves one column
        consistent; the verdict-only proof uses the declared witness."""
        self._need_phase("instance-gen")
        substitutions = substitutions or {}
        for idx, slot in enumerate(self.slots):
            honest = self.problem.sample(self.r[slot], self.n)
            self.instances[slot] = substitutions.get(slot, honest)
            self._record("instance-gen", idx, self.instances[slot])
        self.wi_witness = wi_witness
        truth = wi_statement_true(
            self.ledger, self.sigma, self.instances, self.problem, self.n)
        self.wi_proof = WIProof(statement_true=truth, witness_column=wi_witness,
                                verdict=truth)
        self.wi_verdict = self.wi_proof.verdict
        self._record("instance-gen", len(self.slots), self.wi_verdict)
        self.phase = "commit" if self.wi_verdict else "done"
        return self

    def commit_phase(self, m: int | None = None, share_seed: int = 0,
                     shares: dict | None = None,
                     idc_coins: dict | None = None) -> "ProtocolSession":
        """Sender XOR-shares the plaintext over the 2n instance-dependent
        commitments.  Honest use passes m and a share seed; adversarial
        senders pass explicit shares."""
        self._need_phase("commit")
        if shares is None:
            if m is None:
                raise ProtocolError("either m or explicit shares are required")
            shares = derive_shares(m, share_seed, self.slots)
        self.shares = dict(shares)
        self.plaintext = xor_all(self.shares.values())
        if m is not None and self.plaintext != m:
            raise ProtocolError("shares do not reconstruct the plaintext")
        self.idc_coins = idc_coins or {slot: 0 for slot in self.slots}
        for idx, slot in enumerate(self.slots):
            value = self.instances[slot].commit(self.shares[slot], self.idc_coins[slot])
            self.commits[slot] = value
            self._record("commit", idx, value)
        self.phase = "open"
        return self

    def open_phase(self, opening: dict | None = None) -> dict:
        """Reveal (share, coins) per slot; defaults to the honest opening."""
        self._need_phase("open")
        if opening is None:
            opening = {slot: (self.shares[slot], self.idc_coins[slot]) for slot in self.slots}
        for idx, slot in enumerate(self.slots):
            self._record("open", idx, opening[slot])
        self.phase = "done"
        return opening

    def verify_opening(self, opening: dict) -> int | None:
        """Canonical verification: every instance-dependent commitment is
        recomputed and the shares are XOR-combined; any failure is a
        rejection."""
        bits = []
        for slot in self.slots:
            bit, coins = opening[slot]
            if not idc_verify(self.instances[slot], self.commits[slot], bit, coins):
                return None
            bits.append(bit)
        return xor_all(bits)


def xor_all(values) -> int:
    out = 0
    for v in values:
        out ^= v
    return out


def derive_shares(m: int, share_seed: int, slots: Sequence) -> dict:
    """2n bits with prescribed XOR: the seed supplies the first 2n-1."""
    shares = {}
    for j, slot in enumerate(slots[:-1]):
        shares[slot] = (share_seed >> j) & 1
    shares[slots[-1]] = m ^ xor_all(shares.values())
    return shares


# ------------------------------------------------------------------ admissible

def admissible_preamble(session: ProtocolSession) -> bool:
    """Some sent instance is YES, or the consistency proof was rejected."""
    if session.wi_verdict is None:
        raise ProtocolError("preamble not complete")
    if not session.wi_verdict:
        return True
    return any(session.problem.classify(x) == YES for x in session.instances.values())


# ------------------------------------------------------------ hiding analysis

@dataclass
class ReceiverSpec:
    """A deterministic receiver: fixed coin shares plus an optional
    instance substitution map applied to what it sends."""

    rho: dict
    substitute: Callable[[tuple, Instance], Instance] | None = None

    def substitutions(self, session: ProtocolSession) -> dict:
        if self.substitute is None:
            return {}
        subs = {}
        for slot in session.slots:
            honest = session.problem.sample(session.r[slot], session.n)
            replaced = self.substitute(slot, honest)
            if replaced != honest:
                subs[slot] = replaced
        return subs


def honest_receiver(n: int, rho_seed: int = 0) -> ReceiverSpec:
    """Coin shares read off a seed integer, n bits per slot."""
    slots = [(i, b) for i in range(n) for b in (0, 1)]
    rho = {}
    for j, slot in enumerate(slots):
        rho[slot] = (rho_seed >> (n * j)) & (2**n - 1)
    return ReceiverSpec(rho=rho)


def conditional_view_distance(instances: Sequence[Instance]) -> Fraction:
    """Exact TV between the commit-phase views under m = 0 and m = 1,
    conditioned on a fixed preamble that sent these instances.

    With XOR shares, writing S_j and D_j for the sum and difference of the
    two per-slot commit laws, the constrained share mixture collapses to
    (tensor S +/- tensor D) / 2^(2n), so the distance is the product of the
    per-slot hiding distances:  TV = prod_j eps_j.
    """
    out = Fraction(1)
    for inst in instances:
        out *= idc_epsilon(inst)
        if out == 0:
            return Fraction(0)
    return out


@dataclass
class PreambleRecord:
    sigma: tuple
    admissible: bool
    wi_accepted: bool
    labels: tuple
    view_distance: Fraction


@dataclass
class HidingOutcome:
    """Everything measured by one hiding experiment."""

    inadmissible_prob: Fraction
    epsilon_given_admissible: float
    union_bound: float
    preambles: list[PreambleRecord] = field(default_factory=list)

    @property
    def total_distance_bound(self) -> float:
        return self.epsilon_given_admissible + float(self.inadmissible_prob)


def hiding_experiment(r_spec: ReceiverSpec, n: int, problem: TablePromiseProblem,
                      tol: float = TOL, keep_records: bool = True) -> HidingOutcome:
    """Enumerates every sender coin-share vector, classifies each preamble,
    and computes the exact conditional view distance for the admissible
    ones.

    Asserts the two claims the hiding proof composes: the inadmissible
    probability is at most 2 (1 - yes_rate)^n, and conditioned on any
    admissible preamble the view distance is at most the largest epsilon
    among the YES instances it sent (zero when the proof was rejected).
    """
    slots = [(i, b) for i in range(n) for b in (0, 1)]
    records = []
    inadmissible = Fraction(0)
    worst = Fraction(0)
    total = Fraction(1, (2**n) ** len(slots))
    for sigma_values in itertools.product(range(2**n), repeat=len(slots)):
        sigma = dict(zip(slots, sigma_values))
        session = ProtocolSession(n, problem)
        session.coin_toss_phase(r_spec.rho, sigma)
        session.instance_gen_phase(substitutions=r_spec.substitutions(session))
        admissible = admissible_preamble(session)
        labels = tuple(problem.classify(session.instances[slot]) for slot in slots)
        if not session.wi_verdict:
            dist = Fraction(0)
        else:
            dist = conditional_view_distance([session.instances[slot] for slot in slots])
        if admissible:
            worst = max(worst, dist)
            if session.wi_verdict:
                yes_eps = [idc_epsilon(session.instances[slot])
                           for slot in slots
                           if problem.classify(session.instances[slot]) == YES]
                if float(dist) > float(max(yes_eps)) + tol:
                    raise AssertionError("conditional view distance beats the YES epsilon bound")
        else:
            inadmissible += total
        if keep_records:
            records.append(PreambleRecord(sigma_values, admissible, bool(session.wi_verdict),
                                          labels, dist))
    union = 2 * float((1 - problem.yes_rate)) ** n
    if float(inadmissible) > union + tol:
        raise AssertionError(
            f"inadmissible probability {float(inadmissible)} above union bound {union}")
    return HidingOutcome(
        inadmissible_prob=inadmissible,
        epsilon_given_admissible=float(worst),
        union_bound=union,
        preambles=records,
    )


# ---------------------------------------------------------- binding reduction

class SenderAttack:
    """A deterministic cheating sender driven by a finite tape."""

    tape_space = 1
    name = "attack"

    def choose_sigma(self, tape: int, n: int, slots) -> dict:
        return {slot: 0 for slot in slots}

    def choose_commitments(self, tape: int, session: ProtocolSession) -> tuple[dict, dict]:
        """Returns (shares, idc coins)."""
        return ({slot: 0 for slot in session.slots},
                {slot: 0 for slot in session.slots})

    def openings(self, tape: int, session: ProtocolSession) -> tuple[dict, dict]:
        """The two openings submitted to the binding game."""
        honest = {slot: (session.shares[slot], session.idc_coins[slot])
                  for slot in session.slots}
        return honest, honest


class HonestSenderAttack(SenderAttack):
    """Commits to a fixed bit and opens it twice; never equivocates."""

    name = "honest"

    def __init__(self, m: int = 0):
        self.m = m

    def choose_commitments(self, tape, session):
        return (derive_shares(self.m, 0, session.slots),
                {slot: 0 for slot in session.slots})


class EquivocatingSenderAttack(SenderAttack):
    """Commits shares of 0, then re-opens the first slot whose instance
    admits a second preimage with the opposite bit (every YES instance
    does, by construction of the promise problem)."""

    name = "equivocator"

    def openings(self, tape, session):
        honest = {slot: (session.shares[slot], session.idc_coins[slot])
                  for slot in session.slots}
        for slot in session.slots:
            flipped_bit = 1 - session.shares[slot]
            coins = idc_equivocation(session.instances[slot], session.commits[slot],
                                     flipped_bit)
            if coins is not None:
                other = dict(honest)
                other[slot] = (flipped_bit, coins)
                return honest, other
        return honest, honest


@dataclass
class BindingRun:
    """Outcome of one complete execution against the binding game."""

    session: ProtocolSession
    opening_a: dict
    opening_b: dict
    full_break: bool
    equivocal_slots: frozenset


def run_binding_session(s_star: SenderAttack, tape: int, n: int,
                        problem: TablePromiseProblem, rho: dict,
                        plant_slot=None, planted_instance: Instance | None = None,
                        ledger_override: dict | None = None,
                        wi_witness: int = 0, sbc=None,
                        sbc_coins: dict | None = None) -> BindingRun:
    """One full execution of (S*, R) with the experiment's substitutions."""
    session = ProtocolSession(n, problem, sbc=sbc)
    slots = session.slots
    sigma = s_star.choose_sigma(tape, n, slots)
    session.coin_toss_phase(rho, sigma, sbc_coins=sbc_coins, ledger_override=ledger_override)
    substitutions = {}
    if plant_slot is not None:
        substitutions[plant_slot] = planted_instance
    session.instance_gen_phase(substitutions=substitutions, wi_witness=wi_witness)
    if not session.wi_verdict:
        return BindingRun(session, {}, {}, False, frozenset())
    shares, coins = s_star.choose_commitments(tape, session)
    session.commit_phase(shares=shares, idc_coins=coins)
    opening_a, opening_b = s_star.openings(tape, session)
    session.open_phase(opening_a)
    m_a = session.verify_opening(opening_a)
    m_b = session.verify_opening(opening_b)
    full_break = m_a is not None and m_b is not None and m_a != m_b
    equivocal = frozenset(
        slot for slot in slots
        if opening_a and opening_b
        and idc_verify(session.instances[slot], session.commits[slot], *opening_a[slot])
        and idc_verify(session.instances[slot], session.commits[slot], *opening_b[slot])
        and opening_a[slot][0] != opening_b[slot][0]
    )
    return BindingRun(session, opening_a, opening_b, full_break, equivocal)


def _rho_space(n: int):
    slots = [(i, b) for i in range(n) for b in (0, 1)]
    for values in itertools.product(range(2**n), repeat=len(slots)):
        yield dict(zip(slots, values))


def break_probability(s_star: SenderAttack, n: int, problem: TablePromiseProblem) -> Fraction:
    """epsilon*: probability of a full equivocation in a standard run."""
    wins = 0
    runs = 0
    for rho in _rho_space(n):
        for tape in range(s_star.tape_space):
            runs += 1
            wins += run_binding_session(s_star, tape, n, problem, rho).full_break
    return Fraction(wins, runs)


@dataclass
class HybridReport:
    """Exact Pr[E] per hybrid stage plus the slack budget between stages."""

    pr_e: dict
    eps_star: Fraction
    sbc_slack: float
    wi_slack: float
    n: int

    def check(self, tol: float = TOL) -> None:
        if self.pr_e[0] != self.pr_e[1]:
            raise AssertionError("stage 0 and 1 must agree exactly")
        if self.pr_e[3] != self.pr_e[4]:
            raise AssertionError("stage 3 and 4 must agree exactly")
        if abs(float(self.pr_e[1] - self.pr_e[2])) > self.sbc_slack + tol:
            raise AssertionError("stage 1 vs 2 exceeds the share-commitment slack")
        if abs(float(self.pr_e[2] - self.pr_e[3])) > self.wi_slack + tol:
            raise AssertionError("stage 2 vs 3 exceeds the proof slack")
        if self.pr_e[4] < self.eps_star / (2 * self.n):
            raise AssertionError("final stage below eps*/(2n)")


def hybrid_experiment(s_star: SenderAttack, n: int, problem: TablePromiseProblem,
                      stage: int, sbc=None) -> Fraction:
    """Pr[E] in one hybrid stage, by exhaustive enumeration.

    E is the event that the two openings differ validly at the uniformly
    chosen slot (i*, b*).  Stages: 0 plants a fresh sampler instance and
    proves with the untouched column; 1 re-derives the plant from the
    sender's own share; 2 additionally rebinds the coin-share commitment
    to the fresh share; 3 switches the proof witness back to column 0;
    4 is the standard execution.
    """
    if stage not in range(5):
        raise ValueError("stage must be 0..4")
    sbc = sbc if sbc is not None else IdealSBC()
    slots = [(i, b) for i in range(n) for b in (0, 1)]
    sbc_space = 2**sbc.coin_bits
    hits = Fraction(0)
    runs = 0
    for star in slots:
        for rho in _rho_space(n):
            for extra in range(2**n):
                for tape in range(s_star.tape_space):
                    for sbc_seed in range(sbc_space ** len(slots) if sbc_space > 1 else 1):
                        sbc_coins = None
                        if sbc_space > 1:
                            sbc_coins = {
                                slot: (sbc_seed // sbc_space**j) % sbc_space
                                for j, slot in enumerate(slots)
                            }
                        runs += 1
                        kwargs = {}
                        if stage == 0:
                            kwargs = dict(plant_slot=star,
                                          planted_instance=problem.sample(extra, n),
                                          wi_witness=1 - star[1])
                        elif stage in (1, 2, 3):
                            sigma = s_star.choose_sigma(tape, n, slots)
                            planted = problem.sample(sigma[star] ^ extra, n)
                            kwargs = dict(plant_slot=star, planted_instance=planted,
                                          wi_witness=0 if stage == 3 else 1 - star[1])
                            if stage in (2, 3):
                                kwargs["ledger_override"] = {star: extra}
                        run = run_binding_session(
                            s_star, tape, n, problem, rho, sbc=sbc,
                            sbc_coins=sbc_coins, **kwargs)
                        if star in run.equivocal_slots:
                            hits += 1
    return hits / runs


def hybrid_sweep(s_star: SenderAttack, n: int, problem: TablePromiseProblem,
                 sbc=None) -> HybridReport:
    """Runs all five hybrid stages and checks the bridging guarantees."""
    sbc = sbc if sbc is not None else IdealSBC()
    pr_e = {stage: hybrid_experiment(s_star, n, problem, stage, sbc=sbc)
            for stage in range(5)}
    report = HybridReport(
        pr_e=pr_e,
        eps_star=break_probability(s_star, n, problem),
        sbc_slack=sbc.hiding_slack(n),
        wi_slack=0.0,
        n=n,
    )
    report.check()
    return report


# ------------------------------------------------------------------ the decider

@dataclass
class DeciderReport:
    """Exact accounting of the decider built from a binding adversary."""

    pr_correct: Fraction
    pr_e: Fraction
    pr_e_and_no: Fraction

    def check(self) -> None:
        if self.pr_e_and_no != 0:
            raise AssertionError("equivocation on a planted NO instance")
        if self.pr_correct < (1 + self.pr_e) / 2:
            raise AssertionError("decider advantage below (1 + Pr[E])/2")


def decider_advantage(s_star: SenderAttack, n: int, problem: TablePromiseProblem) -> DeciderReport:
    """Pr[x in Pi_{D(x)}] for the decider that plants its input instance at
    a random slot, runs the binding adversary, declares YES on slot
    equivocation and guesses otherwise.  All coins enumerated."""
    slots = [(i, b) for i in range(n) for b in (0, 1)]
    correct = Fraction(0)
    pr_e = Fraction(0)
    pr_e_and_no = Fraction(0)
    runs = 0
    for coins in range(2**n):
        x = problem.sample(coins, n)
        label = problem.classify(x)
        for star in slots:
            for rho in _rho_space(n):
                for tape in range(s_star.tape_space):
                    runs += 1
                    run = run_binding_session(
                        s_star, tape, n, problem, rho,
                        plant_slot=star, planted_instance=x,
                        wi_witness=1 - star[1])
                    event = star in run.equivocal_slots
                    if event:
                        pr_e += 1
                        correct += label == YES
                        pr_e_and_no += label == NO
                    else:
                        correct += Fraction(1, 2)
    report = DeciderReport(pr_correct=correct / runs, pr_e=pr_e / runs,
                           pr_e_and_no=pr_e_and_no / runs)
    report.check()
    return report


def decider_from_breaker(s_star: SenderAttack, x: Instance, n: int,
                         problem: TablePromiseProblem, rng: np.random.Generator) -> str:
    """One sampled decider run on a given instance: plant, run, declare."""
    slots = [(i, b) for i in range(n) for b in (0, 1)]
    star = slots[int(rng.integers(len(slots)))]
    rho = {slot: int(rng.integers(2**n)) for slot in slots}
    tape = int(rng.integers(s_star.tape_space))
    run = run_binding_session(s_star, tape, n, problem, rho,
                              plant_slot=star, planted_instance=x,
                              wi_witness=1 - star[1])
    if star in run.equivocal_slots:
        return YES
    return YES if int(rng.integers(2)) == 0 else NO


# ---------------------------------------------------------- channel transport

def encode_instance(inst: Instance) -> bytes:
    return bytes([inst.k, inst.out_bits]) + bytes(inst.table)


def decode_instance(payload: bytes) -> Instance:
    k, out_bits = payload[0], payload[1]
    return Instance(k=k, out_bits=out_bits, table=tuple(payload[2:]))


def run_honest_over_channel(n: int, problem: TablePromiseProblem, m: int,
                            rho_seed: int = 0, sigma_seed: int = 0,
                            share_seed: int = 0, idc_seed: int = 0,
                            log=None) -> tuple[int | None, list]:
    """Drives one honest execution through the framed duplex channel.

    Every protocol message crosses the wire as a ``phase,index,hex`` frame;
    the receiver verifies the final opening.  Returns the verified
    plaintext and the frames in transit order.  A TranscriptLog captures a
    replayable record when supplied.
    """
    from dcrlab.wire import Message, duplex_pair

    sender, receiver = duplex_pair(log=log)
    slots = [(i, b) for i in range(n) for b in (0, 1)]
    frames = []

    def push(endpoint, msg):
        frames.append(msg)
        endpoint.send(msg)

    session = ProtocolSession(n, problem)
    rho = {slot: (rho_seed >> (n * j)) & (2**n - 1) for j, slot in enumerate(slots)}
    sigma = {slot: (sigma_seed >> (n * j)) & (2**n - 1) for j, slot in enumerate(slots)}

    # Coin toss: receiver's share commitments, then the sender's shares.
    for idx, slot in enumerate(slots):
        push(receiver, Message("coin-toss", idx, b""))
        sender.recv()
    for idx, slot in enumerate(slots):
        push(sender, Message("coin-toss", len(slots) + idx, bytes([sigma[slot]])))
        receiver.recv()
    session.coin_toss_phase(rho, sigma)

    # Instance generation plus the verdict-only consistency proof.
    for idx, slot in enumerate(slots):
        inst = problem.sample(session.r[slot], n)
        push(receiver, Message("instance-gen", idx, encode_instance(inst)))
        assert decode_instance(sender.recv().payload) == inst
    session.instance_gen_phase()
    push(sender, Message("instance-gen", len(slots), bytes([int(session.wi_verdict)])))
    receiver.recv()
    if not session.wi_verdict:
        return None, frames

    # Commit and open.
    idc_coins = {slot: (idc_seed >> (problem.k * j)) & (2**problem.k - 1)
                 for j, slot in enumerate(slots)}
    session.commit_phase(m=m, share_seed=share_seed, idc_coins=idc_coins)
    for idx, slot in enumerate(slots):
        push(sender, Message("commit", idx, bytes([session.commits[slot]])))
        receiver.recv()
    opening = session.open_phase()
    for idx, slot in enumerate(slots):
        bit, coins = opening[slot]
        push(sender, Message("open", idx, bytes([bit, coins])))
        receiver.recv()
    return session.verify_opening(opening), frames
