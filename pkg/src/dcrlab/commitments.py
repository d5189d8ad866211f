"""Two-party commitment schemes, their security games, and the reduction
from two-message statistically hiding commitments to a hash family whose
random-collision pairs equivocate.

Plaintexts are ell-bit ints, sender coins k-bit ints; a two-message scheme
is (receiver first message, sender commit message) with the canonical
verifier: the decommitment is (plaintext, coins) and verification replays
the commit computation.  The induced hash function on x = (plaintext,
coins) is h(x) = commit(first message, plaintext; coins), so a random
collision of h is exactly a pair of valid openings of one commitment.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from dcrlab.hashfam import HashFamily, HashFunction, col_distribution, input_domain
from dcrlab.probkit import Dist, stat_distance
from dcrlab.reporting import csv_line

TOL = 1e-9


class RoundStructureError(ValueError):
    """A scheme with the wrong message pattern was fed to the reduction."""


# ----------------------------------------------------------------- scheme model

class TwoMessageCommitment:
    """Receiver speaks once, sender commits once; canonical verification.

    Concrete schemes supply ``first_message`` (receiver seed -> opaque key
    material) and ``commit_value`` (key material, plaintext, coins ->
    commit message).  Both are total and deterministic, so every game in
    this module can be computed by enumeration.
    """

    name = "two-message"
    rounds = (("receiver", "first"), ("sender", "commit"))

    def __init__(self, ell: int, coin_bits: int, message_bits: int,
                 receiver_seeds: Sequence[int]):
        self.ell = ell
        self.coin_bits = coin_bits
        self.message_bits = message_bits
        self.receiver_seeds = tuple(receiver_seeds)

    def first_message(self, seed: int):
        raise NotImplementedError

    def commit_value(self, first_msg, plaintext: int, coins: int) -> int:
        raise NotImplementedError

    # -- canonical verifier ----------------------------------------------

    def verify(self, com, decom) -> int | None:
        """Replays the sender computation; returns the plaintext or None."""
        first_msg, commit_msg = com
        plaintext, coins = decom
        if not (0 <= plaintext < 2**self.ell and 0 <= coins < 2**self.coin_bits):
            return None
        if self.commit_value(first_msg, plaintext, coins) != commit_msg:
            return None
        return plaintext


@dataclass
class RunResult:
    """One protocol execution: commitment, decommitment, message trace."""

    com: tuple | None
    decom: tuple | None
    messages: list = field(default_factory=list)
    aborted: bool = False


def run_protocol(scheme: TwoMessageCommitment, plaintext: int, sender_coins: int,
                 receiver_seed: int) -> RunResult:
    """Drives one honest commit-phase execution.

    Malformed plaintext or coin values abort the protocol; the abort is
    recorded on the transcript rather than raised.
    """
    result = RunResult(com=None, decom=None)
    first = scheme.first_message(receiver_seed)
    result.messages.append(("receiver", first))
    if not (0 <= plaintext < 2**scheme.ell and 0 <= sender_coins < 2**scheme.coin_bits):
        result.aborted = True
        result.messages.append(("sender", "abort"))
        return result
    commit_msg = scheme.commit_value(first, plaintext, sender_coins)
    result.messages.append(("sender", commit_msg))
    result.com = (first, commit_msg)
    result.decom = (plaintext, sender_coins)
    return result


# ----------------------------------------------------------------- toy schemes

class RandomFunctionCommitment(TwoMessageCommitment):
    """The receiver sends the table of a uniformly random function
    f : {0,1}^(ell+k) -> {0,1}^m and the sender answers f(b || r).

    Hiding degrades to a measurable epsilon as m approaches ell + k and is
    strong when k - m is large; binding is only as strong as collision
    finding in a published table, i.e. not at all, which is irrelevant to
    the reduction (it only consumes hiding and the two-message shape).
    """

    def __init__(self, coin_bits: int, message_bits: int, num_seeds: int = 16,
                 seed: int = 0, ell: int = 1):
        super().__init__(ell, coin_bits, message_bits, range(num_seeds))
        self.name = f"random-function[k={coin_bits},m={message_bits},ell={ell}]"
        rng = np.random.default_rng(seed)
        size = 2 ** (ell + coin_bits)
        self._tables = {
            s: tuple(int(v) for v in rng.integers(0, 2**message_bits, size=size))
            for s in self.receiver_seeds
        }

    def first_message(self, seed):
        return self._tables[seed]

    def commit_value(self, first_msg, plaintext, coins):
        return first_msg[(plaintext << self.coin_bits) | coins]


class InjectiveCommitment(TwoMessageCommitment):
    """An injective random table: perfectly binding, not hiding at all.
    Negative control for the equivocation claims."""

    def __init__(self, coin_bits: int, message_bits: int, num_seeds: int = 8,
                 seed: int = 0, ell: int = 1):
        size = 2 ** (ell + coin_bits)
        if 2**message_bits < size:
            raise ValueError("injective table needs message_bits >= ell + coin_bits")
        super().__init__(ell, coin_bits, message_bits, range(num_seeds))
        self.name = f"injective[k={coin_bits},m={message_bits}]"
        rng = np.random.default_rng(seed)
        self._tables = {
            s: tuple(int(v) for v in rng.choice(2**message_bits, size=size, replace=False))
            for s in self.receiver_seeds
        }

    def first_message(self, seed):
        return self._tables[seed]

    def commit_value(self, first_msg, plaintext, coins):
        return first_msg[(plaintext << self.coin_bits) | coins]


class OpaqueCommitment(TwoMessageCommitment):
    """Ignores the plaintext entirely: commit message = f(r).  Perfectly
    hiding (epsilon exactly 0), useful as the zero-epsilon reference."""

    def __init__(self, coin_bits: int, message_bits: int | None = None,
                 num_seeds: int = 4, seed: int = 0, ell: int = 1):
        message_bits = coin_bits if message_bits is None else message_bits
        super().__init__(ell, coin_bits, message_bits, range(num_seeds))
        self.name = f"opaque[k={coin_bits}]"
        rng = np.random.default_rng(seed)
        self._tables = {
            s: tuple(int(v) for v in rng.integers(0, 2**message_bits, size=2**coin_bits))
            for s in self.receiver_seeds
        }

    def first_message(self, seed):
        return self._tables[seed]

    def commit_value(self, first_msg, plaintext, coins):
        return first_msg[coins]


class ClearTextCommitment(TwoMessageCommitment):
    """Sends (plaintext, coins) in the clear: epsilon = 1, the other
    extreme."""

    def __init__(self, coin_bits: int, ell: int = 1):
        super().__init__(ell, coin_bits, ell + coin_bits, (0,))
        self.name = f"clear-text[k={coin_bits}]"

    def first_message(self, seed):
        return "open-channel"

    def commit_value(self, first_msg, plaintext, coins):
        return (plaintext << self.coin_bits) | coins


# --------------------------------------------------------------------- hiding

@dataclass(frozen=True)
class View:
    """What a deterministic receiver saw: its coins and, in order, every
    message the sender delivered."""

    receiver_coins: int
    messages: tuple


def receiver_view(scheme: TwoMessageCommitment, seed: int, plaintext: int,
                  coins: int) -> View:
    res = run_protocol(scheme, plaintext, coins, seed)
    sender_msgs = tuple(payload for speaker, payload in res.messages if speaker == "sender")
    return View(receiver_coins=seed, messages=sender_msgs)


@dataclass
class HidingResult:
    """Exact view distance for a fixed deterministic receiver."""

    epsilon: float
    seed: int
    per_pair: dict = field(default_factory=dict)


def view_distribution(scheme: TwoMessageCommitment, seed: int, plaintext: int) -> Dist:
    """Law of the sender's commit message over uniform coins, which is the
    whole variable part of a deterministic receiver's view."""
    first = scheme.first_message(seed)
    k = 2**scheme.coin_bits
    counts: dict[int, int] = {}
    for coins in range(k):
        msg = scheme.commit_value(first, plaintext, coins)
        counts[msg] = counts.get(msg, 0) + 1
    return Dist({m: Fraction(c, k) for m, c in counts.items()},
                domain=input_domain(scheme.message_bits))


def hiding_distance(scheme: TwoMessageCommitment, seed: int) -> HidingResult:
    """Max over plaintext pairs of the exact view distance (for ell = 1
    this is the single distance between the two views)."""
    views = {b: view_distribution(scheme, seed, b) for b in range(2**scheme.ell)}
    per_pair = {}
    worst = Fraction(0)
    for b0 in views:
        for b1 in views:
            if b0 < b1:
                d = stat_distance(views[b0], views[b1])
                per_pair[(b0, b1)] = float(d)
                worst = max(worst, d)
    return HidingResult(epsilon=float(worst), seed=seed, per_pair=per_pair)


def hiding_profile(scheme: TwoMessageCommitment) -> dict[int, HidingResult]:
    return {seed: hiding_distance(scheme, seed) for seed in scheme.receiver_seeds}


def worst_case_hiding(scheme: TwoMessageCommitment) -> HidingResult:
    """Max over the enumerated deterministic receivers (= receiver seeds)."""
    return max(hiding_profile(scheme).values(), key=lambda r: r.epsilon)


# --------------------------------------------------------------------- binding

@dataclass
class BindingResult:
    """Break probability plus the replayed witness runs that achieve it."""

    break_prob: float
    witnesses: list = field(default_factory=list)


class SenderStrategy:
    """A cheating sender: deterministic in (first message, tape)."""

    tape_space = 1

    def attack(self, scheme: TwoMessageCommitment, first_msg, tape: int):
        """Returns (commit_msg, decom, decom_alt)."""
        raise NotImplementedError


class HonestSenderStrategy(SenderStrategy):
    """Commits honestly and repeats the same opening twice."""

    def __init__(self, plaintext: int = 0, coins: int = 0):
        self.plaintext = plaintext
        self.coins = coins

    def attack(self, scheme, first_msg, tape):
        msg = scheme.commit_value(first_msg, self.plaintext, self.coins)
        decom = (self.plaintext, self.coins)
        return msg, decom, decom


class BruteForceEquivocator(SenderStrategy):
    """Scans the whole (plaintext, coins) square for one commit message
    carrying two plaintexts; falls back to an honest run when none exists."""

    def attack(self, scheme, first_msg, tape):
        by_msg: dict[int, tuple[int, int]] = {}
        for b in range(2**scheme.ell):
            for r in range(2**scheme.coin_bits):
                msg = scheme.commit_value(first_msg, b, r)
                prev = by_msg.get(msg)
                if prev is not None and prev[0] != b:
                    return msg, prev, (b, r)
                by_msg.setdefault(msg, (b, r))
        return scheme.commit_value(first_msg, 0, 0), (0, 0), (0, 0)


def binding_break_probability(scheme: TwoMessageCommitment,
                              s_star: SenderStrategy) -> BindingResult:
    """Probability over receiver seeds and strategy tapes of producing one
    commitment with two valid, distinct openings.  Every recorded witness
    run is re-verified before it is reported."""
    wins = 0
    trials = 0
    witnesses = []
    for seed in scheme.receiver_seeds:
        first = scheme.first_message(seed)
        for tape in range(s_star.tape_space):
            trials += 1
            msg, decom, decom_alt = s_star.attack(scheme, first, tape)
            com = (first, msg)
            b0 = scheme.verify(com, decom)
            b1 = scheme.verify(com, decom_alt)
            if b0 is not None and b1 is not None and b0 != b1:
                wins += 1
                witnesses.append((com, decom, decom_alt))
    for com, decom, decom_alt in witnesses:
        assert scheme.verify(com, decom) is not None
        assert scheme.verify(com, decom_alt) is not None
    return BindingResult(break_prob=wins / trials, witnesses=witnesses)


# ----------------------------------------------------- reduction to hash family

def scheme_to_hash_family(scheme: TwoMessageCommitment) -> HashFamily:
    """h(x) = commit message on x = (plaintext || coins); the key is the
    receiver's first message, sampled over the scheme's seed list."""
    if tuple(speaker for speaker, _ in scheme.rounds) != ("receiver", "sender"):
        raise RoundStructureError(
            f"{scheme.name}: reduction needs exactly receiver-then-sender messages")
    n = scheme.ell + scheme.coin_bits
    fns = []
    for seed in scheme.receiver_seeds:
        first = scheme.first_message(seed)
        table = tuple(
            scheme.commit_value(first, x >> scheme.coin_bits,
                                x & (2**scheme.coin_bits - 1))
            for x in range(2**n)
        )
        fns.append(HashFunction(n=n, m=scheme.message_bits, table=table, key=seed))
    return HashFamily(f"from[{scheme.name}]", fns)


def _split(scheme: TwoMessageCommitment, x: int) -> tuple[int, int]:
    return x >> scheme.coin_bits, x & (2**scheme.coin_bits - 1)


@dataclass
class EquivocationReport:
    """Pr over Col(h) that the two preimages open to distinct plaintexts."""

    rate: float
    epsilon: float
    lower_bound: float
    openings_valid: bool


def col_equivocation_rate(scheme: TwoMessageCommitment, h: HashFunction,
                          tol: float = TOL) -> EquivocationReport:
    """Exact Pr_{(x,x') <- Col(h)}[plaintext(x) != plaintext(x')].

    Both halves of every collision are checked to open validly under the
    canonical verifier, and the hiding bound rate >= 1/2 - 2 sqrt(eps) is
    asserted (for bit plaintexts).
    """
    first = scheme.first_message(h.key)
    eps = hiding_distance(scheme, h.key).epsilon
    rate = Fraction(0)
    valid = True
    for (x1, x2), p in col_distribution(h).items():
        b1, r1 = _split(scheme, x1)
        b2, r2 = _split(scheme, x2)
        com = (first, scheme.commit_value(first, b1, r1))
        if scheme.verify(com, (b1, r1)) is None or scheme.verify(com, (b2, r2)) is None:
            valid = False
        if b1 != b2:
            rate += p
    lower = 0.5 - 2 * math.sqrt(eps)
    report = EquivocationReport(rate=float(rate), epsilon=eps,
                                lower_bound=lower, openings_valid=valid)
    if not valid:
        raise AssertionError("a Col-supported pair failed to re-open")
    if scheme.ell == 1 and float(rate) < lower - tol:
        raise AssertionError(f"equivocation rate {float(rate)} below 1/2 - 2 sqrt(eps) = {lower}")
    return report


@dataclass
class MarkovStepReport:
    """The averaging step: commitments whose posterior plaintext law strays
    from uniform by sqrt(eps) or more carry at most sqrt(eps) mass."""

    heavy_fraction: float
    sqrt_eps: float
    ok: bool


def markov_step_check(scheme: TwoMessageCommitment, h: HashFunction) -> MarkovStepReport:
    """Exact check of Pr_{c <- C}[ TV(B_c, B) >= sqrt(eps) ] <= sqrt(eps).

    B is the uniform plaintext, C the commit message on uniform (b, r),
    B_c the posterior of b given c.  When eps is exactly zero the posterior
    must equal the prior for every commitment.
    """
    eps = hiding_distance(scheme, h.key).epsilon
    sqrt_eps = math.sqrt(eps)
    n_plain = 2**scheme.ell
    uniform_b = Dist.uniform(range(n_plain))
    first = scheme.first_message(h.key)
    by_msg: dict[int, dict[int, int]] = {}
    total = 0
    for b in range(n_plain):
        for r in range(2**scheme.coin_bits):
            msg = scheme.commit_value(first, b, r)
            by_msg.setdefault(msg, {}).setdefault(b, 0)
            by_msg[msg][b] += 1
            total += 1
    heavy = Fraction(0)
    all_uniform = True
    for msg, counts in by_msg.items():
        weight = Fraction(sum(counts.values()), total)
        posterior = Dist.from_counts(counts, domain=range(n_plain))
        d = stat_distance(posterior, uniform_b)
        if d != 0:
            all_uniform = False
        if eps > 0 and float(d) >= sqrt_eps:
            heavy += weight
    ok = all_uniform if eps == 0 else float(heavy) <= sqrt_eps + TOL
    return MarkovStepReport(heavy_fraction=float(heavy), sqrt_eps=sqrt_eps, ok=ok)


@dataclass
class StringRateReport:
    """Pr over Col(h) that the two preimages carry the same plaintext."""

    collision_rate: float
    epsilon: float
    upper_bound: float


def string_variant_rate(scheme: TwoMessageCommitment, h: HashFunction,
                        tol: float = TOL) -> StringRateReport:
    """For ell-bit plaintexts: Pr[b = b'] <= 2^-ell + 2 sqrt(eps)."""
    rep = col_equivocation_rate(scheme, h, tol=tol)
    same = 1.0 - rep.rate
    upper = 2.0**-scheme.ell + 2 * math.sqrt(rep.epsilon)
    if same > upper + tol:
        raise AssertionError(f"same-plaintext rate {same} above 2^-ell + 2 sqrt(eps) = {upper}")
    return StringRateReport(collision_rate=same, epsilon=rep.epsilon, upper_bound=upper)


# ----------------------------------------------------------- session plumbing

class SessionState:
    """Single-owner state machine for one message-driven commit session."""

    def __init__(self, scheme: TwoMessageCommitment):
        self.scheme = scheme
        self.phase = "await-first"
        self.first_msg = None
        self.commit_msg = None
        self.opened: int | None = None

    def receive_first(self, first_msg):
        if self.phase != "await-first":
            raise RuntimeError(f"first message in phase {self.phase}")
        self.first_msg = first_msg
        self.phase = "await-commit"

    def receive_commit(self, commit_msg: int):
        if self.phase != "await-commit":
            raise RuntimeError(f"commit message in phase {self.phase}")
        self.commit_msg = commit_msg
        self.phase = "committed"

    def receive_opening(self, decom) -> int | None:
        if self.phase != "committed":
            raise RuntimeError(f"opening in phase {self.phase}")
        self.opened = self.scheme.verify((self.first_msg, self.commit_msg), decom)
        self.phase = "done"
        return self.opened


def encode_transcript(messages: Sequence[bytes]) -> str:
    """Length-prefixed hex list: '<hexlen>:<hexpayload>' joined by spaces."""
    return " ".join(f"{len(m):x}:{m.hex()}" for m in messages)


def decode_transcript(text: str) -> list[bytes]:
    out = []
    for token in text.split():
        length, payload = token.split(":")
        data = bytes.fromhex(payload)
        if len(data) != int(length, 16):
            raise ValueError("length prefix does not match payload")
        out.append(data)
    return out


COMMIT_CSV_HEADER = "scheme,h_index,epsilon,rate,bound"


def commit_reduction_rows(scheme: TwoMessageCommitment) -> list[str]:
    """One CSV row per sampled key: scheme, key index, epsilon, rate, bound."""
    fam = scheme_to_hash_family(scheme)
    rows = []
    for idx, h in enumerate(fam):
        rep = col_equivocation_rate(scheme, h)
        rows.append(csv_line([scheme.name, idx, rep.epsilon, rep.rate, rep.lower_bound]))
    return rows
