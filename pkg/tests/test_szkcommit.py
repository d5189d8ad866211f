"""Promise problem, instance-dependent commitments, and both protocol
security arguments, all by enumeration."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from dcrlab.szkcommit import (
    NO,
    OUTSIDE,
    YES,
    EquivocatingSenderAttack,
    HonestSenderAttack,
    InjectiveSBC,
    Instance,
    ProtocolError,
    ProtocolSession,
    ReceiverSpec,
    TablePromiseProblem,
    admissible_preamble,
    break_probability,
    conditional_view_distance,
    decider_advantage,
    decider_from_breaker,
    derive_shares,
    hiding_experiment,
    honest_receiver,
    hybrid_sweep,
    idc_epsilon,
    idc_equivocation,
    idc_verify,
    run_binding_session,
    run_honest_over_channel,
    xor_all,
)

PROBLEM = TablePromiseProblem(k=4, salt=7)
SMALL = TablePromiseProblem(k=2, out_bits_choices=(2, 3), salt=3)


def slots_for(n):
    return [(i, b) for i in range(n) for b in (0, 1)]


# -------------------------------------------------------------- promise problem

def test_sampler_support_inside_promise():
    for n in (1, 2, 3):
        for coins in range(2**n):
            label = PROBLEM.classify(PROBLEM.sample(coins, n))
            assert label in (YES, NO)


def test_sampler_respects_class_selector():
    for coins in range(8):
        inst = PROBLEM.sample(coins, 3)
        expected = YES if coins & 1 == 0 else NO
        assert PROBLEM.classify(inst) == expected


def test_measured_yes_rate_matches_declared():
    assert PROBLEM.yes_rate == Fraction(1, 2)
    for n in (1, 2, 3):
        assert PROBLEM.measured_yes_rate(n) == Fraction(1, 2)


def test_yes_instances_are_lossy_balanced():
    for coins in range(0, 8, 2):
        inst = PROBLEM.sample(coins, 3)
        for members in inst.fibers().values():
            assert len(members) >= 2
            assert {b for b, _ in members} == {0, 1}
        assert idc_epsilon(inst) <= PROBLEM.balance_tol


def test_no_instances_are_injective_and_clear():
    for coins in range(1, 8, 2):
        inst = PROBLEM.sample(coins, 3)
        assert len(set(inst.table)) == len(inst.table)
        assert idc_epsilon(inst) == 1


def test_outside_tables_exist_and_are_rejected():
    # Lossy but single-bit fiber: both inputs of bit 0 collide, bit 1 is
    # injective elsewhere -> neither YES nor NO.
    inst = Instance(k=1, out_bits=2, table=(0, 0, 1, 2))
    assert PROBLEM.classify(inst) == OUTSIDE


# ------------------------------------------------------------------ IDC basics

def test_idc_verify_and_equivocation():
    yes = PROBLEM.sample(0, 2)
    for r in range(16):
        for b in (0, 1):
            assert idc_verify(yes, yes.commit(b, r), b, r)
    # Every YES commitment re-opens to the other bit somewhere.
    for r in range(16):
        c = yes.commit(0, r)
        assert idc_equivocation(yes, c, 1) is not None

    no = PROBLEM.sample(1, 2)
    for r in range(16):
        assert idc_equivocation(no, no.commit(0, r), 1) is None


def test_idc_perfect_binding_on_no_exhaustive():
    # Every injective instance the sampler can emit at n <= 3: no
    # commitment value admits a second opening.
    for n in (1, 2, 3):
        for coins in range(2**n):
            inst = PROBLEM.sample(coins, n)
            if PROBLEM.classify(inst) != NO:
                continue
            for r0 in range(2**inst.k):
                c = inst.commit(0, r0)
                for b in (0, 1):
                    valid = [r for r in range(2**inst.k) if idc_verify(inst, c, b, r)]
                    assert valid == ([r0] if b == 0 else [])


# -------------------------------------------------------------- session phases

def test_coin_toss_bookkeeping():
    n = 2
    sess = ProtocolSession(n, PROBLEM)
    rho = {slot: 1 for slot in slots_for(n)}
    sigma = {slot: 2 for slot in slots_for(n)}
    sess.coin_toss_phase(rho, sigma)
    assert all(sess.r[slot] == 3 for slot in slots_for(n))
    assert len([e for e in sess.transcript if e[0] == "coin-toss"]) == 8


def test_zero_sigma_keeps_rho():
    n = 2
    sess = ProtocolSession(n, PROBLEM)
    rho = {slot: j for j, slot in enumerate(slots_for(n))}
    sess.coin_toss_phase(rho, {slot: 0 for slot in slots_for(n)})
    assert sess.r == rho


def test_fixed_rho_enumerated_sigma_gives_uniform_r():
    n = 1
    counts = {}
    for s0 in range(2):
        for s1 in range(2):
            sess = ProtocolSession(n, PROBLEM)
            sess.coin_toss_phase({(0, 0): 1, (0, 1): 0}, {(0, 0): s0, (0, 1): s1})
            counts[(sess.r[(0, 0)], sess.r[(0, 1)])] = counts.get(
                (sess.r[(0, 0)], sess.r[(0, 1)]), 0) + 1
    assert all(c == 1 for c in counts.values()) and len(counts) == 4


def test_wi_verdict_honest_and_substituted():
    n = 2
    rho = {slot: 0 for slot in slots_for(n)}
    sigma = {slot: 1 for slot in slots_for(n)}
    wrong = PROBLEM.sample(2, n)

    honest = ProtocolSession(n, PROBLEM).coin_toss_phase(rho, sigma)
    honest.instance_gen_phase()
    assert honest.wi_verdict is True

    # Substituting a single column leaves the OR over columns true.
    one_col = ProtocolSession(n, PROBLEM).coin_toss_phase(rho, sigma)
    one_col.instance_gen_phase(substitutions={(i, 1): wrong for i in range(n)})
    assert one_col.wi_verdict is True

    # Substituting both columns falsifies the statement.
    sub = {}
    for i in range(n):
        for b in (0, 1):
            if PROBLEM.sample(rho[(i, b)] ^ sigma[(i, b)], n) != wrong:
                sub[(i, b)] = wrong
    both = ProtocolSession(n, PROBLEM).coin_toss_phase(rho, sigma)
    both.instance_gen_phase(substitutions=sub)
    assert both.wi_verdict is False


def test_phase_order_enforced():
    sess = ProtocolSession(1, PROBLEM)
    with pytest.raises(ProtocolError):
        sess.instance_gen_phase()


# --------------------------------------------------------------- completeness

def test_completeness_full_joint_n1():
    # Every coin assignment of a complete n=1 session, exhaustively.
    problem = SMALL
    n, k = 1, problem.k
    for rho_seed in range(4):
        for sigma_seed in range(4):
            for share_seed in range(2):
                for idc_seed in range(2 ** (2 * k)):
                    for m in (0, 1):
                        sess = ProtocolSession(n, problem)
                        slots = slots_for(n)
                        rho = {s: (rho_seed >> j) & 1 for j, s in enumerate(slots)}
                        sigma = {s: (sigma_seed >> j) & 1 for j, s in enumerate(slots)}
                        coins = {s: (idc_seed >> (k * j)) & (2**k - 1)
                                 for j, s in enumerate(slots)}
                        sess.coin_toss_phase(rho, sigma)
                        sess.instance_gen_phase()
                        sess.commit_phase(m=m, share_seed=share_seed, idc_coins=coins)
                        opening = sess.open_phase()
                        assert sess.verify_opening(opening) == m


def test_completeness_factored_n2_k4():
    """The n=2, k=4 joint coin space factors: per-slot validity depends on
    disjoint coins, so exhausting each factor covers every session."""
    problem = PROBLEM
    n = 2
    # Factor 1: every (instance, bit, coins) commitment re-verifies.
    for coins_val in range(2**n):
        inst = problem.sample(coins_val, n)
        for b in (0, 1):
            for r in range(2**problem.k):
                assert idc_verify(inst, inst.commit(b, r), b, r)
    # Factor 2: coin-toss bookkeeping over every (rho, sigma) slot pair.
    for rho_v in range(2**n):
        for sigma_v in range(2**n):
            assert (rho_v ^ sigma_v) ^ sigma_v == rho_v
    # Factor 3: share derivation over every seed reconstructs the message.
    for m in (0, 1):
        for seed in range(2 ** (2 * n - 1)):
            shares = derive_shares(m, seed, slots_for(n))
            assert xor_all(shares.values()) == m


def test_tamper_single_share_flip_rejects_on_no_instances():
    problem = PROBLEM
    n = 2
    no_coins = [c for c in range(2**n) if problem.classify(problem.sample(c, n)) == NO]
    rho = {slot: no_coins[0] for slot in slots_for(n)}
    sigma = {slot: 0 for slot in slots_for(n)}
    for m in (0, 1):
        for idc_seed in range(0, 2**8, 37):
            sess = ProtocolSession(n, problem)
            sess.coin_toss_phase(rho, sigma)
            sess.instance_gen_phase()
            coins = {s: (idc_seed >> (4 * j)) & 15 for j, s in enumerate(slots_for(n))}
            sess.commit_phase(m=m, share_seed=idc_seed & 7, idc_coins=coins)
            opening = sess.open_phase()
            assert sess.verify_opening(opening) == m
            for slot in slots_for(n):
                tampered = dict(opening)
                bit, c = tampered[slot]
                tampered[slot] = (1 - bit, c)
                assert sess.verify_opening(tampered) is None


# --------------------------------------------------------------- admissibility

def test_admissible_probability_honest_closed_form():
    n = 2
    out = hiding_experiment(honest_receiver(n, rho_seed=0b01100011), n, PROBLEM)
    admissible = sum(1 for rec in out.preambles if rec.admissible)
    total = len(out.preambles)
    yr = PROBLEM.yes_rate
    assert Fraction(admissible, total) == 1 - (1 - yr) ** (2 * n)
    assert out.inadmissible_prob == (1 - yr) ** (2 * n)


def test_all_no_preamble_not_admissible():
    n = 1
    no_coins = next(c for c in range(2)
                    if PROBLEM.classify(PROBLEM.sample(c, n)) == NO)
    sess = ProtocolSession(n, PROBLEM)
    rho = {slot: no_coins for slot in slots_for(n)}
    sess.coin_toss_phase(rho, {slot: 0 for slot in slots_for(n)})
    sess.instance_gen_phase()
    assert sess.wi_verdict
    assert not admissible_preamble(sess)


def test_wi_rejection_is_admissible():
    n = 1
    wrong = PROBLEM.sample(0, n)
    sess = ProtocolSession(n, PROBLEM)
    sess.coin_toss_phase({s: 0 for s in slots_for(n)}, {s: 1 for s in slots_for(n)})
    subs = {}
    for slot in slots_for(n):
        honest = PROBLEM.sample(sess.r[slot], n)
        if honest != wrong:
            subs[slot] = wrong
        else:
            subs[slot] = PROBLEM.sample(1, n)
    sess.instance_gen_phase(substitutions=subs)
    assert sess.wi_verdict is False
    assert admissible_preamble(sess)


# --------------------------------------------------------------------- hiding

def test_conditional_view_distance_matches_enumeration():
    """Product form against the brute-force view law, slot supports fully
    expanded."""
    problem = SMALL
    n = 1
    insts = [problem.sample(0, n), problem.sample(1, n)]
    k = problem.k

    def law(inst, bit):
        out = {}
        for r in range(2**k):
            v = inst.commit(bit, r)
            out[v] = out.get(v, 0) + Fraction(1, 2**k)
        return out

    def view(m):
        total = {}
        share_vectors = [s for s in itertools.product((0, 1), repeat=2) if s[0] ^ s[1] == m]
        for shares in share_vectors:
            w = Fraction(1, len(share_vectors))
            laws = [law(inst, s) for inst, s in zip(insts, shares)]
            for c0, p0 in laws[0].items():
                for c1, p1 in laws[1].items():
                    key = (c0, c1)
                    total[key] = total.get(key, 0) + w * p0 * p1
        return total

    v0, v1 = view(0), view(1)
    support = set(v0) | set(v1)
    brute = sum(abs(v0.get(c, 0) - v1.get(c, 0)) for c in support) / 2
    assert conditional_view_distance(insts) == brute


def test_hiding_experiment_honest_receiver():
    n = 2
    out = hiding_experiment(honest_receiver(n, rho_seed=0b10010110), n, PROBLEM)
    # Internal assertions already enforce the per-preamble bound; check the
    # headline numbers here.
    assert out.inadmissible_prob <= Fraction(1, 16)
    assert 0 <= out.epsilon_given_admissible <= float(PROBLEM.balance_tol)
    assert out.union_bound == 2 * 0.5**n


def test_hiding_rejected_wi_gives_zero_distance():
    n = 1
    wrong_yes = PROBLEM.sample(0, n)

    def substitute(slot, honest):
        return wrong_yes if honest != wrong_yes else PROBLEM.sample(2 % 2, n)

    spec = ReceiverSpec(rho={s: 0 for s in slots_for(n)}, substitute=substitute)
    out = hiding_experiment(spec, n, PROBLEM)
    for rec in out.preambles:
        if not rec.wi_accepted:
            assert rec.view_distance == 0


def test_yes_rate_one_sampler_never_inadmissible():
    always_yes = TablePromiseProblem(k=2, out_bits_choices=(2, 3), yes_num=2,
                                     yes_bits=1, salt=9)
    out = hiding_experiment(honest_receiver(1, rho_seed=1), 1, always_yes)
    assert out.inadmissible_prob == 0


# -------------------------------------------------------------------- binding

def test_honest_sender_never_equivocates():
    n = 1
    assert break_probability(HonestSenderAttack(), n, SMALL) == 0
    report = hybrid_sweep(HonestSenderAttack(), n, SMALL)
    assert all(v == 0 for v in report.pr_e.values())


def test_equivocator_breaks_with_yes_probability():
    n = 1
    eps_star = break_probability(EquivocatingSenderAttack(), n, SMALL)
    # A break needs at least one YES among the 2n sent instances.
    yr = SMALL.yes_rate
    assert eps_star == 1 - (1 - yr) ** (2 * n)


def test_hybrid_sweep_equivocator_ideal_components():
    n = 2
    report = hybrid_sweep(EquivocatingSenderAttack(), n, PROBLEM)
    values = list(report.pr_e.values())
    assert all(v == values[0] for v in values)  # ideal SBC and proof: no drift
    assert report.pr_e[4] >= report.eps_star / (2 * n)
    assert report.eps_star > 0


def test_hybrid_sweep_injective_sbc_slack():
    n = 1
    sbc = InjectiveSBC(value_bits=n, coin_bits=1, seed=5)
    report = hybrid_sweep(EquivocatingSenderAttack(), n, SMALL, sbc=sbc)
    assert report.sbc_slack == 1.0
    assert report.pr_e[0] == report.pr_e[1]
    assert report.pr_e[3] == report.pr_e[4]


def test_decider_advantage_exact():
    n = 2
    rep = decider_advantage(EquivocatingSenderAttack(), n, PROBLEM)
    assert rep.pr_e_and_no == 0
    assert rep.pr_correct == (1 + rep.pr_e) / 2
    assert rep.pr_e > 0


def test_decider_honest_sender_is_coin_flip():
    rep = decider_advantage(HonestSenderAttack(), 1, SMALL)
    assert rep.pr_e == 0
    assert rep.pr_correct == Fraction(1, 2)


def test_decider_single_run_interface():
    rng = np.random.default_rng(3)
    yes_x = PROBLEM.sample(0, 2)
    verdicts = {decider_from_breaker(EquivocatingSenderAttack(), yes_x, 2, PROBLEM, rng)
                for _ in range(20)}
    assert verdicts <= {YES, NO}


def test_planted_no_instance_never_equivocates_at_plant():
    n = 1
    no_x = next(PROBLEM.sample(c, n) for c in range(2)
                if PROBLEM.classify(PROBLEM.sample(c, n)) == NO)
    for rho_val in range(2):
        run = run_binding_session(
            EquivocatingSenderAttack(), 0, n, PROBLEM,
            {s: rho_val for s in slots_for(n)},
            plant_slot=(0, 0), planted_instance=no_x, wi_witness=1)
        assert (0, 0) not in run.equivocal_slots


# ------------------------------------------------------------------- channel

def test_channel_run_matches_direct_session(tmp_path):
    from dcrlab.wire import TranscriptLog

    log = TranscriptLog()
    m_out, frames = run_honest_over_channel(
        2, PROBLEM, m=1, rho_seed=0b1101, sigma_seed=0b0110,
        share_seed=5, idc_seed=0xBEEF, log=log)
    assert m_out == 1
    assert {f.phase for f in frames} == {"coin-toss", "instance-gen", "commit", "open"}

    path = tmp_path / "session.log"
    log.dump(path)
    replayed = TranscriptLog.replay(path)
    assert [m.encode() for m in replayed.messages()] == [
        m.encode() for m in log.messages()]
