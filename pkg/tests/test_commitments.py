"""Commitment games and the collision-equivocation reduction."""

import numpy as np
import pytest

from dcrlab.commitments import (
    BruteForceEquivocator,
    ClearTextCommitment,
    HonestSenderStrategy,
    InjectiveCommitment,
    OpaqueCommitment,
    RandomFunctionCommitment,
    RoundStructureError,
    SessionState,
    binding_break_probability,
    col_equivocation_rate,
    commit_reduction_rows,
    decode_transcript,
    encode_transcript,
    hiding_distance,
    markov_step_check,
    run_protocol,
    scheme_to_hash_family,
    string_variant_rate,
    view_distribution,
)
from dcrlab.hashfam import col_distribution

ALL_SCHEMES = [
    RandomFunctionCommitment(3, 2, num_seeds=4, seed=1),
    InjectiveCommitment(3, 5, num_seeds=4, seed=2),
    OpaqueCommitment(3, num_seeds=3, seed=3),
    ClearTextCommitment(3),
]


# ---------------------------------------------------------------- completeness

def test_honest_runs_verify_exhaustively():
    for scheme in ALL_SCHEMES:
        for seed in scheme.receiver_seeds:
            for b in range(2**scheme.ell):
                for r in range(2**scheme.coin_bits):
                    res = run_protocol(scheme, b, r, seed)
                    assert not res.aborted
                    assert scheme.verify(res.com, res.decom) == b


def test_random_honest_runs_all_verify():
    rng = np.random.default_rng(77)
    for _ in range(10_000):
        scheme = ALL_SCHEMES[int(rng.integers(len(ALL_SCHEMES)))]
        seed = scheme.receiver_seeds[int(rng.integers(len(scheme.receiver_seeds)))]
        b = int(rng.integers(2**scheme.ell))
        r = int(rng.integers(2**scheme.coin_bits))
        res = run_protocol(scheme, b, r, seed)
        assert scheme.verify(res.com, res.decom) == b


def test_malformed_input_aborts_on_transcript():
    scheme = OpaqueCommitment(2)
    res = run_protocol(scheme, plaintext=5, sender_coins=0, receiver_seed=0)
    assert res.aborted and res.com is None
    assert ("sender", "abort") in res.messages


def test_injective_scheme_distinct_commit_messages():
    scheme = InjectiveCommitment(3, 5, num_seeds=2, seed=5)
    first = scheme.first_message(0)
    msgs = {scheme.commit_value(first, b, r) for b in range(2) for r in range(8)}
    assert len(msgs) == 16


# --------------------------------------------------------------------- hiding

def test_hiding_opaque_is_exactly_zero():
    scheme = OpaqueCommitment(4, num_seeds=2, seed=9)
    for seed in scheme.receiver_seeds:
        assert hiding_distance(scheme, seed).epsilon == 0.0


def test_hiding_clear_text_is_one():
    scheme = ClearTextCommitment(3)
    assert hiding_distance(scheme, 0).epsilon == 1.0


def test_hiding_shrinks_with_extra_coin_bits():
    # Random-function commitments: average epsilon falls as k - m grows.
    k = 6
    means = []
    for m in (5, 4, 3, 2):  # k - m = 1, 2, 3, 4
        scheme = RandomFunctionCommitment(k, m, num_seeds=24, seed=40 + m)
        eps = [hiding_distance(scheme, s).epsilon for s in scheme.receiver_seeds]
        means.append(sum(eps) / len(eps))
    assert means[0] > means[1] > means[2] > means[3]


def test_view_distribution_is_exact():
    scheme = RandomFunctionCommitment(3, 2, num_seeds=1, seed=4)
    v = view_distribution(scheme, 0, 0)
    assert v.exact
    assert all(p.denominator in (1, 2, 4, 8) for _, p in v.items())
    assert sum(p for _, p in v.items()) == 1


def test_receiver_view_is_deterministic():
    from dcrlab.commitments import receiver_view, worst_case_hiding

    scheme = RandomFunctionCommitment(3, 2, num_seeds=2, seed=21)
    a = receiver_view(scheme, 1, 0, 5)
    b = receiver_view(scheme, 1, 0, 5)
    assert a == b
    assert a.receiver_coins == 1 and len(a.messages) == 1

    worst = worst_case_hiding(scheme)
    assert worst.epsilon == max(hiding_distance(scheme, s).epsilon
                                for s in scheme.receiver_seeds)


# -------------------------------------------------------------------- binding

def test_honest_sender_never_breaks_binding():
    for scheme in ALL_SCHEMES:
        res = binding_break_probability(scheme, HonestSenderStrategy())
        assert res.break_prob == 0.0
        assert res.witnesses == []


def test_brute_force_equivocator_on_compressing_scheme():
    scheme = RandomFunctionCommitment(3, 2, num_seeds=8, seed=6)
    res = binding_break_probability(scheme, BruteForceEquivocator())
    # Oracle: a seed is breakable iff some commit message appears under
    # both plaintexts; count those seeds directly.
    breakable = 0
    for seed in scheme.receiver_seeds:
        first = scheme.first_message(seed)
        zero = {scheme.commit_value(first, 0, r) for r in range(8)}
        one = {scheme.commit_value(first, 1, r) for r in range(8)}
        breakable += bool(zero & one)
    assert res.break_prob == breakable / len(scheme.receiver_seeds)
    assert res.break_prob > 0
    for com, decom, decom_alt in res.witnesses:
        assert scheme.verify(com, decom) != scheme.verify(com, decom_alt)


def test_brute_force_equivocator_fails_on_injective():
    scheme = InjectiveCommitment(3, 5, num_seeds=4, seed=7)
    res = binding_break_probability(scheme, BruteForceEquivocator())
    assert res.break_prob == 0.0


# ------------------------------------------------------------------- reduction

def test_scheme_to_hash_family_shapes():
    scheme = RandomFunctionCommitment(3, 2, num_seeds=5, seed=8)
    fam = scheme_to_hash_family(scheme)
    assert fam.n == 4 and fam.m == 2 and len(fam) == 5
    # Every induced function is total: the table is the commit map itself.
    h = fam.functions[0]
    first = scheme.first_message(h.key)
    for x in range(16):
        assert h(x) == scheme.commit_value(first, x >> 3, x & 7)


def test_injective_scheme_gives_diagonal_col():
    fam = scheme_to_hash_family(InjectiveCommitment(3, 5, num_seeds=2, seed=3))
    for h in fam:
        assert all(x1 == x2 for (x1, x2) in col_distribution(h).support())


def test_round_structure_enforced():
    class ThreeRound(OpaqueCommitment):
        rounds = (("receiver", "first"), ("sender", "commit"), ("receiver", "ack"))

    with pytest.raises(RoundStructureError):
        scheme_to_hash_family(ThreeRound(2))


def test_equivocation_rate_opaque_is_half():
    scheme = OpaqueCommitment(4, num_seeds=3, seed=11)
    for h in scheme_to_hash_family(scheme):
        rep = col_equivocation_rate(scheme, h)
        assert rep.epsilon == 0.0
        assert rep.rate == 0.5


def test_equivocation_rate_clear_text_is_zero():
    scheme = ClearTextCommitment(3)
    h = scheme_to_hash_family(scheme).functions[0]
    rep = col_equivocation_rate(scheme, h)
    assert rep.rate == 0.0
    assert rep.lower_bound <= 0  # vacuous at epsilon = 1


def test_equivocation_bound_random_function_family():
    scheme = RandomFunctionCommitment(6, 3, num_seeds=20, seed=12)
    for h in scheme_to_hash_family(scheme):
        rep = col_equivocation_rate(scheme, h)
        assert rep.rate >= rep.lower_bound - 1e-9
        assert rep.openings_valid


def test_markov_step_exact():
    scheme = RandomFunctionCommitment(6, 3, num_seeds=10, seed=13)
    for h in scheme_to_hash_family(scheme):
        rep = markov_step_check(scheme, h)
        assert rep.ok
    zero = OpaqueCommitment(4, num_seeds=2, seed=14)
    for h in scheme_to_hash_family(zero):
        rep = markov_step_check(zero, h)
        assert rep.ok and rep.heavy_fraction == 0.0


def test_string_variant_exact_eighth():
    scheme = OpaqueCommitment(4, num_seeds=2, seed=15, ell=3)
    for h in scheme_to_hash_family(scheme):
        rep = string_variant_rate(scheme, h)
        assert rep.collision_rate == pytest.approx(1 / 8, abs=1e-12)
        assert rep.epsilon == 0.0


def test_string_variant_bit_case_matches_complement():
    scheme = OpaqueCommitment(3, num_seeds=1, seed=16, ell=1)
    h = scheme_to_hash_family(scheme).functions[0]
    eq = col_equivocation_rate(scheme, h)
    st = string_variant_rate(scheme, h)
    assert st.collision_rate == pytest.approx(1 - eq.rate, abs=1e-12)


def test_string_variant_clear_text_vacuous():
    scheme = ClearTextCommitment(2, ell=3)
    h = scheme_to_hash_family(scheme).functions[0]
    rep = string_variant_rate(scheme, h)
    assert rep.collision_rate == 1.0
    assert rep.upper_bound >= 1.0


# ------------------------------------------------------------------- plumbing

def test_session_state_machine():
    scheme = RandomFunctionCommitment(3, 2, num_seeds=1, seed=17)
    res = run_protocol(scheme, 1, 5, 0)
    sess = SessionState(scheme)
    sess.receive_first(res.com[0])
    sess.receive_commit(res.com[1])
    assert sess.receive_opening(res.decom) == 1
    with pytest.raises(RuntimeError):
        sess.receive_commit(0)


def test_transcript_hex_roundtrip():
    msgs = [b"", b"\x00\x01", bytes(range(17))]
    text = encode_transcript(msgs)
    assert decode_transcript(text) == msgs
    with pytest.raises(ValueError):
        decode_transcript("3:aa")


def test_commit_reduction_csv_rows():
    from dcrlab.reporting import parse_csv_line

    scheme = RandomFunctionCommitment(4, 2, num_seeds=3, seed=18)
    rows = commit_reduction_rows(scheme)
    assert len(rows) == 3
    for r in rows:
        fields = parse_csv_line(r)
        assert len(fields) == 5
        assert fields[0] == scheme.name
