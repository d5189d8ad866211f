"""The verification battery, one test per criterion, each printing its
pass/fail line.  Tolerances are pinned inside dcrlab.acceptance; nothing
is configurable from here."""

import subprocess
import sys

from dcrlab import acceptance

SEED = 7


def _check(result):
    print()
    print(result.line() + f"  ({result.elapsed:.1f}s)")
    assert result.passed, result.detail


def test_criterion_1_real_entropy_equals_n():
    _check(acceptance.criterion_real_entropy(SEED))


def test_criterion_2_gap_bound_sweep_full():
    result = acceptance.criterion_gap_sweep(SEED, max_n=8, num_keys=4)
    _check(result)
    assert result.elapsed < 600


def test_criterion_3_ideal_tightness():
    result = acceptance.criterion_ideal_tightness(SEED, max_n=8)
    _check(result)


def test_criterion_4_toolkit_identities():
    result = acceptance.criterion_probkit_identities(SEED, trials=10_000)
    _check(result)
    assert result.elapsed < 60


def test_criterion_5_commit_reduction():
    result = acceptance.criterion_commit_reduction(SEED, num_seeds=100)
    _check(result)
    assert result.elapsed < 300


def test_criterion_6_protocol_completeness():
    result = acceptance.criterion_protocol_completeness(SEED)
    _check(result)
    assert result.elapsed < 300


def test_criterion_7_binding_reduction():
    result = acceptance.criterion_binding_reduction(SEED)
    _check(result)
    assert result.elapsed < 600


def test_criterion_8_hiding_analysis():
    result = acceptance.criterion_hiding_analysis(SEED)
    _check(result)
    assert result.elapsed < 300


def test_criterion_9_cli_determinism_and_fault_flag(tmp_path):
    def run(extra, outdir):
        return subprocess.run(
            [sys.executable, "-m", "dcrlab", "verify-all", "--seed", str(SEED),
             "--fast", "--out", str(outdir), *extra],
            capture_output=True, text=True)

    first = run([], tmp_path / "a")
    second = run([], tmp_path / "b")
    assert first.returncode == 0 and second.returncode == 0

    files_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    files_b = sorted(p.name for p in (tmp_path / "b").iterdir())
    assert files_a == files_b and files_a
    for name in files_a:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    faulted = run(["--inject-fault"], tmp_path / "c")
    assert faulted.returncode != 0
    assert "injected-fault control" in faulted.stdout
    print()
    print("criterion 9 [PASS] determinism: byte-identical same-seed reports;"
          " --inject-fault flips the exit code")
