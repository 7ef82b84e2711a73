"""Acceptance criteria; each prints one PASS/FAIL line."""

import filecmp
import subprocess
import sys

import pytest

from lowerq import acceptance


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")


@pytest.mark.parametrize("crit", acceptance.CRITERIA, ids=lambda c: c.__name__)
def test_criterion(crit, capsys):
    res = crit(0)
    limit = "no limit" if res.limit is None else f"limit {res.limit:g} s"
    report(capsys, res.number, res.title, res.ok, f"{res.runtime:.1f} s, {limit}")
    assert res.passed, res.metrics
    assert res.timing_ok, f"runtime {res.runtime:.1f} s exceeds {res.limit} s"


def _tree_equal(a, b):
    cmp = filecmp.dircmp(a, b)
    if cmp.left_only or cmp.right_only or cmp.common_dirs:
        return False
    _, mismatch, errors = filecmp.cmpfiles(a, b, cmp.common_files, shallow=False)
    return not mismatch and not errors


def test_criterion_9_check_is_deterministic(tmp_path, capsys):
    outs = []
    for name in ("first", "second"):
        out = tmp_path / name
        proc = subprocess.run([sys.executable, "-m", "lowerq", "--check", "--out", str(out),
                               "--seed", "0", "--threads", "1"], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stdout + proc.stderr
        outs.append(out)
    same = _tree_equal(*outs)
    report(capsys, 9, "--check twice gives byte-identical output directories", same,
           ", ".join(sorted(p.name for p in outs[0].iterdir())))
    assert same
