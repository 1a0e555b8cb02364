"""Acceptance gate. Each criterion prints one PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for just the summary lines,
or through pytest where each criterion is its own test.
"""

import json
import os
import subprocess
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from kit import RULE_CASES, fx  # noqa: E402

from depbugs import (  # noqa: E402
    VersionRange,
    check_dependency,
    decide_side,
    diff,
    generate_instance,
    load_history,
    load_usage_facts,
    oracle_incompatible_versions,
    parse_range,
    read_elf_imports_file,
)
from depbugs.scan import reports_from_json, validate_report_document  # noqa: E402
from depbugs.versions import Ordering, compare_versions  # noqa: E402

# pinned tolerances
MOTIVATING_MAX_SECONDS = 1.0
ORACLE_MIN_INSTANCES = 200
ORACLE_MAX_SECONDS = 30.0
COMPARATOR_MIN_PAIRS = 30
ELF_MIN_OBJECTS = 2


def _pair(history, usage, depends):
    h = load_history(fx(history, "history.json"))
    return check_dependency(load_usage_facts(fx("usage", usage)), parse_range(depends), h)


def criterion_1():
    t0 = time.perf_counter()
    cockpit = _pair("glib", "cockpit.json", ">= 2.37.6")
    homebank = _pair("glib", "homebank.json", ">= 2.37.3")
    elapsed = time.perf_counter() - t0
    got = (cockpit.incompatible.bounds(), homebank.incompatible.bounds())
    want = ([("2.37.6", "2.39.1")], [("2.37.3", "2.39.1")])
    ok = got == want and elapsed < MOTIVATING_MAX_SECONDS
    return ok, f"cockpit {got[0]}, homebank {got[1]}, {elapsed:.3f}s"


def criterion_2():
    r = _pair("zlib_gzgetc", "aewan.json", "")
    members = [str(v) for v in r.incompatible.members(r.releases)]
    return members == ["1.2.5.2"], f"incompatible {members}"


TABLE_IV = [
    ("sqlite", "qgis-providers.json", ">= 3.5.9", "[3.5.9, 3.7.6.3]"),
    ("zlib", "unalz.json", ">= 1.1.4", "[1.2.7, V_last]"),
    ("glib_geeqie", "geeqie.json", ">= 2.51.0", "[V_init, 2.51.0]"),
]


def criterion_3():
    got = {}
    for history, usage, depends, _ in TABLE_IV:
        got[usage] = _pair(history, usage, depends).incompatible.render()
    # alsa-utils has no facts file: its imports come from the ELF fixture
    from depbugs.usage import AppUsage
    from depbugs.versions import Version
    alsa_app = AppUsage("alsa-utils", Version("1.1.9"), frozenset(read_elf_imports_file(fx("elf", "alsa_utils.so"))))
    alsa = check_dependency(alsa_app, parse_range(">= 1.1.1"), load_history(fx("alsa", "history.json")))
    got["alsa_utils.so"] = alsa.incompatible.render()
    want = {usage: expect for _, usage, _, expect in TABLE_IV}
    want["alsa_utils.so"] = "[1.2.1, V_last]"
    return got == want, "; ".join(f"{k}: {v}" for k, v in got.items())


def criterion_4():
    r = _pair("libpcre", "mongodb.json", "")
    rendered = r.incompatible.render()
    kinds = sorted({int(f.change.kind) for f in r.findings})
    ok = rendered == "[V_init, 5.0]∪[7.0, V_last]" and len(r.incompatible) == 2 and kinds == [11, 15]
    return ok, f"{rendered} from kinds {kinds}"


def criterion_5():
    passed, failures = 0, []
    for kind, a, b, usage, side in RULE_CASES:
        ics = [ic for ic in diff(a, b) if int(ic.kind) == kind]
        outcomes = set()
        for ic in ics:
            o = decide_side(ic, usage)
            if o.undecidable and not o.is_bug:
                outcomes.add(None)
            elif o.bug_old == a.version and o.bug_new is None:
                outcomes.add("old")
            elif o.bug_new == b.version and o.bug_old is None:
                outcomes.add("new")
            else:
                outcomes.add("?")
        if ics and outcomes == {side}:
            passed += 1
        else:
            failures.append(kind)
    return passed == 18, f"{passed}/18" + (f" failing kinds {failures}" if failures else "")


def criterion_6():
    t0 = time.perf_counter()
    mismatches, nonempty = 0, 0
    for seed in range(ORACLE_MIN_INSTANCES):
        h, app, _ = generate_instance(seed)
        got = set(check_dependency(app, VersionRange(), h).incompatible.members(h.versions))
        want = oracle_incompatible_versions(app, VersionRange(), h)
        mismatches += got != want
        nonempty += bool(want)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < ORACLE_MAX_SECONDS
    return ok, f"{ORACLE_MIN_INSTANCES} instances, {mismatches} mismatches, {nonempty} with bugs, {elapsed:.2f}s"


def criterion_7():
    with open(fx("versions", "corpus.json")) as fh:
        rows = json.load(fh)
    sign = {Ordering.LT: -1, Ordering.EQ: 0, Ordering.GT: 1}
    agree = sum(sign[compare_versions(r["a"], r["b"])] == r["cmp"] for r in rows)
    has_epoch = any(":" in r["a"] + r["b"] for r in rows)
    has_tilde = any("~" in r["a"] + r["b"] for r in rows)
    ok = len(rows) >= COMPARATOR_MIN_PAIRS and agree == len(rows) and has_epoch and has_tilde
    return ok, f"{agree}/{len(rows)} pairs agree"


def criterion_8():
    with open(fx("elf", "expected.json")) as fh:
        expected = json.load(fh)
    good, versioned = 0, False
    for name, exp in expected.items():
        got = sorted(read_elf_imports_file(fx("elf", name)), key=lambda x: (x[0], x[1] or ""))
        want = [tuple(x) for x in exp["imports"]]
        good += got == want
        versioned |= any(t for _, t in want)
    ok = good == len(expected) >= ELF_MIN_OBJECTS and versioned
    return ok, f"{good}/{len(expected)} objects exact"


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "depbugs", *args], capture_output=True)


def criterion_9():
    first = _cli("scan", fx("repo_combined.json"), "--format", "json")
    second = _cli("scan", fx("repo_combined.json"), "--format", "json")
    clean = _cli("scan", fx("repo_clean.json"), "--format", "json")
    doc = json.loads(first.stdout)
    validate_report_document(doc)
    reports = reports_from_json(first.stdout)
    from depbugs import emit_report
    round_trip = emit_report(reports, "json") == first.stdout
    ok = (first.returncode == 1 and clean.returncode == 0 and first.stdout == second.stdout and round_trip)
    return ok, (f"bugs exit {first.returncode}, clean exit {clean.returncode}, "
                f"deterministic {first.stdout == second.stdout}, round-trip {round_trip}")


CRITERIA = [
    (1, "motivating example", criterion_1),
    (2, "remove-then-restore", criterion_2),
    (3, "Table IV spot fixtures", criterion_3),
    (4, "two-change union", criterion_4),
    (5, "rule-table coverage", criterion_5),
    (6, "oracle equivalence", criterion_6),
    (7, "version comparator", criterion_7),
    (8, "ELF import reader", criterion_8),
    (9, "CLI contract", criterion_9),
]


def _line(num, title, fn):
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported on the same line
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return ok, f"{'PASS' if ok else 'FAIL'} criterion {num} ({title}): {detail}"


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, line = _line(num, title, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [_line(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
