"""Freeze the version-comparison corpus.

Each pair is ordered with ``dpkg --compare-versions`` and cross-checked with
python-debian; the script refuses to write if the two references disagree.
"""

import json
import os
import subprocess

from debian.debian_support import version_compare

HERE = os.path.dirname(os.path.abspath(__file__))

PAIRS = [
    ("1.0", "1.0"), ("1.0", "1.1"), ("1.2", "1.10"), ("1.09", "1.9"), ("1.0", "1.0.0"),
    ("1.0~rc1", "1.0"), ("1.0~~", "1.0~"), ("1.0~", "1.0~a"), ("1.0~rc1", "1.0~rc2"), ("2.0~beta", "2.0~alpha"),
    ("1:1.0", "2.0"), ("1:1.0", "0:1.0"), ("0:1.0", "1.0"), ("2:0.1", "1:9.9"), ("10:1", "9:1"),
    ("1.0-1", "1.0-2"), ("1.0-1", "1.0-1ubuntu1"), ("1.0-1ubuntu1", "1.0-1ubuntu2"), ("1.0-1~bpo1", "1.0-1"),
    ("1.0-0", "1.0"), ("1.0a", "1.0"), ("1.0a", "1.0b"), ("1.0+dfsg", "1.0"), ("1.0+dfsg", "1.0.1"),
    ("1.0.", "1.0"), ("a", "b"), ("1a", "1."), ("1+", "1."), ("1.0", "1a"),
    ("2.37.6", "2.39.1"), ("3.7.6.3", "3.7.7"), ("1.2.5.1", "1.2.5.2"), ("1.2.6.1", "1.2.7"),
    ("5.12.2", "5.14.0"), ("0.7.0b-1.1", "0.7.0-1.1"), ("1:4.2.7.1", "4.2.7.1"), ("1.00001", "1.1"),
    ("1.2.3-4.5", "1.2.3-4.10"), ("20191010", "2019.10.10"), ("1.0~rc1-1", "1.0-1"), ("1.0+1", "1.0+a"),
    ("7.0", "6.7"), ("8.35", "8.4"), ("1.1.9", "1.2.1"), ("2.51.0", "2.52.0"), ("1.0000", "1.0"),
    ("1.0.0~~a", "1.0.0~"), ("9", "10"), ("1.0-a", "1.0-+"),
]


def dpkg_cmp(a, b):
    for op, val in (("lt", -1), ("eq", 0), ("gt", 1)):
        if subprocess.run(["dpkg", "--compare-versions", a, op, b]).returncode == 0:
            return val
    raise RuntimeError(f"dpkg could not order {a} {b}")


def main():
    rows = []
    for a, b in PAIRS:
        d = dpkg_cmp(a, b)
        p = version_compare(a, b)
        p = (p > 0) - (p < 0)
        if d != p:
            raise SystemExit(f"reference disagreement on {a!r} vs {b!r}: dpkg {d}, python-debian {p}")
        rows.append({"a": a, "b": b, "cmp": d})
    with open(os.path.join(HERE, "corpus.json"), "w") as fh:
        json.dump(rows, fh, indent=1)
        fh.write("\n")
    print(f"{len(rows)} pairs frozen")


if __name__ == "__main__":
    main()
