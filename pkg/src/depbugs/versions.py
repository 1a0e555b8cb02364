"""Debian-style package versions, dependency constraints and version interval sets.

Versions follow the ``[epoch:]upstream[-revision]`` syntax and compare with the
dpkg algorithm: epochs numerically, then upstream and revision by alternating
runs of non-digits (``~`` sorts before everything, including the end of the
string) and digits (numerically).

    >>> parse_version("1:0.9-2") > parse_version("2.0")
    True
    >>> parse_version("1.0~rc1") < parse_version("1.0")
    True
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, total_ordering
from typing import Iterable, Sequence


class VersionError(ValueError):
    """Raised for malformed version strings and dependency lines."""


_UPSTREAM_RE = re.compile(r"^[A-Za-z0-9.+~:\-]+$")
_REVISION_RE = re.compile(r"^[A-Za-z0-9.+~]+$")
_RUN_RE = re.compile(r"(\D*)(\d*)")


def _char_order(c: str) -> int:
    if c == "~":
        return -1
    if c.isalpha():
        return ord(c)
    return ord(c) + 256


def _part_key(text: str) -> tuple:
    # An exhausted string compares as an empty non-digit run followed by 0,
    # so trailing (empty, 0) runs are dropped and one is appended as sentinel.
    runs = []
    for letters, digits in _RUN_RE.findall(text):
        if not letters and not digits:
            continue
        runs.append((tuple(_char_order(c) for c in letters) + (0,), int(digits or 0)))
    sentinel = ((0,), 0)
    while runs and runs[-1] == sentinel:
        runs.pop()
    runs.append(sentinel)
    return tuple(runs)


@total_ordering
@dataclass(frozen=True, eq=False)
class Version:
    """A parsed package version. Equality and ordering follow dpkg semantics."""

    upstream: str
    epoch: int = 0
    revision: str = ""

    @cached_property
    def key(self) -> tuple:
        return (self.epoch, _part_key(self.upstream), _part_key(self.revision))

    def __eq__(self, other):
        if not isinstance(other, Version):
            return NotImplemented
        return self.key == other.key

    def __lt__(self, other):
        if not isinstance(other, Version):
            return NotImplemented
        return self.key < other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        text = self.upstream
        if self.epoch:
            text = f"{self.epoch}:{text}"
        if self.revision:
            text = f"{text}-{self.revision}"
        return text

    def __repr__(self):
        return f"Version({str(self)!r})"


def parse_version(text: str | Version) -> Version:
    if isinstance(text, Version):
        return text
    if not isinstance(text, str):
        raise VersionError(f"version must be text, got {type(text).__name__}")
    s = text.strip()
    if not s:
        raise VersionError("empty version string")
    epoch = 0
    if ":" in s:
        head, rest = s.split(":", 1)
        if not head.isdigit():
            raise VersionError(f"non-numeric epoch {head!r} in {text!r}")
        epoch = int(head)
        s = rest
    revision = ""
    if "-" in s:
        s, revision = s.rsplit("-", 1)
        if not revision or not _REVISION_RE.match(revision):
            raise VersionError(f"invalid revision {revision!r} in {text!r}")
    if not s:
        raise VersionError(f"empty upstream version in {text!r}")
    if not _UPSTREAM_RE.match(s):
        raise VersionError(f"invalid upstream version {s!r} in {text!r}")
    return Version(upstream=s, epoch=epoch, revision=revision)


class Ordering(Enum):
    LT = -1
    EQ = 0
    GT = 1


def compare_versions(a: Version | str, b: Version | str) -> Ordering:
    a, b = parse_version(a), parse_version(b)
    if a.key < b.key:
        return Ordering.LT
    if a.key > b.key:
        return Ordering.GT
    return Ordering.EQ


RELATIONS = ("<<", "<=", "=", ">=", ">>")
_ALIASES = {"<": "<<", ">": ">>"}


@dataclass(frozen=True)
class VersionConstraint:
    relation: str
    bound: Version

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise VersionError(f"unknown relation {self.relation!r}")

    def accepts(self, v: Version) -> bool:
        order = compare_versions(v, self.bound)
        return {
            "<<": order is Ordering.LT,
            "<=": order is not Ordering.GT,
            "=": order is Ordering.EQ,
            ">=": order is not Ordering.LT,
            ">>": order is Ordering.GT,
        }[self.relation]

    def __str__(self):
        return f"{self.relation} {self.bound}"


@dataclass(frozen=True)
class VersionRange:
    """A conjunction of constraints. The empty range accepts every version."""

    constraints: tuple[VersionConstraint, ...] = ()

    def contains(self, v: Version | str) -> bool:
        v = parse_version(v)
        return all(c.accepts(v) for c in self.constraints)

    def __and__(self, other: "VersionRange") -> "VersionRange":
        return VersionRange(self.constraints + other.constraints)

    @property
    def accepts_all(self) -> bool:
        return not self.constraints

    @property
    def has_lower_bound(self) -> bool:
        return any(c.relation in (">=", ">>", "=") for c in self.constraints)

    @property
    def has_upper_bound(self) -> bool:
        return any(c.relation in ("<=", "<<", "=") for c in self.constraints)

    def __str__(self):
        return ", ".join(str(c) for c in self.constraints) or "*"


def range_contains(r: VersionRange, v: Version | str) -> bool:
    return r.contains(v)


_CONSTRAINT_RE = re.compile(r"^\s*(<<|<=|>=|>>|=|<|>)\s*(\S+)\s*$")


def parse_constraint(text: str) -> VersionConstraint:
    m = _CONSTRAINT_RE.match(text)
    if not m:
        raise VersionError(f"malformed constraint {text!r}")
    rel = _ALIASES.get(m.group(1), m.group(1))
    return VersionConstraint(rel, parse_version(m.group(2)))


def parse_range(text: str) -> VersionRange:
    """Parse ``">= 1.0, << 2.0"`` (comma-separated conjunction); blank accepts all."""
    text = text.strip()
    if text in ("", "*"):
        return VersionRange()
    return VersionRange(tuple(parse_constraint(part) for part in text.split(",")))


_ENTRY_RE = re.compile(r"^([A-Za-z0-9][A-Za-z0-9.+\-]*)(?::[A-Za-z0-9\-]+)?\s*(?:\((.*)\))?$")


def parse_depends(line: str) -> list[tuple[str, VersionRange]]:
    """Parse a control-file style ``Depends`` line.

    >>> parse_depends("zlib1g, libglib2.0-0 (>= 2.37.6)")[1][1].constraints[0].relation
    '>='
    """
    out = []
    if not line.strip():
        return out
    for i, raw in enumerate(line.split(",")):
        entry = raw.strip()
        if entry.count("(") != entry.count(")") or entry.count("(") > 1:
            raise VersionError(f"entry {i}: unbalanced parentheses in {entry!r}")
        m = _ENTRY_RE.match(entry)
        if not m:
            raise VersionError(f"entry {i}: cannot parse {entry!r}")
        name, constraint = m.group(1), m.group(2)
        if constraint is None:
            out.append((name, VersionRange()))
            continue
        try:
            out.append((name, VersionRange((parse_constraint(constraint),))))
        except VersionError as exc:
            raise VersionError(f"entry {i}: {exc}") from None
    return out


def merge_depends(pairs: Iterable[tuple[str, VersionRange]]) -> dict[str, VersionRange]:
    """Fold repeated package entries into one conjunctive range per name."""
    merged: dict[str, VersionRange] = {}
    for name, rng in pairs:
        merged[name] = merged[name] & rng if name in merged else rng
    return merged


@dataclass(frozen=True)
class Interval:
    """Closed interval of released versions.

    ``open_lo``/``open_hi`` mark endpoints that coincide with the first/last
    release of their soname group; they render as ``V_init``/``V_last``.
    """

    lo: Version
    hi: Version
    open_lo: bool = False
    open_hi: bool = False

    def __post_init__(self):
        if self.hi < self.lo:
            raise VersionError(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, v: Version) -> bool:
        return self.lo <= v <= self.hi

    def render(self) -> str:
        lo = "V_init" if self.open_lo else str(self.lo)
        hi = "V_last" if self.open_hi else str(self.hi)
        if lo == hi:
            return f"[{lo}]"
        return f"[{lo}, {hi}]"


@dataclass(frozen=True)
class IntervalSet:
    intervals: tuple[Interval, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "intervals", _merge(self.intervals))

    @classmethod
    def from_members(
        cls,
        members: Iterable[Version],
        releases: Sequence[Version],
        groups: Sequence[int] | None = None,
    ) -> "IntervalSet":
        """Group ``members`` into maximal runs over the release order.

        ``groups`` assigns a soname-group id to each release; runs never cross
        a group boundary and endpoints at a group edge are marked open.
        """
        members = set(members)
        if groups is None:
            groups = [0] * len(releases)
        intervals = []
        start = None
        for i, v in enumerate(releases):
            inside = v in members
            if inside and start is None:
                start = i
            nxt_breaks = i + 1 == len(releases) or groups[i + 1] != groups[i] or releases[i + 1] not in members
            if start is not None and nxt_breaks:
                first = start == 0 or groups[start - 1] != groups[start]
                last = i + 1 == len(releases) or groups[i + 1] != groups[i]
                intervals.append(Interval(releases[start], v, first, last))
                start = None
        return cls(tuple(intervals))

    def union(self, *others: "IntervalSet") -> "IntervalSet":
        ivs = list(self.intervals)
        for o in others:
            ivs.extend(o.intervals)
        return IntervalSet(tuple(ivs))

    def normalize(self) -> "IntervalSet":
        return IntervalSet(self.intervals)

    def contains(self, v: Version | str) -> bool:
        v = parse_version(v)
        return any(iv.contains(v) for iv in self.intervals)

    def members(self, releases: Iterable[Version]) -> list[Version]:
        return [v for v in releases if self.contains(v)]

    def bounds(self) -> list[tuple[str, str]]:
        return [(str(iv.lo), str(iv.hi)) for iv in self.intervals]

    def render(self) -> str:
        return "∪".join(iv.render() for iv in self.intervals) if self.intervals else "{}"

    def __bool__(self):
        return bool(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)


def _merge(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    ivs = sorted(intervals, key=lambda iv: (iv.lo, iv.hi))
    out: list[Interval] = []
    for iv in ivs:
        if out and iv.lo <= out[-1].hi:
            cur = out[-1]
            if iv.hi > cur.hi:
                out[-1] = Interval(cur.lo, iv.hi, cur.open_lo, iv.open_hi)
            elif iv.hi == cur.hi:
                out[-1] = Interval(cur.lo, cur.hi, cur.open_lo, cur.open_hi or iv.open_hi)
            if iv.lo == cur.lo and iv.open_lo and not out[-1].open_lo:
                out[-1] = Interval(out[-1].lo, out[-1].hi, True, out[-1].open_hi)
        else:
            out.append(iv)
    return tuple(out)
