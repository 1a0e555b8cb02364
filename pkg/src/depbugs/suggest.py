"""Expand a detected bug version to every release that shares its view of the changed element."""

from __future__ import annotations

from typing import Iterable

from .abi import LibraryHistory
from .diff import IncompatibleChange, element_bbc
from .versions import IntervalSet, Version, VersionRange


def is_incompatible_version(h: LibraryHistory, v_bug: Version, v_i: Version, element) -> bool:
    """``v_i`` is incompatible when the element breaks in neither direction against ``v_bug``."""
    a, b = h.snapshot(v_bug), h.snapshot(v_i)
    return not element_bbc(a, b, element) and not element_bbc(b, a, element)


def suggest_incompatible_versions(
    h: LibraryHistory, ic: IncompatibleChange, v_bug: Version, required: VersionRange
) -> IntervalSet:
    """Releases in ``v_bug``'s soname group, inside ``required``, equivalent to ``v_bug`` on ``ic.element``."""
    group = {s.version for s in h.group_of(v_bug)}
    members = [
        s.version
        for s in h.releases
        if s.version in group
        and required.contains(s.version)
        and is_incompatible_version(h, v_bug, s.version, ic.element)
    ]
    return IntervalSet.from_members(members, h.versions, h.group_ids())


def union_over_changes(sets: Iterable[IntervalSet], h: LibraryHistory | None = None) -> IntervalSet:
    """Union of per-change sets; with a history, runs that touch in release order are joined."""
    sets = list(sets)
    merged = IntervalSet().union(*sets)
    if h is None:
        return merged
    return IntervalSet.from_members(merged.members(h.versions), h.versions, h.group_ids())
