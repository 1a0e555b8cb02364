"""Repository scan: manifests in, one report per (application, library) pair out."""

from __future__ import annotations

import json
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import jsonschema

from .abi import AbiError, LibraryHistory, load_history
from .detect import detect
from .diff import IncompatibleChange, SymbolRef, change_from_dict, change_to_dict, collect_incompatible_changes, describe_change
from .elf import ElfError, read_elf_imports_file
from .suggest import suggest_incompatible_versions, union_over_changes
from .usage import AppUsage, UsageError, load_usage_facts, scan_source_usage
from .versions import (
    Interval,
    IntervalSet,
    Version,
    VersionError,
    VersionRange,
    merge_depends,
    parse_depends,
    parse_range,
    parse_version,
)


class ManifestError(ValueError):
    """The repository manifest itself is unusable; the scan aborts."""


@dataclass(frozen=True)
class LibraryBinding:
    package: str
    library: str
    history: str


@dataclass(frozen=True)
class AppPackage:
    name: str
    version: Version
    depends: dict
    usage: str | None = None
    binaries: tuple = ()
    sources: tuple = ()


@dataclass(frozen=True)
class RepoManifest:
    packages: tuple
    libraries: tuple
    path: str = ""


@dataclass(frozen=True)
class Finding:
    change: IncompatibleChange
    bug_version: Version
    incompatible: IntervalSet


@dataclass(frozen=True)
class ChangeWarning:
    change: IncompatibleChange
    reason: str


@dataclass
class DepBugReport:
    app: str
    app_version: Version
    library_package: str
    library: str
    required: VersionRange
    findings: list = field(default_factory=list)
    incompatible: IntervalSet = field(default_factory=IntervalSet)
    warnings: list = field(default_factory=list)
    error: str | None = None
    releases: tuple = ()

    @property
    def has_bugs(self) -> bool:
        return bool(self.findings)


# --- single pair -------------------------------------------------------------


def check_dependency(
    app: AppUsage,
    required: VersionRange,
    h: LibraryHistory,
    library_package: str = "",
    changes: list | None = None,
) -> DepBugReport:
    """Collect, detect, suggest and union for one (library, application) pair."""
    if changes is None:
        changes = collect_incompatible_changes(h)
    report = DepBugReport(app.app, app.version, library_package or h.library, h.library, required,
                          releases=tuple(h.versions))
    sets = []
    # type, value and order changes appear once per direction with identical content
    seen = set()
    for ic in changes:
        mirror = (ic.v_old, ic.v_new, ic.kind, ic.element, ic.index, ic.old, ic.new)
        if mirror in seen:
            continue
        seen.add(mirror)
        out = detect(app, required, ic, h)
        if out.undecidable:
            report.warnings.append(ChangeWarning(ic, out.reason))
        for v_bug in (out.bug_old, out.bug_new):
            if v_bug is None:
                continue
            iv = suggest_incompatible_versions(h, ic, v_bug, required)
            report.findings.append(Finding(ic, v_bug, iv))
            sets.append(iv)
    report.incompatible = union_over_changes(sets, h)
    return report


# --- manifest ------------------------------------------------------------------


def _resolve(base: str, rel: str) -> str:
    return rel if os.path.isabs(rel) else os.path.normpath(os.path.join(base, rel))


def _str_list(obj, key, where) -> tuple:
    val = obj.get(key, [])
    if not isinstance(val, list) or not all(isinstance(x, str) for x in val):
        raise ManifestError(f"{where}: {key!r} must be a list of paths")
    return tuple(val)


def manifest_from_dict(data: dict, base: str = ".", source: str = "<manifest>") -> RepoManifest:
    if not isinstance(data, dict):
        raise ManifestError(f"{source}: top level must be an object")
    libs, seen_libs = [], set()
    for i, raw in enumerate(data.get("libraries", [])):
        where = f"{source}: libraries[{i}]"
        if not isinstance(raw, dict) or not all(isinstance(raw.get(k), str) for k in ("package", "library", "history")):
            raise ManifestError(f"{where}: needs text fields package, library, history")
        if raw["package"] in seen_libs:
            raise ManifestError(f"{where}: duplicate binding for package {raw['package']!r}")
        seen_libs.add(raw["package"])
        hist = _resolve(base, raw["history"])
        if not os.path.isfile(hist):
            raise ManifestError(f"{where}: history file {raw['history']!r} not found")
        libs.append(LibraryBinding(raw["package"], raw["library"], hist))
    pkgs, seen = [], set()
    for i, raw in enumerate(data.get("packages", [])):
        where = f"{source}: packages[{i}]"
        if not isinstance(raw, dict) or not isinstance(raw.get("name"), str):
            raise ManifestError(f"{where}: needs a text name")
        name = raw["name"]
        if name in seen:
            raise ManifestError(f"{where}: duplicate package {name!r}")
        seen.add(name)
        try:
            version = parse_version(str(raw.get("version", "0")))
            depends = merge_depends(parse_depends(raw.get("depends", "")))
        except VersionError as exc:
            raise ManifestError(f"{where} ({name}): {exc}") from None
        usage = raw.get("usage")
        if usage is not None and not isinstance(usage, str):
            raise ManifestError(f"{where}: usage must be a path")
        pkgs.append(AppPackage(
            name, version, depends,
            _resolve(base, usage) if usage else None,
            tuple(_resolve(base, p) for p in _str_list(raw, "binaries", where)),
            tuple(_resolve(base, p) for p in _str_list(raw, "sources", where)),
        ))
    return RepoManifest(tuple(pkgs), tuple(libs), source)


def load_manifest(path) -> RepoManifest:
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"{path}: {exc}") from None
    return manifest_from_dict(data, os.path.dirname(os.path.abspath(path)), path)


def build_usage(pkg: AppPackage, interest=()) -> AppUsage:
    """Union of declared facts, binary imports and source-scan facts for one package.

    A symbol named by a source-scan fact counts as an unversioned import.
    """
    usage = AppUsage(pkg.name, pkg.version)
    if pkg.usage:
        usage = usage.merge(load_usage_facts(pkg.usage))
    imports = set()
    for path in pkg.binaries:
        imports |= read_elf_imports_file(path)
    facts = set()
    if pkg.sources:
        symbols = {e.name for e in interest if isinstance(e, SymbolRef)}
        for path in pkg.sources:
            with open(path, encoding="utf-8", errors="replace") as fh:
                facts |= scan_source_usage(fh.read(), interest)
        imports |= {(f.target, None) for f in facts if f.target in symbols}
    return usage.merge(AppUsage(pkg.name, pkg.version, frozenset(imports), frozenset(facts)))


class _Cache:
    """Read-only per-path cache shared by worker threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self._data = {}

    def get(self, key, make):
        with self._lock:
            if key not in self._data:
                self._data[key] = _Lazy(make)
            lazy = self._data[key]
        return lazy.value()


class _Lazy:
    def __init__(self, make):
        self._make = make
        self._lock = threading.Lock()
        self._done = False
        self._val = self._exc = None

    def value(self):
        with self._lock:
            if not self._done:
                try:
                    self._val = self._make()
                except Exception as exc:
                    self._exc = exc
                self._done = True
        if self._exc is not None:
            raise self._exc
        return self._val


def _scan_pair(pkg: AppPackage, lib: LibraryBinding, cache: _Cache) -> DepBugReport:
    required = pkg.depends[lib.package]
    try:
        h = cache.get(("history", lib.history), lambda: load_history(lib.history))
        changes = cache.get(("changes", lib.history), lambda: collect_incompatible_changes(h))
        interest = {ic.element for ic in changes}
        usage = build_usage(pkg, interest)
        return check_dependency(usage, required, h, lib.package, changes)
    except (AbiError, UsageError, ElfError, VersionError, OSError, KeyError) as exc:
        return DepBugReport(pkg.name, pkg.version, lib.package, lib.library, required, error=str(exc))


def scan(manifest: RepoManifest, jobs: int = 1) -> list[DepBugReport]:
    """Reports for every pair with a bug, an undecidable change or a load error, sorted by (app, library)."""
    pairs = [(p, lib) for p in manifest.packages for lib in manifest.libraries if lib.package in p.depends]
    cache = _Cache()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(lambda pl: _scan_pair(*pl, cache), pairs))
    else:
        reports = [_scan_pair(p, lib, cache) for p, lib in pairs]
    reports = [r for r in reports if r.findings or r.warnings or r.error]
    return sorted(reports, key=lambda r: (r.app, r.library, r.library_package))


# --- output --------------------------------------------------------------------

_INTERVAL = {
    "type": "object",
    "required": ["lo", "hi", "lo_version", "hi_version"],
    "properties": {
        "lo": {"type": "string"},
        "hi": {"type": "string"},
        "lo_version": {"type": "string"},
        "hi_version": {"type": "string"},
    },
    "additionalProperties": False,
}

_CHANGE = {
    "type": "object",
    "required": ["library", "v_old", "v_new", "kind", "element", "direction", "description"],
    "properties": {
        "kind": {"type": "integer", "minimum": 1, "maximum": 18},
        "element": {
            "oneOf": [
                {"type": "object", "required": ["symbol", "version_tag"]},
                {"type": "object", "required": ["type", "member"]},
            ]
        },
        "direction": {"enum": ["backward", "forward"]},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["reports"],
    "properties": {
        "reports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["app", "app_version", "library_package", "library", "required",
                             "findings", "incompatible", "warnings", "error"],
                "properties": {
                    "app": {"type": "string"},
                    "app_version": {"type": "string"},
                    "library_package": {"type": "string"},
                    "library": {"type": "string"},
                    "required": {"type": "string"},
                    "findings": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["app", "library", "change", "bug_version", "incompatible"],
                            "properties": {
                                "change": _CHANGE,
                                "bug_version": {"type": "string"},
                                "incompatible": {"type": "array", "items": _INTERVAL},
                            },
                        },
                    },
                    "incompatible": {"type": "array", "items": _INTERVAL},
                    "warnings": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["change", "reason"],
                            "properties": {"change": _CHANGE, "reason": {"type": "string"}},
                        },
                    },
                    "error": {"type": ["string", "null"]},
                },
            },
        }
    },
}


def _intervals_to_json(s: IntervalSet) -> list:
    return [
        {
            "lo": "V_init" if iv.open_lo else str(iv.lo),
            "hi": "V_last" if iv.open_hi else str(iv.hi),
            "lo_version": str(iv.lo),
            "hi_version": str(iv.hi),
        }
        for iv in s
    ]


def _intervals_from_json(items: list) -> IntervalSet:
    return IntervalSet(tuple(
        Interval(parse_version(d["lo_version"]), parse_version(d["hi_version"]), d["lo"] == "V_init", d["hi"] == "V_last")
        for d in items
    ))


def report_to_dict(r: DepBugReport) -> dict:
    return {
        "app": r.app,
        "app_version": str(r.app_version),
        "library_package": r.library_package,
        "library": r.library,
        "required": str(r.required),
        "findings": [
            {
                "app": r.app,
                "library": r.library,
                "change": change_to_dict(f.change),
                "bug_version": str(f.bug_version),
                "incompatible": _intervals_to_json(f.incompatible),
            }
            for f in r.findings
        ],
        "incompatible": _intervals_to_json(r.incompatible),
        "warnings": [{"change": change_to_dict(w.change), "reason": w.reason} for w in r.warnings],
        "error": r.error,
    }


def report_from_dict(d: dict) -> DepBugReport:
    return DepBugReport(
        d["app"],
        parse_version(d["app_version"]),
        d["library_package"],
        d["library"],
        parse_range(d["required"]),
        [Finding(change_from_dict(f["change"]), parse_version(f["bug_version"]), _intervals_from_json(f["incompatible"]))
         for f in d["findings"]],
        _intervals_from_json(d["incompatible"]),
        [ChangeWarning(change_from_dict(w["change"]), w["reason"]) for w in d["warnings"]],
        d["error"],
    )


def validate_report_document(doc: dict) -> None:
    jsonschema.validate(doc, REPORT_SCHEMA)


def reports_from_json(data: bytes | str) -> list[DepBugReport]:
    doc = json.loads(data)
    validate_report_document(doc)
    return [report_from_dict(d) for d in doc["reports"]]


def _text(reports: list[DepBugReport]) -> str:
    bugs = [r for r in reports if r.findings]
    lines = []
    if not bugs:
        lines.append("no dependency bugs found")
    for r in bugs:
        lines.append(f"{r.app} {r.app_version} -> {r.library_package} ({r.required}): "
                     f"incompatible versions {r.incompatible.render()}")
        for f in r.findings:
            lines.append(f"  {f.change.versions():<24} {describe_change(f.change)}  "
                         f"bug {f.bug_version}  {f.incompatible.render()}")
    for r in reports:
        for w in r.warnings:
            lines.append(f"warning: {r.app} -> {r.library_package}: {w.change.versions()} "
                         f"{describe_change(w.change)}: {w.reason}")
        if r.error:
            lines.append(f"error: {r.app} -> {r.library_package}: {r.error}")
    return "\n".join(lines) + "\n"


def emit_report(reports: list[DepBugReport], fmt: str = "text") -> bytes:
    if fmt == "text":
        return _text(reports).encode("utf-8")
    if fmt in ("json", "structured"):
        doc = {"reports": [report_to_dict(r) for r in reports]}
        return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")
