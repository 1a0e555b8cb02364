"""Declarative ABI snapshots: one library release's exported symbols and data types.

A snapshot file is JSON::

    {"library": "glib", "version": "2.39.1", "soname": "libglib-2.0.so.0",
     "symbols": [{"name": "g_hash_table_replace", "version_tag": null,
                  "default": false, "kind": "function",
                  "return": null, "params": ["GHashTable*", "gpointer", "gpointer"],
                  "var_type": null}],
     "types": [{"name": "GFlags", "kind": "enum",
                "members": [{"name": "G_A", "value": 0, "type": null}]}],
     "opaque": ["GHashTable", "gpointer"]}

``opaque`` optionally lists type names that signatures may reference without
a definition. C builtin scalar types never need declaring.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from typing import Iterator

from .versions import Version, VersionError, parse_version


class AbiError(ValueError):
    """Schema or invariant violation in a snapshot or history file."""


class DuplicateSymbolError(AbiError):
    pass


BUILTIN_TYPES = frozenset(
    """void char short int long float double signed unsigned bool _Bool
    size_t ssize_t ptrdiff_t intptr_t uintptr_t off_t wchar_t
    int8_t int16_t int32_t int64_t uint8_t uint16_t uint32_t uint64_t""".split()
)

_QUALIFIERS = {"const", "volatile", "struct", "union", "enum", "class", "restrict"}


def normalize_type(text: str | None) -> str:
    """Canonical spelling of a type reference: collapsed spaces, no spaces around ``*``/``&``.

    >>> normalize_type("long  *")
    'long*'
    >>> normalize_type(None)
    'void'
    """
    if text is None:
        return "void"
    t = " ".join(text.split())
    t = re.sub(r"\s*([*&])\s*", r"\1", t)
    return t or "void"


def base_type_name(ref: str) -> str:
    """Strip qualifiers, pointers, references and array suffixes from a type reference."""
    t = re.sub(r"\[[^\]]*\]", " ", ref)
    t = t.replace("*", " ").replace("&", " ")
    words = [w for w in t.split() if w not in _QUALIFIERS]
    return " ".join(words)


def is_void(ref: str | None) -> bool:
    return ref is None or normalize_type(ref) == "void"


def _is_builtin(base: str) -> bool:
    return bool(base) and all(w in BUILTIN_TYPES for w in base.split())


@dataclass(frozen=True)
class SymbolDef:
    name: str
    version_tag: str | None = None
    default: bool = False
    kind: str = "function"
    ret: str | None = None
    params: tuple[str, ...] = ()
    var_type: str | None = None

    @property
    def key(self) -> tuple[str, str | None]:
        return (self.name, self.version_tag)

    @property
    def is_function(self) -> bool:
        return self.kind == "function"

    def type_refs(self) -> list[str]:
        if self.is_function:
            refs = list(self.params)
            if not is_void(self.ret):
                refs.append(self.ret)
            return refs
        return [self.var_type]

    def display(self) -> str:
        if self.version_tag is None:
            return self.name
        return f"{self.name}{'@@' if self.default else '@'}{self.version_tag}"


@dataclass(frozen=True)
class Member:
    name: str
    ordinal: int
    value: int | None = None
    type: str | None = None


@dataclass(frozen=True)
class TypeDef:
    name: str
    kind: str
    members: tuple[Member, ...] = ()

    @property
    def is_enum(self) -> bool:
        return self.kind == "enum"

    def member(self, name: str) -> Member | None:
        for m in self.members:
            if m.name == name:
                return m
        return None


@dataclass(frozen=True)
class AbiSnapshot:
    library: str
    version: Version
    soname: str
    symbols: dict = field(default_factory=dict)
    types: dict = field(default_factory=dict)
    opaque: frozenset = frozenset()

    def __eq__(self, other):
        if not isinstance(other, AbiSnapshot):
            return NotImplemented
        return (
            self.library == other.library
            and str(self.version) == str(other.version)
            and self.soname == other.soname
            and self.symbols == other.symbols
            and self.types == other.types
            and self.opaque == other.opaque
        )

    __hash__ = None

    def find_symbol(self, name: str, tag: str | None) -> SymbolDef | None:
        """Resolve an import the way the dynamic linker would.

        An unversioned reference binds to an unversioned definition or to the
        default (``@@``) version; a versioned reference needs the exact tag.
        """
        if tag is not None:
            return self.symbols.get((name, tag))
        exact = self.symbols.get((name, None))
        if exact is not None:
            return exact
        for sym in self.symbols.values():
            if sym.name == name and sym.default:
                return sym
        return None


def import_matches(name: str, tag: str | None, sym: SymbolDef) -> bool:
    if sym.name != name:
        return False
    if tag is None:
        return sym.version_tag is None or sym.default
    return sym.version_tag == tag


def symbols_using_type(s: AbiSnapshot, type_name: str) -> set[tuple[str, str | None]]:
    """Keys of symbols whose signature references ``type_name`` directly."""
    if type_name not in s.types:
        raise AbiError(f"{s.library} {s.version}: unknown type {type_name!r}")
    return {
        key
        for key, sym in s.symbols.items()
        if any(base_type_name(ref) == type_name for ref in sym.type_refs())
    }


def _req(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise AbiError(f"{where}: missing field {key!r}")
    val = obj[key]
    if not isinstance(val, kind):
        raise AbiError(f"{where}: field {key!r} has wrong type {type(val).__name__}")
    return val


def _opt(obj: dict, key: str, kind, where: str, default=None):
    val = obj.get(key, default)
    if val is not None and not isinstance(val, kind):
        raise AbiError(f"{where}: field {key!r} has wrong type {type(val).__name__}")
    return val


def snapshot_from_dict(data: dict, source: str = "<snapshot>") -> AbiSnapshot:
    if not isinstance(data, dict):
        raise AbiError(f"{source}: top level must be an object")
    library = _req(data, "library", str, source)
    try:
        version = parse_version(_req(data, "version", str, source))
    except VersionError as exc:
        raise AbiError(f"{source}: {exc}") from None
    soname = _req(data, "soname", str, source)
    opaque = frozenset(_opt(data, "opaque", list, source, []))

    symbols: dict = {}
    defaults: dict = {}
    for i, raw in enumerate(_opt(data, "symbols", list, source, [])):
        where = f"{source}: symbols[{i}]"
        if not isinstance(raw, dict):
            raise AbiError(f"{where}: must be an object")
        name = _req(raw, "name", str, where)
        tag = _opt(raw, "version_tag", str, where)
        default = bool(_opt(raw, "default", bool, where, False))
        kind = _req(raw, "kind", str, where)
        if default and tag is None:
            raise AbiError(f"{where}: default version flag on unversioned symbol {name!r}")
        if kind == "function":
            if raw.get("var_type") is not None:
                raise AbiError(f"{where}: function {name!r} carries var_type")
            params = _opt(raw, "params", list, where, [])
            if not all(isinstance(p, str) for p in params):
                raise AbiError(f"{where}: params must be strings")
            ret = _opt(raw, "return", str, where)
            sym = SymbolDef(name, tag, default, kind, None if is_void(ret) else normalize_type(ret),
                            tuple(normalize_type(p) for p in params))
        elif kind == "variable":
            if raw.get("return") is not None or raw.get("params"):
                raise AbiError(f"{where}: variable {name!r} carries a function signature")
            var_type = _req(raw, "var_type", str, where)
            sym = SymbolDef(name, tag, default, kind, var_type=normalize_type(var_type))
        else:
            raise AbiError(f"{where}: unknown symbol kind {kind!r}")
        if sym.key in symbols:
            raise DuplicateSymbolError(f"{where}: duplicate symbol key {sym.display()}")
        if default:
            if name in defaults:
                raise AbiError(f"{where}: second default version for {name!r}")
            defaults[name] = tag
        symbols[sym.key] = sym

    types: dict = {}
    for i, raw in enumerate(_opt(data, "types", list, source, [])):
        where = f"{source}: types[{i}]"
        if not isinstance(raw, dict):
            raise AbiError(f"{where}: must be an object")
        tname = _req(raw, "name", str, where)
        tkind = _req(raw, "kind", str, where)
        if tkind not in ("enum", "struct", "union", "class"):
            raise AbiError(f"{where}: unknown type kind {tkind!r}")
        if tname in types:
            raise AbiError(f"{where}: duplicate type {tname!r}")
        members = []
        seen = set()
        for j, m in enumerate(_opt(raw, "members", list, where, [])):
            mwhere = f"{where}.members[{j}]"
            mname = _req(m, "name", str, mwhere)
            if mname in seen:
                raise AbiError(f"{mwhere}: duplicate member {mname!r}")
            seen.add(mname)
            if tkind == "enum":
                value = m.get("value")
                if not isinstance(value, int) or isinstance(value, bool):
                    raise AbiError(f"{mwhere}: enum member needs an integer value")
                members.append(Member(mname, j, value=value))
            else:
                mtype = _req(m, "type", str, mwhere)
                members.append(Member(mname, j, type=normalize_type(mtype)))
        types[tname] = TypeDef(tname, tkind, tuple(members))

    for key, sym in symbols.items():
        for ref in sym.type_refs():
            base = base_type_name(ref)
            if not (base in types or base in opaque or _is_builtin(base)):
                raise AbiError(f"{source}: symbol {sym.display()} references undeclared type {base!r}")

    return AbiSnapshot(library, version, soname, symbols, types, opaque)


def snapshot_to_dict(s: AbiSnapshot) -> dict:
    symbols = []
    for key in sorted(s.symbols, key=lambda k: (k[0], k[1] or "")):
        sym = s.symbols[key]
        symbols.append({
            "name": sym.name,
            "version_tag": sym.version_tag,
            "default": sym.default,
            "kind": sym.kind,
            "return": sym.ret if sym.is_function else None,
            "params": list(sym.params),
            "var_type": sym.var_type,
        })
    types = []
    for name in sorted(s.types):
        t = s.types[name]
        types.append({
            "name": t.name,
            "kind": t.kind,
            "members": [{"name": m.name, "value": m.value, "type": m.type} for m in t.members],
        })
    return {
        "library": s.library,
        "version": str(s.version),
        "soname": s.soname,
        "symbols": symbols,
        "types": types,
        "opaque": sorted(s.opaque),
    }


def load_snapshot(path) -> AbiSnapshot:
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise AbiError(f"{path}: invalid JSON: {exc}") from None
    return snapshot_from_dict(data, path)


@dataclass(frozen=True)
class LibraryHistory:
    """Releases of one library in release order (as listed by the manifest)."""

    library: str
    releases: tuple[AbiSnapshot, ...]

    def __post_init__(self):
        for prev, cur in zip(self.releases, self.releases[1:]):
            if not prev.version < cur.version:
                raise AbiError(f"{self.library}: release {cur.version} does not follow {prev.version}")
        for s in self.releases:
            if s.library != self.library:
                raise AbiError(f"{self.library}: release {s.version} belongs to {s.library!r}")

    def __len__(self):
        return len(self.releases)

    def __iter__(self) -> Iterator[AbiSnapshot]:
        return iter(self.releases)

    @property
    def versions(self) -> list[Version]:
        return [s.version for s in self.releases]

    def index(self, v: Version) -> int:
        for i, s in enumerate(self.releases):
            if s.version == v:
                return i
        raise KeyError(f"{self.library} has no release {v}")

    def snapshot(self, v: Version) -> AbiSnapshot:
        return self.releases[self.index(v)]

    def group_ids(self) -> list[int]:
        """Soname-group id per release; a new group starts whenever the soname changes."""
        ids, gid = [], 0
        for i, s in enumerate(self.releases):
            if i and s.soname != self.releases[i - 1].soname:
                gid += 1
            ids.append(gid)
        return ids

    def group_of(self, v: Version) -> list[AbiSnapshot]:
        ids = self.group_ids()
        gid = ids[self.index(v)]
        return [s for s, g in zip(self.releases, ids) if g == gid]


def load_history(path) -> LibraryHistory:
    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AbiError(f"{path}: invalid JSON: {exc}") from None
    library = _req(data, "library", str, path)
    releases = _req(data, "releases", list, path)
    base = os.path.dirname(path)
    snaps = tuple(load_snapshot(os.path.join(base, rel)) for rel in releases)
    return LibraryHistory(library, snaps)
