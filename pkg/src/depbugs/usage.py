"""How an application uses a library: imported symbols plus source-level usage facts."""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from typing import Iterable

from .abi import normalize_type
from .diff import MemberRef, SymbolRef
from .versions import Version, VersionError, parse_version


class UsageError(ValueError):
    pass


FACT_KINDS = {
    "uses_enum_member": ("type", "member"),
    "uses_field": ("type", "field"),
    "field_type_hint": ("type", "field", "type_text"),
    "var_type_hint": ("symbol", "type_text"),
    "calls": ("symbol", "arity"),
    "uses_param": ("symbol", "index"),
    "param_type_hint": ("symbol", "index", "type_text"),
    "uses_return_value": ("symbol",),
    "return_type_hint": ("symbol", "type_text"),
}


@dataclass(frozen=True, order=True)
class Fact:
    """One usage fact. ``target`` is a symbol name or a data-type name, ``member``
    a field or enum member; unused slots stay ``None``."""

    fact: str
    target: str
    member: str | None = None
    index: int | None = None
    arity: int | None = None
    type_text: str | None = None

    def __post_init__(self):
        if self.fact not in FACT_KINDS:
            raise UsageError(f"unknown fact kind {self.fact!r}")
        if self.type_text is not None:
            object.__setattr__(self, "type_text", normalize_type(self.type_text))

    def to_dict(self) -> dict:
        d = {"fact": self.fact}
        for name in FACT_KINDS[self.fact]:
            if name in ("type", "symbol"):
                d[name] = self.target
            elif name in ("member", "field"):
                d[name] = self.member
            else:
                d[name] = getattr(self, name)
        return d

    @classmethod
    def from_dict(cls, d: dict, where: str = "fact") -> "Fact":
        kind = d.get("fact")
        if kind not in FACT_KINDS:
            raise UsageError(f"{where}: unknown fact kind {kind!r}")
        vals = {}
        for name in FACT_KINDS[kind]:
            if name not in d:
                raise UsageError(f"{where}: {kind} needs field {name!r}")
            vals[name] = d[name]
        for name in ("arity", "index"):
            if name in vals and (not isinstance(vals[name], int) or isinstance(vals[name], bool) or vals[name] < 0):
                raise UsageError(f"{where}: {name} must be a non-negative integer")
        for name in ("type", "symbol", "member", "field", "type_text"):
            if name in vals and not isinstance(vals[name], str):
                raise UsageError(f"{where}: {name} must be text")
        return cls(
            kind,
            vals.get("type", vals.get("symbol")),
            member=vals.get("member", vals.get("field")),
            index=vals.get("index"),
            arity=vals.get("arity"),
            type_text=vals.get("type_text"),
        )


def uses_enum_member(type_name, member):
    return Fact("uses_enum_member", type_name, member=member)


def uses_field(type_name, field_name):
    return Fact("uses_field", type_name, member=field_name)


def field_type_hint(type_name, field_name, type_text):
    return Fact("field_type_hint", type_name, member=field_name, type_text=type_text)


def var_type_hint(symbol, type_text):
    return Fact("var_type_hint", symbol, type_text=type_text)


def calls(symbol, arity):
    return Fact("calls", symbol, arity=arity)


def uses_param(symbol, index):
    return Fact("uses_param", symbol, index=index)


def param_type_hint(symbol, index, type_text):
    return Fact("param_type_hint", symbol, index=index, type_text=type_text)


def uses_return_value(symbol):
    return Fact("uses_return_value", symbol)


def return_type_hint(symbol, type_text):
    return Fact("return_type_hint", symbol, type_text=type_text)


@dataclass(frozen=True)
class AppUsage:
    app: str
    version: Version
    imports: frozenset = frozenset()
    facts: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "imports", frozenset(self.imports))
        object.__setattr__(self, "facts", frozenset(self.facts))
        arity = {}
        for f in self.facts:
            if f.fact == "calls":
                arity[f.target] = max(arity.get(f.target, 0), f.arity)
        for f in self.facts:
            if f.fact in ("uses_param", "param_type_hint") and f.target in arity and f.index >= arity[f.target]:
                raise UsageError(
                    f"{self.app}: {f.fact}({f.target}, {f.index}) exceeds call arity {arity[f.target]}"
                )

    def find(self, kind: str, target: str, **match) -> list[Fact]:
        return [
            f for f in self.facts
            if f.fact == kind and f.target == target and all(getattr(f, k) == v for k, v in match.items())
        ]

    def has(self, kind: str, target: str, **match) -> bool:
        return bool(self.find(kind, target, **match))

    def max_arity(self, symbol: str) -> int | None:
        arities = [f.arity for f in self.find("calls", symbol)]
        return max(arities) if arities else None

    def merge(self, other: "AppUsage") -> "AppUsage":
        return AppUsage(self.app, self.version, self.imports | other.imports, self.facts | other.facts)

    def to_dict(self) -> dict:
        return {
            "app": self.app,
            "version": str(self.version),
            "imports": [{"name": n, "version_tag": t} for n, t in sorted(self.imports, key=lambda x: (x[0], x[1] or ""))],
            "facts": [f.to_dict() for f in sorted(self.facts)],
        }


def usage_from_dict(data: dict, source: str = "<usage>") -> AppUsage:
    if not isinstance(data, dict):
        raise UsageError(f"{source}: top level must be an object")
    for key in ("app", "version"):
        if not isinstance(data.get(key), str):
            raise UsageError(f"{source}: missing or non-text field {key!r}")
    try:
        version = parse_version(data["version"])
    except VersionError as exc:
        raise UsageError(f"{source}: {exc}") from None
    imports = set()
    for i, imp in enumerate(data.get("imports", [])):
        if not isinstance(imp, dict) or not isinstance(imp.get("name"), str):
            raise UsageError(f"{source}: imports[{i}] needs a name")
        tag = imp.get("version_tag")
        if tag is not None and not isinstance(tag, str):
            raise UsageError(f"{source}: imports[{i}] version_tag must be text or null")
        imports.add((imp["name"], tag))
    facts = set()
    for i, raw in enumerate(data.get("facts", [])):
        if not isinstance(raw, dict):
            raise UsageError(f"{source}: facts[{i}] must be an object")
        facts.add(Fact.from_dict(raw, f"{source}: facts[{i}]"))
    try:
        return AppUsage(data["app"], version, frozenset(imports), frozenset(facts))
    except UsageError as exc:
        raise UsageError(f"{source}: {exc}") from None


def load_usage_facts(path) -> AppUsage:
    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON: {exc}") from None
    return usage_from_dict(data, path)


# --- heuristic source scanning -------------------------------------------

_COMMENT_RE = re.compile(r"//[^\n]*|/\*.*?\*/", re.S)
_STRING_RE = re.compile(r'"(?:\\.|[^"\\\n])*"|\'(?:\\.|[^\'\\\n])*\'')
_IDENT = r"[A-Za-z_]\w*"
_TYPE_WORDS = r"(?:(?:const|volatile|unsigned|signed|struct|union|enum|long|short)\s+)*"
_DECL_RE = re.compile(
    rf"(?:^|[;{{}}(,])\s*(?:static\s+|extern\s+)?(?P<type>{_TYPE_WORDS}{_IDENT}(?:\s*\*+\s*|\s+)(?:const\s+)?)"
    rf"(?P<var>{_IDENT})\s*(?=[=;,)\[])"
)
_ASSIGN_DECL_RE = re.compile(
    rf"^\s*(?:static\s+|extern\s+)?(?P<type>{_TYPE_WORDS}{_IDENT}(?:\s*\*+\s*|\s+))(?P<var>{_IDENT})\s*=\s*$"
)
_NOT_TYPES = {"return", "else", "case", "goto", "sizeof", "typedef", "do"}
_CONTROL = {"if", "while", "for", "switch"}


def _strip(source: str) -> str:
    def blank(m):
        return re.sub(r"[^\n]", " ", m.group(0))

    src = _COMMENT_RE.sub(blank, source)
    src = _STRING_RE.sub(lambda m: '""' + " " * (len(m.group(0)) - 2), src)
    return re.sub(r"^[ \t]*#[^\n]*", blank, src, flags=re.M)


def _match_paren(text: str, open_at: int) -> int:
    depth = 0
    for i in range(open_at, len(text)):
        c = text[i]
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
            if depth == 0:
                return i
    return -1


def _split_args(inner: str) -> list[str]:
    if not inner.strip():
        return []
    args, depth, cur = [], 0, []
    for c in inner:
        if c in "([{":
            depth += 1
        elif c in ")]}":
            depth -= 1
        if c == "," and depth == 0:
            args.append("".join(cur))
            cur = []
        else:
            cur.append(c)
    args.append("".join(cur))
    return [a.strip() for a in args]


def _statement_start(text: str, pos: int) -> int:
    depth = 0
    i = pos - 1
    while i >= 0:
        c = text[i]
        if c == ")":
            depth += 1
        elif c == "(" and depth:
            depth -= 1
        elif c in ";{}" and depth == 0:
            return i + 1
        i -= 1
    return 0


def _paren_depth(text: str, start: int, pos: int) -> int:
    depth = 0
    for c in text[start:pos]:
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
    return depth


def _word_before(text: str, pos: int) -> str:
    m = re.search(rf"({_IDENT})\s*$", text[:pos])
    return m.group(1) if m else ""


def _matching_open(text: str, close: int) -> int:
    depth = 0
    for j in range(close, -1, -1):
        if text[j] == ")":
            depth += 1
        elif text[j] == "(":
            depth -= 1
            if depth == 0:
                return j
    return -1


def _result_used(text: str, name_at: int) -> bool:
    """Whether the value of the call starting at ``name_at`` is consumed."""
    i = name_at - 1
    while i >= 0 and text[i].isspace():
        i -= 1
    if i < 0 or text[i] in ";{}":
        return False
    if text[i] == ":":
        start = _statement_start(text, name_at)
        return "?" in text[start:name_at]
    if text[i] == ")":
        j = _matching_open(text, i)
        if j < 0 or _word_before(text, j) in _CONTROL:
            return False
        return text[j + 1:i].strip() != "void"
    if text[i] == ",":
        start = _statement_start(text, name_at)
        return _paren_depth(text, start, name_at) > 0
    return _word_before(text, i + 1) not in ("else", "do")


def _declared_vars(text: str) -> dict[str, str]:
    out = {}
    for m in _DECL_RE.finditer(text):
        typ = m.group("type").strip()
        first = typ.split()[0]
        if first in _NOT_TYPES or first in _CONTROL:
            continue
        out[m.group("var")] = normalize_type(typ)
    return out


def scan_source_usage(source: str, interest: Iterable) -> set[Fact]:
    """Best-effort usage facts for the elements in ``interest`` found in C-like ``source``.

    Never raises on odd input; unrecognised constructs simply produce no facts.
    """
    interest = set(interest)
    symbols = {e.name for e in interest if isinstance(e, SymbolRef)}
    members: dict[str, set] = {}
    for e in interest:
        if isinstance(e, MemberRef):
            members.setdefault(e.type_name, set())
            if e.member is not None:
                members[e.type_name].add(e.member)
    facts: set[Fact] = set()
    try:
        text = _strip(source)
    except Exception:
        return facts
    decls = _declared_vars(text)

    for name in symbols:
        for m in re.finditer(rf"\b{re.escape(name)}\b", text):
            j = m.end()
            while j < len(text) and text[j].isspace():
                j += 1
            if j < len(text) and text[j] == "(":
                close = _match_paren(text, j)
                if close < 0:
                    continue
                if _is_definition(text, m.start(), close):
                    continue
                args = _split_args(text[j + 1:close])
                facts.add(calls(name, len(args)))
                for idx, arg in enumerate(args):
                    facts.add(uses_param(name, idx))
                    if re.fullmatch(_IDENT, arg) and arg in decls:
                        facts.add(param_type_hint(name, idx, decls[arg]))
                if _result_used(text, m.start()):
                    facts.add(uses_return_value(name))
                    start = _statement_start(text, m.start())
                    dm = _ASSIGN_DECL_RE.match(text[start:m.start()])
                    if dm and dm.group("type").split()[0] not in _NOT_TYPES:
                        facts.add(return_type_hint(name, dm.group("type")))
            else:
                ext = re.search(rf"extern\s+(?P<type>[^;(){{}}]+?)\s*\b{re.escape(name)}\s*;\s*$",
                                text[:j + 1])
                if ext and j < len(text) and text[j] == ";":
                    facts.add(var_type_hint(name, ext.group("type")))

    for tname, wanted in members.items():
        typed_vars = {v for v, t in decls.items() if _names_type(t, tname)}
        for var in typed_vars:
            for m in re.finditer(rf"\b{re.escape(var)}\s*(?:\.|->)\s*({_IDENT})", text):
                if m.group(1) in wanted:
                    facts.add(uses_field(tname, m.group(1)))
        for m in re.finditer(rf"\b{re.escape(tname)}\b[^;{{]*?=\s*\{{", text):
            close = _match_brace(text, m.end() - 1)
            body = text[m.end():close]
            for fm in re.finditer(rf"\.\s*({_IDENT})\s*=", body):
                if fm.group(1) in wanted:
                    facts.add(uses_field(tname, fm.group(1)))
        for member in wanted:
            if re.search(rf"(?<![.>\w]){re.escape(member)}\b", text):
                facts.add(uses_enum_member(tname, member))
    return facts


def _names_type(type_text: str, tname: str) -> bool:
    words = re.sub(r"[*&]", " ", type_text).split()
    return tname in words


def _match_brace(text: str, open_at: int) -> int:
    depth = 0
    for i in range(open_at, len(text)):
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                return i
    return len(text)


def _is_definition(text: str, name_at: int, close: int) -> bool:
    # ``int foo(int a) {`` or a prototype ``int foo(int a);`` at statement level
    after = text[close + 1:close + 40].lstrip()
    before = _word_before(text, name_at)
    return bool(before) and before not in _NOT_TYPES and (after.startswith("{") or after.startswith(";"))
