"""Brute-force ground truth: check every usage fact directly against every release.

Nothing here looks at diffs. ``generate_instance`` builds random histories and
usages for property tests of the detection pipeline.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .abi import AbiSnapshot, LibraryHistory, Member, SymbolDef, TypeDef, normalize_type
from .usage import AppUsage, Fact
from .versions import Version, VersionRange


@dataclass(frozen=True, order=True)
class LinkFailure:
    reason: str
    target: str


def _resolve(app: AppUsage, s: AbiSnapshot, name: str) -> SymbolDef | None:
    tags = [t for n, t in app.imports if n == name]
    for tag in sorted(tags, key=lambda t: (t is not None, t or "")):
        sym = s.find_symbol(name, tag)
        if sym is not None:
            return sym
    if not tags:
        return s.find_symbol(name, None)
    return None


def simulate_link(app: AppUsage, s: AbiSnapshot) -> list[LinkFailure]:
    fails = set()
    for name, tag in app.imports:
        if s.find_symbol(name, tag) is None:
            fails.add(LinkFailure("missing symbol", name if tag is None else f"{name}@{tag}"))

    for f in app.facts:
        if f.fact in ("uses_field", "uses_enum_member", "field_type_hint"):
            t = s.types.get(f.target)
            m = t.member(f.member) if t is not None else None
            if m is None:
                fails.add(LinkFailure(f"{f.fact} on absent member", f"{f.target}::{f.member}"))
            elif f.fact == "field_type_hint" and m.type != f.type_text:
                fails.add(LinkFailure("field type mismatch", f"{f.target}::{f.member}"))
            continue
        sym = _resolve(app, s, f.target)
        if sym is None:
            continue
        if f.fact == "var_type_hint":
            if sym.is_function or sym.var_type != f.type_text:
                fails.add(LinkFailure("variable type mismatch", f.target))
        elif not sym.is_function:
            fails.add(LinkFailure("variable used as function", f.target))
        elif f.fact == "uses_return_value":
            if sym.ret is None:
                fails.add(LinkFailure("return value of void function used", f.target))
        elif f.fact == "return_type_hint":
            if normalize_type(sym.ret) != f.type_text:
                fails.add(LinkFailure("return type mismatch", f.target))
        elif f.fact == "calls":
            if f.arity > len(sym.params):
                fails.add(LinkFailure("too many arguments", f.target))
        elif f.fact == "uses_param":
            if f.index >= len(sym.params):
                fails.add(LinkFailure("parameter does not exist", f"{f.target}#{f.index}"))
        elif f.fact == "param_type_hint":
            if f.index < len(sym.params) and sym.params[f.index] != f.type_text:
                fails.add(LinkFailure("parameter type mismatch", f"{f.target}#{f.index}"))
    return sorted(fails)


def oracle_incompatible_versions(app: AppUsage, required: VersionRange, h: LibraryHistory) -> set[Version]:
    return {s.version for s in h.releases if required.contains(s.version) and simulate_link(app, s)}


# --- random instances ---------------------------------------------------------

FAMILIES = (
    "fn_exist", "var_exist", "var_type", "fn_return", "fn_return_type",
    "fn_param_count", "fn_param_type", "enum_member", "field_exist", "field_type",
)
_TYPES = ("int", "long", "char*", "double", "unsigned int*")


@dataclass
class _Element:
    family: str
    name: str
    states: list
    tag: str | None
    import_tag: str | None
    alt: tuple
    used: bool


def _toggles(rng: random.Random, n: int) -> list[int]:
    cur = rng.randint(0, 1)
    out = []
    for _ in range(n):
        if rng.random() < 0.35:
            cur ^= 1
        out.append(cur)
    return out


def generate_instance(seed: int, max_versions: int = 8, max_elements: int = 10):
    """Random (history, usage) pair whose changes all fall in decidable rule rows.

    Each element varies in exactly one aspect between two values and the usage
    is derived from one reference release, so every change the application can
    observe is decidable. Returns ``(history, app, reference_version)``.
    """
    rng = random.Random(seed)
    n = rng.randint(2, max_versions)
    versions = [Version(f"1.{i}") for i in range(n)]
    elements: list[_Element] = []
    budget = rng.randint(1, max_elements)
    i = 0
    while budget > 0:
        fam = rng.choice(FAMILIES)
        cost = 2 if fam in ("enum_member", "field_exist", "field_type") else 1
        if cost > budget:
            fam, cost = rng.choice(FAMILIES[:7]), 1
        tag = rng.choice([None, None, "LIB_1.0"])
        import_tag = rng.choice([None, tag]) if tag else None
        a, b = rng.sample(_TYPES, 2)
        elements.append(_Element(fam, f"e{i}", _toggles(rng, n), tag, import_tag, (a, b), rng.random() < 0.85))
        budget -= cost
        i += 1

    ref = rng.randrange(n)
    snaps = []
    for vi, v in enumerate(versions):
        symbols, types = {}, {}
        for el in elements:
            st = el.states[vi]
            a, b = el.alt
            sym = None
            fam = el.family
            if fam == "fn_exist" and st:
                sym = SymbolDef(el.name, el.tag, el.tag is not None, "function", normalize_type(a), (normalize_type(b),))
            elif fam == "var_exist" and st:
                sym = SymbolDef(el.name, el.tag, el.tag is not None, "variable", var_type=normalize_type(a))
            elif fam == "var_type":
                sym = SymbolDef(el.name, el.tag, el.tag is not None, "variable", var_type=normalize_type(el.alt[st]))
            elif fam == "fn_return":
                sym = SymbolDef(el.name, el.tag, el.tag is not None, "function", normalize_type(a) if st else None, ("int",))
            elif fam == "fn_return_type":
                sym = SymbolDef(el.name, el.tag, el.tag is not None, "function", normalize_type(el.alt[st]), ("int",))
            elif fam == "fn_param_count":
                params = ("int", normalize_type(a)) + ((normalize_type(b),) if st else ())
                sym = SymbolDef(el.name, el.tag, el.tag is not None, "function", None, params)
            elif fam == "fn_param_type":
                sym = SymbolDef(el.name, el.tag, el.tag is not None, "function", "int",
                                ("int", normalize_type(el.alt[st])))
            elif fam == "enum_member":
                members = [Member("K0", 0, value=0)] + ([Member(f"{el.name}_M", 1, value=7)] if st else [])
                types[f"T{el.name}"] = TypeDef(f"T{el.name}", "enum", tuple(members))
            elif fam in ("field_exist", "field_type"):
                kind = ("struct", "union", "class")[int(el.name[1:]) % 3]
                members = [Member("base", 0, type="int")]
                if fam == "field_type":
                    members.append(Member("f", 1, type=normalize_type(el.alt[st])))
                elif st:
                    members.append(Member("f", 1, type=normalize_type(a)))
                types[f"T{el.name}"] = TypeDef(f"T{el.name}", kind, tuple(members))
            if fam in ("enum_member", "field_exist", "field_type"):
                anchor = f"use_{el.name}"
                sym = SymbolDef(anchor, el.tag, el.tag is not None, "function", None, (f"T{el.name}*",))
            if sym is not None:
                symbols[sym.key] = sym
        snaps.append(AbiSnapshot("libgen", v, "libgen.so.1", symbols, types))
    h = LibraryHistory("libgen", tuple(snaps))
    app = usage_from_reference(elements, snaps[ref])
    return h, app, versions[ref]


def usage_from_reference(elements, s: AbiSnapshot) -> AppUsage:
    imports, facts = set(), set()
    for el in elements:
        if not el.used:
            continue
        if el.family in ("enum_member", "field_exist", "field_type"):
            name = f"use_{el.name}"
        else:
            name = el.name
        sym = s.find_symbol(name, el.import_tag)
        if sym is None:
            continue
        imports.add((name, el.import_tag))
        if sym.is_function:
            facts.add(Fact("calls", name, arity=len(sym.params)))
            for idx, p in enumerate(sym.params):
                facts.add(Fact("uses_param", name, index=idx))
                facts.add(Fact("param_type_hint", name, index=idx, type_text=p))
            if sym.ret is not None:
                facts.add(Fact("uses_return_value", name))
                facts.add(Fact("return_type_hint", name, type_text=sym.ret))
        else:
            facts.add(Fact("var_type_hint", name, type_text=sym.var_type))
        tname = f"T{el.name}"
        t = s.types.get(tname)
        if t is None:
            continue
        for m in t.members:
            if t.is_enum:
                facts.add(Fact("uses_enum_member", tname, member=m.name))
            else:
                facts.add(Fact("uses_field", tname, member=m.name))
                facts.add(Fact("field_type_hint", tname, member=m.name, type_text=m.type))
    return AppUsage("genapp", Version("1.0"), frozenset(imports), frozenset(facts))
