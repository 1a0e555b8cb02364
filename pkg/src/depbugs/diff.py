"""Incompatible changes between adjacent library releases.

``diff_backward(a, b)`` lists what breaks a binary built against ``a`` when it
runs with ``b``. Forward incompatibilities are the backward ones of the
reversed pair, relabelled so removals read as additions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

from .abi import AbiError, AbiSnapshot, LibraryHistory, SymbolDef, TypeDef
from .versions import Version, parse_version

BACKWARD = "backward"
FORWARD = "forward"


class ChangeKind(IntEnum):
    ENUM_ADD_MEMBER = 1
    ENUM_REMOVE_MEMBER = 2
    ENUM_CHANGE_MEMBER_VALUE = 3
    STRUCT_ADD_FIELD = 4
    STRUCT_REMOVE_FIELD = 5
    STRUCT_CHANGE_FIELD_TYPE = 6
    STRUCT_CHANGE_FIELD_ORDER = 7
    VARIABLE_ADD = 8
    VARIABLE_REMOVE = 9
    VARIABLE_CHANGE_TYPE = 10
    FUNCTION_ADD = 11
    FUNCTION_REMOVE = 12
    FUNCTION_ADD_PARAM = 13
    FUNCTION_REMOVE_PARAM = 14
    FUNCTION_CHANGE_PARAM_TYPE = 15
    FUNCTION_ADD_RETURN = 16
    FUNCTION_REMOVE_RETURN = 17
    FUNCTION_CHANGE_RETURN_TYPE = 18

    @property
    def is_add(self) -> bool:
        return self in _ADDS

    @property
    def is_remove(self) -> bool:
        return self in _REMOVE_TO_ADD

    @property
    def is_type_change(self) -> bool:
        return self in (6, 10, 15, 18)

    @property
    def on_data_type(self) -> bool:
        return self <= 7


_REMOVE_TO_ADD = {
    ChangeKind.ENUM_REMOVE_MEMBER: ChangeKind.ENUM_ADD_MEMBER,
    ChangeKind.STRUCT_REMOVE_FIELD: ChangeKind.STRUCT_ADD_FIELD,
    ChangeKind.VARIABLE_REMOVE: ChangeKind.VARIABLE_ADD,
    ChangeKind.FUNCTION_REMOVE: ChangeKind.FUNCTION_ADD,
    ChangeKind.FUNCTION_REMOVE_PARAM: ChangeKind.FUNCTION_ADD_PARAM,
    ChangeKind.FUNCTION_REMOVE_RETURN: ChangeKind.FUNCTION_ADD_RETURN,
}
_ADDS = frozenset(_REMOVE_TO_ADD.values())


@dataclass(frozen=True, order=True)
class SymbolRef:
    name: str
    tag: str | None = None

    def __str__(self):
        return self.name if self.tag is None else f"{self.name}@{self.tag}"


@dataclass(frozen=True, order=True)
class MemberRef:
    type_name: str
    member: str | None = None

    def __str__(self):
        return self.type_name if self.member is None else f"{self.type_name}::{self.member}"


ElementRef = SymbolRef | MemberRef


@dataclass(frozen=True)
class IncompatibleChange:
    """One classified change. ``old``/``new`` hold the element's text at v_old/v_new."""

    library: str
    v_old: Version
    v_new: Version
    kind: ChangeKind
    element: SymbolRef | MemberRef
    direction: str
    old: str | None = None
    new: str | None = None
    index: int | None = None
    type_kind: str | None = None

    def sort_key(self):
        el = self.element
        el_key = (0, el.name, el.tag or "") if isinstance(el, SymbolRef) else (1, el.type_name, el.member or "")
        return (self.v_old.key, self.v_new.key, int(self.kind), el_key,
                -1 if self.index is None else self.index, self.direction)

    def versions(self) -> str:
        return f"<{self.v_old}, {self.v_new}>"


def _symbol_changes(a: SymbolDef, b: SymbolDef | None, emit):
    """Changes seen by a binary built against ``a`` when ``b`` is loaded instead."""
    if b is None or b.kind != a.kind:
        emit(ChangeKind.FUNCTION_REMOVE if a.is_function else ChangeKind.VARIABLE_REMOVE,
             old=a.display(), new=None)
        return
    if not a.is_function:
        if a.var_type != b.var_type:
            emit(ChangeKind.VARIABLE_CHANGE_TYPE, old=a.var_type, new=b.var_type)
        return
    for i, (pa, pb) in enumerate(zip(a.params, b.params)):
        if pa != pb:
            emit(ChangeKind.FUNCTION_CHANGE_PARAM_TYPE, old=pa, new=pb, index=i)
    for i in range(len(b.params), len(a.params)):
        emit(ChangeKind.FUNCTION_REMOVE_PARAM, old=a.params[i], new=None, index=i)
    if a.ret is not None:
        if b.ret is None:
            emit(ChangeKind.FUNCTION_REMOVE_RETURN, old=a.ret, new="void")
        elif a.ret != b.ret:
            emit(ChangeKind.FUNCTION_CHANGE_RETURN_TYPE, old=a.ret, new=b.ret)


def _family(t: TypeDef) -> str:
    return "enum" if t.is_enum else "record"


def _type_changes(a: TypeDef, b: TypeDef | None, emit):
    if b is not None and _family(a) != _family(b):
        b = None
    for m in a.members:
        other = b.member(m.name) if b is not None else None
        if a.is_enum:
            if other is None:
                emit(m.name, ChangeKind.ENUM_REMOVE_MEMBER, old=str(m.value), new=None)
            elif other.value != m.value:
                emit(m.name, ChangeKind.ENUM_CHANGE_MEMBER_VALUE, old=str(m.value), new=str(other.value))
            continue
        if other is None:
            emit(m.name, ChangeKind.STRUCT_REMOVE_FIELD, old=m.type, new=None)
            continue
        if other.type != m.type:
            emit(m.name, ChangeKind.STRUCT_CHANGE_FIELD_TYPE, old=m.type, new=other.type)
        if other.ordinal != m.ordinal:
            emit(m.name, ChangeKind.STRUCT_CHANGE_FIELD_ORDER, old=str(m.ordinal), new=str(other.ordinal))


def _backward(a: AbiSnapshot, b: AbiSnapshot, element=None) -> list[IncompatibleChange]:
    out: list[IncompatibleChange] = []

    for key, sym in a.symbols.items():
        ref = SymbolRef(*key)
        if element is not None and ref != element:
            continue

        def emit(kind, old=None, new=None, index=None, ref=ref):
            out.append(IncompatibleChange(a.library, a.version, b.version, kind, ref, BACKWARD,
                                          old, new, index))

        _symbol_changes(sym, b.symbols.get(key), emit)

    for name, t in a.types.items():
        if element is not None and (not isinstance(element, MemberRef) or element.type_name != name):
            continue

        def emit(member, kind, old=None, new=None, name=name, t=t):
            ref = MemberRef(name, member)
            if element is not None and ref != element:
                return
            out.append(IncompatibleChange(a.library, a.version, b.version, kind, ref, BACKWARD,
                                          old, new, type_kind=t.kind))

        _type_changes(t, b.types.get(name), emit)
    return out


def _check_pair(a: AbiSnapshot, b: AbiSnapshot):
    if a.library != b.library:
        raise AbiError(f"cannot diff {a.library!r} against {b.library!r}")


def diff_backward(a: AbiSnapshot, b: AbiSnapshot, element=None) -> list[IncompatibleChange]:
    """Backward-incompatible changes from ``a`` to ``b``, optionally restricted to one element."""
    _check_pair(a, b)
    return sorted(_backward(a, b, element), key=IncompatibleChange.sort_key)


def diff_forward(a: AbiSnapshot, b: AbiSnapshot, element=None) -> list[IncompatibleChange]:
    _check_pair(a, b)
    out = []
    for ic in _backward(b, a, element):
        out.append(replace(
            ic,
            v_old=a.version,
            v_new=b.version,
            kind=_REMOVE_TO_ADD.get(ic.kind, ic.kind),
            direction=FORWARD,
            old=ic.new,
            new=ic.old,
        ))
    return sorted(out, key=IncompatibleChange.sort_key)


def diff(a: AbiSnapshot, b: AbiSnapshot, direction: str = "both") -> list[IncompatibleChange]:
    if direction == BACKWARD:
        return diff_backward(a, b)
    if direction == FORWARD:
        return diff_forward(a, b)
    if direction != "both":
        raise ValueError(f"unknown direction {direction!r}")
    return sorted(diff_backward(a, b) + diff_forward(a, b), key=IncompatibleChange.sort_key)


def collect_incompatible_changes(h: LibraryHistory) -> list[IncompatibleChange]:
    """All changes over adjacent release pairs that share a soname."""
    out = []
    for a, b in zip(h.releases, h.releases[1:]):
        if a.soname != b.soname:
            continue
        out.extend(diff(a, b))
    return out


def element_bbc(src: AbiSnapshot, dst: AbiSnapshot, element) -> bool:
    """Whether ``element`` breaks backward compatibility going from ``src`` to ``dst``."""
    return bool(_backward(src, dst, element))


_TYPE_WORD = {"enum": "enum", "struct": "struct", "union": "union", "class": "class"}


def describe_change(ic: IncompatibleChange) -> str:
    """Human phrasing of a change, e.g. ``struct sqlite3_module adds xSavepoint``."""
    k, el = ic.kind, ic.element
    if isinstance(el, MemberRef):
        tw = f"{_TYPE_WORD.get(ic.type_kind or '', 'type')} {el.type_name}"
        return {
            ChangeKind.ENUM_ADD_MEMBER: f"{tw} adds {el.member}",
            ChangeKind.ENUM_REMOVE_MEMBER: f"{tw} removes {el.member}",
            ChangeKind.ENUM_CHANGE_MEMBER_VALUE: f"{tw} changes value of {el.member} from {ic.old} to {ic.new}",
            ChangeKind.STRUCT_ADD_FIELD: f"{tw} adds {el.member}",
            ChangeKind.STRUCT_REMOVE_FIELD: f"{tw} removes {el.member}",
            ChangeKind.STRUCT_CHANGE_FIELD_TYPE: f"{tw} changes type of {el.member} from {ic.old} to {ic.new}",
            ChangeKind.STRUCT_CHANGE_FIELD_ORDER: f"{tw} moves {el.member} from position {ic.old} to {ic.new}",
        }[k]
    sym = str(el)
    return {
        ChangeKind.VARIABLE_ADD: f"Add variable {sym}",
        ChangeKind.VARIABLE_REMOVE: f"Remove variable {sym}",
        ChangeKind.VARIABLE_CHANGE_TYPE: f"{sym} changes type from {ic.old} to {ic.new}",
        ChangeKind.FUNCTION_ADD: f"Add {sym}",
        ChangeKind.FUNCTION_REMOVE: f"Remove {sym}",
        ChangeKind.FUNCTION_ADD_PARAM: f"{sym}() adds parameter {ic.new}",
        ChangeKind.FUNCTION_REMOVE_PARAM: f"{sym}() removes parameter {ic.old}",
        ChangeKind.FUNCTION_CHANGE_PARAM_TYPE: f"{sym}() changes para type from {ic.old} to {ic.new}",
        ChangeKind.FUNCTION_ADD_RETURN: f"{sym} adds return value",
        ChangeKind.FUNCTION_REMOVE_RETURN: f"{sym} removes return value",
        ChangeKind.FUNCTION_CHANGE_RETURN_TYPE: f"{sym} changes return value from {ic.old} to {ic.new}",
    }[k]


def change_to_dict(ic: IncompatibleChange) -> dict:
    el = ic.element
    if isinstance(el, SymbolRef):
        element = {"symbol": el.name, "version_tag": el.tag}
    else:
        element = {"type": el.type_name, "member": el.member}
    return {
        "library": ic.library,
        "v_old": str(ic.v_old),
        "v_new": str(ic.v_new),
        "kind": int(ic.kind),
        "kind_name": ic.kind.name.lower(),
        "element": element,
        "direction": ic.direction,
        "old": ic.old,
        "new": ic.new,
        "index": ic.index,
        "type_kind": ic.type_kind,
        "description": describe_change(ic),
    }


def change_from_dict(d: dict) -> IncompatibleChange:
    el = d["element"]
    element = SymbolRef(el["symbol"], el["version_tag"]) if "symbol" in el else MemberRef(el["type"], el["member"])
    return IncompatibleChange(
        d["library"], parse_version(d["v_old"]), parse_version(d["v_new"]), ChangeKind(d["kind"]),
        element, d["direction"], d["old"], d["new"], d["index"], d["type_kind"],
    )
