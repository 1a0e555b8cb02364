"""Per-(application, change) detection: filtering, then the 18-row rule table."""

from __future__ import annotations

from dataclasses import dataclass

from .abi import AbiSnapshot, LibraryHistory, import_matches, symbols_using_type
from .diff import ChangeKind as K
from .diff import IncompatibleChange, SymbolRef
from .usage import AppUsage
from .versions import Version, VersionRange

UNDECIDABLE_NOTE = "member value or field order cannot be inferred from usage"


@dataclass(frozen=True)
class DetectOutcome:
    bug_old: Version | None = None
    bug_new: Version | None = None
    undecidable: bool = False
    reason: str = ""

    @property
    def bug_version(self) -> Version | None:
        return self.bug_old if self.bug_old is not None else self.bug_new

    @property
    def is_bug(self) -> bool:
        return self.bug_version is not None


def _imports_symbol(app: AppUsage, snaps: list[AbiSnapshot], ref: SymbolRef) -> bool:
    for s in snaps:
        sym = s.symbols.get((ref.name, ref.tag))
        if sym is not None and any(import_matches(n, t, sym) for n, t in app.imports):
            return True
    return False


def _uses_type(app: AppUsage, snaps: list[AbiSnapshot], type_name: str) -> bool:
    for s in snaps:
        if type_name not in s.types:
            continue
        for key in symbols_using_type(s, type_name):
            if _imports_symbol(app, [s], SymbolRef(*key)):
                return True
    return False


def filter_phase(app: AppUsage, required: VersionRange, ic: IncompatibleChange, h: LibraryHistory) -> bool:
    """True when ``ic`` can affect ``app`` at all."""
    if not (required.contains(ic.v_old) or required.contains(ic.v_new)):
        return False
    snaps = [h.snapshot(ic.v_old), h.snapshot(ic.v_new)]
    el = ic.element
    if isinstance(el, SymbolRef):
        return _imports_symbol(app, snaps, el)
    return _uses_type(app, snaps, el.type_name)


def _uses_member(app: AppUsage, ic: IncompatibleChange) -> bool:
    el = ic.element
    if ic.kind in (K.ENUM_ADD_MEMBER, K.ENUM_REMOVE_MEMBER):
        return app.has("uses_enum_member", el.type_name, member=el.member)
    return app.has("uses_field", el.type_name, member=el.member) or \
        app.has("field_type_hint", el.type_name, member=el.member)


def _uses_param(app: AppUsage, name: str, index: int) -> bool:
    arity = app.max_arity(name)
    return app.has("uses_param", name, index=index) or (arity is not None and arity >= index + 1)


def _type_hints(app: AppUsage, ic: IncompatibleChange) -> list[str]:
    el = ic.element
    if ic.kind == K.STRUCT_CHANGE_FIELD_TYPE:
        facts = app.find("field_type_hint", el.type_name, member=el.member)
    elif ic.kind == K.VARIABLE_CHANGE_TYPE:
        facts = app.find("var_type_hint", el.name)
    elif ic.kind == K.FUNCTION_CHANGE_PARAM_TYPE:
        facts = app.find("param_type_hint", el.name, index=ic.index)
    else:
        facts = app.find("return_type_hint", el.name)
    return sorted({f.type_text for f in facts})


def decide_side(ic: IncompatibleChange, app: AppUsage) -> DetectOutcome:
    """Which release of ``ic`` is incompatible with ``app`` (before range gating)."""
    k, el = ic.kind, ic.element
    if k in (K.ENUM_CHANGE_MEMBER_VALUE, K.STRUCT_CHANGE_FIELD_ORDER):
        return DetectOutcome(undecidable=True, reason=UNDECIDABLE_NOTE)
    if k in (K.VARIABLE_ADD, K.FUNCTION_ADD):
        return DetectOutcome(bug_old=ic.v_old, reason="symbol missing in old release")
    if k in (K.VARIABLE_REMOVE, K.FUNCTION_REMOVE):
        return DetectOutcome(bug_new=ic.v_new, reason="symbol missing in new release")
    if k in (K.ENUM_ADD_MEMBER, K.STRUCT_ADD_FIELD, K.ENUM_REMOVE_MEMBER, K.STRUCT_REMOVE_FIELD):
        used = _uses_member(app, ic)
        what = "member"
    elif k in (K.FUNCTION_ADD_PARAM, K.FUNCTION_REMOVE_PARAM):
        used = _uses_param(app, el.name, ic.index)
        what = f"parameter {ic.index}"
    elif k in (K.FUNCTION_ADD_RETURN, K.FUNCTION_REMOVE_RETURN):
        used = app.has("uses_return_value", el.name)
        what = "return value"
    else:
        hints = _type_hints(app, ic)
        if not hints:
            return DetectOutcome(undecidable=True, reason="no type evidence for the changed element")
        if ic.old in hints and ic.new not in hints:
            return DetectOutcome(bug_new=ic.v_new, reason=f"usage matches old type {ic.old}")
        if ic.new in hints and ic.old not in hints:
            return DetectOutcome(bug_old=ic.v_old, reason=f"usage matches new type {ic.new}")
        return DetectOutcome(undecidable=True, reason=f"usage type {', '.join(hints)} matches neither side")
    if not used:
        return DetectOutcome(reason=f"{what} not used")
    if k.is_add:
        return DetectOutcome(bug_old=ic.v_old, reason=f"uses {what} absent in old release")
    return DetectOutcome(bug_new=ic.v_new, reason=f"uses {what} absent in new release")


def detect(app: AppUsage, required: VersionRange, ic: IncompatibleChange, h: LibraryHistory) -> DetectOutcome:
    if not filter_phase(app, required, ic, h):
        return DetectOutcome(reason="filtered")
    out = decide_side(ic, app)
    bug_old = out.bug_old if out.bug_old is not None and required.contains(out.bug_old) else None
    bug_new = out.bug_new if out.bug_new is not None and required.contains(out.bug_new) else None
    if (bug_old, bug_new) != (out.bug_old, out.bug_new):
        return DetectOutcome(bug_old, bug_new, out.undecidable, out.reason + "; outside required range")
    return out
