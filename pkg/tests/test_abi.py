import json

import pytest

from depbugs.abi import (
    AbiError,
    DuplicateSymbolError,
    LibraryHistory,
    base_type_name,
    import_matches,
    load_history,
    load_snapshot,
    normalize_type,
    snapshot_from_dict,
    snapshot_to_dict,
    symbols_using_type,
)

from kit import fn, fx, record, snap, var


def test_glib_fixture_void_return():
    s = load_snapshot(fx("glib", "2.39.1.json"))
    sym = s.find_symbol("g_hash_table_replace", None)
    assert sym.is_function and sym.ret is None
    assert load_snapshot(fx("glib", "2.39.2.json")).find_symbol("g_hash_table_replace", None).ret == "gboolean"


def test_empty_snapshot_is_valid():
    s = snapshot_from_dict({"library": "l", "version": "1.0", "soname": "l.so.1", "symbols": [], "types": []})
    assert s.symbols == {} and s.types == {}


def _doc(symbols, types=()):
    return {"library": "l", "version": "1.0", "soname": "l.so.1", "symbols": symbols, "types": list(types)}


def test_two_defaults_rejected():
    with pytest.raises(AbiError, match="second default"):
        snapshot_from_dict(_doc([fn("f", tag="V1", default=True), fn("f", tag="V2", default=True)]))


def test_duplicate_key_is_distinct_error():
    with pytest.raises(DuplicateSymbolError):
        snapshot_from_dict(_doc([fn("f"), fn("f")]))
    # same name, different tags: two distinct symbols
    s = snapshot_from_dict(_doc([fn("f", tag="V1"), fn("f", tag="V2", default=True)]))
    assert len(s.symbols) == 2


@pytest.mark.parametrize("bad,msg", [
    ([{"name": "f", "kind": "function", "var_type": "int"}], "var_type"),
    ([{"name": "v", "kind": "variable", "var_type": "int", "params": ["int"]}], "signature"),
    ([{"name": "v", "kind": "variable"}], "var_type"),
    ([{"name": "f", "kind": "macro"}], "kind"),
    ([fn("f", default=True)], "unversioned"),
    ([fn("f", "struct nothere*")], "undeclared type"),
    ([{"kind": "function"}], "name"),
])
def test_schema_violations_point_at_entry(bad, msg):
    with pytest.raises(AbiError, match=msg) as exc:
        snapshot_from_dict(_doc(bad), "snap.json")
    assert "symbols[0]" in str(exc.value) or "snap.json" in str(exc.value)


def test_type_violations():
    with pytest.raises(AbiError, match="duplicate member"):
        snapshot_from_dict(_doc([], [record("T", [("a", "int"), ("a", "int")])]))
    with pytest.raises(AbiError, match="integer value"):
        snapshot_from_dict(_doc([], [{"name": "E", "kind": "enum", "members": [{"name": "A"}]}]))
    with pytest.raises(AbiError, match="type kind"):
        snapshot_from_dict(_doc([], [{"name": "E", "kind": "typedef", "members": []}]))


def test_opaque_types_satisfy_references():
    s = snapshot_from_dict({**_doc([fn("f", "GHashTable*")]), "opaque": ["GHashTable"]})
    assert "GHashTable" in s.opaque


def test_members_carry_ordinals():
    s = snap("1.0", types=[record("T", [("a", "int"), ("b", "char *")])])
    t = s.types["T"]
    assert [(m.name, m.ordinal, m.type) for m in t.members] == [("a", 0, "int"), ("b", 1, "char*")]


@pytest.mark.parametrize("text,norm", [
    ("long *", "long*"), ("const  char * *", "const char**"), (None, "void"), ("  int ", "int"),
    ("const QSignalSpyCallbackSet &", "const QSignalSpyCallbackSet&"),
])
def test_normalize_type(text, norm):
    assert normalize_type(text) == norm


def test_base_type_name():
    assert base_type_name("const struct sqlite3_module*") == "sqlite3_module"
    assert base_type_name("unsigned int[4]") == "unsigned int"


def test_reserialize_round_trip():
    for path in (fx("sqlite", "3.7.7.json"), fx("alsa", "1.2.1.json"), fx("glib", "2.39.2.json")):
        s = load_snapshot(path)
        again = snapshot_from_dict(json.loads(json.dumps(snapshot_to_dict(s))))
        assert again == s


def test_symbols_using_type():
    s = load_snapshot(fx("sqlite", "3.7.6.3.json"))
    assert symbols_using_type(s, "sqlite3_module") == {("sqlite3_create_module", None)}
    plain = snap("1.0", [fn("f")], [record("T", [("a", "int")])])
    assert symbols_using_type(plain, "T") == set()
    with pytest.raises(AbiError):
        symbols_using_type(plain, "Nope")


def test_symbols_using_type_includes_variables_and_is_direct_only():
    s = snap("1.0", [var("g_mod", "T"), fn("f", None, ["T*"]), fn("h", None, ["U*"]), fn("k", "T")],
             [record("T", [("a", "int")]), record("U", [("t", "T")])])
    # brute force over every symbol signature
    expected = {key for key, sym in s.symbols.items() if any(base_type_name(r) == "T" for r in sym.type_refs())}
    assert symbols_using_type(s, "T") == expected == {("g_mod", None), ("f", None), ("k", None)}
    assert symbols_using_type(s, "T") <= set(s.symbols)


def test_import_matching_rule():
    s = snap("1.0", [fn("snd_tplg_new", tag="ALSA_1.2.1", default=True), fn("snd_tplg_new", tag="ALSA_0.9"),
                     fn("plain")])
    assert s.find_symbol("snd_tplg_new", None).version_tag == "ALSA_1.2.1"
    assert s.find_symbol("snd_tplg_new", "ALSA_0.9").version_tag == "ALSA_0.9"
    assert s.find_symbol("snd_tplg_new", "ALSA_2.0") is None
    assert s.find_symbol("plain", None) is not None
    assert s.find_symbol("plain", "V1") is None
    hidden = snap("1.0", [fn("old", tag="V1")])
    assert hidden.find_symbol("old", None) is None
    assert import_matches("old", "V1", hidden.symbols[("old", "V1")])


def test_history_validation(tmp_path):
    a, b = snap("1.0"), snap("2.0")
    assert LibraryHistory("libx", (a, b)).versions == [a.version, b.version]
    with pytest.raises(AbiError, match="does not follow"):
        LibraryHistory("libx", (b, a))
    with pytest.raises(AbiError, match="belongs to"):
        LibraryHistory("liby", (a,))


def test_groups_follow_soname():
    h = LibraryHistory("libx", (snap("1.0"), snap("1.1"), snap("2.0", soname="libx.so.2"), snap("2.1", soname="libx.so.2")))
    assert h.group_ids() == [0, 0, 1, 1]
    assert [str(s.version) for s in h.group_of(h.versions[2])] == ["2.0", "2.1"]


def test_load_history_relative_paths():
    h = load_history(fx("glib", "history.json"))
    assert [str(v) for v in h.versions] == ["2.37.3", "2.37.6", "2.39.1", "2.39.2"]


def test_load_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(AbiError, match="invalid JSON"):
        load_snapshot(p)
    with pytest.raises(AbiError, match="invalid JSON"):
        load_history(p)
