import dataclasses
import json

import jsonschema
import pytest

from depbugs.diff import describe_change
from depbugs.scan import (
    ManifestError,
    emit_report,
    load_manifest,
    manifest_from_dict,
    report_from_dict,
    report_to_dict,
    reports_from_json,
    scan,
    validate_report_document,
)

from kit import FIXTURES, fx

# (app, library package, rendered incompatible versions) per Table IV row
TABLE_IV = [
    ("alsa-utils", "libasound2", "[1.2.1, V_last]"),
    ("elisa", "libkf5i18n5", "[5.16.0]"),
    ("gammaray", "libqt5core5a", "[5.14.0, V_last]"),
    ("geeqie", "libglib2.0-0", "[V_init, 2.51.0]"),
    ("qgis-providers", "libsqlite3-0", "[3.5.9, 3.7.6.3]"),
    ("rkward", "libkf5coreaddons5", "[5.19.0]"),
    ("unalz", "zlib1g", "[1.2.7, V_last]"),
]


def _rows(reports):
    return [(r.app, r.library_package, r.incompatible.render()) for r in reports]


def test_glib_repo():
    reports = scan(load_manifest(fx("repo_glib.json")))
    assert [(r.app, r.incompatible.bounds()) for r in reports] == [
        ("cockpit", [("2.37.6", "2.39.1")]), ("homebank", [("2.37.3", "2.39.1")])]
    assert all(r.has_bugs and r.error is None for r in reports)


def test_table_iv_repo():
    assert _rows(scan(load_manifest(fx("repo_table4.json")))) == TABLE_IV


def test_table_iv_change_descriptions():
    reports = {r.app: r for r in scan(load_manifest(fx("repo_table4.json")))}
    texts = {app: {describe_change(f.change) for f in r.findings} for app, r in reports.items()}
    assert "Remove snd_tplg_new@ALSA_0.9" in texts["alsa-utils"]
    assert "struct sqlite3_module adds xSavepoint" in texts["qgis-providers"]
    assert "g_utf8_make_valid() adds parameter gssize" in texts["geeqie"]
    assert "Add KCoreAddons::versionString()" in texts["rkward"]
    assert "Add KLocalizedContext::KLocalizedContext(QObject*)" in texts["elisa"]


def test_unrelated_and_clean_repos_are_empty():
    assert scan(load_manifest(fx("repo_unrelated.json"))) == []
    assert scan(load_manifest(fx("repo_clean.json"))) == []
    assert emit_report([], "text") == b"no dependency bugs found\n"


def test_parallel_matches_serial():
    m = load_manifest(fx("repo_combined.json"))
    serial = emit_report(scan(m, jobs=1), "json")
    for jobs in (2, 4, 8):
        assert emit_report(scan(m, jobs=jobs), "json") == serial


def test_order_of_manifest_entries_does_not_matter():
    with open(fx("repo_combined.json")) as fh:
        data = json.load(fh)
    forward = manifest_from_dict(data, FIXTURES)
    data["packages"].reverse()
    data["libraries"].reverse()
    backward = manifest_from_dict(data, FIXTURES)
    assert emit_report(scan(forward), "json") == emit_report(scan(backward), "json")


def test_json_round_trip_and_schema():
    reports = scan(load_manifest(fx("repo_combined.json")))
    doc = json.loads(emit_report(reports, "json"))
    validate_report_document(doc)
    # the release list is derived from the history and not serialized
    assert [report_from_dict(d) for d in doc["reports"]] == [dataclasses.replace(r, releases=()) for r in reports]
    assert [report_to_dict(r) for r in reports_from_json(emit_report(reports, "json"))] == doc["reports"]
    assert emit_report(reports, "structured") == emit_report(reports, "json")


def test_schema_rejects_broken_documents():
    doc = json.loads(emit_report(scan(load_manifest(fx("repo_glib.json"))), "json"))
    del doc["reports"][0]["app"]
    with pytest.raises(jsonschema.ValidationError):
        validate_report_document(doc)
    with pytest.raises(jsonschema.ValidationError):
        validate_report_document({"reports": [{"app": 1}]})


def test_intervals_carry_concrete_bounds():
    [r] = [r for r in scan(load_manifest(fx("repo_table4.json"))) if r.app == "unalz"]
    [iv] = report_to_dict(r)["incompatible"]
    assert (iv["lo"], iv["hi"], iv["lo_version"], iv["hi_version"]) == ("1.2.7", "V_last", "1.2.7", "1.2.8")


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report([], "yaml")


def test_text_report_lines():
    text = emit_report(scan(load_manifest(fx("repo_glib.json"))), "text").decode()
    assert text.splitlines()[0] == "cockpit 202.1 -> libglib2.0-0 (>= 2.37.6): incompatible versions [2.37.6, 2.39.1]"
    assert "g_hash_table_replace adds return value" in text


# --- failure isolation and manifest errors -----------------------------------------


def _write_manifest(tmp_path, packages, libraries=None):
    libraries = libraries or [{"package": "libglib2.0-0", "library": "glib", "history": fx("glib", "history.json")}]
    p = tmp_path / "repo.json"
    p.write_text(json.dumps({"libraries": libraries, "packages": packages}))
    return p


def test_broken_usage_only_fails_its_pair(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope")
    p = _write_manifest(tmp_path, [
        {"name": "broken", "version": "1", "depends": "libglib2.0-0", "usage": str(bad)},
        {"name": "cockpit", "version": "202.1", "depends": "libglib2.0-0 (>= 2.37.6)",
         "usage": fx("usage", "cockpit.json")},
    ])
    reports = {r.app: r for r in scan(load_manifest(p), jobs=2)}
    assert reports["broken"].error and "invalid JSON" in reports["broken"].error
    assert not reports["broken"].has_bugs
    assert reports["cockpit"].incompatible.bounds() == [("2.37.6", "2.39.1")]
    assert "error: broken" in emit_report(list(reports.values()), "text").decode()


def test_missing_binary_is_a_pair_error(tmp_path):
    p = _write_manifest(tmp_path, [{"name": "x", "version": "1", "depends": "libglib2.0-0",
                                    "binaries": [str(tmp_path / "gone.so")]}])
    [r] = scan(load_manifest(p))
    assert r.error


def test_source_scanning_feeds_detection(tmp_path):
    src = tmp_path / "main.c"
    src.write_text("int main(void) {\n  if (g_hash_table_replace(h, k, v))\n    return 1;\n  return 0;\n}\n")
    p = _write_manifest(tmp_path, [{"name": "srcapp", "version": "1", "depends": "libglib2.0-0 (>= 2.37.6)",
                                    "sources": [str(src)]}])
    [r] = scan(load_manifest(p))
    assert r.incompatible.bounds() == [("2.37.6", "2.39.1")]


def test_app_without_the_dependency_is_skipped(tmp_path):
    p = _write_manifest(tmp_path, [{"name": "other", "version": "1", "depends": "libc6",
                                    "usage": fx("usage", "cockpit.json")}])
    assert scan(load_manifest(p)) == []


@pytest.mark.parametrize("packages,libraries,msg", [
    ([{"name": "a"}, {"name": "a"}], None, "duplicate package"),
    ([], [{"package": "p", "library": "l", "history": "nowhere.json"}], "not found"),
    ([{"name": "a", "depends": "libx (=> 1.0)"}], None, "entry 0"),
    ([{"version": "1"}], None, "name"),
    ([{"name": "a", "usage": 3}], None, "usage"),
    ([{"name": "a", "binaries": "x.so"}], None, "binaries"),
    ([], [{"package": "p", "library": "l", "history": fx("glib", "history.json")},
          {"package": "p", "library": "m", "history": fx("glib", "history.json")}], "duplicate binding"),
])
def test_manifest_errors(tmp_path, packages, libraries, msg):
    p = _write_manifest(tmp_path, packages, libraries)
    with pytest.raises(ManifestError, match=msg):
        load_manifest(p)


def test_unreadable_manifest(tmp_path):
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("[1,")
    with pytest.raises(ManifestError):
        load_manifest(bad)
