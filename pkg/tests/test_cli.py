import json
import shutil
import subprocess
import sys

import pytest

from depbugs.scan import reports_from_json

from kit import fx


def run(*args):
    p = subprocess.run([sys.executable, "-m", "depbugs", *map(str, args)], capture_output=True)
    return p.returncode, p.stdout.decode(), p.stderr.decode()


def test_scan_exit_codes():
    code, out, _ = run("scan", fx("repo_glib.json"))
    assert code == 1 and out.startswith("cockpit 202.1 -> libglib2.0-0")
    code, out, _ = run("scan", fx("repo_clean.json"))
    assert code == 0 and out == "no dependency bugs found\n"


def test_scan_json_with_jobs():
    code, out, _ = run("scan", fx("repo_table4.json"), "--format", "json", "--jobs", "3")
    assert code == 1
    serial = run("scan", fx("repo_table4.json"), "--format", "json")[1]
    assert out == serial
    assert [r.app for r in reports_from_json(out)][:2] == ["alsa-utils", "elisa"]


def test_scan_pair_error_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    manifest = tmp_path / "repo.json"
    manifest.write_text(json.dumps({
        "libraries": [{"package": "zlib1g", "library": "zlib", "history": fx("zlib", "history.json")}],
        "packages": [{"name": "x", "version": "1", "depends": "zlib1g", "usage": str(bad)}],
    }))
    code, out, _ = run("scan", manifest)
    assert code == 2 and "error: x -> zlib1g" in out


@pytest.mark.parametrize("args", [
    ("scan", "no-such-manifest.json"),
    ("scan", fx("repo_glib.json"), "--jobs", "0"),
    ("changes", "no-such-history.json"),
    ("detect", fx("glib", "history.json"), "missing.json", "--depends", ">= 1"),
    ("detect", fx("glib", "history.json"), fx("usage", "cockpit.json"), "--depends", "=> 1"),
    ("elf-imports", fx("versions", "corpus.json")),
    ("diff", fx("glib", "2.39.1.json"), fx("sqlite", "3.7.7.json")),
])
def test_bad_inputs_exit_2(args):
    code, _, err = run(*args)
    assert code == 2 and err.startswith("error:")


def test_usage_errors_exit_2():
    assert run()[0] == 2
    assert run("scan", fx("repo_glib.json"), "--format", "xml")[0] == 2


def test_changes_text_and_json():
    code, out, _ = run("changes", fx("libpcre", "history.json"))
    assert code == 0 and "pcrecpp::RE::Init" in out
    code, out, _ = run("changes", fx("glib", "history.json"), "--format", "json")
    doc = json.loads(out)
    assert code == 0 and {c["kind"] for c in doc} == {16}


def test_diff_directions():
    a, b = fx("zlib_gzgetc", "1.2.5.1.json"), fx("zlib_gzgetc", "1.2.5.2.json")
    assert "Remove gzgetc" in run("diff", a, b, "--direction", "backward")[1]
    assert run("diff", a, b, "--direction", "forward")[1] == ""
    assert "Add gzgetc" in run("diff", b, a)[1]


def test_detect():
    code, out, _ = run("detect", fx("glib", "history.json"), fx("usage", "cockpit.json"), "--depends", ">= 2.37.6")
    assert code == 1 and "[2.37.6, 2.39.1]" in out
    code, out, _ = run("detect", fx("libpcre", "history.json"), fx("usage", "mongodb.json"), "--depends", "")
    assert code == 1 and "[V_init, 5.0]∪[7.0, V_last]" in out
    code, out, _ = run("detect", fx("glib", "history.json"), fx("usage", "aewan.json"), "--depends", ">= 2.0")
    assert code == 0 and out == "no dependency bugs found\n"


def test_elf_imports():
    code, out, _ = run("elf-imports", fx("elf", "alsa_utils.so"))
    assert code == 0 and "snd_tplg_new@ALSA_0.9" in out.splitlines()
    code, out, _ = run("elf-imports", fx("elf", "static.o"), "--format", "json")
    assert code == 0 and json.loads(out) == []


def test_hidden_oracle_command():
    _, help_text, _ = run("--help")
    assert "oracle" not in help_text and "scan" in help_text
    code, out, _ = run("oracle", fx("zlib_gzgetc", "history.json"), fx("usage", "aewan.json"))
    assert code == 1 and "missing symbol: gzgetc" in out


@pytest.mark.skipif(shutil.which("depbugs") is None, reason="console script not installed")
def test_console_script():
    p = subprocess.run(["depbugs", "scan", fx("repo_clean.json")], capture_output=True)
    assert p.returncode == 0
