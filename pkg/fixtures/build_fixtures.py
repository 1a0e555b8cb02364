"""Regenerate the JSON fixture corpus (histories, usages, repo manifests).

Run from anywhere: ``python3 fixtures/build_fixtures.py``. Output is deterministic.
"""

import json
import os
import shutil

HERE = os.path.dirname(os.path.abspath(__file__))


def fn(name, ret=None, params=(), tag=None, default=False):
    return {"name": name, "kind": "function", "return": ret, "params": list(params),
            "version_tag": tag, "default": default}


def var(name, var_type, tag=None, default=False):
    return {"name": name, "kind": "variable", "var_type": var_type, "version_tag": tag, "default": default}


def write(path, obj):
    path = os.path.join(HERE, path)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def history(lib_dir, library, releases):
    """releases: list of (version, soname, symbols, types, opaque)."""
    names = []
    for version, soname, symbols, types, opaque in releases:
        fname = f"{version}.json"
        write(f"{lib_dir}/{fname}", {
            "library": library, "version": version, "soname": soname,
            "symbols": symbols, "types": types, "opaque": opaque,
        })
        names.append(fname)
    write(f"{lib_dir}/history.json", {"library": library, "releases": names})


def usage(path, app, version, imports, facts):
    write(path, {
        "app": app, "version": version,
        "imports": [{"name": n, "version_tag": t} for n, t in imports],
        "facts": facts,
    })


# --- glib, motivating example -------------------------------------------------

def glib_motivating():
    rel = []
    for v in ("2.37.3", "2.37.6", "2.39.1", "2.39.2"):
        ret = "gboolean" if v == "2.39.2" else None
        syms = [
            fn("g_hash_table_new", "GHashTable*", ["GHashFunc", "GEqualFunc"]),
            fn("g_hash_table_insert", ret, ["GHashTable*", "gpointer", "gpointer"]),
            fn("g_hash_table_replace", ret, ["GHashTable*", "gpointer", "gpointer"]),
            fn("g_free", None, ["gpointer"]),
        ]
        rel.append((v, "libglib-2.0.so.0", syms, [], ["GHashTable", "GHashFunc", "GEqualFunc", "gboolean", "gpointer"]))
    history("glib", "glib", rel)
    usage("usage/cockpit.json", "cockpit", "202.1",
          [("g_hash_table_replace", None), ("g_hash_table_new", None), ("g_free", None)],
          [{"fact": "calls", "symbol": "g_hash_table_replace", "arity": 3},
           {"fact": "uses_return_value", "symbol": "g_hash_table_replace"},
           {"fact": "calls", "symbol": "g_free", "arity": 1}])
    usage("usage/homebank.json", "homebank", "5.2.2",
          [("g_hash_table_insert", None), ("g_hash_table_new", None)],
          [{"fact": "calls", "symbol": "g_hash_table_insert", "arity": 3},
           {"fact": "uses_return_value", "symbol": "g_hash_table_insert"}])
    write("repo_glib.json", {
        "libraries": [{"package": "libglib2.0-0", "library": "glib", "history": "glib/history.json"}],
        "packages": [
            {"name": "cockpit", "version": "202.1", "depends": "libc6 (>= 2.14), libglib2.0-0 (>= 2.37.6)",
             "usage": "usage/cockpit.json"},
            {"name": "homebank", "version": "5.2.2", "depends": "libglib2.0-0 (>= 2.37.3), libgtk-3-0",
             "usage": "usage/homebank.json"},
        ],
    })


# --- zlib -------------------------------------------------------------------------

def zlib_gzgetc():
    rel = []
    for v in ("1.2.5.1", "1.2.5.2", "1.2.5.3"):
        syms = [fn("gzopen", "gzFile", ["const char*", "const char*"]), fn("gzclose", "int", ["gzFile"])]
        if v != "1.2.5.2":
            syms.append(fn("gzgetc", "int", ["gzFile"]))
        rel.append((v, "libz.so.1", syms, [], ["gzFile"]))
    history("zlib_gzgetc", "zlib", rel)
    usage("usage/aewan.json", "aewan", "1.0.01",
          [("gzgetc", None), ("gzopen", None), ("gzclose", None)],
          [{"fact": "calls", "symbol": "gzgetc", "arity": 1},
           {"fact": "uses_return_value", "symbol": "gzgetc"}])


def zlib_full():
    """One zlib history carrying both the gzgetc and the get_crc_table changes."""
    rel = []
    for v in ("1.1.4", "1.2.3", "1.2.5.1", "1.2.5.2", "1.2.5.3", "1.2.6.1", "1.2.7", "1.2.8"):
        crc = "const int*" if v in ("1.2.7", "1.2.8") else "const long*"
        syms = [fn("gzopen", "gzFile", ["const char*", "const char*"]), fn("gzclose", "int", ["gzFile"]),
                fn("get_crc_table", crc), fn("crc32", "unsigned long", ["unsigned long", "const char*", "unsigned int"])]
        if v != "1.2.5.2":
            syms.append(fn("gzgetc", "int", ["gzFile"]))
        rel.append((v, "libz.so.1", syms, [], ["gzFile"]))
    history("zlib", "zlib", rel)
    usage("usage/unalz.json", "unalz", "0.65-7",
          [("get_crc_table", None), ("crc32", None)],
          [{"fact": "return_type_hint", "symbol": "get_crc_table", "type_text": "const long *"},
           {"fact": "uses_return_value", "symbol": "get_crc_table"}])


# --- sqlite -------------------------------------------------------------------

def sqlite():
    rel = []
    base_fields = [("iVersion", "int"), ("xCreate", "void*"), ("xConnect", "void*"), ("xBestIndex", "void*"),
                   ("xDisconnect", "void*"), ("xRename", "void*")]
    for v in ("3.5.0", "3.5.9", "3.6.0", "3.7.6.3", "3.7.7", "3.8.0"):
        fields = list(base_fields)
        if v in ("3.7.7", "3.8.0"):
            fields += [("xSavepoint", "void*"), ("xRelease", "void*"), ("xRollbackTo", "void*")]
        types = [{"name": "sqlite3_module", "kind": "struct",
                  "members": [{"name": n, "type": t} for n, t in fields]}]
        syms = [
            fn("sqlite3_open", "int", ["const char*", "sqlite3**"]),
            fn("sqlite3_create_module", "int", ["sqlite3*", "const char*", "const sqlite3_module*", "void*"]),
        ]
        rel.append((v, "libsqlite3.so.0", syms, types, ["sqlite3"]))
    history("sqlite", "sqlite", rel)
    usage("usage/qgis-providers.json", "qgis-providers", "3.4.10",
          [("sqlite3_create_module", None), ("sqlite3_open", None)],
          [{"fact": "uses_field", "type": "sqlite3_module", "field": f}
           for f in ("iVersion", "xCreate", "xConnect", "xSavepoint")])


# --- alsa: symbol versioning ---------------------------------------------------------

def alsa():
    rel = []
    for v in ("1.1.0", "1.1.1", "1.1.9", "1.2.1", "1.2.2"):
        tag = "ALSA_1.2.1" if v.startswith("1.2") else "ALSA_0.9"
        syms = [fn("snd_tplg_new", "snd_tplg_t*", [], tag=tag, default=True),
                fn("snd_pcm_open", "int", ["snd_pcm_t**", "const char*", "int", "int"], tag="ALSA_0.9", default=True)]
        rel.append((v, "libasound.so.2", syms, [], ["snd_tplg_t", "snd_pcm_t"]))
    history("alsa", "alsa-lib", rel)
    # alsa-utils imports come from its ELF binary (see elf fixtures); no facts needed


# --- glib for geeqie -------------------------------------------------------------

def glib_geeqie():
    rel = []
    for v in ("2.51.0", "2.52.0", "2.53.0"):
        params = ["const gchar*"] + (["gssize"] if v != "2.51.0" else [])
        syms = [fn("g_utf8_make_valid", "gchar*", params), fn("g_free", None, ["gpointer"])]
        rel.append((v, "libglib-2.0.so.0", syms, [], ["gchar", "gssize", "gpointer"]))
    history("glib_geeqie", "glib", rel)
    usage("usage/geeqie.json", "geeqie", "1:1.5.1-1",
          [("g_utf8_make_valid", None), ("g_free", None)],
          [{"fact": "calls", "symbol": "g_utf8_make_valid", "arity": 2},
           {"fact": "uses_return_value", "symbol": "g_utf8_make_valid"}])


# --- KDE frameworks and Qt ------------------------------------------------------

def kf5_i18n():
    rel = []
    for v in ("5.15.0", "5.16.0", "5.17.0"):
        syms = [fn("KLocalizedString::setText(const char*)", None, ["const char*"])]
        if v != "5.16.0":
            syms.append(fn("KLocalizedContext::KLocalizedContext(QObject*)", None, ["QObject*"]))
        rel.append((v, "libKF5I18n.so.5", syms, [], ["QObject"]))
    history("kf5_i18n", "ki18n", rel)
    usage("usage/elisa.json", "elisa", "1.1",
          [("KLocalizedContext::KLocalizedContext(QObject*)", None)],
          [{"fact": "calls", "symbol": "KLocalizedContext::KLocalizedContext(QObject*)", "arity": 1}])


def kf5_coreaddons():
    rel = []
    for v in ("5.18.0", "5.19.0", "5.20.0"):
        syms = [fn("KAboutData::setLicense()", None)]
        if v == "5.20.0":
            syms.append(fn("KCoreAddons::versionString()", "QString"))
        rel.append((v, "libKF5CoreAddons.so.5", syms, [], ["QString"]))
    history("kf5_coreaddons", "kcoreaddons", rel)
    usage("usage/rkward.json", "rkward", "0.7.0b-1.1",
          [("KCoreAddons::versionString()", None)],
          [{"fact": "calls", "symbol": "KCoreAddons::versionString()", "arity": 0},
           {"fact": "uses_return_value", "symbol": "KCoreAddons::versionString()"}])


def qt5_core():
    rel = []
    for v in ("5.12.2", "5.13.2", "5.14.0", "5.15.0"):
        ptype = "QSignalSpyCallbackSet*" if v in ("5.14.0", "5.15.0") else "const QSignalSpyCallbackSet&"
        syms = [fn("qt_register_signal_spy_callbacks", None, [ptype]), fn("qVersion", "const char*")]
        rel.append((v, "libQt5Core.so.5", syms, [], ["QSignalSpyCallbackSet"]))
    history("qt5_core", "qtbase", rel)
    usage("usage/gammaray.json", "gammaray", "2.9.0",
          [("qt_register_signal_spy_callbacks", None), ("qVersion", None)],
          [{"fact": "calls", "symbol": "qt_register_signal_spy_callbacks", "arity": 1},
           {"fact": "param_type_hint", "symbol": "qt_register_signal_spy_callbacks", "index": 0,
            "type_text": "const QSignalSpyCallbackSet &"}])


# --- libpcre: two changes on one function -------------------------------------------

def libpcre():
    rel = []
    for v in ("4.5", "5.0", "6.0", "6.7", "7.0", "8.0"):
        syms = [fn("pcre_compile", "pcre*", ["const char*", "int", "const char**", "int*", "const unsigned char*"])]
        if v not in ("4.5", "5.0"):
            first = "const std::string&" if v in ("7.0", "8.0") else "const char*"
            syms.append(fn("pcrecpp::RE::Init", None, [first, "const RE_Options*"]))
        rel.append((v, "libpcrecpp.so.0", syms, [], ["pcre", "std::string", "RE_Options"]))
    history("libpcre", "libpcre", rel)
    usage("usage/mongodb.json", "mongodb", "2.4",
          [("pcrecpp::RE::Init", None)],
          [{"fact": "calls", "symbol": "pcrecpp::RE::Init", "arity": 2},
           {"fact": "param_type_hint", "symbol": "pcrecpp::RE::Init", "index": 0, "type_text": "const char *"}])


# --- repositories ----------------------------------------------------------------

TABLE4_LIBS = [
    {"package": "libsqlite3-0", "library": "sqlite", "history": "sqlite/history.json"},
    {"package": "zlib1g", "library": "zlib", "history": "zlib/history.json"},
    {"package": "libkf5i18n5", "library": "ki18n", "history": "kf5_i18n/history.json"},
    {"package": "libqt5core5a", "library": "qtbase", "history": "qt5_core/history.json"},
    {"package": "libglib2.0-0", "library": "glib", "history": "glib_geeqie/history.json"},
    {"package": "libasound2", "library": "alsa-lib", "history": "alsa/history.json"},
    {"package": "libkf5coreaddons5", "library": "kcoreaddons", "history": "kf5_coreaddons/history.json"},
]

TABLE4_PKGS = [
    {"name": "qgis-providers", "version": "3.4.10", "depends": "libsqlite3-0 (>= 3.5.9), libc6",
     "usage": "usage/qgis-providers.json"},
    {"name": "unalz", "version": "0.65-7", "depends": "zlib1g (>= 1.1.4)", "usage": "usage/unalz.json"},
    {"name": "elisa", "version": "1.1", "depends": "libkf5i18n5 (>= 5.15.0)", "usage": "usage/elisa.json"},
    {"name": "gammaray", "version": "2.9.0", "depends": "libqt5core5a (>= 5.12.2)", "usage": "usage/gammaray.json"},
    {"name": "geeqie", "version": "1:1.5.1-1", "depends": "libglib2.0-0 (>= 2.51.0)", "usage": "usage/geeqie.json"},
    {"name": "alsa-utils", "version": "1.1.9", "depends": "libasound2 (>= 1.1.1)",
     "binaries": ["elf/alsa_utils.so"]},
    {"name": "rkward", "version": "0.7.0b-1.1", "depends": "libkf5coreaddons5 (>= 5.19.0)",
     "usage": "usage/rkward.json"},
]


def repos():
    write("repo_table4.json", {"libraries": TABLE4_LIBS, "packages": TABLE4_PKGS})
    combined_libs = TABLE4_LIBS + [
        {"package": "libpcrecpp0v5", "library": "libpcre", "history": "libpcre/history.json"},
    ]
    combined_pkgs = TABLE4_PKGS + [
        {"name": "aewan", "version": "1.0.01-4.1", "depends": "zlib1g (>= 1.1.4), libncurses6",
         "usage": "usage/aewan.json"},
        {"name": "mongodb", "version": "1:2.4.10", "depends": "libpcrecpp0v5", "usage": "usage/mongodb.json"},
        {"name": "hello", "version": "2.10-2", "depends": "libc6 (>= 2.14)"},
    ]
    write("repo_combined.json", {"libraries": combined_libs, "packages": combined_pkgs})
    write("repo_clean.json", {
        "libraries": TABLE4_LIBS,
        "packages": [
            {"name": "qgis-providers", "version": "3.4.10", "depends": "libsqlite3-0 (>= 3.7.7)",
             "usage": "usage/qgis-providers.json"},
            {"name": "unalz", "version": "0.65-7", "depends": "zlib1g (>= 1.1.4), zlib1g (<< 1.2.7)",
             "usage": "usage/unalz.json"},
            {"name": "rkward", "version": "0.7.0b-1.1", "depends": "libkf5coreaddons5 (>= 5.20.0)",
             "usage": "usage/rkward.json"},
            {"name": "hello", "version": "2.10-2", "depends": "libc6 (>= 2.14)"},
        ],
    })
    write("repo_unrelated.json", {
        "libraries": TABLE4_LIBS,
        "packages": [{"name": "hello", "version": "2.10-2", "depends": "libc6 (>= 2.14)"}],
    })


def main():
    for d in ("glib", "zlib_gzgetc", "zlib", "sqlite", "alsa", "glib_geeqie", "kf5_i18n", "kf5_coreaddons",
              "qt5_core", "libpcre", "usage"):
        shutil.rmtree(os.path.join(HERE, d), ignore_errors=True)
    glib_motivating()
    zlib_gzgetc()
    zlib_full()
    sqlite()
    alsa()
    glib_geeqie()
    kf5_i18n()
    kf5_coreaddons()
    qt5_core()
    libpcre()
    repos()


if __name__ == "__main__":
    main()
