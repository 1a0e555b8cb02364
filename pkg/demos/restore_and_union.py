"""Two histories where the suggested range is not one simple interval.

zlib dropped gzgetc in 1.2.5.2 and put it back in 1.2.5.3, so only the one
release in the middle breaks aewan. libpcre changed pcrecpp::RE::Init twice,
and mongodb is broken on both ends of the history.
"""
import os

from depbugs import (VersionRange, check_dependency, describe_change, load_history,
                     load_usage_facts, oracle_incompatible_versions)

FIX = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")


def show(history, usage):
    h = load_history(os.path.join(FIX, history, "history.json"))
    app = load_usage_facts(os.path.join(FIX, "usage", usage))
    r = check_dependency(app, VersionRange(), h)
    print(f"{app.app} against {h.library}:")
    for f in r.findings:
        print(f"  {f.change.versions():22} {describe_change(f.change):60} -> {f.incompatible.render()}")
    print("  union:", r.incompatible.render())
    oracle = sorted(oracle_incompatible_versions(app, VersionRange(), h))
    print("  linker says:", ", ".join(map(str, oracle)))
    print()


show("zlib_gzgetc", "aewan.json")
show("libpcre", "mongodb.json")
