"""glib 2.39.2 gave g_hash_table_replace a gboolean return value.

cockpit tests that return value, so any glib release before 2.39.2 breaks it,
even though its control file only asks for >= 2.37.6.
"""
import os

from depbugs import (check_dependency, collect_incompatible_changes, describe_change,
                     load_history, load_usage_facts, parse_range)
from depbugs.oracle import simulate_link

HERE = os.path.dirname(os.path.abspath(__file__))
FIX = os.path.join(HERE, "..", "fixtures")

glib = load_history(os.path.join(FIX, "glib", "history.json"))
print("releases:", ", ".join(str(v) for v in glib.versions))

# every change between adjacent releases that can break some caller
for ic in collect_incompatible_changes(glib):
    print(f"  {ic.versions()}  kind {int(ic.kind):2}  {describe_change(ic)}")

cockpit = load_usage_facts(os.path.join(FIX, "usage", "cockpit.json"))
report = check_dependency(cockpit, parse_range(">= 2.37.6"), glib, "libglib2.0-0")
print()
print("cockpit requires", report.required)
for f in report.findings:
    print(f"  bug at {f.bug_version}, incompatible {f.incompatible.render()}")
print("  concrete bounds:", report.incompatible.bounds())

# sanity check: ask a brute-force linker which releases actually fail.
# 2.37.3 fails too, but cockpit's declared range already excludes it.
print()
for snap in glib.releases:
    problems = simulate_link(cockpit, snap)
    print(f"  {str(snap.version):8} {'FAILS' if problems else 'ok'}",
          "; ".join(f"{p.reason}: {p.target}" for p in problems))

# homebank hits the sibling function, with a wider declared range
homebank = load_usage_facts(os.path.join(FIX, "usage", "homebank.json"))
print()
print("homebank:", check_dependency(homebank, parse_range(">= 2.37.3"), glib).incompatible.render())
