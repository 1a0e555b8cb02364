"""Scan a small repository: seven application/library pairs, one bug each."""
import os
import time

from depbugs import emit_report, load_manifest, scan

FIX = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")

manifest = load_manifest(os.path.join(FIX, "repo_table4.json"))
print(len(manifest.packages), "packages,", len(manifest.libraries), "libraries")

t0 = time.perf_counter()
reports = scan(manifest, jobs=4)
print(f"scanned in {time.perf_counter() - t0:.3f}s\n")
print(emit_report(reports, "text").decode())

# alsa-utils ships no usage file; its imports come straight from an ELF object
alsa = next(p for p in manifest.packages if p.name == "alsa-utils")
print("alsa-utils binaries:", [os.path.basename(b) for b in alsa.binaries])

# machine-readable form, e.g. for a CI gate
doc = emit_report(reports, "json")
print(f"json report: {len(doc)} bytes")
