"""Compare the detector against a brute-force linker on random histories.

Each generated element varies in a single aspect and the usage is taken from
one release, so every change is decidable and the two must agree exactly.
Narrowing the required range breaks that: a change whose two sides both fall
outside the range is filtered out even when its effect persists inside it.
"""
from depbugs import VersionRange, check_dependency, generate_instance, oracle_incompatible_versions
from depbugs.versions import parse_range

agree = 0
N = 500
for seed in range(N):
    h, app, _ = generate_instance(seed)
    got = set(check_dependency(app, VersionRange(), h).incompatible.members(h.versions))
    agree += got == oracle_incompatible_versions(app, VersionRange(), h)
print(f"accepts-all range: {agree}/{N} agree")

disagree = 0
for seed in range(N):
    h, app, _ = generate_instance(seed)
    r = parse_range(f">= {h.versions[len(h.versions) // 2]}")
    got = set(check_dependency(app, r, h).incompatible.members(h.versions))
    disagree += got != oracle_incompatible_versions(app, r, h)
print(f"lower-bounded range: {disagree}/{N} disagree")

h, app, _ = generate_instance(12)
r = parse_range(">= 1.4")
print("seed 12, >= 1.4:")
print("  detector:", check_dependency(app, r, h).incompatible.render())
print("  linker:  ", sorted(map(str, oracle_incompatible_versions(app, r, h))))
