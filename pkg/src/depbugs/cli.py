"""Command-line entry point. Exit status: 0 clean, 1 bugs found, 2 operational error."""

from __future__ import annotations

import argparse
import json
import sys

from .abi import AbiError, load_history, load_snapshot
from .diff import change_to_dict, collect_incompatible_changes, describe_change, diff
from .elf import ElfError, read_elf_imports_file
from .oracle import oracle_incompatible_versions, simulate_link
from .scan import ManifestError, check_dependency, emit_report, load_manifest, scan
from .usage import UsageError, load_usage_facts
from .versions import VersionError, parse_range

EXIT_OK, EXIT_BUGS, EXIT_ERROR = 0, 1, 2


def _dump(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def _print_changes(changes, fmt: str) -> None:
    if fmt == "json":
        _dump([change_to_dict(ic) for ic in changes])
        return
    for ic in changes:
        print(f"{ic.versions():<24} {ic.direction:<8} kind {int(ic.kind):>2}  {describe_change(ic)}")


def cmd_scan(args) -> int:
    manifest = load_manifest(args.manifest)
    reports = scan(manifest, jobs=args.jobs)
    sys.stdout.buffer.write(emit_report(reports, args.format))
    sys.stdout.flush()
    if any(r.findings for r in reports):
        return EXIT_BUGS
    return EXIT_ERROR if any(r.error for r in reports) else EXIT_OK


def cmd_changes(args) -> int:
    _print_changes(collect_incompatible_changes(load_history(args.history)), args.format)
    return EXIT_OK


def cmd_diff(args) -> int:
    _print_changes(diff(load_snapshot(args.old), load_snapshot(args.new), args.direction), args.format)
    return EXIT_OK


def cmd_detect(args) -> int:
    h = load_history(args.history)
    app = load_usage_facts(args.usage)
    report = check_dependency(app, parse_range(args.depends), h)
    sys.stdout.buffer.write(emit_report([report] if report.findings or report.warnings else [], args.format))
    sys.stdout.flush()
    return EXIT_BUGS if report.findings else EXIT_OK


def cmd_elf_imports(args) -> int:
    imports = sorted(read_elf_imports_file(args.binary), key=lambda x: (x[0], x[1] or ""))
    if args.format == "json":
        _dump([{"name": n, "version_tag": t} for n, t in imports])
    else:
        for n, t in imports:
            print(n if t is None else f"{n}@{t}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    h = load_history(args.history)
    app = load_usage_facts(args.usage)
    bad = oracle_incompatible_versions(app, parse_range(args.depends), h)
    for s in h.releases:
        fails = simulate_link(app, s)
        mark = "x" if s.version in bad else ("-" if fails else " ")
        print(f"{mark} {s.version}")
        for f in fails:
            print(f"    {f.reason}: {f.target}")
    return EXIT_BUGS if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="depbugs", description="Find library versions a package's declared range admits but cannot link against.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("scan", help="scan a repository manifest")
    s.add_argument("manifest")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("changes", help="list incompatible changes across a library history")
    s.add_argument("history")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_changes)

    s = sub.add_parser("diff", help="classify changes between two snapshots")
    s.add_argument("old")
    s.add_argument("new")
    s.add_argument("--direction", choices=("backward", "forward", "both"), default="both")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_diff)

    s = sub.add_parser("detect", help="check one application's usage against one history")
    s.add_argument("history")
    s.add_argument("usage")
    s.add_argument("--depends", default="", help='required range, e.g. ">= 2.37.6"')
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("elf-imports", help="list undefined dynamic symbols of an ELF64 object")
    s.add_argument("binary")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_elf_imports)

    # debugging aid for fixtures; not listed in --help
    s = sub.add_parser("oracle")
    s.add_argument("history")
    s.add_argument("usage")
    s.add_argument("--depends", default="")
    s.set_defaults(func=cmd_oracle)
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "oracle"]
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (ManifestError, AbiError, UsageError, ElfError, VersionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
