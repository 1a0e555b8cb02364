"""Detect dependency bugs: declared version ranges that admit ABI-incompatible library releases."""

from .abi import (
    AbiError,
    AbiSnapshot,
    LibraryHistory,
    Member,
    SymbolDef,
    TypeDef,
    load_history,
    load_snapshot,
    snapshot_from_dict,
    snapshot_to_dict,
    symbols_using_type,
)
from .detect import DetectOutcome, decide_side, detect, filter_phase
from .diff import (
    ChangeKind,
    IncompatibleChange,
    MemberRef,
    SymbolRef,
    collect_incompatible_changes,
    describe_change,
    diff,
    diff_backward,
    diff_forward,
    element_bbc,
)
from .elf import ElfError, read_elf_imports, read_elf_imports_file
from .oracle import generate_instance, oracle_incompatible_versions, simulate_link
from .scan import (
    DepBugReport,
    ManifestError,
    check_dependency,
    emit_report,
    load_manifest,
    reports_from_json,
    scan,
)
from .suggest import is_incompatible_version, suggest_incompatible_versions, union_over_changes
from .usage import AppUsage, Fact, UsageError, load_usage_facts, scan_source_usage, usage_from_dict
from .versions import (
    Interval,
    IntervalSet,
    Ordering,
    Version,
    VersionError,
    VersionRange,
    compare_versions,
    parse_depends,
    parse_range,
    parse_version,
    range_contains,
)

__version__ = "0.1.0"
