"""Minimal ELF64 little-endian reader for undefined dynamic symbols and their versions."""

from __future__ import annotations

import struct

SHT_DYNSYM = 11
SHT_GNU_VERNEED = 0x6FFFFFFE
SHT_GNU_VERSYM = 0x6FFFFFFF
SHN_UNDEF = 0
VERSYM_HIDDEN = 0x8000

_EHDR = struct.Struct("<16sHHIQQQIHHHHHH")
_SHDR = struct.Struct("<IIQQQQIIQQ")
_SYM = struct.Struct("<IBBHQQ")
_VERNEED = struct.Struct("<HHIII")
_VERNAUX = struct.Struct("<IHHII")


class ElfError(ValueError):
    """The input is not a readable ELF64 little-endian object."""


def _unpack(fmt: struct.Struct, data: bytes, offset: int, what: str):
    if offset < 0 or offset + fmt.size > len(data):
        raise ElfError(f"truncated {what} at offset {offset:#x}")
    return fmt.unpack_from(data, offset)


def _cstr(data: bytes, offset: int, what: str) -> str:
    if offset < 0 or offset >= len(data):
        raise ElfError(f"{what} string offset {offset:#x} out of range")
    end = data.find(b"\0", offset)
    if end < 0:
        raise ElfError(f"unterminated {what} string at {offset:#x}")
    return data[offset:end].decode("utf-8", "replace")


def _section_data(data: bytes, sh, what: str) -> bytes:
    offset, size = sh[4], sh[5]
    if offset + size > len(data):
        raise ElfError(f"truncated {what} section")
    return data[offset:offset + size]


def read_elf_imports(data: bytes) -> set[tuple[str, str | None]]:
    """Undefined dynamic symbols as ``(name, version)`` pairs.

    Version indices 0 and 1 (local/global) map to ``None``; the hidden bit is masked.
    Objects without a dynamic symbol table yield an empty set.
    """
    data = bytes(data)
    if len(data) < 16 or data[:4] != b"\x7fELF":
        raise ElfError("bad ELF magic")
    if data[4] != 2:
        raise ElfError(f"unsupported ELF class {data[4]} (need ELF64)")
    if data[5] != 1:
        raise ElfError(f"unsupported data encoding {data[5]} (need little-endian)")
    hdr = _unpack(_EHDR, data, 0, "ELF header")
    shoff, shentsize, shnum = hdr[6], hdr[11], hdr[12]
    if shoff == 0 or shnum == 0:
        return set()
    if shentsize < _SHDR.size:
        raise ElfError(f"section header entry size {shentsize} too small")
    sections = [_unpack(_SHDR, data, shoff + i * shentsize, f"section header {i}") for i in range(shnum)]

    dynsym = next((s for s in sections if s[1] == SHT_DYNSYM), None)
    if dynsym is None:
        return set()
    if dynsym[6] >= shnum:
        raise ElfError("dynsym sh_link out of range")
    strtab = _section_data(data, sections[dynsym[6]], "dynstr")
    symdata = _section_data(data, dynsym, "dynsym")
    entsize = dynsym[9] or _SYM.size
    if entsize < _SYM.size:
        raise ElfError(f"dynsym entry size {entsize} too small")
    count = len(symdata) // entsize

    versym = next((s for s in sections if s[1] == SHT_GNU_VERSYM), None)
    indices = None
    if versym is not None:
        raw = _section_data(data, versym, "versym")
        indices = struct.unpack_from(f"<{len(raw) // 2}H", raw)

    names = {}
    verneed = next((s for s in sections if s[1] == SHT_GNU_VERNEED), None)
    if verneed is not None:
        if verneed[6] >= shnum:
            raise ElfError("verneed sh_link out of range")
        vstr = _section_data(data, sections[verneed[6]], "verneed strings")
        vdata = _section_data(data, verneed, "verneed")
        off = 0
        for _ in range(verneed[7] or 1 << 16):
            _, cnt, _, aux, nxt = _unpack(_VERNEED, vdata, off, "verneed entry")
            aoff = off + aux
            for _ in range(cnt):
                _, _, other, name, anext = _unpack(_VERNAUX, vdata, aoff, "vernaux entry")
                names[other & ~VERSYM_HIDDEN] = _cstr(vstr, name, "version")
                if not anext:
                    break
                aoff += anext
            if not nxt:
                break
            off += nxt

    out = set()
    for i in range(1, count):
        st_name, _, _, shndx, _, _ = _unpack(_SYM, symdata, i * entsize, f"symbol {i}")
        if shndx != SHN_UNDEF or st_name == 0:
            continue
        name = _cstr(strtab, st_name, "symbol")
        if not name:
            continue
        tag = None
        if indices is not None and i < len(indices):
            idx = indices[i] & ~VERSYM_HIDDEN
            if idx > 1:
                tag = names.get(idx)
        out.add((name, tag))
    return out


def read_elf_imports_file(path) -> set[tuple[str, str | None]]:
    with open(path, "rb") as fh:
        return read_elf_imports(fh.read())
