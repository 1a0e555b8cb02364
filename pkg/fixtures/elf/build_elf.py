"""Assemble tiny ELF64 little-endian objects byte by byte.

Each object only carries the sections the import reader looks at. Outputs are
cross-checked with ``readelf --dyn-syms`` and then frozen in expected.json.
"""

import os
import struct

HERE = os.path.dirname(os.path.abspath(__file__))

SHT_PROGBITS, SHT_STRTAB, SHT_DYNAMIC, SHT_DYNSYM = 1, 3, 6, 11
SHT_GNU_VERNEED, SHT_GNU_VERSYM = 0x6FFFFFFE, 0x6FFFFFFF
STB_GLOBAL, STT_FUNC, STT_OBJECT = 1, 2, 1


def _elf_hash(name: bytes) -> int:
    h = 0
    for c in name:
        h = ((h << 4) + c) & 0xFFFFFFFF
        g = h & 0xF0000000
        if g:
            h ^= g >> 24
        h &= ~g & 0xFFFFFFFF
    return h


class StrTab:
    def __init__(self):
        self.data = bytearray(b"\0")
        self.index = {"": 0}

    def add(self, s: str) -> int:
        if s not in self.index:
            self.index[s] = len(self.data)
            self.data += s.encode() + b"\0"
        return self.index[s]


def build(symbols, needs, e_type=3, with_dynsym=True):
    """symbols: list of (name, defined, version-or-None, is_object).
    needs: {library: [version, ...]} for the verneed table.
    """
    shstr = StrTab()
    sections = []  # (name, type, flags, data, link, info, align, entsize)

    if with_dynsym:
        dynstr = StrTab()
        for name, *_ in symbols:
            dynstr.add(name)
        vidx = {}
        next_idx = 2
        verneed = bytearray()
        libs = sorted(needs)
        for li, lib in enumerate(libs):
            vers = needs[lib]
            file_off = dynstr.add(lib)
            aux = bytearray()
            for vi, ver in enumerate(vers):
                vidx[ver] = next_idx
                nxt = 16 if vi + 1 < len(vers) else 0
                aux += struct.pack("<IHHII", _elf_hash(ver.encode()), 0, next_idx, dynstr.add(ver), nxt)
                next_idx += 1
            nxt = 16 + len(aux) if li + 1 < len(libs) else 0
            verneed += struct.pack("<HHIII", 1, len(vers), file_off, 16, nxt) + aux

        dynsym = bytearray(24)
        versym = bytearray(2)
        for name, defined, ver, is_obj in symbols:
            stt = STT_OBJECT if is_obj else STT_FUNC
            shndx = 4 if defined else 0
            dynsym += struct.pack("<IBBHQQ", dynstr.add(name), (STB_GLOBAL << 4) | stt, 0, shndx,
                                  0x1000 if defined else 0, 8 if defined else 0)
            versym += struct.pack("<H", vidx[ver] if ver else 1)
        # section indices: 1 dynstr, 2 dynsym, 3 gnu.version, 4 .text, then version_r, dynamic, shstrtab
        sections.append((".dynstr", SHT_STRTAB, 2, bytes(dynstr.data), 0, 0, 1, 0))
        sections.append((".dynsym", SHT_DYNSYM, 2, bytes(dynsym), 1, 1, 8, 24))
        sections.append((".gnu.version", SHT_GNU_VERSYM, 2, bytes(versym), 2, 0, 2, 2))
        sections.append((".text", SHT_PROGBITS, 6, b"\xc3" * 16, 0, 0, 16, 0))
        if needs:
            sections.append((".gnu.version_r", SHT_GNU_VERNEED, 2, bytes(verneed), 1, len(libs), 8, 0))
    else:
        sections.append((".text", SHT_PROGBITS, 6, b"\xc3" * 16, 0, 0, 16, 0))

    dyn_tags = []
    if with_dynsym:
        # contents patched in once section addresses are known
        dyn_tags = ["DT_STRTAB", "DT_SYMTAB", "DT_STRSZ", "DT_SYMENT", "DT_VERSYM"]
        if needs:
            dyn_tags += ["DT_VERNEED", "DT_VERNEEDNUM"]
        dyn_tags.append("DT_NULL")
        sections.append((".dynamic", SHT_DYNAMIC, 3, bytes(16 * len(dyn_tags)), 1, 0, 8, 16))

    for s in sections:
        shstr.add(s[0])
    shstr.add(".shstrtab")

    nphdr = 2 if with_dynsym else 1
    pos = 64 + 56 * nphdr
    offsets = []
    for s in sections:
        pos += (-pos) % max(s[6], 1)
        offsets.append(pos)
        pos += len(s[3])
    shstr_off = pos
    pos += len(shstr.data)
    pos += (-pos) % 8
    shoff = pos
    shnum = len(sections) + 2
    total = shoff + 64 * shnum

    if with_dynsym:
        where = {s[0]: (off, len(s[3])) for s, off in zip(sections, offsets)}
        values = {
            "DT_STRTAB": (5, where[".dynstr"][0]),
            "DT_SYMTAB": (6, where[".dynsym"][0]),
            "DT_STRSZ": (10, where[".dynstr"][1]),
            "DT_SYMENT": (11, 24),
            "DT_VERSYM": (0x6FFFFFF0, where[".gnu.version"][0]),
            "DT_VERNEED": (0x6FFFFFFE, where.get(".gnu.version_r", (0, 0))[0]),
            "DT_VERNEEDNUM": (0x6FFFFFFF, len(needs)),
            "DT_NULL": (0, 0),
        }
        dyn = b"".join(struct.pack("<qQ", *values[t]) for t in dyn_tags)
        sections[-1] = sections[-1][:3] + (dyn,) + sections[-1][4:]

    out = bytearray(total)
    ident = b"\x7fELF" + bytes([2, 1, 1, 0]) + b"\0" * 8
    out[0:64] = struct.pack("<16sHHIQQQIHHHHHH", ident, e_type, 62, 1, 0, 64, shoff, 0, 64, 56, nphdr, 64,
                            shnum, shnum - 1)
    # one identity-mapped PT_LOAD so readelf can translate addresses, plus PT_DYNAMIC
    out[64:120] = struct.pack("<IIQQQQQQ", 1, 5, 0, 0, 0, total, total, 0x1000)
    if with_dynsym:
        doff, dsize = offsets[-1], len(sections[-1][3])
        out[120:176] = struct.pack("<IIQQQQQQ", 2, 6, doff, doff, doff, dsize, dsize, 8)
    for s, off in zip(sections, offsets):
        out[off:off + len(s[3])] = s[3]
    out[shstr_off:shstr_off + len(shstr.data)] = shstr.data
    hdr = shoff + 64  # index 0 stays the null section
    for s, off in zip(sections, offsets):
        name, typ, flags, data, link, info, align, entsize = s
        addr = off if flags & 2 else 0
        out[hdr:hdr + 64] = struct.pack("<IIQQQQIIQQ", shstr.index[name], typ, flags, addr, off, len(data),
                                        link, info, align, entsize)
        hdr += 64
    out[hdr:hdr + 64] = struct.pack("<IIQQQQIIQQ", shstr.index[".shstrtab"], SHT_STRTAB, 0, 0, shstr_off,
                                    len(shstr.data), 0, 0, 1, 0)
    return bytes(out)


FIXTURES = {
    # shared object importing versioned and unversioned symbols, exporting two
    "alsa_utils.so": dict(
        symbols=[
            ("snd_tplg_new", False, "ALSA_0.9", False),
            ("snd_pcm_open", False, "ALSA_0.9", False),
            ("printf", False, "GLIBC_2.2.5", False),
            ("__gmon_start__", False, None, False),
            ("tplg_main", True, None, False),
            ("tplg_verbose", True, None, True),
        ],
        needs={"libasound.so.2": ["ALSA_0.9"], "libc.so.6": ["GLIBC_2.2.5"]},
    ),
    # three undefined and two defined, three versions needed from one library, order mixed
    "multi_version.so": dict(
        symbols=[
            ("memcpy", False, "GLIBC_2.14", False),
            ("exported_fn", True, None, False),
            ("realpath", False, "GLIBC_2.3", False),
            ("exported_table", True, None, True),
            ("free", False, "GLIBC_2.2.5", False),
        ],
        needs={"libc.so.6": ["GLIBC_2.2.5", "GLIBC_2.3", "GLIBC_2.14"]},
    ),
    # dynamic symbols but no verneed entries: all imports unversioned
    "unversioned.so": dict(
        symbols=[("gzgetc", False, None, False), ("gzopen", False, None, False), ("helper", True, None, False)],
        needs={},
    ),
    # relocatable object without a dynamic symbol table
    "static.o": dict(symbols=[], needs={}, e_type=1, with_dynsym=False),
}


def main():
    for name, spec in FIXTURES.items():
        with open(os.path.join(HERE, name), "wb") as fh:
            fh.write(build(**spec))
    freeze_expected()


def freeze_expected():
    """Record readelf's view of each object's undefined dynamic symbols, plus a byte hash."""
    import hashlib
    import json
    import re
    import subprocess

    out = {}
    for name in sorted(FIXTURES):
        path = os.path.join(HERE, name)
        text = subprocess.run(["readelf", "-W", "--dyn-syms", path], capture_output=True, text=True, check=True).stdout
        imports = []
        for line in text.splitlines():
            m = re.match(r"\s*\d+:\s+\S+\s+\d+\s+\S+\s+\S+\s+\S+\s+UND\s+(\S+?)(?:@(\S+))?(?:\s+\(\d+\))?$", line)
            if m and m.group(1):
                imports.append([m.group(1), m.group(2)])
        with open(path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        out[name] = {"sha256": digest, "imports": sorted(imports, key=lambda x: (x[0], x[1] or ""))}
    with open(os.path.join(HERE, "expected.json"), "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
