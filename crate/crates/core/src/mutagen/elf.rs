//! Minimal ELF64 little-endian reader: extracts code and data sections of a
//! relocatable object plus their relocations, ignoring symbol tables, debug
//! info and other metadata that differ between otherwise identical objects.

use std::fmt::Write;

const SHT_RELA: u32 = 4;
const SHT_NOBITS: u32 = 8;
const STT_SECTION: u8 = 3;

struct Section<'a> {
    name: &'a str,
    kind: u32,
    data: &'a [u8],
    size: u64,
    link: u32,
    info: u32,
}

fn u16_at(b: &[u8], off: usize) -> Option<u16> {
    Some(u16::from_le_bytes(b.get(off..off + 2)?.try_into().ok()?))
}

fn u32_at(b: &[u8], off: usize) -> Option<u32> {
    Some(u32::from_le_bytes(b.get(off..off + 4)?.try_into().ok()?))
}

fn u64_at(b: &[u8], off: usize) -> Option<u64> {
    Some(u64::from_le_bytes(b.get(off..off + 8)?.try_into().ok()?))
}

fn cstr(b: &[u8], off: usize) -> &str {
    let tail = b.get(off..).unwrap_or_default();
    let end = tail.iter().position(|&c| c == 0).unwrap_or(tail.len());
    std::str::from_utf8(&tail[..end]).unwrap_or("")
}

fn sections(obj: &[u8]) -> Option<Vec<Section<'_>>> {
    if obj.get(..4)? != b"\x7fELF" || obj[4] != 2 || obj[5] != 1 {
        return None;
    }
    let shoff = u64_at(obj, 0x28)? as usize;
    let shentsize = u16_at(obj, 0x3A)? as usize;
    let shnum = u16_at(obj, 0x3C)? as usize;
    let shstrndx = u16_at(obj, 0x3E)? as usize;
    let header = |i: usize| shoff + i * shentsize;
    let strtab_hdr = header(shstrndx);
    let strtab_off = u64_at(obj, strtab_hdr + 24)? as usize;
    let strtab_size = u64_at(obj, strtab_hdr + 32)? as usize;
    let shstr = obj.get(strtab_off..strtab_off + strtab_size)?;
    let mut out = Vec::with_capacity(shnum);
    for i in 0..shnum {
        let h = header(i);
        let kind = u32_at(obj, h + 4)?;
        let offset = u64_at(obj, h + 24)? as usize;
        let size = u64_at(obj, h + 32)?;
        let data = if kind == SHT_NOBITS { &[][..] } else { obj.get(offset..offset + size as usize)? };
        out.push(Section {
            name: cstr(shstr, u32_at(obj, h)? as usize),
            kind,
            data,
            size,
            link: u32_at(obj, h + 40)?,
            info: u32_at(obj, h + 44)?,
        });
    }
    Some(out)
}

fn is_code_or_data(name: &str) -> bool {
    [".text", ".rodata", ".data", ".bss"].iter().any(|p| name.starts_with(p))
}

/// Canonical text of the object's code/data sections and relocations.
/// `rename` maps symbol and section names (e.g. `mut_f` back to `f`).
pub fn fingerprint(obj: &[u8], rename: &dyn Fn(&str) -> String) -> Option<String> {
    let secs = sections(obj)?;
    let mut out = String::new();
    for s in secs.iter().filter(|s| is_code_or_data(s.name)) {
        let _ = write!(out, "S {} {} ", rename(s.name), s.size);
        for b in s.data {
            let _ = write!(out, "{b:02x}");
        }
        out.push('\n');
    }
    for s in secs.iter().filter(|s| s.kind == SHT_RELA) {
        let target = secs.get(s.info as usize)?;
        if !is_code_or_data(target.name) {
            continue;
        }
        let symtab = secs.get(s.link as usize)?;
        let strtab = secs.get(symtab.link as usize)?;
        let _ = writeln!(out, "R {}", rename(target.name));
        for e in s.data.chunks_exact(24) {
            let offset = u64_at(e, 0)?;
            let info = u64_at(e, 8)?;
            let addend = u64_at(e, 16)? as i64;
            let sym = (info >> 32) as usize * 24;
            let sym_info = *symtab.data.get(sym + 4)?;
            let name = if sym_info & 0xf == STT_SECTION {
                let shndx = u16_at(symtab.data, sym + 6)? as usize;
                secs.get(shndx).map_or("", |s| s.name).to_string()
            } else {
                cstr(strtab.data, u32_at(symtab.data, sym)? as usize).to_string()
            };
            let _ = writeln!(out, "  {offset} {} {} {addend}", info & 0xffff_ffff, rename(&name));
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_elf() {
        assert!(fingerprint(b"not an object", &|s| s.to_string()).is_none());
        assert!(fingerprint(b"", &|s| s.to_string()).is_none());
    }
}
