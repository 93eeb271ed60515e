//! The shaped-stream file format.
//!
//! ```text
//! "SHPC" | version u8 = 1 | v u8 | k_bits u8 | tree hash u64 LE
//!        | input bit count u64 LE | symbols, ceil(log2 v) bits each
//! ```
//!
//! Symbols are packed MSB-first and the last byte is zero-padded. The bit
//! count is the length of the shaped bit string before block padding, so
//! the payload holds exactly `ceil(bits / k_bits)` codewords.

use shapecode_core::bits::BitBuf;
use shapecode_core::pipeline::Shaped;
use shapecode_core::varn::{decode_count, CodeTree};

use crate::json::tree_hash;
use crate::{CliError, Result};

pub const MAGIC: &[u8; 4] = b"SHPC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 23;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub version: u8,
    pub v: u8,
    pub k_bits: u8,
    pub tree_hash: u64,
    pub bit_len: u64,
}

/// Bits per packed symbol, `ceil(log2 v)`.
pub fn symbol_width(v: usize) -> u32 {
    usize::BITS - (v - 1).leading_zeros()
}

pub fn write(s: &Shaped, tree: &CodeTree) -> Vec<u8> {
    let v = tree.output_alphabet();
    let mut out = Vec::with_capacity(HEADER_LEN + s.symbols.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(v as u8);
    out.push(s.k_bits as u8);
    out.extend_from_slice(&tree_hash(tree).to_le_bytes());
    out.extend_from_slice(&s.bit_len.to_le_bytes());
    let w = symbol_width(v);
    let mut payload = BitBuf::new();
    for &sym in &s.symbols {
        payload.push_bits(u64::from(sym), w);
    }
    out.extend_from_slice(payload.as_bytes());
    out
}

pub fn read_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < HEADER_LEN {
        return Err(CliError::Stream("file shorter than header".into()));
    }
    if &bytes[..4] != MAGIC {
        return Err(CliError::Stream("bad magic".into()));
    }
    let le = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
    let h = Header {
        version: bytes[4],
        v: bytes[5],
        k_bits: bytes[6],
        tree_hash: le(7),
        bit_len: le(15),
    };
    if h.version != VERSION {
        return Err(CliError::Stream(format!("unsupported version {}", h.version)));
    }
    Ok(h)
}

/// Parses a stream shaped with `tree`.
pub fn read(bytes: &[u8], tree: &CodeTree) -> Result<Shaped> {
    let h = read_header(bytes)?;
    let v = tree.output_alphabet();
    let expected = tree_hash(tree);
    if h.tree_hash != expected {
        return Err(CliError::TreeMismatch {
            expected,
            found: h.tree_hash,
        });
    }
    if h.v as usize != v || h.k_bits == 0 || h.k_bits > 32 || 1usize << h.k_bits != tree.leaf_count() {
        return Err(CliError::Stream("header does not match tree shape".into()));
    }
    let payload = &bytes[HEADER_LEN..];
    let w = symbol_width(v);
    let bits = BitBuf::from_bytes(payload.to_vec(), payload.len() * 8);
    let mut r = bits.reader();
    let mut symbols = Vec::with_capacity(payload.len() * 8 / w as usize);
    while let Some(s) = r.read_bits(w) {
        // Out-of-alphabet values are rejected by the tree walk below.
        symbols.push(u8::try_from(s).unwrap_or(u8::MAX));
    }
    let words = usize::try_from(h.bit_len.div_ceil(u64::from(h.k_bits)))
        .map_err(|_| CliError::Stream("bit count too large".into()))?;
    let (_, used) = decode_count(tree, &symbols, words)?;
    let tail = bits.len() - used * w as usize;
    if tail >= 8 || bits.iter().skip(used * w as usize).any(|b| b) {
        return Err(CliError::Stream("trailing data after last codeword".into()));
    }
    symbols.truncate(used);
    Ok(Shaped {
        k_bits: u32::from(h.k_bits),
        bit_len: h.bit_len,
        symbols,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(symbol_width(2), 1);
        assert_eq!(symbol_width(3), 2);
        assert_eq!(symbol_width(4), 2);
        assert_eq!(symbol_width(5), 3);
        assert_eq!(symbol_width(255), 8);
    }
}
