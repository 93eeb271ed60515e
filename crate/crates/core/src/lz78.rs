//! LZ78 with a self-delimiting bit format.
//!
//! Layout: the Elias-gamma code of `n + 1` (`n` = input length in bytes),
//! then one token per phrase. Token `j` (0-based) is the index of the longest
//! known prefix in `bit_length(j)` bits (zero bits for the first token)
//! followed by the next byte in 8 bits. Index 0 is the empty phrase and token
//! `j` defines phrase `j + 1`. If the input ends inside a known phrase, the
//! last token carries that phrase's parent and final byte.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bits::BitBuf;
use crate::{Error, Result};

fn index_width(token: usize) -> u32 {
    usize::BITS - token.leading_zeros()
}

pub fn compress(data: &[u8]) -> BitBuf {
    let mut out = BitBuf::new();
    out.push_gamma(data.len() as u64 + 1);
    let mut trie: BTreeMap<(u32, u8), u32> = BTreeMap::new();
    let mut tokens = 0usize;
    let mut node = 0u32;
    // Parent of `node` and the byte leading to it, for a trailing phrase.
    let mut last = (0u32, 0u8);
    for &b in data {
        match trie.get(&(node, b)) {
            Some(&next) => {
                last = (node, b);
                node = next;
            }
            None => {
                out.push_bits(u64::from(node), index_width(tokens));
                out.push_bits(u64::from(b), 8);
                tokens += 1;
                trie.insert((node, b), tokens as u32);
                node = 0;
            }
        }
    }
    if node != 0 {
        out.push_bits(u64::from(last.0), index_width(tokens));
        out.push_bits(u64::from(last.1), 8);
    }
    out
}

/// Number of tokens `compress` emits for `data`.
pub fn token_count(data: &[u8]) -> usize {
    let mut trie: BTreeMap<(u32, u8), u32> = BTreeMap::new();
    let mut node = 0u32;
    let mut tokens = 0usize;
    for &b in data {
        if let Some(&next) = trie.get(&(node, b)) {
            node = next;
        } else {
            tokens += 1;
            trie.insert((node, b), tokens as u32);
            node = 0;
        }
    }
    tokens + usize::from(node != 0)
}

pub fn decompress(bits: &BitBuf) -> Result<Vec<u8>> {
    let mut r = bits.reader();
    let n = r
        .read_gamma()
        .ok_or(Error::CorruptStream("truncated length header"))?
        - 1;
    let n = usize::try_from(n).map_err(|_| Error::CorruptStream("length overflows"))?;
    // A token costs at least 8 bits and yields at least one byte.
    if n / 8 > r.remaining() {
        return Err(Error::CorruptStream("length exceeds payload"));
    }
    let mut out = Vec::with_capacity(n);
    // Phrase j + 1 = phrase[parent] followed by byte.
    let mut dict: Vec<(u32, u8)> = Vec::new();
    let mut scratch = Vec::new();
    while out.len() < n {
        let j = dict.len();
        let index = r
            .read_bits(index_width(j))
            .ok_or(Error::CorruptStream("truncated token"))? as usize;
        let byte = r
            .read_bits(8)
            .ok_or(Error::CorruptStream("truncated token"))? as u8;
        if index > j {
            return Err(Error::CorruptStream("phrase index out of range"));
        }
        scratch.clear();
        scratch.push(byte);
        let mut at = index;
        while at != 0 {
            let (parent, b) = dict[at - 1];
            scratch.push(b);
            at = parent as usize;
        }
        if out.len() + scratch.len() > n {
            return Err(Error::CorruptStream("phrase overruns declared length"));
        }
        out.extend(scratch.iter().rev());
        dict.push((index as u32, byte));
    }
    if r.remaining() != 0 {
        return Err(Error::CorruptStream("trailing bits after last token"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn empty_input() {
        let c = compress(&[]);
        // gamma(1) is a single bit and no tokens follow.
        assert_eq!(c.len(), 1);
        assert_eq!(token_count(&[]), 0);
        assert_eq!(decompress(&c).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn small_round_trips() {
        for data in [&b"ab"[..], b"a", b"abababababab", b"aaaa", b"abcabcabcd"] {
            assert_eq!(decompress(&compress(data)).unwrap(), data);
        }
    }

    #[test]
    fn runs_parse_into_square_root_tokens() {
        let n = 10_000;
        let data = vec![b'a'; n];
        let t = token_count(&data);
        // Phrases have lengths 1, 2, 3, ... so about sqrt(2n) of them.
        assert!((140..=142).contains(&t), "{t}");
        assert_eq!(decompress(&compress(&data)).unwrap(), data);
    }

    #[test]
    fn trailing_phrase_uses_parent() {
        // "a" then "aa"... input "aaa": tokens (0,a) then (1,a); input "aa":
        // (0,a) then trailing phrase "a" sent as (0,a).
        let c = compress(b"aa");
        assert_eq!(decompress(&c).unwrap(), b"aa");
        assert_eq!(token_count(b"aa"), 2);
    }

    #[test]
    fn corrupt_streams() {
        let mut c = compress(b"hello world");
        c.truncate(c.len() - 3);
        assert!(decompress(&c).is_err());
        let mut c = compress(b"hello");
        c.push(false);
        assert!(decompress(&c).is_err());
        assert!(decompress(&BitBuf::new()).is_err());
    }
}
