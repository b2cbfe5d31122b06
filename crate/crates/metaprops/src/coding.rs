//! Cantor pairing and the sequence coding built from it.
//!
//! `pair(a, b) = (a + b)(a + b + 1)/2 + b`. A finite sequence `s` of length
//! `k` is coded as `pair(k, tree(s))`, where `tree` splits the sequence into
//! halves and pairs the halves recursively. Balanced splitting keeps code
//! sizes linear in the total size of the elements, which a right fold would
//! not.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub fn pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    let t = &s * (&s + 1u32) >> 1u32;
    t + b
}

pub fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    // w = floor((sqrt(8z + 1) - 1) / 2)
    let disc: BigUint = (z << 3u32) + 1u32;
    let w: BigUint = (disc.sqrt() - 1u32) >> 1u32;
    let t = &w * (&w + 1u32) >> 1u32;
    let b = z - t;
    let a = &w - &b;
    (a, b)
}

pub fn pair_u64(a: u64, b: u64) -> BigUint {
    pair(&BigUint::from(a), &BigUint::from(b))
}

fn tree(items: &[BigUint]) -> BigUint {
    match items.len() {
        0 => BigUint::zero(),
        1 => items[0].clone(),
        n => {
            let (l, r) = items.split_at((n + 1) / 2);
            pair(&tree(l), &tree(r))
        }
    }
}

fn untree(code: &BigUint, len: usize, out: &mut Vec<BigUint>) {
    match len {
        0 => {}
        1 => out.push(code.clone()),
        n => {
            let (l, r) = unpair(code);
            let left = (n + 1) / 2;
            untree(&l, left, out);
            untree(&r, n - left, out);
        }
    }
}

pub fn encode_seq(items: &[BigUint]) -> BigUint {
    pair(&BigUint::from(items.len()), &tree(items))
}

/// Decodes a sequence code. Lengths above `max_len` are rejected, which keeps
/// decoding of arbitrary naturals cheap.
pub fn decode_seq(code: &BigUint, max_len: usize) -> Option<Vec<BigUint>> {
    let (len, body) = unpair(code);
    let len = len.to_usize()?;
    if len > max_len || (len == 0 && !body.is_zero()) {
        return None;
    }
    let mut out = Vec::with_capacity(len);
    untree(&body, len, &mut out);
    Some(out)
}

pub fn encode_bytes(bytes: &[u8]) -> BigUint {
    let items: Vec<BigUint> = bytes.iter().map(|&b| BigUint::from(b)).collect();
    encode_seq(&items)
}

pub fn decode_bytes(code: &BigUint, max_len: usize) -> Option<Vec<u8>> {
    decode_seq(code, max_len)?
        .iter()
        .map(|b| b.to_u8())
        .collect()
}

/// `2^k` as a big natural.
pub fn pow2(k: u64) -> BigUint {
    BigUint::one() << k
}

/// Returns `Some(k)` when `n = 2^k`.
pub fn log2_exact(n: &BigUint) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let k = n.bits() - 1;
    if n.trailing_zeros() == Some(k) {
        Some(k)
    } else {
        None
    }
}
