//! Bit helpers for basis indices and bitstring text.
//!
//! Text form lists atom 0 first: character `k` is the occupation of atom `k`.

use crate::error::{domain, Result};
use crate::lattice::BasisIndex;

/// Gather the bits of `value` selected by `mask` into the low bits (pext).
pub fn compress(value: BasisIndex, mask: BasisIndex) -> BasisIndex {
    let mut out = 0;
    let mut m = mask;
    let mut k = 0;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if value & low != 0 {
            out |= 1 << k;
        }
        k += 1;
        m &= m - 1;
    }
    out
}

/// Scatter the low bits of `value` into the positions selected by `mask` (pdep).
pub fn expand(value: BasisIndex, mask: BasisIndex) -> BasisIndex {
    let mut out = 0;
    let mut m = mask;
    let mut k = 0;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if value & (1 << k) != 0 {
            out |= low;
        }
        k += 1;
        m &= m - 1;
    }
    out
}

pub fn full_mask(n_atoms: usize) -> BasisIndex {
    if n_atoms >= 64 {
        u64::MAX
    } else {
        (1u64 << n_atoms) - 1
    }
}

pub fn format_bitstring(bits: BasisIndex, n_atoms: usize) -> String {
    (0..n_atoms)
        .map(|k| if bits >> k & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(text: &str) -> Result<(BasisIndex, usize)> {
    let text = text.trim();
    if text.is_empty() || text.len() > 63 {
        return Err(domain(format!("bitstring must have 1..=63 characters, got {:?}", text)));
    }
    let mut bits = 0;
    for (k, c) in text.chars().enumerate() {
        match c {
            '0' => {}
            '1' => bits |= 1 << k,
            other => return Err(domain(format!("invalid bitstring character {other:?}"))),
        }
    }
    Ok((bits, text.len()))
}
